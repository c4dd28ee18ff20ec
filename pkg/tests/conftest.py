import random

import pytest

from phylozdd.core import ElementSet, Instance


def random_small_instance(rng: random.Random, max_m: int = 6, max_n: int = 6,
                          max_k: int = 16) -> Instance:
    """Random sandwich instance with a capped number of undecided pairs.

    The cap keeps brute-force completion enumeration affordable; the draw
    skews toward small k so oracle suites stay fast.
    """
    m = rng.randrange(0, max_m + 1)
    n = rng.randrange(1, max_n + 1)
    budget = rng.randrange(0, max_k + 1)
    lower, upper = [], []
    for _ in range(m):
        lo = 0
        up = 0
        for e in range(n):
            r = rng.random()
            if r < 0.35:
                lo |= 1 << e
                up |= 1 << e
            elif r < 0.6 and budget > 0:
                up |= 1 << e
                budget -= 1
        lower.append(ElementSet(n, lo))
        upper.append(ElementSet(n, up))
    return Instance(n, m, tuple(lower), tuple(upper))


@pytest.fixture(params=["python", "numba"])
def backend(request):
    if request.param == "numba":
        pytest.importorskip("numba")
    return request.param
