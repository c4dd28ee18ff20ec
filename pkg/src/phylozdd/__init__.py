"""Enumerate and count directed binary perfect phylogenies from incomplete
binary character data, via a ZDD engine and a branch-and-bound search."""

from .core import (ElementSet, Instance, Phylogeny, Violation, canonical_key,
                   is_laminar, is_sandwiched, validate_instance)
from .zdd import ZddRef, ZddStore
from .feasibility import FeasibilityResult, brute_force_solutions, feasible
from .zddbuild import (BuildDeadlineExceeded, BuildStats, VarMap, build,
                       iter_solutions, make_order, solution_of)
from .bnb import BnbStats, bnb_count, bnb_enumerate
from .reductions import BipartiteGraph, brute_force_matching_count, matching_to_idbpp
from .datagen import (GenConfig, SplitMix64, compression_family, derive_seed,
                      gen_ground_truth, instance_from_config, perturb)

__version__ = "0.1.0"

__all__ = [
    "ElementSet", "Instance", "Phylogeny", "Violation", "canonical_key",
    "is_laminar", "is_sandwiched", "validate_instance",
    "ZddRef", "ZddStore",
    "FeasibilityResult", "brute_force_solutions", "feasible",
    "BuildDeadlineExceeded", "BuildStats", "VarMap", "build",
    "iter_solutions", "make_order", "solution_of",
    "BnbStats", "bnb_count", "bnb_enumerate",
    "BipartiteGraph", "brute_force_matching_count", "matching_to_idbpp",
    "GenConfig", "SplitMix64", "compression_family", "derive_seed",
    "gen_ground_truth", "instance_from_config", "perturb",
]
