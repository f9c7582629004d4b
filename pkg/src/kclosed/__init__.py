"""Constructive K-closedness splitting of (H^p1, H^p2) on a periodic grid."""

from .decompose import Atom, LevelSets, SplitConfig, SplitResult, choose_lambda, level_sets, split
from .grid import GridField, GridSpec, HalfSpaceField, TLadder, integrate, lp_quasinorm, magnitude, measure, tuple_norm
from .inputs import KInput
from .maximal import ConeParams, hl_max, hp_quasinorm, nontangential_max
from .spectral import build_psi, dt_poisson, masked_synthesis, poisson_extend, riesz
from .whitney import DyadicCube, TentSet, WhitneyCover, distance_to_complement, tent, tent_regions, whitney

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "ConeParams",
    "DyadicCube",
    "GridField",
    "GridSpec",
    "HalfSpaceField",
    "KInput",
    "LevelSets",
    "SplitConfig",
    "SplitResult",
    "TLadder",
    "TentSet",
    "WhitneyCover",
    "build_psi",
    "choose_lambda",
    "distance_to_complement",
    "dt_poisson",
    "hl_max",
    "hp_quasinorm",
    "integrate",
    "level_sets",
    "lp_quasinorm",
    "magnitude",
    "masked_synthesis",
    "measure",
    "nontangential_max",
    "poisson_extend",
    "riesz",
    "split",
    "tent",
    "tent_regions",
    "tuple_norm",
    "whitney",
]
