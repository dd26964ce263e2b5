"""Poincaré-Reeb graphs of planar algebraic domains and real algebraic lifts realizing them."""
from ._kernels import BACKEND
from .domain import AlgebraicDomain, Membership, ValidationReport, classify, validate
from .graph import ReebGraph, betti1, isomorphic, smooth_degree2
from .lift import LiftResult, LiftSpec, build_lift, sample_surface, verify_regularity
from .mapper import MapperConfig, mapper_reeb
from .poly import Interval, Polynomial, evaluate, partial, product, real_roots, restrict
from .preeb import build_poincare_reeb, critical_x_values, slab_components

__all__ = [
    "BACKEND", "AlgebraicDomain", "Membership", "ValidationReport", "classify", "validate",
    "ReebGraph", "betti1", "isomorphic", "smooth_degree2",
    "LiftResult", "LiftSpec", "build_lift", "sample_surface", "verify_regularity",
    "MapperConfig", "mapper_reeb",
    "Interval", "Polynomial", "evaluate", "partial", "product", "real_roots", "restrict",
    "build_poincare_reeb", "critical_x_values", "slab_components",
]
