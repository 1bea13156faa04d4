"""Norms, norming functionals and constructive vectors in Tsirelson-type
and mixed Tsirelson sequence spaces, with exact rational arithmetic."""

from .families import (
    An,
    Compose,
    Decomposition,
    Sn,
    decompose,
    is_admissible,
    is_member,
    max_weight_subset,
    maximal_member,
    parse_family,
)
from .functionals import (
    Leaf,
    Node,
    eval_functional,
    format_functional,
    is_comparable,
    make_comparable,
    parse_functional,
    split_xk,
    validate,
)
from .norm import NormResult, admissible_sum, brute_norm, norm
from .spaces import (
    ExplicitSeq,
    Geometric,
    LogReciprocal,
    PowerLaw,
    ScaledPowerLaw,
    SpaceSpec,
    check_regularity,
    derived_params,
    parse_space_config,
    preset,
    regularize,
    theta,
)
from .vectors import SparseVector, parse_vector, sum_vectors

__all__ = [name for name in dir() if not name.startswith("_")]
