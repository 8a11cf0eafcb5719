"""Exact linear lumping of linear compartmental models."""

__version__ = "0.1.0"

from .errors import LumpkitError
from .families import (
    catenary_irreversible,
    circulant_simplicial,
    cycle,
    cycle_eigensystem,
    mamillary_inward,
    mamillary_mixed_example,
    mamillary_outward,
    mamillary_reversible_uniform,
    reversible_chain,
    verify_closed_form,
)
from .linalg import EigenSystem, eig_transpose, expm_action, generalized_inverse, rank_and_nullspace
from .lumping import (
    LumpedModel,
    LumpingMatrix,
    build_Q,
    farkas_row_test,
    is_exactly_lumpable,
    kinetic_after_lumping,
    lump,
    transform_basis,
)
from .model import (
    CompartmentalModel,
    ReactionNetwork,
    derive_ode,
    induce_reaction_network,
    is_mass_conserving,
    validate_kinetic,
)
from .realizer import build_real_coefficient_matrix, classify_columns, exists_nonneg_P, exists_real_P, feasible_cone
from .dynamics import count_local_extrema, region_scan, simulate, verify_commutation

__all__ = [
    "CompartmentalModel",
    "EigenSystem",
    "LumpedModel",
    "LumpingMatrix",
    "LumpkitError",
    "ReactionNetwork",
    "build_Q",
    "build_real_coefficient_matrix",
    "catenary_irreversible",
    "circulant_simplicial",
    "classify_columns",
    "count_local_extrema",
    "cycle",
    "cycle_eigensystem",
    "derive_ode",
    "eig_transpose",
    "exists_nonneg_P",
    "exists_real_P",
    "expm_action",
    "farkas_row_test",
    "feasible_cone",
    "generalized_inverse",
    "induce_reaction_network",
    "is_exactly_lumpable",
    "is_mass_conserving",
    "kinetic_after_lumping",
    "lump",
    "mamillary_inward",
    "mamillary_mixed_example",
    "mamillary_outward",
    "mamillary_reversible_uniform",
    "rank_and_nullspace",
    "region_scan",
    "reversible_chain",
    "simulate",
    "transform_basis",
    "validate_kinetic",
    "verify_closed_form",
    "verify_commutation",
]
