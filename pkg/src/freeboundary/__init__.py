"""Exact computations on the boundary of a free group and its glued quotients.

Reduced words, eventually periodic boundary points, cylinder functions,
the relations R_W, K-groups of the associated crossed products through the
Pimsner-Voiculescu map, and the orbit-count invariant.
"""
from .boundary import BoundaryPoint, act, canonicalize, fixed_points, is_fixed, limit_point, prefix
from .clopen import (
    LevelFunction,
    constant,
    cylinder_p,
    cylinder_q,
    evaluate,
    invariant_basis,
    is_R_invariant,
    refine,
    translate,
)
from .coe import in_X, in_Y, orbit_count, orbit_key, same_orbit
from .ktheory import (
    KGroups,
    SmithCache,
    eta_matrix,
    membership_in_image,
    pv_k_groups,
    sigma_residue,
    tau_matrix,
    verify_recurrence,
)
from .linalg import AbelianPresentation, IntMatrix, SmithForm, kernel_lattice, smith_normal_form
from .quotient import RelationSpec, class_of, classes_meeting_level, density_witness, related, separating_element
from .words import Letter, NotReducedError, RankMismatchError, ReducedWord

__version__ = "0.1.0"

__all__ = [
    "AbelianPresentation", "BoundaryPoint", "IntMatrix", "KGroups", "Letter", "LevelFunction",
    "NotReducedError", "RankMismatchError", "ReducedWord", "RelationSpec", "SmithCache", "SmithForm",
    "act", "canonicalize", "class_of", "classes_meeting_level", "constant", "cylinder_p", "cylinder_q",
    "density_witness", "eta_matrix", "evaluate", "fixed_points", "in_X", "in_Y", "invariant_basis",
    "is_R_invariant", "is_fixed", "kernel_lattice", "limit_point", "membership_in_image", "orbit_count",
    "orbit_key", "prefix", "pv_k_groups", "refine", "related", "same_orbit", "separating_element",
    "sigma_residue", "smith_normal_form", "tau_matrix", "translate", "verify_recurrence",
]
