"""Exact invariants of Dieudonne modules over finite fields.

The package computes Newton polygons, extremal minimal lattices, minimal
heights, isogeny cutoffs and level torsion of p-divisible groups given by
cyclic presentations, and counts truncated homomorphisms by linearization.
"""

__version__ = "0.1.0"

from .dieudonne import (
    CyclicPresentation,
    DieudonneModule,
    from_cyclic,
    minimal_module,
    newton_from_module,
    newton_from_psi,
    psi_with_polygon,
)
from .errors import (
    BudgetError,
    CycleNotFoundError,
    InternalCheckError,
    PdivError,
    PrecisionError,
    PresentationError,
    RingMismatchError,
)
from .invariants import (
    extremal_lattices,
    isogeny_cutoff_exact,
    level_torsion_isoclinic,
    m_minus,
    m_plus_isoclinic,
    minimal_height,
    report,
    witness_check,
)
from .newton import NewtonPolygon, hull_from_points, support_lines
from .semilinear import Lattice, SemilinearMap, lattice_exponents, smith_reduce
from .truncated_hom import cross_check, gamma_profile, hom_kernel
from .witt import SATURATED, WittRing, WittScalar, ring_create
