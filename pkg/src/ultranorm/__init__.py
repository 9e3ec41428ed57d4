"""Exact ultrametric normed linear algebra over valued fields.

Core objects: valued fields (p-adic, trivial, Laurent), exact norm
magnitudes, orthogonal-basis normed spaces with quotient/dual/lattice
operations, quotient metrics on projective coordinate rings, extension
obstruction indices, and adelic lambda invariants.
"""

from .fields import (LaurentRationals, Magnitude, PadicRationals,
                     RationalFunction, TrivialRationals, ValuedField,
                     choose_laurent_base)
from .spaces import (Lattice, NormedSpace, PreconditionError,
                     distance_to_subspace, dual_norm, lattice_from_norm,
                     norm_attaining_lift, norm_from_lattice,
                     orthogonalize_flag, quotient_norm, scalar_extension)

__all__ = [
    "LaurentRationals",
    "Lattice",
    "Magnitude",
    "NormedSpace",
    "PadicRationals",
    "PreconditionError",
    "RationalFunction",
    "TrivialRationals",
    "ValuedField",
    "choose_laurent_base",
    "distance_to_subspace",
    "dual_norm",
    "lattice_from_norm",
    "norm_attaining_lift",
    "norm_from_lattice",
    "orthogonalize_flag",
    "quotient_norm",
    "scalar_extension",
]

__version__ = "0.1.0"
