"""Second-order equation of motion for a radiating nonrelativistic charge.

The self-force ``s(x, v)`` that turns the third-order Lorentz-Dirac equation
into ``v' = f(x, v) + s(x, v)`` is computed for a constant electromagnetic
field (:mod:`~backreaction.constfield`) and for the harmonic oscillator
(:mod:`~backreaction.elastic`).  :mod:`~backreaction.dynamics` integrates
both the reduced and the third-order equations for comparison.
"""

from .core import ElasticParams, FieldParams, Polynomial, cross_map, perpendicular_projector
from .constfield import closed_form_coefficients, self_force
from .elastic import elastic_coefficients

__version__ = "0.1.0"

__all__ = [
    "ElasticParams", "FieldParams", "Polynomial", "cross_map", "perpendicular_projector",
    "closed_form_coefficients", "self_force", "elastic_coefficients", "__version__",
]
