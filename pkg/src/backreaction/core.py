"""Shared numeric vocabulary.

Vectors are ``numpy`` arrays of shape ``(3,)`` and linear maps are ``(3, 3)``
arrays.  All physical inputs are per-mass ("reduced") quantities: the
electric acceleration ``e_vec``, the magnetic frequency vector ``b_vec``,
the oscillator frequency ``omega`` and the damping time ``eta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

# default relative tolerance for fixed-point convergence
CONVERGENCE_RTOL = 1e-10
# default tolerance for algebraic identity checks
IDENTITY_RTOL = 1e-12


class DegenerateDirectionError(ValueError):
    pass


def vec3(values: Iterable[float]) -> np.ndarray:
    """Return a finite float vector of length 3 (copied, read-only)."""
    v = np.array(values, dtype=float).reshape(-1)
    if v.shape != (3,):
        raise ValueError(f"expected 3 components, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    v.flags.writeable = False
    return v


ZERO = vec3((0.0, 0.0, 0.0))
IDENTITY = np.eye(3)
IDENTITY.flags.writeable = False


def cross_map(b_vec: Sequence[float]) -> np.ndarray:
    """Matrix of ``v -> v x b`` (equivalently ``-(b x)``).

    The map is antisymmetric; its kernel is spanned by ``b_vec``.
    """
    bx, by, bz = vec3(b_vec)
    return np.array([[0.0, bz, -by],
                     [-bz, 0.0, bx],
                     [by, -bx, 0.0]])


def perpendicular_projector(b_vec: Sequence[float]) -> np.ndarray:
    """Orthogonal projector onto the plane orthogonal to ``b_vec``.

    Returns the zero map for ``b_vec = 0`` so that ``cross_map(b)**2 == -b**2 P``
    holds for every field, including the degenerate one.
    """
    b = vec3(b_vec)
    b2 = float(b @ b)
    if b2 == 0.0:
        return np.zeros((3, 3))
    return np.eye(3) - np.outer(b, b) / b2


def project_parallel_perp(v: Sequence[float], b_vec: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Split ``v`` into the parts parallel and orthogonal to ``b_vec``.

    Raises
    ------
    DegenerateDirectionError
        If ``b_vec`` is the zero vector.
    """
    b = vec3(b_vec)
    v = vec3(v)
    b2 = float(b @ b)
    if b2 == 0.0:
        raise DegenerateDirectionError("degenerate magnetic direction")
    parallel = b * (float(b @ v) / b2)
    return parallel, v - parallel


@dataclass(frozen=True)
class FieldParams:
    """Constant electric/magnetic field data in per-mass units.

    ``f(v) = e_vec + cross_map(b_vec) @ v`` is the force per mass.
    """

    e_vec: np.ndarray = field(default_factory=lambda: ZERO)
    b_vec: np.ndarray = field(default_factory=lambda: ZERO)
    eta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "e_vec", vec3(self.e_vec))
        object.__setattr__(self, "b_vec", vec3(self.b_vec))
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ValueError("eta must be positive and finite")

    @property
    def b(self) -> float:
        return float(np.linalg.norm(self.b_vec))

    @property
    def coupling(self) -> float:
        """Dimensionless coupling ``eta * b``."""
        return self.eta * self.b

    @property
    def B(self) -> np.ndarray:
        return cross_map(self.b_vec)

    @property
    def P(self) -> np.ndarray:
        return perpendicular_projector(self.b_vec)

    def force(self, v) -> np.ndarray:
        return self.e_vec + self.B @ np.asarray(v, dtype=float)


@dataclass(frozen=True)
class ElasticParams:
    """Harmonic force ``-omega**2 x`` with damping time ``eta``."""

    omega: float = 0.0
    eta: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ValueError("eta must be positive and finite")
        if not (math.isfinite(self.omega) and self.omega >= 0):
            raise ValueError("omega must be non-negative and finite")

    @property
    def coupling(self) -> float:
        return self.eta * self.omega


def to_fraction(x) -> Fraction:
    """Rational value of ``x``; floats go through their shortest decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(repr(float(x)))


class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def _coerce(cls, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return cls(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return complex(self) + other
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return complex(self) * other
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return complex(self) / other
        d = o.re * o.re + o.im * o.im
        return GaussianRational((self.re * o.re + self.im * o.im) / d,
                                (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        return GaussianRational._coerce(other) / self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return complex(self) == other
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re or self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"


I_EXACT = GaussianRational(0, 1)


def _is_zero(c) -> bool:
    return not bool(c)


class Polynomial:
    """Dense univariate polynomial, coefficients in ascending degree.

    Coefficients may be ``int``, ``Fraction``, ``GaussianRational``, ``float``
    or ``complex``; arithmetic stays exact for the exact types.  Trailing
    zeros are stripped, so the zero polynomial has no coefficients.
    """

    __slots__ = ("coef",)

    def __init__(self, coef: Iterable = ()):
        c = list(coef)
        while c and _is_zero(c[-1]):
            c.pop()
        self.coef = tuple(c)

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls((c,))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coef) - 1

    def __getitem__(self, k):
        return self.coef[k] if 0 <= k < len(self.coef) else 0

    def __len__(self):
        return len(self.coef)

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        n = max(len(self.coef), len(other.coef))
        return Polynomial(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-c for c in self.coef)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(c * other for c in self.coef)
        if not self.coef or not other.coef:
            return Polynomial()
        out = [0] * (len(self.coef) + len(other.coef) - 1)
        for i, a in enumerate(self.coef):
            for j, b in enumerate(other.coef):
                out[i + j] = out[i + j] + a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        return self.coef == other.coef

    def __hash__(self):
        return hash(self.coef)

    def __call__(self, t):
        """Evaluate by Horner's rule; ``t`` may be a scalar or an array."""
        result = 0
        for c in reversed(self.coef):
            result = result * t + c
        return result

    def deriv(self, m: int = 1) -> "Polynomial":
        p = self
        for _ in range(m):
            p = Polynomial(k * c for k, c in enumerate(p.coef) if k > 0)
        return p

    def integ(self, constant=0) -> "Polynomial":
        """Antiderivative with value ``constant`` at zero."""
        return Polynomial([constant] + [_divide(c, k + 1) for k, c in enumerate(self.coef)])

    def map(self, fn) -> "Polynomial":
        return Polynomial(fn(c) for c in self.coef)

    def to_numpy(self, dtype=complex) -> np.ndarray:
        return np.array([dtype(c) for c in self.coef] or [dtype(0)])

    def evaluate_float(self, t, dtype=complex):
        """Evaluate in floating point (coefficients rounded first)."""
        return np.polynomial.polynomial.polyval(t, self.to_numpy(dtype))

    def __repr__(self):
        return f"Polynomial({list(self.coef)!r})"


def _divide(c, k: int):
    if isinstance(c, (int, np.integer)):
        return Fraction(int(c), k)
    return c / k


def is_integral(p: Polynomial) -> bool:
    return all(isinstance(c, int) or (isinstance(c, Fraction) and c.denominator == 1)
               for c in p.coef)


def relative_close(a, b, rtol: float) -> bool:
    """``|a - b| <= rtol * max(|a|, |b|)`` elementwise (exact zeros compare equal)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(np.abs(a), np.abs(b))
    return bool(np.all(np.abs(a - b) <= rtol * scale))


__all__ = [
    "CONVERGENCE_RTOL", "IDENTITY_RTOL", "DegenerateDirectionError",
    "vec3", "ZERO", "IDENTITY", "cross_map", "perpendicular_projector",
    "project_parallel_perp", "FieldParams", "ElasticParams", "to_fraction",
    "GaussianRational", "I_EXACT", "Polynomial", "is_integral", "relative_close",
]
