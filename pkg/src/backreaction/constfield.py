"""Radiation self-force for a constant electric and magnetic field.

The exact self-force is affine in the velocity,
``s(v) = -(beta B + alpha P) v - beta P e + (alpha / b**2) B e``,
where ``B`` is :func:`~backreaction.core.cross_map` of the magnetic vector and
``P`` projects onto the plane orthogonal to it.  The module computes
``(beta, alpha)`` three ways: in closed form, by iterating the radiation
term, and by iterating the solution through envelope polynomials.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import CONVERGENCE_RTOL, FieldParams, Polynomial, cross_map, to_fraction, vec3
from .iteration import IterationEntry, IterationTrace, run_fixed_point, spectral_radius


@dataclass(frozen=True)
class ConstFieldCoefficients:
    phi: float
    beta: float
    alpha: float
    eta: float
    b: float
    lambda_kernel: float = 0.0

    @property
    def coupling(self) -> float:
        return self.eta * self.b

    @property
    def rejected_beta(self) -> float:
        """The other root ``1 + sqrt(phi)``; it does not vanish with the field."""
        return 1.0 + math.sqrt(self.phi)

    @property
    def outside_iteration_regime(self) -> bool:
        return self.coupling >= 1.0

    def residuals(self) -> dict:
        """Residuals of the defining relations (all dimensionless)."""
        x = self.coupling
        ea = self.eta * self.alpha
        return {
            "quartic": 4 * x * x * self.phi ** 2 + self.phi - 1,
            "beta_relation": self.beta - 2 * ea * (1 - self.beta),
            "alpha_relation": ea - (x * x * (1 - self.beta) ** 2 - ea * ea),
            "phi_relation": (1 - self.beta) ** 2 - self.phi,
        }


def closed_form_coefficients(params: FieldParams) -> ConstFieldCoefficients:
    """Exact ``(phi, beta, alpha)`` for the field ``params``.

    The branch ``beta = 1 - sqrt(phi)`` is the one that vanishes with the
    field.  Both formulas are written without cancellation, so the weak-field
    limit needs no series expansion.
    """
    eta, b = params.eta, params.b
    x2 = (eta * b) ** 2
    s = math.sqrt(1.0 + 16.0 * x2)
    phi = 2.0 / (1.0 + s)
    root = math.sqrt(phi)
    beta = 16.0 * x2 / ((1.0 + s) ** 2 * (1.0 + root))
    alpha = beta / (2.0 * eta * root)
    return ConstFieldCoefficients(phi=phi, beta=beta, alpha=alpha, eta=eta, b=b)


@dataclass(frozen=True)
class SelfForceAffine:
    """``s(v) = linear @ v + constant``."""

    linear: np.ndarray
    constant: np.ndarray

    def __call__(self, v) -> np.ndarray:
        return self.linear @ np.asarray(v, dtype=float) + self.constant

    def state_function(self):
        """The same force as a function of ``(x, v)``."""
        return lambda x, v: self(v)


def affine_from_coefficients(params: FieldParams, beta: float, alpha: float) -> SelfForceAffine:
    B, P, e = params.B, params.P, params.e_vec
    b2 = params.b ** 2
    linear = -beta * B - alpha * P
    if b2 == 0.0:
        return SelfForceAffine(np.zeros((3, 3)), np.zeros(3))
    constant = -beta * (P @ e) + (alpha / b2) * (B @ e)
    return SelfForceAffine(linear, constant)


def self_force(params: FieldParams) -> SelfForceAffine:
    """Exact self-force for the field.

    With no magnetic field a constant force has zero jerk, so the self-force
    is defined to be identically zero.
    """
    c = closed_form_coefficients(params)
    return affine_from_coefficients(params, c.beta, c.alpha)


def pde_residual(s: SelfForceAffine, params: FieldParams, v) -> np.ndarray:
    """``s(v) - eta (B + M)(e + B v + s(v))`` for an affine candidate ``s``."""
    v = np.asarray(v, dtype=float)
    B = params.B
    return s(v) - params.eta * (B + s.linear) @ (params.e_vec + B @ v + s(v))


# --- iteration of the radiation term --------------------------------------

def radiation_term_step(params: FieldParams, entry: IterationEntry) -> IterationEntry:
    eta, b2 = params.eta, params.b ** 2
    B, P = params.B, params.P
    beta, alpha = entry.beta, entry.alpha
    K = -beta * B - alpha * P
    constant = eta * (B + K) @ (params.e_vec + entry.constant)
    return IterationEntry(
        n=entry.n + 1,
        beta=2 * eta * alpha * (1 - beta),
        alpha=eta * b2 * (1 - beta) ** 2 - eta * alpha * alpha,
        constant=constant,
    )


def first_radiation_term(params: FieldParams) -> IterationEntry:
    """Landau's first approximation ``K1 = -eta b**2 P`` with ``d1 = eta B e``."""
    return IterationEntry(n=1, beta=0.0, alpha=params.eta * params.b ** 2,
                          constant=params.eta * params.B @ params.e_vec)


def iterate_radiation_term(params: FieldParams, max_steps: int = 500,
                           tol: float = CONVERGENCE_RTOL) -> IterationTrace:
    """Iterate ``K_n = eta (B + K_{n-1})**2`` on the coefficients of ``K_n``.

    Each entry carries ``(beta_n, alpha_n)`` of ``K_n = -beta_n B - alpha_n P``
    and the constant term produced by the electric field.
    """
    zeroth = IterationEntry(n=0, beta=0.0, alpha=0.0, constant=np.zeros(3))
    return run_fixed_point(lambda e: radiation_term_step(params, e),
                           first_radiation_term(params), max_steps, tol, zeroth=zeroth)


def radiation_term_spectral_radius(params: FieldParams) -> float:
    """Spectral radius of the iteration map linearised at the exact coefficients.

    The iteration converges locally only when this is below one; for the
    constant field that holds for ``eta * b`` below about 0.6356.
    """
    c = closed_form_coefficients(params)
    eta, b2 = params.eta, params.b ** 2
    jac = np.array([[-2 * eta * c.alpha, 2 * eta * (1 - c.beta)],
                    [-2 * eta * b2 * (1 - c.beta), -2 * eta * c.alpha]])
    constant_part = eta * math.hypot(c.alpha, (1 - c.beta) * params.b)
    return max(spectral_radius(jac), constant_part)


# --- iteration of the solution --------------------------------------------

@dataclass(frozen=True)
class EnvelopePair:
    """Envelope polynomials of ``w_n(t) = [p(t) + q(t) B] exp(B t) c``."""

    p: Polynomial
    q: Polynomial

    def rates(self) -> tuple[float, float]:
        """``(alpha_n, beta_n)`` read off from the slopes at ``t = 0``."""
        return -float(self.p[1]), -float(self.q[1])

    def __call__(self, t):
        return (np.real(self.p.evaluate_float(t)), np.real(self.q.evaluate_float(t)))


def iterate_solution_envelopes(params: FieldParams, n: int, exact: bool = True) -> list:
    """Envelope pairs ``(p_k, q_k)`` for ``k = 0..n``.

    With ``exact=True`` the recursion runs over rationals built from the
    decimal representation of ``eta`` and the field components.  The
    envelopes act on the velocity component orthogonal to the magnetic field
    (shifted by the drift when an electric field is present).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if exact:
        eta = to_fraction(params.eta)
        b2 = sum(to_fraction(c) ** 2 for c in params.b_vec)
        one, zero = to_fraction(1), to_fraction(0)
    else:
        eta, b2, one, zero = params.eta, params.b ** 2, 1.0, 0.0
    p, q = Polynomial.constant(one), Polynomial()
    pairs = [EnvelopePair(p, q)]
    for _ in range(n):
        dp = (p.deriv(2) - q.deriv() * (2 * b2) - p * b2) * eta
        dq = (q.deriv(2) + p.deriv() * 2 - q * b2) * eta
        p, q = dp.integ(one), dq.integ(zero)
        pairs.append(EnvelopePair(p, q))
    return pairs


def envelope_limit(params: FieldParams, t):
    """Limit envelopes ``exp(-alpha t) cos(beta b t)`` and ``-exp(-alpha t) sin(beta b t)/b``."""
    c = closed_form_coefficients(params)
    t = np.asarray(t, dtype=float)
    decay = np.exp(-c.alpha * t)
    b = params.b
    f = decay * np.cos(c.beta * b * t)
    g = -decay * np.sin(c.beta * b * t) / b if b > 0 else np.zeros_like(t)
    return f, g


def envelope_characteristic_root(params: FieldParams) -> complex:
    """Root of ``l**2 - (1/eta - 2ib) l - b**2 = 0`` that vanishes with ``b``.

    The discriminant ``1/(4 eta**2) - i b/eta`` has positive real part, so the
    principal square root never crosses its branch cut and the minus branch
    is continuous in ``b`` with value 0 at ``b = 0``.
    """
    eta, b = params.eta, params.b
    return 1 / (2 * eta) - 1j * b - cmath.sqrt(1 / (4 * eta ** 2) - 1j * b / eta)


def coefficients_from_characteristic_root(params: FieldParams) -> tuple[float, float]:
    """``(beta, alpha)`` from the root: real part ``-alpha``, imaginary ``-beta b``."""
    lam = envelope_characteristic_root(params)
    b = params.b
    beta = -lam.imag / b if b > 0 else 0.0
    return beta, -lam.real


# --- trajectories ---------------------------------------------------------

def _plane_frame(params: FieldParams):
    b = params.b
    K = cross_map(params.b_vec / b)
    return params.P, K


def _plane_combination(params: FieldParams, z: complex) -> np.ndarray:
    """Matrix ``Re(z) P + Im(z) K``; ``K`` acts as ``i`` on the orthogonal plane."""
    P, K = _plane_frame(params)
    return z.real * P + z.imag * K


def _drift(params: FieldParams) -> np.ndarray:
    return params.B @ params.e_vec / params.b ** 2


def closed_form_trajectory(params: FieldParams, c0, t: float) -> np.ndarray:
    """Velocity at time ``t`` under the exact second-order equation."""
    c0 = vec3(c0)
    if params.b == 0.0:
        return c0 + params.e_vec * t
    c = closed_form_coefficients(params)
    P = params.P
    Q = np.eye(3) - P
    drift = _drift(params)
    rotation = _plane_combination(params, cmath.exp(complex(-c.alpha, (1 - c.beta) * params.b) * t))
    return Q @ params.e_vec * t + Q @ c0 + drift + rotation @ (P @ c0 - drift)


def closed_form_position(params: FieldParams, x0, c0, t: float) -> np.ndarray:
    """Position obtained by integrating :func:`closed_form_trajectory` exactly."""
    x0, c0 = vec3(x0), vec3(c0)
    if params.b == 0.0:
        return x0 + c0 * t + 0.5 * params.e_vec * t * t
    c = closed_form_coefficients(params)
    P = params.P
    Q = np.eye(3) - P
    drift = _drift(params)
    rate = complex(-c.alpha, (1 - c.beta) * params.b)
    integral = _plane_combination(params, (cmath.exp(rate * t) - 1) / rate)
    return (x0 + 0.5 * Q @ params.e_vec * t * t + Q @ c0 * t + drift * t
            + integral @ (P @ c0 - drift))


def solution_iterate_velocity(params: FieldParams, pair: EnvelopePair, c0, t: float) -> np.ndarray:
    """Velocity of a solution iterate for a general constant field.

    The parallel channel is uniform acceleration; the orthogonal channel is
    the envelope representation applied to ``u = P v - B e / b**2``.
    """
    c0 = vec3(c0)
    if params.b == 0.0:
        return c0 + params.e_vec * t
    P = params.P
    Q = np.eye(3) - P
    drift = _drift(params)
    u0 = P @ c0 - drift
    f, g = pair(t)
    B = params.B
    rotation = _plane_combination(params, cmath.exp(1j * params.b * t))
    u = (f * P + g * B) @ rotation @ u0
    return Q @ (c0 + params.e_vec * t) + u + drift


def readoff_self_force(params: FieldParams, pair: EnvelopePair, v) -> np.ndarray:
    """Self-force at velocity ``v`` read off as ``eta`` times the jerk at ``t = 0``.

    Uses the envelope derivatives at zero, so it is exact for the given
    iterate; it reproduces the closed form in the limit.
    """
    v = vec3(v)
    if params.b == 0.0:
        return np.zeros(3)
    P, B = params.P, params.B
    drift = _drift(params)
    u0 = P @ v - drift
    p1, p2 = float(pair.p.deriv()(0)), float(pair.p.deriv(2)(0))
    q1, q2 = float(pair.q.deriv()(0)), float(pair.q.deriv(2)(0))
    b2 = params.b ** 2
    # second derivative of [p + q B] exp(B t) u0 at t = 0, with B**2 = -b**2 on the plane
    scalar = p2 - 2 * b2 * q1 - b2
    along_B = q2 + 2 * p1
    return params.eta * (scalar * u0 + along_B * B @ u0)


__all__ = [
    "ConstFieldCoefficients", "closed_form_coefficients", "SelfForceAffine",
    "affine_from_coefficients", "self_force", "pde_residual", "radiation_term_step",
    "first_radiation_term", "iterate_radiation_term", "radiation_term_spectral_radius",
    "EnvelopePair", "iterate_solution_envelopes", "envelope_limit",
    "envelope_characteristic_root", "coefficients_from_characteristic_root",
    "closed_form_trajectory", "closed_form_position", "solution_iterate_velocity",
    "readoff_self_force",
]
