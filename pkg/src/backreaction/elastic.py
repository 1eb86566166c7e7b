"""Radiation self-force for the one-dimensional harmonic oscillator.

The exact self-force is ``s(x, v) = beta omega**2 x - alpha v`` and the
reduced equation of motion is ``x'' = -(1 - beta) omega**2 x - alpha x'``.
Everything here also works componentwise on arrays, which is how the
isotropic three-dimensional oscillator in :mod:`backreaction.dynamics` uses it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .core import (CONVERGENCE_RTOL, ElasticParams, GaussianRational, I_EXACT, Polynomial,
                   to_fraction)
from .iteration import IterationEntry, IterationTrace, run_fixed_point, spectral_radius


@dataclass(frozen=True)
class CubicRoots:
    """Roots of ``eta l**3 - l**2 - omega**2 = 0``."""

    rho_plus: float
    rho_minus: float
    lambda1: complex
    lambda2: complex
    lambda3: float
    eta: float
    omega: float

    @property
    def all(self) -> tuple:
        return (self.lambda1, self.lambda2, complex(self.lambda3))

    def residuals(self) -> list:
        """Relative residuals ``|eta l**3 - l**2 - omega**2| / (eta|l|**3 + |l|**2 + omega**2)``."""
        out = []
        for lam in self.all:
            value = self.eta * lam ** 3 - lam ** 2 - self.omega ** 2
            scale = self.eta * abs(lam) ** 3 + abs(lam) ** 2 + self.omega ** 2
            out.append(abs(value) / scale if scale else 0.0)
        return out


def _cardano_angle(coupling: float) -> float:
    """``theta`` with ``rho_pm = exp(+-theta) / 3``.

    ``rho_plus * rho_minus = 1/9`` exactly, so one cube root and a ``log1p``
    give both intermediates without the cancellation in ``A - sqrt(D)``.
    """
    k2 = coupling * coupling
    radicand = 27.0 * k2 / 2.0 + 27.0 * math.sqrt(k2 * k2 / 4.0 + k2 / 27.0)
    return math.log1p(radicand) / 3.0


def cardano_roots(params: ElasticParams) -> CubicRoots:
    eta = params.eta
    theta = _cardano_angle(params.coupling)
    real = -(2.0 / 3.0) * math.sinh(theta / 2) ** 2
    imag = math.sinh(theta) / math.sqrt(3.0)
    return CubicRoots(
        rho_plus=math.exp(theta) / 3.0,
        rho_minus=math.exp(-theta) / 3.0,
        lambda1=complex(real, imag) / eta,
        lambda2=complex(real, -imag) / eta,
        lambda3=(1.0 / 3.0 + (2.0 / 3.0) * math.cosh(theta)) / eta,
        eta=eta,
        omega=params.omega,
    )


@dataclass(frozen=True)
class ElasticCoefficients:
    beta: float
    alpha: float
    eta: float
    omega: float

    def residuals(self) -> dict:
        ea = self.eta * self.alpha
        k2 = (self.eta * self.omega) ** 2
        return {
            "beta_relation": self.beta - ea / (1 + ea),
            "cubic": ea * (1 + ea) ** 2 - k2,
        }

    @property
    def frequency(self) -> float:
        """Oscillation frequency ``nu`` of the reduced equation."""
        return math.sqrt(max((1 - self.beta) * self.omega ** 2 - self.alpha ** 2 / 4, 0.0))


def elastic_coefficients(params: ElasticParams) -> ElasticCoefficients:
    """Exact ``(beta, alpha)``: ``eta alpha = rho_plus + rho_minus - 2/3``.

    Evaluated as ``(4/3) sinh(theta/2)**2``, the same quantity without the
    subtraction, so small couplings keep full relative precision.
    """
    theta = _cardano_angle(params.coupling)
    ea = (4.0 / 3.0) * math.sinh(theta / 2) ** 2
    return ElasticCoefficients(beta=ea / (1 + ea), alpha=ea / params.eta,
                               eta=params.eta, omega=params.omega)


@dataclass(frozen=True)
class ElasticSelfForce:
    beta: float
    alpha: float
    omega: float

    def __call__(self, x, v):
        return self.beta * self.omega ** 2 * np.asarray(x) - self.alpha * np.asarray(v)


def self_force(params: ElasticParams) -> ElasticSelfForce:
    c = elastic_coefficients(params)
    return ElasticSelfForce(c.beta, c.alpha, params.omega)


def pde_residual_elastic(s_beta: float, s_alpha: float, params: ElasticParams, x, v):
    """Residual of ``s = eta [-omega**2 v + s_x v + s_v (-omega**2 x + s)]`` for linear ``s``."""
    w2, eta = params.omega ** 2, params.eta
    x, v = np.asarray(x, dtype=float), np.asarray(v, dtype=float)
    s = s_beta * w2 * x - s_alpha * v
    return s - eta * (-w2 * v + s_beta * w2 * v - s_alpha * (-w2 * x + s))


# --- characteristics ------------------------------------------------------

def characteristic_matrix(params: ElasticParams) -> np.ndarray:
    w2 = params.omega ** 2
    return np.array([[0.0, 1.0, 0.0],
                     [-w2, 0.0, 1.0],
                     [0.0, w2, 1.0 / params.eta]])


# below this root separation the eigenbasis is too ill-conditioned to use
_MIN_ROOT_SEPARATION = 1e-6


def characteristic_flow(params: ElasticParams, x0: float, v0: float, s0: float, xi):
    """Solve the characteristic system exactly at the parameter value(s) ``xi``.

    Returns an array of shape ``(len(xi), 3)`` with columns ``x, v, s`` (or
    shape ``(3,)`` for scalar ``xi``).  The eigenvectors are
    ``(1, l, l**2 + omega**2)`` for each cubic root ``l``.
    """
    start = np.array([x0, v0, s0], dtype=float)
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    roots = cardano_roots(params)
    lam = np.array(roots.all)
    if params.eta * abs(lam[0] - lam[1]) > _MIN_ROOT_SEPARATION:
        V = np.vstack([np.ones(3), lam, lam ** 2 + params.omega ** 2])
        amplitudes = np.linalg.solve(V, start.astype(complex))
        out = np.real(np.exp(np.outer(xi_arr, lam)) * amplitudes @ V.T)
    else:
        A = characteristic_matrix(params)
        out = np.array([expm(A * s) @ start for s in xi_arr])
    return out[0] if np.ndim(xi) == 0 else out


def graph_amplitude(params: ElasticParams, x0: float, v0: float, s0: float) -> complex:
    """Coefficient of the runaway eigenmode in the start point.

    It vanishes exactly when ``s0`` lies on the graph of the exact self-force.
    """
    roots = cardano_roots(params)
    lam = np.array(roots.all)
    V = np.vstack([np.ones(3), lam, lam ** 2 + params.omega ** 2])
    return np.linalg.solve(V, np.array([x0, v0, s0], dtype=complex))[2]


# --- iteration of the radiation term --------------------------------------

def radiation_term_step_elastic(params: ElasticParams, entry: IterationEntry) -> IterationEntry:
    eta, w2 = params.eta, params.omega ** 2
    beta, alpha = entry.beta, entry.alpha
    return IterationEntry(n=entry.n + 1,
                          beta=eta * alpha * (1 - beta),
                          alpha=eta * w2 * (1 - beta) - eta * alpha * alpha)


def first_radiation_term_elastic(params: ElasticParams) -> IterationEntry:
    """Landau's first approximation ``s1 = -eta omega**2 v``."""
    return IterationEntry(n=1, beta=0.0, alpha=params.eta * params.omega ** 2)


def iterate_radiation_term_elastic(params: ElasticParams, max_steps: int = 2000,
                                   tol: float = CONVERGENCE_RTOL) -> IterationTrace:
    zeroth = IterationEntry(n=0, beta=0.0, alpha=0.0)
    return run_fixed_point(lambda e: radiation_term_step_elastic(params, e),
                           first_radiation_term_elastic(params), max_steps, tol, zeroth=zeroth)


def radiation_term_spectral_radius_elastic(params: ElasticParams) -> float:
    """Local contraction factor at the exact coefficients (converges below ~0.9452)."""
    c = elastic_coefficients(params)
    eta, w2 = params.eta, params.omega ** 2
    jac = np.array([[-eta * c.alpha, eta * (1 - c.beta)],
                    [-eta * w2, -2 * eta * c.alpha]])
    return spectral_radius(jac)


# --- iteration of the solution --------------------------------------------

@dataclass(frozen=True)
class ComplexEnvelope:
    """``z(t) = p(t) exp(i omega t) + conjugate``, always real."""

    p: Polynomial
    omega: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return 2.0 * np.real(self.p.evaluate_float(t) * np.exp(1j * self.omega * t))

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        dp = self.p.deriv().evaluate_float(t)
        return 2.0 * np.real((dp + 1j * self.omega * self.p.evaluate_float(t))
                             * np.exp(1j * self.omega * t))

    def rate(self) -> complex:
        """``p'(0) / p(0)``; tends to ``-alpha/2 + i(nu - omega)`` along the iteration."""
        return complex(self.p[1]) / complex(self.p[0])


def _particular_first_derivative(rhs: Polynomial, two_i_omega) -> Polynomial:
    """Polynomial ``r`` with ``r' + 2 i omega r = rhs`` (unique since ``omega > 0``)."""
    r = Polynomial()
    term = rhs
    factor = 1 / two_i_omega
    sign = 1
    while term.degree >= 0:
        r = r + term * (factor * sign)
        term = term.deriv()
        factor = factor / two_i_omega
        sign = -sign
    return r


def iterate_solution_elastic(params: ElasticParams, a0: float, h0: float, n: int,
                             exact: bool = True) -> list:
    """Solution iterates ``z_0..z_n`` for start position ``a0`` and velocity ``h0``.

    Each new envelope is the polynomial particular solution of the forced
    equation plus the complex constant fixed by ``z(0) = a0`` and
    ``z'(0) = h0``.
    """
    if params.omega == 0:
        raise ValueError("omega = 0: use free-particle branch")
    if n < 0:
        raise ValueError("n must be non-negative")
    if exact:
        eta, w = to_fraction(params.eta), to_fraction(params.omega)
        a0_, h0_ = to_fraction(a0), to_fraction(h0)
        i = I_EXACT
        make = GaussianRational
    else:
        eta, w, a0_, h0_ = params.eta, params.omega, float(a0), float(h0)
        i = 1j
        make = complex
    p = Polynomial.constant(make(a0_ / 2, -h0_ / (2 * w)))
    envelopes = [ComplexEnvelope(p, params.omega)]
    for _ in range(n):
        rhs = (p.deriv(3) + p.deriv(2) * (3 * w * i) - p.deriv() * (3 * w * w)
               - p * (i * w ** 3)) * eta
        r = _particular_first_derivative(rhs, 2 * w * i)
        r0 = make(0) + r[0]
        r0_real = r0.re if exact else r0.real
        p = r.integ(make(a0_ / 2, (2 * r0_real - h0_) / (2 * w)))
        envelopes.append(ComplexEnvelope(p, params.omega))
    return envelopes


def char_root_conditions(params: ElasticParams) -> tuple[float, float]:
    """Decay rate ``mu`` and frequency ``nu`` of the limit solution ``exp((-mu + i nu) t)``.

    ``m = eta mu`` solves ``8 m**3 + 8 m**2 + 2 m - (eta omega)**2 = 0``; the
    left side is non-positive for ``m <= 0``, so the nonnegative real root is
    the unique real root and the one that vanishes with ``omega``.  Then
    ``nu**2 = 3 mu**2 + 2 mu / eta`` and ``alpha = 2 mu``.
    """
    if params.omega <= 0:
        raise ValueError("omega must be positive")
    eta = params.eta
    k2 = params.coupling ** 2
    cubic = np.array([8.0, 8.0, 2.0, -k2])
    candidates = [r.real for r in np.roots(cubic) if abs(r.imag) <= 1e-9 * max(1.0, abs(r))]
    m = max(candidates)
    for _ in range(3):
        value = ((8 * m + 8) * m + 2) * m - k2
        slope = (24 * m + 16) * m + 2
        m -= value / slope
    mu = m / eta
    return mu, math.sqrt(3 * mu * mu + 2 * mu / eta)


def coefficients_from_char_roots(params: ElasticParams) -> tuple[float, float]:
    """``(beta, alpha)`` from ``alpha = 2 mu`` and ``nu**2 = (1 - beta) omega**2 - alpha**2/4``."""
    mu, nu = char_root_conditions(params)
    alpha = 2 * mu
    beta = 1 - (nu * nu + alpha * alpha / 4) / params.omega ** 2
    return beta, alpha


def reduced_solution(params: ElasticParams, a0: float, h0: float, t):
    """Analytic ``(x, v)`` of ``x'' = -(1 - beta) omega**2 x - alpha x'``."""
    t = np.asarray(t, dtype=float)
    if params.omega == 0:
        return a0 + h0 * t, np.full_like(t, h0)
    c = elastic_coefficients(params)
    nu = c.frequency
    g = c.alpha / 2
    decay = np.exp(-g * t)
    amp_s = (h0 + g * a0) / nu
    x = decay * (a0 * np.cos(nu * t) + amp_s * np.sin(nu * t))
    v = decay * ((amp_s * nu - g * a0) * np.cos(nu * t) - (a0 * nu + g * amp_s) * np.sin(nu * t))
    return x, v


__all__ = [
    "CubicRoots", "cardano_roots", "ElasticCoefficients", "elastic_coefficients",
    "ElasticSelfForce", "self_force", "pde_residual_elastic", "characteristic_matrix",
    "characteristic_flow", "graph_amplitude", "radiation_term_step_elastic",
    "first_radiation_term_elastic", "iterate_radiation_term_elastic",
    "radiation_term_spectral_radius_elastic", "ComplexEnvelope", "iterate_solution_elastic",
    "char_root_conditions", "coefficients_from_char_roots", "reduced_solution",
]
