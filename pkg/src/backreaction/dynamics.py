"""Direct integration of the third-order and reduced second-order equations.

The nonrelativistic Lorentz-Dirac equation in per-mass form is

    x' = v,   v' = a,   eta a' = a - f(x, v),

which has an unstable mode growing roughly like ``exp(t / eta)``.  The
reduced equation ``v' = f(x, v) + s(x, v)`` has no such mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .core import FieldParams, vec3

# terminate when |a| exceeds this multiple of the initial acceleration scale
RUNAWAY_FACTOR = 1e12
# unperturbed third-order runs follow the reduced solution to TRACKING_ERROR
# over TRACKING_WINDOW_FACTOR * eta * ln(TRACKING_ERROR / machine epsilon)
TRACKING_ERROR = 1e-6
TRACKING_WINDOW_FACTOR = 0.5

SOLVERS = {
    "rk45": "RK45",      # explicit Dormand-Prince 4(5)
    "dop853": "DOP853",  # explicit Dormand-Prince 8(5,3)
    "radau": "Radau",    # implicit Radau IIA, order 5
    "bdf": "BDF",
}

COMPLETED = "completed"
RUNAWAY = "runaway"
BLOWN_UP = "blown-up"


def tracking_window(eta: float) -> float:
    """Time span over which an on-manifold third-order run is trusted."""
    return TRACKING_WINDOW_FACTOR * eta * math.log(TRACKING_ERROR / np.finfo(float).eps)


def _fd_step(arg: np.ndarray) -> np.ndarray:
    return np.maximum(1e-6, 1e-6 * np.abs(arg))


def _central_jacobian(fn, arg: np.ndarray) -> np.ndarray:
    h = _fd_step(arg)
    cols = []
    for j in range(3):
        dx = np.zeros(3)
        dx[j] = h[j]
        cols.append((fn(arg + dx) - fn(arg - dx)) / (2 * h[j]))
    return np.column_stack(cols)


@dataclass(frozen=True)
class ForceField:
    """Force per mass ``f(x, v)`` with optional analytic Jacobians."""

    func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    jac_x: Optional[Callable] = None
    jac_v: Optional[Callable] = None

    def __call__(self, x, v) -> np.ndarray:
        return np.asarray(self.func(np.asarray(x, dtype=float), np.asarray(v, dtype=float)),
                          dtype=float)

    def d_dx(self, x, v) -> np.ndarray:
        x, v = np.asarray(x, dtype=float), np.asarray(v, dtype=float)
        if self.jac_x is not None:
            return np.asarray(self.jac_x(x, v), dtype=float)
        return _central_jacobian(lambda y: self(y, v), x)

    def d_dv(self, x, v) -> np.ndarray:
        x, v = np.asarray(x, dtype=float), np.asarray(v, dtype=float)
        if self.jac_v is not None:
            return np.asarray(self.jac_v(x, v), dtype=float)
        return _central_jacobian(lambda y: self(x, y), v)

    def numeric(self) -> "ForceField":
        """The same field with finite-difference Jacobians only."""
        return ForceField(self.func)


def constant_field(params: FieldParams) -> ForceField:
    e, B = params.e_vec, params.B
    return ForceField(lambda x, v: e + B @ v,
                      jac_x=lambda x, v: np.zeros((3, 3)),
                      jac_v=lambda x, v: B)


def elastic_field(omega: float) -> ForceField:
    """Isotropic harmonic force ``-omega**2 x``; each axis is an independent oscillator."""
    w2 = omega * omega
    return ForceField(lambda x, v: -w2 * x,
                      jac_x=lambda x, v: -w2 * np.eye(3),
                      jac_v=lambda x, v: np.zeros((3, 3)))


def landau_first_approximation(field: ForceField, eta: float):
    """First-order self-force ``eta [f_x v + f_v f]`` as a function of ``(x, v)``."""
    def s1(x, v):
        x, v = np.asarray(x, dtype=float), np.asarray(v, dtype=float)
        return eta * (field.d_dx(x, v) @ v + field.d_dv(x, v) @ field(x, v))
    return s1


@dataclass(frozen=True)
class LDState:
    x: np.ndarray
    v: np.ndarray
    a: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("x", "v", "a"):
            object.__setattr__(self, name, vec3(getattr(self, name)))
        if not math.isfinite(self.t):
            raise ValueError("t must be finite")


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    a: Optional[np.ndarray] = None
    solver: str = ""
    rtol: float = 0.0
    atol: float = 0.0
    reason: str = COMPLETED
    blown_up_at: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    @property
    def spacing(self) -> Optional[float]:
        """Uniform sample spacing, or ``None`` if the samples are not uniform."""
        if len(self.t) < 2:
            return None
        dt = np.diff(self.t)
        if np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
            return float(dt[0])
        return None


def _sample_times(t_end: float, dt: Optional[float]):
    if dt is None:
        return None
    n = int(round(t_end / dt))
    return np.linspace(0.0, n * dt, n + 1)


def _check_solver(method: str) -> str:
    try:
        return SOLVERS[method.lower()]
    except KeyError:
        raise ValueError(f"unknown solver {method!r}; choose from {sorted(SOLVERS)}") from None


def initial_acceleration_scale(field: ForceField, state: LDState) -> float:
    """Scale used by the runaway threshold: ``|f(x0, v0)|``, else ``|a0|``, else 1."""
    for candidate in (np.linalg.norm(field(state.x, state.v)), np.linalg.norm(state.a)):
        if candidate > 0:
            return float(candidate)
    return 1.0


def integrate_lorentz_dirac(field: ForceField, s0: LDState, eta: float, t_end: float,
                            tol: float = 1e-10, method: str = "radau",
                            dt: Optional[float] = None) -> Trajectory:
    """Integrate the third-order equation forward from ``s0``.

    Stops with reason ``"runaway"`` once ``|a|`` exceeds ``RUNAWAY_FACTOR``
    times :func:`initial_acceleration_scale`.  ``dt`` requests uniform
    output samples; otherwise the solver's own steps are returned.
    """
    if tol <= 0 or eta <= 0:
        raise ValueError("tol and eta must be positive")
    solver = _check_solver(method)
    threshold = RUNAWAY_FACTOR * initial_acceleration_scale(field, s0)

    def rhs(t, y):
        x, v, a = y[:3], y[3:6], y[6:]
        return np.concatenate([v, a, (a - field(x, v)) / eta])

    def runaway(t, y):
        return np.linalg.norm(y[6:]) - threshold
    runaway.terminal = True
    runaway.direction = 1

    y0 = np.concatenate([s0.x, s0.v, s0.a])
    t_eval = _sample_times(t_end, dt)
    if t_eval is not None:
        t_eval = t_eval + s0.t
    with np.errstate(over="ignore", invalid="ignore"):
        sol = solve_ivp(rhs, (s0.t, s0.t + t_end), y0, method=solver, rtol=tol,
                        atol=tol * 1e-3, events=runaway, t_eval=t_eval)
    reason, bad_time = COMPLETED, None
    if sol.status == 1:
        reason = RUNAWAY
    y = sol.y
    finite = np.all(np.isfinite(y), axis=0)
    if sol.status == -1 or not np.all(finite):
        reason = BLOWN_UP
        bad = np.flatnonzero(~finite)
        bad_time = float(sol.t[bad[0]]) if bad.size else float(sol.t[-1])
        keep = finite if bad.size else slice(None)
        sol_t, y = sol.t[keep], y[:, keep]
    else:
        sol_t = sol.t
    return Trajectory(t=sol_t, x=y[:3].T, v=y[3:6].T, a=y[6:].T, solver=solver,
                      rtol=tol, atol=tol * 1e-3, reason=reason, blown_up_at=bad_time,
                      meta={"eta": eta, "runaway_threshold": threshold,
                            "event_time": float(sol.t_events[0][0]) if sol.status == 1 else None})


def integrate_reduced(field: ForceField, self_force, x0, v0, t_end: float,
                      tol: float = 1e-12, method: str = "rk45",
                      dt: Optional[float] = None) -> Trajectory:
    """Integrate ``x' = v, v' = f(x, v) + s(x, v)``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    solver = _check_solver(method)
    x0, v0 = vec3(x0), vec3(v0)

    def rhs(t, y):
        x, v = y[:3], y[3:]
        return np.concatenate([v, field(x, v) + self_force(x, v)])

    sol = solve_ivp(rhs, (0.0, t_end), np.concatenate([x0, v0]), method=solver,
                    rtol=tol, atol=tol * 1e-3, t_eval=_sample_times(t_end, dt))
    if sol.status == -1:
        raise RuntimeError(f"integration failed: {sol.message}")
    return Trajectory(t=sol.t, x=sol.y[:3].T, v=sol.y[3:].T, solver=solver,
                      rtol=tol, atol=tol * 1e-3)


def critical_acceleration(field: ForceField, self_force, x0, v0) -> np.ndarray:
    """Initial acceleration on the critical manifold, ``f + s`` at the start point."""
    return field(x0, v0) + self_force(x0, v0)


def jerk(v: np.ndarray, h: float) -> np.ndarray:
    """Second derivative of sampled ``v`` by the fourth-order five-point stencil.

    Returns values for the interior samples ``2 .. N-3``.
    """
    return (-v[:-4] + 16 * v[1:-3] - 30 * v[2:-2] + 16 * v[3:-1] - v[4:]) / (12 * h * h)


def third_derivative_residual(traj: Trajectory, self_force, eta: float) -> float:
    """``max |eta x''' - s(x, v)|`` over interior samples of a uniform trajectory."""
    if len(traj) < 5:
        raise ValueError("need at least 5 samples")
    h = traj.spacing
    if h is None:
        raise ValueError("trajectory samples must be uniformly spaced")
    j = jerk(traj.v, h)
    s = np.array([self_force(x, v) for x, v in zip(traj.x[2:-2], traj.v[2:-2])])
    return float(np.max(np.linalg.norm(eta * j - s, axis=1)))


def growth_rate(t: np.ndarray, deviation: np.ndarray, decades: float = 1.0) -> float:
    """Exponential rate fitted on log scale over the final ``decades`` of growth."""
    logd = np.log(np.asarray(deviation, dtype=float))
    below = np.flatnonzero(~(logd >= logd[-1] - decades * math.log(10.0)))
    start = below[-1] + 1 if below.size else 0
    if len(t) - start < 2:
        raise ValueError("not enough samples in the fit window")
    return float(np.polyfit(t[start:], logd[start:], 1)[0])


__all__ = [
    "RUNAWAY_FACTOR", "TRACKING_ERROR", "tracking_window", "SOLVERS", "ForceField",
    "constant_field", "elastic_field", "landau_first_approximation", "LDState", "Trajectory",
    "initial_acceleration_scale", "integrate_lorentz_dirac", "integrate_reduced",
    "critical_acceleration", "jerk", "third_derivative_residual", "growth_rate",
    "COMPLETED", "RUNAWAY", "BLOWN_UP",
]
