"""Fixed-point iteration of self-force coefficients, with cycle detection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import CONVERGENCE_RTOL

# entry n is compared with entry n - p under this relative tolerance ...
CYCLE_RTOL = 1e-9
# ... and must match for this many consecutive steps before a cycle is declared
CYCLE_CONFIRMATIONS = 3
MAX_DETECTED_PERIOD = 8
# consecutive entries of a genuine cycle differ by more than this (relative);
# a slowly converging orbit would otherwise match n - p before n - 1
CYCLE_MIN_STEP = 1e-6
# coefficient magnitude treated as divergence
DIVERGENCE_BOUND = 1e12

CONVERGED = "converged"
OSCILLATING = "oscillating"
DIVERGED = "diverged"
MAX_STEPS = "max-steps"


@dataclass(frozen=True)
class IterationEntry:
    n: int
    beta: float
    alpha: float
    constant: Optional[np.ndarray] = None


@dataclass
class IterationTrace:
    entries: list = field(default_factory=list)
    status: str = MAX_STEPS
    period: Optional[int] = None
    limit: Optional[tuple] = None

    @property
    def last(self) -> IterationEntry:
        return self.entries[-1]

    def describe(self) -> str:
        if self.status == OSCILLATING:
            return f"oscillating period={self.period}"
        if self.status == CONVERGED:
            return f"converged step={self.last.n}"
        return self.status


def _state(entry: IterationEntry) -> np.ndarray:
    parts = [entry.beta, entry.alpha]
    if entry.constant is not None:
        parts.extend(entry.constant)
    return np.array(parts, dtype=float)


def _matches(a: np.ndarray, b: np.ndarray, rtol: float) -> bool:
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    return bool(np.max(np.abs(a - b)) <= rtol * scale)


def run_fixed_point(step: Callable[[IterationEntry], IterationEntry],
                    first: IterationEntry,
                    max_steps: int,
                    tol: float = CONVERGENCE_RTOL,
                    zeroth: Optional[IterationEntry] = None) -> IterationTrace:
    """Iterate ``step`` from ``first`` and classify the orbit.

    ``zeroth`` is the radiation-free approximation (all coefficients zero);
    it lets a trivially stationary sequence be recognised at step 1.
    Convergence is tested before cycles; a cycle of period ``p`` needs
    ``CYCLE_CONFIRMATIONS`` consecutive matches of entry n against n - p.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    trace = IterationTrace(entries=[first])
    states = [_state(first)]
    if zeroth is not None and _matches(states[0], _state(zeroth), tol):
        trace.status = CONVERGED
        trace.limit = (first.beta, first.alpha)
        return trace
    streaks = {p: 0 for p in range(2, MAX_DETECTED_PERIOD + 1)}
    entry = first
    for _ in range(max_steps - 1):
        entry = step(entry)
        state = _state(entry)
        trace.entries.append(entry)
        states.append(state)
        if not np.all(np.isfinite(state)) or np.max(np.abs(state)) > DIVERGENCE_BOUND:
            trace.status = DIVERGED
            return trace
        if _matches(state, states[-2], tol):
            trace.status = CONVERGED
            trace.limit = (entry.beta, entry.alpha)
            return trace
        moving = not _matches(state, states[-2], CYCLE_MIN_STEP)
        for p in streaks:
            if moving and len(states) > p and _matches(state, states[-1 - p], CYCLE_RTOL):
                streaks[p] += 1
            else:
                streaks[p] = 0
        cyclic = [p for p, count in streaks.items() if count >= CYCLE_CONFIRMATIONS]
        if cyclic:
            trace.status = OSCILLATING
            trace.period = min(cyclic)
            return trace
    trace.status = MAX_STEPS
    return trace


def spectral_radius(jacobian: np.ndarray) -> float:
    """Largest eigenvalue modulus; below one means the fixed point attracts."""
    return float(max(abs(np.linalg.eigvals(jacobian))))
