"""Command-line front end.

Subcommands ``coeffs``, ``iterate``, ``trajectory``, ``residual`` and
``sweep`` each build a table plus a summary and write it as CSV or JSON.
Settings come from flags, then from a flat ``key = value`` config file
(``--config`` or the ``BACKREACTION_CONFIG`` environment variable), then
from built-in defaults.

Exit status: 0 success, 1 residual check failed, 2 usage error,
3 iteration did not converge (oscillating), 4 diverged or blew up,
5 iteration hit the step limit.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from importlib import resources
from typing import Optional

import numpy as np

from . import constfield, dynamics, elastic
from .core import ElasticParams, FieldParams
from .iteration import CONVERGED, DIVERGED, MAX_STEPS, OSCILLATING

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3
EXIT_BLOWN_UP = 4
EXIT_MAX_STEPS = 5

CONFIG_ENV = "BACKREACTION_CONFIG"
SYSTEMS = ("const-field", "elastic")
METHODS = ("closed-form", "iterate-term", "iterate-solution", "landau")
FORMATS = ("csv", "json")
SWEEP_PARAMS = ("eta", "omega", "b")

_STATUS_EXIT = {CONVERGED: EXIT_OK, OSCILLATING: EXIT_NOT_CONVERGED,
                DIVERGED: EXIT_BLOWN_UP, MAX_STEPS: EXIT_MAX_STEPS}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    system: str = "const-field"
    eta: float = 1.0
    omega: float = 0.0
    e: tuple = (0.0, 0.0, 0.0)
    b: tuple = (0.0, 0.0, 0.0)
    method: Optional[str] = None
    steps: int = 500
    tol: Optional[float] = None
    t_end: float = 10.0
    x0: tuple = (0.0, 0.0, 0.0)
    v0: tuple = (0.0, 0.0, 0.0)
    a0: Optional[tuple] = None
    samples: int = 201
    dt: Optional[float] = None
    solver: Optional[str] = None
    lorentz_dirac: bool = False
    along_trajectory: bool = False
    seed: int = 0
    param: Optional[str] = None
    values: Optional[tuple] = None
    workers: int = 1
    format: str = "csv"
    out: Optional[str] = None
    no_timestamp: bool = False

    def validate(self) -> "RunConfig":
        if self.system not in SYSTEMS:
            raise UsageError(f"--system must be one of {', '.join(SYSTEMS)}")
        if self.method is not None and self.method not in METHODS:
            raise UsageError(f"--method must be one of {', '.join(METHODS)}")
        if self.format not in FORMATS:
            raise UsageError("--format must be csv or json")
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise UsageError("--eta must be positive")
        if not (math.isfinite(self.omega) and self.omega >= 0):
            raise UsageError("--omega must be non-negative")
        for name in ("e", "b", "x0", "v0") + (("a0",) if self.a0 is not None else ()):
            vec = getattr(self, name)
            if len(vec) != 3 or not all(math.isfinite(c) for c in vec):
                raise UsageError(f"--{name.replace('_', '-')} needs three finite numbers")
        if self.steps < 1:
            raise UsageError("--steps must be at least 1")
        if self.tol is not None and not self.tol > 0:
            raise UsageError("--tol must be positive")
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise UsageError("--t-end must be positive")
        if self.samples < 5:
            raise UsageError("--samples must be at least 5")
        if self.dt is not None and not self.dt > 0:
            raise UsageError("--dt must be positive")
        if self.solver is not None and self.solver.lower() not in dynamics.SOLVERS:
            raise UsageError(f"--solver must be one of {', '.join(sorted(dynamics.SOLVERS))}")
        if self.workers < 1:
            raise UsageError("--workers must be at least 1")
        return self

    def echo(self) -> dict:
        """Config as plain JSON-compatible values, minus output plumbing."""
        skip = {"out", "format", "no_timestamp", "workers"}
        out = {}
        for key, value in asdict(self).items():
            if key in skip or value is None:
                continue
            out[key] = list(value) if isinstance(value, tuple) else value
        return out

    def field_params(self) -> FieldParams:
        return FieldParams(e_vec=self.e, b_vec=self.b, eta=self.eta)

    def elastic_params(self) -> ElasticParams:
        return ElasticParams(omega=self.omega, eta=self.eta)


_VECTOR_KEYS = {"e", "b", "x0", "v0", "a0"}
_BOOL_KEYS = {"lorentz_dirac", "along_trajectory", "no_timestamp"}
_INT_KEYS = {"steps", "samples", "seed", "workers"}
_FLOAT_KEYS = {"eta", "omega", "tol", "t_end", "dt"}


def _parse_value(key: str, text: str):
    text = text.strip()
    try:
        if key in _VECTOR_KEYS:
            return tuple(float(tok) for tok in text.replace(",", " ").split())
        if key == "values":
            return tuple(float(tok) for tok in text.replace(",", " ").split())
        if key in _INT_KEYS:
            return int(text)
        if key in _FLOAT_KEYS:
            return float(text)
    except ValueError:
        raise UsageError(f"bad value for {key}: {text!r}") from None
    if key in _BOOL_KEYS:
        lowered = text.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"bad boolean for {key}: {text!r}")
    return text


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, keys use ``-`` or ``_``."""
    known = {f.name for f in fields(RunConfig)}
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _parse_value(key, value)
    return out


def build_config(explicit: dict, config_path: Optional[str] = None) -> RunConfig:
    """Merge defaults < config file < explicit flags."""
    path = config_path or os.environ.get(CONFIG_ENV)
    merged = read_config_file(path) if path else {}
    merged.update(explicit)
    try:
        return RunConfig(**merged).validate()
    except TypeError as exc:
        raise UsageError(str(exc)) from None


# --- reports --------------------------------------------------------------

@dataclass
class Report:
    command: str
    config: RunConfig
    columns: list
    rows: list
    status: str = "ok"
    exit_code: int = EXIT_OK
    summary: dict = None

    def to_json(self, timestamp: Optional[str]) -> dict:
        obj = {"command": self.command}
        if timestamp is not None:
            obj["generated"] = timestamp
        obj["config"] = self.config.echo()
        obj["status"] = self.status
        obj["exit_code"] = self.exit_code
        obj.update(self.summary or {})
        obj["columns"] = list(self.columns)
        obj["rows"] = [list(r) for r in self.rows]
        return _jsonable(obj)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.16e" % value
    return str(value)


def _flatten(prefix: str, value, out: list):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(value, (list, tuple)):
        out.append(f"{prefix}={' '.join(_cell(v) for v in value)}")
    else:
        out.append(f"{prefix}={_cell(value)}")


def render_csv(report: Report, timestamp: Optional[str]) -> str:
    lines = [f"# backreaction {report.command}"]
    if timestamp is not None:
        lines.append(f"# generated={timestamp}")
    echo = []
    _flatten("", report.config.echo(), echo)
    lines.extend(f"# config {item}" for item in echo)
    lines.append(",".join(report.columns))
    lines.extend(",".join(_cell(v) for v in row) for row in report.rows)
    summary = []
    _flatten("", report.summary or {}, summary)
    lines.extend(f"# {item}" for item in summary)
    lines.append(f"# status={report.status}")
    return "\n".join(lines) + "\n"


def render(report: Report, fmt: str, timestamp: Optional[str]) -> str:
    if fmt == "json":
        return json.dumps(report.to_json(timestamp), indent=2) + "\n"
    return render_csv(report, timestamp)


def load_schema() -> dict:
    """The JSON schema every ``--format json`` report satisfies."""
    text = resources.files("backreaction").joinpath("report.schema.json").read_text("utf-8")
    return json.loads(text)


# --- shared computations --------------------------------------------------

def _relative_delta(got, want) -> float:
    got, want = np.asarray(got, dtype=float), np.asarray(want, dtype=float)
    scale = float(np.max(np.abs(want)))
    diff = float(np.max(np.abs(got - want)))
    return diff / scale if scale > 0 else diff


def _exact_pair(cfg: RunConfig) -> tuple:
    if cfg.system == "const-field":
        c = constfield.closed_form_coefficients(cfg.field_params())
    else:
        c = elastic.elastic_coefficients(cfg.elastic_params())
    return c.beta, c.alpha


def _solution_rates(cfg: RunConfig, n: int) -> list:
    """``(beta_k, alpha_k)`` read off from solution iterates ``k = 1..n``."""
    if cfg.system == "const-field":
        pairs = constfield.iterate_solution_envelopes(cfg.field_params(), n, exact=False)
        b = cfg.field_params().b
        out = []
        for pair in pairs[1:]:
            alpha, q_rate = pair.rates()
            out.append((q_rate if b > 0 else 0.0, alpha))
        return out
    params = cfg.elastic_params()
    if params.omega == 0:
        return [(0.0, 0.0)] * n
    x0, v0 = cfg.x0[0], cfg.v0[0]
    if x0 == 0 and v0 == 0:
        x0 = 1.0
    envs = elastic.iterate_solution_elastic(params, x0, v0, n, exact=False)
    out = []
    w = params.omega
    for env in envs[1:]:
        with np.errstate(all="ignore"):
            rate = env.rate()
        alpha = -2 * rate.real
        nu = w + rate.imag
        out.append((1 - (nu * nu + alpha * alpha / 4) / (w * w), alpha))
    return out


def _classify_sequence(seq: list, tol: float) -> tuple:
    """Status and length of a coefficient sequence, cut at convergence."""
    for k, pair in enumerate(seq):
        if not all(math.isfinite(v) for v in pair) or max(abs(v) for v in pair) > 1e12:
            return DIVERGED, k + 1
        if k > 0 and _relative_delta(pair, seq[k - 1]) <= tol:
            return CONVERGED, k + 1
    return MAX_STEPS, len(seq)


def _method_coefficients(cfg: RunConfig, method: str) -> dict:
    """Coefficients produced by one method, with its convergence verdict."""
    tol = cfg.tol or 1e-10
    if method == "closed-form":
        beta, alpha = _exact_pair(cfg)
        return {"beta": beta, "alpha": alpha, "status": CONVERGED, "constant": None}
    if method == "landau":
        if cfg.system == "const-field":
            entry = constfield.first_radiation_term(cfg.field_params())
        else:
            entry = elastic.first_radiation_term_elastic(cfg.elastic_params())
        return {"beta": entry.beta, "alpha": entry.alpha, "status": CONVERGED,
                "constant": entry.constant}
    if method == "iterate-term":
        trace = _term_trace(cfg, tol)
        last = trace.last
        return {"beta": last.beta, "alpha": last.alpha, "status": trace.status,
                "constant": last.constant, "trace": trace}
    seq = _solution_rates(cfg, cfg.steps)
    status, length = _classify_sequence(seq, tol)
    beta, alpha = seq[length - 1]
    return {"beta": beta, "alpha": alpha, "status": status, "constant": None}


def _term_trace(cfg: RunConfig, tol: float):
    if cfg.system == "const-field":
        return constfield.iterate_radiation_term(cfg.field_params(), cfg.steps, tol)
    return elastic.iterate_radiation_term_elastic(cfg.elastic_params(), cfg.steps, tol)


def _status_text(status: str, period=None) -> str:
    return f"oscillating period={period}" if status == OSCILLATING else status


# --- commands -------------------------------------------------------------

def cmd_coeffs(cfg: RunConfig) -> Report:
    method = cfg.method or "closed-form"
    cfg = replace(cfg, method=method)
    got = _method_coefficients(cfg, method)
    beta, alpha = got["beta"], got["alpha"]
    summary = {"method": method, "beta": beta, "alpha": alpha}
    rows = [["beta", beta], ["alpha", alpha]]
    if cfg.system == "const-field":
        params = cfg.field_params()
        exact = constfield.closed_form_coefficients(params)
        ea = cfg.eta * alpha
        x = params.coupling
        residuals = {
            "beta_relation": beta - 2 * ea * (1 - beta),
            "alpha_relation": ea - (x * x * (1 - beta) ** 2 - ea * ea),
        }
        if method == "closed-form":
            residuals = exact.residuals()
            summary["phi"] = exact.phi
            rows.insert(0, ["phi", exact.phi])
            summary["rejected_beta"] = exact.rejected_beta
        char_beta, char_alpha = constfield.coefficients_from_characteristic_root(params)
        summary["coupling"] = x
        summary["lambda_kernel"] = exact.lambda_kernel
        summary["characteristic_root"] = {"beta": char_beta, "alpha": char_alpha}
        summary["iteration_spectral_radius"] = constfield.radiation_term_spectral_radius(params)
        if exact.outside_iteration_regime:
            summary["regime"] = "outside iteration-convergence regime"
    else:
        params = cfg.elastic_params()
        ea = cfg.eta * alpha
        residuals = {"beta_relation": beta - ea / (1 + ea),
                     "cubic": ea * (1 + ea) ** 2 - params.coupling ** 2}
        summary["coupling"] = params.coupling
        if params.omega > 0:
            mu, nu = elastic.char_root_conditions(params)
            summary["characteristic_root"] = {"mu": mu, "nu": nu}
            roots = elastic.cardano_roots(params)
            summary["cubic_root_residual"] = max(roots.residuals())
            rows.append(["nu", elastic.elastic_coefficients(params).frequency])
        summary["iteration_spectral_radius"] = \
            elastic.radiation_term_spectral_radius_elastic(params)
        if params.coupling >= 1.0:
            summary["regime"] = "outside iteration-convergence regime"
    summary["residuals"] = residuals
    summary["delta_closed_form"] = _relative_delta((beta, alpha), _exact_pair(cfg))
    status = got["status"]
    return Report("coeffs", cfg, ["quantity", "value"], rows,
                  status=_status_text(status, getattr(got.get("trace"), "period", None)),
                  exit_code=_STATUS_EXIT[status], summary=summary)


def cmd_iterate(cfg: RunConfig) -> Report:
    method = cfg.method or "iterate-term"
    cfg = replace(cfg, method=method)
    if method not in ("iterate-term", "iterate-solution"):
        raise UsageError("iterate needs --method iterate-term or iterate-solution")
    tol = cfg.tol or 1e-10
    exact = _exact_pair(cfg)
    rows = []
    if method == "iterate-term":
        trace = _term_trace(cfg, tol)
        with_constant = cfg.system == "const-field"
        columns = ["n", "beta", "alpha", "delta"]
        exact_constant = None
        if with_constant:
            columns[3:3] = ["d1", "d2", "d3"]
            exact_constant = constfield.self_force(cfg.field_params()).constant
        for entry in trace.entries:
            delta = _relative_delta((entry.beta, entry.alpha), exact)
            row = [entry.n, entry.beta, entry.alpha]
            if with_constant:
                row.extend(entry.constant)
                if np.any(exact_constant):
                    delta = max(delta, _relative_delta(entry.constant, exact_constant))
            rows.append(row + [delta])
        status, period = trace.status, trace.period
        steps = trace.last.n
    else:
        seq = _solution_rates(cfg, cfg.steps)
        status, length = _classify_sequence(seq, tol)
        period = None
        columns = ["n", "beta", "alpha", "delta"]
        for k, (beta, alpha) in enumerate(seq[:length], 1):
            rows.append([k, beta, alpha, _relative_delta((beta, alpha), exact)])
        steps = length
    summary = {"method": method, "steps": steps,
               "closed_form": {"beta": exact[0], "alpha": exact[1]},
               "final_delta": rows[-1][-1]}
    return Report("iterate", cfg, columns, rows, status=_status_text(status, period),
                  exit_code=_STATUS_EXIT[status], summary=summary)


def _time_grid(cfg: RunConfig) -> np.ndarray:
    if cfg.dt is not None:
        n = int(round(cfg.t_end / cfg.dt))
        return np.linspace(0.0, n * cfg.dt, n + 1)
    return np.linspace(0.0, cfg.t_end, cfg.samples)


def _system_parts(cfg: RunConfig, method: str):
    """Force field, candidate self-force ``s(x, v)``, exact self-force, analytic solution."""
    if cfg.system == "const-field":
        params = cfg.field_params()
        field = dynamics.constant_field(params)
        exact = constfield.self_force(params).state_function()

        def analytic(t):
            x = np.array([constfield.closed_form_position(params, cfg.x0, cfg.v0, s) for s in t])
            v = np.array([constfield.closed_form_trajectory(params, cfg.v0, s) for s in t])
            return x, v
    else:
        params = cfg.elastic_params()
        field = dynamics.elastic_field(params.omega)
        exact = elastic.self_force(params)

        def analytic(t):
            parts = [elastic.reduced_solution(params, cfg.x0[k], cfg.v0[k], t) for k in range(3)]
            return (np.column_stack([p[0] for p in parts]), np.column_stack([p[1] for p in parts]))

    if method == "closed-form":
        candidate = exact
    elif method == "landau":
        candidate = dynamics.landau_first_approximation(field, cfg.eta)
    elif method == "iterate-term":
        got = _method_coefficients(cfg, method)
        candidate = _candidate_from(cfg, got)
    else:
        raise UsageError("trajectory and residual accept --method closed-form, landau "
                         "or iterate-term")
    return field, candidate, exact, analytic


def _candidate_from(cfg: RunConfig, got: dict):
    if cfg.system == "const-field":
        params = cfg.field_params()
        s = constfield.affine_from_coefficients(params, got["beta"], got["alpha"])
        if got.get("constant") is not None and params.b > 0:
            s = constfield.SelfForceAffine(s.linear, np.asarray(got["constant"], dtype=float))
        return s.state_function()
    return elastic.ElasticSelfForce(got["beta"], got["alpha"], cfg.omega)


def cmd_trajectory(cfg: RunConfig) -> Report:
    method = cfg.method or "closed-form"
    cfg = replace(cfg, method=method)
    field, candidate, exact, analytic = _system_parts(cfg, method)
    t = _time_grid(cfg)
    x_ref, v_ref = analytic(t)
    summary = {"method": method}
    status, code = "completed", EXIT_OK
    if cfg.lorentz_dirac:
        a0 = cfg.a0
        if a0 is None:
            a0 = dynamics.critical_acceleration(field, candidate, cfg.x0, cfg.v0)
        state = dynamics.LDState(cfg.x0, cfg.v0, a0)
        traj = dynamics.integrate_lorentz_dirac(field, state, cfg.eta, float(t[-1]),
                                                tol=cfg.tol or 1e-10,
                                                method=cfg.solver or "radau",
                                                dt=float(t[1] - t[0]))
        n = len(traj.t)
        t_out, x, v, a = traj.t, traj.x, traj.v, traj.a
        summary.update({"solver": traj.solver, "rtol": traj.rtol, "reason": traj.reason,
                        "initial_acceleration": list(np.asarray(a0, dtype=float)),
                        "runaway_threshold": traj.meta["runaway_threshold"],
                        "event_time": traj.meta["event_time"],
                        "blown_up_at": traj.blown_up_at})
        status = traj.reason
        if traj.reason != dynamics.COMPLETED:
            code = EXIT_BLOWN_UP
        v_cmp = v_ref[:n]
        columns = (["t", "x1", "x2", "x3", "v1", "v2", "v3", "a1", "a2", "a3", "diff"])
        diff = np.linalg.norm(v - v_cmp, axis=1)
        rows = [[ti, *xi, *vi, *ai, di] for ti, xi, vi, ai, di in zip(t_out, x, v, a, diff)]
    else:
        traj = dynamics.integrate_reduced(field, candidate, cfg.x0, cfg.v0, float(t[-1]),
                                          tol=cfg.tol or 1e-12,
                                          method=cfg.solver or "rk45",
                                          dt=float(t[1] - t[0]))
        n = min(len(traj.t), len(t))
        if method == "closed-form":
            # rows are the analytic solution, diff is against numerical integration
            x, v, other = x_ref[:n], v_ref[:n], traj.v[:n]
            summary["reference"] = "numerical integration of the reduced equation"
        else:
            x, v, other = traj.x[:n], traj.v[:n], v_ref[:n]
            summary["reference"] = "closed-form solution"
        summary.update({"solver": traj.solver, "rtol": traj.rtol})
        diff = np.linalg.norm(v - other, axis=1)
        columns = ["t", "x1", "x2", "x3", "v1", "v2", "v3", "diff"]
        rows = [[ti, *xi, *vi, di] for ti, xi, vi, di in zip(t[:n], x, v, diff)]
    summary["max_diff"] = float(np.max(diff)) if len(diff) else 0.0
    return Report("trajectory", cfg, columns, rows, status=status, exit_code=code,
                  summary=summary)


def cmd_residual(cfg: RunConfig) -> Report:
    method = cfg.method or "closed-form"
    cfg = replace(cfg, method=method)
    field, candidate, _, _ = _system_parts(cfg, method)
    if cfg.along_trajectory:
        dt = cfg.dt or 1e-3
        traj = dynamics.integrate_reduced(field, candidate, cfg.x0, cfg.v0, cfg.t_end,
                                          tol=1e-12, method=cfg.solver or "dop853", dt=dt)
        h = traj.spacing
        jerk = dynamics.jerk(traj.v, h)
        s = np.array([candidate(x, v) for x, v in zip(traj.x[2:-2], traj.v[2:-2])])
        res = np.linalg.norm(cfg.eta * jerk - s, axis=1)
        rows = [[float(ti), float(r)] for ti, r in zip(traj.t[2:-2], res)]
        columns = ["t", "residual"]
        bound = cfg.tol or 1e-5
        where = "trajectory"
    else:
        rng = np.random.default_rng(cfg.seed)
        count = cfg.samples
        rows = []
        if cfg.system == "const-field":
            params = cfg.field_params()
            B, eta, e = params.B, params.eta, params.e_vec
            origin = np.zeros(3)
            for v in rng.uniform(-1.0, 1.0, size=(count, 3)):
                # affine candidate: its Jacobian is recovered numerically
                M = np.column_stack([candidate(origin, v + dv) - candidate(origin, v)
                                     for dv in np.eye(3)])
                r = candidate(origin, v) - eta * (B + M) @ (e + B @ v + candidate(origin, v))
                rows.append([*v, float(np.linalg.norm(r))])
            columns = ["v1", "v2", "v3", "residual"]
        else:
            params = cfg.elastic_params()
            w2 = params.omega ** 2
            for x, v in rng.uniform(-1.0, 1.0, size=(count, 2)):
                xv, vv = np.array([x, 0, 0]), np.array([v, 0, 0])
                s = float(candidate(xv, vv)[0])
                s_x = float(candidate(xv + [1, 0, 0], vv)[0]) - s
                s_v = float(candidate(xv, vv + [1, 0, 0])[0]) - s
                r = s - params.eta * (-w2 * v + s_x * v + s_v * (-w2 * x + s))
                rows.append([x, v, abs(r)])
            columns = ["x", "v", "residual"]
        res = np.array([row[-1] for row in rows])
        bound = cfg.tol or 1e-12
        where = "grid"
    max_res = float(np.max(res))
    passed = bool(max_res <= bound)
    summary = {"method": method, "sampled": where, "max_residual": max_res,
               "mean_residual": float(np.mean(res)), "bound": bound, "passed": passed}
    return Report("residual", cfg, columns, rows, status="pass" if passed else "fail",
                  exit_code=EXIT_OK if passed else EXIT_CHECK_FAILED, summary=summary)


def _sweep_point(cfg: RunConfig) -> list:
    beta, alpha = _exact_pair(cfg)
    trace = _term_trace(cfg, cfg.tol or 1e-10)
    if cfg.system == "const-field":
        radius = constfield.radiation_term_spectral_radius(cfg.field_params())
        coupling = cfg.field_params().coupling
    else:
        radius = elastic.radiation_term_spectral_radius_elastic(cfg.elastic_params())
        coupling = cfg.elastic_params().coupling
    delta = (_relative_delta((trace.last.beta, trace.last.alpha), (beta, alpha))
             if trace.status == CONVERGED else None)
    return [coupling, beta, alpha, _status_text(trace.status, trace.period),
            trace.last.n, delta, radius]


def _swept(cfg: RunConfig, value: float) -> RunConfig:
    if cfg.param == "eta":
        return replace(cfg, eta=value).validate()
    if cfg.param == "omega":
        return replace(cfg, omega=value).validate()
    direction = np.asarray(cfg.b, dtype=float)
    norm = np.linalg.norm(direction)
    unit = direction / norm if norm > 0 else np.array([0.0, 0.0, 1.0])
    return replace(cfg, b=tuple(float(c) for c in value * unit)).validate()


def cmd_sweep(cfg: RunConfig) -> Report:
    cfg = replace(cfg, method=cfg.method or "closed-form")
    if cfg.param not in SWEEP_PARAMS:
        raise UsageError(f"sweep needs --param {'|'.join(SWEEP_PARAMS)}")
    if not cfg.values:
        raise UsageError("sweep needs --values")
    points = [_swept(cfg, v) for v in cfg.values]
    if cfg.workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_sweep_point, points))
    else:
        results = [_sweep_point(p) for p in points]
    rows = [[v, *r] for v, r in zip(cfg.values, results)]
    columns = [cfg.param, "coupling", "beta", "alpha", "iteration", "steps", "delta",
               "spectral_radius"]
    return Report("sweep", cfg, columns, rows, summary={"points": len(rows)})


COMMANDS = {"coeffs": cmd_coeffs, "iterate": cmd_iterate, "trajectory": cmd_trajectory,
            "residual": cmd_residual, "sweep": cmd_sweep}


# --- argument parsing -----------------------------------------------------

def _options() -> argparse.ArgumentParser:
    opts = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    opts.add_argument("--config", help=f"key = value config file (default: ${CONFIG_ENV})")
    opts.add_argument("--system", choices=SYSTEMS)
    opts.add_argument("--eta", type=float, help="damping time")
    opts.add_argument("--omega", type=float, help="oscillator frequency")
    opts.add_argument("--e", type=float, nargs=3, metavar=("EX", "EY", "EZ"),
                      help="electric acceleration vector")
    opts.add_argument("--b", type=float, nargs=3, metavar=("BX", "BY", "BZ"),
                      help="magnetic frequency vector")
    opts.add_argument("--method", choices=METHODS)
    opts.add_argument("--steps", type=int, help="iteration steps (default 500)")
    opts.add_argument("--tol", type=float,
                      help="convergence tolerance, integration rtol or residual bound")
    opts.add_argument("--t-end", dest="t_end", type=float)
    opts.add_argument("--x0", type=float, nargs=3)
    opts.add_argument("--v0", type=float, nargs=3)
    opts.add_argument("--a0", type=float, nargs=3,
                      help="initial acceleration for --lorentz-dirac (default: critical)")
    opts.add_argument("--samples", type=int, help="sample count (default 201)")
    opts.add_argument("--dt", type=float, help="uniform sample spacing")
    opts.add_argument("--solver", help=f"one of {', '.join(sorted(dynamics.SOLVERS))}")
    opts.add_argument("--lorentz-dirac", dest="lorentz_dirac", action="store_true",
                      help="integrate the third-order equation")
    opts.add_argument("--along-trajectory", dest="along_trajectory", action="store_true",
                      help="residual of eta x''' - s along a reduced trajectory")
    opts.add_argument("--seed", type=int)
    opts.add_argument("--param", choices=SWEEP_PARAMS, help="swept parameter")
    opts.add_argument("--values", type=float, nargs="+")
    opts.add_argument("--workers", type=int, help="worker processes for sweep")
    opts.add_argument("--format", choices=FORMATS)
    opts.add_argument("--out", help="output file (default stdout)")
    opts.add_argument("--no-timestamp", dest="no_timestamp", action="store_true")
    return opts


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="backreaction",
                                     description="Self-force of a radiating charge.")
    sub = parser.add_subparsers(dest="command", required=True)
    opts = _options()
    helps = {"coeffs": "self-force coefficients", "iterate": "iteration table",
             "trajectory": "sampled trajectory", "residual": "self-force residual check",
             "sweep": "coefficients over a parameter list"}
    for name, text in helps.items():
        sub.add_parser(name, parents=[opts], help=text)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        ns = vars(parser.parse_args(argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    command = ns.pop("command")
    config_path = ns.pop("config", None)
    for key in ("e", "b", "x0", "v0", "a0", "values"):
        if key in ns:
            ns[key] = tuple(ns[key])
    try:
        cfg = build_config(ns, config_path)
        report = COMMANDS[command](cfg)
    except UsageError as exc:
        print(f"backreaction: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    timestamp = None
    if not cfg.no_timestamp:
        timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    text = render(report, cfg.format, timestamp)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if "regime" in (report.summary or {}):
        print(f"backreaction: note: {report.summary['regime']}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
