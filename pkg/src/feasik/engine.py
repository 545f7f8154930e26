"""The main iteration: overrelaxed, weighted cutter steps projected onto Q,
with the correction counter indexing the schedules.

One step computes, for the active indices I_k(x),

    x_{k+1} = P_Q( x_k + alpha_j * sum_i lambda_i * beta_i * (T_i(x_k) - x_k) )

where beta_i = (r_j/phi_i(x_k) + ||T_i(x_k)-x_k||) / ||T_i(x_k)-x_k|| on
moved indices and 0 otherwise, and j is the correction count in bracketed
mode or k itself in raw mode.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError
from .model import Problem, Vector, as_vector, feasible
from .operators import evaluate_cutter
from .schedules import CorrectionCounter, PhiCustom, beta, counter_update


def compensated_sum(vectors, dim: int) -> Vector:
    """Neumaier-compensated vector sum; keeps certificate slacks meaningful
    when many small terms combine."""
    s = np.zeros(dim)
    c = np.zeros(dim)
    for v in vectors:
        t = s + v
        swap = np.abs(s) >= np.abs(v)
        big = np.where(swap, s, v)
        small = np.where(swap, v, s)
        c += (big - t) + small
        s = t
    return s + c


@dataclass
class RunConfig:
    """Everything one solver run needs.  x0 must lie in Q."""

    problem: Problem
    control: object
    relaxation: object
    overrelaxation: object
    phi: object
    weights: object
    x0: Vector
    counter_mode: str = "bracketed"
    max_iter: int = 1_000_000
    feas_window: Optional[tuple] = None
    feas_tol: float = 0.0
    use_subgradient_form: bool = False

    def __post_init__(self):
        self.x0 = as_vector(self.x0, dim=self.problem.dim)
        if self.counter_mode not in ("bracketed", "raw"):
            raise ConfigError(f"unknown counter mode {self.counter_mode!r}")
        if not self.problem.outer.member(self.x0):
            raise ConfigError("x0 is not in the outer set Q")
        if self.feas_window is None:
            if not self.problem.is_finite:
                raise ConfigError("infinite pools need an explicit feas_window")
            self.feas_window = tuple(self.problem.indices())
        else:
            self.feas_window = tuple(int(i) for i in self.feas_window)
        if self.max_iter < 0:
            raise ConfigError("max_iter must be nonnegative")
        if not getattr(self.overrelaxation, "divergent_sum", False):
            warnings.warn(
                "overrelaxation schedule is not declared divergent; "
                "finite convergence is not guaranteed", stacklevel=2)


@dataclass
class TraceRecord:
    """Snapshot of iteration k.  ``per_index`` holds one
    (index, residual, displacement, beta, rho) tuple per active index, with
    rho = r/phi.  The terminal record of a run has an empty active set."""

    k: int
    bracket_k: int
    x: Vector
    active: tuple
    violated: tuple
    per_index: tuple
    alpha_used: Optional[float]
    r_used: Optional[float]
    step_norm: float
    corrected: bool
    feasible_flag: bool


@dataclass
class RunResult:
    status: str  # "feasible" | "max_iter"
    k_feasible: Optional[int]
    final: Vector
    trace: list
    corrections: int
    counter: CorrectionCounter
    norm_flag: bool = False

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"


def _apply_update(problem, x, entries, weights, alpha, dim):
    """Combine weighted overshoot terms and project onto Q.

    ``entries`` is a list of (index, CutterEval, beta) triples.  Returns
    (x_next, step_vec)."""
    terms = []
    for i, ce, b in entries:
        w = weights[i]
        if b == 0.0 or w == 0.0:
            continue
        terms.append((w * b) * (ce.image - x))
    if not terms:
        return np.array(x, dtype=np.float64), np.zeros(dim)
    step_vec = alpha * compensated_sum(terms, dim)
    return problem.outer.project(x + step_vec), step_vec


def step(cfg: RunConfig, x: Vector, k: int, counter: CorrectionCounter,
         feasible_flag: Optional[bool] = None):
    """One iteration of the main method.

    Returns (x_next, corrected, record).  ``corrected`` is true when some
    active constraint was violated and the combined step vector is nonzero;
    that is the event the bracketed counter counts.
    """
    problem = cfg.problem
    j = counter.count if cfg.counter_mode == "bracketed" else k
    active = cfg.control.indices(k, x, problem)
    alpha = cfg.relaxation.alpha(j)
    r = cfg.overrelaxation.r(j)

    entries = []
    violated = []
    for i in active:
        ce = evaluate_cutter(problem.constraint(i), x)
        if ce.displacement_norm > 0.0:
            violated.append(i)
            phi_val = cfg.phi.value(problem.constraint(i), x)
            b = beta(r, phi_val, ce.displacement_norm)
            rho = r / phi_val
        else:
            b = 0.0
            rho = 0.0
        entries.append((i, ce, b, rho))

    violated = tuple(violated)
    weights = cfg.weights.weights(active, violated)
    x_next, step_vec = _apply_update(
        problem, x, [(i, ce, b) for i, ce, b, _ in entries], weights, alpha,
        problem.dim)
    corrected = bool(violated) and bool(np.any(step_vec != 0.0))

    if feasible_flag is None:
        feasible_flag = feasible(problem, x, cfg.feas_window, cfg.feas_tol)
    record = TraceRecord(
        k=k, bracket_k=counter.count, x=np.array(x), active=active,
        violated=violated,
        per_index=tuple((i, ce.residual, ce.displacement_norm, b, rho)
                        for i, ce, b, rho in entries),
        alpha_used=alpha, r_used=r,
        step_norm=float(np.linalg.norm(x_next - x)),
        corrected=corrected, feasible_flag=bool(feasible_flag))
    return x_next, corrected, record


def step_subgradient(cfg: RunConfig, x: Vector, k: int, counter: CorrectionCounter,
                     feasible_flag: Optional[bool] = None):
    """The subgradient specialization: for sublevel constraints with
    phi = ||g||, the update collapses to

        x_{k+1} = P_Q( x_k - alpha_j * sum_{i violated} lambda_i *
                       (r_j + f_i(x_k)) / ||g_i(x_k)||^2 * g_i(x_k) ).

    Same contract as ``step``; agrees with it to rounding on shared inputs.
    """
    from .model import Sublevel

    problem = cfg.problem
    j = counter.count if cfg.counter_mode == "bracketed" else k
    active = cfg.control.indices(k, x, problem)
    alpha = cfg.relaxation.alpha(j)
    r = cfg.overrelaxation.r(j)

    entries = []
    violated = []
    terms = {}
    for i in active:
        body = problem.constraint(i).body
        ce = evaluate_cutter(problem.constraint(i), x)
        if ce.displacement_norm > 0.0:
            if not isinstance(body, Sublevel):
                raise ConfigError(
                    "subgradient form needs sublevel bodies on violated indices")
            violated.append(i)
            fval = body.f.value(x)
            g = body.f.subgradient(x)
            gg = float(g @ g)
            terms[i] = (-(r + fval) / gg) * g
            rho = r / float(np.sqrt(gg))
            b = beta(r, float(np.sqrt(gg)), ce.displacement_norm)
        else:
            b = 0.0
            rho = 0.0
        entries.append((i, ce, b, rho))

    violated = tuple(violated)
    weights = cfg.weights.weights(active, violated)
    scaled = [weights[i] * terms[i] for i in violated if weights[i] != 0.0]
    if scaled:
        step_vec = alpha * compensated_sum(scaled, problem.dim)
        x_next = problem.outer.project(x + step_vec)
    else:
        step_vec = np.zeros(problem.dim)
        x_next = np.array(x, dtype=np.float64)
    corrected = bool(violated) and bool(np.any(step_vec != 0.0))

    if feasible_flag is None:
        feasible_flag = feasible(problem, x, cfg.feas_window, cfg.feas_tol)
    record = TraceRecord(
        k=k, bracket_k=counter.count, x=np.array(x), active=active,
        violated=violated,
        per_index=tuple((i, ce.residual, ce.displacement_norm, b, rho)
                        for i, ce, b, rho in entries),
        alpha_used=alpha, r_used=r,
        step_norm=float(np.linalg.norm(x_next - x)),
        corrected=corrected, feasible_flag=bool(feasible_flag))
    return x_next, corrected, record


def solve(cfg: RunConfig) -> RunResult:
    """Iterate until the window feasibility test passes or max_iter steps ran.

    The run never claims divergence; exceeding the budget reports
    ``max_iter``.  The trace carries one record per executed step plus a
    terminal record for the final iterate.
    """
    problem = cfg.problem
    stepper = step_subgradient if cfg.use_subgradient_form else step
    x = np.array(cfg.x0, dtype=np.float64)
    counter = CorrectionCounter(cfg.counter_mode)
    trace = []
    corrections = 0
    norm_flag = False
    norm_cap = 1e6 * max(1.0, float(np.linalg.norm(cfg.x0)))
    watch_norm = isinstance(cfg.phi, PhiCustom)

    k = 0
    while True:
        feas = feasible(problem, x, cfg.feas_window, cfg.feas_tol)
        if feas or k >= cfg.max_iter:
            trace.append(TraceRecord(
                k=k, bracket_k=counter.count, x=np.array(x), active=(),
                violated=(), per_index=(), alpha_used=None, r_used=None,
                step_norm=0.0, corrected=False, feasible_flag=feas))
            status = "feasible" if feas else "max_iter"
            return RunResult(status, k if feas else None, x, trace,
                             corrections, counter, norm_flag)
        x, corrected, record = stepper(cfg, x, k, counter, feasible_flag=feas)
        trace.append(record)
        corrections += corrected
        counter = counter_update(counter, corrected)
        if watch_norm and not norm_flag and float(np.linalg.norm(x)) > norm_cap:
            norm_flag = True
        k += 1


# ---------------------------------------------------------------------------
# Trace CSV
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def trace_header(dim: int) -> list:
    return (["k", "bracket_k", "alpha", "r", "active", "violated",
             "step_norm", "feasible"] + [f"x_{i}" for i in range(dim)])


def write_trace_csv(trace, dim: int, fh) -> None:
    """Write records with shortest round-trip float rendering; active and
    violated sets are semicolon-separated index lists."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(trace_header(dim))
    for rec in trace:
        w.writerow([rec.k, rec.bracket_k, _fmt(rec.alpha_used), _fmt(rec.r_used),
                    ";".join(str(i) for i in rec.active),
                    ";".join(str(i) for i in rec.violated),
                    repr(float(rec.step_norm)),
                    "true" if rec.feasible_flag else "false"]
                   + [repr(float(v)) for v in rec.x])


def trace_csv_text(trace, dim: int) -> str:
    buf = io.StringIO()
    write_trace_csv(trace, dim, buf)
    return buf.getvalue()


def read_trace_csv(fh):
    """Parse a trace CSV back into plain rows of python values."""
    rows = []
    reader = csv.reader(fh)
    header = next(reader)
    n = len([h for h in header if h.startswith("x_")])
    for raw in reader:
        rows.append({
            "k": int(raw[0]), "bracket_k": int(raw[1]),
            "alpha": float(raw[2]) if raw[2] else None,
            "r": float(raw[3]) if raw[3] else None,
            "active": tuple(int(i) for i in raw[4].split(";") if i),
            "violated": tuple(int(i) for i in raw[5].split(";") if i),
            "step_norm": float(raw[6]),
            "feasible": raw[7] == "true",
            "x": np.array([float(v) for v in raw[8:8 + n]]),
        })
    return rows
