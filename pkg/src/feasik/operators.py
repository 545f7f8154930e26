"""Cutter applications: metric projections, the subgradient projection, and
the cutter-property checker."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InconsistentConstraintError
from .model import (Body, Constraint, METRIC_BODIES, Sublevel, Vector)


@dataclass(frozen=True)
class CutterEval:
    """One cutter application T_i(x).

    ``residual`` is f_i(x) for sublevel bodies and the exact distance
    d(x, C_i) otherwise.  ``displacement_norm`` is always computed from the
    image difference.
    """

    image: Vector
    displacement_norm: float
    residual: float


def project_metric(body: Body, x: Vector) -> CutterEval:
    """Nearest-point projection onto a halfspace, ball or box."""
    if not isinstance(body, METRIC_BODIES):
        raise ConfigError(f"no metric projection for {type(body).__name__}")
    image = body.project(x)
    disp = float(np.linalg.norm(image - x))
    return CutterEval(image, disp, body.distance(x))


def project_subgradient(f, x: Vector) -> CutterEval:
    """One subgradient-projection step toward {f <= 0}.

    Returns x unchanged when f(x) <= 0.  A positive value with a zero
    subgradient means the sublevel set is empty and raises
    InconsistentConstraintError.
    """
    val = f.value(x)
    if val <= 0.0:
        return CutterEval(np.array(x, dtype=np.float64), 0.0, val)
    g = f.subgradient(x)
    gg = float(g @ g)
    if gg == 0.0:
        raise InconsistentConstraintError(
            "inconsistent constraint: positive value with zero subgradient")
    image = x - (val / gg) * g
    return CutterEval(image, float(np.linalg.norm(image - x)), val)


def evaluate_cutter(constraint: Constraint, x: Vector) -> CutterEval:
    """Apply the constraint's cutter (metric or subgradient) at x."""
    body = constraint.body
    if constraint.cutter == "subgradient":
        return project_subgradient(body.f, x)
    if isinstance(body, Sublevel):
        # metric override: project onto the sublevel set's known geometry
        image = body.project(x)
        return CutterEval(image, float(np.linalg.norm(image - x)), body.violation(x))
    return project_metric(body, x)


def cutter_map(constraint: Constraint):
    """The cutter as a plain point map x -> T_i(x)."""
    return lambda x: evaluate_cutter(constraint, x).image


def check_cutter_property(T, x: Vector, z: Vector, rtol: float = 1e-10):
    """Check <T(x)-x, z-x> >= ||T(x)-x||^2 for z in fix T.

    ``T`` is a Constraint or a point map.  Returns (lhs, rhs, ok); the caller
    guarantees z is a fixed point.
    """
    image = evaluate_cutter(T, x).image if isinstance(T, Constraint) else T(x)
    d = image - x
    lhs = float(d @ (z - x))
    rhs = float(d @ d)
    return lhs, rhs, lhs >= rhs - rtol * (1.0 + rhs)
