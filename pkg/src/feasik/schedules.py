"""Relaxation and overrelaxation schedules, phi functionals, weight rules,
the overshoot factor beta, and the correction counter."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError, InconsistentConstraintError
from .model import Constraint, Sublevel, Vector


def beta(r: float, phi_val: float, displacement: float) -> float:
    """Overshoot factor (r/phi + d)/d for displacement d > 0, else 0.

    The zero-displacement branch absorbs the singularity; for d > 0 the
    value is always >= 1, so the step never undershoots the cutter image.
    """
    if displacement == 0.0:
        return 0.0
    return (r / phi_val + displacement) / displacement


# ---------------------------------------------------------------------------
# Relaxation alpha_k in (0, 2]
# ---------------------------------------------------------------------------

def _check_alpha(a: float) -> float:
    a = float(a)
    if not (0.0 < a <= 2.0):
        raise ConfigError("relaxation outside (0,2]")
    return a


class ConstantRelaxation:
    def __init__(self, alpha: float):
        self.value = _check_alpha(alpha)

    def alpha(self, j: int) -> float:
        return self.value


class RelaxationList:
    def __init__(self, values: Sequence[float]):
        self.values = [_check_alpha(a) for a in values]
        if not self.values:
            raise ConfigError("relaxation list is empty")

    def alpha(self, j: int) -> float:
        if j >= len(self.values):
            raise ConfigError(f"relaxation list exhausted at index {j}")
        return self.values[j]


# ---------------------------------------------------------------------------
# Overrelaxation r_k > 0
# ---------------------------------------------------------------------------

class Overrelaxation:
    """Base: subclasses provide r(j) and declare whether sum(alpha_k r_k)
    is known to diverge (not runtime-checkable)."""

    divergent_sum = False

    def r(self, j: int) -> float:
        raise NotImplementedError


class ConstantOverrelaxation(Overrelaxation):
    divergent_sum = True

    def __init__(self, value: float):
        if value <= 0.0:
            raise ConfigError("overrelaxation must be positive")
        self.value = float(value)

    def r(self, j):
        return self.value


class Harmonic(Overrelaxation):
    """r_j = 1/(j+1)."""

    divergent_sum = True

    def r(self, j):
        return 1.0 / (j + 1)


class Geometric(Overrelaxation):
    """r_j = r0 * ratio**j with ratio in (0, 1); the sum converges."""

    divergent_sum = False

    def __init__(self, r0: float, ratio: float):
        if r0 <= 0.0 or not (0.0 < ratio < 1.0):
            raise ConfigError("geometric schedule needs r0 > 0 and ratio in (0,1)")
        self.r0 = float(r0)
        self.ratio = float(ratio)

    def r(self, j):
        return self.r0 * self.ratio ** j


class OverrelaxationList(Overrelaxation):
    def __init__(self, values: Sequence[float], divergent_sum: bool = False):
        vals = [float(v) for v in values]
        if not vals or any(v <= 0.0 for v in vals):
            raise ConfigError("overrelaxation values must be positive")
        self.values = vals
        self.divergent_sum = divergent_sum

    def r(self, j):
        if j >= len(self.values):
            raise ConfigError(f"overrelaxation list exhausted at index {j}")
        return self.values[j]


class FromFunction(Overrelaxation):
    """r_j = fn(j) for a positive formula.

    Values are checked to be finite and nonnegative only: a mathematically
    positive formula such as 2**-j underflows to 0.0 for large j, which is
    tolerated and acts as a plain unrelaxed step.
    """

    def __init__(self, fn: Callable[[int], float], divergent_sum: bool = False):
        self.fn = fn
        self.divergent_sum = divergent_sum

    def r(self, j):
        v = float(self.fn(j))
        if not (v >= 0.0) or math.isinf(v):
            raise ConfigError(f"overrelaxation value {v} at index {j}")
        return v


class MergedDecreasing(Overrelaxation):
    """All elements of two nonincreasing positive sequences, merged in
    decreasing order; on ties the a-element precedes the b-element.

    ``source(j)`` reports which sequence supplied position j, so callers can
    derive controls from the merge layout.
    """

    def __init__(self, a_fn: Callable[[int], float], b_fn: Callable[[int], float],
                 divergent_sum: bool = True):
        self.a_fn = a_fn
        self.b_fn = b_fn
        self.divergent_sum = divergent_sum
        self._values: list[float] = []
        self._sources: list[tuple] = []
        self._ai = 0
        self._bi = 0

    def _extend(self, upto: int) -> None:
        while len(self._values) <= upto:
            a = float(self.a_fn(self._ai))
            b = float(self.b_fn(self._bi))
            if a >= b:
                v, src = a, ("a", self._ai)
                self._ai += 1
            else:
                v, src = b, ("b", self._bi)
                self._bi += 1
            if v <= 0.0:
                raise ConfigError("merged schedule produced a nonpositive value")
            if self._values and v > self._values[-1]:
                raise ConfigError("merged schedule inputs are not nonincreasing")
            self._values.append(v)
            self._sources.append(src)

    def r(self, j):
        self._extend(j)
        return self._values[j]

    def source(self, j) -> tuple:
        self._extend(j)
        return self._sources[j]

    def position_of(self, which: str, k: int, limit: int = 10 ** 7) -> int:
        """Merge position of a_k or b_k; scans at most ``limit`` entries."""
        j = 0
        while j < limit:
            if self.source(j) == (which, k):
                return j
            j += 1
        raise ConfigError(f"{which}_{k} not found within {limit} positions")


# ---------------------------------------------------------------------------
# Phi functionals
# ---------------------------------------------------------------------------

class PhiOne:
    """phi_i(x) = 1."""

    kind = "one"

    def value(self, constraint: Constraint, x: Vector) -> float:
        return 1.0


class PhiSubgradNorm:
    """phi_i(x) = ||g_i(x)|| when f_i(x) > 0, else 1 (sublevel bodies only)."""

    kind = "subgrad_norm"

    def value(self, constraint, x):
        body = constraint.body
        if not isinstance(body, Sublevel):
            raise ConfigError("subgradient-norm phi needs sublevel constraints")
        if body.f.value(x) <= 0.0:
            return 1.0
        n = float(np.linalg.norm(body.f.subgradient(x)))
        if n == 0.0:
            raise InconsistentConstraintError(
                "inconsistent constraint: positive value with zero subgradient")
        return n


class PhiCustom:
    """User-supplied phi with declared bounds delta <= phi <= Delta on
    bounded sets (declared, not verified)."""

    kind = "custom"

    def __init__(self, fn: Callable[[Constraint, Vector], float],
                 delta: float, big_delta: float):
        if not (0.0 < delta <= big_delta < math.inf):
            raise ConfigError("phi bounds need 0 < delta <= Delta < inf")
        self.fn = fn
        self.delta = delta
        self.big_delta = big_delta

    def value(self, constraint, x):
        v = float(self.fn(constraint, x))
        if not (v > 0.0) or math.isinf(v):
            raise ConfigError(f"phi value {v} outside (0, inf)")
        return v


# ---------------------------------------------------------------------------
# Weight rules
# ---------------------------------------------------------------------------

class WeightRule:
    """Maps (active, violated-active) index tuples to convex weights over the
    active set.  ``floor(max_card)`` is the guaranteed lower bound for
    weights on violated active indices."""

    def weights(self, active: tuple, violated: tuple) -> dict:
        raise NotImplementedError

    def floor(self, max_card: int) -> float:
        raise NotImplementedError


class UniformOverActive(WeightRule):
    kind = "uniform_active"

    def weights(self, active, violated):
        w = 1.0 / len(active)
        return {i: w for i in active}

    def floor(self, max_card):
        return 1.0 / max_card


class UniformOverViolated(WeightRule):
    """All weight on the violated active indices (uniform over the active set
    when none are violated)."""

    kind = "uniform_violated"

    def weights(self, active, violated):
        if violated:
            w = 1.0 / len(violated)
            return {i: (w if i in violated else 0.0) for i in active}
        w = 1.0 / len(active)
        return {i: w for i in active}

    def floor(self, max_card):
        return 1.0 / max_card


class ExplicitTable(WeightRule):
    """Per-index positive weights, normalized over each active set; the
    declared floor is validated against emitted weights."""

    kind = "table"

    def __init__(self, table: dict, floor_value: float):
        if not (0.0 < floor_value <= 1.0):
            raise ConfigError("weight floor must be in (0,1]")
        self.table = {int(i): float(w) for i, w in table.items()}
        if any(w <= 0.0 for w in self.table.values()):
            raise ConfigError("table weights must be positive")
        self._floor = floor_value

    def weights(self, active, violated):
        try:
            raw = [self.table[i] for i in active]
        except KeyError as e:
            raise ConfigError(f"no table weight for index {e.args[0]}") from None
        total = sum(raw)
        out = {i: w / total for i, w in zip(active, raw)}
        for i in violated:
            if out[i] < self._floor - 1e-12:
                raise ConfigError(
                    f"weight {out[i]} for violated index {i} below declared floor")
        return out

    def floor(self, max_card):
        return self._floor


# ---------------------------------------------------------------------------
# Correction counter [k]
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorrectionCounter:
    """In "bracketed" mode, counts the steps that actually moved the iterate
    ([k]); in "raw" mode it simply tracks k."""

    mode: str = "bracketed"
    count: int = 0

    def __post_init__(self):
        if self.mode not in ("bracketed", "raw"):
            raise ConfigError(f"unknown counter mode {self.mode!r}")


def counter_update(c: CorrectionCounter, corrected: bool) -> CorrectionCounter:
    """Advance after one step: bracketed increments only on corrections,
    raw increments always."""
    if c.mode == "raw" or corrected:
        return CorrectionCounter(c.mode, c.count + 1)
    return c
