"""Control sequences I_k: deterministic, adaptive and seeded-random index
selection, plus well-matchedness and positivity diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError, ControlError
from .model import Problem, Vector, violated_indices
from .operators import evaluate_cutter


def _index_tuple(indices) -> tuple:
    out = tuple(int(i) for i in indices)
    if not out:
        raise ControlError("control emitted an empty index set")
    if len(set(out)) != len(out):
        raise ControlError(f"control emitted duplicate indices {out}")
    return out


class Control:
    """Base class.  ``indices(k, x, problem)`` returns the index set I_k;
    every emission is a nonempty tuple with cardinality <= max_card."""

    adaptive = False

    @property
    def max_card(self) -> int:
        raise NotImplementedError

    def _select(self, k: int, x: Vector, problem: Problem) -> tuple:
        raise NotImplementedError

    def indices(self, k: int, x: Vector, problem: Problem) -> tuple:
        out = _index_tuple(self._select(k, x, problem))
        if len(out) > self.max_card:
            raise ControlError(
                f"control emitted {len(out)} indices, above max_card {self.max_card}")
        for i in out:
            problem.constraint(i)  # raises "index out of pool" on bad indices
        return out


def next_indices(control: Control, k: int, x: Vector, problem: Problem) -> tuple:
    """The index set I_k(x) for iteration k."""
    return control.indices(k, x, problem)


class Cyclic(Control):
    """Singleton control order[k mod s]."""

    kind = "cyclic"

    def __init__(self, order: Sequence[int]):
        self.order = [int(i) for i in order]
        if not self.order:
            raise ConfigError("cyclic order is empty")

    @property
    def max_card(self):
        return 1

    def _select(self, k, x, problem):
        return (self.order[k % len(self.order)],)


class Intermittent(Control):
    """Cycles through the given blocks; with span s = number of blocks, every
    window of s consecutive steps emits every block once."""

    kind = "intermittent"

    def __init__(self, blocks: Sequence[Sequence[int]]):
        self.blocks = [_index_tuple(b) for b in blocks]
        if not self.blocks:
            raise ConfigError("intermittent control needs at least one block")

    @property
    def span(self):
        return len(self.blocks)

    @property
    def max_card(self):
        return max(len(b) for b in self.blocks)

    def _select(self, k, x, problem):
        return self.blocks[k % len(self.blocks)]


class Repetitive(Control):
    """Wraps an arbitrary k -> index-set schedule.  The caller is responsible
    for actual repetitiveness (every relevant index appearing infinitely
    often); diagnostics below can only spot-check it."""

    kind = "repetitive"

    def __init__(self, schedule: Callable[[int], Sequence[int]], max_card: int = 1):
        self.schedule = schedule
        self._max_card = int(max_card)
        if self._max_card < 1:
            raise ConfigError("max_card must be >= 1")

    @property
    def max_card(self):
        return self._max_card

    def _select(self, k, x, problem):
        return self.schedule(k)


class Explicit(Control):
    """A finite, explicitly listed sequence of index sets."""

    kind = "explicit"

    def __init__(self, sets: Sequence[Sequence[int]]):
        self.sets = [_index_tuple(s) for s in sets]
        if not self.sets:
            raise ConfigError("explicit control has no sets")

    @property
    def max_card(self):
        return max(len(s) for s in self.sets)

    def _select(self, k, x, problem):
        if k >= len(self.sets):
            raise ControlError(f"explicit control exhausted at step {k}")
        return self.sets[k]


class _Maximal(Control):
    adaptive = True

    @property
    def max_card(self):
        return 1

    def _score(self, constraint, x) -> float:
        raise NotImplementedError

    def _select(self, k, x, problem):
        if not problem.is_finite:
            raise ControlError("maximal control requires finite pool")
        best_i, best = 0, -math.inf
        for i in problem.indices():
            s = self._score(problem.constraint(i), x)
            if s > best:  # ties break to the lowest index
                best_i, best = i, s
        return (best_i,)


class RemotestSet(_Maximal):
    """argmax_i d(x, C_i); needs exact distances."""

    kind = "remotest"

    def _score(self, constraint, x):
        d = constraint.distance(x)
        if d is None:
            raise ControlError(
                f"remotest control needs an exact distance for constraint {constraint.index}")
        return d


class MaxDisplacement(_Maximal):
    """argmax_i ||T_i(x) - x||."""

    kind = "max_displacement"

    def _score(self, constraint, x):
        return evaluate_cutter(constraint, x).displacement_norm


class MaxViolation(_Maximal):
    """argmax_i of the positive part of the constraint violation."""

    kind = "max_violation"

    def _score(self, constraint, x):
        return max(0.0, constraint.violation(x))


class RandomSets(Control):
    """I.i.d. draws from a finite distribution over index sets.

    The draw at iteration k uses a counter-based generator keyed by
    (seed, k), so step k's realization is reproducible independently of
    how the run is replayed.
    """

    kind = "random_sets"

    def __init__(self, atoms: Sequence[tuple], seed: int):
        if not atoms:
            raise ConfigError("random control needs at least one atom")
        self.atoms = [(_index_tuple(s), float(p)) for s, p in atoms]
        if any(p < 0.0 for _, p in self.atoms):
            raise ConfigError("atom probabilities must be nonnegative")
        total = sum(p for _, p in self.atoms)
        if abs(total - 1.0) > 1e-12:
            raise ConfigError(f"atom probabilities sum to {total}, not 1")
        self.seed = int(seed) & (2 ** 64 - 1)
        self._cum = np.cumsum([p for _, p in self.atoms])

    @property
    def max_card(self):
        return max(len(s) for s, _ in self.atoms)

    def draw_uniform(self, k: int) -> float:
        bg = np.random.Philox(key=self.seed, counter=k)
        return float(np.random.Generator(bg).random())

    def _select(self, k, x, problem):
        u = self.draw_uniform(k)
        j = int(np.searchsorted(self._cum, u, side="right"))
        j = min(j, len(self.atoms) - 1)
        return self.atoms[j][0]

    @classmethod
    def uniform_singletons(cls, m: int, seed: int) -> "RandomSets":
        return cls([((i,), 1.0 / m) for i in range(m)], seed)


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

@dataclass
class ProbeReport:
    probe: Vector
    violated: tuple
    hits: int
    first_hit: Optional[int]

    @property
    def flagged(self) -> bool:
        return self.hits == 0


@dataclass
class WellMatchedReport:
    horizon: int
    probes: list

    @property
    def ok(self) -> bool:
        return not any(p.flagged for p in self.probes)

    def summary(self) -> str:
        # A finite horizon can only refute, never verify, well-matchedness.
        if self.ok:
            return (f"no violation found within horizon {self.horizon} "
                    f"({len(self.probes)} probes)")
        bad = [i for i, p in enumerate(self.probes) if p.flagged]
        return (f"necessary condition failed for probes {bad}: the control never "
                f"met a violated constraint within {self.horizon} steps")


def empirical_well_matched(control: Control, problem: Problem,
                           probes: Sequence[Vector], horizon: int) -> WellMatchedReport:
    """Count, for each infeasible probe x, the steps k < horizon with
    I_k(x) intersecting I_+(x).  Zero hits refute well-matchedness; positive
    hits only fail to refute it."""
    if horizon < 1:
        raise ConfigError("horizon must be >= 1")
    reports = []
    for x in probes:
        viol = frozenset(violated_indices(problem, x))
        if not viol:
            raise ConfigError("well-matchedness probes must be infeasible points")
        hits, first = 0, None
        for k in range(horizon):
            if viol.intersection(control.indices(k, x, problem)):
                hits += 1
                if first is None:
                    first = k
        reports.append(ProbeReport(x, tuple(sorted(viol)), hits, first))
    return WellMatchedReport(horizon, reports)


@dataclass
class PositivityReport:
    probes: list  # of (violated indices, probability)

    @property
    def ok(self) -> bool:
        return all(p > 0.0 for _, p in self.probes)


def positivity_diagnostic(control: RandomSets, problem: Problem,
                          probes: Sequence[Vector]) -> PositivityReport:
    """Exact per-probe probability that a drawn index set meets I_+(x),
    by summing the probabilities of the intersecting atoms."""
    if not isinstance(control, RandomSets):
        raise ConfigError("positivity diagnostic applies to random controls")
    out = []
    for x in probes:
        viol = frozenset(violated_indices(problem, x))
        if not viol:
            raise ConfigError("positivity probes must be infeasible points")
        p = sum(prob for s, prob in control.atoms if viol.intersection(s))
        out.append((tuple(sorted(viol)), p))
    return PositivityReport(out)


def covers_every_window(control: Control, universe: Sequence[int], span: int,
                        starts: int) -> bool:
    """Structural repetitiveness check for nonadaptive controls: the union of
    each window of ``span`` consecutive emissions covers the universe."""
    want = set(int(i) for i in universe)
    emitted = [set(control._select(k, None, None)) for k in range(starts + span)]
    for n in range(starts):
        got = set().union(*emitted[n:n + span])
        if not want <= got:
            return False
    return True
