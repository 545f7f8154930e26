"""Problem data model: convex functions with subgradient oracles, constraint
bodies, outer sets and full problem instances.

Points are plain 1-D ``numpy.float64`` arrays.  Constraint indices are
0-based positions in the pool.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError, InconsistentConstraintError, PoolIndexError

Vector = np.ndarray


def as_vector(coords, dim: Optional[int] = None) -> Vector:
    """Coerce to a finite 1-D float64 array, optionally checking the dimension."""
    x = np.asarray(coords, dtype=np.float64)
    if x.ndim != 1:
        raise ConfigError(f"expected a 1-D vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ConfigError("vector has non-finite coordinates")
    if dim is not None and x.shape[0] != dim:
        raise ConfigError(f"expected dimension {dim}, got {x.shape[0]}")
    return x


# ---------------------------------------------------------------------------
# Convex functions with deterministic subgradient selection
# ---------------------------------------------------------------------------

class ConvexFunction:
    """A real-valued convex function with a chosen subgradient at every point.

    Subclasses implement ``value`` and ``subgradient``; the selection is
    deterministic (ties in piecewise definitions break toward the lowest
    piece index).
    """

    def value(self, x: Vector) -> float:
        raise NotImplementedError

    def subgradient(self, x: Vector) -> Vector:
        raise NotImplementedError


@dataclass(frozen=True)
class Affine(ConvexFunction):
    """f(x) = <a, x> - b, with sublevel set {x : <a, x> <= b}."""

    a: Vector
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", as_vector(self.a))
        object.__setattr__(self, "b", float(self.b))

    def value(self, x):
        return float(self.a @ x) - self.b

    def subgradient(self, x):
        return self.a


@dataclass(frozen=True)
class AbsCoordMinusC(ConvexFunction):
    """f(x) = |x[axis]| - c."""

    axis: int
    c: float

    def value(self, x):
        return abs(float(x[self.axis])) - self.c

    def subgradient(self, x):
        g = np.zeros_like(x)
        t = float(x[self.axis])
        # sign(0) = 0 is a valid subgradient of |.| at the origin
        g[self.axis] = math.copysign(1.0, t) if t != 0.0 else 0.0
        return g


@dataclass(frozen=True)
class QuadCoordMinusC(ConvexFunction):
    """f(x) = x[axis]^2 - c."""

    axis: int
    c: float

    def value(self, x):
        t = float(x[self.axis])
        return t * t - self.c

    def subgradient(self, x):
        g = np.zeros_like(x)
        g[self.axis] = 2.0 * float(x[self.axis])
        return g


@dataclass(frozen=True)
class MaxAffine(ConvexFunction):
    """f(x) = max_j (<a_j, x> - b_j); the active piece with the lowest index
    supplies the subgradient."""

    pieces: tuple  # of (a: Vector, b: float)

    def __post_init__(self):
        if not self.pieces:
            raise ConfigError("MaxAffine needs at least one piece")
        norm = tuple((as_vector(a), float(b)) for a, b in self.pieces)
        object.__setattr__(self, "pieces", norm)

    def _active(self, x):
        vals = [float(a @ x) - b for a, b in self.pieces]
        best = max(vals)
        return vals.index(best), best

    def value(self, x):
        return self._active(x)[1]

    def subgradient(self, x):
        j, _ = self._active(x)
        return self.pieces[j][0]


@dataclass(frozen=True)
class SquaredDistToBall(ConvexFunction):
    """f(x) = dist(x, B(center, radius))^2; differentiable everywhere."""

    center: Vector
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        if self.radius <= 0:
            raise ConfigError("ball radius must be positive")

    def value(self, x):
        d = float(np.linalg.norm(x - self.center))
        e = max(0.0, d - self.radius)
        return e * e

    def subgradient(self, x):
        diff = x - self.center
        d = float(np.linalg.norm(diff))
        if d <= self.radius:
            return np.zeros_like(x)
        return (2.0 * (d - self.radius) / d) * diff


# ---------------------------------------------------------------------------
# Constraint bodies
# ---------------------------------------------------------------------------

class Body:
    """A closed convex set.  ``violation`` is a signed measure that is <= 0
    exactly on the set; ``distance`` is the exact Euclidean distance when a
    closed form exists (else None)."""

    def violation(self, x: Vector) -> float:
        raise NotImplementedError

    def member(self, x: Vector, tol: float = 0.0) -> bool:
        return self.violation(x) <= tol

    def distance(self, x: Vector) -> Optional[float]:
        return None

    def project(self, x: Vector) -> Vector:
        raise ConfigError(f"{type(self).__name__} has no closed-form projection")


@dataclass(frozen=True)
class Halfspace(Body):
    """{x : <a, x> <= b} with a != 0."""

    a: Vector
    b: float

    def __post_init__(self):
        a = as_vector(self.a)
        if not np.any(a):
            raise ConfigError("halfspace normal must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))

    def violation(self, x):
        return float(self.a @ x) - self.b

    def distance(self, x):
        v = self.violation(x)
        if v <= 0.0:
            return 0.0
        return v / float(np.linalg.norm(self.a))

    def project(self, x):
        v = self.violation(x)
        if v <= 0.0:
            return np.array(x, dtype=np.float64)
        return x - (v / float(self.a @ self.a)) * self.a


@dataclass(frozen=True)
class Ball(Body):
    """{x : ||x - center|| <= radius}."""

    center: Vector
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0.0:
            raise ConfigError("ball radius must be positive")

    def violation(self, x):
        return float(np.linalg.norm(x - self.center)) - self.radius

    def distance(self, x):
        return max(0.0, self.violation(x))

    def project(self, x):
        diff = x - self.center
        d = float(np.linalg.norm(diff))
        if d <= self.radius:
            return np.array(x, dtype=np.float64)
        return self.center + (self.radius / d) * diff


@dataclass(frozen=True)
class Box(Body):
    """{x : lo <= x <= hi} componentwise."""

    lo: Vector
    hi: Vector

    def __post_init__(self):
        lo = as_vector(self.lo)
        hi = as_vector(self.hi, dim=lo.shape[0])
        if np.any(lo > hi):
            raise ConfigError("box has lo > hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def violation(self, x):
        return float(np.max(np.maximum(self.lo - x, x - self.hi)))

    def distance(self, x):
        return float(np.linalg.norm(x - self.project(x)))

    def project(self, x):
        return np.minimum(np.maximum(x, self.lo), self.hi)


@dataclass(frozen=True)
class Sublevel(Body):
    """{x : f(x) <= 0} for a convex function f with a subgradient oracle."""

    f: ConvexFunction

    def violation(self, x):
        return self.f.value(x)

    def distance(self, x):
        # Closed forms where the sublevel set has known geometry.
        f = self.f
        if isinstance(f, Affine):
            return Halfspace(f.a, f.b).distance(x)
        if isinstance(f, AbsCoordMinusC) and f.c >= 0.0:
            return max(0.0, abs(float(x[f.axis])) - f.c)
        if isinstance(f, QuadCoordMinusC) and f.c >= 0.0:
            return max(0.0, abs(float(x[f.axis])) - math.sqrt(f.c))
        if isinstance(f, SquaredDistToBall):
            return max(0.0, float(np.linalg.norm(x - f.center)) - f.radius)
        return None

    def project(self, x):
        # Exact projection exists only for function kinds whose sublevel set
        # is a halfspace, slab or ball.
        f = self.f
        if isinstance(f, Affine):
            return Halfspace(f.a, f.b).project(x)
        if isinstance(f, AbsCoordMinusC) and f.c >= 0.0:
            y = np.array(x, dtype=np.float64)
            y[f.axis] = min(max(y[f.axis], -f.c), f.c)
            return y
        if isinstance(f, QuadCoordMinusC) and f.c >= 0.0:
            r = math.sqrt(f.c)
            y = np.array(x, dtype=np.float64)
            y[f.axis] = min(max(y[f.axis], -r), r)
            return y
        if isinstance(f, SquaredDistToBall):
            return Ball(f.center, f.radius).project(x)
        raise ConfigError(
            f"metric cutter unavailable for sublevel of {type(f).__name__}")


METRIC_BODIES = (Halfspace, Ball, Box)


# ---------------------------------------------------------------------------
# Constraints, outer set, problem
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    """One constraint set C_i: a body plus the cutter used to approach it.

    ``cutter`` is "metric" for Halfspace/Ball/Box and "subgradient" for
    Sublevel bodies by default; Sublevel bodies with closed-form projections
    accept cutter="metric" as an override.
    """

    index: int
    body: Body
    cutter: str = ""

    def __post_init__(self):
        kind = self.cutter
        if not kind:
            kind = "subgradient" if isinstance(self.body, Sublevel) else "metric"
            object.__setattr__(self, "cutter", kind)
        if kind not in ("metric", "subgradient"):
            raise ConfigError(f"unknown cutter kind {kind!r}")
        if kind == "subgradient" and not isinstance(self.body, Sublevel):
            raise ConfigError("subgradient cutter requires a sublevel body")

    def member(self, x, tol: float = 0.0) -> bool:
        return self.body.member(x, tol)

    def violation(self, x) -> float:
        return self.body.violation(x)

    def distance(self, x) -> Optional[float]:
        return self.body.distance(x)


class OuterSet:
    """The outer set Q with an exact metric projection."""

    def __init__(self, body: Optional[Body] = None):
        if body is not None and not isinstance(body, METRIC_BODIES):
            raise ConfigError("outer set must be whole space, halfspace, box or ball")
        self.body = body

    @classmethod
    def whole_space(cls) -> "OuterSet":
        return cls(None)

    @property
    def is_whole_space(self) -> bool:
        return self.body is None

    def member(self, x, tol: float = 0.0) -> bool:
        return True if self.body is None else self.body.member(x, tol)

    def project(self, x: Vector) -> Vector:
        return x if self.body is None else self.body.project(x)

    def __eq__(self, other):
        return isinstance(other, OuterSet) and self.body == other.body

    def __repr__(self):
        return f"OuterSet({self.body!r})"


class Problem:
    """A convex feasibility instance: find x in (inter C_i) inter Q.

    The constraint pool is either a finite list or a lazy ``index ->
    Constraint`` function with declared cardinality ``m`` (``math.inf``
    allowed).  ``interior``, when given, is a pair ``(z, R)`` asserting
    B(z, 2R) lies inside every C_i with z in Q; it is spot-checked, never
    inferred.
    """

    def __init__(self, dim: int, constraints: Optional[Sequence[Constraint]] = None,
                 *, pool: Optional[Callable[[int], Constraint]] = None,
                 m: Optional[float] = None, outer: Optional[OuterSet] = None,
                 interior: Optional[tuple] = None):
        if (constraints is None) == (pool is None):
            raise ConfigError("supply exactly one of constraints= or pool=")
        self.dim = int(dim)
        self.outer = outer if outer is not None else OuterSet.whole_space()
        self._cache: dict[int, Constraint] = {}
        if constraints is not None:
            self._constraints = list(constraints)
            self.m: float = len(self._constraints)
            for pos, c in enumerate(self._constraints):
                if c.index != pos:
                    raise ConfigError(
                        f"constraint at position {pos} has index {c.index}")
            self._pool = None
        else:
            if m is None or (m != math.inf and int(m) <= 0):
                raise ConfigError("lazy pools need a positive cardinality m")
            self._constraints = None
            self._pool = pool
            self.m = math.inf if m == math.inf else int(m)
        if interior is not None:
            z, big_r = interior
            z = as_vector(z, dim=self.dim)
            big_r = float(big_r)
            if big_r <= 0.0:
                raise ConfigError("interior radius must be positive")
            if not self.outer.member(z):
                raise ConfigError("interior point z is not in the outer set Q")
            interior = (z, big_r)
        self.interior = interior

    @property
    def is_finite(self) -> bool:
        return self.m != math.inf

    def constraint(self, i: int) -> Constraint:
        if i < 0 or (self.is_finite and i >= self.m):
            raise PoolIndexError(f"index out of pool: {i}")
        if self._constraints is not None:
            return self._constraints[i]
        c = self._cache.get(i)
        if c is None:
            c = self._pool(i)
            if c.index != i:
                raise ConfigError(f"pool returned constraint with index {c.index} for {i}")
            self._cache[i] = c
        return c

    def indices(self) -> range:
        if not self.is_finite:
            raise ConfigError("infinite pool has no full index range")
        return range(int(self.m))

    def spot_check_interior(self, n_dirs: int = 64, seed: int = 0) -> None:
        """Probabilistic check that B(z, 2R) is inside every constraint set.

        Raises ConfigError on a witnessed violation; passing is not a proof.
        """
        if self.interior is None:
            raise ConfigError("no certified interior to check")
        if not self.is_finite:
            raise ConfigError("spot check needs a finite pool")
        z, big_r = self.interior
        rng = np.random.default_rng(seed)
        dirs = rng.standard_normal((n_dirs, self.dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        for e in dirs:
            pt = z + (2.0 * big_r) * e
            for i in self.indices():
                if not self.constraint(i).member(pt, tol=1e-12):
                    raise ConfigError(
                        f"interior ball violates constraint {i} at a sampled direction")


def violated_indices(problem: Problem, x: Vector, window=None) -> tuple:
    """I_+(x) restricted to a finite window: indices whose set x is outside of."""
    if window is None:
        window = problem.indices()
    out = []
    for i in window:
        if not problem.constraint(i).member(x):
            out.append(i)
    return tuple(out)


def feasible(problem: Problem, x: Vector, window=None, tol: float = 0.0) -> bool:
    """True iff x satisfies every constraint in the window and x is in Q.

    Membership is the sign test violation(x) <= tol with tol = 0 by default.
    For infinite pools the caller must supply a finite witness window.
    """
    if window is None:
        if not problem.is_finite:
            raise ConfigError("feasibility over an infinite pool needs a finite window")
        window = problem.indices()
    if not problem.outer.member(x, tol):
        return False
    for i in window:
        if not problem.constraint(i).member(x, tol):
            return False
    return True
