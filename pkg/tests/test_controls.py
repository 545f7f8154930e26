import math

import numpy as np
import pytest

from feasik import (AbsCoordMinusC, ConfigError, Constraint, ControlError,
                    Cyclic, Explicit, Halfspace, Intermittent, MaxDisplacement,
                    MaxViolation, Problem, QuadCoordMinusC, RandomSets,
                    RemotestSet, Repetitive, Sublevel, empirical_well_matched,
                    next_indices, positivity_diagnostic)
from feasik.controls import covers_every_window


def a2_problem():
    return Problem(2, [Constraint(0, Sublevel(AbsCoordMinusC(axis=1, c=1.0))),
                       Constraint(1, Sublevel(QuadCoordMinusC(axis=0, c=1.0)))])


def test_cyclic_order(axis_halfspaces):
    c = Cyclic([0, 1])
    x = np.zeros(2)
    assert next_indices(c, 0, x, axis_halfspaces) == (0,)
    assert next_indices(c, 1, x, axis_halfspaces) == (1,)
    assert next_indices(c, 2, x, axis_halfspaces) == (0,)


def test_remotest_picks_largest_distance(axis_halfspaces):
    c = RemotestSet()
    assert next_indices(c, 0, np.array([2.0, 1.0]), axis_halfspaces) == (0,)
    assert next_indices(c, 0, np.array([1.0, 2.0]), axis_halfspaces) == (1,)


def test_max_violation_on_a2():
    p = a2_problem()
    # f1(2,2) = 1, f2(2,2) = 3
    assert next_indices(MaxViolation(), 0, np.array([2.0, 2.0]), p) == (1,)


def test_max_displacement(axis_halfspaces):
    c = MaxDisplacement()
    assert next_indices(c, 0, np.array([0.5, 3.0]), axis_halfspaces) == (1,)


def test_maximal_requires_finite_pool():
    p = Problem(1, pool=lambda i: Constraint(i, Halfspace([1.0], float(i))),
                m=math.inf)
    with pytest.raises(ControlError, match="maximal control requires finite pool"):
        next_indices(RemotestSet(), 0, np.array([0.0]), p)


def test_out_of_pool_index_raises(axis_halfspaces):
    from feasik import PoolIndexError
    with pytest.raises(PoolIndexError):
        next_indices(Cyclic([5]), 0, np.zeros(2), axis_halfspaces)


def test_emission_validation(axis_halfspaces):
    with pytest.raises(ControlError):
        next_indices(Repetitive(lambda k: ()), 0, np.zeros(2), axis_halfspaces)
    with pytest.raises(ControlError):
        next_indices(Repetitive(lambda k: (0, 0)), 0, np.zeros(2), axis_halfspaces)
    with pytest.raises(ControlError):
        # emits two indices with declared max_card 1
        next_indices(Repetitive(lambda k: (0, 1), max_card=1), 0,
                     np.zeros(2), axis_halfspaces)


def test_explicit_exhausted(axis_halfspaces):
    c = Explicit([(0,), (1,)])
    assert next_indices(c, 1, np.zeros(2), axis_halfspaces) == (1,)
    with pytest.raises(ControlError, match="exhausted"):
        next_indices(c, 2, np.zeros(2), axis_halfspaces)


def test_well_matched_cyclic_hits(axis_halfspaces):
    p = axis_halfspaces
    probes = [np.array([1.0, 1.0]), np.array([0.5, -1.0]), np.array([-1.0, 2.0])]
    rep = empirical_well_matched(Cyclic([0, 1]), p, probes, horizon=4)
    assert rep.ok
    assert all(pr.hits >= 1 for pr in rep.probes)
    assert "no violation found" in rep.summary()


def test_well_matched_flags_starved_index(axis_halfspaces):
    # control never emits index 0; probe violates only C_0
    control = Explicit([(1,)] * 20)
    probe = np.array([1.0, -1.0])
    rep = empirical_well_matched(control, axis_halfspaces, [probe], horizon=20)
    assert not rep.ok
    assert rep.probes[0].hits == 0
    assert "necessary condition failed" in rep.summary()


def test_well_matched_random_frequency():
    m, n = 4, 1000
    p = Problem(2, [Constraint(i, Halfspace([1.0, 0.0], -float(i))) for i in range(m)])
    control = RandomSets.uniform_singletons(m, seed=42)
    x = np.array([-1.5, 0.0])  # violates constraints with i > 1.5: {2, 3}... check below
    viol = [i for i in range(m) if not p.constraint(i).member(x)]
    rep = empirical_well_matched(control, p, [x], horizon=n)
    prob = len(viol) / m
    sigma = math.sqrt(prob * (1 - prob) / n)
    assert abs(rep.probes[0].hits / n - prob) <= 5 * sigma


def test_positivity_worked_examples(axis_halfspaces):
    p = axis_halfspaces
    probe_c1 = np.array([-1.0, 1.0])  # violates only the second set (index 1)
    uniform = RandomSets([((0,), 0.5), ((1,), 0.5)], seed=1)
    rep = positivity_diagnostic(uniform, p, [probe_c1])
    assert rep.probes[0][1] == 0.5 and rep.ok

    only_first = RandomSets([((0,), 1.0)], seed=1)
    rep = positivity_diagnostic(only_first, p, [probe_c1])
    assert rep.probes[0][1] == 0.0 and not rep.ok

    mixed = RandomSets([((0, 1), 0.3), ((0,), 0.7)], seed=1)
    rep = positivity_diagnostic(mixed, p, [probe_c1])
    assert rep.probes[0][1] == 0.3 and rep.ok


def test_structural_repetitiveness_windows():
    s = 3
    assert covers_every_window(Cyclic([0, 1, 2]), (0, 1, 2), s, starts=3 * s)
    inter = Intermittent([(0, 1), (2,), (1, 3)])
    assert covers_every_window(inter, (0, 1, 2, 3), inter.span, starts=3 * inter.span)
    assert not covers_every_window(Cyclic([0, 1]), (0, 1, 2), 2, starts=6)


def test_random_sets_every_index_appears(axis_halfspaces):
    m = 6
    p = Problem(1, [Constraint(i, Halfspace([1.0], float(i))) for i in range(m)])
    control = RandomSets([((i,), 1.0 / m) for i in range(m)], seed=2024)
    seen = set()
    x = np.array([0.0])
    for k in range(10_000):
        seen.update(control.indices(k, x, p))
    assert seen == set(range(m))


def test_random_sets_deterministic_and_counter_based(axis_halfspaces):
    c1 = RandomSets.uniform_singletons(2, seed=99)
    c2 = RandomSets.uniform_singletons(2, seed=99)
    x = np.zeros(2)
    seq1 = [c1.indices(k, x, axis_halfspaces) for k in range(200)]
    seq2 = [c2.indices(k, x, axis_halfspaces) for k in range(200)]
    assert seq1 == seq2
    # draw at k is independent of the visiting order
    assert c1.indices(123, x, axis_halfspaces) == seq2[123]
    c3 = RandomSets.uniform_singletons(2, seed=100)
    assert [c3.indices(k, x, axis_halfspaces) for k in range(200)] != seq1


def test_random_sets_validation():
    with pytest.raises(ConfigError, match="sum"):
        RandomSets([((0,), 0.5), ((1,), 0.6)], seed=0)
    with pytest.raises(ConfigError):
        RandomSets([((0,), 1.5), ((1,), -0.5)], seed=0)


def test_probes_must_be_infeasible(axis_halfspaces):
    with pytest.raises(ConfigError):
        empirical_well_matched(Cyclic([0, 1]), axis_halfspaces,
                               [np.array([-1.0, -1.0])], horizon=4)
