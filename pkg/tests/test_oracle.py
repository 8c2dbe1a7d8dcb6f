from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from meshsched.oracle import (
    InstanceTooLarge,
    TinyInstance,
    brute_force_best_schedule,
    random_tiny_instance,
    replay_schedule,
)
from meshsched.ser import run_ser
from meshsched.sera import run_sera

from .conftest import THREE_ROUTES, chain, structural_graph


def tiny(k: int, B: int = 1) -> TinyInstance:
    g, ps = chain(k)
    return TinyInstance(g, ps, B)


@pytest.mark.parametrize("k, T", [(1, 1), (2, Fraction(1, 2)), (3, Fraction(1, 3)), (4, Fraction(1, 3))])
@pytest.mark.parametrize("method", ["walks", "enumerate"])
def test_best_on_chains(k, T, method):
    best, slots = brute_force_best_schedule(tiny(k), 6, method=method)
    assert best == T
    assert replay_schedule(tiny(k), slots).T == T


def test_replay_of_pipeline():
    rep = replay_schedule(tiny(3), [{0}, {1}, {2}])
    assert rep.ok and rep.steady
    assert rep.T == Fraction(1, 3)
    assert rep.max_occupancy == 1


def test_replay_reports_violations():
    # a slot holding two adjacent hops, and a hop pushing into a full buffer
    rep = replay_schedule(tiny(3), [{0, 1}, {2}])
    assert rep.independence_violations == (0,)
    assert rep.c2_violations > 0
    assert not rep.ok
    rep = replay_schedule(tiny(3), [{0}, {0}, {1}, {2}])
    assert rep.independence_violations == ()
    assert rep.c2_violations > 0 and rep.max_occupancy > 1
    assert not rep.ok
    # a larger buffer only delays the overflow
    assert not replay_schedule(tiny(3, B=2), [{0}, {0}, {1}, {2}]).ok


def test_replay_rejects_empty_schedule():
    with pytest.raises(ValueError):
        replay_schedule(tiny(2), [])


def test_walks_and_enumeration_agree():
    rng = np.random.default_rng(7)
    for _ in range(12):
        inst = random_tiny_instance(rng, max_size=6)
        a, _ = brute_force_best_schedule(inst, 5, method="walks")
        b, _ = brute_force_best_schedule(inst, 5, method="enumerate")
        assert a == b


def test_algorithms_replay_and_stay_below_optimum():
    rng = np.random.default_rng(11)
    for _ in range(15):
        inst = random_tiny_instance(rng)
        ser = run_ser(inst.g)
        sera = run_sera(inst.g, "nd-bf", inst.B)
        for r in (ser, sera):
            rep = replay_schedule(inst, r.schedule.slots)
            assert rep.ok and rep.T == r.T
        best, _ = brute_force_best_schedule(inst, max(8, ser.p, sera.p))
        assert best >= max(ser.T, sera.T)


def test_size_limits():
    g, ps = structural_graph(*THREE_ROUTES)
    with pytest.raises(InstanceTooLarge):
        brute_force_best_schedule(TinyInstance(g, ps, 2))
    with pytest.raises(InstanceTooLarge):
        brute_force_best_schedule(tiny(3), 20)
    with pytest.raises(InstanceTooLarge):
        brute_force_best_schedule(tiny(3), 9, method="enumerate")
    with pytest.raises(ValueError):
        brute_force_best_schedule(tiny(3), 4, method="greedy")
    with pytest.raises(ValueError):
        TinyInstance(tiny(2).g, tiny(2).ps, 0)


def test_random_instances_respect_bounds():
    rng = np.random.default_rng(3)
    for _ in range(10):
        inst = random_tiny_instance(rng, min_size=3, max_size=7)
        assert 3 <= inst.g.size <= 7
        assert inst.B in (1, 2)
