from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmklab.algos import (
    BOTTOM,
    RangeViolation,
    adaptive_rename,
    bg_power,
    check_layer_phases,
    cumulative_set_consensus,
    sa_run,
    test_and_set as run_tst,
    tight_rename,
)
from rmklab.sim import Event, ExecutionHistory, Exhaustive, Fixed, RandomPolicy


def test_bg_power_examples():
    assert bg_power(3, 2, 1) == 2
    assert bg_power(5, 2, 1) == 3
    assert bg_power(1, 3, 2) == 1
    for m in range(1, 5):
        for k in range(1, m + 1):
            assert bg_power(m, m, k) == k


@pytest.mark.parametrize("args", [(0, 2, 1), (2, 2, 0), (2, 1, 2)])
def test_bg_power_rejects(args):
    with pytest.raises(ValueError):
        bg_power(*args)


@given(st.integers(1, 40), st.integers(1, 6), st.data())
def test_bg_power_shape(j, m, data):
    k = data.draw(st.integers(1, m))
    v = bg_power(j, m, k)
    assert 1 <= v <= j
    assert bg_power(j + 1, m, k) >= v
    assert bg_power(j + m, m, k) == v + k
    if k == m:
        assert v == j


def test_cumulative_solo_returns_at_first_layer():
    res = cumulative_set_consensus({0: 0}, Exhaustive(), 2, 1)
    assert res.passed
    assert res.outcomes == [{0: (0, 1)}]
    (h,) = res.histories
    assert any(e.a == "invoke" and "object" in (e.payload or {}) for e in h.events)
    assert check_layer_phases(h)


@pytest.mark.parametrize("m,k", [(2, 1), (2, 2), (3, 1)])
def test_cumulative_pairs(m, k):
    res = cumulative_set_consensus({0: 0, 1: 1}, Exhaustive(), m, k)
    assert res.passed, [v for v in res.verdicts if not v.passed]
    for o in res.outcomes:
        assert len({v for v, _ in o.values()}) <= bg_power(2, m, k)
    assert all(check_layer_phases(h) for h in res.histories)


def test_cumulative_with_sparse_ids():
    res = cumulative_set_consensus({0: 7, 2: 3}, Exhaustive(), 2, 1)
    assert res.passed
    assert all({v for v, _ in o.values()} <= {3, 7} for o in res.outcomes)


def test_cumulative_random_is_reproducible():
    a = cumulative_set_consensus({i: i for i in range(4)}, RandomPolicy(3, 50), 2, 1)
    b = cumulative_set_consensus({i: i for i in range(4)}, RandomPolicy(3, 50), 2, 1)
    assert a.passed and a.outcomes == b.outcomes


def test_cumulative_rejects_bad_arguments():
    with pytest.raises(ValueError):
        cumulative_set_consensus({}, Exhaustive(), 2, 1)
    with pytest.raises(ValueError):
        cumulative_set_consensus({0: 0}, Exhaustive(), 1, 2)


def _w(t, cell):
    return Event(t, 0, "write", {"cell": [0, cell], "value": [0]})


def test_layer_phase_checker_catches_going_back():
    h = ExecutionHistory([_w(1, ("C1", 1)), _w(2, ("C1", 2)), _w(3, ("C1", 1))], {})
    v = check_layer_phases(h)
    assert not v.passed and "layer 1" in v.detail


def test_layer_phase_checker_catches_two_calls():
    call = lambda t: Event(t, 0, "invoke", {"object": ("MK", 1, 1), "proposal": 0})
    h = ExecutionHistory([_w(1, ("C1", 1)), call(2), call(3)], {})
    assert not check_layer_phases(h)
    h = ExecutionHistory([_w(1, ("C1", 1)), _w(2, ("C2", 2))], {})
    assert not check_layer_phases(h)


def test_tst_solo_wins():
    res = run_tst([0], Exhaustive())
    assert res.passed and res.outcomes == [{0: "WIN"}]


def test_tst_two_processes_exhaustive():
    res = run_tst([0, 1], Exhaustive())
    assert res.passed
    assert {tuple(sorted(o.items())) for o in res.outcomes} == {((0, "WIN"), (1, "LOSE")), ((0, "LOSE"), (1, "WIN"))}


def test_tst_sequential_order_decides():
    res = run_tst([0], Exhaustive())
    solo_steps = len(res.histories[0].schedule)
    # run p0 to completion, then p1
    res = run_tst([0, 1], Fixed((0,) * solo_steps + (1,) * 200))
    (h,) = res.histories
    assert h.outputs == {0: "WIN", 1: "LOSE"}
    assert res.passed


def test_adaptive_rename():
    solo = adaptive_rename([0], Exhaustive())
    assert solo.passed and solo.outcomes == [{0: 1}]
    two = adaptive_rename([0, 1], Exhaustive())
    assert two.passed and all(set(o.values()) <= {1, 2, 3} for o in two.outcomes)
    forb = adaptive_rename([0, 1], Exhaustive(), forbidden=[1])
    assert forb.passed and all(set(o.values()) <= {2, 3, 4} for o in forb.outcomes)


def test_tight_rename_small():
    solo = tight_rename([0], Exhaustive())
    assert solo.passed and solo.outcomes == [{0: 1}]
    two = tight_rename([0, 1], Exhaustive())
    assert two.passed and all(set(o.values()) == {1, 2} for o in two.outcomes)
    with pytest.raises(ValueError):
        tight_rename([0], Exhaustive(), strategy="bogus")


def test_narrowing_strategy_breaks_range():
    res = tight_rename([0, 1], Exhaustive(), strategy="narrow")
    v = res.verdict("tight_rename")
    assert not v.passed
    bad = v.counterexample["outputs"]
    assert not (set(bad.values()) == {1, 2})
    schedule = ExecutionHistory.from_json(v.counterexample["history"]).schedule
    with pytest.raises(RangeViolation) as err:
        tight_rename([0, 1], Fixed(schedule), strategy="narrow")
    assert err.value.history.outputs == bad


def test_sa_solo_and_sequential():
    solo = sa_run({0: "a"}, Exhaustive())
    assert solo.passed and solo.outcomes == [{0: "a"}]
    seq = sa_run({0: "a", 1: "b"}, Fixed((0,) * 6 + (1,) * 6), keep_histories=True)
    assert seq.passed
    assert seq.histories[0].outputs == {0: "a", 1: "a"}


def test_sa_pair_exhaustive():
    res = sa_run({0: "a", 1: "b"}, Exhaustive())
    assert res.passed
    for o in res.outcomes:
        assert not all(v is BOTTOM for v in o.values())
        assert len({v for v in o.values() if v is not BOTTOM}) == 1


def test_sa_random_checks_blocking_per_history():
    res = sa_run({0: "a", 1: "b", 2: "c"}, RandomPolicy(1, 200))
    assert res.passed
