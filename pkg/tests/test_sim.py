from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmklab.algos import layered_reach, tst_program
from rmklab.sim import (
    Event,
    ExecutionHistory,
    Exhaustive,
    Fixed,
    Invoke,
    MKObject,
    RandomPolicy,
    Read,
    SingleWriterViolation,
    SoftWiringViolation,
    Snapshot,
    Write,
    check_register_atomicity,
    check_tst_linearizable,
    check_well_nested,
    explore,
    interleaving_count,
    mk_invoke,
    mk_resolve,
    run_protocol,
)


def flag(p):
    def prog():
        yield Write("flag", 1)
        return (yield Read(1 - p, "flag"))
    return prog


def client(p, m=3, k=2):
    def prog():
        return (yield Invoke("o", 10 + p, m, k))
    return prog


def test_write_then_read_own_cell():
    def prog():
        yield Write("x", 7)
        return (yield Read(0, "x"))
    (h,) = run_protocol({0: prog}, Exhaustive())
    assert h.outputs == {0: 7}
    assert check_register_atomicity(h) and check_well_nested(h)


def test_flag_histories_match_brute_force_orders():
    hs = run_protocol({0: flag(0), 1: flag(1)}, Exhaustive())
    orders = set(itertools.permutations([0, 0, 1, 1]))
    assert len(hs) == len(orders) == interleaving_count([2, 2]) == 6
    assert {h.schedule for h in hs} == orders
    # at least one process sees the other's flag
    assert all(1 in h.outputs.values() for h in hs)


def test_single_step_threads():
    def one(p):
        def prog():
            yield Write("x", p)
            return p
        return prog
    assert len(run_protocol({0: one(0), 1: one(1)}, Exhaustive())) == 2


def test_fixed_replay_reproduces_history():
    threads = {0: flag(0), 1: flag(1)}
    for h in run_protocol(threads, Exhaustive()):
        (again,) = run_protocol(threads, Fixed(h.schedule))
        assert again.dumps() == h.dumps()


def test_history_json_roundtrip():
    (h,) = run_protocol({0: flag(0), 1: flag(1)}, Fixed((0, 1, 1, 0)))
    back = ExecutionHistory.from_json(h.dumps())
    assert back.outputs == h.outputs and back.schedule == h.schedule
    assert check_register_atomicity(back)


def test_single_writer_violation_names_step():
    def rogue():
        yield Write("x", 1)
        yield Write("x", 2, owner=1)
    with pytest.raises(SingleWriterViolation, match="step 2 of process 0"):
        run_protocol({0: rogue}, Exhaustive())


def test_snapshot_reads_every_cell():
    def w(p):
        def prog():
            yield Write("c", p + 1)
            return (yield Snapshot("c"))
        return prog
    hs = run_protocol({0: w(0), 1: w(1)}, Exhaustive())
    for h in hs:
        a, b = h.outputs[0], h.outputs[1]
        assert a[0] == 1 and b[1] == 2
        assert a == (1, 2) or b == (1, 2)
        assert check_register_atomicity(h)


def test_mk_solo_returns_own_proposal():
    (h,) = run_protocol({0: client(0, 2, 1)}, Exhaustive())
    assert h.outputs == {0: 10}


def test_mk_consensus_object_agrees():
    for h in run_protocol({p: client(p, 2, 1) for p in range(2)}, Exhaustive()):
        assert len(set(h.outputs.values())) == 1
        assert check_well_nested(h)


def test_mk_bound_exhaustive():
    ex = explore({p: client(p) for p in range(3)}, 3, merge_locals=False)
    assert len(ex.finals) == 6
    for o in ex.outputs():
        assert 1 <= len(set(o.values())) <= 2
        assert set(o.values()) <= {10, 11, 12}


def test_mk_rejects_extra_invoker():
    with pytest.raises(SoftWiringViolation):
        run_protocol({p: client(p, 2, 1) for p in range(3)}, Exhaustive())

    def twice():
        yield Invoke("o", 1, 2, 1)
        yield Invoke("o", 1, 2, 1)
    with pytest.raises(SoftWiringViolation):
        run_protocol({0: twice}, Exhaustive())


def test_standalone_object():
    o = MKObject(3, 2)
    assert mk_invoke(o, 0, "a") == "a"
    assert mk_invoke(o, 1, "b") == "b"
    assert mk_invoke(o, 2, "c") in {"a", "b"}
    assert len(o.responses) == 2
    with pytest.raises(SoftWiringViolation):
        mk_invoke(o, 3, "d")
    with pytest.raises(SoftWiringViolation):
        mk_invoke(MKObject(3, 2, [(0, "a", "a")]), 0, "x")
    with pytest.raises(ValueError):
        MKObject(2, 3)


@settings(max_examples=80)
@given(st.integers(1, 4), st.lists(st.integers(0, 5), min_size=1, max_size=6))
def test_mk_resolution_bound_and_validity(k, proposals):
    log: list = []
    for p, v in enumerate(proposals):
        log.append((p, v, mk_resolve(log, v, k)))
    responses = {r for _, _, r in log}
    assert len(responses) <= k
    assert responses <= set(proposals)
    # with no more distinct proposals than k, everyone keeps its own
    if len(set(proposals)) <= k:
        assert all(r == v for _, v, r in log)


def test_atomicity_checker_rejects_stale_read():
    evs = [Event(1, 0, "write", {"cell": [0, "x"], "value": 1}),
           Event(2, 1, "read", {"cell": [0, "x"], "value": None})]
    assert not check_register_atomicity(ExecutionHistory(evs, {}))


def test_well_nested_rejects_crossed_response():
    evs = [Event(0, 0, "invoke", {"op": "p"}),
           Event(1, 0, "respond", {"object": "o", "value": 1})]
    assert not check_well_nested(ExecutionHistory(evs, {}))


def _tst_history(spans):
    """Hand-made history; ``spans`` is a list of (pid, start, end, output)."""
    evs = []
    for p, a, b, out in spans:
        evs.append(Event(a, p, "invoke", {"op": "tst"}))
        if b is not None:
            evs.append(Event(b, p, "decide", {"value": out}))
    evs.sort(key=lambda e: e.t)
    return ExecutionHistory(evs, {p: out for p, _, b, out in spans if b is not None})


def test_tst_checker_examples():
    assert check_tst_linearizable(_tst_history([(0, 0, 2, "WIN"), (1, 3, 5, "LOSE")]))
    assert not check_tst_linearizable(_tst_history([(1, 0, 1, "LOSE"), (0, 2, 3, "WIN")]))
    assert not check_tst_linearizable(_tst_history([(0, 0, 2, "WIN"), (1, 1, 3, "WIN")]))
    assert not check_tst_linearizable(_tst_history([(0, 0, 2, "LOSE"), (1, 1, 3, "LOSE")]))
    # overlapping: the loser may finish first as long as the winner had started
    assert check_tst_linearizable(_tst_history([(0, 0, 4, "WIN"), (1, 1, 2, "LOSE")]))
    with pytest.raises(ValueError):
        check_tst_linearizable(_tst_history([(0, 0, 2, "WIN"), (1, 1, None, None)]))
    assert check_tst_linearizable(intervals={0: (0, 1), 1: (2, 3)}, outputs={0: "WIN", 1: "LOSE"})


def test_random_policy_is_deterministic():
    threads = {p: flag(p) for p in range(2)}
    a = [h.dumps() for h in run_protocol(threads, RandomPolicy(5, 50))]
    b = [h.dumps() for h in run_protocol(threads, RandomPolicy(5, 50))]
    assert a == b
    c = [h.dumps() for h in run_protocol(threads, RandomPolicy(6, 50))]
    assert a != c


def test_exploration_matches_enumeration():
    threads = {p: flag(p) for p in range(2)}
    hs = run_protocol(threads, Exhaustive())
    ex = explore(threads, 2)
    key = lambda o: tuple(sorted(o.items()))
    assert {key(h.outputs) for h in hs} == {key(o) for o in ex.outputs()}
    for w in ex.witnesses():
        assert check_register_atomicity(w)


def test_reduction_preserves_final_states():
    threads = {p: (lambda p=p: tst_program(p, 2)) for p in range(2)}
    full = explore(threads, 2, merge_locals=True)
    reduced = explore(threads, 2, merge_locals=True, reach=layered_reach)
    key = lambda ex: {(ex.memories[s[0]], s[1]) for s in ex.finals}
    assert key(full) == key(reduced)
    assert reduced.states <= full.states
