from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmklab.affine import build_c_mmk, decide_set_consensus
from rmklab.runs import (
    Adversary,
    ObstructionFree,
    Resilient,
    Schedule,
    WaitFree,
    enumerate_prefix_schedules,
    enumerate_schedules,
    facet_to_schedule,
    model_contains,
    rmk_contains,
    rmk_runs,
    schedule_to_facet,
    view_of,
)
from rmklab.topology import chr, chr_iter, standard_simplex


def S(n, *rounds):
    return Schedule(n, tuple(tuple(frozenset(b) for b in r) for r in rounds))


def test_schedule_validation():
    with pytest.raises(ValueError, match="empty block"):
        S(2, [[0], []])
    with pytest.raises(ValueError, match="overlap"):
        S(2, [[0], [0, 1]])
    with pytest.raises(ValueError, match="outside"):
        S(2, [[2]])
    with pytest.raises(ValueError, match="came back"):
        S(2, [[0]], [[0], [1]])
    with pytest.raises(ValueError, match="nobody"):
        S(2, [])


def test_enumeration_counts():
    assert len(list(enumerate_schedules(2, 1))) == 3
    assert len(list(enumerate_schedules(3, 1))) == 13
    assert len(list(enumerate_schedules(2, 2))) == 9
    assert len(list(enumerate_schedules(3, 1, participation={0, 2}))) == 3
    with pytest.raises(ValueError):
        list(enumerate_schedules(2, 0))


def test_prefix_enumeration_contains_full_schedules():
    pre = set(enumerate_prefix_schedules(2, 2))
    assert set(enumerate_schedules(2, 2)) <= pre
    assert S(2, [[0, 1]], [[0]]) in pre
    # per first-round set A: |ordered partitions of A| times the chains below it
    assert len(pre) == len(set(pre))


def test_schedule_to_facet_examples():
    central = schedule_to_facet(S(2, [[0, 1]]))
    assert all(v.carrier == {0, 1} for v in central)
    solo_first = schedule_to_facet(S(2, [[0], [1]]))
    assert solo_first.vertex_of(0).carrier == {0}
    assert solo_first.vertex_of(1).carrier == {0, 1}


@pytest.mark.parametrize("n,q", [(n, q) for n in range(1, 4) for q in (1, 2)])
def test_facet_schedule_roundtrip_exhaustive(n, q):
    facets = chr_iter(standard_simplex(n), q).facets
    scheds = set(enumerate_schedules(n, q))
    assert {facet_to_schedule(f, n) for f in facets} == scheds
    for s in scheds:
        assert facet_to_schedule(schedule_to_facet(s), n) == s


def test_views():
    solo = S(3, [[1]], [[1]])
    v = view_of(solo, 1)
    assert v.per_round == ({1}, {1})
    two = S(2, [[0], [1]])
    assert view_of(two, 0).per_round == ({0},)
    assert view_of(two, 1).per_round == ({0, 1},)
    sync = S(3, [[0, 1, 2]])
    assert all(view_of(sync, p).per_round == ({0, 1, 2},) for p in range(3))
    with pytest.raises(ValueError):
        view_of(solo, 0)


def test_views_have_snapshot_structure():
    for s in enumerate_prefix_schedules(3, 2):
        for r in range(s.q):
            views = {p: view_of(s, p).per_round[r] for p in s.active(r + 1)}
            for p, q in itertools.combinations(views, 2):
                a, b = views[p], views[q]
                assert a <= b or b <= a
                if p in b:
                    assert a <= b
                if q in a:
                    assert b <= a


def test_model_examples():
    every = list(enumerate_prefix_schedules(2, 2))
    assert all(model_contains(WaitFree(), s) for s in every)
    full = [s for s in every if all(s.active(r) == {0, 1} for r in (1, 2))]
    assert [s for s in every if model_contains(Resilient(0), s)] == full
    of1 = ObstructionFree(1)
    assert model_contains(of1, S(2, [[0, 1]], [[0]]))
    assert not model_contains(of1, S(2, [[0, 1]], [[0, 1]]))
    with pytest.raises(ValueError):
        Resilient(-1)


def _powerset(n):
    return [frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)]


def test_model_monotonicity():
    everything = Adversary(_powerset(3))
    for s in enumerate_prefix_schedules(3, 2):
        for t in range(3):
            if model_contains(Resilient(t), s):
                assert all(model_contains(Resilient(u), s) for u in range(t, 4))
        assert model_contains(everything, s) == model_contains(WaitFree(), s)


def test_rmk_runs():
    assert set(rmk_runs(2, 1)) == {S(2, [[0], [1]], [[0], [1]]), S(2, [[1], [0]], [[1], [0]])}
    assert set(rmk_runs(2, 2)) == set(enumerate_schedules(2, 2))
    assert len(rmk_runs(3, 1)) == len(build_c_mmk(3, 1).facets)
    with pytest.raises(ValueError):
        rmk_runs(4, 1)


@pytest.mark.parametrize("m,k,count", [(1, 1, 1), (2, 1, 2), (2, 2, 9), (3, 3, 169)])
def test_rmk_run_counts(m, k, count):
    assert len(rmk_runs(m, k)) == count


def test_rmk_2_1_solves_consensus():
    t = build_c_mmk(2, 1)
    for s in rmk_runs(2, 1):
        f = schedule_to_facet(s)
        out = {decide_set_consensus(t, f, v) for v in f}
        assert len(out) == 1 and out <= s.participants


def test_rmk_contains_chunks():
    good = rmk_runs(2, 1)[0]
    four = Schedule(2, good.rounds + good.rounds)
    assert rmk_contains(2, 1, four)
    assert not rmk_contains(2, 1, S(2, [[0, 1]], [[0, 1]]))
    assert not rmk_contains(2, 1, S(2, [[0], [1]]))


rounds_strategy = st.integers(1, 3).flatmap(
    lambda n: st.lists(st.permutations(range(n)).flatmap(
        lambda perm: st.lists(st.integers(1, n), min_size=n, max_size=n).map(
            lambda cuts: _split(perm, cuts))), min_size=1, max_size=3).map(lambda rs: (n, rs)))


def _split(perm, cuts):
    blocks, i = [], 0
    while i < len(perm):
        blocks.append(frozenset(perm[i:i + cuts[i]]))
        i += cuts[i]
    return tuple(blocks)


@given(rounds_strategy)
def test_schedule_json_roundtrip(nr):
    n, rounds = nr
    s = Schedule(n, tuple(rounds))
    assert Schedule.from_json(s.to_json()) == s
    assert Schedule.from_json(s.dumps()) == s
    assert facet_to_schedule(schedule_to_facet(s), n) == s


def test_chr_of_edge_is_three_runs():
    assert {facet_to_schedule(f, 2) for f in chr(standard_simplex(2)).facets} == set(enumerate_schedules(2, 1))
