"""Algorithms run inside the :mod:`rmklab.sim` executor.

Every algorithm is a generator *program* that can be composed with
``yield from``; the public functions wrap the programs, run them under a
scheduler policy (or the state-merging explorer) and check the results.

Register and object names are tuples that start with a caller-chosen
namespace so that instances never share variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping

from .affine import Verdict
from .sim import (
    Event,
    ExecutionHistory,
    Exhaustive,
    Exploration,
    Fixed,
    Invoke,
    Machine,
    Read,
    Snapshot,
    Write,
    check_tst_linearizable,
    explore,
    iter_histories,
)

__all__ = [
    "bg_power",
    "cumulative_program",
    "cumulative_set_consensus",
    "check_layer_phases",
    "tst_program",
    "test_and_set",
    "rename_program",
    "adaptive_rename",
    "tight_rename_program",
    "narrowing_rename_program",
    "tight_rename",
    "RangeViolation",
    "sa_program",
    "sa_run",
    "AlgoResult",
    "check_layer_phases_all",
    "layered_reach",
]

BOTTOM = None  # the "no decision" output of safe agreement


def bg_power(j: int, m: int, k: int) -> int:
    """Set-consensus level that ``j`` processes extract from ``(m,k)`` objects."""
    if j < 1:
        raise ValueError("j must be at least 1")
    if not 1 <= k:
        raise ValueError("k must be at least 1")
    if k > m:
        raise ValueError(f"k={k} exceeds m={m}")
    return k * (j // m) + min(k, j % m)


# ---------------------------------------------------------------------------
# cumulative set consensus
# ---------------------------------------------------------------------------


def _union(cells: Iterable) -> frozenset:
    out: frozenset = frozenset()
    for c in cells:
        if c is not None:
            out |= c
    return out


def _layer(my_id: int, id_seen: frozenset, in_id: int, j: int, m: int, k: int, ns: tuple):
    """One layer; returns ``(returned?, id_seen, in_id)``."""
    c1 = ns + ("C1", j)
    yield Write(c1, id_seen)
    snap = _union((yield Snapshot(c1)))
    if len(snap) == j:
        rank = sorted(snap).index(my_id) + 1
        in_id = yield Invoke(ns + ("MK", j, (rank - 1) // m + 1), in_id, m, k)
        yield Write(ns + ("C2", j), in_id)
        snap = _union((yield Snapshot(c1)))
        if len(snap) == j:
            return True, id_seen, in_id
    posted = [x for x in (yield Snapshot(ns + ("C2", j))) if x is not None]
    return False, snap | id_seen, min(posted) if posted else in_id


def cumulative_program(my_id: int, n: int, m: int, k: int, ns: tuple = ()):
    """Layered extraction of set consensus from ``(m,k)`` objects.

    At layer ``j`` a process posts the ids it has seen and snapshots the
    layer.  If exactly ``j`` ids are visible it proposes its current id to
    the object of its rank group, posts the response, and returns it if
    still only ``j`` ids are visible.  Otherwise it absorbs what it saw,
    adopts the smallest id posted at this layer (if any) and moves on.

    Returns ``(adopted id, layer)``.  ``n`` bounds the number of layers.
    """
    id_seen = frozenset({my_id})
    in_id = my_id
    for j in range(1, n + 1):
        done, id_seen, in_id = yield from _layer(my_id, id_seen, in_id, j, m, k, ns)
        if done:
            return in_id, j
    raise RuntimeError(f"process with id {my_id} did not return within {n} layers")


@dataclass
class AlgoResult:
    """Outcome of running an algorithm under some policy.

    ``outcomes`` lists the per-process outputs of each explored run (one per
    history, or one per reachable final state when states were merged);
    ``histories`` holds the histories (or witnesses) when they were kept.
    """

    verdicts: list
    outcomes: list
    histories: list = field(default_factory=list)
    states: int = 0

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def verdict(self, prop: str) -> Verdict:
        return next(v for v in self.verdicts if v.property == prop)

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "runs": len(self.outcomes),
            "states": self.states,
            "verdicts": [v.to_json() for v in self.verdicts],
        }


def _threads(factory: Callable[[int], Any], participants: Iterable[int]) -> dict:
    return {p: (lambda p=p: factory(p)) for p in participants}


@dataclass
class _Run:
    outputs: list
    histories: list
    states: int
    exploration: Exploration | None = None


def _run(threads: Mapping[int, Callable], n: int, policy: Any, *, reach: Callable | None = None,
         track_precedence: bool = False, on_transition: Callable | None = None,
         per_history: Callable[[ExecutionHistory], None] | None = None,
         keep_histories: bool = True, label: str = "") -> _Run:
    """Exhaustive policies go through the state-merging explorer (one witness
    per final state); other policies stream concrete histories."""
    if isinstance(policy, Exhaustive):
        ex = explore(threads, n, on_transition=on_transition, track_precedence=track_precedence, reach=reach)
        hist = []
        if keep_histories or per_history is not None:
            for h in ex.witnesses(label):
                if per_history is not None:
                    per_history(h)
                if keep_histories:
                    hist.append(h)
        return _Run(ex.outputs(), hist, ex.states, ex)
    outs, hist = [], []
    for h in iter_histories(threads, policy, n, label=label):
        if per_history is not None:
            per_history(h)
        outs.append(h.outputs)
        if keep_histories:
            hist.append(h)
    return _Run(outs, hist, len(outs))


# ---------------------------------------------------------------------------
# layer / phase structure
# ---------------------------------------------------------------------------


def _classify(kind: str, name: Any) -> tuple[str, str, int] | None:
    """``(kind, array, layer)`` for accesses to layered variables."""
    if not isinstance(name, (list, tuple)):
        return None
    if len(name) >= 3 and name[-3] == "MK":
        return kind, "MK", name[-2]
    if len(name) >= 2 and name[-2] in ("C1", "C2"):
        return kind, name[-2], name[-1]
    return None


def _op_access(op: Any) -> tuple[str, str, int] | None:
    if isinstance(op, Write):
        return _classify("write", op.name)
    if isinstance(op, Snapshot):
        return _classify("read", op.name)
    if isinstance(op, Read):
        return _classify("read", op.name)
    if isinstance(op, Invoke):
        return _classify("call", op.obj)
    return None


def _event_access(e: Event) -> tuple[str, str, int] | None:
    pl = e.payload or {}
    if e.a == "write":
        return _classify("write", pl["cell"][1])
    if e.a == "read":
        return _classify("read", pl["snapshot"] if "snapshot" in pl else pl["cell"][1])
    if e.a == "invoke" and "object" in pl:
        return _classify("call", pl["object"])
    return None


_PHASE_START = (0, 0)  # (layer, phase)


def _phase_step(state: tuple[int, int], access: tuple[str, str, int]) -> tuple[int, int] | str:
    """Advance the layer/phase automaton; a string result describes a violation.

    Phases inside a layer: 1 = C1 accesses, 2 = the single object call,
    3 = C2 accesses and the closing re-read of C1.
    """
    layer, phase = state
    kind, arr, j = access
    if j < layer:
        return f"touched layer {j} after reaching layer {layer}"
    if j > layer:
        if arr != "C1" or kind != "write":
            return f"layer {j} does not open with a C1 write"
        return j, 1
    if arr == "C1":
        if phase == 1 and kind == "read":
            return state
        if phase in (2, 3) and kind == "read":
            return j, 3
        return f"C1 {kind} in phase {phase} of layer {j}"
    if arr == "MK":
        if phase != 1:
            return f"object call in phase {phase} of layer {j}"
        return j, 2
    if arr == "C2":
        return j, 3
    return state


def check_layer_phases(h: ExecutionHistory) -> Verdict:
    """Per process and layer: C1 phase, at most one object call, then the C2
    phase; layers are entered in increasing order and never revisited."""
    for p, evs in sorted(h.by_process().items()):
        state = _PHASE_START
        for e in evs:
            acc = _event_access(e)
            if acc is None:
                continue
            nxt = _phase_step(state, acc)
            if isinstance(nxt, str):
                return Verdict("layer_phases", "history", False, {"process": p, "t": e.t}, nxt)
            state = nxt
    return Verdict("layer_phases", "history", True)


def check_layer_phases_all(machine: Machine, instance: str = "") -> Verdict:
    """Layer/phase check over every path of every process's local-state graph.

    After an unreduced exploration the graph contains every step any process
    took in any interleaving, so every per-process event sequence of every
    history is a path here.
    """
    succ: dict[int, list[int]] = {}
    for (lid, _), nxt in machine._lsucc.items():
        succ.setdefault(lid, []).append(nxt)
    seen = set()
    for pid, root in machine._lroot.items():
        stack = [(root, _PHASE_START)]
        while stack:
            lid, state = stack.pop()
            if (lid, state) in seen:
                continue
            seen.add((lid, state))
            if machine.is_done(lid):
                continue
            acc = _op_access(machine.next_op(lid))
            nxt = state if acc is None else _phase_step(state, acc)
            if isinstance(nxt, str):
                trace = [repr(op) for op, _ in machine.trace(lid)]
                return Verdict("layer_phases", instance, False, {"process": pid, "trace": trace}, nxt)
            for child in succ.get(lid, ()):
                stack.append((child, nxt))
    return Verdict("layer_phases", instance, True, None, f"{len(seen)} (local state, phase) pairs")


# ---------------------------------------------------------------------------
# cumulative set consensus driver
# ---------------------------------------------------------------------------


def cumulative_set_consensus(inputs: Mapping[int, int], policy: Any, m: int, k: int,
                             n: int | None = None, *, keep_histories: bool = True) -> AlgoResult:
    """Run the layered algorithm under ``policy`` and check it.

    Verdicts: termination by layer ``p``, validity, at most
    ``bg_power(p, m, k)`` distinct outputs, the ``|IdSeen| >= layer``
    invariant on every C1 write, and the layer/phase structure.  The
    exhaustive policy visits every reachable state, so the write invariant
    and the phase structure are checked on every step of every interleaving.
    """
    if not inputs:
        raise ValueError("need at least one participant")
    if not 1 <= k <= m:
        raise ValueError("need 1 <= k <= m")
    n = n if n is not None else max(inputs) + 1
    p = len(inputs)
    inst = f"p={p},m={m},k={k}"
    bound = bg_power(p, m, k)
    threads = _threads(lambda q: cumulative_program(inputs[q], n, m, k), inputs)
    bad_writes: list = []
    bad_phase: list = []

    def note_write(pid: int, name: tuple, value: frozenset) -> None:
        if len(value) < name[-1] and not bad_writes:
            bad_writes.append({"process": pid, "cell": list(name), "value": sorted(value)})

    def hook(machine, state, pid, op, res, nxt):
        if isinstance(op, Write) and op.name[-2] == "C1":
            note_write(pid, op.name, op.value)

    def per_history(h: ExecutionHistory) -> None:
        for e in h.events:
            if e.a == "write" and e.payload["cell"][1][-2] == "C1":
                note_write(e.p, e.payload["cell"][1], e.payload["value"])
        v = check_layer_phases(h)
        if not v.passed and not bad_phase:
            bad_phase.append(Verdict("layer_phases", inst, False,
                                     {"where": v.counterexample, "history": h.to_json()}, v.detail))

    exhaustive = isinstance(policy, Exhaustive)
    run = _run(threads, n, policy, on_transition=hook if exhaustive else None,
               per_history=per_history, keep_histories=keep_histories, label="cumulative")
    outs = run.outputs
    allowed = set(inputs.values())
    term = next((o for o in outs if set(o) != set(inputs) or any(layer > p for _, layer in o.values())), None)
    val = next((o for o in outs if any(v not in allowed for v, _ in o.values())), None)
    agr = next((o for o in outs if len({v for v, _ in o.values()}) > bound), None)
    if bad_phase:
        phases = bad_phase[0]
    elif exhaustive:
        phases = check_layer_phases_all(run.exploration.machine, inst)
    else:
        phases = Verdict("layer_phases", inst, True)
    verdicts = [
        Verdict("termination", inst, term is None, term, "every participant returns by layer p"),
        Verdict("validity", inst, val is None, val, "outputs are participants' inputs"),
        Verdict("agreement", inst, agr is None, agr, f"at most {bound} distinct outputs"),
        Verdict("idseen_invariant", inst, not bad_writes, bad_writes[0] if bad_writes else None,
                "C1 writes at layer j carry at least j ids"),
        phases,
    ]
    return AlgoResult(verdicts, outs, run.histories, run.states)


# ---------------------------------------------------------------------------
# test-and-set
# ---------------------------------------------------------------------------


def _tst_round(pid: int, r: int, n: int, m: int, k: int, ns: tuple):
    w = ns + ("W", r)
    if any(x is not None for x in (yield Snapshot(w))):
        return "LOSE"
    x, layer = yield from cumulative_program(pid, n, m, k, ns + ("R", r))
    yield Write(w, x)
    seen = yield Snapshot(w)
    if layer == 1:
        return "WIN"
    if pid not in seen:
        return "LOSE"
    return None


def tst_program(pid: int, n: int, m: int = 2, k: int = 1, ns: tuple = ()):
    """Round-based test-and-set; returns ``"WIN"`` or ``"LOSE"``.

    Each round: leave with LOSE if someone already posted an id for this
    round; otherwise run cumulative set consensus on fresh variables, post
    the id obtained and snapshot.  Returning at the first layer means
    everyone else obtains this process's id, so it wins.  A process that
    does not see its own id posted loses; the rest retry.
    """
    for r in range(1, n + 2):
        verdict = yield from _tst_round(pid, r, n, m, k, ns)
        if verdict is not None:
            return verdict
    raise RuntimeError(f"process {pid} exceeded {n + 1} test-and-set rounds")


def test_and_set(participants: Iterable[int], policy: Any, m: int = 2, k: int = 1,
                 n: int | None = None, *, keep_histories: bool = True) -> AlgoResult:
    """Run test-and-set and check single-winner and linearizability.

    Under ``Exhaustive`` the reduced explorer records, per process, which
    processes had already finished when it started.  A loser finishing
    before the winner starts shows up in that record, so the check on the
    final states covers every interleaving.
    """
    parts = sorted(participants)
    if not parts:
        raise ValueError("need at least one participant")
    n = n if n is not None else max(parts) + 1
    threads = _threads(lambda q: tst_program(q, n, m, k), parts)
    inst = f"p={len(parts)},m={m},k={k}"
    lin_bad: list = []

    def per_history(h: ExecutionHistory) -> None:
        if not lin_bad and len([o for o in h.outputs.values() if o == "WIN"]) == 1:
            if not check_tst_linearizable(h).passed:
                lin_bad.append(h.to_json())

    run = _run(threads, n, policy, reach=layered_reach, track_precedence=True, per_history=per_history,
               keep_histories=keep_histories, label="tst")
    if run.exploration is not None and not lin_bad:
        ex = run.exploration
        for st in ex.finals:
            out = ex.machine.outputs(st)
            started_after = dict(zip(ex.machine.pids, st[2]))
            winners = [p for p, o in out.items() if o == "WIN"]
            if len(winners) == 1 and any(q in started_after[winners[0]] for q in out if q != winners[0]):
                lin_bad.append(ex.witness(st, "tst").to_json())
                break
    one = next((o for o in run.outputs
                if list(o.values()).count("WIN") != 1 or set(o) != set(parts)
                or any(v not in ("WIN", "LOSE") for v in o.values())), None)
    verdicts = [
        Verdict("tst_single_winner", inst, one is None, one, "exactly one WIN, everyone else LOSE"),
        Verdict("tst_linearizable", inst, not lin_bad, lin_bad[0] if lin_bad else None,
                "no loser finishes before the winner starts"),
    ]
    return AlgoResult(verdicts, run.outputs, run.histories, run.states)


# ---------------------------------------------------------------------------
# renaming
# ---------------------------------------------------------------------------


class RangeViolation(RuntimeError):
    """A renaming run produced a name outside its promised range."""

    def __init__(self, msg: str, history: ExecutionHistory | None = None):
        super().__init__(msg)
        self.history = history


def _free_names(forbidden: frozenset, taken: Iterable[int], count: int) -> list[int]:
    taken = set(taken) | set(forbidden)
    out = []
    x = 1
    while len(out) < count:
        if x not in taken:
            out.append(x)
        x += 1
    return out


def _rename_try(pid: int, proposal: int | None, forbidden: frozenset, reg: tuple):
    yield Write(reg, (pid, proposal))
    snap = [c for c in (yield Snapshot(reg)) if c is not None]
    others = {prop for q, prop in snap if q != pid and prop is not None}
    if proposal is not None and proposal not in others:
        return True, proposal
    rank = sorted(q for q, _ in snap).index(pid) + 1
    return False, _free_names(forbidden, others, rank)[-1]


def rename_program(pid: int, forbidden: frozenset = frozenset(), ns: tuple = ()):
    """Snapshot-and-propose adaptive renaming.

    A process posts ``(pid, proposal)``, snapshots, and keeps its proposal if
    nobody else holds the same one; otherwise it proposes the ``r``-th name
    that is neither forbidden nor proposed by someone else, ``r`` being its
    rank among the contenders it saw.
    """
    proposal = None
    while True:
        done, proposal = yield from _rename_try(pid, proposal, forbidden, ns + ("AR",))
        if done:
            return proposal


def adaptive_rename(participants: Iterable[int], policy: Any, forbidden: Iterable[int] = (),
                    n: int | None = None, *, keep_histories: bool = True) -> AlgoResult:
    """Adaptive renaming; names must be distinct and among the first ``2p-1`` non-forbidden names."""
    parts = sorted(participants)
    if not parts:
        raise ValueError("need at least one participant")
    forb = frozenset(forbidden)
    n = n if n is not None else max(parts) + 1
    p = len(parts)
    allowed = set(_free_names(forb, (), 2 * p - 1))
    threads = _threads(lambda q: rename_program(q, forb), parts)
    run = _run(threads, n, policy, keep_histories=keep_histories, label="rename")
    bad = next((o for o in run.outputs
                if set(o) != set(parts) or len(set(o.values())) != p or not set(o.values()) <= allowed), None)
    inst = f"p={p},forbidden={sorted(forb)}"
    return AlgoResult([Verdict("adaptive_rename", inst, bad is None, bad,
                               f"distinct names within {sorted(allowed)}")], run.outputs, run.histories, run.states)


def tight_rename_program(pid: int, n: int, m: int = 2, k: int = 1, ns: tuple = ()):
    """Name ladder: win the test-and-set for name ``i`` or move on to ``i + 1``."""
    i = 0
    while True:
        i += 1
        if (yield from tst_program(pid, n, m, k, ns + ("T", i))) == "WIN":
            return i


def narrowing_rename_program(pid: int, n: int, m: int = 2, k: int = 1, ns: tuple = ()):
    """Narrow with cumulative set consensus, then rename the selected processes.

    Each round the still-unnamed processes run cumulative set consensus; the
    ones whose id came back to them are selected and run adaptive renaming
    with the names already claimed forbidden.  The others retry.
    """
    r = 0
    while True:
        r += 1
        if r > n + 1:
            raise RuntimeError(f"process {pid} exceeded {n + 1} narrowing rounds")
        rns = ns + ("N", r)
        x, _ = yield from cumulative_program(pid, n, m, k, rns + ("CSC",))
        yield Write(rns + ("OUT",), x)
        outs = yield Snapshot(rns + ("OUT",))
        if pid in outs:
            claimed = frozenset(c for c in (yield Snapshot(ns + ("NAME",))) if c is not None)
            name = yield from rename_program(pid, claimed, rns)
            yield Write(ns + ("NAME",), name)
            return name


def tight_rename(participants: Iterable[int], policy: Any, m: int = 2, k: int = 1,
                 n: int | None = None, *, strategy: str = "ladder",
                 keep_histories: bool = True) -> AlgoResult:
    """Tight renaming: ``p`` participants get distinct names in ``1..p``.

    ``strategy="ladder"`` (default) climbs a ladder of test-and-set objects.
    ``strategy="narrow"`` runs the narrowing scheme, whose range guarantee
    fails under some interleavings.  A violation is reported in the verdict
    with a witness history; under ``Fixed`` it raises :class:`RangeViolation`.
    """
    parts = sorted(participants)
    if not parts:
        raise ValueError("need at least one participant")
    n = n if n is not None else max(parts) + 1
    prog = {"ladder": tight_rename_program, "narrow": narrowing_rename_program}.get(strategy)
    if prog is None:
        raise ValueError(f"unknown strategy {strategy!r}")
    p = len(parts)
    target = set(range(1, p + 1))

    def bad(o: Mapping) -> bool:
        return set(o) != set(parts) or len(set(o.values())) != p or not set(o.values()) <= target

    witness: list = []

    def per_history(h: ExecutionHistory) -> None:
        if not witness and bad(h.outputs):
            witness.append(h)

    threads = _threads(lambda q: prog(q, n, m, k), parts)
    reach = layered_reach if strategy == "ladder" else None
    exhaustive = isinstance(policy, Exhaustive)
    run = _run(threads, n, policy, reach=reach, per_history=None if exhaustive else per_history,
               keep_histories=keep_histories, label="rename")
    if exhaustive and not witness:
        ex = run.exploration
        st = next((st for st in ex.finals if bad(ex.machine.outputs(st))), None)
        if st is not None:
            witness.append(ex.witness(st, "rename"))
    if witness and isinstance(policy, Fixed):
        raise RangeViolation(f"names {witness[0].outputs} leave 1..{p}", witness[0])
    inst = f"p={p},strategy={strategy}"
    v = Verdict("tight_rename", inst, not witness,
                {"outputs": witness[0].outputs, "history": witness[0].to_json()} if witness else None,
                f"distinct names in 1..{p}")
    return AlgoResult([v], run.outputs, run.histories, run.states)


# ---------------------------------------------------------------------------
# safe agreement
# ---------------------------------------------------------------------------


def sa_program(pid: int, value: Any, ns: tuple = ()):
    """Two-level safe agreement with posted outputs; returns a value or ``None`` (bottom)."""
    cell = ns + ("SA",)
    out = ns + ("SAOUT",)
    yield Write(cell, (value, 1))
    snap = yield Snapshot(cell)
    level = 0 if any(c is not None and c[1] == 2 for c in snap) else 2
    yield Write(cell, (value, level))
    posted = [d[1] for d in (yield Snapshot(out)) if d is not None and d[1] is not BOTTOM]
    if posted:
        decision = posted[0]
    else:
        snap = yield Snapshot(cell)
        if any(c is not None and c[1] == 1 for c in snap):
            decision = BOTTOM
        else:
            decision = next(c[0] for c in snap if c is not None and c[1] == 2)
    yield Write(out, ("posted", decision))
    return decision


def sa_run(proposals: Mapping[int, Any], policy: Any = Exhaustive(), n: int | None = None, *,
           keep_histories: bool = False) -> AlgoResult:
    """Run safe agreement and check its three properties plus the blocking contract.

    Blocking contract: whenever a process settles on bottom, some participant
    has entered the module and not yet posted.
    """
    if not proposals:
        raise ValueError("need at least one participant")
    parts = sorted(proposals)
    n = n if n is not None else max(parts) + 1
    threads = _threads(lambda q: sa_program(q, proposals[q]), parts)
    unblocked: list = []

    def hook(machine: Machine, state, pid, op, res, nxt):
        if (isinstance(op, Snapshot) and op.name == ("SA",) and res[pid][1] != 1
                and any(c is not None and c[1] == 1 for c in res)):
            # pid is about to settle on bottom: someone must be mid-module
            mem = state[0]
            inside = []
            for q in parts:
                s_in = machine.slots.get((q, ("SA",)))
                s_out = machine.slots.get((q, ("SAOUT",)))
                entered = s_in is not None and Machine._get(mem, s_in) is not None
                posted = s_out is not None and Machine._get(mem, s_out) is not None
                if entered and not posted and q != pid:
                    inside.append(q)
            if not inside and not unblocked:
                unblocked.append(machine.outputs(state))

    def per_history(h: ExecutionHistory) -> None:
        inside: set = set()
        for e in h.events:
            pl = e.payload or {}
            if e.a == "write" and tuple(pl["cell"][1]) == ("SA",):
                inside.add(e.p)
            elif e.a == "write" and tuple(pl["cell"][1]) == ("SAOUT",):
                inside.discard(e.p)
            elif (e.a == "read" and pl.get("snapshot") in (("SA",), ["SA"]) and pl["value"][e.p][1] != 1
                  and any(c is not None and c[1] == 1 for c in pl["value"])):
                if not (inside - {e.p}) and not unblocked:
                    unblocked.append(h.outputs)

    exhaustive = isinstance(policy, Exhaustive)
    run = _run(threads, n, policy, on_transition=hook if exhaustive else None,
               per_history=None if exhaustive else per_history, keep_histories=keep_histories, label="sa")
    outs, hist, states = run.outputs, run.histories, run.states
    vals = set(proposals.values())
    inst = f"participants={len(parts)}"
    p1 = next((o for o in outs if any(v is not BOTTOM and v not in vals for v in o.values())), None)
    p2 = next((o for o in outs if set(o) == set(parts) and all(v is BOTTOM for v in o.values())), None)
    p3 = next((o for o in outs if len({v for v in o.values() if v is not BOTTOM}) > 1), None)
    verdicts = [
        Verdict("sa_validity", inst, p1 is None, p1, "outputs are bottom or a proposal"),
        Verdict("sa_nontrivial", inst, p2 is None, p2, "not everyone outputs bottom"),
        Verdict("sa_agreement", inst, p3 is None, p3, "non-bottom outputs agree"),
        Verdict("sa_blocking_witness", inst, not unblocked, unblocked[0] if unblocked else None,
                "bottom only while someone is inside the module"),
    ]
    return AlgoResult(verdicts, outs, hist, states)


# ---------------------------------------------------------------------------
# footprints for the reduced explorer
# ---------------------------------------------------------------------------


def _coordinates(name: tuple) -> tuple[int, int, str, int]:
    """``(rung, round, kind, layer)`` of a test-and-set / cumulative variable."""
    rung = rnd = 0
    kind, layer = "L", 0
    i = 0
    while i < len(name):
        tag = name[i]
        if tag == "T":
            rung = name[i + 1]
        elif tag == "R":
            rnd = name[i + 1]
        elif tag == "W":
            rnd, kind = name[i + 1], "W"
        elif tag in ("C1", "C2", "MK"):
            layer = name[i + 1]
        i += 1
    return rung, rnd, kind, layer


def layered_reach(op: Any, name: Hashable) -> bool:
    """Conservative future footprint for ladder / test-and-set / cumulative programs.

    Those programs move monotonically through rungs, rounds and layers; inside
    a round the round's ``W`` array is touched at both ends.
    """
    p_rung, p_round, p_kind, p_layer = _coordinates(op.obj if isinstance(op, Invoke) else op.name)
    t_rung, t_round, t_kind, t_layer = _coordinates(name)
    if t_rung != p_rung:
        return t_rung > p_rung
    if t_round != p_round:
        return t_round > p_round
    if t_kind == "W" or p_kind == "W":
        return True
    return t_layer >= p_layer
