"""Deterministic shared-memory executor.

Process programs are generator functions.  Each ``yield`` hands the executor
one operation (a register read or write, an atomic snapshot of a register
row, or an invocation of a soft-wired ``(m,k)``-set-consensus object) and
receives its result; the generator's return value is the process output.
One yielded operation is one scheduler step.

Programs must be deterministic: given the results they have received, the
next operation is fixed.  The executor exploits this by interning each
process's local state as the sequence of results it has seen, so programs
can be replayed instead of copied.  Two exploration modes exist:

* :func:`run_protocol` with :class:`Exhaustive` walks the full tree of
  interleavings and returns one history per interleaving;
* :func:`explore` merges identical global states, visits every reachable
  state and transition once, and keeps one witness history per reachable
  final state.  Everything that depends only on the final state (outputs,
  every process's own event sequence, and with ``track_precedence`` the
  real-time order of operations) is thereby checked for all interleavings.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Generator, Hashable, Iterable, Iterator, Mapping, Sequence

__all__ = [
    "Read",
    "Write",
    "Snapshot",
    "Invoke",
    "SingleWriterViolation",
    "SoftWiringViolation",
    "ExplorationLimit",
    "Event",
    "ExecutionHistory",
    "Exhaustive",
    "RandomPolicy",
    "Fixed",
    "Machine",
    "run_protocol",
    "iter_histories",
    "explore",
    "Exploration",
    "mk_resolve",
    "mk_invoke",
    "MKObject",
    "check_register_atomicity",
    "check_well_nested",
    "check_tst_linearizable",
    "interleaving_count",
]


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Read:
    owner: int
    name: Hashable


@dataclass(frozen=True)
class Write:
    name: Hashable
    value: Any
    owner: int | None = None  # set to assert the target cell; must be the writer


@dataclass(frozen=True)
class Snapshot:
    """Atomically read the cells ``(q, name)`` of every process ``q``."""

    name: Hashable


@dataclass(frozen=True)
class Invoke:
    obj: Hashable
    proposal: Any
    m: int
    k: int


Program = Callable[[], Generator[Any, Any, Any]]


class SingleWriterViolation(RuntimeError):
    pass


class SoftWiringViolation(RuntimeError):
    pass


class ExplorationLimit(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# (m,k)-set consensus objects
# ---------------------------------------------------------------------------


def mk_resolve(log: Sequence[tuple], proposal: Any, k: int) -> Any:
    """Response for a new invocation given the earlier ``(pid, proposal, response)`` log.

    The first ``k`` distinct proposals in arrival order form the pool.  An
    invoker whose proposal made the pool gets it back; anyone else gets the
    most recently admitted pool value.
    """
    pool: list = []
    for _, prop, _ in log:
        if prop not in pool and len(pool) < k:
            pool.append(prop)
    if proposal in pool:
        return proposal
    if len(pool) < k:
        return proposal
    return pool[-1]


@dataclass
class MKObject:
    """A standalone one-shot ``(m,k)``-set-consensus object (outside the executor)."""

    m: int
    k: int
    log: list = field(default_factory=list)

    def __post_init__(self):
        if not 1 <= self.k <= self.m:
            raise ValueError("need 1 <= k <= m")

    @property
    def invokers(self) -> list[int]:
        return [p for p, _, _ in self.log]

    @property
    def responses(self) -> set:
        return {r for _, _, r in self.log}


def mk_invoke(o: MKObject, p: int, proposal: Any) -> Any:
    if p in o.invokers:
        raise SoftWiringViolation(f"process {p} invoked a one-shot object twice")
    if len(o.log) >= o.m:
        raise SoftWiringViolation(f"process {p} would be invoker number {len(o.log) + 1} of an "
                                  f"object bounded to {o.m}")
    resp = mk_resolve(o.log, proposal, o.k)
    o.log.append((p, proposal, resp))
    return resp


# ---------------------------------------------------------------------------
# histories
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Event:
    t: int
    p: int
    a: str
    payload: Any = None

    def to_json(self) -> dict:
        from .export import to_jsonable

        return {"t": self.t, "p": self.p, "a": self.a, "payload": to_jsonable(self.payload)}


@dataclass
class ExecutionHistory:
    events: list
    outputs: dict
    schedule: tuple = ()
    label: str = ""

    def to_json(self) -> dict:
        return {"events": [e.to_json() for e in self.events]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"), sort_keys=True)

    def by_process(self) -> dict[int, list[Event]]:
        out: dict[int, list[Event]] = {}
        for e in self.events:
            out.setdefault(e.p, []).append(e)
        return out

    def interval(self, p: int) -> tuple[int, int | None]:
        """First and last step of ``p`` (last is ``None`` if it never decided)."""
        evs = [e for e in self.events if e.p == p]
        end = next((e.t for e in evs if e.a == "decide"), None)
        return evs[0].t, end

    @classmethod
    def from_json(cls, data: dict | str) -> "ExecutionHistory":
        if isinstance(data, str):
            data = json.loads(data)
        events = [Event(e["t"], e["p"], e["a"], e.get("payload")) for e in data["events"]]
        outputs = {e.p: (e.payload or {}).get("value") for e in events if e.a == "decide"}
        return cls(events, outputs, schedule_from_events(events))


def schedule_from_events(events: Iterable[Event]) -> tuple:
    """The step order (one pid per scheduler step) recorded in ``events``."""
    steps: dict[int, int] = {}
    for e in events:
        if e.t > 0 and e.a in ("read", "write", "invoke") and (e.payload or {}).get("op") is None:
            steps.setdefault(e.t, e.p)
    return tuple(steps[t] for t in sorted(steps))


# ---------------------------------------------------------------------------
# policies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exhaustive:
    max_steps: int = 10_000


@dataclass(frozen=True)
class RandomPolicy:
    seed: int = 0
    trials: int = 10_000


@dataclass(frozen=True)
class Fixed:
    steps: tuple

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))


# ---------------------------------------------------------------------------
# machine
# ---------------------------------------------------------------------------

_DONE = object()


def _freeze_value(x: Any) -> Any:
    if isinstance(x, list):
        return ("list", tuple(_freeze_value(i) for i in x))
    if isinstance(x, set):
        return frozenset(x)
    if isinstance(x, dict):
        return ("dict", tuple(sorted(((k, _freeze_value(v)) for k, v in x.items()), key=repr)))
    return x


def _frame_key(gen: Any) -> tuple:
    """Position and local variables of a suspended generator chain."""
    parts = []
    while gen is not None:
        frame = gen.gi_frame
        loc = tuple(sorted((k, _freeze_value(v)) for k, v in frame.f_locals.items()
                           if not hasattr(v, "gi_frame")))
        parts.append((gen.gi_code, frame.f_lasti, loc))
        gen = gen.gi_yieldfrom
    return tuple(parts)


class Machine:
    """Interned program states plus the transition function.

    A global state is ``(mem, locals)`` where ``mem`` is a tuple of slot
    values (slots are allocated on first use) and ``locals`` holds one
    interned local-state id per process.  With ``merge_locals`` two local
    states are identified when their generator frames (code position and
    variables) coincide, which discards result history that can no longer
    influence the process.
    """

    def __init__(self, threads: Mapping[int, Program], n: int | None = None,
                 labels: Mapping[int, str] | None = None, merge_locals: bool = False):
        self.threads = dict(threads)
        self.merge_locals = merge_locals
        self._lkey: dict = {}
        self.pids = tuple(sorted(self.threads))
        self.n = n if n is not None else (max(self.pids) + 1 if self.pids else 0)
        self.labels = dict(labels or {})
        self.slots: dict[Hashable, int] = {}
        # local state id -> (pid, parent id, result that led here)
        self._lparent: list[tuple] = []
        self._lnext: list[Any] = []   # next op, or (_DONE, output)
        self._lsucc: dict[tuple, int] = {}
        self._lroot: dict[int, int] = {}
        for p in self.pids:
            self._lroot[p] = self._new_local(p, None, None)

    # -- local states ------------------------------------------------------

    def _results(self, lid: int) -> list:
        out = []
        while True:
            pid, parent, res = self._lparent[lid]
            if parent is None:
                break
            out.append(res)
            lid = parent
        return out[::-1]

    def _new_local(self, pid: int, parent: int | None, result: Any) -> int:
        results = [] if parent is None else self._results(parent) + [result]
        gen = self.threads[pid]()
        try:
            op = next(gen)
            for r in results:
                op = gen.send(r)
            nxt = op
            key = (pid, _frame_key(gen)) if self.merge_locals else None
        except StopIteration as stop:
            nxt = (_DONE, stop.value)
            key = (pid, "done", _freeze_value(stop.value)) if self.merge_locals else None
        if key is not None:
            hit = self._lkey.get(key)
            if hit is not None:
                return hit
        lid = len(self._lparent)
        self._lparent.append((pid, parent, result))
        self._lnext.append(nxt)
        if key is not None:
            self._lkey[key] = lid
        return lid

    def advance(self, lid: int, result: Any) -> int:
        key = (lid, result)
        hit = self._lsucc.get(key)
        if hit is None:
            pid = self._lparent[lid][0]
            hit = self._new_local(pid, lid, result)
            self._lsucc[key] = hit
        return hit

    def next_op(self, lid: int) -> Any:
        return self._lnext[lid]

    def is_done(self, lid: int) -> bool:
        nxt = self._lnext[lid]
        return isinstance(nxt, tuple) and len(nxt) == 2 and nxt[0] is _DONE

    def output(self, lid: int) -> Any:
        return self._lnext[lid][1]

    def trace(self, lid: int) -> list[tuple]:
        """The ``(op, result)`` pairs a local state has been through."""
        chain = []
        while True:
            pid, parent, res = self._lparent[lid]
            if parent is None:
                break
            chain.append((self._lnext[parent], res))
            lid = parent
        return chain[::-1]

    # -- global states -----------------------------------------------------

    def initial(self) -> tuple:
        return ((), tuple(self._lroot[p] for p in self.pids))

    def enabled(self, state: tuple) -> list[int]:
        locs = state[1]
        return [p for p, lid in zip(self.pids, locs) if not self.is_done(lid)]

    def outputs(self, state: tuple) -> dict[int, Any]:
        locs = state[1]
        return {p: self.output(lid) for p, lid in zip(self.pids, locs) if self.is_done(lid)}

    def _slot(self, key: Hashable) -> int:
        s = self.slots.get(key)
        if s is None:
            s = self.slots[key] = len(self.slots)
        return s

    @staticmethod
    def _get(mem: tuple, s: int) -> Any:
        return mem[s] if s < len(mem) else None

    @staticmethod
    def _set(mem: tuple, s: int, value: Any) -> tuple:
        if s >= len(mem):
            mem = mem + (None,) * (s + 1 - len(mem))
        return mem[:s] + (value,) + mem[s + 1:]

    def apply(self, mem: tuple, pid: int, op: Any) -> tuple[tuple, Any]:
        if isinstance(op, Read):
            return mem, self._get(mem, self._slot((op.owner, op.name)))
        if isinstance(op, Write):
            if op.owner is not None and op.owner != pid:
                raise SingleWriterViolation(f"process {pid} tried to write cell {op.name!r} owned by {op.owner}")
            return self._set(mem, self._slot((pid, op.name)), op.value), None
        if isinstance(op, Snapshot):
            return mem, tuple(self._get(mem, self._slot((q, op.name))) for q in range(self.n))
        if isinstance(op, Invoke):
            s = self._slot(("object", op.obj))
            log = self._get(mem, s) or ()
            if any(p == pid for p, _, _ in log):
                raise SoftWiringViolation(f"process {pid} invoked one-shot object {op.obj!r} twice")
            if len(log) >= op.m:
                raise SoftWiringViolation(f"process {pid} is invoker {len(log) + 1} of object {op.obj!r} "
                                          f"bounded to {op.m} invokers")
            resp = mk_resolve(log, op.proposal, op.k)
            return self._set(mem, s, log + ((pid, op.proposal, resp),)), resp
        raise TypeError(f"process {pid} yielded {op!r}, which is not an operation")

    def step(self, state: tuple, pid: int) -> tuple[tuple, Any, Any]:
        mem, locs = state
        i = self.pids.index(pid)
        lid = locs[i]
        op = self.next_op(lid)
        try:
            mem2, res = self.apply(mem, pid, op)
        except (SingleWriterViolation, SoftWiringViolation) as exc:
            raise type(exc)(f"{exc} (step {len(self._results(lid)) + 1} of process {pid})") from None
        locs2 = locs[:i] + (self.advance(lid, res),) + locs[i + 1:]
        return (mem2, locs2), op, res

    # -- histories ---------------------------------------------------------

    def events_for(self, t: int, pid: int, op: Any, res: Any, first: bool,
                   done: bool = False, output: Any = None) -> list[Event]:
        evs = []
        if first:
            evs.append(Event(t, pid, "invoke", {"op": self.labels.get(pid, "program")}))
        if isinstance(op, Read):
            evs.append(Event(t, pid, "read", {"cell": [op.owner, op.name], "value": res}))
        elif isinstance(op, Write):
            evs.append(Event(t, pid, "write", {"cell": [pid, op.name], "value": op.value}))
        elif isinstance(op, Snapshot):
            evs.append(Event(t, pid, "read", {"snapshot": op.name, "value": res}))
        elif isinstance(op, Invoke):
            evs.append(Event(t, pid, "invoke", {"object": op.obj, "proposal": op.proposal}))
            evs.append(Event(t, pid, "respond", {"object": op.obj, "value": res}))
        if done:
            evs.append(Event(t, pid, "decide", {"value": output}))
        return evs

    def run_live(self, choose: Callable[[list[int], int], int | None], label: str = "",
                 record: bool = True, limit: int = 1_000_000) -> ExecutionHistory:
        """Drive fresh generators, asking ``choose(enabled, t)`` for every step.

        ``choose`` may return ``None`` to stop early (partial history).
        """
        gens: dict[int, Any] = {}
        pending: dict[int, Any] = {}
        outputs: dict[int, Any] = {}
        events: list[Event] = []
        for p in self.pids:
            g = self.threads[p]()
            gens[p] = g
            try:
                pending[p] = next(g)
            except StopIteration as stop:
                outputs[p] = stop.value
                if record:
                    events.extend(self.events_for(0, p, None, None, True, True, stop.value))
        mem: tuple = ()
        steps: list[int] = []
        started: set = set()
        t = 0
        while pending:
            en = sorted(pending)
            pid = choose(en, t)
            if pid is None:
                break
            if pid not in pending:
                raise ValueError(f"step {t + 1}: process {pid} is not enabled")
            t += 1
            if t > limit:
                raise ExplorationLimit(f"a run exceeded {limit} steps")
            op = pending[pid]
            try:
                mem, res = self.apply(mem, pid, op)
            except (SingleWriterViolation, SoftWiringViolation) as exc:
                raise type(exc)(f"{exc} (scheduler step {t})") from None
            try:
                pending[pid] = gens[pid].send(res)
                done, out = False, None
            except StopIteration as stop:
                del pending[pid]
                outputs[pid] = out = stop.value
                done = True
            if record:
                events.extend(self.events_for(t, pid, op, res, pid not in started, done, out))
            started.add(pid)
            steps.append(pid)
        return ExecutionHistory(events, outputs, tuple(steps), label)

    def replay(self, steps: Sequence[int], label: str = "") -> ExecutionHistory:
        """The history produced by the given step order."""
        steps = list(steps)

        def choose(en: list[int], t: int) -> int | None:
            return steps[t] if t < len(steps) else None

        return self.run_live(choose, label)


def iter_histories(threads: Mapping[int, Program], policy: Any, n: int | None = None,
                   labels: Mapping[int, str] | None = None, label: str = "",
                   record: bool = True) -> Iterator[ExecutionHistory]:
    """Histories under ``policy``, produced lazily (see :func:`run_protocol`)."""
    machine = Machine(threads, n, labels)
    if isinstance(policy, Fixed):
        yield machine.replay(policy.steps, label)
    elif isinstance(policy, RandomPolicy):
        for trial in range(policy.trials):
            rng = random.Random(policy.seed * 1_000_003 + trial)
            yield machine.run_live(lambda en, t: rng.choice(en), label, record)
    elif isinstance(policy, Exhaustive):
        stack = [(machine.initial(), ())]
        while stack:
            state, path = stack.pop()
            en = machine.enabled(state)
            if not en:
                yield machine.replay(path, label)
                continue
            if len(path) >= policy.max_steps:
                raise ExplorationLimit(f"a run exceeded {policy.max_steps} steps")
            for p in reversed(en):
                nxt, _, _ = machine.step(state, p)
                stack.append((nxt, path + (p,)))
    else:
        raise TypeError(f"unknown policy {policy!r}")


def run_protocol(threads: Mapping[int, Program], policy: Any, n: int | None = None,
                 labels: Mapping[int, str] | None = None, label: str = "") -> list[ExecutionHistory]:
    """Run the programs under ``policy``.

    ``Exhaustive`` returns one history per interleaving (in depth-first
    order, lowest pid first), ``RandomPolicy`` one per trial, ``Fixed``
    exactly one.
    """
    return list(iter_histories(threads, policy, n, labels, label))


# ---------------------------------------------------------------------------
# state-merging exploration
# ---------------------------------------------------------------------------


@dataclass
class Exploration:
    """Result of :func:`explore`.

    States are ``(memory id, locals[, precedence])`` with memory tuples kept
    in ``memories``.
    """

    machine: Machine
    states: int
    transitions: int
    finals: list
    parents: dict = field(repr=False)
    memories: list = field(repr=False, default_factory=list)

    def outputs(self) -> list[dict]:
        return [self.machine.outputs(s) for s in self.finals]

    def path_to(self, state: tuple) -> list[int]:
        path = []
        key = state
        while True:
            parent = self.parents[key]
            if parent is None:
                break
            key, pid = parent
            path.append(pid)
        return path[::-1]

    def witness(self, state: tuple, label: str = "") -> ExecutionHistory:
        """One concrete history ending in ``state``."""
        return self.machine.replay(self.path_to(state), label)

    def witnesses(self, label: str = "") -> Iterable[ExecutionHistory]:
        for s in self.finals:
            yield self.witness(s, label)


def _strip(mem: tuple) -> tuple:
    end = len(mem)
    while end and mem[end - 1] is None:
        end -= 1
    return mem[:end]


def op_target(op: Any) -> Hashable:
    """The shared variable (register array or object) an operation touches."""
    return op.obj if isinstance(op, Invoke) else op.name


def _persistent(machine: Machine, locs: tuple, en: list[int],
                reach: Callable[[Any, Hashable], bool]) -> list[int]:
    """Smallest persistent subset of ``en`` found by closing singletons under
    "some outside process may later touch what a member touches next"."""
    ops = {p: machine.next_op(locs[machine.pids.index(p)]) for p in en}
    best = en
    for start in en:
        members = {start}
        work = [start]
        while work and len(members) < len(best):
            x = work.pop()
            target = op_target(ops[x])
            for q in en:
                if q not in members and reach(ops[q], target):
                    members.add(q)
                    work.append(q)
        if len(members) < len(best):
            best = sorted(members)
            if len(best) == 1:
                break
    return best


def explore(threads: Mapping[int, Program], n: int | None = None, *,
            on_transition: Callable[[Machine, tuple, int, Any, Any, tuple], None] | None = None,
            track_precedence: bool = False, max_states: int = 20_000_000,
            labels: Mapping[int, str] | None = None, merge_locals: bool = True,
            reach: Callable[[Any, Hashable], bool] | None = None) -> Exploration:
    """Visit the reachable global states.

    Without ``reach`` every reachable state and transition is visited once.

    With ``reach`` a persistent-set reduction is applied: ``reach(op, name)``
    must say whether a process whose next operation is ``op`` may, now or
    later, access the variable ``name``; a ``True`` may be conservative but
    a wrong ``False`` is unsound.  The reduction preserves every reachable
    final state (and therefore every outcome), but not every intermediate
    state, so ``on_transition`` hooks only see the explored part.

    With ``track_precedence`` the state also records, for every process,
    which processes had already finished when it took its first step, so
    that real-time order between operations survives merging; reduction is
    then postponed until every process has started.
    """
    machine = Machine(threads, n, labels, merge_locals=merge_locals)
    mem_ids: dict[tuple, int] = {}
    memories: list[tuple] = []

    def intern(mem: tuple) -> int:
        i = mem_ids.get(mem)
        if i is None:
            i = mem_ids[mem] = len(memories)
            memories.append(mem)
        return i

    mem0, locs0 = machine.initial()
    init: tuple = (intern(mem0), locs0)
    if track_precedence:
        init = init + (tuple(None for _ in machine.pids),)
    parents: dict = {init: None}
    stack = [init]
    finals = []
    transitions = 0
    pids = machine.pids
    while stack:
        state = stack.pop()
        core = (memories[state[0]], state[1])
        en = machine.enabled(core)
        if not en:
            finals.append(state)
            continue
        if reach is not None and len(en) > 1:
            if not track_precedence or None not in state[2]:
                en = _persistent(machine, state[1], en, reach)
        for p in en:
            (mem2, locs2), op, res = machine.step(core, p)
            transitions += 1
            if on_transition is not None:
                on_transition(machine, core, p, op, res, (mem2, locs2))
            nxt: tuple = (intern(_strip(mem2)), locs2)
            if track_precedence:
                prec = state[2]
                i = pids.index(p)
                if prec[i] is None:
                    done = frozenset(q for q, lid in zip(pids, state[1]) if machine.is_done(lid))
                    prec = prec[:i] + (done,) + prec[i + 1:]
                nxt = nxt + (prec,)
            if nxt not in parents:
                parents[nxt] = (state, p)
                if len(parents) > max_states:
                    raise ExplorationLimit(f"more than {max_states} states")
                stack.append(nxt)
    return Exploration(machine, len(parents), transitions, finals, parents, memories)


def interleaving_count(lengths: Sequence[int]) -> int:
    """Number of shuffles of independent step sequences (multinomial)."""
    from math import factorial

    total = factorial(sum(lengths))
    for n in lengths:
        total //= factorial(n)
    return total


# ---------------------------------------------------------------------------
# history checkers
# ---------------------------------------------------------------------------


def check_register_atomicity(h: ExecutionHistory, initial: Any = None) -> bool:
    """Every read returns the owner's latest earlier write (or ``initial``)."""
    cells: dict = {}
    for e in h.events:
        pl = e.payload or {}
        if e.a == "write":
            cells[_cell_key(pl["cell"])] = pl["value"]
        elif e.a == "read" and "cell" in pl:
            if cells.get(_cell_key(pl["cell"]), initial) != pl["value"]:
                return False
        elif e.a == "read" and "snapshot" in pl:
            for q, val in enumerate(pl["value"]):
                if cells.get(_cell_key([q, pl["snapshot"]]), initial) != val:
                    return False
    return True


def _cell_key(cell: Sequence) -> tuple:
    owner, name = cell
    return owner, _freeze(name)


def _freeze(x: Any) -> Any:
    if isinstance(x, list):
        return tuple(_freeze(i) for i in x)
    return x


def check_well_nested(h: ExecutionHistory) -> bool:
    """Per process, object responses close the latest open object invocation,
    and the final ``decide`` closes the operation-level ``invoke``."""
    for evs in h.by_process().values():
        stack: list = []
        for e in evs:
            pl = e.payload or {}
            if e.a == "invoke":
                stack.append(pl.get("object", ("op", pl.get("op"))))
            elif e.a == "respond":
                if not stack or stack[-1] != pl.get("object"):
                    return False
                stack.pop()
            elif e.a == "decide":
                if len(stack) != 1 or not isinstance(stack[-1], tuple) or stack[-1][0] != "op":
                    return False
                stack.pop()
        if stack and not (len(stack) == 1 and isinstance(stack[0], tuple)):
            return False
    return True


def check_tst_linearizable(h: ExecutionHistory | None = None, *, intervals: Mapping[int, tuple] | None = None,
                           outputs: Mapping[int, str] | None = None):
    """Test-and-set histories: exactly one WIN, and no loser finishes before the winner starts.

    Pass a history, or ``intervals`` (pid -> (start, end)) with ``outputs``.
    Returns a :class:`~rmklab.affine.Verdict`.
    """
    from .affine import Verdict

    if h is not None:
        outputs = h.outputs
        pids = sorted({e.p for e in h.events})
        intervals = {p: h.interval(p) for p in pids}
        if set(outputs) != set(pids):
            raise ValueError("incomplete history: some participant never decided")
    assert intervals is not None and outputs is not None
    winners = [p for p, o in outputs.items() if o == "WIN"]
    if len(winners) != 1:
        return Verdict("tst_linearizable", "history", False, None, f"{len(winners)} winners")
    w = winners[0]
    w_start = intervals[w][0]
    for p, o in outputs.items():
        if o != "LOSE" and p != w:
            return Verdict("tst_linearizable", "history", False, None, f"process {p} output {o!r}")
        if p != w and intervals[p][1] is not None and intervals[p][1] < w_start:
            return Verdict("tst_linearizable", "history", False, None,
                           f"loser {p} finished before winner {w} started")
    return Verdict("tst_linearizable", "history", True)
