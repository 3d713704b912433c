"""Finite prefixes of iterated immediate-snapshot runs.

A :class:`Schedule` is a list of rounds, each an ordered partition of the
processes active in that round.  Processes never come back once they stop
(crash-style prefixes).  Full-participation schedules of ``q`` rounds are in
bijection with the facets of ``Chr^q``; :func:`schedule_to_facet` and
:func:`facet_to_schedule` implement the two directions.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .topology import Simplex, Vertex, corner, ordered_partitions

__all__ = [
    "Schedule",
    "View",
    "ModelSpec",
    "WaitFree",
    "Resilient",
    "ObstructionFree",
    "Adversary",
    "enumerate_schedules",
    "enumerate_prefix_schedules",
    "schedule_to_facet",
    "facet_to_schedule",
    "view_of",
    "vertex_views",
    "model_contains",
    "rmk_runs",
    "rmk_contains",
]


@dataclass(frozen=True)
class Schedule:
    n: int
    rounds: tuple

    def __post_init__(self):
        rounds = tuple(tuple(frozenset(b) for b in r) for r in self.rounds)
        object.__setattr__(self, "rounds", rounds)
        prev = None
        for i, r in enumerate(rounds):
            seen: set = set()
            for block in r:
                if not block:
                    raise ValueError(f"round {i + 1}: empty block")
                if seen & block:
                    raise ValueError(f"round {i + 1}: blocks overlap")
                if any(not (0 <= p < self.n) for p in block):
                    raise ValueError(f"round {i + 1}: process outside 0..{self.n - 1}")
                seen |= block
            if not seen:
                raise ValueError(f"round {i + 1}: nobody is active")
            if prev is not None and not seen <= prev:
                raise ValueError(f"round {i + 1}: a process came back after leaving")
            prev = seen

    @property
    def q(self) -> int:
        return len(self.rounds)

    def active(self, r: int) -> frozenset:
        """Processes active in round ``r`` (1-based)."""
        return frozenset().union(*self.rounds[r - 1])

    @property
    def participants(self) -> frozenset:
        return self.active(1) if self.rounds else frozenset()

    @property
    def fast(self) -> frozenset:
        """Processes active in the final round (finite stand-in for live)."""
        return self.active(self.q) if self.rounds else frozenset()

    def chunks(self, size: int) -> list["Schedule"]:
        return [Schedule(self.n, self.rounds[i:i + size]) for i in range(0, self.q, size)]

    def to_json(self) -> dict:
        return {"n": self.n, "rounds": [[sorted(b) for b in r] for r in self.rounds]}

    @classmethod
    def from_json(cls, data: dict | str) -> "Schedule":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["n"], tuple(tuple(frozenset(b) for b in r) for r in data["rounds"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


@dataclass(frozen=True)
class View:
    """What ``owner`` knows after each round it took part in.

    ``per_round`` holds the colors seen in each round; ``vertices`` holds the
    full-information state (a subdivision vertex) after each round, which is
    what a protocol maps to outputs.
    """

    owner: int
    per_round: tuple
    vertices: tuple

    @property
    def final(self) -> Vertex:
        return self.vertices[-1]


def _run_states(s: Schedule) -> list[dict[int, Vertex]]:
    state = {p: corner(p) for p in s.participants}
    out = []
    for r in s.rounds:
        seen: frozenset = frozenset()
        nxt = {}
        for block in r:
            seen = seen | frozenset(state[p] for p in block)
            for p in block:
                nxt[p] = Vertex(p, seen)
        state = nxt
        out.append(state)
    return out


def vertex_views(s: Schedule) -> list[dict[int, Vertex]]:
    """Per round, the full-information vertex of every active process."""
    return _run_states(s)


def view_of(s: Schedule, p: int) -> View:
    if p not in s.participants:
        raise ValueError(f"process {p} is not active in round 1")
    states = [st[p] for st in _run_states(s) if p in st]
    return View(p, tuple(v.seen_colors() for v in states), tuple(states))


def schedule_to_facet(s: Schedule) -> Simplex:
    """The simplex of final-round vertices of ``s``.

    For a full-participation schedule this is a facet of ``Chr^q`` of the
    face spanned by the participants.
    """
    if not s.rounds:
        return Simplex(corner(p) for p in range(s.n))
    return Simplex(_run_states(s)[-1].values())


def facet_to_schedule(f: Iterable[Vertex], n: int | None = None) -> Schedule:
    f = list(f)
    if not f:
        raise ValueError("empty simplex")
    depths = {v.depth for v in f}
    if len(depths) != 1:
        raise ValueError("vertices of mixed depth do not come from one run")
    q = depths.pop()
    colors = frozenset(v.color for v in f)
    if n is None:
        n = max(max(v.carrier) for v in f) + 1
    rounds = []
    level = f
    for _ in range(q):
        by_view: dict[frozenset, list[Vertex]] = {}
        for v in level:
            by_view.setdefault(v.seen_colors(), []).append(v)
        views = sorted(by_view, key=len)
        blocks = []
        prev: frozenset = frozenset()
        for view in views:
            if not prev < view:
                raise ValueError("views are not nested")
            block = frozenset(v.color for v in by_view[view])
            if block != view - prev:
                raise ValueError("views do not form an immediate snapshot")
            blocks.append(block)
            prev = view
        if prev != colors:
            raise ValueError("not a full-participation facet: someone saw a departed process")
        rounds.append(tuple(blocks))
        below = {}
        for v in level:
            for u in v.view:
                if below.setdefault(u.color, u) != u:
                    raise ValueError("two different vertices of one color in a view")
        level = list(below.values())
    if {v.depth for v in level} != {0}:
        raise ValueError("facet does not bottom out at the base corners")
    return Schedule(n, tuple(rounds[::-1]))


def enumerate_schedules(n: int, q: int, participation: Iterable[int] | None = None) -> Iterator[Schedule]:
    """All ``q``-round schedules in which ``participation`` is active every round."""
    part = tuple(sorted(range(n) if participation is None else participation))
    if not part:
        raise ValueError("participation must be nonempty")
    if q < 1:
        raise ValueError("need at least one round")
    one_round = list(ordered_partitions(part))
    for rounds in itertools.product(one_round, repeat=q):
        yield Schedule(n, rounds)


def enumerate_prefix_schedules(n: int, q: int) -> Iterator[Schedule]:
    """All ``q``-round schedules, including ones where processes stop early."""
    def chains(active: tuple, left: int):
        if left == 0:
            yield ()
            return
        for size in range(1, len(active) + 1):
            for sub in itertools.combinations(active, size):
                for rest in chains(sub, left - 1):
                    yield (sub,) + rest
    for start in range(1, n + 1):
        for first in itertools.combinations(range(n), start):
            for chain in chains(first, q - 1):
                actives = (first,) + chain
                for rounds in itertools.product(*(list(ordered_partitions(a)) for a in actives)):
                    yield Schedule(n, rounds)


@dataclass(frozen=True)
class ModelSpec:
    """A sub-IIS model, judged on finite prefixes.

    ``participating`` means active in round 1 and ``fast`` means active in
    the final round.
    """

    kind: str
    t: int | None = None
    k: int | None = None
    adversary: frozenset | None = None

    def contains(self, s: Schedule) -> bool:
        return model_contains(self, s)


def WaitFree() -> ModelSpec:
    return ModelSpec("wait-free")


def Resilient(t: int) -> ModelSpec:
    if t < 0:
        raise ValueError("t must be non-negative")
    return ModelSpec("resilient", t=t)


def ObstructionFree(k: int) -> ModelSpec:
    if k < 0:
        raise ValueError("k must be non-negative")
    return ModelSpec("obstruction-free", k=k)


def Adversary(sets: Iterable[Iterable[int]]) -> ModelSpec:
    return ModelSpec("adversary", adversary=frozenset(frozenset(a) for a in sets))


def model_contains(model: ModelSpec, s: Schedule) -> bool:
    if model.kind == "wait-free":
        return True
    if model.kind == "resilient":
        return all(len(s.active(r)) >= s.n - model.t for r in range(1, s.q + 1))
    if model.kind == "obstruction-free":
        return len(s.fast) <= model.k
    if model.kind == "adversary":
        slow = frozenset(range(s.n)) - s.fast
        return slow in model.adversary
    raise ValueError(f"unknown model kind {model.kind!r}")


def rmk_runs(m: int, k: int, participation: Iterable[int] | None = None) -> list[Schedule]:
    """Two-round schedules that land in C(m,m,k): one chunk of the restricted model.

    With ``participation`` given, the runs of the face it spans are returned
    instead (the schedules landing in ``delta(participation)``).
    """
    from .affine import build_c_mmk

    if m > 3:
        raise ValueError("rmk_runs is capped at m <= 3 (tractability bound)")
    task = build_c_mmk(m, k)
    if participation is None:
        facets = task.complex.sorted_facets()
    else:
        part = frozenset(participation)
        facets = [f for f in task.delta(part).sorted_facets() if f.colors == part]
    return [facet_to_schedule(f, m) for f in facets]


def rmk_contains(m: int, k: int, s: Schedule) -> bool:
    """Chunk-wise membership: every consecutive two-round block lands in C(m,m,k)."""
    if s.q % 2:
        return False
    allowed = {sch for sch in rmk_runs(m, k, s.participants)} if s.participants else set()
    return all(len(c.participants) == len(s.participants) and c in allowed and c.fast == c.participants
               for c in s.chunks(2))
