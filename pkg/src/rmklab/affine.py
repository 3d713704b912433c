"""Affine tasks inside iterated chromatic subdivisions.

``C(m,m,k)`` keeps the facets of ``Chr^2`` of the ``(m-1)``-simplex that touch
a face of dimension at most ``k-1`` (some vertex has ``|carrier| <= k``).
Every vertex of the result sees, across all kept facets containing it, a
unique smallest such face, and deciding the least color of that face solves
``k``-set consensus.

``C(n,m,k)`` installs a relabeled copy of ``C(m,m,k)`` on every face colored by
an ``m``-subset, one subset at a time in lexicographic order, coning each
copy with the rest of its facet.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Iterable, Mapping

from .runs import Schedule, vertex_views
from .topology import (
    ChromaticComplex,
    Simplex,
    Vertex,
    chr_iter,
    corner,
    is_pseudomanifold,
    restrict_to_face,
    standard_simplex,
)

__all__ = [
    "TractabilityError",
    "AffineTask",
    "Verdict",
    "TaskSpec",
    "Protocol",
    "purge",
    "build_c_mmk",
    "small_faces_in_star",
    "check_unique_min_face",
    "check_purity",
    "decide_set_consensus",
    "set_consensus_protocol",
    "set_consensus_task",
    "affine_task_spec",
    "build_c_nmk",
    "decide_combination",
    "check_face_coherence",
    "check_task_solvable",
]

MAX_NMK_FACETS = 200_000


class TractabilityError(ValueError):
    """Raised when an instance is outside the desk-scale bounds."""


@dataclass(frozen=True)
class Verdict:
    property: str
    instance: str
    passed: bool
    counterexample: Any = None
    detail: str = ""

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        from .export import simplex_to_json, to_jsonable

        cex = self.counterexample
        if isinstance(cex, frozenset) and cex and all(isinstance(v, Vertex) for v in cex):
            cex = simplex_to_json(cex)
        elif isinstance(cex, Schedule):
            cex = cex.to_json()
        else:
            cex = to_jsonable(cex)
        return {"property": self.property, "instance": self.instance, "pass": self.passed,
                "counterexample": cex}


@dataclass(frozen=True, eq=False)
class AffineTask:
    """An input-less task given by a subcomplex ``complex`` of a subdivided simplex."""

    base: ChromaticComplex
    depth: int
    complex: ChromaticComplex
    name: str = ""
    k: int | None = None
    # C(n,m,k) bookkeeping: comb -> {installed vertex -> decided color}
    installs: Mapping = field(default_factory=dict, repr=False)

    @property
    def facets(self) -> frozenset:
        return self.complex.facets

    @property
    def n(self) -> int:
        return self.base.n

    def delta(self, t: Iterable[int]) -> ChromaticComplex:
        return restrict_to_face(self.complex, t)

    @cached_property
    def _stars(self) -> dict[Vertex, list[Simplex]]:
        stars: dict[Vertex, list[Simplex]] = {}
        for f in self.complex.facets:
            for v in f:
                stars.setdefault(v, []).append(f)
        return stars

    def star(self, v: Vertex) -> list[Simplex]:
        return self._stars.get(v, [])

    @cached_property
    def decisions(self) -> dict[Vertex, int]:
        """Set-consensus decision of every vertex (requires ``k``)."""
        if self.k is None:
            raise ValueError("task has no agreement bound")
        out = {}
        for v in self._stars:
            out[v] = _decide(self, v, self.k)
        return out


def purge(host: ChromaticComplex, k: int, keep: Callable[[Vertex, int], bool] | None = None,
          name: str = "") -> AffineTask:
    """Keep the facets of ``host`` having a vertex on a face of dimension <= k-1."""
    if not 1 <= k <= host.n:
        raise ValueError(f"agreement bound k={k} outside 1..{host.n}")
    touches = keep or (lambda v, k: len(v.carrier) <= k)
    kept = frozenset(f for f in host.facets if any(touches(v, k) for v in f))
    L = ChromaticComplex(host.colors, host.depth, kept)
    return AffineTask(standard_simplex(host.n), host.depth, L, name or f"purge(depth={host.depth},k={k})", k)


_CMMK_CACHE: dict = {}


def build_c_mmk(m: int, k: int, keep: Callable[[Vertex, int], bool] | None = None) -> AffineTask:
    """``C(m,m,k)``: ``Chr^2`` of the ``(m-1)``-simplex, purged."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if not 1 <= k <= m:
        raise ValueError(f"need 1 <= k <= m, got k={k}, m={m}")
    if keep is not None:
        return purge(chr_iter(standard_simplex(m), 2), k, keep, name=f"C({m},{m},{k})*")
    if (m, k) not in _CMMK_CACHE:
        _CMMK_CACHE[(m, k)] = purge(chr_iter(standard_simplex(m), 2), k, name=f"C({m},{m},{k})")
    return _CMMK_CACHE[(m, k)]


def small_faces_in_star(t: AffineTask, v: Vertex, k: int) -> set[frozenset]:
    """Carriers of size <= k met by any kept facet containing ``v``."""
    return {u.carrier for f in t.star(v) for u in f if len(u.carrier) <= k}


def _minimal(family: Iterable[frozenset]) -> list[frozenset]:
    family = set(family)
    return [c for c in family if not any(d < c for d in family)]


def _is_chain(family: Iterable[frozenset]) -> bool:
    return all(a <= b or b <= a for a, b in itertools.combinations(family, 2))


def check_unique_min_face(t: AffineTask, k: int) -> Verdict:
    """Every kept vertex identifies exactly one smallest face of dimension <= k-1.

    Per vertex ``v``: the small carriers met by the kept facets around ``v``
    must have a unique inclusion-minimal member, and when ``v`` itself is off
    the small faces they must form a chain.  Every kept facet must touch a
    small face at all.
    """
    inst = t.name or "task"
    for f in t.complex.sorted_facets():
        if not any(len(u.carrier) <= k for u in f):
            return Verdict("unique_min_face", inst, False, f, "facet touches no small face")
    for v in sorted(t._stars, key=lambda v: v.sort_key):
        fam = small_faces_in_star(t, v, k)
        mins = _minimal(fam)
        if len(mins) != 1 or (len(v.carrier) > k and not _is_chain(fam)):
            star = sorted(t.star(v), key=lambda f: sorted(u.sort_key for u in f))
            # report a facet that witnesses a second small face
            witness = next((f for f in star if any(u.carrier in mins[1:] for u in f)), star[0])
            faces = ", ".join(str(sorted(c)) for c in sorted(mins, key=sorted))
            return Verdict("unique_min_face", inst, False, witness,
                           f"vertex of color {v.color} with carrier {sorted(v.carrier)} sees faces {faces}")
    return Verdict("unique_min_face", inst, True)


def check_purity(t: AffineTask, k: int | None = None) -> Verdict:
    """``delta(face)`` is pure of the face's dimension, and nonempty once |face| >= k."""
    inst = t.name or "task"
    for size in range(1, t.n + 1):
        for face in itertools.combinations(sorted(t.base.colors), size):
            d = t.delta(face)
            if any(len(f) != size for f in d.facets):
                bad = next(f for f in d.sorted_facets() if len(f) != size)
                return Verdict("purity", inst, False, bad, f"delta({list(face)}) is not pure")
            if k is not None and size >= k and not d.facets:
                return Verdict("purity", inst, False, None, f"delta({list(face)}) is empty")
    return Verdict("purity", inst, True)


def _decide(t: AffineTask, v: Vertex, k: int) -> int:
    fam = small_faces_in_star(t, v, k)
    mins = _minimal(fam)
    if len(mins) != 1:
        raise ValueError(f"vertex {v!r} does not identify a unique smallest face: "
                         f"{[sorted(c) for c in mins]}")
    return min(mins[0])


def decide_set_consensus(t: AffineTask, simplex: Iterable[Vertex] | None, v: Vertex) -> int:
    """Least color of the unique smallest small face around ``v``."""
    if simplex is not None and v not in frozenset(simplex):
        raise ValueError("vertex is not in the given simplex")
    if v not in t._stars:
        raise ValueError("vertex is not in the task complex")
    if t.k is None:
        raise ValueError("task has no agreement bound")
    return t.decisions[v]


# ---------------------------------------------------------------------------
# tasks, protocols, solvability
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaskSpec:
    """A task on ``n`` processes judged through ``admits``.

    ``admits(participants, outputs)`` says whether the output vertices (a
    mapping color -> output vertex) form a face of some simplex of
    ``Delta(participants)``.
    """

    n: int
    admits: Callable[[frozenset, Mapping[int, Any]], bool]
    name: str = ""


def set_consensus_task(n: int, k: int) -> TaskSpec:
    """Outputs are participants' ids, at most ``k`` distinct."""
    def admits(part, outputs):
        vals = set(outputs.values())
        return set(outputs) <= part and vals <= part and len(vals) <= k
    return TaskSpec(n, admits, f"{k}-set-consensus({n})")


def affine_task_spec(t: AffineTask) -> TaskSpec:
    """View an affine task as a task whose output vertices are vertices of ``L``."""
    def admits(part, outputs):
        verts = frozenset(outputs.values())
        if any(v.color != c for c, v in outputs.items()):
            return False
        return any(verts <= f for f in t.delta(part).facets)
    return TaskSpec(t.n, admits, t.name)


@dataclass(frozen=True)
class Protocol:
    """Partial map from full-information views to outputs.

    ``decide(view_vertex)`` returns the output, or ``None`` when the view is
    outside the domain.
    """

    decide: Callable[[Vertex], Any]
    name: str = ""

    @classmethod
    def from_mapping(cls, mapping: Mapping[Vertex, Any], name: str = "") -> "Protocol":
        return cls(mapping.get, name)


def set_consensus_protocol(t: AffineTask) -> Protocol:
    """Decide after two rounds with :func:`decide_set_consensus`."""
    return Protocol.from_mapping(dict(t.decisions), f"decide[{t.name}]")


def check_task_solvable(task: TaskSpec | AffineTask, protocol: Protocol, runs: Iterable[Schedule]) -> Verdict:
    """Finite-prefix version of the solvability conditions.

    (1) every process active at the end of a run has a view in the domain by
    then, and once it has decided its output never changes; (2) after every
    round the outputs decided so far form a simplex admitted by the task for
    the run's participants.
    """
    if isinstance(task, AffineTask):
        task = affine_task_spec(task)
    inst = f"{task.name} by {protocol.name}".strip()
    for run in runs:
        if run.n != task.n:
            raise ValueError(f"run has n={run.n}, task has n={task.n}")
        part = run.participants
        decided: dict[int, Any] = {}
        for r, states in enumerate(vertex_views(run), start=1):
            for p, vertex in states.items():
                out = protocol.decide(vertex)
                if out is None:
                    if p in decided:
                        return Verdict("solvable", inst, False, run,
                                       f"process {p} left the protocol domain in round {r}")
                    continue
                if p in decided and decided[p] != out:
                    return Verdict("solvable", inst, False, run, f"process {p} changed its output in round {r}")
                decided[p] = out
            if not task.admits(part, decided):
                return Verdict("solvable", inst, False, run,
                               f"round {r}: outputs {decided} not allowed for participants {sorted(part)}")
        missing = run.fast - set(decided)
        if missing:
            return Verdict("solvable", inst, False, run, f"processes {sorted(missing)} never decided")
    return Verdict("solvable", inst, True)


# ---------------------------------------------------------------------------
# C(n,m,k)
# ---------------------------------------------------------------------------


def _embed(std: Vertex, base: Mapping[int, Vertex], comb: tuple, memo: dict) -> Vertex:
    """Relabel a vertex of ``Chr^q(s^{m-1})`` onto the face with vertices ``base``."""
    hit = memo.get(std)
    if hit is not None:
        return hit
    if std.view is None:
        out = base[comb[std.color]]
    else:
        out = Vertex(comb[std.color], frozenset(_embed(u, base, comb, memo) for u in std.view))
    memo[std] = out
    return out


def build_c_nmk(n: int, m: int, k: int, max_facets: int = MAX_NMK_FACETS) -> AffineTask:
    """Install ``C(m,m,k)`` on every ``m``-colored face, in lexicographic order."""
    if n > 4:
        raise TractabilityError("build_c_nmk is capped at n <= 4 (tractability bound)")
    if not 1 <= k <= m <= n:
        raise ValueError(f"need 1 <= k <= m <= n, got n={n}, m={m}, k={k}")
    pattern = build_c_mmk(m, k)
    combs = list(itertools.combinations(range(n), m))
    projected = len(pattern.facets) ** len(combs)
    if projected > max_facets:
        raise TractabilityError(f"C({n},{m},{k}) would have {projected} facets (limit {max_facets}; "
                                "tractability bound)")
    std_facets = pattern.complex.sorted_facets()
    std_decisions = pattern.decisions

    facets = {Simplex(corner(i) for i in range(n))}
    installs: dict[tuple, dict[Vertex, int]] = {}
    copies: dict[frozenset, list[Simplex]] = {}
    for comb in combs:
        decided: dict[Vertex, int] = {}
        new_facets = set()
        for f in facets:
            face = frozenset(v for v in f if v.color in comb)
            rest = f - face
            if face not in copies:
                base = {v.color: v for v in face}
                memo: dict = {}
                installed = [Simplex(_embed(u, base, comb, memo) for u in sf) for sf in std_facets]
                for std_v, v in memo.items():
                    if std_v.depth == 2:
                        decided[v] = comb[std_decisions[std_v]]
                copies[face] = installed
            for sf in copies[face]:
                new_facets.add(Simplex(sf | rest))
        facets = new_facets
        installs[comb] = decided
    L = ChromaticComplex(frozenset(range(n)), 2 * len(combs), frozenset(facets))
    return AffineTask(standard_simplex(n), 2 * len(combs), L, f"C({n},{m},{k})", k, installs)


def decide_combination(t: AffineTask, facet: Iterable[Vertex], comb: Iterable[int], v: Vertex) -> int:
    """The value ``v`` answers for ``comb``: its ancestor's decision in that copy."""
    comb = tuple(sorted(comb))
    if comb not in t.installs:
        raise ValueError(f"combination {comb} was not processed when building {t.name}")
    if facet is not None and v not in frozenset(facet):
        raise ValueError("vertex is not in the given facet")
    if v.color not in comb:
        raise ValueError(f"vertex color {v.color} is not in combination {comb}")
    decided = t.installs[comb]
    a: Vertex | None = v
    while a is not None:
        if a in decided:
            return decided[a]
        a = a.previous()
    raise ValueError("vertex has no ancestor in the copy installed for this combination")


def check_face_coherence(t: AffineTask) -> Verdict:
    """Facets are full and chromatic, and every ridge lies in at most two facets."""
    inst = t.name or "task"
    for f in t.complex.sorted_facets():
        if f.colors != t.base.colors:
            return Verdict("face_coherence", inst, False, f, "facet is missing colors")
        if any(v.color not in v.carrier for v in f):
            return Verdict("face_coherence", inst, False, f, "vertex off its own carrier")
    if not is_pseudomanifold(t.complex):
        return Verdict("face_coherence", inst, False, None, "a ridge is shared by more than two facets")
    return Verdict("face_coherence", inst, True)


def c_nmk_facet_count(n: int, m: int, k: int) -> int:
    return len(build_c_mmk(m, k).facets) ** math.comb(n, m)
