"""Chromatic simplices and the standard chromatic subdivision.

Vertices are purely combinatorial.  A depth-0 vertex is a corner of the base
simplex and is identified by its color.  A vertex created by one application
of :func:`chr` is a pair ``(color, view)`` where ``view`` is the set of
previous-level vertices the process saw in that immediate-snapshot round.
Because the new vertex depends only on what it saw, subdividing two facets
that share a face produces the same vertices on that face.

Facets of ``Chr(sigma)`` correspond one-to-one with ordered partitions of the
colors of ``sigma``: the vertex of color ``i`` in block ``B_j`` sees
``B_1 | ... | B_j``.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Vertex",
    "Simplex",
    "ChromaticComplex",
    "ordered_partitions",
    "corner",
    "standard_simplex",
    "simplex_complex",
    "chr",
    "chr_iter",
    "carrier_of",
    "colors_of",
    "restrict_to_face",
    "cone",
    "ridge_incidence",
    "is_pseudomanifold",
    "snapshot_structure_violations",
]


def ordered_partitions(items: Iterable) -> Iterator[tuple[frozenset, ...]]:
    """Yield every ordered partition of ``items`` into nonempty blocks.

    Blocks come out as frozensets; the order of the yielded partitions is
    deterministic for a given input order.
    """
    items = tuple(items)
    if not items:
        yield ()
        return
    n = len(items)
    # choose the first block as any nonempty subset, recurse on the rest
    for size in range(1, n + 1):
        for first in itertools.combinations(items, size):
            rest = tuple(x for x in items if x not in first)
            for tail in ordered_partitions(rest):
                yield (frozenset(first),) + tail


@dataclass(frozen=True, eq=False)
class Vertex:
    """A colored vertex of an iterated chromatic subdivision.

    ``view`` is ``None`` for a corner.  ``carrier`` is the face of the base
    simplex the vertex lies on, derived from the view.
    """

    color: int
    view: frozenset | None = None
    carrier: frozenset = field(init=False, repr=False)
    depth: int = field(init=False, repr=False)
    _key: tuple = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        if self.view is None:
            carrier = frozenset((self.color,))
            depth = 0
            key = (self.color,)
        else:
            if not self.view:
                raise ValueError("a subdivision vertex must see at least itself")
            if self.color not in {v.color for v in self.view}:
                raise ValueError(f"vertex of color {self.color} does not see itself")
            carrier = frozenset().union(*(v.carrier for v in self.view))
            depth = 1 + max(v.depth for v in self.view)
            key = (self.color, tuple(sorted(v._key for v in self.view)))
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Vertex):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __lt__(self, other):
        return self._key < other._key

    def __repr__(self):
        if self.view is None:
            return f"Vertex({self.color})"
        return f"Vertex({self.color}, carrier={sorted(self.carrier)}, depth={self.depth})"

    @property
    def sort_key(self) -> tuple:
        return self._key

    def previous(self) -> "Vertex | None":
        """The same process's vertex one level down (its own entry in ``view``)."""
        if self.view is None:
            return None
        for v in self.view:
            if v.color == self.color:
                return v
        raise AssertionError("unreachable: view always contains own color")

    def seen_colors(self) -> frozenset:
        """Colors in this vertex's immediate view."""
        if self.view is None:
            return frozenset((self.color,))
        return frozenset(v.color for v in self.view)

    def tag(self) -> list[list[int]]:
        """Per-level colors seen, outermost subdivision first.

        Within a single facet (one run) this determines the vertex; across
        the whole complex it does not, which is why :class:`Vertex` keys on
        full views instead.
        """
        levels = []
        v = self
        while v.view is not None:
            levels.append(sorted(v.seen_colors()))
            v = v.previous()
        return levels[::-1]


class Simplex(frozenset):
    """A chromatic simplex: a frozenset of vertices with distinct colors."""

    def __new__(cls, vertices: Iterable[Vertex] = ()):
        self = super().__new__(cls, vertices)
        if len({v.color for v in self}) != len(self):
            raise ValueError("simplex is not chromatic: repeated color")
        return self

    @property
    def colors(self) -> frozenset:
        return frozenset(v.color for v in self)

    @property
    def dimension(self) -> int:
        return len(self) - 1

    @property
    def carrier(self) -> frozenset:
        return frozenset().union(*(v.carrier for v in self)) if self else frozenset()

    def vertex_of(self, color: int) -> Vertex:
        for v in self:
            if v.color == color:
                return v
        raise KeyError(color)

    def restricted(self, colors: Iterable[int]) -> "Simplex":
        colors = set(colors)
        return Simplex(v for v in self if v.color in colors)

    def ordered(self) -> list[Vertex]:
        return sorted(self, key=lambda v: v.color)

    def __repr__(self):
        return "Simplex(" + ", ".join(repr(v) for v in self.ordered()) + ")"


@dataclass(frozen=True)
class ChromaticComplex:
    """A chromatic complex given by its facets; faces are derived on demand."""

    colors: frozenset
    depth: int
    facets: frozenset

    def __post_init__(self):
        object.__setattr__(self, "colors", frozenset(self.colors))
        object.__setattr__(self, "facets", frozenset(Simplex(f) for f in self.facets))

    @property
    def n(self) -> int:
        return len(self.colors)

    def __len__(self):
        return len(self.facets)

    def __iter__(self):
        return iter(self.sorted_facets())

    def sorted_facets(self) -> list[Simplex]:
        return sorted(self.facets, key=_simplex_key)

    def vertices(self) -> frozenset:
        return frozenset().union(*self.facets) if self.facets else frozenset()

    def faces(self) -> set[Simplex]:
        """All nonempty faces.  Exponential in facet size; use on small complexes."""
        out: set[Simplex] = set()
        for f in self.facets:
            verts = tuple(f)
            for r in range(1, len(verts) + 1):
                for sub in itertools.combinations(verts, r):
                    out.add(Simplex(sub))
        return out

    def contains(self, simplex: Iterable[Vertex]) -> bool:
        s = frozenset(simplex)
        return any(s <= f for f in self.facets)

    def star(self, v: Vertex) -> list[Simplex]:
        return [f for f in self.facets if v in f]

    def is_pure(self) -> bool:
        return len({len(f) for f in self.facets}) <= 1


def _simplex_key(s: Iterable[Vertex]) -> tuple:
    return tuple(sorted(v.sort_key for v in s))


def corner(color: int) -> Vertex:
    return Vertex(color)


def standard_simplex(n: int) -> ChromaticComplex:
    """The complex with one facet on the corners ``0..n-1``."""
    if n < 1:
        raise ValueError("standard simplex needs at least one process")
    return ChromaticComplex(frozenset(range(n)), 0, frozenset([Simplex(corner(i) for i in range(n))]))


def simplex_complex(simplex: Iterable[Vertex]) -> ChromaticComplex:
    """A complex with the single facet ``simplex`` (any vertices, any depth)."""
    s = Simplex(simplex)
    depth = max((v.depth for v in s), default=0)
    return ChromaticComplex(s.carrier, depth, frozenset([s]))


def subdivide_simplex(simplex: Iterable[Vertex]) -> list[Simplex]:
    """Facets of ``Chr`` of a single simplex, one per ordered partition."""
    verts = sorted(simplex, key=lambda v: v.color)
    out = []
    for blocks in ordered_partitions(verts):
        seen: frozenset = frozenset()
        new = []
        for block in blocks:
            seen = seen | block
            new.extend(Vertex(v.color, seen) for v in block)
        out.append(Simplex(new))
    return out


def chr(c: ChromaticComplex) -> ChromaticComplex:  # noqa: A001 - matches the usual name
    """One standard chromatic subdivision of every facet of ``c``."""
    facets: set[Simplex] = set()
    for f in c.facets:
        facets.update(subdivide_simplex(f))
    return ChromaticComplex(c.colors, c.depth + 1, frozenset(facets))


def chr_iter(c: ChromaticComplex, q: int) -> ChromaticComplex:
    if q < 0:
        raise ValueError("iteration count must be non-negative")
    for _ in range(q):
        c = chr(c)
    return c


def carrier_of(x: Vertex | Iterable[Vertex]) -> frozenset:
    if isinstance(x, Vertex):
        return x.carrier
    return frozenset().union(*(v.carrier for v in x))


def colors_of(x: Iterable[Vertex]) -> frozenset:
    return frozenset(v.color for v in x)


def maximal(simplices: Iterable[frozenset]) -> set[Simplex]:
    """Drop every simplex that is a proper face of another one."""
    by_size = sorted(set(simplices), key=len, reverse=True)
    kept: list[frozenset] = []
    for s in by_size:
        if not s:
            continue
        if any(len(k) > len(s) and s < k for k in kept):
            continue
        kept.append(s)
    return {Simplex(s) for s in kept}


def restrict_to_face(c: ChromaticComplex, t: Iterable[int]) -> ChromaticComplex:
    """The subcomplex of simplices whose carrier lies in the face ``t``."""
    t = frozenset(t)
    if not t:
        raise ValueError("cannot restrict to the empty face")
    if not t <= c.colors:
        raise ValueError(f"face {sorted(t)} is not a face of the base colors {sorted(c.colors)}")
    if t == c.colors:
        return c
    pieces = (frozenset(v for v in f if v.carrier <= t) for f in c.facets)
    return ChromaticComplex(t, c.depth, frozenset(maximal(pieces)))


def cone(face_complex: ChromaticComplex | Iterable[Iterable[Vertex]], apex_vertices: Iterable[Vertex]) -> set[Simplex]:
    """Join every facet with ``apex_vertices``."""
    apex = frozenset(apex_vertices)
    facets = face_complex.facets if isinstance(face_complex, ChromaticComplex) else [frozenset(f) for f in face_complex]
    out = set()
    for f in facets:
        clash = colors_of(f) & colors_of(apex)
        if clash:
            raise ValueError(f"apex colors {sorted(clash)} collide with the face being coned")
        out.add(Simplex(f | apex))
    return out


def ridge_incidence(c: ChromaticComplex) -> dict[frozenset, int]:
    """How many facets contain each codimension-one face."""
    counts: Counter = Counter()
    for f in c.facets:
        for v in f:
            counts[f - {v}] += 1
    return dict(counts)


def is_pseudomanifold(c: ChromaticComplex) -> bool:
    """Every ridge lies in at most two facets (true of any subdivision piece)."""
    return all(k <= 2 for k in ridge_incidence(c).values())


def snapshot_structure_violations(facet: Iterable[Vertex]) -> list[str]:
    """Check containment and immediacy of the views in ``facet``, level by level.

    Returns a list of human-readable problems; empty means the facet is a
    valid immediate-snapshot configuration at every level.
    """
    problems = []
    level = list(facet)
    depth = 0
    while level and all(v.view is not None for v in level):
        depth += 1
        views = {v.color: v.seen_colors() for v in level}
        for a, b in itertools.combinations(level, 2):
            va, vb = views[a.color], views[b.color]
            if not (va <= vb or vb <= va):
                problems.append(f"level -{depth}: views of {a.color} and {b.color} are incomparable")
            if a.color in vb and not va <= vb:
                problems.append(f"level -{depth}: {b.color} sees {a.color} but view not contained")
            if b.color in va and not vb <= va:
                problems.append(f"level -{depth}: {a.color} sees {b.color} but view not contained")
        below = set()
        for v in level:
            below |= v.view
        # every vertex seen at the next level down must belong to a single run
        if len({u.color for u in below}) != len(below):
            problems.append(f"level -{depth}: two different vertices of one color seen")
        level = list(below)
    return problems


def facet_adjacency(c: ChromaticComplex) -> dict[int, set[int]]:
    """Facets (by index in sorted order) sharing a ridge."""
    facets = c.sorted_facets()
    owners = defaultdict(list)
    for i, f in enumerate(facets):
        for v in f:
            owners[f - {v}].append(i)
    adj: dict[int, set[int]] = {i: set() for i in range(len(facets))}
    for idx in owners.values():
        for a, b in itertools.combinations(idx, 2):
            adj[a].add(b)
            adj[b].add(a)
    return adj
