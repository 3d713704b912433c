"""JSON and DOT renderings of complexes, schedules and histories."""

from __future__ import annotations

import json
from typing import Any, Iterable

from .topology import ChromaticComplex, Simplex, Vertex, facet_adjacency

__all__ = [
    "vertex_to_json",
    "simplex_to_json",
    "complex_to_json",
    "complex_from_json",
    "complex_to_dot",
    "to_jsonable",
    "dumps",
]


def vertex_to_json(v: Vertex) -> dict:
    return {"color": v.color, "carrier": sorted(v.carrier), "tag": v.tag()}


def simplex_to_json(s: Iterable[Vertex]) -> list[dict]:
    return [vertex_to_json(v) for v in sorted(s, key=lambda v: v.color)]


def complex_to_json(c: ChromaticComplex) -> dict:
    return {"n": c.n, "depth": c.depth, "facets": [simplex_to_json(f) for f in c.sorted_facets()]}


def _facet_from_json(rows: list[dict]) -> Simplex:
    """Rebuild a facet from per-level tags.

    Inside one facet the tags pin down every vertex: at each level a vertex
    saw exactly the previous-level vertices of the colors in its tag entry.
    """
    depths = {len(r["tag"]) for r in rows}
    if len(depths) != 1:
        raise ValueError("facet mixes depths; only iterated-subdivision facets can be rebuilt")
    q = depths.pop()
    tags = {r["color"]: [frozenset(level) for level in r["tag"]] for r in rows}
    # vertices may have seen colors that are not in this (partial) facet
    colors = set(tags)
    for t in tags.values():
        for level in t:
            colors |= level
    missing = colors - set(tags)
    if missing:
        raise ValueError(f"facet refers to colors {sorted(missing)} it does not contain")
    current = {c: Vertex(c) for c in tags}
    for lvl in range(q):
        current = {c: Vertex(c, frozenset(current[d] for d in tags[c][lvl])) for c in tags}
    out = Simplex(current.values())
    for r in rows:
        if sorted(current[r["color"]].carrier) != sorted(r["carrier"]):
            raise ValueError(f"carrier of color {r['color']} does not match its tag")
    return out


def complex_from_json(data: dict | str) -> ChromaticComplex:
    if isinstance(data, str):
        data = json.loads(data)
    facets = frozenset(_facet_from_json(rows) for rows in data["facets"])
    return ChromaticComplex(frozenset(range(data["n"])), data["depth"], facets)


def complex_to_dot(c: ChromaticComplex, name: str = "facets") -> str:
    """Facet-adjacency graph: facets sharing a codimension-one face are joined."""
    facets = c.sorted_facets()
    adj = facet_adjacency(c)
    lines = [f"graph {name} {{"]
    for i, f in enumerate(facets):
        label = " ".join(f"{v.color}:{''.join(map(str, sorted(v.carrier)))}" for v in f.ordered())
        lines.append(f'  f{i} [label="{label}"];')
    for i in sorted(adj):
        for j in sorted(adj[i]):
            if i < j:
                lines.append(f"  f{i} -- f{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_jsonable(x: Any) -> Any:
    """Sets become sorted lists, tuples become lists, vertices become dicts."""
    if isinstance(x, Vertex):
        return vertex_to_json(x)
    if isinstance(x, (set, frozenset)):
        items = [to_jsonable(i) for i in x]
        try:
            return sorted(items)
        except TypeError:
            return sorted(items, key=lambda i: json.dumps(i, sort_keys=True))
    if isinstance(x, (list, tuple)):
        return [to_jsonable(i) for i in x]
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if hasattr(x, "to_json"):
        return x.to_json()
    return x


def dumps(x: Any) -> str:
    return json.dumps(to_jsonable(x), sort_keys=True, indent=2) + "\n"
