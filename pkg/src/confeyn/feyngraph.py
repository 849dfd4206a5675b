"""Feynman graph combinatorics: validation, 1PI tests, subgraph enumeration,
contraction, and canonical forms.

Graphs are finite multigraphs without looping edges.  External vertices have
valence 1; an edge is external exactly when it touches an external vertex.
The grading used by the Hopf algebra is the number of internal edges.

Two graphs compare equal when they are isomorphic (as multigraphs with the
external/internal vertex flags); the canonical form is computed by color
refinement with exhaustive tie-breaking, which is fine at the sizes handled
here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Edge:
    src: int
    tgt: int
    internal: bool = True


@dataclass(frozen=True)
class TheoryProfile:
    """Pluggable 'same theory' constraint for contraction admissibility.

    The default (no bound) accepts every 1PI quotient.  A valence bound of 4
    models a quartic scalar theory.
    """
    max_valence: int | None = None

    def allows(self, graph: "FeynmanGraph") -> bool:
        if self.max_valence is None:
            return True
        return all(graph.valence(v) <= self.max_valence
                   for v in graph.internal_vertices())


class FeynmanGraph:
    """Multigraph with flagged external vertices and no looping edges."""

    def __init__(self, vertices: dict[int, bool] | Iterable[tuple[int, bool]],
                 edges: Sequence[Edge | tuple]):
        if not isinstance(vertices, dict):
            vertices = dict(vertices)
        self.external: dict[int, bool] = {int(v): bool(flag) for v, flag in vertices.items()}
        self.edges: tuple[Edge, ...] = tuple(
            e if isinstance(e, Edge) else Edge(*e) for e in edges)
        self._canon: tuple | None = None

    # -- construction / serialization ---------------------------------------

    @classmethod
    def build(cls, n_internal: int, internal_edges: Sequence[tuple[int, int]],
              legs: Sequence[int] = ()) -> "FeynmanGraph":
        """Convenience builder: internal vertices 0..n-1, one external leg
        vertex appended per entry of ``legs`` (the internal vertex it hangs on)."""
        vertices = {i: False for i in range(n_internal)}
        edges = [Edge(a, b, True) for a, b in internal_edges]
        nxt = n_internal
        for anchor in legs:
            vertices[nxt] = True
            edges.append(Edge(anchor, nxt, False))
            nxt += 1
        return cls(vertices, edges)

    @classmethod
    def from_json(cls, data: dict) -> "FeynmanGraph":
        vertices = {int(v["id"]): bool(v["external"]) for v in data["vertices"]}
        edges = [Edge(int(e["src"]), int(e["tgt"]), bool(e["internal"]))
                 for e in data["edges"]]
        return cls(vertices, edges)

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": v, "external": self.external[v]}
                         for v in sorted(self.external)],
            "edges": [{"src": e.src, "tgt": e.tgt, "internal": e.internal}
                      for e in self.edges],
        }

    # -- basic views ---------------------------------------------------------

    def vertices(self) -> list[int]:
        return sorted(self.external)

    def internal_vertices(self) -> list[int]:
        return sorted(v for v, ext in self.external.items() if not ext)

    def internal_edge_indices(self) -> list[int]:
        return [i for i, e in enumerate(self.edges) if e.internal]

    def valence(self, v: int) -> int:
        return sum(1 for e in self.edges if v in (e.src, e.tgt))

    def degree(self) -> int:
        """Hopf grading: number of internal edges."""
        return len(self.internal_edge_indices())

    # -- validation ----------------------------------------------------------

    def validate(self) -> list[str]:
        """Structured invariant violations; empty list means valid."""
        problems = []
        for i, e in enumerate(self.edges):
            if e.src not in self.external or e.tgt not in self.external:
                problems.append(f"edge {i} references a missing vertex")
                continue
            if e.src == e.tgt:
                problems.append(f"edge {i} is a looping edge")
            touches_external = self.external[e.src] or self.external[e.tgt]
            if e.internal and touches_external:
                problems.append(f"edge {i} flagged internal but touches an external vertex")
            if not e.internal and not touches_external:
                problems.append(f"edge {i} flagged external but joins internal vertices")
        for v, ext in self.external.items():
            if ext and self.valence(v) != 1:
                problems.append(f"external vertex {v} has valence {self.valence(v)} != 1")
        return problems

    def require_valid(self) -> "FeynmanGraph":
        problems = self.validate()
        if problems:
            raise ValueError("invalid graph: " + "; ".join(problems))
        return self

    # -- connectivity / 1PI ---------------------------------------------------

    def _internal_adjacency(self) -> dict[int, list[tuple[int, int]]]:
        adj: dict[int, list[tuple[int, int]]] = {v: [] for v in self.internal_vertices()}
        for i in self.internal_edge_indices():
            e = self.edges[i]
            adj[e.src].append((e.tgt, i))
            adj[e.tgt].append((e.src, i))
        return adj

    def is_1pi(self) -> bool:
        """True iff the internal structure is connected, has at least one
        internal edge, and no internal edge is a bridge."""
        internal = self.internal_edge_indices()
        if not internal:
            return False
        adj = self._internal_adjacency()
        verts = list(adj)
        # connectivity over internal vertices via internal edges
        seen = {verts[0]}
        stack = [verts[0]]
        while stack:
            for w, _ in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(verts):
            return False
        return not self._internal_bridges(adj)

    @staticmethod
    def _internal_bridges(adj: dict[int, list[tuple[int, int]]]) -> list[int]:
        """Bridge edges of the internal multigraph (parallel edges never bridge)."""
        index = {}
        low = {}
        bridges: list[int] = []
        counter = [0]

        def dfs(root):
            stack = [(root, -1, iter(adj[root]))]
            index[root] = low[root] = counter[0]
            counter[0] += 1
            while stack:
                v, in_edge, it = stack[-1]
                advanced = False
                for w, ei in it:
                    if ei == in_edge:
                        continue
                    if w not in index:
                        index[w] = low[w] = counter[0]
                        counter[0] += 1
                        stack.append((w, ei, iter(adj[w])))
                        advanced = True
                        break
                    low[v] = min(low[v], index[w])
                if not advanced:
                    stack.pop()
                    if stack:
                        parent = stack[-1][0]
                        low[parent] = min(low[parent], low[v])
                        if low[v] > index[parent]:
                            bridges.append(in_edge)

        for v in adj:
            if v not in index:
                dfs(v)
        return bridges

    # -- subgraphs and contraction --------------------------------------------

    def edge_components(self, edge_indices: Iterable[int]) -> list[frozenset[int]]:
        """Connected components (sharing a vertex) of an internal edge subset."""
        edge_indices = list(edge_indices)
        parent = {i: i for i in edge_indices}

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        by_vertex: dict[int, int] = {}
        for i in edge_indices:
            e = self.edges[i]
            for v in (e.src, e.tgt):
                if v in by_vertex:
                    parent[find(i)] = find(by_vertex[v])
                else:
                    by_vertex[v] = i
        groups: dict[int, set[int]] = {}
        for i in edge_indices:
            groups.setdefault(find(i), set()).add(i)
        return [frozenset(g) for g in groups.values()]

    def component_graph(self, component: frozenset[int]) -> "FeynmanGraph":
        """The subgraph spanned by an internal-edge component, as a standalone
        graph (vertices relabelled 0..v-1, all internal)."""
        verts = sorted({v for i in component for v in
                        (self.edges[i].src, self.edges[i].tgt)})
        relabel = {v: j for j, v in enumerate(verts)}
        edges = [Edge(relabel[self.edges[i].src], relabel[self.edges[i].tgt], True)
                 for i in sorted(component)]
        return FeynmanGraph({j: False for j in relabel.values()}, edges)

    def admissible_subgraphs(self, theory: TheoryProfile | None = None
                             ) -> list["SubgraphSelection"]:
        """All proper nonempty disjoint unions of 1PI internal subgraphs whose
        contraction is again a valid 1PI graph of the theory."""
        theory = theory or TheoryProfile()
        internal = self.internal_edge_indices()
        out = []
        for size in range(1, len(internal)):
            for subset in combinations(internal, size):
                sel = frozenset(subset)
                components = self.edge_components(sel)
                if not all(self.component_graph(c).is_1pi() for c in components):
                    continue
                selection = SubgraphSelection(sel, tuple(sorted(components, key=sorted)))
                try:
                    quotient = self.contract(selection, _check_admissible=False)
                except ValueError:
                    continue
                if quotient.validate():
                    continue
                if not quotient.is_1pi():
                    continue
                if not theory.allows(quotient):
                    continue
                out.append(selection)
        return out

    def contract(self, selection: "SubgraphSelection",
                 _check_admissible: bool = True) -> "FeynmanGraph":
        """Collapse each component of the selection to a single internal vertex."""
        if _check_admissible:
            components = self.edge_components(selection.edge_indices)
            if not all(self.component_graph(c).is_1pi() for c in components):
                raise ValueError("selection components are not all 1PI")
        rep: dict[int, int] = {}
        for comp in selection.components:
            verts = {v for i in comp for v in (self.edges[i].src, self.edges[i].tgt)}
            target = min(verts)
            for v in verts:
                rep[v] = target
        vertices = {v: ext for v, ext in self.external.items()
                    if v not in rep or rep[v] == v}
        edges = []
        for i, e in enumerate(self.edges):
            if i in selection.edge_indices:
                continue
            s = rep.get(e.src, e.src)
            t = rep.get(e.tgt, e.tgt)
            if s == t:
                raise ValueError("contraction would create a looping edge")
            edges.append(Edge(s, t, e.internal))
        result = FeynmanGraph(vertices, edges)
        if _check_admissible:
            result.require_valid()
        return result

    # -- canonical form --------------------------------------------------------

    def canonical_key(self) -> tuple:
        """Isomorphism-invariant canonical form (orientation is ignored)."""
        if self._canon is None:
            self._canon = _canonical_form(self)
        return self._canon

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeynmanGraph):
            return NotImplemented
        return self.canonical_key() == other.canonical_key()

    def __hash__(self) -> int:
        return hash(self.canonical_key())

    def __repr__(self) -> str:
        nv = len(self.external)
        return f"FeynmanGraph({nv} vertices, {len(self.edges)} edges, deg {self.degree()})"

    def label(self) -> str:
        """Short deterministic label derived from the canonical form."""
        import hashlib
        blob = json.dumps(self.canonical_key()).encode()
        return "g" + hashlib.sha256(blob).hexdigest()[:8]


@dataclass(frozen=True)
class SubgraphSelection:
    """An internal-edge subset together with its connected components."""
    edge_indices: frozenset[int]
    components: tuple[frozenset[int], ...]


def _refine(colors: dict[int, int], adj: dict[int, list[tuple[int, int]]]) -> dict[int, int]:
    """Stable color refinement on the vertex coloring (multigraph aware)."""
    while True:
        signature = {
            v: (colors[v], tuple(sorted((colors[w], flag) for w, flag in adj[v])))
            for v in colors
        }
        palette = {sig: i for i, sig in enumerate(sorted(set(signature.values())))}
        new = {v: palette[signature[v]] for v in colors}
        if new == colors:
            return colors
        colors = new


def _encode(graph: FeynmanGraph, order: dict[int, int]) -> tuple:
    verts = tuple(flag for _, flag in sorted(
        ((order[v], graph.external[v]) for v in graph.external)))
    edges = tuple(sorted(
        (min(order[e.src], order[e.tgt]), max(order[e.src], order[e.tgt]), e.internal)
        for e in graph.edges))
    return (verts, edges)


def _canonical_form(graph: FeynmanGraph) -> tuple:
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in graph.external}
    for e in graph.edges:
        adj[e.src].append((e.tgt, e.internal))
        adj[e.tgt].append((e.src, e.internal))
    base = {v: (1 if graph.external[v] else 0) for v in graph.external}

    best: list[tuple | None] = [None]

    def search(colors: dict[int, int]):
        colors = _refine(colors, adj)
        cells: dict[int, list[int]] = {}
        for v, c in colors.items():
            cells.setdefault(c, []).append(v)
        ambiguous = sorted((c for c, vs in cells.items() if len(vs) > 1))
        if not ambiguous:
            order = {v: c for v, c in colors.items()}
            enc = _encode(graph, order)
            if best[0] is None or enc < best[0]:
                best[0] = enc
            return
        cell = cells[ambiguous[0]]
        for v in sorted(cell):
            refined = dict(colors)
            refined[v] = -1 - refined[v]  # individualize
            search(refined)

    if not graph.external:
        return ((), ())
    search(base)
    assert best[0] is not None
    return best[0]
