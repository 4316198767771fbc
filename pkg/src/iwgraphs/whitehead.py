"""Whitehead graphs of rose maps, small-graph canonical labeling and the
catalog of connected simplicial graphs."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable

from iwgraphs.maps import GraphMap
from iwgraphs.words import Letter, Turn, letter_key, letter_name, make_turn, parse_letter

_NAMES = "abcdefghijklmnopqrstuvwxyz"


def _vertex_name(v) -> str:
    return letter_name(v) if isinstance(v, int) else str(v)


@dataclass(frozen=True)
class SimpleGraph:
    """Undirected graph without loops or multi-edges.

    ``vertices`` keeps a fixed order (used for text output and as the
    tie-break order in canonical labeling); edges are 2-element frozensets.
    Direction-labeled graphs use :data:`Letter` vertices.
    """

    vertices: tuple
    edges: frozenset

    def __post_init__(self) -> None:
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("repeated vertex")
        for e in self.edges:
            if not isinstance(e, frozenset) or len(e) != 2:
                raise ValueError(f"bad edge {e!r}: loops and non-pairs are not allowed")
            if not e <= vs:
                raise ValueError(f"edge {sorted(map(_vertex_name, e))} uses an undeclared vertex")

    @classmethod
    def build(cls, vertices: Iterable[Hashable], edges: Iterable[Iterable[Hashable]]) -> SimpleGraph:
        return cls(tuple(vertices), frozenset(frozenset(e) for e in edges))

    @property
    def order(self) -> int:
        return len(self.vertices)

    @property
    def size(self) -> int:
        return len(self.edges)

    def neighbors(self, v) -> set:
        return {w for e in self.edges if v in e for w in e if w != v}

    def adjacency(self) -> dict:
        adj: dict = {v: set() for v in self.vertices}
        for e in self.edges:
            x, y = tuple(e)
            adj[x].add(y)
            adj[y].add(x)
        return adj

    def degree(self, v) -> int:
        return sum(1 for e in self.edges if v in e)

    def components(self) -> list[SimpleGraph]:
        adj = self.adjacency()
        seen: set = set()
        out = []
        for v in self.vertices:
            if v in seen:
                continue
            comp, stack = {v}, [v]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
            seen |= comp
            out.append(self.induced(comp))
        return out

    def is_connected(self) -> bool:
        return self.order > 0 and len(self.components()) == 1

    def induced(self, keep) -> SimpleGraph:
        keep = set(keep)
        return SimpleGraph(
            tuple(v for v in self.vertices if v in keep),
            frozenset(e for e in self.edges if e <= keep),
        )

    def relabel(self, mapping: dict) -> SimpleGraph:
        return SimpleGraph(
            tuple(mapping[v] for v in self.vertices),
            frozenset(frozenset(mapping[v] for v in e) for e in self.edges),
        )

    def sorted_edges(self) -> list[tuple]:
        pos = {v: i for i, v in enumerate(self.vertices)}
        pairs = [tuple(sorted(e, key=pos.__getitem__)) for e in self.edges]
        return sorted(pairs, key=lambda p: (pos[p[0]], pos[p[1]]))

    def to_text(self) -> str:
        """``V=5; E=ab,bc`` when vertices are ``a, b, ...`` in order, else an explicit list."""
        names = [_vertex_name(v) for v in self.vertices]
        if names == list(_NAMES[: len(names)]) and all(isinstance(v, str) for v in self.vertices):
            head = f"V={len(names)}"
        else:
            head = "V=" + ",".join(names)
        body = ",".join(_vertex_name(x) + _vertex_name(y) for x, y in self.sorted_edges())
        return f"{head}; E={body}"

    def __str__(self) -> str:
        return self.to_text()


def parse_graph(text: str, directions: bool = False) -> SimpleGraph:
    """Parse ``V=5; E=ab,bc`` or ``V=a,A,b; E=aA,Ab``.

    With ``directions=True`` vertex names are read as edge letters.
    """
    parts = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise ValueError(f"expected KEY=VALUE, got {chunk!r}")
        k, v = chunk.split("=", 1)
        parts[k.strip().upper()] = v.strip()
    if "V" not in parts:
        raise ValueError("missing V=")
    spec = parts["V"]
    if spec.isdigit():
        names = list(_NAMES[: int(spec)])
    else:
        names = [s.strip() for s in spec.split(",") if s.strip()]
    conv = parse_letter if directions else (lambda s: s)
    vertices = [conv(s) for s in names]
    edges = []
    body = parts.get("E", "")
    for tok in body.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if len(tok) != 2:
            raise ValueError(f"edge must name two vertices: {tok!r}")
        x, y = conv(tok[0]), conv(tok[1])
        if x == y:
            raise ValueError(f"loop at {tok[0]}")
        edges.append((x, y))
    return SimpleGraph.build(vertices, edges)


def path_graph(n: int) -> SimpleGraph:
    vs = list(_NAMES[:n])
    return SimpleGraph.build(vs, zip(vs, vs[1:]))


def cycle_graph(n: int) -> SimpleGraph:
    vs = list(_NAMES[:n])
    return SimpleGraph.build(vs, list(zip(vs, vs[1:])) + [(vs[-1], vs[0])])


def complete_graph(n: int) -> SimpleGraph:
    vs = list(_NAMES[:n])
    return SimpleGraph.build(vs, [(x, y) for i, x in enumerate(vs) for y in vs[i + 1 :]])


def star_graph(n: int) -> SimpleGraph:
    vs = list(_NAMES[:n])
    return SimpleGraph.build(vs, [(vs[0], y) for y in vs[1:]])


# --- canonical labeling -----------------------------------------------------


def _refine(nbrs: list[set[int]], cells: list[list[int]]) -> list[list[int]]:
    """Coarsest equitable refinement of an ordered partition.

    Fragments are ordered by neighbor count, so the result depends only on
    the graph and the input partition, not on vertex names.
    """
    while True:
        for s in range(len(cells)):
            splitter = set(cells[s])
            new: list[list[int]] = []
            for c in cells:
                if len(c) == 1:
                    new.append(c)
                    continue
                groups: dict[int, list[int]] = {}
                for v in c:
                    groups.setdefault(len(nbrs[v] & splitter), []).append(v)
                new.extend(groups[k] for k in sorted(groups))
            if len(new) != len(cells):
                cells = new
                break
        else:
            return cells


def _orbits(n: int, perms: list[list[int]]) -> list[int]:
    parent = list(range(n))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for p in perms:
        for v in range(n):
            a, b = find(v), find(p[v])
            if a != b:
                parent[max(a, b)] = min(a, b)
    return [find(v) for v in range(n)]


def _canonical_order(nbrs: list[set[int]]) -> tuple[tuple[int, ...], list[int]]:
    """Individualization-refinement search for the largest adjacency code.

    Automorphisms found at equal leaves prune sibling branches in the same
    orbit of the prefix stabilizer.
    """
    n = len(nbrs)
    best: list = [None, None]
    autos: list[list[int]] = []

    def code(order: list[int]) -> tuple[int, ...]:
        return tuple(1 if order[j] in nbrs[order[i]] else 0 for i in range(n) for j in range(i + 1, n))

    def search(cells: list[list[int]], prefix: list[int]) -> None:
        cells = _refine(nbrs, cells)
        if all(len(c) == 1 for c in cells):
            order = [c[0] for c in cells]
            c = code(order)
            if best[0] is None or c > best[0]:
                best[0], best[1] = c, order
            elif c == best[0]:
                perm = [0] * n
                for a, b in zip(best[1], order):
                    perm[a] = b
                autos.append(perm)
            return
        t = next(i for i, c in enumerate(cells) if len(c) > 1)
        explored: list[int] = []
        for v in sorted(cells[t]):
            if explored:
                stab = [p for p in autos if all(p[x] == x for x in prefix)]
                orb = _orbits(n, stab)
                if any(orb[v] == orb[u] for u in explored):
                    continue
            rest = [w for w in cells[t] if w != v]
            search(cells[:t] + [[v], rest] + cells[t + 1 :], prefix + [v])
            explored.append(v)

    if n:
        search([list(range(n))], [])
    return (best[0] or ()), (best[1] or [])


def canonical_form(g: SimpleGraph) -> tuple[tuple, list]:
    """Return ``(certificate, vertices in canonical order)``.

    Two graphs are isomorphic exactly when their certificates are equal.
    """
    idx = {v: i for i, v in enumerate(g.vertices)}
    nbrs: list[set[int]] = [set() for _ in g.vertices]
    for e in g.edges:
        x, y = (idx[v] for v in e)
        nbrs[x].add(y)
        nbrs[y].add(x)
    c, order = _canonical_order(nbrs)
    return (g.order, c), [g.vertices[i] for i in order]


def certificate(g: SimpleGraph) -> tuple:
    return canonical_form(g)[0]


def are_isomorphic(g1: SimpleGraph, g2: SimpleGraph) -> tuple[bool, dict | None]:
    """Exact isomorphism test; the witness maps vertices of ``g1`` to ``g2``."""
    if g1.order != g2.order or g1.size != g2.size:
        return False, None
    if sorted(g1.degree(v) for v in g1.vertices) != sorted(g2.degree(v) for v in g2.vertices):
        return False, None
    c1, o1 = canonical_form(g1)
    c2, o2 = canonical_form(g2)
    if c1 != c2:
        return False, None
    return True, dict(zip(o1, o2))


def canonical_graph(g: SimpleGraph) -> SimpleGraph:
    """Relabel onto ``a, b, ...`` following the canonical order."""
    _, order = canonical_form(g)
    names = {v: _NAMES[i] for i, v in enumerate(order)}
    return SimpleGraph(
        tuple(_NAMES[: len(order)]),
        frozenset(frozenset(names[v] for v in e) for e in g.edges),
    )


def enumerate_catalog(n: int) -> list[SimpleGraph]:
    """All connected simplicial graphs on ``n`` vertices up to isomorphism.

    Graphs are grown one edge at a time from the empty graph, keeping one
    canonical representative per class; the result is sorted by
    ``(edge count, certificate)``.
    """
    if n < 1 or n > 8:
        raise ValueError("catalog supports 1 <= n <= 8")
    vs = list(_NAMES[:n])
    pairs = [(vs[i], vs[j]) for i in range(n) for j in range(i + 1, n)]
    level = {certificate(SimpleGraph.build(vs, [])): SimpleGraph.build(vs, [])}
    found: list[tuple[tuple, SimpleGraph]] = []
    for _ in range(len(pairs) + 1):
        for cert, g in level.items():
            if g.is_connected():
                found.append(((g.size, cert), g))
        nxt: dict = {}
        for g in level.values():
            for p in pairs:
                e = frozenset(p)
                if e in g.edges:
                    continue
                h = SimpleGraph(g.vertices, g.edges | {e})
                c = certificate(h)
                if c not in nxt:
                    nxt[c] = h
        level = nxt
        if not level:
            break
    found.sort(key=lambda t: t[0])
    return [canonical_graph(g) for _, g in found]


def catalog_index(g: SimpleGraph, catalog: list[SimpleGraph]) -> int | None:
    """Position (0-based) of the catalog graph isomorphic to ``g``."""
    c = certificate(g)
    for i, h in enumerate(catalog):
        if certificate(h) == c:
            return i
    return None


# --- Whitehead graphs -------------------------------------------------------


def taken_turns(g: GraphMap) -> set[Turn]:
    """Turns crossed by some iterate ``g^k(E)``.

    These are the turns in the edge images closed under the turn map.
    """
    dg = g.direction_map()
    out = set(g.edge_turns())
    frontier = list(out)
    while frontier:
        t = frontier.pop()
        s = make_turn(dg[t[0]], dg[t[1]])
        if s not in out:
            out.add(s)
            frontier.append(s)
    return {t for t in out if t[0] != t[1]}


@dataclass(frozen=True)
class WhiteheadGraphs:
    lw: SimpleGraph
    sw: SimpleGraph


def whitehead_graphs(g: GraphMap) -> WhiteheadGraphs:
    """Local graph on all directions and its restriction to periodic ones."""
    dirs = g.rose.directions()
    turns = taken_turns(g)
    lw = SimpleGraph.build(dirs, [t for t in turns])
    periodic = set(g.periodic_directions())
    sw = lw.induced(periodic)
    return WhiteheadGraphs(lw, sw)


@dataclass(frozen=True)
class IndexReport:
    indices: list[Fraction]
    total: Fraction
    flagged: list[int]


def index_list(iw: SimpleGraph | Iterable[SimpleGraph]) -> IndexReport:
    """Per-component index ``1 - k/2`` and their sum.

    Components with fewer than three vertices are not singularities; their
    positions are listed in ``flagged`` and they contribute nothing.
    """
    comps = iw.components() if isinstance(iw, SimpleGraph) else list(iw)
    indices, flagged = [], []
    for i, c in enumerate(comps):
        if c.order < 3:
            flagged.append(i)
            continue
        indices.append(1 - Fraction(c.order, 2))
    return IndexReport(indices, sum(indices, Fraction(0)), flagged)


def direction_sort(vs: Iterable[Letter]) -> list[Letter]:
    return sorted(vs, key=letter_key)
