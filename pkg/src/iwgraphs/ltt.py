"""Lamination train track structures on the rose.

A structure has one vertex per direction.  Black edges join each direction
to its inverse and are implicit.  Colored edges are turns; those touching a
red vertex are red, the others purple.  The usual (r; 3/2 - r) structures
have a single red vertex ``d^u`` (the *unachieved* direction) and a single
red edge ``[d^u, d̄^a]``; :meth:`LttStructure.standard` builds those.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable

import networkx as nx

from iwgraphs.maps import GraphMap
from iwgraphs.whitehead import SimpleGraph, taken_turns
from iwgraphs.words import Letter, Rose, Turn, letter_key, letter_name, make_turn, parse_letter, parse_turn, turn_name


def _sorted_turns(turns: Iterable[Turn]) -> list[Turn]:
    return sorted(turns, key=lambda t: (letter_key(t[0]), letter_key(t[1])))


@dataclass(frozen=True)
class LttStructure:
    rank: int
    red_vertices: frozenset
    colored_edges: frozenset
    # set by ltt_of_map when the periodic census is not 2r-1
    flag: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        dirs = set(Rose(self.rank).directions())
        if not set(self.red_vertices) <= dirs:
            raise ValueError("red vertex outside the direction set")
        for t in self.colored_edges:
            if t != make_turn(*t):
                raise ValueError(f"turn {t} is not normalized")
            if t[0] == t[1] or not {t[0], t[1]} <= dirs:
                raise ValueError(f"bad colored edge {t}")

    # -- constructors --------------------------------------------------

    @classmethod
    def standard(cls, rank: int, red: Letter, attach: Letter, purple: Iterable[Turn]) -> LttStructure:
        """Structure with red vertex ``red`` and red edge ``[red, attach]``."""
        purple = frozenset(make_turn(*t) for t in purple)
        for t in purple:
            if red in t:
                raise ValueError("purple edge touches the red vertex")
        if attach == red:
            raise ValueError("red edge cannot be a loop")
        return cls(rank, frozenset([red]), purple | {make_turn(red, attach)})

    # -- derived data --------------------------------------------------

    @property
    def directions(self) -> list[Letter]:
        return Rose(self.rank).directions()

    @property
    def purple_vertices(self) -> list[Letter]:
        return [d for d in self.directions if d not in self.red_vertices]

    @cached_property
    def red_edges(self) -> frozenset:
        return frozenset(t for t in self.colored_edges if t[0] in self.red_vertices or t[1] in self.red_vertices)

    @cached_property
    def purple_edges(self) -> frozenset:
        return self.colored_edges - self.red_edges

    @property
    def is_standard(self) -> bool:
        """One red vertex, one red edge and ``2r - 1`` purple vertices."""
        if len(self.red_vertices) != 1 or len(self.red_edges) != 1:
            return False
        (t,) = self.red_edges
        return not (t[0] in self.red_vertices and t[1] in self.red_vertices)

    def _need_standard(self) -> None:
        if not self.is_standard:
            raise ValueError("structure does not have a unique red vertex and red edge")

    @property
    def unachieved(self) -> Letter:
        """The red vertex ``d^u``."""
        self._need_standard()
        return next(iter(self.red_vertices))

    @property
    def red_edge(self) -> Turn:
        self._need_standard()
        return next(iter(self.red_edges))

    @property
    def attach(self) -> Letter:
        """Purple endpoint ``d̄^a`` of the red edge."""
        t = self.red_edge
        return t[1] if t[0] == self.unachieved else t[0]

    @property
    def achieved(self) -> Letter:
        """``d^a``, the inverse of the attaching vertex."""
        return -self.attach

    def purple_graph(self) -> SimpleGraph:
        """``PI(G)``: the purple part as a direction-labeled graph."""
        return SimpleGraph.build(self.purple_vertices, self.purple_edges)

    def colored_graph(self) -> SimpleGraph:
        return SimpleGraph.build(self.directions, self.colored_edges)

    def with_red_edge(self, attach: Letter) -> LttStructure:
        """Same purple graph with the red edge moved to ``[d^u, attach]``."""
        return LttStructure.standard(self.rank, self.unachieved, attach, self.purple_edges)

    def violations(self) -> list[str]:
        """Failed conditions among ltt1-ltt3 and the single-red-edge condition."""
        out = []
        if not self.is_standard:
            if len(self.red_vertices) != 1:
                out.append(f"expected one red vertex, found {len(self.red_vertices)}")
            if len(self.red_edges) != 1:
                out.append(f"expected one red edge, found {len(self.red_edges)}")
            return out
        if self.attach == -self.unachieved:
            out.append("red edge attached at the inverse of the red vertex")
        return out

    # -- text form -----------------------------------------------------

    def to_text(self) -> str:
        red = ",".join(letter_name(d) for d in sorted(self.red_vertices, key=letter_key))
        edges = ",".join(turn_name(t) for t in _sorted_turns(self.colored_edges))
        return f"r={self.rank}; red={red}; E={edges}"

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"LttStructure({self.to_text()!r})"


def parse_ltt(text: str) -> LttStructure:
    """Inverse of :meth:`LttStructure.to_text`."""
    parts = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if chunk:
            k, v = chunk.split("=", 1)
            parts[k.strip()] = v.strip()
    rank = int(parts["r"])
    red = frozenset(parse_letter(s) for s in parts.get("red", "").split(",") if s)
    edges = frozenset(parse_turn(s) for s in parts.get("E", "").split(",") if s)
    return LttStructure(rank, red, edges)


def ltt_of_map(g: GraphMap) -> LttStructure:
    """``G(g)``: directions as vertices, taken turns as colored edges.

    Nonperiodic directions are red.  When the number of periodic directions
    is not ``2r - 1`` the structure is still returned, with ``flag`` set.
    """
    periodic = set(g.periodic_directions())
    red = frozenset(d for d in g.rose.directions() if d not in periodic)
    s = LttStructure(g.rank, red, frozenset(taken_turns(g)))
    if len(periodic) != 2 * g.rank - 1:
        return LttStructure(s.rank, s.red_vertices, s.colored_edges, flag=f"{len(periodic)} periodic directions")
    if not s.is_standard:
        return LttStructure(s.rank, s.red_vertices, s.colored_edges, flag="red edge not unique")
    return s


# -- birecurrency --------------------------------------------------------


def smooth_step_digraph(G: LttStructure) -> nx.DiGraph:
    """States are oriented edges ``(kind, tail, head)``.

    A colored step ending at ``v`` continues along the black edge at ``v``;
    a black step ending at ``v`` continues along any colored edge at ``v``.
    """
    dg = nx.DiGraph()
    at: dict[Letter, list[Letter]] = {d: [] for d in G.directions}
    for x, y in G.colored_edges:
        at[x].append(y)
        at[y].append(x)
    for d in G.directions:
        dg.add_node(("b", d, -d))
        for w in at[d]:
            dg.add_node(("c", d, w))
    for d in G.directions:
        for w in at[d]:
            dg.add_edge(("c", d, w), ("b", w, -w))
            dg.add_edge(("b", -d, d), ("c", d, w))
    return dg


def _edge_of(state) -> tuple:
    kind, x, y = state
    return (kind, make_turn(x, y))


def is_birecurrent(G: LttStructure) -> bool:
    """Whether a single recurrent class of smooth steps covers every edge.

    Every black and colored edge must appear (in some orientation) in one
    strongly connected component with at least one cycle.
    """
    return _birecurrent(G.rank, frozenset(G.colored_edges))


@lru_cache(maxsize=1 << 16)
def _birecurrent(rank: int, colored: frozenset) -> bool:
    G = LttStructure(rank, frozenset(), colored)
    dg = smooth_step_digraph(G)
    need = {("b", make_turn(d, -d)) for d in G.directions if d > 0}
    need |= {("c", t) for t in colored}
    for comp in nx.strongly_connected_components(dg):
        if len(comp) < 2:
            continue
        if need <= {_edge_of(s) for s in comp}:
            return True
    return False


def edge_pair_edges(turns: Iterable[Turn]) -> list[Turn]:
    return [t for t in turns if t[0] == -t[1]]


def is_preadmissible_labeling(g: SimpleGraph, valence_one_only: bool = True) -> bool:
    """At most one edge of the form ``{x, x̄}`` with an endpoint of valence 1.

    ``valence_one_only=False`` counts every edge-pair edge instead.
    """
    pairs = edge_pair_edges(make_turn(*tuple(e)) for e in g.edges)
    if valence_one_only:
        pairs = [t for t in pairs if g.degree(t[0]) == 1 or g.degree(t[1]) == 1]
    return len(pairs) <= 1


# -- construction subgraphs and paths ------------------------------------


@dataclass(frozen=True)
class Subgraph:
    """Part of a structure: kept colored edges and black edges by edge index."""

    colored: frozenset
    black: frozenset

    def vertices(self) -> set[Letter]:
        out: set[Letter] = set()
        for x, y in self.colored:
            out |= {x, y}
        for i in self.black:
            out |= {i, -i}
        return out


def construction_subgraph(G: LttStructure) -> Subgraph:
    """``G_C``: what a construction path may use.

    Drop the black edge at ``d^u`` and every purple edge at ``d̄^u``; then
    repeatedly, for a vertex with no colored edge left, drop its black edge
    and the purple edges at its inverse.
    """
    du = G.unachieved
    colored = {t for t in G.colored_edges if -du not in t}
    black = {abs(d) for d in G.directions if d > 0} - {abs(du)}
    while True:
        touched = {x for t in colored for x in t}
        lonely = [d for d in G.directions if d not in touched and abs(d) in black]
        if not lonely:
            return Subgraph(frozenset(colored), frozenset(black))
        for d in lonely:
            black.discard(abs(d))
            colored = {t for t in colored if -d not in t or t in G.red_edges}


def _reapply(G: LttStructure, H: Subgraph) -> Subgraph:
    """One more pass of the pruning loop starting from ``H``; used to test idempotence."""
    colored, black = set(H.colored), set(H.black)
    while True:
        touched = {x for t in colored for x in t}
        lonely = [d for d in G.directions if d not in touched and abs(d) in black]
        if not lonely:
            return Subgraph(frozenset(colored), frozenset(black))
        for d in lonely:
            black.discard(abs(d))
            colored = {t for t in colored if -d not in t or t in G.red_edges}


@dataclass(frozen=True)
class SmoothPath:
    """Vertex sequence of a path alternating colored and black edges.

    The first edge is colored.  ``len(path)`` counts edges.
    """

    vertices: tuple

    def __len__(self) -> int:
        return len(self.vertices) - 1

    def edges(self) -> list[tuple[str, Turn]]:
        out = []
        for i, (x, y) in enumerate(zip(self.vertices, self.vertices[1:])):
            out.append(("c" if i % 2 == 0 else "b", make_turn(x, y)))
        return out

    def colored_edges(self) -> list[Turn]:
        return [t for k, t in self.edges() if k == "c"]

    def is_smooth_in(self, G: LttStructure) -> bool:
        for k, t in self.edges():
            if k == "b" and t[0] != -t[1]:
                return False
            if k == "c" and t not in G.colored_edges:
                return False
        return True

    def __str__(self) -> str:
        return "[" + ", ".join(letter_name(d) for d in self.vertices) + "]"


def potential_construction_paths(G: LttStructure, max_len: int | None = None) -> list[SmoothPath]:
    """Smooth paths ``[d^u, d̄^a, d^a, x̄_2, x_2, ...]`` inside ``G_C``.

    Every path ends with a black edge and each intermediate structure
    (red edge moved to ``[d^u, x̄_t]``) is birecurrent.  ``max_len`` counts
    edges and defaults to ``2(2r - 1)``.
    """
    if max_len is None:
        max_len = 2 * (2 * G.rank - 1)
    if max_len < 2:
        return []
    sub = construction_subgraph(G)
    du, da = G.unachieved, G.achieved
    if abs(da) not in sub.black or G.red_edge not in sub.colored:
        return []
    purple_at: dict[Letter, list[Letter]] = {d: [] for d in G.directions}
    for x, y in sub.colored:
        if (x, y) in G.red_edges:
            continue
        purple_at[x].append(y)
        purple_at[y].append(x)
    for d in purple_at:
        purple_at[d].sort(key=letter_key)
    birec: dict[Letter, bool] = {}

    def moved_ok(xbar: Letter) -> bool:
        if xbar not in birec:
            birec[xbar] = xbar != -du and is_birecurrent(G.with_red_edge(xbar))
        return birec[xbar]

    out: list[SmoothPath] = []

    def extend(path: list[Letter]) -> None:
        out.append(SmoothPath(tuple(path)))
        if len(path) - 1 + 2 > max_len:
            return
        last = path[-1]
        for xbar in purple_at[last]:
            if abs(xbar) not in sub.black or not moved_ok(xbar):
                continue
            extend(path + [xbar, -xbar])

    extend([du, -da, da])
    return out


# -- preimages and achieved subgraphs ------------------------------------


def relabel_turns(turns: Iterable[Turn], mapping: dict[Letter, Letter]) -> frozenset:
    return frozenset(make_turn(mapping.get(x, x), mapping.get(y, y)) for x, y in turns)


def _sorted_names(turns: Iterable[Turn]) -> list[str]:
    return [turn_name(t) for t in _sorted_turns(turns)]
