"""Ideal decomposition diagrams and loop searches inside them.

Nodes are labeled structures whose purple graph is a labeling of a fixed
graph; directed edges are generating triples between nodes.  After pruning,
only the maximal strongly connected pieces remain.
"""
from __future__ import annotations

from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Sequence

import networkx as nx

from iwgraphs.ltt import (
    LttStructure,
    is_birecurrent,
    is_preadmissible_labeling,
    potential_construction_paths,
    relabel_turns,
)
from iwgraphs.maps import GraphMap
from iwgraphs.moves import (
    Composition,
    ConstructionError,
    GeneratingTriple,
    Kind,
    assemble_ideal_decomposition,
    extensions_from,
    realize_construction,
    switches_from,
)
from iwgraphs.whitehead import SimpleGraph
from iwgraphs.words import Letter, Rose, Turn, letter_key, letter_name, make_turn


@dataclass
class IdDiagram:
    graph: SimpleGraph
    rank: int
    nodes: list  # LttStructure, sorted by text form
    edges: list  # GeneratingTriple, both ends in ``nodes``
    components: list  # lists of node indices, one per strongly connected piece
    stats: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.index = {G: i for i, G in enumerate(self.nodes)}
        self.out_edges: dict[int, list[GeneratingTriple]] = {i: [] for i in range(len(self.nodes))}
        for t in self.edges:
            self.out_edges[self.index[t.source]].append(t)
        self.component_of = {v: c for c, comp in enumerate(self.components) for v in comp}

    def contains_triple(self, t: GeneratingTriple) -> bool:
        i, j = self.index.get(t.source), self.index.get(t.dest)
        if i is None or j is None:
            return False
        return any(e.dest == t.dest and e.fold == t.fold for e in self.out_edges[i])

    def embeds_loop(self, triples: Sequence[GeneratingTriple]) -> bool:
        return bool(triples) and all(self.contains_triple(t) for t in triples)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "graph": self.graph.to_text(),
            "rank": self.rank,
            "nodes": [G.to_text() for G in self.nodes],
            "edges": [
                {
                    "source": self.index[t.source],
                    "dest": self.index[t.dest],
                    "fold": str(t.fold),
                    "kind": t.kind.value,
                }
                for t in self.edges
            ],
            "components": self.components,
            "stats": self.stats,
        }


def _labelings(graph: SimpleGraph, rank: int) -> list[tuple[Letter, frozenset]]:
    """``(d^u, purple edge set)`` for every labeling, duplicates removed."""
    vs = list(graph.vertices)
    edges = [tuple(e) for e in graph.edges]
    out = []
    for du in Rose(rank).directions():
        labels = [d for d in Rose(rank).directions() if d != du]
        seen = set()
        for perm in permutations(labels):
            name = dict(zip(vs, perm))
            purple = frozenset(make_turn(name[x], name[y]) for x, y in edges)
            if purple not in seen:
                seen.add(purple)
                out.append((du, purple))
    return out


def _node_ok(G: LttStructure) -> bool:
    return is_preadmissible_labeling(G.purple_graph()) and is_birecurrent(G)


def node_candidates(graph: SimpleGraph, rank: int) -> list[LttStructure]:
    """Every labeled structure over ``graph`` before admissibility filtering."""
    if graph.order != 2 * rank - 1:
        raise ValueError(f"graph needs {2 * rank - 1} vertices for rank {rank}")
    out = []
    for du, purple in _labelings(graph, rank):
        for attach in Rose(rank).directions():
            if attach in (du, -du):
                continue
            out.append(LttStructure.standard(rank, du, attach, purple))
    return out


def build_id_diagram(graph: SimpleGraph, rank: int, jobs: int = 1) -> IdDiagram:
    """Nodes, triples and the pruning to maximal strongly connected subgraphs."""
    if not graph.is_connected():
        raise ValueError("graph must be connected")
    cands = node_candidates(graph, rank)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            keep = list(pool.map(_node_ok, cands, chunksize=64))
    else:
        keep = [_node_ok(G) for G in cands]
    nodes = {G for G, k in zip(cands, keep) if k}
    edges = []
    for G in sorted(nodes, key=lambda s: s.to_text()):
        for t in extensions_from(G, check_birecurrence=False) + switches_from(G, check_birecurrence=False):
            if t.source in nodes:
                edges.append(t)
    dg = nx.DiGraph()
    dg.add_nodes_from(nodes)
    dg.add_edges_from((t.source, t.dest) for t in edges)
    comps = []
    for comp in nx.strongly_connected_components(dg):
        if len(comp) > 1 or any(dg.has_edge(v, v) for v in comp):
            comps.append(comp)
    where = {v: i for i, c in enumerate(comps) for v in c}
    kept = sorted(where, key=lambda s: s.to_text())
    index = {G: i for i, G in enumerate(kept)}
    kept_edges = [t for t in edges if t.source in where and where.get(t.dest) == where[t.source]]
    components = sorted(sorted(index[v] for v in c) for c in comps)
    stats = {
        "candidates": len(cands),
        "admissible_nodes": len(nodes),
        "edges_before_pruning": len(edges),
        "nodes": len(kept),
        "edges": len(kept_edges),
        "components": len(components),
    }
    return IdDiagram(graph, rank, kept, kept_edges, components, stats)


# -- irreducibility potential --------------------------------------------


@dataclass
class PotentialTest:
    passed: list  # per component
    uncovered: list  # per component: edge indices never carrying the red vertex

    @property
    def verdict(self) -> str:
        return "potentially achieved" if any(self.passed) else "unachieved"


def irreducibility_potential_test(D: IdDiagram) -> PotentialTest:
    """Per component: does every edge pair carry the red vertex somewhere?"""
    passed, uncovered = [], []
    for comp in D.components:
        seen = {abs(D.nodes[v].unachieved) for v in comp}
        missing = sorted(set(range(1, D.rank + 1)) - seen)
        passed.append(not missing)
        uncovered.append(missing)
    return PotentialTest(passed, uncovered)


# -- extension subdiagram ------------------------------------------------


@dataclass
class ExtensionComponent:
    nodes: list  # node indices of the parent diagram
    edges: list  # extension triples
    pi_subgraph: frozenset  # purple edges shared by every member


def extension_subdiagram(D: IdDiagram) -> list[ExtensionComponent]:
    """Connected pieces of the extension edges, with their shared purple edges."""
    ug = nx.Graph()
    ext = [t for t in D.edges if t.kind is Kind.EXTENSION]
    for t in ext:
        ug.add_edge(D.index[t.source], D.index[t.dest])
    out = []
    for comp in sorted((sorted(c) for c in nx.connected_components(ug))):
        members = set(comp)
        shared = frozenset.intersection(*(D.nodes[v].purple_edges for v in comp))
        out.append(
            ExtensionComponent(comp, [t for t in ext if D.index[t.source] in members], shared)
        )
    return out


@dataclass(frozen=True)
class CompositionSubgraph:
    colored: frozenset  # turns
    black: frozenset  # edge indices
    vertices: frozenset


def potential_composition_subgraph(pi_edges: frozenset, rank: int) -> CompositionSubgraph:
    """Add all black edges, then strip valence-1 vertices until none are left."""
    colored = set(pi_edges)
    black = set(range(1, rank + 1))
    verts = {d for d in Rose(rank).directions()}
    while True:
        valence = {v: 0 for v in verts}
        for x, y in colored:
            valence[x] += 1
            valence[y] += 1
        for i in black:
            valence[i] += 1
            valence[-i] += 1
        lonely = sorted((v for v in verts if valence[v] <= 1), key=letter_key)
        if not lonely:
            break
        v = lonely[0]
        verts.discard(v)
        colored = {t for t in colored if v not in t}
        black.discard(abs(v))
    return CompositionSubgraph(frozenset(colored), frozenset(black), frozenset(verts))


# -- loop search ---------------------------------------------------------


@dataclass
class LoopCandidate:
    triples: list
    map: GraphMap
    flags: dict
    strategy: str
    switch_sequence_part: bool = False

    @property
    def length(self) -> int:
        return len(self.triples)


@dataclass
class SearchResult:
    candidates: list
    stats: dict


def _coverage_mask(G: LttStructure) -> int:
    return 1 << (abs(G.unachieved) - 1)


def _covering_path(D: IdDiagram, a: int, b: int, mask: int, max_len: int, allowed: set) -> list | None:
    """Shortest nonempty path ``a -> b`` after which every edge pair has been the red vertex.

    Breadth-first over ``(node, red-vertex mask)`` states; ``mask`` is the
    coverage already collected before leaving ``a``.
    """
    full = (1 << D.rank) - 1
    s0 = (a, mask | _coverage_mask(D.nodes[a]))
    parent: dict = {s0: None}
    frontier = deque([(s0, 0)])
    while frontier:
        state, depth = frontier.popleft()
        if depth >= max_len:
            continue
        v, m = state
        for t in D.out_edges[v]:
            w = D.index[t.dest]
            if w not in allowed:
                continue
            m2 = m | _coverage_mask(D.nodes[w])
            if w == b and m2 == full:
                path = [t]
                s = state
                while parent[s] is not None:
                    prev, e = parent[s]
                    path.append(e)
                    s = prev
                return path[::-1]
            nxt = (w, m2)
            if nxt not in parent:
                parent[nxt] = (state, t)
                frontier.append((nxt, depth + 1))
    return None


def _shortest_covering_loop(D: IdDiagram, start: int, max_len: int, allowed: set) -> list | None:
    return _covering_path(D, start, start, 0, max_len, allowed)


def _shortest_cycle_through(D: IdDiagram, v: int, max_len: int, allowed: set) -> list[list]:
    """Simple cycles through ``v`` of minimal length for each first edge."""
    out = []
    for first in D.out_edges[v]:
        w0 = D.index[first.dest]
        if w0 not in allowed:
            continue
        if w0 == v:
            out.append([first])
            continue
        parent = {w0: None}
        frontier = deque([(w0, 1)])
        found = None
        while frontier and found is None:
            u, depth = frontier.popleft()
            if depth >= max_len:
                continue
            for t in D.out_edges[u]:
                w = D.index[t.dest]
                if w not in allowed:
                    continue
                if w == v:
                    found = (u, t)
                    break
                if w not in parent:
                    parent[w] = (u, t)
                    frontier.append((w, depth + 1))
        if found:
            u, t = found
            path = [t]
            while parent[u] is not None:
                u, e = parent[u]
                path.append(e)
            path.append(first)
            out.append(path[::-1])
    return out


def _rotate_to(triples: list, node: LttStructure) -> list:
    for i, t in enumerate(triples):
        if t.source == node:
            return triples[i:] + triples[:i]
    raise ValueError("node not on loop")


def _augment(
    D: IdDiagram,
    loop: list,
    evaluate: Callable[[list], dict],
    flags: dict,
    max_aug: int,
    max_len: int,
    allowed: set,
) -> tuple[list, dict, int]:
    """Splice short cycles into ``loop`` while that shrinks the missing-edge list."""
    used = 0
    while not flags["graph_built"] and used < max_aug:
        best = None
        seen_nodes = []
        for t in loop:
            if t.source not in seen_nodes:
                seen_nodes.append(t.source)
        for node in seen_nodes:
            v = D.index[node]
            for cyc in _shortest_cycle_through(D, v, max_len, allowed):
                base = _rotate_to(loop, node)
                trial = cyc + base
                f = evaluate(trial)
                key = (len(f["missing_edges"]), not f["train_track"], len(trial))
                if best is None or key < best[0]:
                    best = (key, trial, f)
        if best is None or len(best[2]["missing_edges"]) >= len(flags["missing_edges"]):
            break
        _, loop, flags = best
        used += 1
    return loop, flags, used


def search_loops(
    D: IdDiagram,
    strategy: str = "ib",
    budget: int = 12,
    max_augmentations: int | None = None,
    evaluate: Callable[[list], dict] | None = None,
    max_candidates: int = 5,
) -> SearchResult:
    """Loops in ``D`` that cover every edge pair with the red vertex.

    ``budget`` bounds the loop length before augmentation (and, unless
    given separately, the number of augmentations).  ``evaluate`` maps a
    loop of triples to its verifier flags and defaults to
    :func:`iwgraphs.verifier.loop_flags`.
    """
    if strategy not in ("ia", "ib"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if evaluate is None:
        from iwgraphs.verifier import loop_flags as evaluate
    if max_augmentations is None:
        max_augmentations = budget
    stats = {"strategy": strategy, "budget": budget, "loops_tried": 0, "augmentations": 0}
    if budget <= 0 or not D.nodes:
        stats["exhausted"] = True
        return SearchResult([], stats)
    test = irreducibility_potential_test(D)
    out: list[LoopCandidate] = []
    seen: set = set()
    for c, comp in enumerate(D.components):
        if not test.passed[c]:
            continue
        allowed = set(comp)
        seeds = _ia_seeds(D, comp, budget) if strategy == "ia" else _ib_seeds(D, comp, budget, allowed)
        for loop in seeds:
            key = frozenset((t.source, t.fold) for t in loop)
            if key in seen:
                continue
            seen.add(key)
            stats["loops_tried"] += 1
            flags = evaluate(loop)
            loop, flags, used = _augment(D, loop, evaluate, flags, max_augmentations, budget, allowed)
            stats["augmentations"] += used
            _, g = assemble_ideal_decomposition(loop)
            out.append(
                LoopCandidate(
                    loop,
                    g,
                    flags,
                    strategy,
                    switch_sequence_part=any(t.kind is Kind.SWITCH for t in loop),
                )
            )
            if flags.get("accepted"):
                stats["exhausted"] = False
                return SearchResult(out, stats)
            if len(out) >= max_candidates:
                break
        if len(out) >= max_candidates:
            break
    stats["exhausted"] = not any(c.flags.get("accepted") for c in out)
    return SearchResult(out, stats)


def _ib_seeds(D: IdDiagram, comp: list, budget: int, allowed: set):
    """Shortest pretest loops through each node of the component."""
    for v in comp:
        loop = _shortest_covering_loop(D, v, budget, allowed)
        if loop is not None:
            yield loop


def _ia_seeds(D: IdDiagram, comp: list, budget: int):
    """Construction compositions realized in ``D``, closed up by a shortest return path.

    Longest construction paths come first; a path only counts when every
    one of its triples (and the leading switch) is an edge of ``D``.
    """
    members = [D.nodes[v] for v in comp]
    allowed = set(comp)
    found = []
    for G in members:
        for path in potential_construction_paths(G):
            if len(path) < 4:
                continue
            for sw in switches_from(G.with_red_edge(-path.vertices[-1])):
                try:
                    comp_ = realize_construction(path, G, switch_to=sw.source.attach)
                except ConstructionError:
                    continue
                if all(D.contains_triple(t) for t in comp_.triples):
                    found.append((len(path), comp_))
    found.sort(key=lambda p: (-p[0], len(p[1].triples)))
    for _, comp_ in found:
        tail = list(comp_.triples)
        start = D.index[tail[0].source]
        end = D.index[tail[-1].dest]
        mask = 0
        for t in tail:
            mask |= _coverage_mask(t.source)
        back = _covering_path(D, end, start, mask, budget, allowed)
        if back is None:
            continue
        loop = back + tail
        if len(loop) <= 2 * budget:
            yield loop

