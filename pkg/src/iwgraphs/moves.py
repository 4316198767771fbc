"""Proper full folds, generating triples and their compositions.

A fold ``x -> y x`` sends the oriented edge ``x`` to ``y x`` and fixes the
other edges.  Its direction map sends ``x`` to ``y`` and fixes every other
direction; the turn ``{x, ȳ}`` it creates is the red edge of the
destination structure, whose red vertex is ``x``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from iwgraphs.ltt import (
    LttStructure,
    SmoothPath,
    is_birecurrent,
    ltt_of_map,
    relabel_turns,
)
from iwgraphs.maps import GraphMap, compose
from iwgraphs.words import Letter, Turn, letter_key, letter_name, make_turn, parse_letter


@dataclass(frozen=True)
class Fold:
    rank: int
    x: Letter  # the folded oriented edge, ``e^pu`` (= ``e^u`` after the fold)
    y: Letter  # the edge it is folded over, ``e^a``

    def __post_init__(self) -> None:
        if abs(self.x) == abs(self.y):
            raise ValueError("a fold needs two distinct edge pairs")
        if not (0 < abs(self.x) <= self.rank and 0 < abs(self.y) <= self.rank):
            raise ValueError("fold letter outside the rose")

    def to_map(self) -> GraphMap:
        return GraphMap.from_dict(self.rank, {self.x: (self.y, self.x)})

    def direction_map(self) -> dict[Letter, Letter]:
        return {d: (self.y if d == self.x else d) for d in _dirs(self.rank)}

    @property
    def red_edge(self) -> Turn:
        """Turn created by the fold."""
        return make_turn(self.x, -self.y)

    def __str__(self) -> str:
        return f"{letter_name(self.x)}->{letter_name(self.y)}{letter_name(self.x)}"


def parse_fold(text: str, rank: int) -> Fold:
    """Inverse of ``str(Fold)``, e.g. ``A->bA``."""
    lhs, rhs = (s.strip() for s in text.split("->"))
    x = parse_letter(lhs)
    if len(rhs) != 2 or parse_letter(rhs[1]) != x:
        raise ValueError(f"not a fold line: {text!r}")
    return Fold(rank, x, parse_letter(rhs[0]))


def _dirs(rank: int) -> list[Letter]:
    out = []
    for i in range(1, rank + 1):
        out += [i, -i]
    return out


class Kind(str, Enum):
    EXTENSION = "extension"
    SWITCH = "switch"


@dataclass(frozen=True)
class GeneratingTriple:
    fold: Fold
    source: LttStructure
    dest: LttStructure
    kind: Kind

    @property
    def determining_edge(self) -> Turn:
        """Purple edge of the destination that the source red edge maps to."""
        (t,) = relabel_turns([self.source.red_edge], self.fold.direction_map())
        return t

    def violations(self) -> list[str]:
        out = []
        s, d, f = self.source, self.dest, self.fold
        if not (s.is_standard and d.is_standard):
            return ["structures must have one red vertex and one red edge"]
        if d.red_edge != f.red_edge or d.unachieved != f.x:
            out.append("destination red edge is not the turn created by the fold")
        if self.kind is Kind.EXTENSION and s.unachieved != f.x:
            out.append("extension source red vertex must be the folded direction")
        if self.kind is Kind.SWITCH and s.unachieved != f.y:
            out.append("switch source red vertex must be the direction folded over")
        try:
            induced_ltt_map(self)
        except ValueError as exc:
            out.append(str(exc))
        return out

    @property
    def admissibility(self) -> str:
        """Verdict under the conditions checked here: well-formed, both ends birecurrent."""
        ok = not self.violations() and is_birecurrent(self.source) and is_birecurrent(self.dest)
        return "admissible (stated conditions)" if ok else "not admissible"

    def __str__(self) -> str:
        return f"{self.kind.value} {self.fold}: {self.source.to_text()}  =>  {self.dest.to_text()}"


def induced_ltt_map(t: GeneratingTriple) -> dict[Letter, Letter]:
    """Vertex map ``D^T g`` restricted to the purple part of the source.

    Raises ``ValueError`` unless it is an isomorphism ``PI(source) -> PI(dest)``
    and the source red edge lands on a purple edge of the destination.
    """
    dm = t.fold.direction_map()
    pv = t.source.purple_vertices
    mapping = {v: dm[v] for v in pv}
    if sorted(mapping.values(), key=letter_key) != sorted(t.dest.purple_vertices, key=letter_key):
        raise ValueError("induced map is not a bijection on purple vertices")
    if relabel_turns(t.source.purple_edges, mapping) != t.dest.purple_edges:
        raise ValueError("induced map is not an isomorphism of purple graphs")
    if relabel_turns([t.source.red_edge], dm) - t.dest.purple_edges:
        raise ValueError("source red edge does not map onto a purple edge")
    return mapping


def preimage_subgraph(H: Iterable[Turn], t: GeneratingTriple) -> frozenset:
    """Pull purple edges of ``t.dest`` back to ``t.source`` along the PI isomorphism."""
    H = frozenset(H)
    if not H <= t.dest.purple_edges:
        raise ValueError("subgraph is not contained in the destination purple graph")
    inverse = {v: k for k, v in induced_ltt_map(t).items()}
    return relabel_turns(H, inverse)


def _valid_node(G: LttStructure) -> bool:
    return G.attach != -G.unachieved


def extensions_from(G: LttStructure, check_birecurrence: bool = True) -> list[GeneratingTriple]:
    """Extensions into ``G``, one per purple edge at ``d^a``."""
    x, y = G.unachieved, G.achieved
    out = []
    for d in _purple_neighbors(G, y):
        if d == -x:
            continue
        src = G.with_red_edge(d)
        if check_birecurrence and not is_birecurrent(src):
            continue
        out.append(GeneratingTriple(Fold(G.rank, x, y), src, G, Kind.EXTENSION))
    return out


def switches_from(
    G: LttStructure, check_birecurrence: bool = True, exclude: Letter | None = None
) -> list[GeneratingTriple]:
    """Switches into ``G``, one per purple edge ``[d^a, d]``.

    ``exclude`` drops the edge ``[d^a, exclude]``; when planning a switch in
    front of a construction composition it is ``d̄^u`` of that
    composition's destination.
    """
    x, y = G.unachieved, G.achieved
    out = []
    for d in _purple_neighbors(G, y):
        if d == -y or d == exclude:
            continue
        purple = relabel_turns(G.purple_edges, {y: x})
        src = LttStructure.standard(G.rank, y, d, purple)
        if check_birecurrence and not is_birecurrent(src):
            continue
        out.append(GeneratingTriple(Fold(G.rank, x, y), src, G, Kind.SWITCH))
    return out


def _purple_neighbors(G: LttStructure, v: Letter) -> list[Letter]:
    out = []
    for a, b in G.purple_edges:
        if a == v:
            out.append(b)
        elif b == v:
            out.append(a)
    return sorted(out, key=letter_key)


def triples_into(G: LttStructure) -> list[GeneratingTriple]:
    """Extensions first, then switches, each in determining-edge order."""
    return extensions_from(G) + switches_from(G)


# -- compositions --------------------------------------------------------


class CompositionKind(str, Enum):
    PURIFIED_CONSTRUCTION = "purified construction"
    CONSTRUCTION = "construction"
    SWITCH_SEQUENCE = "switch sequence"
    GENERIC = "generic admissible"


@dataclass(frozen=True)
class Composition:
    """Triples in the order the folds are applied."""

    triples: tuple

    def __post_init__(self) -> None:
        for i, (s, t) in enumerate(zip(self.triples, self.triples[1:])):
            if s.dest != t.source:
                raise ValueError(f"triples {i} and {i + 1} do not chain")

    @property
    def kind(self) -> CompositionKind:
        kinds = [t.kind for t in self.triples]
        if kinds and all(k is Kind.EXTENSION for k in kinds):
            return CompositionKind.PURIFIED_CONSTRUCTION
        if kinds and kinds[0] is Kind.SWITCH and all(k is Kind.EXTENSION for k in kinds[1:]):
            return CompositionKind.CONSTRUCTION if len(kinds) > 1 else CompositionKind.SWITCH_SEQUENCE
        if kinds and all(k is Kind.SWITCH for k in kinds):
            return CompositionKind.SWITCH_SEQUENCE
        return CompositionKind.GENERIC

    @property
    def folds(self) -> list[Fold]:
        return [t.fold for t in self.triples]

    def to_map(self) -> GraphMap:
        return compose_folds(self.folds)

    def structures(self) -> list[LttStructure]:
        if not self.triples:
            return []
        return [self.triples[0].source] + [t.dest for t in self.triples]

    def to_text(self) -> str:
        lines = [str(self.triples[0].source)] if self.triples else []
        for t in self.triples:
            lines.append(f"{t.fold}  # {t.kind.value}")
            lines.append(str(t.dest))
        return "\n".join(lines)


def compose_folds(folds: Sequence[Fold], rank: int | None = None) -> GraphMap:
    """Composite of folds applied in the given order."""
    if not folds:
        if rank is None:
            raise ValueError("rank needed for an empty composition")
        return GraphMap.identity(rank)
    g = folds[0].to_map()
    for f in folds[1:]:
        g = compose(f.to_map(), g)
    return g


class ConstructionError(ValueError):
    def __init__(self, message: str, step: int):
        super().__init__(f"step {step}: {message}")
        self.step = step


def realize_construction(path: SmoothPath, G: LttStructure, switch_to: Letter | None = None) -> Composition:
    """Extensions ``G_n -> ... -> G_1 = G`` tracing a potential construction path.

    ``G_t`` is ``G`` with its red edge moved to ``[d^u, x̄_t]``.  With
    ``switch_to`` a switch into ``G_n`` whose source red edge is
    ``[x_n, switch_to]`` is prepended.
    """
    vs = path.vertices
    if len(vs) < 3 or len(vs) % 2 == 0:
        raise ConstructionError("path must end with a black edge", 0)
    du = G.unachieved
    if vs[0] != du or make_turn(vs[0], vs[1]) != G.red_edge:
        raise ConstructionError("path must start along the red edge", 0)
    xs = [vs[i] for i in range(2, len(vs), 2)]
    for i, x in enumerate(xs):
        if vs[2 * i + 1] != -x:
            raise ConstructionError("consecutive vertices must be joined by a black edge", i + 1)
    structures = []
    for t, x in enumerate(xs, 1):
        if t > 1 and make_turn(xs[t - 2], -x) not in G.purple_edges:
            raise ConstructionError(f"[{letter_name(xs[t - 2])}, {letter_name(-x)}] is not a purple edge", t)
        Gt = G if t == 1 else G.with_red_edge(-x)
        if not _valid_node(Gt) or not is_birecurrent(Gt):
            raise ConstructionError(f"structure G_{t} is not birecurrent", t)
        structures.append(Gt)
    triples = []
    if switch_to is not None:
        Gn = structures[-1]
        options = [s for s in switches_from(Gn) if s.source.attach == switch_to]
        if not options:
            raise ConstructionError("no admissible switch with that red edge", len(xs))
        triples.append(options[0])
    for t in range(len(xs), 1, -1):
        triples.append(GeneratingTriple(Fold(G.rank, du, xs[t - 2]), structures[t - 1], structures[t - 2], Kind.EXTENSION))
    return Composition(tuple(triples))


def construction_path(comp: Composition, destination: LttStructure | None = None) -> SmoothPath:
    """Path ``[d^u, x̄_1, x_1, ..., x̄_n, x_n]`` read off the achieved directions.

    ``x_t`` is ``d^a`` of the ``t``-th structure counted back from the final
    destination; a leading switch contributes no extra step.
    """
    ext = [t for t in comp.triples if t.kind is Kind.EXTENSION]
    if any(t.kind is not Kind.EXTENSION for t in comp.triples[1:]):
        raise ValueError("not a construction composition")
    final = comp.triples[-1].dest if comp.triples else destination
    if final is None:
        raise ValueError("empty composition needs its destination")
    chain = [final] + [t.source for t in reversed(ext)]
    vs = [final.unachieved]
    for G in chain:
        vs += [G.attach, G.achieved]
    return SmoothPath(tuple(vs))


# -- switch sequences ----------------------------------------------------


def switch_sequence(triples: Sequence[GeneratingTriple]) -> tuple[Composition, SmoothPath]:
    """Validate the switch-sequence conditions and return the switch path.

    The path runs, in the final destination, along the red edges of the
    destination structures from last to first with black edges between.
    """
    comp = Composition(tuple(triples))
    for i, t in enumerate(triples):
        if t.kind is not Kind.SWITCH:
            raise ValueError(f"triple {i} is not a switch")
    dests = [t.dest for t in triples]
    for n in range(len(dests)):
        for l in range(n):
            if dests[n].unachieved == dests[l].unachieved:
                raise ValueError(f"red vertices of structures {l} and {n} coincide")
            if dests[l].attach == dests[n].unachieved:
                raise ValueError(f"red edge of structure {l} is attached at the red vertex of structure {n}")
    vs = [dests[-1].unachieved]
    for G in reversed(dests):
        vs += [G.attach, G.achieved]
    path = SmoothPath(tuple(vs))
    if not path.is_smooth_in(dests[-1]):
        raise ValueError("switch path is not smooth in the destination")
    return comp, path


# -- ideal decompositions ------------------------------------------------


@dataclass(frozen=True)
class IdealDecomposition:
    folds: tuple
    structures: tuple  # G_0 .. G_n with G_0 == G_n
    triples: tuple

    @property
    def rank(self) -> int:
        return self.folds[0].rank

    def to_map(self) -> GraphMap:
        return compose_folds(self.folds)

    def direction_census(self) -> dict:
        g = self.to_map()
        periodic = g.periodic_directions()
        fixed = [d for d, p in periodic.items() if p == 1]
        return {
            "periodic": len(periodic),
            "fixed": len(fixed),
            "periodic_not_fixed": len(fixed) != len(periodic),
        }


def assemble_ideal_decomposition(triples: Sequence[GeneratingTriple]) -> tuple[IdealDecomposition, GraphMap]:
    if not triples:
        raise ValueError("empty loop")
    Composition(tuple(triples))
    if triples[-1].dest != triples[0].source:
        raise ValueError("triples do not close up into a loop")
    folds = tuple(t.fold for t in triples)
    structs = (triples[0].source,) + tuple(t.dest for t in triples)
    dec = IdealDecomposition(folds, structs, tuple(triples))
    return dec, dec.to_map()


def peel_front(g: GraphMap) -> list[tuple[Fold, GraphMap]]:
    """All ways to write ``g = f ∘ (x -> y x)``: ``g(x)`` must start with ``g(y)``."""
    out = []
    for x in g.rose.directions():
        gx = g.image(x)
        for y in g.rose.directions():
            if abs(y) == abs(x):
                continue
            gy = g.image(y)
            if len(gy) < len(gx) and gx[: len(gy)] == gy:
                rest = gx[len(gy):]
                imgs = list(g.images)
                imgs[abs(x) - 1] = rest if x > 0 else tuple(-z for z in reversed(rest))
                out.append((Fold(g.rank, x, y), GraphMap(g.rank, tuple(imgs))))
    return out


def decompose_representative(g: GraphMap, limit: int = 200000) -> list[Fold] | None:
    """Folds, in application order, composing to ``g``; ``None`` if none found.

    Depth-first peeling of folds off the front until the identity remains.
    """
    seen: set = set()
    identity = GraphMap.identity(g.rank)

    def rec(h: GraphMap) -> list[Fold] | None:
        if h == identity:
            return []
        if h in seen or len(seen) > limit:
            return None
        seen.add(h)
        for f, rest in peel_front(h):
            tail = rec(rest)
            if tail is not None:
                return [f] + tail
        return None

    return rec(g)


def rotations(folds: Sequence[Fold]) -> list[GraphMap]:
    """``f_k = g_k ∘ ... ∘ g_1 ∘ g_n ∘ ... ∘ g_{k+1}`` for ``k = 0..n-1``."""
    n = len(folds)
    return [compose_folds(list(folds[k:]) + list(folds[:k])) for k in range(n)]


def decomposition_triples(folds: Sequence[Fold]) -> IdealDecomposition:
    """Structures ``G_k = G(f_k)`` and the triples ``(g_k, G_{k-1}, G_k)``."""
    n = len(folds)
    structs = [ltt_of_map(f) for f in rotations(folds)]
    # rotations()[k] is the map based at Γ_k; G_n = G_0
    triples = []
    for k in range(1, n + 1):
        src, dst = structs[k - 1], structs[k % n]
        f = folds[k - 1]
        kind = Kind.EXTENSION if src.is_standard and src.unachieved == f.x else Kind.SWITCH
        triples.append(GeneratingTriple(f, src, dst, kind))
    return IdealDecomposition(tuple(folds), tuple(structs) + (structs[0],), tuple(triples))


# -- achieved subgraphs --------------------------------------------------


def split_segments(triples: Sequence[GeneratingTriple]) -> list[Composition]:
    """Maximal runs of extensions and maximal runs of switches, in order."""
    out: list[list[GeneratingTriple]] = []
    for t in triples:
        if out and out[-1][-1].kind is t.kind:
            out[-1].append(t)
        else:
            out.append([t])
    return [Composition(tuple(run)) for run in out]


def achieved_subgraph_sequence(segments: Sequence[Composition]) -> list[frozenset]:
    """Purple edges ``G^a_1, G^a_2, ...`` guaranteed by the construction paths.

    ``segments`` alternate purified construction compositions and switch
    runs, in application order.  Walking backwards from the last segment,
    each construction composition contributes the purple edges of its
    construction path and each switch run pulls the accumulated edges back
    to its source.  Extensions do not change purple graphs, so no pullback
    is needed across them.  The last entry lives in the purple graph of the
    first source structure.
    """
    kinds = []
    for i, seg in enumerate(segments):
        k = seg.kind
        if k is CompositionKind.PURIFIED_CONSTRUCTION:
            kinds.append(Kind.EXTENSION)
        elif all(t.kind is Kind.SWITCH for t in seg.triples) and seg.triples:
            kinds.append(Kind.SWITCH)
        else:
            raise ValueError(f"segment {i} is neither a run of extensions nor of switches")
        if i and kinds[-1] is kinds[-2]:
            raise ValueError(f"segments {i - 1} and {i} are of the same kind")
        if i and segments[i - 1].triples[-1].dest != seg.triples[0].source:
            raise ValueError(f"segments {i - 1} and {i} do not chain")
    acc: frozenset = frozenset()
    out = []
    for seg, kind in zip(reversed(segments), reversed(kinds)):
        if kind is Kind.EXTENSION:
            path = construction_path(seg)
            acc = acc | frozenset(path.colored_edges()[1:])
            out.append(acc)
        else:
            for t in reversed(seg.triples):
                acc = preimage_subgraph(acc, t)
    if kinds and kinds[0] is Kind.SWITCH:
        out.append(acc)
    return out


def rotate_to_extension(triples: Sequence[GeneratingTriple]) -> list[GeneratingTriple]:
    """Rotate a loop of triples to start with an extension preceded by a switch."""
    n = len(triples)
    for i in range(n):
        if triples[i].kind is Kind.EXTENSION and triples[i - 1].kind is Kind.SWITCH:
            return list(triples[i:]) + list(triples[:i])
    return list(triples)
