"""Final checks on candidate representatives.

The pipeline in :func:`verify_representative` checks the train track
property, passes to a power fixing the periodic directions, counts them,
tests the transition matrix, searches for periodic Nielsen paths within
bounds, and compares the stable Whitehead graph against a target.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from iwgraphs.ltt import LttStructure
from iwgraphs.maps import GraphMap, is_irreducible_matrix, is_perron_frobenius, periods_lcm
from iwgraphs.moves import (
    Fold,
    GeneratingTriple,
    IdealDecomposition,
    achieved_subgraph_sequence,
    assemble_ideal_decomposition,
    decompose_representative,
    decomposition_triples,
    rotate_to_extension,
    split_segments,
)
from iwgraphs.whitehead import (
    SimpleGraph,
    are_isomorphic,
    catalog_index,
    enumerate_catalog,
    index_list,
    whitehead_graphs,
)
from iwgraphs.words import Letter, Turn, bar_pair, letter_key, letter_name, make_turn, reduce_letters, turn_name


class Verdict(str, Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    INCONCLUSIVE = "inconclusive"


EXIT_CODES = {Verdict.ACCEPTED: 0, Verdict.REJECTED: 2, Verdict.INCONCLUSIVE: 3}


# -- red vertices and powers ---------------------------------------------


@dataclass(frozen=True)
class Coverage:
    covered: bool
    uncovered: tuple  # edge indices i with neither E_i nor its inverse red

    def __bool__(self) -> bool:
        return self.covered


def check_red_vertex_coverage(structures: Iterable[LttStructure], rank: int | None = None) -> Coverage:
    """Whether every edge pair supplies the red vertex of some structure."""
    structures = list(structures)
    if rank is None:
        rank = structures[0].rank
    seen = {abs(d) for G in structures for d in G.red_vertices}
    missing = tuple(i for i in range(1, rank + 1) if i not in seen)
    return Coverage(not missing, missing)


def rotationless_power(g: GraphMap) -> tuple[int, GraphMap]:
    """Least ``k`` fixing every periodic direction, and ``g^k``."""
    k = periods_lcm(g)
    return k, g.power(k)


def orbit_condition(g: GraphMap) -> bool:
    """Every ``E_j`` has some iterate crossing ``E_i`` or its inverse, for all ``i, j``.

    Tracks the oriented letters reachable from each oriented edge under
    iteration until nothing new appears.
    """
    dirs = g.rose.directions()
    reach = {d: set(g.image(d)) for d in dirs}
    changed = True
    while changed:
        changed = False
        for d in dirs:
            new = set()
            for x in reach[d]:
                new |= reach[x]
            if not new <= reach[d]:
                reach[d] |= new
                changed = True
    return all(i in reach[j] or -i in reach[j] for j in range(1, g.rank + 1) for i in range(1, g.rank + 1))


# -- periodic Nielsen paths ----------------------------------------------


@dataclass(frozen=True)
class PnpWitness:
    """A path ``ᾱβ`` with ``g^k(ᾱβ) ≃ ᾱβ`` rel endpoints.

    ``alpha`` and ``beta`` list the edges met by the two legal halves (the
    last edge of each may be crossed only partially, up to ``t_star`` in the
    eigenvector metric).  For vertex-to-vertex witnesses ``t_star`` is None
    and ``alpha`` holds the whole path.
    """

    period: int
    turn: Turn | None
    alpha: tuple
    beta: tuple
    t_star: float | None

    def to_json(self) -> dict:
        w = lambda ls: "".join(letter_name(x) for x in ls)
        return {
            "period": self.period,
            "turn": turn_name(self.turn) if self.turn else None,
            "alpha": w(self.alpha),
            "beta": w(self.beta),
            "t_star": self.t_star,
        }


@dataclass
class PnpSearch:
    witnesses: list
    len_bound: int
    iter_bound: int
    truncated: bool = False


def _pf_data(g: GraphMap) -> tuple[float, np.ndarray] | None:
    """Growth rate and edge lengths with ``L(g(E)) = λ L(E)``, if expanding."""
    m = g.transition_matrix().astype(float)
    if not is_irreducible_matrix(m):
        return None
    vals, vecs = np.linalg.eig(m.T)
    i = int(np.argmax(vals.real))
    lam = float(vals[i].real)
    v = np.abs(vecs[:, i].real)
    if lam <= 1 + 1e-9 or np.any(v <= 0):
        return None
    return lam, v / v.min()


class _Exhausted(Exception):
    """The common prefix used up one whole image; more letters are needed."""

    def __init__(self, side: int, truncated: bool):
        super().__init__(side, truncated)
        self.side = side
        self.truncated = truncated


def _lcp(a: tuple, b: tuple) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


def _expand(images: dict, word: tuple, limit: int) -> tuple[list, bool]:
    """Leading letters of the image of ``word`` (at least ``limit`` if available); ``True`` if complete."""
    out: list[Letter] = []
    for i, x in enumerate(word):
        out.extend(images[x])
        if len(out) >= limit and i < len(word) - 1:
            return out, False
    return out, True


def _tighten(images: dict, A: tuple, B: tuple, k: int, window: int) -> tuple[tuple, tuple, list]:
    """Apply the map to the legal pair ``k`` times, cancelling the common prefix each time.

    ``images`` maps each direction to its image word.  Returns the two
    remainders (cut to ``window`` letters) and the cancelled prefixes
    ``σ_1 .. σ_k``.  Raises :class:`_Exhausted` when a prefix swallows a
    whole image.
    """
    cut = [False, False]
    sigmas = []
    for _ in range(k):
        limit = window
        while True:
            ga, full_a = _expand(images, A, limit)
            gb, full_b = _expand(images, B, limit)
            n = _lcp(ga, gb)
            short_a = n == len(ga)
            short_b = n == len(gb)
            if (short_a and full_a) or (short_b and full_b):
                side = 0 if short_a and full_a else 1
                raise _Exhausted(side, cut[side])
            if not short_a and not short_b and (full_a or len(ga) >= n + window) and (
                full_b or len(gb) >= n + window
            ):
                break
            limit *= 2
        sigmas.append(tuple(ga[:n]))
        cut[0] |= not full_a or len(ga) - n > window
        cut[1] |= not full_b or len(gb) - n > window
        A, B = tuple(ga[n : n + window]), tuple(gb[n : n + window])
    return A, B, sigmas


def _legal_extensions(word: tuple, illegal: set, dirs: list) -> list[tuple]:
    last = word[-1]
    out = []
    for x in dirs:
        if x == -last or make_turn(-last, x) in illegal:
            continue
        out.append(word + (x,))
    return out


def _cover(word: tuple, t: float, lengths) -> tuple | None:
    """Shortest prefix of ``word`` whose length reaches ``t``."""
    total = 0.0
    for i, x in enumerate(word):
        total += lengths[abs(x) - 1]
        if total >= t - 1e-9:
            return word[: i + 1]
    return None


def _word_length(word: tuple, lengths) -> float:
    return float(sum(lengths[abs(x) - 1] for x in word))


def _turn_witness(g, k, d1, d2, illegal_k, lam, lengths, len_bound, window, budget):
    dirs = g.rose.directions()
    images = {d: g.image(d) for d in dirs}
    stack = [((d1,), (d2,))]
    while stack:
        budget[0] -= 1
        if budget[0] < 0:
            return None, True
        a, b = stack.pop()
        if len(a) + len(b) > len_bound:
            continue
        try:
            _, _, sig = _tighten(images, a, b, k, window)
        except _Exhausted as e:
            if e.truncated:
                return None, True
            if e.side == 0:
                stack.extend((x, b) for x in reversed(_legal_extensions(a, illegal_k, dirs)))
            else:
                stack.extend((a, x) for x in reversed(_legal_extensions(b, illegal_k, dirs)))
            continue
        tau_len = sum(lam ** (k - 1 - j) * _word_length(s, lengths) for j, s in enumerate(sig))
        t_star = tau_len / (lam**k - 1)
        w = _grow_rays(g, k, a, b, t_star, lam, lengths, len_bound, window)
        if w is not None:
            return PnpWitness(k, make_turn(d1, d2), w[0], w[1], t_star), False
    return None, False


def _grow_rays(g, k, alpha, beta, t_star, lam, lengths, len_bound, window):
    """Extend both halves by self-consistency until they reach ``t_star``, then check."""
    images = {d: g.image(d) for d in g.rose.directions()}
    while True:
        ca, cb = _cover(alpha, t_star, lengths), _cover(beta, t_star, lengths)
        if ca is not None and cb is not None:
            if len(ca) + len(cb) > len_bound:
                return None
            return (ca, cb) if _is_fixed_pair(g, k, alpha, beta, t_star, lam, lengths, window) else None
        if len(alpha) + len(beta) > 2 * len_bound:
            return None
        try:
            A, B, _ = _tighten(images, alpha, beta, k, window)
        except _Exhausted:
            return None
        if A[: len(alpha)] != alpha or B[: len(beta)] != beta:
            return None
        if len(A) <= len(alpha) and len(B) <= len(beta):
            return None
        alpha, beta = A[: len_bound + 1], B[: len_bound + 1]


def _is_fixed_pair(g, k, alpha, beta, t_star, lam, lengths, window) -> bool:
    """``g^k`` maps the pair cut at ``t_star`` onto itself without collapsing."""
    images = {d: g.image(d) for d in g.rose.directions()}
    try:
        A, B, sig = _tighten(images, alpha, beta, k, window)
    except _Exhausted:
        return False
    t = t_star
    for s in sig:
        ls = _word_length(s, lengths)
        if ls >= lam * t - 1e-9:
            return False
        t = lam * t - ls
    if abs(t - t_star) > 1e-6 * max(1.0, t_star):
        return False
    ca, cb = _cover(alpha, t_star, lengths), _cover(beta, t_star, lengths)
    return A[: len(ca)] == ca and B[: len(cb)] == cb


def _reduced_words(rank: int, n: int):
    dirs = [d for i in range(1, rank + 1) for d in (i, -i)]
    level = [(d,) for d in dirs]
    for _ in range(n):
        yield from level
        level = [w + (x,) for w in level for x in dirs if x != -w[-1]]


def find_pnps(
    g: GraphMap,
    len_bound: int | None = None,
    iter_bound: int = 8,
    max_steps: int = 200000,
) -> PnpSearch:
    """Bounded search for periodic Nielsen paths of a train track map.

    For an expanding map, each candidate is ``ᾱβ`` with ``α, β`` legal and
    one illegal turn ``{d1, d2}`` at the vertex.  Such a path is fixed by
    ``g^k`` exactly when ``g^k(α) = τα`` and ``g^k(β) = τβ`` for the common
    prefix ``τ`` of the images; then ``α`` and ``β`` share the length
    ``|τ| / (λ^k - 1)``.  ``len_bound`` caps the edges met by ``α`` and
    ``β`` together; ``k`` runs up to ``iter_bound``.  Maps without
    exponential growth get a direct scan of short vertex-to-vertex paths.
    An empty result means none were found within the bounds.
    """
    if len_bound is None:
        len_bound = 4 * g.max_image_length()
    if len_bound <= 0 or iter_bound <= 0:
        raise ValueError("search bounds must be positive")
    out: list[PnpWitness] = []
    pf = _pf_data(g)
    budget = [max_steps]
    truncated = False
    if pf is None:
        for k in range(1, iter_bound + 1):
            gk = g.power(k)
            for w in _reduced_words(g.rank, min(len_bound, 4)):
                if reduce_letters(gk.apply_letters(w)) == w:
                    out.append(PnpWitness(k, None, w, (), None))
                    break
        return PnpSearch(out, len_bound, iter_bound)
    lam, lengths = pf
    cap = len_bound * g.max_image_length()
    dm = g.direction_map()
    dirs = g.rose.directions()
    for k in range(1, iter_bound + 1):
        dk = {d: d for d in dirs}
        for _ in range(k):
            dk = {d: dm[v] for d, v in dk.items()}
        illegal_k = {make_turn(x, y) for x in dirs for y in dirs if x != y and dk[x] == dk[y]}
        for t in sorted(illegal_k, key=lambda t: (letter_key(t[0]), letter_key(t[1]))):
            window = min(4 * len_bound, cap)
            while True:
                w, cut = _turn_witness(g, k, t[0], t[1], illegal_k, lam, lengths, len_bound, window, budget)
                if not cut or window >= cap or budget[0] < 0:
                    break
                window = min(2 * window, cap)
            truncated |= cut
            if w is not None:
                out.append(w)
    return PnpSearch(out, len_bound, iter_bound, truncated)


# -- graph building ------------------------------------------------------


@dataclass(frozen=True)
class BuildStep:
    fold: Fold
    red_edge: tuple  # ordered pair (x, ȳ) for the fold x -> y x
    images: tuple  # ordered pairs carried over from earlier steps

    def red_text(self) -> str:
        return bar_pair(*self.red_edge)

    def images_text(self) -> list[str]:
        return [bar_pair(*p) for p in self.images]


def graph_building_trace(folds: Sequence[Fold]) -> list[BuildStep]:
    """Push the turns created so far through each direction map in turn."""
    carried: list[tuple] = []
    out = []
    for f in folds:
        dm = f.direction_map()
        images = []
        for x, y in carried:
            p = (dm[x], dm[y])
            if p not in images and (p[1], p[0]) not in images:
                images.append(p)
        red = (f.x, -f.y)
        out.append(BuildStep(f, red, tuple(images)))
        carried = images + [red]
    return out


@dataclass
class GraphBuilt:
    built: bool
    missing: list  # purple edges of the final structure never produced
    extra: list  # produced turns between purple vertices that the structure lacks
    edges: frozenset  # every produced turn, closed under the loop's direction map
    achieved_full: bool | None = None  # final-equality signal of the achieved subgraphs


def check_graph_built(dec: IdealDecomposition) -> GraphBuilt:
    """Compare the turns a loop produces with the purple graph it should build.

    Each fold's new turn is pushed through the remaining folds of the loop;
    the result is then closed under the direction map of the whole loop,
    which accounts for later passes around it.
    """
    final = dec.structures[-1]
    steps = graph_building_trace(dec.folds)
    turns = {make_turn(*p) for p in steps[-1].images} | {make_turn(*steps[-1].red_edge)}
    dm = dec.to_map().direction_map()
    frontier = list(turns)
    while frontier:
        t = frontier.pop()
        s = make_turn(dm[t[0]], dm[t[1]])
        if s[0] != s[1] and s not in turns:
            turns.add(s)
            frontier.append(s)
    purple = {t for t in turns if not (set(t) & set(final.red_vertices))}
    missing = sorted(final.purple_edges - purple, key=lambda t: (letter_key(t[0]), letter_key(t[1])))
    extra = sorted(purple - final.purple_edges, key=lambda t: (letter_key(t[0]), letter_key(t[1])))
    achieved = None
    try:
        rotated = rotate_to_extension(dec.triples)
        seq = achieved_subgraph_sequence(split_segments(rotated))
        achieved = bool(seq) and seq[-1] == rotated[0].source.purple_edges
    except ValueError:
        achieved = None
    return GraphBuilt(not missing and not extra, missing, extra, frozenset(turns), achieved)


# -- full irreducibility criterion ---------------------------------------


@dataclass
class FicVerdict:
    fully_irreducible: bool
    verdict: str
    reasons: list
    pnp: PnpSearch | None = None


def full_irreducibility_criterion(
    g: GraphMap, len_bound: int | None = None, iter_bound: int = 8
) -> FicVerdict:
    """pNp-free (within bounds), irreducible, PF and connected local graph."""
    if not g.is_train_track():
        return FicVerdict(False, "criterion inapplicable", ["not a train track map"])
    m = g.transition_matrix()
    reasons = []
    if not is_irreducible_matrix(m):
        reasons.append("transition matrix is reducible")
    if not is_perron_frobenius(m):
        reasons.append(
            "transition matrix is irreducible but imprimitive"
            if not reasons
            else "transition matrix is not Perron-Frobenius"
        )
    if reasons:
        return FicVerdict(False, "fails PF", reasons)
    _, h = rotationless_power(g)
    if not whitehead_graphs(h).lw.is_connected():
        return FicVerdict(False, "criterion inapplicable", ["local Whitehead graph is disconnected"])
    search = find_pnps(h, len_bound, iter_bound)
    if search.witnesses:
        return FicVerdict(False, "has periodic Nielsen paths", ["pNp found"], search)
    bounds = f"no pNp with at most {search.len_bound} edges and period at most {search.iter_bound}"
    if search.truncated:
        return FicVerdict(False, "inconclusive", [f"pNp search truncated ({bounds})"], search)
    return FicVerdict(True, "fully irreducible (FIC)", [bounds], search)


# -- end-to-end ----------------------------------------------------------


@lru_cache(maxsize=None)
def _catalog(n: int) -> tuple:
    return tuple(enumerate_catalog(n))


@dataclass
class VerificationReport:
    train_track: bool = False
    automorphism: bool = False
    pf_matrix: bool = False
    irreducible_matrix: bool = False
    periodic_count: int = 0
    power: int = 1
    fixed_after_power: int = 0
    orbit_condition: bool = False
    pnp_found: list = field(default_factory=list)
    pnp_bounds: tuple = (0, 0)
    pnp_truncated: bool = False
    lw_connected: bool = False
    iw_graph: SimpleGraph | None = None
    iw_matches: int | None = None
    index_sum: str | None = None
    target_match: bool | None = None
    check1: bool | None = None
    check2: bool = False
    check3: bool = False
    check4: bool | None = None
    decomposition_length: int | None = None
    verdict: Verdict = Verdict.REJECTED
    reasons: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "verdict": self.verdict.value,
            "reasons": self.reasons,
            "train_track": self.train_track,
            "automorphism": self.automorphism,
            "pf_matrix": self.pf_matrix,
            "irreducible_matrix": self.irreducible_matrix,
            "periodic_count": self.periodic_count,
            "power": self.power,
            "fixed_after_power": self.fixed_after_power,
            "orbit_condition": self.orbit_condition,
            "pnp_found": [w.to_json() for w in self.pnp_found],
            "pnp_bounds": {"len": self.pnp_bounds[0], "iter": self.pnp_bounds[1]},
            "pnp_truncated": self.pnp_truncated,
            "lw_connected": self.lw_connected,
            "iw_graph": self.iw_graph.to_text() if self.iw_graph is not None else None,
            "iw_matches": self.iw_matches,
            "index_sum": self.index_sum,
            "target_match": self.target_match,
            "check1": self.check1,
            "check2": self.check2,
            "check3": self.check3,
            "check4": self.check4,
            "decomposition_length": self.decomposition_length,
        }


def loop_decomposition(h: GraphMap, limit: int = 200000) -> IdealDecomposition | None:
    folds = decompose_representative(h, limit)
    if not folds:
        return None
    return decomposition_triples(folds)


def verify_representative(
    g: GraphMap,
    target: SimpleGraph | None = None,
    len_bound: int | None = None,
    iter_bound: int = 8,
    decomposition: IdealDecomposition | None = None,
    decompose: bool = True,
) -> VerificationReport:
    """Run every check and fill a report; failures are recorded, not raised."""
    r = VerificationReport()
    rank = g.rank
    r.train_track = g.is_train_track()
    r.automorphism = g.is_automorphism()
    r.periodic_count = len(g.periodic_directions())
    if not r.train_track:
        r.reasons.append("not a train track map")
    if not r.automorphism:
        r.reasons.append("not a homotopy equivalence")
    r.power, h = rotationless_power(g)
    fixed = [d for d, p in h.periodic_directions().items() if p == 1]
    r.fixed_after_power = len(fixed)
    r.check2 = r.fixed_after_power == 2 * rank - 1
    if not r.check2:
        r.reasons.append(f"{r.fixed_after_power} fixed directions after power {r.power}, expected {2 * rank - 1}")
    # primitivity passes to powers and back; irreducibility is read off g itself
    m = g.transition_matrix()
    r.pf_matrix = is_perron_frobenius(m)
    r.irreducible_matrix = is_irreducible_matrix(m)
    if not r.pf_matrix:
        r.reasons.append(
            "transition matrix is irreducible but imprimitive"
            if r.irreducible_matrix
            else "transition matrix is not Perron-Frobenius"
        )
    r.orbit_condition = orbit_condition(h)
    if not r.orbit_condition:
        r.reasons.append("some edge never reaches some other edge")
    wg = whitehead_graphs(h)
    r.lw_connected = wg.lw.is_connected()
    if not r.lw_connected:
        r.reasons.append("local Whitehead graph is disconnected")
    r.iw_graph = wg.sw
    if wg.sw.is_connected() and wg.sw.order == 2 * rank - 1 and wg.sw.order <= 8:
        r.iw_matches = catalog_index(wg.sw, list(_catalog(wg.sw.order)))
    r.index_sum = str(index_list(wg.sw).total)
    if r.iw_matches is None:
        r.reasons.append("ideal Whitehead graph is not a connected graph on 2r-1 vertices")
    if target is not None:
        r.target_match = are_isomorphic(wg.sw, target)[0]
        if not r.target_match:
            r.reasons.append("ideal Whitehead graph does not match the target")
    if r.train_track:
        search = find_pnps(h, len_bound, iter_bound)
        r.pnp_found = search.witnesses
        r.pnp_bounds = (search.len_bound, search.iter_bound)
        r.pnp_truncated = search.truncated
        r.check3 = not search.witnesses and not search.truncated
        if search.witnesses:
            r.reasons.append("periodic Nielsen path found")
        if decomposition is None and decompose and r.check2:
            decomposition = loop_decomposition(h)
    if decomposition is not None:
        r.decomposition_length = len(decomposition.folds)
        cov = check_red_vertex_coverage(decomposition.structures, rank)
        r.check1 = cov.covered
        if not cov.covered:
            r.reasons.append("red vertices miss edge pairs " + ",".join(letter_name(i) for i in cov.uncovered))
        r.check4 = check_graph_built(decomposition).built
        if not r.check4:
            r.reasons.append("decomposition does not build the whole graph")
    hard = [
        r.train_track,
        r.automorphism,
        r.check2,
        r.pf_matrix,
        r.orbit_condition,
        r.lw_connected,
        r.iw_matches is not None,
        r.target_match is not False,
        not r.pnp_found,
        r.check1 is not False,
        r.check4 is not False,
    ]
    if all(hard):
        r.verdict = Verdict.INCONCLUSIVE if r.pnp_truncated else Verdict.ACCEPTED
        if r.pnp_truncated:
            r.reasons.append("pNp search stopped before exhausting its bounds")
    else:
        r.verdict = Verdict.REJECTED
    return r


def loop_flags(triples: Sequence[GeneratingTriple]) -> dict:
    """Verifier flags for a loop of triples from a diagram."""
    dec, g = assemble_ideal_decomposition(triples)
    cov = check_red_vertex_coverage(dec.structures, dec.rank)
    built = check_graph_built(dec)
    census = dec.direction_census()
    flags = {
        "red_vertex_coverage": cov.covered,
        "train_track": g.is_train_track(),
        "periodic": census["periodic"],
        "graph_built": built.built,
        "missing_edges": [turn_name(t) for t in built.missing],
        "accepted": False,
    }
    if flags["train_track"] and cov.covered and built.built:
        target = dec.structures[0].purple_graph()
        report = verify_representative(g, target=target, decomposition=dec)
        flags["verdict"] = report.verdict.value
        flags["pnp_free"] = report.check3
        flags["fixed_directions"] = report.check2
        flags["accepted"] = report.verdict is Verdict.ACCEPTED
    return flags
