"""Self-maps of edge-indexed roses and their direction and turn dynamics."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import lcm

import numpy as np

from iwgraphs.words import (
    Letter,
    Rose,
    Turn,
    Word,
    invert_letters,
    letter_name,
    make_turn,
    parse_letter,
    reduce_letters,
    turns_of,
)


class MapParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class GraphMap:
    """A map of roses sending each positive edge ``E_i`` to a reduced word.

    ``images[i - 1]`` holds the letters of ``g(E_i)``.  Source and target
    roses share the edge index set, so a map is identified by its rank.
    """

    rank: int
    images: tuple[tuple[Letter, ...], ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.rank:
            raise ValueError("need exactly one image per edge")
        for i, img in enumerate(self.images, 1):
            if not img:
                raise ValueError(f"image of {letter_name(i)} is empty")
            for x in img:
                if x == 0 or abs(x) > self.rank:
                    raise ValueError(f"letter {x} outside rank-{self.rank} alphabet")
            if reduce_letters(img) != img:
                raise ValueError(f"image of {letter_name(i)} is not reduced")

    @classmethod
    def from_dict(cls, rank: int, images: dict) -> GraphMap:
        """Build from ``{'a': 'acB', ...}``; unlisted edges are fixed."""
        out = [(i,) for i in range(1, rank + 1)]
        for k, v in images.items():
            x = parse_letter(k) if isinstance(k, str) else k
            letters = tuple(parse_letter(c) for c in v) if isinstance(v, str) else tuple(v)
            if x > 0:
                out[x - 1] = letters
            else:
                out[-x - 1] = invert_letters(letters)
        return cls(rank, tuple(out))

    @classmethod
    def identity(cls, rank: int) -> GraphMap:
        return cls(rank, tuple((i,) for i in range(1, rank + 1)))

    @property
    def rose(self) -> Rose:
        return Rose(self.rank)

    def image(self, x: Letter) -> tuple[Letter, ...]:
        if x > 0:
            return self.images[x - 1]
        return invert_letters(self.images[-x - 1])

    def apply_letters(self, letters) -> tuple[Letter, ...]:
        out: list[Letter] = []
        for x in letters:
            for y in self.image(x):
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        return tuple(out)

    def apply(self, w: Word) -> Word:
        if w.rank != self.rank:
            raise ValueError("word and map are over different roses")
        return Word(self.apply_letters(w.letters), self.rank)

    def direction_map(self) -> dict[Letter, Letter]:
        return {d: self.image(d)[0] for d in self.rose.directions()}

    def turn_map(self, t: Turn) -> Turn:
        dg = self.direction_map()
        return make_turn(dg[t[0]], dg[t[1]])

    def periodic_directions(self) -> dict[Letter, int]:
        """Minimal period of every periodic direction; others are omitted."""
        dg = self.direction_map()
        out = {}
        for d in dg:
            x, k = dg[d], 1
            while x != d and k <= len(dg):
                x, k = dg[x], k + 1
            if x == d:
                out[d] = k
        return out

    def illegal_turns(self) -> set[Turn]:
        """Nondegenerate turns whose directions are eventually identified."""
        dg = self.direction_map()
        dirs = list(dg)
        out = set()
        for d1, d2 in combinations(dirs, 2):
            x, y = d1, d2
            for _ in range(len(dirs) ** 2):
                x, y = dg[x], dg[y]
                if x == y:
                    out.add(make_turn(d1, d2))
                    break
        return out

    def is_legal_turn(self, t: Turn) -> bool:
        return t[0] != t[1] and t not in self.illegal_turns()

    def edge_turns(self) -> set[Turn]:
        out: set[Turn] = set()
        for img in self.images:
            out |= turns_of(img)
        return out

    def is_train_track(self) -> bool:
        if any(len(reduce_letters(img)) != len(img) for img in self.images):
            return False
        bad = self.illegal_turns()
        return all(t[0] != t[1] and t not in bad for t in self.edge_turns())

    def transition_matrix(self) -> np.ndarray:
        """Entry ``(i, j)``: number of times ``g(E_j)`` crosses ``E_i^{±1}``."""
        m = np.zeros((self.rank, self.rank), dtype=np.int64)
        for j, img in enumerate(self.images):
            for x in img:
                m[abs(x) - 1, j] += 1
        return m

    def power(self, k: int) -> GraphMap:
        if k < 1:
            raise ValueError("power must be positive")
        out = self
        for _ in range(k - 1):
            out = compose(self, out)
        return out

    def is_automorphism(self) -> bool:
        """Whether the induced endomorphism of ``F_r`` is onto (hence bijective)."""
        m = self.abelianization()
        if abs(_int_det(m)) != 1:
            return False
        return _generates_free_group(self.images, self.rank)

    def abelianization(self) -> list[list[int]]:
        m = [[0] * self.rank for _ in range(self.rank)]
        for j, img in enumerate(self.images):
            for x in img:
                m[abs(x) - 1][j] += 1 if x > 0 else -1
        return m

    def max_image_length(self) -> int:
        return max(len(img) for img in self.images)

    def lines(self) -> list[str]:
        return [
            f"{letter_name(i)} -> {''.join(letter_name(x) for x in img)}"
            for i, img in enumerate(self.images, 1)
        ]

    def __str__(self) -> str:
        return "\n".join(self.lines())


def compose(g2: GraphMap, g1: GraphMap) -> GraphMap:
    """``g2 ∘ g1``: apply ``g1`` first."""
    if g1.rank != g2.rank:
        raise ValueError("maps are over different roses")
    images = tuple(g2.apply_letters(img) for img in g1.images)
    return GraphMap(g1.rank, images)


def parse_map(text: str, rank: int | None = None) -> GraphMap:
    """Parse lines ``a -> acBca``; blank lines and ``#`` comments are skipped."""
    entries: dict[int, tuple[Letter, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "->" not in line:
            raise MapParseError("expected '->'", lineno, 1)
        lhs, rhs = line.split("->", 1)
        col = len(lhs) - len(lhs.lstrip()) + 1
        src = lhs.strip()
        if len(src) != 1 or not src.islower():
            raise MapParseError(f"bad edge name {src!r}", lineno, col)
        x = parse_letter(src)
        if x in entries:
            raise MapParseError(f"edge {src} given twice", lineno, col)
        offset = len(lhs) + 2
        img: list[Letter] = []
        for i, ch in enumerate(rhs):
            if ch.isspace():
                continue
            try:
                y = parse_letter(ch)
            except ValueError:
                raise MapParseError(f"bad letter {ch!r}", lineno, offset + i + 1) from None
            if img and img[-1] == -y:
                raise MapParseError("image is not reduced", lineno, offset + i + 1)
            img.append(y)
        if not img:
            raise MapParseError("empty image", lineno, offset + 1)
        entries[x] = tuple(img)
    if not entries:
        raise MapParseError("no edges given", 1, 1)
    r = rank or max(max(entries), max(abs(y) for img in entries.values() for y in img))
    missing = [i for i in range(1, r + 1) if i not in entries]
    if missing:
        raise MapParseError(f"missing image for edge {letter_name(missing[0])}", 1, 1)
    try:
        return GraphMap(r, tuple(entries[i] for i in range(1, r + 1)))
    except ValueError as exc:
        raise MapParseError(str(exc), 1, 1) from None


def periods_lcm(g: GraphMap) -> int:
    return lcm(*g.periodic_directions().values()) if g.periodic_directions() else 1


def is_perron_frobenius(m) -> bool:
    """Primitivity: some power ``M^k`` with ``k <= (n-1)n + 1`` is positive."""
    a = np.asarray(m) > 0
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if np.any(np.asarray(m) < 0):
        raise ValueError("matrix must be nonnegative")
    p = a.copy()
    for _ in range((n - 1) * n + 1):
        if p.all():
            return True
        p = (p.astype(np.int64) @ a.astype(np.int64)) > 0
    return bool(p.all())


def is_irreducible_matrix(m) -> bool:
    """Strong connectivity of the digraph ``i -> j`` when ``M[i, j] > 0``."""
    a = np.asarray(m) > 0
    n = a.shape[0]
    reach = a | np.eye(n, dtype=bool)
    for _ in range(n):
        reach = (reach.astype(np.int64) @ reach.astype(np.int64)) > 0
    return bool(reach.all())


def _int_det(m: list[list[int]]) -> int:
    # Bareiss fraction-free elimination
    a = [row[:] for row in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _generates_free_group(words, rank: int) -> bool:
    """Stallings folding of the petals spelled by ``words``.

    The subgroup is all of ``F_r`` exactly when the folded core collapses to
    the one-vertex rose.
    """
    parent: list[int] = [0]
    adj: list[dict[int, int]] = [{}]

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def new_vertex() -> int:
        parent.append(len(parent))
        adj.append({})
        return len(parent) - 1

    pending: list[tuple[int, int, int]] = []
    for w in words:
        v = 0
        for i, x in enumerate(w):
            t = 0 if i == len(w) - 1 else new_vertex()
            pending.append((v, x, t))
            v = t

    while pending:
        u, x, v = pending.pop()
        u, v = find(u), find(v)
        w = adj[u].get(x)
        if w is not None:
            w = find(w)
            if w != v:
                keep, gone = (v, w) if v < w else (w, v)
                parent[gone] = keep
                for y, t in adj[gone].items():
                    pending.append((keep, y, t))
                adj[gone] = {}
            continue
        adj[u][x] = v
        pending.append((v, -x, u))

    live = {find(v) for v in range(len(parent))}
    if len(live) != 1:
        return False
    root = find(0)
    return all(x in adj[root] for i in range(1, rank + 1) for x in (i, -i))
