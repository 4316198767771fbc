"""Edge alphabets, reduced words and turns on an edge-indexed rose.

Letters are nonzero integers: ``i`` is the edge ``E_i`` and ``-i`` its
inverse.  A letter doubles as the initial direction of the oriented edge it
names, so directions and letters share one representation.  The text form
uses ``a..z`` for ``E_1..E_26`` and uppercase for inverses; the empty word
prints as ``1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

Letter = int
Turn = tuple[int, int]

_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def letter_name(x: Letter) -> str:
    ch = _ALPHABET[abs(x) - 1]
    return ch if x > 0 else ch.upper()


def bar_name(x: Letter) -> str:
    """Lowercase name with a combining macron for inverses, e.g. ``b̄``."""
    ch = _ALPHABET[abs(x) - 1]
    return ch if x > 0 else ch + "\u0304"


def bar_pair(x: Letter, y: Letter) -> str:
    """Ordered pair in bar notation, e.g. ``[b̄,c̄]``."""
    return f"[{bar_name(x)},{bar_name(y)}]"


def parse_letter(ch: str) -> Letter:
    low = ch.lower()
    if low not in _ALPHABET or len(ch) != 1:
        raise ValueError(f"not an edge letter: {ch!r}")
    i = _ALPHABET.index(low) + 1
    return i if ch.islower() else -i


def letter_key(x: Letter) -> tuple[int, int]:
    """Sort key ordering directions a, A, b, B, ..."""
    return (abs(x), x < 0)


def make_turn(d1: Letter, d2: Letter) -> Turn:
    """Normalized unordered pair; ``(d, d)`` is the degenerate turn."""
    return (d1, d2) if letter_key(d1) <= letter_key(d2) else (d2, d1)


def turn_name(t: Turn) -> str:
    return letter_name(t[0]) + letter_name(t[1])


def parse_turn(s: str) -> Turn:
    s = s.strip()
    if len(s) != 2:
        raise ValueError(f"turn must be two letters: {s!r}")
    return make_turn(parse_letter(s[0]), parse_letter(s[1]))


@dataclass(frozen=True)
class Rose:
    """The r-petaled rose with edges indexed ``1..r``."""

    rank: int

    def __post_init__(self) -> None:
        if self.rank < 1 or self.rank > len(_ALPHABET):
            raise ValueError(f"unsupported rank {self.rank}")

    def directions(self) -> list[Letter]:
        out = []
        for i in range(1, self.rank + 1):
            out.extend((i, -i))
        return out

    def contains(self, x: Letter) -> bool:
        return x != 0 and abs(x) <= self.rank


def reduce_letters(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_letters(letters: tuple[Letter, ...]) -> tuple[Letter, ...]:
    return tuple(-x for x in reversed(letters))


@dataclass(frozen=True)
class Word:
    """A reduced word over the edge alphabet of a rank-``rank`` rose."""

    letters: tuple[Letter, ...]
    rank: int

    def __post_init__(self) -> None:
        for x in self.letters:
            if x == 0 or abs(x) > self.rank:
                raise ValueError(f"letter {x} outside rank-{self.rank} alphabet")
        for x, y in zip(self.letters, self.letters[1:]):
            if x == -y:
                raise ValueError("word is not reduced")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __mul__(self, other: Word) -> Word:
        if not isinstance(other, Word):
            return NotImplemented
        if other.rank != self.rank:
            raise ValueError("cannot multiply words over different roses")
        return Word(reduce_letters(self.letters + other.letters), self.rank)

    def __str__(self) -> str:
        return "".join(letter_name(x) for x in self.letters) or "1"

    def __repr__(self) -> str:
        return f"Word({str(self)!r}, rank={self.rank})"


def reduce(letters: Iterable[Letter], rank: int) -> Word:
    """Freely reduce a raw letter sequence."""
    return Word(reduce_letters(letters), rank)


def parse_word(text: str, rank: int) -> Word:
    """Parse ``acBca`` style text; ``1`` is the empty word.

    Raises ``ValueError`` when the text is not already reduced.
    """
    text = text.strip()
    if text in ("", "1"):
        return Word((), rank)
    return Word(tuple(parse_letter(ch) for ch in text), rank)


def invert_word(w: Word) -> Word:
    return Word(invert_letters(w.letters), w.rank)


def turns_of(letters: tuple[Letter, ...]) -> set[Turn]:
    return {make_turn(-x, y) for x, y in zip(letters, letters[1:])}


def traversed_turns(w: Word) -> set[Turn]:
    """Turns ``{inv(w_i), w_{i+1}}`` crossed by the word at the vertex."""
    return turns_of(w.letters)
