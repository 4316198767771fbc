"""Representatives bundled with the package, keyed by graph numeral."""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from iwgraphs.maps import GraphMap, parse_map
from iwgraphs.whitehead import SimpleGraph, parse_graph


@dataclass(frozen=True)
class CorpusEntry:
    label: str
    map: GraphMap
    printed: str  # the map as originally listed, before any repair
    expected: SimpleGraph | None
    power_note: str | None
    notes: str

    @property
    def repaired(self) -> bool:
        return str(self.map) != self.printed


@lru_cache(maxsize=None)
def load_corpus() -> tuple[CorpusEntry, ...]:
    raw = json.loads(resources.files("iwgraphs.data").joinpath("corpus.json").read_text(encoding="utf-8"))
    out = []
    for e in raw["entries"]:
        g = parse_map(e["map"], raw["rank"])
        if str(g) != e["map"]:
            raise ValueError(f"corpus entry {e['label']} does not round-trip")
        expected = parse_graph(e["expected"]) if e.get("expected") else None
        out.append(CorpusEntry(e["label"], g, e["printed"], expected, e.get("power_note"), e.get("notes", "")))
    return tuple(out)


def corpus_entry(label: str) -> CorpusEntry:
    """Look up by numeral; ``II`` finds the disputed entry."""
    wanted = label.strip().upper()
    for e in load_corpus():
        if e.label.upper() == wanted or e.label.upper().split("-")[0] == wanted:
            return e
    raise KeyError(f"no corpus entry {label!r}")
