"""Graphviz DOT text for graphs, structures and diagrams."""
from __future__ import annotations

from iwgraphs.diagram import IdDiagram
from iwgraphs.ltt import LttStructure
from iwgraphs.moves import Composition
from iwgraphs.whitehead import SimpleGraph, _vertex_name
from iwgraphs.words import letter_key, letter_name


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_dot(g: SimpleGraph, name: str = "G") -> str:
    lines = [f"graph {_quote(name)} {{"]
    for v in g.vertices:
        lines.append(f"  {_quote(_vertex_name(v))};")
    for e in sorted(g.edges, key=lambda e: sorted(map(_vertex_name, e))):
        x, y = sorted(map(_vertex_name, e))
        lines.append(f"  {_quote(x)} -- {_quote(y)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def ltt_dot(G: LttStructure, name: str = "ltt") -> str:
    """Purple edges solid, the red edge and red vertex in red, black edges dashed."""
    lines = [f"graph {_quote(name)} {{", "  node [shape=circle];"]
    for d in sorted(G.directions, key=letter_key):
        color = "red" if d in G.red_vertices else "purple"
        lines.append(f"  {_quote(letter_name(d))} [color={color}];")
    for d in range(1, G.rank + 1):
        lines.append(f"  {_quote(letter_name(d))} -- {_quote(letter_name(-d))} [style=dashed];")
    for x, y in sorted(G.colored_edges, key=lambda t: (letter_key(t[0]), letter_key(t[1]))):
        red = x in G.red_vertices or y in G.red_vertices
        lines.append(f"  {_quote(letter_name(x))} -- {_quote(letter_name(y))} [color={'red' if red else 'purple'}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def diagram_dot(D: IdDiagram, name: str = "ID") -> str:
    """One cluster per component; extensions solid, switches dashed."""
    lines = [f"digraph {_quote(name)} {{", "  node [shape=box, fontsize=9];"]
    for c, comp in enumerate(D.components):
        lines.append(f"  subgraph cluster_{c} {{")
        lines.append(f"    label={_quote(f'component {c}')};")
        for v in comp:
            lines.append(f"    n{v} [label={_quote(D.nodes[v].to_text())}];")
        lines.append("  }")
    for t in D.edges:
        style = "solid" if t.kind.value == "extension" else "dashed"
        lines.append(
            f"  n{D.index[t.source]} -> n{D.index[t.dest]} [label={_quote(str(t.fold))}, style={style}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def composition_dot(comp: Composition, name: str = "composition") -> str:
    """Structures in application order, one arrow per triple (source -> dest)."""
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", "  node [shape=box, fontsize=9];"]
    for i, G in enumerate(comp.structures()):
        lines.append(f"  s{i} [label={_quote(G.to_text())}];")
    for i, t in enumerate(comp.triples):
        style = "solid" if t.kind.value == "extension" else "dashed"
        lines.append(f"  s{i} -> s{i + 1} [label={_quote(str(t.fold))}, style={style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
