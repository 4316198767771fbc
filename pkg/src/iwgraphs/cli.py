"""Command-line front end: ``iwgraphs verify|catalog|diagram|search``."""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from iwgraphs.corpus import load_corpus, corpus_entry
from iwgraphs.diagram import build_id_diagram, irreducibility_potential_test, search_loops
from iwgraphs.dot import diagram_dot, graph_dot
from iwgraphs.maps import MapParseError, parse_map
from iwgraphs.verifier import EXIT_CODES, Verdict, verify_representative
from iwgraphs.whitehead import SimpleGraph, enumerate_catalog, parse_graph
from iwgraphs.words import letter_name

EXIT_USAGE = 1


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


def _graph_arg(text: str, n: int) -> tuple[int | None, SimpleGraph]:
    """A catalog index (as printed by ``catalog``) or graph text ``V=5; E=ab,bc,...``."""
    if text.strip().isdigit():
        cat = enumerate_catalog(n)
        i = int(text)
        if not 0 <= i < len(cat):
            raise ValueError(f"catalog index {i} out of range 0..{len(cat) - 1}")
        return i, cat[i]
    return None, parse_graph(text)


def _report_lines(label: str, rep) -> list[str]:
    lines = [f"{label}: {rep.verdict.value}"]
    lines.append(
        f"  train track {rep.train_track}, PF {rep.pf_matrix}, periodic {rep.periodic_count}, "
        f"power {rep.power} fixes {rep.fixed_after_power}"
    )
    lines.append(
        f"  pNp witnesses {len(rep.pnp_found)} (len<={rep.pnp_bounds[0]}, iter<={rep.pnp_bounds[1]}"
        f"{', truncated' if rep.pnp_truncated else ''})"
    )
    if rep.iw_graph is not None:
        lines.append(f"  IW graph {rep.iw_graph.to_text()}  catalog {rep.iw_matches}  index sum {rep.index_sum}")
    if rep.target_match is not None:
        lines.append(f"  target match {rep.target_match}")
    if rep.decomposition_length is not None:
        lines.append(
            f"  decomposition {rep.decomposition_length} folds, coverage {rep.check1}, graph built {rep.check4}"
        )
    for r in rep.reasons:
        lines.append(f"  - {r}")
    return lines


def _verify_one(args) -> tuple[str, dict, list[str], int]:
    label, g, target, plen, piter, note = args
    rep = verify_representative(g, target=target, len_bound=plen, iter_bound=piter)
    data = rep.to_json()
    data["label"] = label
    lines = _report_lines(label, rep)
    if note:
        data["power_note"] = note
        lines.insert(1, f"  note: {note}")
    return label, data, lines, rep.exit_code


def cmd_verify(a) -> int:
    jobs = []
    if a.corpus:
        entries = load_corpus() if a.corpus.lower() == "all" else [corpus_entry(a.corpus)]
        for e in entries:
            jobs.append([e.label, e.map, e.expected, e.power_note])
    else:
        if not a.file:
            print("error: give a map file or --corpus LABEL", file=sys.stderr)
            return EXIT_USAGE
        text = sys.stdin.read() if a.file == "-" else Path(a.file).read_text()
        try:
            g = parse_map(text)
        except MapParseError as e:
            print(f"error: {a.file}: {e}", file=sys.stderr)
            return EXIT_USAGE
        jobs.append([a.file, g, None, None])
    if a.target is not None:
        try:
            _, target = _graph_arg(a.target, 2 * jobs[0][1].rank - 1)
        except ValueError as e:
            print(f"error: --target: {e}", file=sys.stderr)
            return EXIT_USAGE
        for j in jobs:
            j[2] = target
    work = [(lab, g, t, a.pnp_len, a.pnp_iter, note) for lab, g, t, note in jobs]
    if a.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=a.jobs) as pool:
            results = list(pool.map(_verify_one, work))
    else:
        results = [_verify_one(w) for w in work]
    if a.json:
        payload = results[0][1] if len(results) == 1 else {"schema": 1, "reports": [r[1] for r in results]}
        print(_dump(payload))
    else:
        for _, _, lines, _ in results:
            print("\n".join(lines))
    return max(r[3] for r in results)


def cmd_catalog(a) -> int:
    if not 1 <= a.n <= 8:
        print("error: --n must be between 1 and 8", file=sys.stderr)
        return EXIT_USAGE
    cat = enumerate_catalog(a.n)
    for i, g in enumerate(cat):
        print(f"{i:>5}  {g.to_text()}")
    if a.dot:
        out = Path(a.dot)
        out.mkdir(parents=True, exist_ok=True)
        width = len(str(len(cat) - 1))
        for i, g in enumerate(cat):
            (out / f"graph_{i:0{width}d}.dot").write_text(graph_dot(g, f"graph {i}"))
    print(f"{len(cat)} connected simple graphs on {a.n} vertices")
    return 0


def _diagram(a):
    idx, graph = _graph_arg(a.graph, 2 * a.rank - 1)
    return idx, graph, build_id_diagram(graph, a.rank, jobs=a.jobs)


def cmd_diagram(a) -> int:
    try:
        idx, graph, D = _diagram(a)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(f"graph {graph.to_text()}" + (f" (catalog {idx})" if idx is not None else ""))
    print("  " + ", ".join(f"{k} {v}" for k, v in D.stats.items()))
    if a.dot:
        Path(a.dot).write_text(diagram_dot(D))
    if a.json:
        Path(a.json).write_text(_dump(D.to_json()) + "\n")
    if a.test:
        test = irreducibility_potential_test(D)
        for c, (ok, miss) in enumerate(zip(test.passed, test.uncovered)):
            extra = "" if ok else "  uncovered " + " ".join(f"{{{letter_name(i)},{letter_name(-i)}}}" for i in miss)
            print(f"  component {c}: {len(D.components[c])} nodes, {'pass' if ok else 'fail'}{extra}")
        print(f"potential test: {test.verdict}")
    return 0


def cmd_search(a) -> int:
    try:
        idx, graph, D = _diagram(a)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    res = search_loops(D, strategy=a.strategy, budget=a.budget, max_candidates=a.max_candidates)
    cands = []
    for c in res.candidates:
        cands.append(
            {
                "length": c.length,
                "strategy": c.strategy,
                "switch_sequence_part": c.switch_sequence_part,
                "folds": [str(t.fold) for t in c.triples],
                "map": c.map.lines(),
                "flags": c.flags,
            }
        )
    if a.json:
        print(_dump({"schema": 1, "graph": graph.to_text(), "catalog": idx, "stats": res.stats, "candidates": cands}))
    else:
        print(f"graph {graph.to_text()}" + (f" (catalog {idx})" if idx is not None else ""))
        print("  " + ", ".join(f"{k} {v}" for k, v in res.stats.items()))
        for i, c in enumerate(cands):
            verdict = c["flags"].get("verdict", "not verified")
            print(f"candidate {i}: {c['length']} triples, {verdict}")
            print("  folds " + " ".join(c["folds"]))
            for line in c["map"]:
                print("  " + line)
            if c["flags"]["missing_edges"]:
                print("  missing " + " ".join(c["flags"]["missing_edges"]))
    if any(c["flags"].get("accepted") for c in cands):
        return 0
    return EXIT_CODES[Verdict.INCONCLUSIVE]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="iwgraphs", description=__doc__)
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify a train track representative")
    v.add_argument("file", nargs="?", help="map file, one 'a -> word' line per edge ('-' for stdin)")
    v.add_argument("--corpus", metavar="LABEL", help="bundled representative (I..XXI, or 'all')")
    v.add_argument("--target", help="catalog index or graph text the IW graph must match")
    v.add_argument("--pnp-len", type=int, default=None, help="pNp path length bound")
    v.add_argument("--pnp-iter", type=int, default=8, help="pNp iterate bound")
    v.add_argument("--json", action="store_true", help="print the JSON report")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("catalog", help="list connected simple graphs")
    c.add_argument("--n", type=int, default=5)
    c.add_argument("--dot", metavar="DIR", help="write one DOT file per graph")
    c.set_defaults(func=cmd_catalog)

    for name, fn, text in (
        ("diagram", cmd_diagram, "build an ideal decomposition diagram"),
        ("search", cmd_search, "search a diagram for representative loops"),
    ):
        s = sub.add_parser(name, help=text)
        s.add_argument("graph", help="catalog index or graph text")
        s.add_argument("--rank", type=int, default=3)
        if name == "diagram":
            s.add_argument("--dot", metavar="FILE")
            s.add_argument("--json", metavar="FILE")
            s.add_argument("--test", action="store_true", help="run the irreducibility potential test")
        else:
            s.add_argument("--strategy", choices=("ia", "ib"), default="ib")
            s.add_argument("--budget", type=int, default=12)
            s.add_argument("--max-candidates", type=int, default=5)
            s.add_argument("--json", action="store_true")
        s.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    if a.command == "verify" and (a.pnp_iter <= 0 or (a.pnp_len is not None and a.pnp_len <= 0)):
        print("error: pNp bounds must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return a.func(a)
    except KeyError as e:
        print(f"error: {e.args[0]}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
