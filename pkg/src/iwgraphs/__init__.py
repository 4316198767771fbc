"""Train-track and ideal Whitehead graph toolkit for rank-r roses."""

from iwgraphs.words import Rose, Word, invert_word, parse_word, reduce, traversed_turns
from iwgraphs.maps import GraphMap, compose, is_perron_frobenius, parse_map
from iwgraphs.whitehead import SimpleGraph, are_isomorphic, enumerate_catalog, whitehead_graphs
from iwgraphs.ltt import LttStructure, is_birecurrent
from iwgraphs.moves import Fold, GeneratingTriple, realize_construction
from iwgraphs.diagram import build_id_diagram, irreducibility_potential_test, search_loops
from iwgraphs.verifier import Verdict, find_pnps, full_irreducibility_criterion, verify_representative
from iwgraphs.corpus import corpus_entry, load_corpus

__all__ = [
    "Rose",
    "Word",
    "GraphMap",
    "SimpleGraph",
    "LttStructure",
    "Fold",
    "GeneratingTriple",
    "Verdict",
    "are_isomorphic",
    "build_id_diagram",
    "compose",
    "corpus_entry",
    "enumerate_catalog",
    "find_pnps",
    "full_irreducibility_criterion",
    "invert_word",
    "irreducibility_potential_test",
    "is_birecurrent",
    "is_perron_frobenius",
    "load_corpus",
    "parse_map",
    "parse_word",
    "realize_construction",
    "reduce",
    "search_loops",
    "traversed_turns",
    "verify_representative",
    "whitehead_graphs",
]
