import itertools
import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iwgraphs.maps import GraphMap, parse_map
from iwgraphs.whitehead import (
    SimpleGraph,
    are_isomorphic,
    catalog_index,
    complete_graph,
    cycle_graph,
    enumerate_catalog,
    index_list,
    parse_graph,
    path_graph,
    star_graph,
    taken_turns,
    whitehead_graphs,
)
from iwgraphs.words import make_turn


def to_nx(g: SimpleGraph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(tuple(e) for e in g.edges)
    return h


@st.composite
def graphs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return SimpleGraph.build(range(n), chosen)


def relabeled(g: SimpleGraph, seed: int) -> SimpleGraph:
    vs = list(g.vertices)
    shuffled = vs[:]
    random.Random(seed).shuffle(shuffled)
    return g.relabel(dict(zip(vs, shuffled)))


@pytest.mark.parametrize("n,count", [(1, 1), (2, 1), (3, 2), (4, 6), (5, 21), (6, 112)])
def test_catalog_counts_match_the_graph_atlas(n, count):
    atlas = sum(1 for g in nx.graph_atlas_g() if g.number_of_nodes() == n and nx.is_connected(g))
    assert len(enumerate_catalog(n)) == count == atlas


def test_catalog_classes_are_distinct_and_connected():
    cat = enumerate_catalog(5)
    for g in cat:
        assert g.is_connected()
    for a, b in itertools.combinations(cat, 2):
        assert not nx.is_isomorphic(to_nx(a), to_nx(b))


def test_catalog_order_and_special_graphs():
    cat = enumerate_catalog(5)
    assert [g.size for g in cat] == sorted(g.size for g in cat)
    for special in (path_graph(5), cycle_graph(5), complete_graph(5), star_graph(5)):
        hits = [i for i, g in enumerate(cat) if are_isomorphic(g, special)[0]]
        assert len(hits) == 1
    assert catalog_index(complete_graph(5), cat) == 20


def test_catalog_rejects_large_n():
    with pytest.raises(ValueError):
        enumerate_catalog(9)


def test_isomorphism_examples():
    p = path_graph(5)
    ok, witness = are_isomorphic(p, relabeled(p, 3))
    assert ok
    assert not are_isomorphic(p, star_graph(5))[0]


@settings(max_examples=200, deadline=None)
@given(graphs(), st.integers(0, 10**6))
def test_isomorphism_agrees_with_networkx_and_witness_is_an_isomorphism(g, seed):
    h = relabeled(g, seed)
    ok, witness = are_isomorphic(g, h)
    assert ok
    assert {frozenset(witness[v] for v in e) for e in g.edges} == set(h.edges)


@settings(max_examples=200, deadline=None)
@given(graphs(6), graphs(6))
def test_isomorphism_decision_matches_networkx(g, h):
    assert are_isomorphic(g, h)[0] == nx.is_isomorphic(to_nx(g), to_nx(h))


@settings(max_examples=100, deadline=None)
@given(graphs(6), st.integers(0, 10**6), st.integers(0, 10**6))
def test_isomorphism_is_an_equivalence(g, s1, s2):
    h, k = relabeled(g, s1), relabeled(relabeled(g, s1), s2)
    _, gh = are_isomorphic(g, h)
    _, hk = are_isomorphic(h, k)
    back = {v: u for u, v in gh.items()}
    assert {frozenset(back[v] for v in e) for e in h.edges} == set(g.edges)
    composed = {v: hk[gh[v]] for v in g.vertices}
    assert {frozenset(composed[v] for v in e) for e in g.edges} == set(k.edges)


def turn_closure_oracle(g: GraphMap):
    turns = set(g.edge_turns())
    while True:
        more = {g.turn_map(t) for t in turns} - turns
        if not more:
            return {t for t in turns if t[0] != t[1]}
        turns |= more


def test_taken_turns_rank_two():
    g = parse_map("a -> ab\nb -> ba")
    assert {make_turn(-1, 2), make_turn(-2, 1)} <= taken_turns(g)
    assert taken_turns(g) == turn_closure_oracle(g)


def test_single_letter_images_take_no_turns():
    g = GraphMap.identity(3)
    assert taken_turns(g) == set()
    assert whitehead_graphs(g).lw.size == 0


def test_graph_one_is_a_path(corpus_reports):
    _, h, _ = corpus_reports["I"]
    sw = whitehead_graphs(h).sw
    assert are_isomorphic(sw, path_graph(5))[0]


def test_corpus_whitehead_graphs(corpus_reports):
    for label, (e, h, rep) in corpus_reports.items():
        wg = whitehead_graphs(h)
        assert taken_turns(h) == turn_closure_oracle(h)
        assert wg.sw.order == len(h.periodic_directions())
        assert set(wg.sw.vertices) <= set(wg.lw.vertices)
        if rep.iw_matches is not None:
            assert wg.sw.order == 5
            total = index_list(wg.sw).total
            assert total == Fraction(-3, 2) and total > 1 - 3


def test_graph_xx_square_matches_its_catalog_entry(corpus_reports, catalog5):
    _, h2, rep = corpus_reports["XX"]
    assert rep.power == 2
    assert are_isomorphic(whitehead_graphs(h2).sw, catalog5[rep.iw_matches])[0]


def test_index_formula():
    assert index_list(path_graph(5)).indices == [Fraction(-3, 2)]
    assert index_list([path_graph(3)]).indices == [Fraction(-1, 2)]
    two = index_list([path_graph(3), cycle_graph(4)])
    assert two.indices == [Fraction(-1, 2), Fraction(-1)]
    assert two.total == Fraction(-3, 2)
    assert index_list([path_graph(2)]).flagged == [0]


def test_graph_text_round_trip():
    g = parse_graph("V=5; E=ab,bc,cd,de")
    assert are_isomorphic(g, path_graph(5))[0]
    assert parse_graph(g.to_text()) == g
    with pytest.raises(ValueError):
        parse_graph("V=3; E=aa")
