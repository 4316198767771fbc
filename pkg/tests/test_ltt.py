import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iwgraphs.ltt import (
    LttStructure,
    _reapply,
    construction_subgraph,
    is_birecurrent,
    is_preadmissible_labeling,
    ltt_of_map,
    parse_ltt,
    potential_construction_paths,
    smooth_step_digraph,
)
from iwgraphs.maps import GraphMap
from iwgraphs.verifier import Verdict, loop_decomposition
from iwgraphs.whitehead import SimpleGraph
from iwgraphs.words import Rose, make_turn

DIRS = Rose(3).directions()


@st.composite
def structures(draw):
    du = draw(st.sampled_from(DIRS))
    purple_vs = [d for d in DIRS if d != du]
    pairs = list(itertools.combinations(purple_vs, 2))
    purple = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=1))
    attach = draw(st.sampled_from(purple_vs))
    return LttStructure.standard(3, du, attach, [make_turn(*p) for p in purple])


def test_single_fold_structures():
    g1 = GraphMap.from_dict(3, {"c": "Bc"})
    G1 = ltt_of_map(g1)
    assert G1.unachieved == 3
    assert G1.red_edge == make_turn(3, 2)
    # b -> bC, i.e. B -> cB: the direction B leaves the periodic set
    G2 = ltt_of_map(GraphMap.from_dict(3, {"b": "bC"}))
    assert G2.red_edge == make_turn(-2, -3)
    assert G2.unachieved == -2


def test_squared_period_two_map_has_red_vertex_a_bar(corpus_reports):
    _, h2, _ = corpus_reports["XX"]
    assert ltt_of_map(h2).unachieved == -1


def test_wrong_census_is_flagged():
    assert ltt_of_map(GraphMap.identity(3)).flag is not None


def test_birecurrency_examples():
    assert is_birecurrent(LttStructure(1, frozenset(), frozenset({(1, -1)})))
    # a - A and b - B hang off the rest of the graph by valence-one ends
    G = LttStructure.standard(3, 3, -2, [(1, -1), (2, -2), (-1, -3), (-2, -3)])
    assert not is_birecurrent(G)


def test_corpus_structures_are_well_formed_and_birecurrent(corpus_reports):
    for label, (_, h, rep) in corpus_reports.items():
        if rep.verdict is not Verdict.ACCEPTED:
            continue
        for G in loop_decomposition(h).structures:
            assert G.is_standard and not G.violations(), (label, G)
            assert len(G.purple_vertices) == 5
            assert is_birecurrent(G), (label, G)


def reversed_verdict(G: LttStructure) -> bool:
    """The SCC criterion on the reversed smooth-step digraph."""
    dg = smooth_step_digraph(G).reverse()
    need = {("b", make_turn(d, -d)) for d in G.directions if d > 0} | {("c", t) for t in G.colored_edges}
    for comp in nx.strongly_connected_components(dg):
        if len(comp) > 1 and need <= {(k, make_turn(x, y)) for k, x, y in comp}:
            return True
    return False


@settings(max_examples=300, deadline=None)
@given(structures())
def test_birecurrency_is_reversal_invariant(G):
    assert is_birecurrent(G) == reversed_verdict(G)


@settings(max_examples=200, deadline=None)
@given(structures())
def test_relabeling_by_inversion_preserves_birecurrency(G):
    flipped = LttStructure(3, frozenset(-d for d in G.red_vertices), frozenset(make_turn(-x, -y) for x, y in G.colored_edges))
    assert is_birecurrent(G) == is_birecurrent(flipped)


def test_preadmissibility_examples():
    # a - A - b - B - c has two edge-pair edges; only a - A ends at a valence-one vertex
    g = SimpleGraph.build([1, -1, 2, -2, 3], [(1, -1), (-1, 2), (2, -2), (-2, 3)])
    assert not is_preadmissible_labeling(g, valence_one_only=False)
    assert is_preadmissible_labeling(g)
    h = SimpleGraph.build([-1, 2, 1, 3, -2], [(-1, 2), (2, 1), (1, 3), (3, -2)])
    assert is_preadmissible_labeling(h) and is_preadmissible_labeling(h, valence_one_only=False)
    two = SimpleGraph.build([1, -1, 2, -2, 3], [(1, -1), (-1, 3), (3, 2), (2, -2)])
    assert not is_preadmissible_labeling(two)


@settings(max_examples=200, deadline=None)
@given(structures())
def test_construction_subgraph_properties(G):
    sub = construction_subgraph(G)
    du = G.unachieved
    assert abs(du) not in sub.black
    assert all(-du not in t for t in sub.colored)
    assert _reapply(G, sub) == sub
    assert sub.colored <= G.colored_edges


def test_construction_subgraph_without_cascade():
    # every vertex keeps a colored edge after the first removals
    G = LttStructure.standard(3, 1, 2, [(-1, 2), (-1, 3), (2, -2), (2, -3), (-2, 3), (3, -3)])
    sub = construction_subgraph(G)
    assert sub.black == {2, 3}
    assert sub.colored == G.colored_edges - {make_turn(-1, 2), make_turn(-1, 3)}


@settings(max_examples=100, deadline=None)
@given(structures())
def test_potential_construction_paths_shape(G):
    if G.attach == -G.unachieved or not is_birecurrent(G):
        return
    for path in potential_construction_paths(G):
        vs = path.vertices
        assert vs[0] == G.unachieved and vs[1] == G.attach
        assert len(path) % 2 == 0
        assert path.is_smooth_in(G) or len(path) > 2
        for i in range(3, len(vs), 2):
            assert is_birecurrent(G.with_red_edge(vs[i]))
    assert potential_construction_paths(G, max_len=1) == []


def test_text_round_trip():
    G = LttStructure.standard(3, 3, 2, [(1, -1), (-1, 2), (2, -2), (-2, -3)])
    assert parse_ltt(G.to_text()) == G


def test_standard_rejects_purple_edges_at_the_red_vertex():
    with pytest.raises(ValueError):
        LttStructure.standard(3, 1, 2, [(1, 3)])
