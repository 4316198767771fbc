import json

import pytest

from iwgraphs.diagram import (
    IdDiagram,
    build_id_diagram,
    extension_subdiagram,
    irreducibility_potential_test,
    node_candidates,
    potential_composition_subgraph,
    search_loops,
)
from iwgraphs.ltt import LttStructure
from iwgraphs.moves import Kind
from iwgraphs.verifier import Verdict, loop_flags, verify_representative
from iwgraphs.whitehead import SimpleGraph, are_isomorphic, path_graph
from iwgraphs.words import make_turn


@pytest.fixture(scope="module")
def achieved(catalog5):
    return build_id_diagram(catalog5[2], 3)


@pytest.fixture(scope="module")
def unachieved(catalog5):
    return build_id_diagram(catalog5[0], 3)


def test_node_bound(catalog5):
    for g in catalog5:
        assert len(node_candidates(g, 3)) <= 4320
    with pytest.raises(ValueError):
        node_candidates(path_graph(4), 3)


def test_components_are_strongly_connected(achieved):
    D = achieved
    assert D.components
    for comp in D.components:
        members = set(comp)
        for v in comp:
            outs = [t for t in D.out_edges[v] if D.index[t.dest] in members]
            ins = [t for t in D.edges if D.index[t.dest] == v and D.index[t.source] in members]
            assert outs and ins


def test_edges_stay_inside_components(achieved):
    D = achieved
    for t in D.edges:
        assert D.component_of[D.index[t.source]] == D.component_of[D.index[t.dest]]
        assert not t.violations()
    assert D.stats["nodes"] == len(D.nodes) <= D.stats["admissible_nodes"] <= D.stats["candidates"]


def test_purple_graphs_are_labelings_of_the_graph(achieved, catalog5):
    for G in achieved.nodes[:50]:
        assert are_isomorphic(G.purple_graph(), catalog5[2])[0]


def test_potential_test_examples(achieved, unachieved):
    assert irreducibility_potential_test(achieved).verdict == "potentially achieved"
    test = irreducibility_potential_test(unachieved)
    assert test.verdict == "unachieved"
    assert all(test.uncovered[i] for i in range(len(test.passed)))
    empty = IdDiagram(achieved.graph, 3, [], [], [])
    assert irreducibility_potential_test(empty).verdict == "unachieved"


def test_single_node_component_fails():
    # a lone node carries one red vertex, leaving two edge pairs uncovered
    G = LttStructure.standard(3, 1, 2, [(-1, 2), (-1, 3), (2, -2), (2, -3), (-2, 3), (3, -3)])
    D = IdDiagram(G.purple_graph(), 3, [G], [], [[0]])
    test = irreducibility_potential_test(D)
    assert test.passed == [False] and test.uncovered == [[2, 3]]


def test_extension_components(achieved):
    comps = extension_subdiagram(achieved)
    assert comps
    for c in comps:
        for v in c.nodes:
            assert c.pi_subgraph <= achieved.nodes[v].purple_edges
        assert all(t.kind is Kind.EXTENSION for t in c.edges)


def test_potential_composition_subgraph_example():
    pi = frozenset({make_turn(-1, 3), make_turn(2, 3), make_turn(-2, -3), make_turn(2, -3)})
    sub = potential_composition_subgraph(pi, 3)
    assert sub.vertices == frozenset({-1, 2, -2, 3, -3}) - {-1}
    assert sub.colored == pi - {make_turn(-1, 3)}
    assert sub.black == frozenset({2, 3})
    for v in sub.vertices:
        deg = sum(v in t for t in sub.colored) + (abs(v) in sub.black)
        assert deg >= 2


def test_search_budget_zero_is_empty(achieved):
    res = search_loops(achieved, budget=0)
    assert res.candidates == [] and res.stats["exhausted"]
    with pytest.raises(ValueError):
        search_loops(achieved, strategy="x")


@pytest.mark.parametrize("strategy", ["ib", "ia"])
def test_search_finds_a_verified_loop(achieved, catalog5, strategy):
    res = search_loops(achieved, strategy=strategy)
    assert res.candidates
    last = res.candidates[-1]
    assert last.flags["accepted"]
    assert achieved.embeds_loop(last.triples)
    rep = verify_representative(last.map, target=catalog5[2])
    assert rep.verdict is Verdict.ACCEPTED
    again = search_loops(achieved, strategy=strategy)
    assert [c.map for c in again.candidates] == [c.map for c in res.candidates]


def test_pretest_loop_can_need_augmenting(achieved):
    # the first seed only has to pass the coverage pretest, not the full check
    res = search_loops(achieved, strategy="ib", max_augmentations=0, max_candidates=50)
    for c in res.candidates:
        assert c.flags["red_vertex_coverage"]
    assert any(not c.flags["accepted"] for c in res.candidates)
    full = search_loops(achieved, strategy="ib")
    assert full.candidates[-1].flags["accepted"]
    assert full.stats["augmentations"] >= 1


def test_search_in_unachieved_diagram_is_empty(unachieved):
    res = search_loops(unachieved)
    assert res.candidates == [] and res.stats["exhausted"]


def test_loop_flags_match_the_verifier(achieved):
    res = search_loops(achieved)
    c = res.candidates[-1]
    assert loop_flags(c.triples) == c.flags


def test_diagram_json_is_serializable(achieved):
    data = achieved.to_json()
    text = json.dumps(data, sort_keys=True)
    back = json.loads(text)
    assert back["stats"] == achieved.stats
    assert len(back["nodes"]) == len(achieved.nodes)
    assert all(0 <= e["source"] < len(back["nodes"]) for e in back["edges"])


def test_disconnected_graph_is_rejected():
    g = SimpleGraph.build(range(5), [(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        build_id_diagram(g, 3)
