import itertools

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from iwgraphs.dot import composition_dot
from iwgraphs.ltt import LttStructure, SmoothPath, is_birecurrent, potential_construction_paths, relabel_turns
from iwgraphs.maps import GraphMap, compose
from iwgraphs.moves import (
    Composition,
    CompositionKind,
    ConstructionError,
    Fold,
    GeneratingTriple,
    Kind,
    achieved_subgraph_sequence,
    assemble_ideal_decomposition,
    compose_folds,
    construction_path,
    decompose_representative,
    decomposition_triples,
    extensions_from,
    induced_ltt_map,
    parse_fold,
    preimage_subgraph,
    realize_construction,
    rotate_to_extension,
    split_segments,
    switch_sequence,
    switches_from,
)
from iwgraphs.verifier import Verdict, loop_decomposition
from iwgraphs.words import Rose, make_turn, reduce_letters


@st.composite
def ltt_structures(draw):
    dirs = Rose(3).directions()
    du = draw(st.sampled_from(dirs))
    purple_vs = [d for d in dirs if d != du]
    pairs = list(itertools.combinations(purple_vs, 2))
    purple = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=4))
    attach = draw(st.sampled_from(purple_vs))
    return LttStructure.standard(3, du, attach, [make_turn(*p) for p in purple])


@pytest.fixture(scope="module")
def decompositions(corpus_reports):
    return {
        label: loop_decomposition(h)
        for label, (_, h, rep) in corpus_reports.items()
        if rep.verdict is Verdict.ACCEPTED
    }


def test_fold_basics():
    f = Fold(3, 3, -2)
    assert str(f) == "c->Bc"
    assert parse_fold("c->Bc", 3) == f
    assert f.to_map().image(3) == (-2, 3)
    assert f.direction_map()[3] == -2
    with pytest.raises(ValueError):
        Fold(3, 1, -1)
    with pytest.raises(ValueError):
        parse_fold("c->Ba", 3)


def test_compose_folds_applies_in_order():
    f1, f2 = Fold(3, 3, -2), Fold(3, 1, 3)
    assert compose_folds([f1, f2]) == compose(f2.to_map(), f1.to_map())
    with pytest.raises(ValueError):
        compose_folds([])
    assert compose_folds([], rank=3) == GraphMap.identity(3)


def test_corpus_triples_satisfy_the_triple_conditions(decompositions):
    for label, dec in decompositions.items():
        for t in dec.triples:
            assert not t.violations(), (label, str(t))
            mapping = induced_ltt_map(t)
            if t.kind is Kind.EXTENSION:
                # extensions fix every purple vertex
                assert all(k == v for k, v in mapping.items())
                assert t.source.purple_edges == t.dest.purple_edges
            else:
                # the folded direction takes the place of the source red vertex
                moved = {k: v for k, v in mapping.items() if k != v}
                assert moved == {t.fold.x: t.fold.y}


def test_preimage_subgraph_round_trip(decompositions):
    for dec in decompositions.values():
        for t in dec.triples:
            H = t.dest.purple_edges
            pre = preimage_subgraph(H, t)
            assert pre == t.source.purple_edges
            with pytest.raises(ValueError):
                preimage_subgraph(H | {t.dest.red_edge}, t)


def test_triples_into_a_corpus_structure_are_valid(decompositions):
    G = decompositions["I"].structures[0]
    ext, sw = extensions_from(G), switches_from(G)
    assert ext or sw
    for t in ext + sw:
        assert t.dest == G
        assert not t.violations()
        assert is_birecurrent(t.source)
    assert all(t.kind is Kind.EXTENSION for t in ext)
    assert all(t.kind is Kind.SWITCH for t in sw)


def test_switch_exclusion_drops_one_option(decompositions):
    G = decompositions["I"].structures[0]
    sw = switches_from(G)
    if sw:
        d = sw[0].source.attach
        assert all(t.source.attach != d for t in switches_from(G, exclude=d))


def test_single_switch_is_a_switch_sequence(decompositions):
    for dec in decompositions.values():
        for t in dec.triples:
            if t.kind is Kind.SWITCH:
                comp, path = switch_sequence([t])
                assert comp.kind is CompositionKind.SWITCH_SEQUENCE
                assert path.vertices[0] == t.dest.unachieved
                return
    pytest.fail("no switch in the corpus decompositions")


def test_switch_sequence_rejects_repeated_red_vertex(decompositions):
    for dec in decompositions.values():
        sws = [t for t in dec.triples if t.kind is Kind.SWITCH]
        for a in sws:
            for b in sws:
                if a.dest == b.source and a.dest.unachieved == b.dest.unachieved:
                    with pytest.raises(ValueError):
                        switch_sequence([a, b])
                    return
    # no naturally occurring pair; a non-switch must still be refused
    ext = next(t for dec in decompositions.values() for t in dec.triples if t.kind is Kind.EXTENSION)
    with pytest.raises(ValueError):
        switch_sequence([ext])


def test_realize_construction_with_a_switch(decompositions):
    G = decompositions["I"].structures[0]
    for path in potential_construction_paths(G):
        Gn = G if len(path.vertices) == 3 else G.with_red_edge(-path.vertices[-1])
        for s in switches_from(Gn):
            comp = realize_construction(path, G, switch_to=s.source.attach)
            assert comp.triples[0].kind is Kind.SWITCH
            assert comp.structures()[-1] == G
            return
    pytest.skip("no construction path admits a switch here")


def test_realize_construction_errors(decompositions):
    G = decompositions["I"].structures[0]
    with pytest.raises(ConstructionError):
        realize_construction(SmoothPath((G.unachieved, G.attach)), G)
    with pytest.raises(ConstructionError):
        realize_construction(SmoothPath((G.attach, G.unachieved, -G.unachieved)), G)


def test_single_step_construction_is_empty(decompositions):
    G = decompositions["I"].structures[0]
    path = SmoothPath((G.unachieved, G.attach, G.achieved))
    comp = realize_construction(path, G)
    assert comp.triples == ()
    assert construction_path(comp, destination=G) == path


def test_assemble_rejects_open_chains(decompositions):
    dec = decompositions["I"]
    _, g = assemble_ideal_decomposition(dec.triples)
    assert g == dec.to_map()
    with pytest.raises(ValueError):
        assemble_ideal_decomposition(dec.triples[:-1])
    with pytest.raises(ValueError):
        assemble_ideal_decomposition([])
    with pytest.raises(ValueError):
        Composition((dec.triples[1], dec.triples[0]))


def test_one_fold_loop_passes_through():
    f = Fold(2, 1, 2)
    dec = decomposition_triples([f])
    assert len(dec.triples) == 1
    assert dec.structures[0] == dec.structures[-1]
    assert dec.to_map() == f.to_map()


def test_split_segments_alternate(decompositions):
    for dec in decompositions.values():
        segs = split_segments(dec.triples)
        assert sum(len(s.triples) for s in segs) == len(dec.triples)
        for a, b in zip(segs, segs[1:]):
            assert a.triples[0].kind is not b.triples[0].kind
            assert all(t.kind is a.triples[0].kind for t in a.triples)


def test_achieved_subgraph_sequence(decompositions):
    dec = decompositions["I"]
    triples = rotate_to_extension(dec.triples)
    segs = split_segments(triples)
    seq = achieved_subgraph_sequence(segs)
    assert seq
    assert seq[-1] <= triples[0].source.purple_edges
    ext = [s for s in segs if s.kind is CompositionKind.PURIFIED_CONSTRUCTION]
    base = achieved_subgraph_sequence(ext[-1:])
    assert base == [frozenset(construction_path(ext[-1]).colored_edges()[1:])]
    with pytest.raises(ValueError):
        achieved_subgraph_sequence(ext[:1] * 2)


def composes_without_cancellation(folds):
    g = folds[0].to_map()
    for f in folds[1:]:
        raw = [tuple(y for x in img for y in f.to_map().image(x)) for img in g.images]
        if any(reduce_letters(w) != w for w in raw):
            return False
        g = compose(f.to_map(), g)
    return True


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from([1, -1, 2, -2, 3, -3]), st.sampled_from([1, -1, 2, -2, 3, -3])), min_size=1, max_size=6))
def test_decompose_representative_composes_back(pairs):
    # peeling reads folds off image prefixes, so it needs a cancellation-free composite
    folds = [Fold(3, x, y) for x, y in pairs if abs(x) != abs(y)]
    assume(folds and composes_without_cancellation(folds))
    g = compose_folds(folds)
    found = decompose_representative(g)
    assert found is not None
    assert compose_folds(found, rank=3) == g


def test_corpus_decompositions_compose_to_the_representative(corpus_reports, decompositions):
    for label, dec in decompositions.items():
        _, h, _ = corpus_reports[label]
        assert dec.to_map() == h
        assert dec.direction_census()["fixed"] == 5


def test_triple_violation_messages(decompositions):
    t = decompositions["I"].triples[0]
    bad = GeneratingTriple(Fold(3, t.fold.y, t.fold.x), t.source, t.dest, t.kind)
    assert bad.violations()


def test_construction_automorphism_of_the_period_two_entry(corpus_reports):
    # the last seven folds of the loop for h form a construction composition
    e, _, _ = corpus_reports["XX"]
    dec = decomposition_triples(decompose_representative(e.map))
    tail = Composition(dec.triples[8:])
    assert tail.kind is CompositionKind.CONSTRUCTION
    G = tail.triples[-1].dest
    path = construction_path(tail)
    assert path in potential_construction_paths(G, max_len=len(path))
    again = realize_construction(path, G, switch_to=tail.triples[0].source.attach)
    assert again == tail
    assert again.to_map().lines() == ["a -> abCCbbcb", "b -> b", "c -> c"]


def test_induced_map_of_the_last_worked_fold():
    # a -> Ba sends the direction a to B and leaves the turns at b, c alone
    f = Fold(3, 1, -2)
    dm = f.direction_map()
    assert relabel_turns({make_turn(3, 2), make_turn(3, -3)}, dm) == {make_turn(3, 2), make_turn(3, -3)}
    assert relabel_turns({make_turn(-2, -3)}, dm) == {make_turn(-2, -3)}


def test_admissibility_label(decompositions):
    t = decompositions["I"].triples[0]
    assert t.admissibility == "admissible (stated conditions)"
    bad = GeneratingTriple(Fold(3, t.fold.y, t.fold.x), t.source, t.dest, t.kind)
    assert bad.admissibility == "not admissible"


def test_composition_dot(decompositions):
    comp = Composition(decompositions["I"].triples[:3])
    text = composition_dot(comp)
    assert text.startswith('digraph "composition"')
    assert text.count(" -> s") == 3


def _switch_chain(G, rng, length):
    chain, cur = [], G
    for _ in range(length):
        opts = switches_from(cur)
        if not opts:
            break
        t = rng.choice(opts)
        chain.insert(0, t)
        cur = t.source
    return chain


@settings(max_examples=150, deadline=None)
@given(ltt_structures(), st.randoms(use_true_random=False), st.integers(2, 3))
def test_switch_paths_under_ss2(G, rng, length):
    assume(G.attach != -G.unachieved and is_birecurrent(G))
    chain = _switch_chain(G, rng, length)
    assume(len(chain) >= 2)
    dests = [t.dest for t in chain]
    ss2 = all(
        dests[n].unachieved != dests[l].unachieved and dests[l].attach != dests[n].unachieved
        for n in range(len(dests))
        for l in range(n)
    )
    vs = [dests[-1].unachieved]
    for D in reversed(dests):
        vs += [D.attach, D.achieved]
    raw = SmoothPath(tuple(vs))
    smooth = raw.is_smooth_in(dests[-1])
    if ss2:
        assert smooth
        assert switch_sequence(chain)[1] == raw
    else:
        # a violation either breaks smoothness or makes the path revisit a vertex
        assert not smooth or len(set(vs)) < len(vs)
        with pytest.raises(ValueError):
            switch_sequence(chain)
