from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eulermix.chain import build
from eulermix.corpus import FAMILIES, family
from eulermix.graph import (
    GOLDEN,
    GOLDEN_DECIMAL,
    EulerianMultigraph,
    GadgetSpec,
    GraphFormatError,
    format_graph,
    gen_biased_cycle,
    gen_circulant,
    gen_directed_cycle,
    gen_lollipop,
    gen_random_eulerian,
    gen_random_regular,
    gen_torus,
    gen_two_cycle_gadget,
    is_strongly_connected,
    parse_graph,
    read_graph,
    reverse,
    undirected_distance,
    undirected_distances,
    validate,
    write_graph,
)

from conftest import eulerian_graphs


def test_golden_constant():
    assert abs(GOLDEN - (5**0.5 - 1) / 2) < 1e-16
    assert abs(GOLDEN_DECIMAL * (1 + GOLDEN_DECIMAL) - 1) < 1e-25


def test_validate_directed_triangle():
    v = validate(gen_directed_cycle(3))
    assert (v.eulerian, v.connected, v.regular_degree) == (True, True, 1)


def test_validate_single_edge_not_eulerian():
    v = validate(EulerianMultigraph.from_edges(2, [(0, 1)]))
    assert not v.eulerian
    assert v.regular_degree is None


def test_validate_biased_cycle_is_three_regular():
    v = validate(gen_biased_cycle(8, 2, 1))
    assert (v.eulerian, v.connected, v.regular_degree) == (True, True, 3)


def test_validate_disconnected():
    g = EulerianMultigraph.from_edges(4, [(0, 1), (1, 0), (2, 3), (3, 2)])
    assert validate(g).eulerian and not validate(g).connected


def test_biased_cycle_examples():
    assert gen_biased_cycle(3, 1, 1).m == 6
    g = gen_biased_cycle(4, 2, 1)
    assert np.all(g.out_degree == 3) and np.all(g.in_degree == 3)
    g8 = gen_biased_cycle(8, 2, 1)
    assert g8.multiplicity(0, 1) == 2 and g8.multiplicity(0, 7) == 1
    with pytest.raises(ValueError):
        gen_biased_cycle(2, 1, 1)
    with pytest.raises(ValueError):
        gen_biased_cycle(5, 0, 1)


def test_biased_cycle_gives_one_third_one_sixth():
    P = build(gen_biased_cycle(8, 2, 1), 0.5).dense
    assert P[3, 4] == pytest.approx(1 / 3) and P[3, 2] == pytest.approx(1 / 6)


def test_random_eulerian_examples():
    g = gen_random_eulerian(8, 24, 5)
    v = validate(g)
    assert v.eulerian and v.connected and g.m >= 24
    assert gen_random_eulerian(8, 24, 5).edges() == g.edges()
    with pytest.raises(ValueError):
        gen_random_eulerian(5, 4, 0)


def test_random_eulerian_single_spanning_cycle():
    # with target_m = n a connected draw must be one Hamiltonian cycle
    for seed in range(20):
        g = gen_random_eulerian(5, 5, seed)
        if g.m == 5:
            assert validate(g).regular_degree == 1
            break
    else:
        pytest.fail("no single-cycle draw among 20 seeds")


def test_random_regular_is_simple_and_regular():
    g = gen_random_regular(16, 4, 1)
    assert validate(g).regular_degree == 4
    assert all(k == 1 for _, _, k in g.edges())
    assert not g.has_self_loops


def test_structured_families():
    assert validate(gen_circulant(9, [1, 2])).regular_degree == 2
    assert validate(gen_torus(3, 4)).regular_degree == 2
    lol = gen_lollipop(10)
    v = validate(lol)
    assert v.eulerian and v.connected and v.regular_degree is None
    assert undirected_distance(lol, 0, 9) == 6
    with pytest.raises(ValueError):
        gen_circulant(5, [5])


def test_gadget_shape():
    gd = gen_two_cycle_gadget(GadgetSpec(8, GOLDEN))
    g = gd.graph
    assert g.n == 15
    assert g.out_degree[0] == 6 and np.all(g.out_degree[1:] == 3)
    assert validate(g).eulerian
    assert np.sum(gd.holding == GOLDEN) == 5
    assert [gd.left(i) for i in (0, 4)] == [0, 4]
    assert gd.landmarks == {"zero": 0, "a": 4, "b": 11}
    flat = gen_two_cycle_gadget(GadgetSpec(8, 0.5))
    assert np.all(flat.holding == 0.5)


def test_gadget_half_open_interval():
    gd = gen_two_cycle_gadget(GadgetSpec(8, GOLDEN, "half_open"))
    assert np.sum(gd.holding == GOLDEN) == 4


def test_gadget_rejects_bad_n():
    for n in (6, 0, 10):
        with pytest.raises(ValueError):
            GadgetSpec(n, 0.5)


def test_gadget_alpha_half_matches_constant_holding():
    gd = gen_two_cycle_gadget(GadgetSpec(12, 0.5))
    a = build(gd.graph, gd.holding).dense
    b = build(gd.graph, 0.5).dense
    assert np.array_equal(a, b)


def test_reverse_examples():
    r = reverse(gen_directed_cycle(3))
    assert sorted(r.edges()) == [(0, 2, 1), (1, 0, 1), (2, 1, 1)]
    rb = reverse(gen_biased_cycle(6, 2, 1))
    assert rb.multiplicity(0, 1) == 1 and rb.multiplicity(0, 5) == 2


@given(eulerian_graphs())
def test_reverse_involution(g):
    r = reverse(g)
    assert reverse(r) == g
    assert r.m == g.m
    assert np.array_equal(r.out_degree, g.in_degree)
    assert np.array_equal(r.in_degree, g.out_degree)


@given(eulerian_graphs())
def test_degree_bookkeeping(g):
    assert g.out_degree.sum() == g.in_degree.sum() == g.m
    assert np.array_equal(g.out_degree, g.in_degree)


@given(eulerian_graphs())
def test_connected_iff_strongly_connected_for_eulerian(g):
    assert validate(g).connected == is_strongly_connected(g)


def test_strong_connectivity_on_corpus():
    for fam in FAMILIES:
        for e in family(fam):
            assert is_strongly_connected(e.graph) == validate(e.graph).connected


def test_undirected_distance_examples():
    g = gen_directed_cycle(10)
    assert undirected_distance(g, 3, 3) == 0
    assert undirected_distance(g, 1, 0) == 1
    assert undirected_distance(g, 0, 5) == 5
    h = EulerianMultigraph.from_edges(3, [(0, 1), (1, 0)])
    assert undirected_distances(h, 0)[2] == -1
    with pytest.raises(ValueError):
        undirected_distance(h, 0, 2)


@given(eulerian_graphs())
def test_format_roundtrip(g):
    g2, hold = parse_graph(format_graph(g))
    assert g2 == g and hold is None


def test_format_roundtrip_with_holding_and_comments(tmp_path):
    gd = gen_two_cycle_gadget(GadgetSpec(8, GOLDEN))
    text = format_graph(gd.graph, gd.holding)
    g, hold = parse_graph("# a comment\n" + text.replace("\n", "  # trailing\n", 1))
    assert g == gd.graph and np.array_equal(hold, gd.holding)
    path = tmp_path / "g.eul"
    write_graph(path, gd.graph, gd.holding)
    assert path.read_text() == text
    g3, h3 = read_graph(path)
    assert g3 == gd.graph and np.array_equal(h3, gd.holding)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "graph 3 3\n",
        "eul 3\n",
        "eul 2 1\n0 1\n",
        "eul 2 1\n0 5 1\n",
        "eul 2 2\n0 1 1\n",
        "eul 2 2\n0 1 1\n1 0 1\nholding\n0 0.5\n",
        "eul 2 2\n0 1 1\n1 0 1\nholding\n0 1.5\n1 0.5\n",
        "eul 2 1\n0 x 1\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(GraphFormatError):
        parse_graph(text)


def test_generators_have_no_self_loops():
    for fam in FAMILIES:
        for e in family(fam):
            assert not e.graph.has_self_loops


@given(st.integers(3, 40), st.integers(0, 10**6))
def test_random_regular_property(n, seed):
    g = gen_random_regular(n, 2, seed)
    assert validate(g).regular_degree == 2 and validate(g).connected
