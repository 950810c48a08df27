import random

from hmlchar.altgraph import EXISTS, FORALL, AltGraph, reach_a, reach_naive


def test_small_graphs():
    g = AltGraph("s", "t")
    g.add_vertex("s", FORALL)
    g.add_edge("s", "x")
    g.add_edge("s", "t")
    assert not reach_a(g)
    g.add_edge("x", "t")
    assert reach_a(g)
    assert "digraph" in g.to_dot()


def test_universal_sink_does_not_reach():
    g = AltGraph("s", "t")
    g.add_vertex("t")
    g.add_vertex("s", FORALL)
    assert not reach_a(g)


def test_matches_naive_fixpoint():
    rng = random.Random(1)
    for _ in range(300):
        g = AltGraph(0, 1)
        n = rng.randint(2, 8)
        for v in range(n):
            g.add_vertex(v, rng.choice([EXISTS, FORALL]))
        for _ in range(rng.randint(0, 2 * n)):
            g.add_edge(rng.randrange(n), rng.randrange(n))
        ops = []
        assert reach_a(g, ops=ops) == reach_naive(g)
        assert not ops or ops[0] <= g.edge_count()
