import pytest

from percolab import (Configuration, StrategyError, generate, make_strategy,
                      parse_strategy, run, splice, verify_continuation)
from percolab.strategies import S, SBAR, Strategy, extend_with_rest
from percolab.graphs import faces


def _all_closed(g):
    return Configuration(g, 0)


def _all_open(g):
    return Configuration(g, (1 << g.n_edges) - 1)


def test_stop_strategy_empty_s():
    g = generate("cycle", 3, p=0.5)
    tr = run(parse_strategy("stop"), g, _all_open(g), _all_closed(g))
    assert tr.s_edges == frozenset()
    assert tr.steps == ()


def test_reveal_all():
    g = generate("cycle", 3, p=0.5)
    tr = run(parse_strategy("reveal_all:S"), g, _all_open(g), _all_closed(g))
    assert tr.s_edges == frozenset(g.edge_ids)
    assert tr.queried == g.edge_ids


def test_bfs_cluster_reveals_cluster_boundary():
    g = generate("cycle", 3, p=0.5)
    # only the a-b edge open: the cluster {a,b} touches every triangle edge
    c1 = g.config(["e0"])
    tr = run(make_strategy("bfs_cluster", "a"), g, c1, _all_closed(g))
    assert tr.s_edges == frozenset(g.edge_ids)
    assert all(st.decision == S for st in tr.steps)


def test_bfs_cluster_stops_at_closed_boundary():
    g = generate("path", 3, p=0.5)  # a - x1 - x2 - b
    c1 = g.config([])
    tr = run(make_strategy("bfs_cluster", "a"), g, c1, _all_closed(g))
    assert tr.s_edges == {g.edge_ids[0]}  # only a's incident edge


def test_splice_examples():
    g = generate("path", 2, p=0.5)
    c1 = g.config(["e0"])
    c2 = g.config(["e1"])
    assert splice(c1, c2, g.edge_ids).mask == c1.mask
    assert splice(c1, c2, []).mask == c2.mask
    # S = {e0}: take e0 from c1, e1 from c2 -> both open
    assert splice(c1, c2, ["e0"]).mask == 0b11


def test_splice_complement_identity():
    g = generate("cycle", 4, p=0.5)
    for m1 in range(16):
        for m2 in range(16):
            c1, c2 = Configuration(g, m1), Configuration(g, m2)
            s = ["e0", "e2"]
            sbar = ["e1", "e3"]
            assert splice(c2, c1, s).mask == splice(c1, c2, sbar).mask


def test_seq_s1_on_all_closed_triangle():
    g = generate("cycle", 3, p=0.5)
    t = parse_strategy("seq:[dfs:c,id,S;dfs:a,id,Sbar;dfs:b,id,S]")
    tr = run(t, g, _all_closed(g), _all_closed(g))
    # pass from c queries its incident edges (e1, e2) into S; pass from a
    # queries the leftover edge e0 into the complement; pass from b is spent
    assert [(st.edge, st.decision) for st in tr.steps] == \
        [("e1", S), ("e2", S), ("e0", SBAR)]
    assert tr.s_edges == {"e1", "e2"}


def test_right_hand_walk_triangle_all_open():
    g = generate("cycle", 3, p=0.5)
    tr = run(parse_strategy("dfs:a,right_hand,until:c"), g, _all_open(g),
             _all_closed(g))
    # walks straight along the boundary away from b; e2 is the a-c edge
    assert tr.s_edges == {"e2"}


def test_right_hand_walk_detours_when_closed():
    g = generate("cycle", 3, p=0.5)
    c1 = g.config(["e0", "e1"])  # a-c edge closed
    tr = run(parse_strategy("dfs:a,right_hand,until:c"), g, c1, _all_closed(g))
    assert [st.edge for st in tr.steps] == ["e2", "e0", "e1"]
    assert tr.s_edges == frozenset(g.edge_ids)


def _outer_backward_path(g, start, target):
    """Edges of the outer cycle walked against its orientation, start->target."""
    cyc = faces(g).outer
    verts = [tail for _, tail in cyc]
    i = verts.index(start)
    path = []
    n = len(cyc)
    while verts[i] != target:
        j = (i - 1) % n
        path.append(cyc[j][0])
        i = j
    return path


@pytest.mark.parametrize("spec,target", [
    ("family:cycle:3,p=0.5", "c"),
    ("family:cycle:5,p=0.5", "c"),
    ("family:grid:3,3,p=0.5", "b"),
    ("family:grid:3,2,p=0.5", "b"),
])
def test_right_hand_walk_follows_boundary_when_all_open(spec, target):
    from percolab import graph_from_spec
    g = graph_from_spec(spec)
    tr = run(parse_strategy(f"dfs:a,right_hand,until:{target}"), g,
             _all_open(g), Configuration(g, 0))
    assert sorted(tr.s_edges) == sorted(_outer_backward_path(g, "a", target))


def test_right_hand_walk_contains_rightmost_arc_on_cycles():
    # on a cycle the walk's set S must contain the boundary arc a->c whenever
    # that arc is fully open, regardless of the rest
    g = generate("cycle", 5, p=0.5)
    arc = set(_outer_backward_path(g, "a", "c"))
    t = parse_strategy("dfs:a,right_hand,until:c")
    for mask in range(1 << g.n_edges):
        c1 = Configuration(g, mask)
        if all(c1[e] for e in arc):
            tr = run(t, g, c1, Configuration(g, 0))
            assert arc <= tr.s_edges


def test_rhw_walks_zero_is_empty():
    g = generate("parallel", 3, p=0.5)
    tr = run(parse_strategy("rhw_walks:a,b,0"), g, _all_open(g), _all_closed(g))
    assert tr.s_edges == frozenset()


def test_rhw_walks_peel_disjoint_routes():
    g = generate("parallel", 3, p=1.0)
    tr = run(parse_strategy("rhw_walks:a,b,2"), g, _all_open(g), _all_closed(g))
    # two walks, each a two-edge route
    assert len(tr.steps) == 4
    assert tr.s_edges == frozenset(st.edge for st in tr.steps)


def test_right_hand_requires_rotation():
    g = generate("complete", 4, p=0.5)
    with pytest.raises(StrategyError, match="rotation"):
        run(parse_strategy("dfs:a,right_hand,S"), g, _all_open(g), _all_closed(g))


def test_run_rejects_requery():
    class Bad(Strategy):
        name = "bad"

        def policy(self, g):
            _ = yield (g.edge_ids[0], S)
            _ = yield (g.edge_ids[0], S)

    g = generate("cycle", 3, p=0.5)
    with pytest.raises(StrategyError, match="re-queried"):
        run(Bad(), g, _all_open(g), _all_closed(g))


def test_run_rejects_unknown_edge():
    class Bad(Strategy):
        name = "bad"

        def policy(self, g):
            _ = yield ("nope", S)

    g = generate("cycle", 3, p=0.5)
    with pytest.raises(StrategyError, match="unknown edge"):
        run(Bad(), g, _all_open(g), _all_closed(g))


def test_verify_continuation():
    g = generate("cycle", 3, p=0.5)
    t1 = parse_strategy("dfs_stop_at:a,b,c")
    t2 = extend_with_rest(t1, SBAR)
    assert verify_continuation(t1, t1, g)
    assert verify_continuation(t1, t2, g)
    assert not verify_continuation(parse_strategy("reveal_all:S"),
                                   parse_strategy("bfs_cluster:a"), g)


def test_verify_continuation_general_path():
    class FromC2(Strategy):
        """Queries e0; continues to e1 only when e0 is open in c2."""
        name = "fromc2"
        uses_c2 = True

        def policy(self, g):
            _b1, b2 = yield (g.edge_ids[0], S)
            if b2:
                _ = yield (g.edge_ids[1], S)

    g = generate("cycle", 3, p=0.5)
    t1 = FromC2()
    t2 = extend_with_rest(t1, SBAR)
    assert t2.uses_c2
    assert verify_continuation(t1, t2, g)


def test_adaptedness_same_prefix_same_next():
    # strategies are functions of the revealed trace: runs whose traces agree
    # step for step up to k agree on the next query and decision
    g = generate("cycle", 3, p=0.5)
    for spec in ("bfs_cluster:a", "dfs:a,id,S", "dfs:a,right_hand,until:c"):
        t = parse_strategy(spec)
        traces = []
        for m1 in range(8):
            for m2 in range(8):
                tr = run(t, g, Configuration(g, m1), Configuration(g, m2))
                traces.append([(s.edge, s.decision, s.bit1, s.bit2) for s in tr.steps])
        for ta in traces:
            for tb in traces:
                for k in range(min(len(ta), len(tb))):
                    if ta[:k] == tb[:k]:
                        assert ta[k][0] == tb[k][0] and ta[k][1] == tb[k][1]
                    else:
                        break


def test_parse_strategy_rejects_unknown():
    with pytest.raises(StrategyError):
        parse_strategy("warp:a")
    with pytest.raises(StrategyError):
        parse_strategy("dfs:a,id")
