from percolab import (Estimate, exact_pair, exact_prob, generate,
                      graph_from_spec, mc_npaths, mc_pair, mc_prob,
                      parse_event, parse_strategy)
from percolab.exact import Joint, exact_npaths
from percolab.mc import mc_flow_tail


def test_determinism_bit_for_bit():
    g = generate("cycle", 3, p=0.5)
    e = parse_event("a,b,c")
    a = mc_prob(g, e, 20000, 7)
    b = mc_prob(g, e, 20000, 7)
    assert a == b
    c = mc_prob(g, e, 20000, 8)
    assert a != c


def test_single_edge_bernoulli():
    g = generate("path", 1, p=0.3)
    est = mc_prob(g, parse_event("a,b"), 10 ** 6, 42)
    assert abs(est.mean - 0.3) < 4 * est.std_error


def test_sure_event_is_exactly_one():
    g = generate("cycle", 3, p=1.0)
    assert mc_prob(g, parse_event("a,b"), 5000, 1).mean == 1.0


def test_triangle_against_exact():
    g = generate("cycle", 3, p=0.5)
    e = parse_event("a,b,c")
    est = mc_prob(g, e, 10 ** 6, 11)
    assert abs(est.mean - 0.5) < 4 * est.std_error


def test_wilson_interval_inside_unit_and_covers_mean():
    g = generate("cycle", 3, p=0.5)
    for text, seed in (("a|b|c", 3), ("a,b,c", 4)):
        est = mc_prob(g, parse_event(text), 5000, seed)
        assert 0.0 <= est.ci_low <= est.mean <= est.ci_high <= 1.0


def test_oracle_consistency_many_seeds():
    # coverage: the exact value within four standard errors in >= 95 of 100 runs
    g = generate("cycle", 3, p=0.5)
    e = parse_event("a,b")
    exact = exact_prob(g, e)
    hits = 0
    for seed in range(100):
        est = mc_prob(g, e, 2000, seed)
        if abs(est.mean - exact) <= 4 * max(est.std_error, 1e-9):
            hits += 1
    assert hits >= 95


def test_oracle_consistency_mixed_events():
    for gspec, text in (("family:theta:3,p=0.5", "a|b|c"),
                        ("family:grid:3,2,p=0.25", "a,b U a,c"),
                        ("family:parallel:3,q=0.5", "npaths(a,b,2)")):
        g = graph_from_spec(gspec)
        e = parse_event(text)
        exact = exact_prob(g, e)
        est = mc_prob(g, e, 200_000, 5)
        assert abs(est.mean - exact) < 4 * max(est.std_error, 1e-9), (gspec, text)


def test_monotone_streams_common_randomness():
    # same seed, increasing p: an increasing event can only gain frequency
    e = parse_event("a,b,c")
    means = [mc_prob(generate("cycle", 4, p=p), e, 20000, 99).mean
             for p in (0.2, 0.4, 0.6, 0.8)]
    assert means == sorted(means)


def test_mc_npaths_matches_exact():
    g = generate("parallel", 3, q=0.5)
    est = mc_npaths(g, "a", "b", 2, 200_000, 13)
    assert abs(est.mean - 0.5) < 4 * est.std_error
    est3 = mc_npaths(g, "a", "b", 3, 200_000, 14)
    assert abs(est3.mean - 0.125) < 4 * est3.std_error


def test_mc_npaths_one_equals_connectivity_event():
    g = generate("theta", 3, p=0.5)
    a = mc_npaths(g, "a", "b", 1, 30000, 21)
    b = mc_prob(g, parse_event("npaths(a,b,1)"), 30000, 21)
    assert a.mean == b.mean  # same indicator, same stream


def test_mc_flow_tail_consistent():
    g = generate("parallel", 3, q=0.5)
    tails = mc_flow_tail(g, "a", "b", 3, 50000, 17)
    assert tails[0].mean >= tails[1].mean >= tails[2].mean
    for k, est in enumerate(tails, start=1):
        assert abs(est.mean - exact_npaths(g, "a", "b", k)) < \
            4 * max(est.std_error, 1e-9)


def test_mc_pair_factorization_and_oracle():
    g = generate("cycle", 3, p=0.5)
    A, B = parse_event("a,b"), parse_event("b,c")
    stop = parse_strategy("stop")
    est = mc_pair(g, stop, Joint(A, B), 100_000, 31)
    want = exact_prob(g, A) * exact_prob(g, B)
    assert abs(est.mean - want) < 4 * est.std_error
    bfs = parse_strategy("bfs_cluster:a")
    est2 = mc_pair(g, bfs, Joint(A, B), 100_000, 32)
    want2 = exact_pair(g, bfs, Joint(A, B))
    assert abs(est2.mean - want2) < 4 * est2.std_error


def test_submultiplicativity_at_three_sigma():
    g = graph_from_spec("family:grid:2,6,p=0.7")
    f1 = mc_npaths(g, "a", "b", 1, 30000, 41)
    f2 = mc_npaths(g, "a", "b", 2, 30000, 42)
    slack = f1.mean ** 2 - f2.mean
    se = (4 * (f1.mean * f1.std_error) ** 2 + f2.std_error ** 2) ** 0.5
    assert slack > -3 * se


def test_estimate_fields():
    est = Estimate.from_count(50, 100, 9)
    assert est.mean == 0.5
    assert est.n == 100 and est.seed == 9
    assert 0.4 < est.ci_low < 0.5 < est.ci_high < 0.6


def test_pair_bound_on_grid_at_three_sigma():
    # cluster-reveal coupling from the first mark, stopped at the others: the
    # coupled joint of the triple connection is at most twice the
    # union-times-pair product (checked statistically on a 5x5 grid)
    g = graph_from_spec("family:grid:5,5,p=0.5")
    t = parse_strategy("dfs_stop_at:a,b,c")
    abc = parse_event("a,b,c")
    joint = mc_pair(g, t, Joint(abc, abc), 20000, 61)
    pu = mc_prob(g, parse_event("a,b U a,c"), 200_000, 62)
    pbc = mc_prob(g, parse_event("b,c"), 200_000, 63)
    rhs = 2 * pu.mean * pbc.mean
    se = (joint.std_error ** 2 + (2 * pbc.mean * pu.std_error) ** 2 +
          (2 * pu.mean * pbc.std_error) ** 2) ** 0.5
    assert rhs - joint.mean > -3 * se
