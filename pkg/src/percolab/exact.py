"""Exact probabilities by exhaustive enumeration; the ground-truth oracle.

Configurations are enumerated as bitmasks in lexicographic edge-id order.
Sums use math.fsum so the advertised 1e-12 tolerances are honest for the
dyadic probabilities the built-in corpus uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import config
from .errors import SizeGuardError
from .events import (EventExpr, evaluate_mask, open_maxflow,
                     require_increasing, unparse, _resolve, _has_partition)
from .graphs import Configuration, Graph, cluster_labels
from .strategies import Strategy, run, splice_mask


def weights(g: Graph) -> list[float]:
    """Probability of every configuration mask, index-aligned."""
    if g._weights is not None:
        return g._weights
    if g.n_edges > config.MAX_EXACT_EDGES:
        raise SizeGuardError(f"exact enumeration limited to {config.MAX_EXACT_EDGES} edges")
    w = [1.0]
    for p in g.probs:
        q = 1.0 - p
        w = [x * q for x in w] + [x * p for x in w]
    g._weights = w
    return w


def truth_table(g: Graph, e: EventExpr) -> bytearray:
    """Indicator of the event over all configuration masks (cached per graph)."""
    key = unparse(e)
    tab = g._event_tables.get(key)
    if tab is not None:
        return tab
    if g.n_edges > config.MAX_EXACT_EDGES:
        raise SizeGuardError(f"exact enumeration limited to {config.MAX_EXACT_EDGES} edges")
    _resolve(e, g)
    n = 1 << g.n_edges
    tab = bytearray(n)
    needs_labels = _has_partition(e)
    for mask in range(n):
        labels = cluster_labels(g, mask) if needs_labels else None
        if evaluate_mask(e, g, mask, labels):
            tab[mask] = 1
    g._event_tables[key] = tab
    return tab


def flow_table(g: Graph, u: str, v: str, cap: int = 8) -> bytearray:
    """min(max-flow, cap) between u and v for every configuration mask."""
    key = (u, v)
    tab = g._flow_tables.get(key)
    if tab is not None:
        return tab
    if g.n_edges > config.MAX_EXACT_EDGES:
        raise SizeGuardError(f"exact enumeration limited to {config.MAX_EXACT_EDGES} edges")
    n = 1 << g.n_edges
    tab = bytearray(n)
    for mask in range(n):
        tab[mask] = min(open_maxflow(g, mask, u, v, cap=cap), cap)
    g._flow_tables[key] = tab
    return tab


def exact_prob(g: Graph, e: EventExpr) -> float:
    """Probability of the event under independent edge openings."""
    w = weights(g)
    tab = truth_table(g, e)
    return math.fsum(w[m] for m in range(len(w)) if tab[m])


def exact_npaths(g: Graph, u: str, v: str, n: int) -> float:
    """Probability of n pairwise edge-disjoint open u-v paths."""
    if n < 1:
        raise ValueError("n must be >= 1")
    w = weights(g)
    cap = max(8, n)
    tab = flow_table(g, u, v, cap=cap)
    return math.fsum(w[m] for m in range(len(w)) if tab[m] >= n)


# ---------------------------------------------------------------------------
# Pair queries


@dataclass(frozen=True)
class Joint:
    """P(c1 in A and the S-splice of (c1, c2) in B)."""
    A: EventExpr
    B: EventExpr


@dataclass(frozen=True)
class SqS:
    """P of the S-relative disjoint occurrence of A and B (both increasing)."""
    A: EventExpr
    B: EventExpr


def _edge_weight_pairs(g: Graph):
    return [(p, 1.0 - p) for p in g.probs]


def _submask_weights(g: Graph, mask: int) -> list[tuple[int, float]]:
    """(submask, probability) for the edges selected by mask, cached."""
    cached = g._submask_cache.get(mask)
    if cached is not None:
        return cached
    pairs = [(0, 1.0)]
    i = 0
    m = mask
    while m:
        if m & 1:
            p = g.probs[i]
            bit = 1 << i
            pairs = [(sm, wt * (1.0 - p)) for sm, wt in pairs] + \
                    [(sm | bit, wt * p) for sm, wt in pairs]
        m >>= 1
        i += 1
    g._submask_cache[mask] = pairs
    return pairs


def _s_mask_for(g: Graph, t: Strategy, m1: int, m2: int = 0) -> int:
    trace = run(t, g, Configuration(g, m1), Configuration(g, m2))
    return trace.s_mask(g)


def _minimal_antichain(masks: list[int]) -> list[int]:
    masks = sorted(masks, key=lambda m: m.bit_count())
    keep: list[int] = []
    for m in masks:
        if not any(k & m == k for k in keep):
            keep.append(m)
    return keep


def exact_pair(g: Graph, t: Strategy, q) -> float:
    """Exact probability of a pair query, with S rebuilt per configuration pair.

    Strategies that never read the second configuration admit a factorized
    sum: enumerate c1, run the strategy once, and integrate the second
    configuration analytically over the complement of S.
    """
    if g.n_edges > config.MAX_PAIR_EDGES:
        raise SizeGuardError(f"pair enumeration limited to {config.MAX_PAIR_EDGES} edges")
    if isinstance(q, SqS):
        require_increasing(q.A, g, "first operand")
        require_increasing(q.B, g, "second operand")
    elif not isinstance(q, Joint):
        raise TypeError(f"unknown pair query {q!r}")
    if not t.uses_c2:
        return _pair_fast(g, t, q)
    return _pair_general(g, t, q)


def _pair_fast(g: Graph, t: Strategy, q) -> float:
    w = weights(g)
    full = (1 << g.n_edges) - 1
    tab_a = truth_table(g, q.A)
    tab_b = truth_table(g, q.B)
    terms = []
    for m1 in range(len(w)):
        w1 = w[m1]
        if w1 == 0.0:
            continue
        if isinstance(q, Joint) and not tab_a[m1]:
            continue
        s_mask = _s_mask_for(g, t, m1)
        sbar = full & ~s_mask
        if isinstance(q, Joint):
            pinned = m1 & s_mask
            inner = math.fsum(wt for sub, wt in _submask_weights(g, sbar)
                              if tab_b[pinned | sub])
        else:
            s_open = s_mask & m1
            fixed_a = sbar & m1
            ok_w = [wm for wm, _ in _submask_weights(g, s_open)
                    if tab_a[wm | fixed_a]]
            if not ok_w:
                continue
            ok_w = _minimal_antichain(ok_w)
            inner = math.fsum(
                wt for sub, wt in _submask_weights(g, sbar)
                if any(tab_b[(s_open & ~wm) | sub] for wm in ok_w))
        terms.append(w1 * inner)
    return math.fsum(terms)


def _pair_general(g: Graph, t: Strategy, q) -> float:
    from .events import sq_s_occurrence

    w = weights(g)
    tab_a = truth_table(g, q.A)
    tab_b = truth_table(g, q.B)
    terms = []
    for m1 in range(len(w)):
        c1 = Configuration(g, m1)
        for m2 in range(len(w)):
            c2 = Configuration(g, m2)
            trace = run(t, g, c1, c2)
            s_mask = trace.s_mask(g)
            if isinstance(q, Joint):
                ok = tab_a[m1] and tab_b[splice_mask(m1, m2, s_mask)]
            else:
                ok = sq_s_occurrence(q.A, q.B, g, c1, c2,
                                     [e for e in g.edge_ids
                                      if s_mask >> g.edge_index(e) & 1])
            if ok:
                terms.append(w[m1] * w[m2])
    return math.fsum(terms)


def verify_splice_independence(g: Graph, t: Strategy) -> float:
    """Max deviation of the law of (splice, co-splice) from the product law.

    The two hybrids built from an adaptively revealed S are independent and
    each distributed as the base measure; this returns the largest absolute
    error of that claim over all outcome pairs.
    """
    if g.n_edges > config.MAX_SPLICE_EDGES:
        raise SizeGuardError(
            f"splice-independence check limited to {config.MAX_SPLICE_EDGES} edges")
    w = weights(g)
    n = len(w)
    joint: dict[tuple[int, int], float] = {}
    if not t.uses_c2:
        s_of = [_s_mask_for(g, t, m1) for m1 in range(n)]
        for m1 in range(n):
            s_mask = s_of[m1]
            w1 = w[m1]
            for m2 in range(n):
                key = (splice_mask(m1, m2, s_mask), splice_mask(m2, m1, s_mask))
                joint[key] = joint.get(key, 0.0) + w1 * w[m2]
    else:
        for m1 in range(n):
            c1 = Configuration(g, m1)
            for m2 in range(n):
                s_mask = run(t, g, c1, Configuration(g, m2)).s_mask(g)
                key = (splice_mask(m1, m2, s_mask), splice_mask(m2, m1, s_mask))
                joint[key] = joint.get(key, 0.0) + w[m1] * w[m2]
    dev = 0.0
    for x in range(n):
        wx = w[x]
        for y in range(n):
            dev = max(dev, abs(joint.get((x, y), 0.0) - wx * w[y]))
    return dev
