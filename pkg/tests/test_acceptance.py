"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Criterion 7 is split into its separate claims so that one failing
inequality does not hide the ones that hold.
"""
import random

import numpy as np
import pytest

from treerank.closed_forms import (
    FamilyParams,
    pr_binomial,
    pr_family,
    pr_path,
    pr_root_bidirectional,
    pr_root_profile,
    pr_unary,
    pr_vector_cyclical,
)
from treerank.condense import pr_digraph_roots, to_cyclical_tree
from treerank.graph import (
    Digraph,
    LevelProfile,
    build_tree,
    generate_family,
    level_census,
    random_cyclical_tree,
    random_digraph,
    random_profile,
    random_tree,
)
from treerank.hierarchy import height_hierarchy, queue_facts, size_hierarchy, solve_alpha0, solve_queue_threshold
from treerank.optimizer import Constraints, optimize_profile
from treerank.oracle import fixed_point_pagerank, walk_series_pagerank
from treerank.transforms import (
    delete_last_level,
    figure4,
    figure5,
    prune_sign_sweep,
    promote_to_bidirectional,
    queue_tree,
    rewire_levels,
)

ALPHA = 0.85


@pytest.fixture
def report(capsys):
    def emit(label, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}" + (f" -- {detail}" if detail else ""))
        assert ok, detail
    return emit


def test_c01_closed_form_matches_oracle(report):
    rng = random.Random(1)
    worst = 0.0
    for _ in range(500):
        t = build_tree(random_profile(rng, max_height=8, max_count=9))
        worst = max(worst, abs(pr_root_profile(t.profile, ALPHA) - fixed_point_pagerank(t, ALPHA)[0]))
    for m in range(1, 7):
        for h in range(9):
            t = build_tree(generate_family("m-ary", h, m))
            worst = max(worst, abs(pr_family(FamilyParams("m-ary", h, m), ALPHA) - fixed_point_pagerank(t, ALPHA)[0]))
    for fam in ("unary", "binomial", "path"):
        for h in range(9):
            t = build_tree(generate_family(fam, h))
            worst = max(worst, abs(pr_family(FamilyParams(fam, h), ALPHA) - fixed_point_pagerank(t, ALPHA)[0]))
    report("1 closed forms vs fixed-point oracle", worst <= 1e-10, f"max error {worst:.3g}")


def test_c02_walk_series_matches_fixed_point(report):
    rng = random.Random(2)
    worst = 0.0
    for _ in range(500):
        g = random_digraph(rng.randint(1, 25), rng.uniform(0.0, 0.3), rng)
        a = fixed_point_pagerank(g, ALPHA, 1e-10).values
        b = walk_series_pagerank(g, ALPHA, 1e-10).values
        worst = max(worst, float(np.max(np.abs(a - b))))
    report("2 walk series vs fixed point", worst <= 1e-8, f"max difference {worst:.3g}")


def test_c03_rewiring_keeps_root_value(report):
    rng = random.Random(3)
    worst = 0.0
    for _ in range(100):
        t = build_tree(random_profile(rng, max_height=6, max_count=6), "random", rng.randrange(10 ** 6))
        base = fixed_point_pagerank(t, ALPHA)[0]
        for _ in range(5):
            r = rewire_levels(t, rng.randrange(10 ** 6))
            worst = max(worst, abs(fixed_point_pagerank(r, ALPHA)[0] - base))
    report("3 rewiring invariance", worst <= 1e-10, f"max change {worst:.3g}")


def test_c04_last_level_deletion(report):
    rng = random.Random(4)
    worst, all_up = 0.0, True
    for _ in range(500):
        p = random_profile(rng, min_height=1)
        new, delta = delete_last_level(p, ALPHA)
        before = fixed_point_pagerank(build_tree(p), ALPHA)[0]
        after = fixed_point_pagerank(build_tree(new), ALPHA)[0]
        all_up &= after > before and delta > 0
        worst = max(worst, abs(delta - (after - before)))
    report("4 last-level deletion", all_up and worst <= 1e-10, f"all increase={all_up}, max error {worst:.3g}")


def test_c05_queue_tree(report):
    rng = random.Random(5)
    improves, n = True, 0
    for _ in range(500):
        p = random_profile(rng, min_height=1)
        q = queue_tree(p)
        if q == p:
            continue
        n += 1
        improves &= pr_root_profile(q, ALPHA) > pr_root_profile(p, ALPHA)
    removal_hurts = all(
        pr_root_profile(LevelProfile((1, n1 - 1, 1, 1, 1)), a) < pr_root_profile(LevelProfile((1, n1, 1, 1, 1)), a)
        for n1 in range(2, 11) for a in (0.28, 0.5, 0.85, 0.95))
    thr = solve_queue_threshold()
    ok = improves and removal_hurts and abs(thr - 0.27568) <= 1e-5
    report("5 queue tree", ok, f"{n} profiles improved={improves}, removal hurts={removal_hurts}, threshold={thr:.6f}")


def test_c06_alpha0(report):
    a0 = solve_alpha0()
    report("6 alpha0", abs(a0 - 0.57016) <= 1e-5, f"alpha0={a0:.6f}")


def test_c07_height_chain(report):
    t = height_hierarchy(ALPHA, 30, 6)
    row = t.rows[0]
    report("7a height chain at h=30", t.all_hold, f"weakest {row.witness} margin {row.margin:.3g}")


def test_c07_size_chain(report):
    t = size_hierarchy(ALPHA, 10 ** 6, 8)
    row = t.row("size-chain")
    orders = ", ".join(f"{k}:{v}" for k, v in t.info["orders"].items())
    report("7b size chain at N=1e6", row.holds, f"failing pairs {list(row.failures)}; orders {orders}")


@pytest.mark.parametrize("item", ["1", "2", "3", "4", "5", "6", "7"])
def test_c07_queue_fact(report, item):
    row = queue_facts(ALPHA, 40, 6).row(item)
    report(f"7c queue fact {item} ({row.params})", row.holds,
           f"weakest {row.witness} margin {row.margin:.3g}; failures {list(row.failures)}")


def test_c07_queue_fact_8_is_reported(report):
    row = queue_facts(ALPHA, 40, 6).row("8")
    report("7d queue fact 8 exceptions reported", bool(row.failures), f"{len(row.failures)} exceptions, e.g. {row.failures[:3]}")


def test_c08_path_tree(report):
    above = all(pr_path(h, ALPHA) > pr_binomial(h, ALPHA) for h in range(3, 51))
    ratio = pr_path(500, ALPHA) / pr_unary(500, ALPHA)
    report("8 path tree", above and abs(ratio / 1.70 - 1) <= 0.02, f"above binomial={above}, ratio at 500={ratio:.5f}")


def test_c09_bidirectional_formulas(report):
    rng = random.Random(9)
    worst = 0.0
    for i in range(200):
        bidi = i % 2 == 0
        ct = random_cyclical_tree(rng.randint(1, 12), rng, n_cycles=rng.randint(0, 3), bidirectional=bidi)
        oracle = fixed_point_pagerank(ct, ALPHA)
        worst = max(worst, max(abs(x - y) for x, y in zip(pr_vector_cyclical(ct, ALPHA), oracle)))
        if ct.is_bidirectional:
            worst = max(worst, abs(pr_root_bidirectional(level_census(ct), ALPHA) - oracle[ct.root]))
    two = Digraph(2, [(0, 1), (1, 0)])
    half = fixed_point_pagerank(two, ALPHA)[0]
    ok = worst <= 1e-8 and abs(half - 0.5) <= 1e-10
    report("9 bidirectional/cyclical formulas", ok, f"max error {worst:.3g}, 2-cycle {half:.12f}")


def test_c10_promotion_laws(report):
    rng = random.Random(10)
    worst_ratio = worst_add = worst_still = 0.0
    for _ in range(100):
        t = random_tree(rng.randint(3, 15), rng)
        before = fixed_point_pagerank(t, ALPHA)
        inner = [v for v in range(t.n) if t.parent[v] not in (-1, t.root)]
        if inner:
            v = rng.choice(inner)
            new, pred = promote_to_bidirectional(t, (v, t.parent[v]), ALPHA)
            after = fixed_point_pagerank(new, ALPHA)
            u = pred.closing
            worst_ratio = max(worst_ratio, abs(after[u] / before[u] * (1 - ALPHA ** 2 / 2) - 1))
            worst_still = max([worst_still] + [abs(after[x] - before[x]) for x in pred.unchanged])
        v = rng.choice(t.children[t.root])
        new, pred = promote_to_bidirectional(t, (v, t.root), ALPHA)
        after = fixed_point_pagerank(new, ALPHA)
        worst_ratio = max(worst_ratio, abs(after[t.root] / before[t.root] * (1 - ALPHA ** 2) - 1))
        worst_add = max(worst_add, abs(after[v] - pred.predicted_origin(before)))
        worst_still = max([worst_still] + [abs(after[x] - before[x]) for x in pred.unchanged])
    factor = 1 / (1 - ALPHA ** 2)
    ok = worst_ratio <= 1e-10 and worst_add <= 1e-10 and worst_still <= 1e-10 and abs(factor - 3.6036) <= 1e-4
    report("10 promotion laws", ok,
           f"ratio err {worst_ratio:.3g}, additive err {worst_add:.3g}, untouched drift {worst_still:.3g}, root factor {factor:.4f}")


def test_c11_pr_digraphs(report):
    fig8 = Digraph(3, [(0, 1), (1, 0), (1, 2), (2, 0)])
    complete = Digraph(3, [(a, b) for a in range(3) for b in range(3) if a != b])
    sym = Digraph(3, [(0, 1), (1, 0), (1, 2), (2, 1)])
    roots_ok = pr_digraph_roots(fig8) == {1, 2} and pr_digraph_roots(complete) == set() \
        and pr_digraph_roots(sym) == {0, 1, 2}
    ids = dict(zip("tuvwr", range(5)))
    arcs = [("v", "t"), ("v", "w"), ("t", "u"), ("w", "u"), ("w", "r"), ("u", "v"), ("r", "u")]
    ct = to_cyclical_tree(Digraph(5, [(ids[a], ids[b]) for a, b in arcs]), ids["r"])
    name = {v: k for k, v in ids.items()}
    fig10_ok = {(name[a], name[b]) for a, b in ct.tree_arcs} == {("t", "u"), ("u", "v"), ("v", "w"), ("w", "r")} \
        and {(name[a], name[b]): l for (a, b), l in ct.cycle_lengths.items()} == {("w", "u"): 3, ("r", "u"): 4, ("v", "t"): 3}
    rng = random.Random(11)
    trips = 0
    for _ in range(100):
        s = random_cyclical_tree(rng.randint(1, 14), rng, n_cycles=rng.randint(0, 3))
        back = to_cyclical_tree(s.graph, s.root)
        same = back.tree_arcs == s.tree_arcs and back.back_arcs == s.back_arcs
        close = abs(fixed_point_pagerank(s, ALPHA)[s.root] - fixed_point_pagerank(back, ALPHA)[back.root]) <= 1e-10
        trips += same and close
    report("11 PR-digraphs", roots_ok and fig10_ok and trips == 100,
           f"roots={roots_ok}, figure 10={fig10_ok}, round trips {trips}/100")


def test_c12_optimizer(report):
    stars = True
    for n in range(2, 13):
        for a in [round(0.1 * i, 1) for i in range(1, 10)]:
            r = optimize_profile(LevelProfile((1, n - 1)), Constraints(0, n, fixed_order=True), a, "exhaustive")
            stars &= r.best_profile == LevelProfile((1, n - 1))
    rng = random.Random(12)
    monotone = agree = True
    for _ in range(100):
        start = random_profile(rng, max_height=6, max_count=3)
        a = rng.uniform(0.05, 0.95)
        for c in (Constraints(0, start.order, fixed_order=True), Constraints(0, start.order)):
            rules = optimize_profile(start, c, a, "rules")
            values = [v for _, _, v in rules.trajectory]
            monotone &= all(y > x for x, y in zip(values, values[1:]))
            if start.order <= 12:
                agree &= rules.best_profile == optimize_profile(start, c, a, "exhaustive").best_profile
    report("12 optimizer", stars and monotone and agree, f"stars={stars}, monotone={monotone}, rules=exhaustive {agree}")


def test_c13_figure_thresholds(report):
    results = []
    for builder, last_up, ns in ((figure4, 75, range(1, 101)), (figure5, 31, range(1, 61))):
        for m in (1, 2, 5):
            deltas = prune_sign_sweep(builder, m, ns, ALPHA)
            results.append(all((d > 0) == (n <= last_up) for n, d in deltas.items()))
    report("13 figure 4/5 thresholds 75/76 and 31/32", all(results), f"per (figure, m): {results}")
