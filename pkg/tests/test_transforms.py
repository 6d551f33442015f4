import pytest

from conftest import ALPHA, chain_with_back_arc
from treerank.closed_forms import pr_root_profile
from treerank.errors import HeightZero, InterferenceError, NoTreePath, OutDegreeCap, StructureError
from treerank.graph import (
    BidirectionalTree,
    CyclicalTree,
    LevelProfile,
    RootedTree,
    build_tree,
    random_cyclical_tree,
    random_profile,
    random_tree,
    validate,
)
from treerank.oracle import fixed_point_pagerank
from treerank.transforms import (
    close_cycle,
    delete_last_level,
    figure4,
    figure5,
    promote_to_bidirectional,
    prune_last_level,
    prune_sign_sweep,
    queue_tree,
    rewire_levels,
    sign_flip,
)

P = lambda *c: LevelProfile(c)
GRID = [0.29, 0.4, 0.5, 0.6, 0.7, 0.85, 0.95, 0.99]


def test_delete_last_level_examples():
    new, delta = delete_last_level(P(1, 2, 3), ALPHA)
    assert new == P(1, 2)
    assert delta == pytest.approx(pr_root_profile(P(1, 2), ALPHA) - pr_root_profile(P(1, 2, 3), ALPHA), abs=1e-15)
    for a in (0.2, 0.85):
        assert delete_last_level(P(1, 1), a)[1] == pytest.approx((1 - a) ** 2 / 2, abs=1e-15)
    with pytest.raises(HeightZero):
        delete_last_level(P(1))


def test_delete_last_level_random(rng):
    for _ in range(300):
        p = random_profile(rng, min_height=1)
        a = rng.uniform(0.01, 0.99)
        new, delta = delete_last_level(p, a)
        assert delta > 0
        assert abs(delta - (pr_root_profile(new, a) - pr_root_profile(p, a))) <= 1e-12


def test_queue_tree_examples():
    assert queue_tree(P(1, 3, 3, 3, 3)) == P(1, 3, 1, 1, 1)
    assert queue_tree(P(1, 2, 4, 8)) == P(1, 2, 1, 1)
    assert queue_tree(P(1, 5)) == P(1, 1)
    with pytest.raises(HeightZero):
        queue_tree(P(1))


def test_queue_tree_improves(rng):
    checked = 0
    for _ in range(300):
        p = random_profile(rng, min_height=1)
        q = queue_tree(p)
        assert q.height == p.height
        if q == p:
            continue
        checked += 1
        for a in GRID + [0.05, 0.2]:
            assert pr_root_profile(q, a) > pr_root_profile(p, a)
    assert checked > 100


def test_queue_tree_cannot_lose_a_top_vertex():
    for n1 in range(2, 11):
        for a in GRID:
            assert pr_root_profile(P(1, n1 - 1, 1, 1, 1), a) < pr_root_profile(P(1, n1, 1, 1, 1), a)
    # below the threshold the removal helps
    assert pr_root_profile(P(1, 1, 1, 1, 1), 0.2) > pr_root_profile(P(1, 2, 1, 1, 1), 0.2)


def test_rewire_keeps_profile_and_root_value(rng):
    t = build_tree(P(1, 2, 4))
    a, b = rewire_levels(t, 1), rewire_levels(t, 2)
    assert a.profile == b.profile == t.profile
    ra, rb = fixed_point_pagerank(a, ALPHA), fixed_point_pagerank(b, ALPHA)
    assert abs(ra[0] - rb[0]) <= 1e-10


def test_rewire_moves_non_root_values():
    t = RootedTree.from_parents([-1, 0, 0, 1, 1, 1, 1])
    other = RootedTree.from_parents([-1, 0, 0, 1, 1, 2, 2])
    pa, pb = fixed_point_pagerank(t, ALPHA), fixed_point_pagerank(other, ALPHA)
    assert abs(pa[0] - pb[0]) <= 1e-12
    assert abs(pa[1] - pb[1]) > 1e-3


def test_promote_chain():
    chain = RootedTree.from_parents([-1, 0, 1])
    before = fixed_point_pagerank(chain, ALPHA)
    new, pred = promote_to_bidirectional(chain, (2, 1), ALPHA)
    after = fixed_point_pagerank(new, ALPHA)
    assert after[1] / before[1] == pytest.approx(1 / (1 - ALPHA ** 2 / 2), rel=1e-10)
    assert pred.factor == pytest.approx(1.565558, abs=1e-6)
    assert new.graph == chain_with_back_arc()


def test_promote_root_of_two_path():
    t = RootedTree.from_parents([-1, 0])
    before = fixed_point_pagerank(t, ALPHA)
    new, pred = promote_to_bidirectional(t, (1, 0), ALPHA)
    after = fixed_point_pagerank(new, ALPHA)
    assert before[0] == pytest.approx(0.13875, abs=1e-12)
    assert after[0] == pytest.approx(0.5, abs=1e-10)
    assert pred.factor == pytest.approx(3.6036, abs=1e-4)
    assert after[1] == pytest.approx(pred.predicted_origin(before), abs=1e-10)


def test_promotion_laws_random(rng):
    for _ in range(60):
        base = random_cyclical_tree(rng.randint(2, 15), rng, n_cycles=rng.randint(0, 2), bidirectional=True)
        arcs = [(v, base.tree.parent[v]) for v in range(base.n) if v != base.root]
        rng.shuffle(arcs)
        for arc in arcs:
            try:
                new, pred = promote_to_bidirectional(base, arc, ALPHA)
            except (OutDegreeCap, InterferenceError, StructureError):
                continue
            before, after = fixed_point_pagerank(base, ALPHA), fixed_point_pagerank(new, ALPHA)
            u, v = pred.closing, pred.origin
            assert after[u] / before[u] == pytest.approx(pred.factor, rel=1e-10)
            for x in pred.unchanged:
                assert abs(after[x] - before[x]) <= 1e-10
            for x in pred.decreases:
                assert after[x] < before[x]
            assert after[v] > before[v]
            if pred.root_case:
                assert abs(after[v] - pred.predicted_origin(before)) <= 1e-10
            else:
                assert base.root in pred.decreases
            break


def test_root_promotion_comparison():
    # PR'(r) >= PR'(v) exactly when PR(r) >= (1 + alpha) PR(v)
    for parents, v in (([-1, 0, 1], 1), ([-1, 0, 0], 1)):
        t = RootedTree.from_parents(parents)
        before = fixed_point_pagerank(t, ALPHA)
        new, _ = promote_to_bidirectional(t, (v, 0), ALPHA)
        after = fixed_point_pagerank(new, ALPHA)
        assert (after[0] >= after[v]) == (before[0] >= (1 + ALPHA) * before[v])
    # the two witnesses land on opposite sides
    deep = fixed_point_pagerank(promote_to_bidirectional(RootedTree.from_parents([-1, 0, 1]), (1, 0))[0], ALPHA)
    wide = fixed_point_pagerank(promote_to_bidirectional(RootedTree.from_parents([-1, 0, 0]), (1, 0))[0], ALPHA)
    assert deep[0] < deep[1] and wide[0] > wide[1]


def test_promote_errors():
    t = RootedTree.from_parents([-1, 0, 1])
    with pytest.raises(StructureError):
        promote_to_bidirectional(t, (2, 0))
    once, _ = promote_to_bidirectional(t, (2, 1))
    with pytest.raises(StructureError):
        promote_to_bidirectional(once, (2, 1))
    with pytest.raises(InterferenceError):
        promote_to_bidirectional(once, (1, 0))


def test_close_cycle_examples():
    chain = RootedTree.from_parents([-1, 0, 1])
    _, l, _ = close_cycle(chain, 1, 2)
    assert l == 2
    chain = RootedTree.from_parents([-1, 0, 1, 2])  # r=0 <- w=1 <- u=2 <- v=3
    new, l, pred = close_cycle(chain, 1, 3, ALPHA)
    assert l == 3
    before, after = fixed_point_pagerank(chain, ALPHA), fixed_point_pagerank(new, ALPHA)
    assert after[1] / before[1] == pytest.approx(1 / (1 - ALPHA ** 3 / 2), rel=1e-10)
    with pytest.raises(NoTreePath):
        close_cycle(chain, 3, 1)
    with pytest.raises(OutDegreeCap):
        close_cycle(new, 1, 2)


def test_close_cycle_law_random(rng):
    done = 0
    while done < 50:
        t = random_tree(rng.randint(3, 12), rng)
        v = rng.randrange(1, t.n)
        path = t.path_to_root(v)
        u = rng.choice(path[1:])
        new, l, pred = close_cycle(t, u, v, ALPHA)
        before, after = fixed_point_pagerank(t, ALPHA), fixed_point_pagerank(new, ALPHA)
        assert after[u] / before[u] == pytest.approx(pred.factor, rel=1e-10)
        for x in pred.unchanged:
            assert abs(after[x] - before[x]) <= 1e-10
        if pred.root_case:
            assert abs(after[v] - pred.predicted_origin(before)) <= 1e-10
        done += 1


def test_prune_last_level():
    t = build_tree(P(1, 2, 3))
    same, delta = prune_last_level(t, 0)
    assert delta == 0 and same.n == t.n
    new, delta = prune_last_level(t, 3)
    assert new.tree.profile == P(1, 2)
    assert delta == pytest.approx(delete_last_level(P(1, 2, 3), ALPHA)[1], abs=1e-10)
    _, delta = prune_last_level(t, 1)
    assert delta > 0
    bad = BidirectionalTree(RootedTree.from_parents([-1, 0, 1]), {(1, 2)})
    with pytest.raises(StructureError):
        prune_last_level(bad, 1)


def test_figures_are_clean_bidirectional_trees():
    for s in (figure4(3, 2), figure5(3, 2)):
        assert validate(s.graph, s.root, "bidirectional").ok
    assert figure5(1, 1).od_root == 1


def test_figure_threshold_sign_flip():
    assert sign_flip(prune_sign_sweep(figure4, 2, range(70, 80))) == 76
    assert sign_flip(prune_sign_sweep(figure5, 2, range(28, 36))) == 32
