"""Structure edits whose effect on PageRank is known in advance.

Each transform returns the new structure together with what theory
predicts, so a caller can hold the prediction against an oracle.
Inputs are never mutated.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable

from .errors import HeightZero, InterferenceError, NoTreePath, OutDegreeCap, StructureError
from .graph import BidirectionalTree, CyclicalTree, LevelProfile, RootedTree
from .oracle import DEFAULT_ALPHA, DEFAULT_TOL, fixed_point_pagerank


def delete_last_level(profile: LevelProfile, alpha: float = DEFAULT_ALPHA) -> tuple[LevelProfile, float]:
    """Drop the deepest level; the delta is the predicted root gain (always > 0)."""
    if profile.height == 0:
        raise HeightZero("a single root has no level to delete")
    c = profile.counts
    h, n, nh = profile.height, profile.order, c[-1]
    ah = alpha ** h
    delta = (1.0 - alpha) * nh / ((n - nh) * n) * math.fsum(c[k] * (alpha ** k - ah) for k in range(h))
    return LevelProfile(c[:-1]), delta


def queue_tree(profile: LevelProfile) -> LevelProfile:
    h = profile.height
    if h < 1:
        raise HeightZero("queue trees need height >= 1")
    keep = profile.counts[: (h - 1) // 2 + 1]
    return LevelProfile(keep + (1,) * (h // 2 + 1))


def rewire_levels(tree: RootedTree, seed: int | None = None) -> RootedTree:
    """Give each non-root vertex a uniformly random parent one level up."""
    rng = random.Random(seed)
    by_level: dict[int, list[int]] = {}
    for v, k in enumerate(tree.level_of):
        by_level.setdefault(k, []).append(v)
    parent = [-1 if v == tree.root else rng.choice(by_level[tree.level_of[v] - 1]) for v in range(tree.n)]
    return RootedTree.from_parents(parent)


def _as_cyclical(structure) -> CyclicalTree:
    if isinstance(structure, RootedTree):
        return BidirectionalTree(structure, frozenset())
    return structure


def _reachable_from(structure: CyclicalTree, start: int) -> set[int]:
    succ = structure.graph.successors
    seen, stack = {start}, [start]
    while stack:
        for y in succ[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


@dataclass(frozen=True)
class Prediction:
    """What theory says a new back arc (closing, origin) does to PageRank.

    ``factor`` multiplies PR(closing).  When the closing vertex is the
    root, the origin gains exactly ``alpha * PR(root) / (1 - alpha^l)``.
    """

    closing: int
    origin: int
    cycle_length: int
    alpha: float
    factor: float
    root_case: bool
    increases: frozenset = field(default_factory=frozenset)
    decreases: frozenset = field(default_factory=frozenset)
    unchanged: frozenset = field(default_factory=frozenset)

    def predicted_closing(self, before) -> float:
        return before[self.closing] * self.factor

    def predicted_origin(self, before) -> float | None:
        """Exact new value of the origin in the root case, None otherwise."""
        if not self.root_case:
            return None
        a = self.alpha
        return before[self.origin] + a * before[self.closing] / (1.0 - a ** self.cycle_length)


def close_cycle(structure, u: int, v: int, alpha: float = DEFAULT_ALPHA) -> tuple[CyclicalTree, int, Prediction]:
    """Add the back arc u -> v, closing the tree path v -> ... -> u.

    Returns the new structure, the cycle length and the prediction.  The
    result must still meet the out-degree caps and non-interference.
    """
    structure = _as_cyclical(structure)
    tree = structure.tree
    if not (0 <= u < structure.n and 0 <= v < structure.n):
        raise StructureError(f"vertex out of range in {(u, v)}")
    if u == v or not tree.is_ancestor(u, v):
        raise NoTreePath(f"no tree path from {v} to {u}")
    if (u, v) in structure.back_arcs:
        raise StructureError(f"{(u, v)} is already a back arc")
    if structure.closers[u]:
        raise OutDegreeCap(f"vertex {u} already closes a cycle")
    new = structure.with_back_arc((u, v))
    bad = new.interfering_arcs()
    if bad:
        raise InterferenceError(f"closing {(u, v)} makes the cycles of {bad} interfere")
    l = new.cycle_lengths[(u, v)]
    root_case = u == tree.root
    factor = 1.0 / (1.0 - alpha ** l) if root_case else 1.0 / (1.0 - alpha ** l / 2.0)
    everyone = frozenset(range(structure.n))
    reach = frozenset(_reachable_from(new, u))
    if root_case:
        # everything on the new root cycle gains
        inc, dec = reach, frozenset()
    else:
        inc = frozenset({u, v})
        dec = reach - inc
    pred = Prediction(u, v, l, alpha, factor, root_case, inc, dec, everyone - inc - dec)
    return new, l, pred


def promote_to_bidirectional(structure, arc: tuple[int, int],
                             alpha: float = DEFAULT_ALPHA) -> tuple[CyclicalTree, Prediction]:
    """Turn the tree arc ``v -> u`` into a 2-cycle by adding ``u -> v``."""
    structure = _as_cyclical(structure)
    v, u = arc
    if structure.tree.parent[v] != u:
        raise StructureError(f"{arc} is not a tree arc")
    new, _, pred = close_cycle(structure, u, v, alpha)
    return new, pred


def _relabel(structure: CyclicalTree, removed: set[int]) -> CyclicalTree:
    keep = [x for x in range(structure.n) if x not in removed]
    new_id = {x: i for i, x in enumerate(keep)}
    parent = [new_id[structure.tree.parent[x]] if structure.tree.parent[x] >= 0 else -1 for x in keep]
    tree = RootedTree.from_parents(parent)
    back = frozenset((new_id[a], new_id[b]) for a, b in structure.back_arcs)
    return type(structure)(tree, back)


def prune_last_level(structure, count: int, alpha: float = DEFAULT_ALPHA,
                     tol: float = DEFAULT_TOL) -> tuple[CyclicalTree, float]:
    """Remove ``count`` leaves of the deepest level (highest ids first).

    The root delta is measured with the oracle: theory does not fix its
    sign once back arcs are present.
    """
    structure = _as_cyclical(structure)
    if count < 0:
        raise ValueError("count must be non-negative")
    if count == 0:
        return structure, 0.0
    tree = structure.tree
    h = tree.height
    touched = {x for a in structure.back_arcs for x in a}
    deepest = [x for x in range(structure.n) if tree.level_of[x] == h]
    if any(x in touched for x in deepest):
        raise StructureError("deepest-level leaves carry back arcs")
    if count > len(deepest) or h == 0:
        raise StructureError(f"only {len(deepest)} deepest leaves available, asked for {count}")
    removed = set(deepest[-count:])
    new = _relabel(structure, removed)
    before = fixed_point_pagerank(structure, alpha, tol)[structure.root]
    after = fixed_point_pagerank(new, alpha, tol)[new.root]
    return new, after - before


def _labelled(parent_of: dict[int, int], back: list[tuple[int, int]], extra: list[tuple[int, int]]) -> BidirectionalTree:
    """Build from 1-based labels; ``extra`` lists (how many leaves, parent label)."""
    n_named = len(parent_of) + 1
    parent = [-1] * n_named
    for child, p in parent_of.items():
        parent[child - 1] = p - 1
    for count, p in extra:
        parent.extend([p - 1] * count)
    tree = RootedTree.from_parents(parent)
    return BidirectionalTree(tree, frozenset((a - 1, b - 1) for a, b in back))


def figure4(n: int, m: int) -> BidirectionalTree:
    """Ten-vertex bidirectional tree with n leaves under vertex 7 and m leaves under vertex 10.

    Labels 1..10 become ids 0..9; the m leaves sit on the deepest level.
    """
    parent_of = {2: 1, 3: 1, 4: 2, 5: 2, 7: 4, 8: 4, 6: 3, 9: 6, 10: 9}
    return _labelled(parent_of, [(4, 8), (2, 5), (3, 6)], [(n, 7), (m, 10)])


def figure5(n: int, m: int) -> BidirectionalTree:
    """Six-vertex tree with a root 2-cycle; n leaves under vertex 4, m under vertex 6."""
    parent_of = {2: 1, 3: 1, 4: 2, 5: 3, 6: 5}
    return _labelled(parent_of, [(2, 4), (1, 3)], [(n, 4), (m, 6)])


def prune_sign_sweep(builder: Callable[[int, int], CyclicalTree], m: int, n_values,
                     alpha: float = DEFAULT_ALPHA) -> dict[int, float]:
    """Root delta of removing one deepest leaf, for each n."""
    return {n: prune_last_level(builder(n, m), 1, alpha)[1] for n in n_values}


def sign_flip(deltas: dict[int, float]) -> int | None:
    """First n at which the delta's sign differs from the first one's."""
    ns = sorted(deltas)
    first = deltas[ns[0]] > 0
    for n in ns[1:]:
        if (deltas[n] > 0) != first:
            return n
    return None
