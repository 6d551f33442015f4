"""Maximizing a root's PageRank over level profiles, and arc recommendations.

The context a site has to respect is modelled by :class:`Constraints`:
a minimum height, an order budget, per-level lower bounds and whether
the order is fixed.  That is one concrete reading of an abstract notion.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .closed_forms import pr_root_profile
from .errors import SearchSpaceTooLarge, StructureError, UnsatisfiableConstraints
from .graph import CyclicalTree, LevelProfile, RootedTree
from .oracle import DEFAULT_ALPHA, DEFAULT_TOL, fixed_point_pagerank
from .transforms import close_cycle

MAX_PROFILES = 10 ** 7


@dataclass(frozen=True)
class Constraints:
    """``fixed_order`` pins the order to ``max_order``; otherwise it is an upper bound.

    ``min_level_counts[k]`` bounds level k from below whenever that level
    exists (index 0 is the root and must be at most 1).
    """

    min_height: int = 0
    max_order: int | None = None
    min_level_counts: tuple[int, ...] = ()
    fixed_order: bool = False

    def __post_init__(self):
        object.__setattr__(self, "min_level_counts", tuple(self.min_level_counts))
        if self.min_height < 0:
            raise UnsatisfiableConstraints("min_height must be non-negative")
        if self.min_level_counts and self.min_level_counts[0] > 1:
            raise UnsatisfiableConstraints("the root level holds exactly one vertex")
        if self.fixed_order and self.max_order is None:
            raise UnsatisfiableConstraints("fixed_order needs max_order")
        if self.max_order is not None and self.smallest_order(self.min_height) > self.max_order:
            raise UnsatisfiableConstraints(
                f"height {self.min_height} needs at least {self.smallest_order(self.min_height)} vertices, "
                f"more than max_order={self.max_order}")

    def bound(self, k: int) -> int:
        b = self.min_level_counts[k] if k < len(self.min_level_counts) else 1
        return max(1, b)

    def smallest_order(self, h: int) -> int:
        return sum(self.bound(k) for k in range(h + 1))

    def admits(self, profile: LevelProfile) -> bool:
        if profile.height < self.min_height:
            return False
        if any(c < self.bound(k) for k, c in enumerate(profile.counts)):
            return False
        if self.max_order is None:
            return True
        if self.fixed_order:
            return profile.order == self.max_order
        return profile.order <= self.max_order


@dataclass
class OptimizationResult:
    best_profile: LevelProfile
    best_value: float
    method: str
    trajectory: list[tuple[str, LevelProfile, float]] = field(default_factory=list)
    evaluated: int = 0


def _value(counts, alpha):
    return pr_root_profile(LevelProfile(tuple(counts)), alpha)


def optimize_profile(start: LevelProfile, c: Constraints, alpha: float = DEFAULT_ALPHA,
                     method: str = "rules") -> OptimizationResult:
    if not c.admits(start):
        raise UnsatisfiableConstraints(f"start profile {start} violates the constraints")
    if method == "rules":
        return _rules(start, c, alpha)
    if method == "exhaustive":
        return _exhaustive(start, c, alpha)
    raise ValueError(f"unknown method {method!r}")


def _rules(start: LevelProfile, c: Constraints, alpha: float) -> OptimizationResult:
    counts = list(start.counts)
    value = _value(counts, alpha)
    traj = [("start", start, value)]

    def attempt(rule: str, candidate: list[int]) -> bool:
        nonlocal counts, value
        v = _value(candidate, alpha)
        if v > value:
            counts, value = candidate, v
            traj.append((rule, LevelProfile(tuple(counts)), value))
            return True
        return False

    # Rule 1: lower the height as far as allowed; with a fixed order the
    # last level moves up to level 1 instead of disappearing
    floor = max(c.min_height, 1 if c.fixed_order and start.order > 1 else 0)
    while len(counts) - 1 > floor:
        last = counts[-1]
        candidate = counts[:-1]
        if c.fixed_order:
            candidate[1] += last
        if not attempt("rule1", candidate):
            break

    # Rule 3: bring the deep half toward the queue tree ...
    h = len(counts) - 1
    if not c.fixed_order and h >= 1:
        for k in range(h, (h - 1) // 2, -1):
            target = c.bound(k)
            if counts[k] > target:
                attempt("rule3-prune", counts[:k] + [target] + counts[k + 1:])

    # ... then move whatever is left, one vertex at a time, toward level 1
    moved = True
    while moved and len(counts) > 2:
        moved = False
        for k in range(len(counts) - 1, 1, -1):
            if counts[k] > c.bound(k):
                candidate = list(counts)
                candidate[k] -= 1
                candidate[1] += 1
                moved = attempt("rule3-move", candidate)
                break
    return OptimizationResult(LevelProfile(tuple(counts)), value, "rules", traj, len(traj))


def _compositions(total: int, lows: list[int]):
    """Tuples of len(lows) integers with the given lower bounds summing to total."""
    if not lows:
        if total == 0:
            yield ()
        return
    rest = sum(lows[1:])
    for first in range(lows[0], total - rest + 1):
        for tail in _compositions(total - first, lows[1:]):
            yield (first,) + tail


def _count_compositions(total: int, lows: list[int]) -> int:
    free = total - sum(lows)
    if free < 0:
        return 0
    return math.comb(free + len(lows) - 1, len(lows) - 1) if lows else int(free == 0)


def _cells(c: Constraints):
    """(order, height) pairs the exhaustive search has to visit."""
    if c.fixed_order:
        n = c.max_order
        for h in range(c.min_height, n):
            if c.smallest_order(h) <= n:
                yield n, h
        if c.min_height == 0 and n == 1:
            yield 1, 0
        return
    # a shallower tree always wins once the order is free, so only the
    # minimal height matters
    h = c.min_height
    for n in range(c.smallest_order(h), c.max_order + 1):
        yield n, h


def _exhaustive(start: LevelProfile, c: Constraints, alpha: float) -> OptimizationResult:
    if c.max_order is None:
        raise UnsatisfiableConstraints("exhaustive search needs max_order")
    cells = list(_cells(c))
    size = sum(_count_compositions(n - 1, [c.bound(k) for k in range(1, h + 1)]) for n, h in cells)
    if size > MAX_PROFILES:
        raise SearchSpaceTooLarge(f"{size} profiles exceed the limit of {MAX_PROFILES}")
    best, best_value = start, pr_root_profile(start, alpha)
    traj = [("start", start, best_value)]
    seen = 0
    for n, h in cells:
        lows = [c.bound(k) for k in range(1, h + 1)]
        powers = [alpha ** k for k in range(1, h + 1)]
        scale = (1.0 - alpha) / n
        for tail in _compositions(n - 1, lows):
            seen += 1
            v = scale * math.fsum([1.0] + [x * p for x, p in zip(tail, powers)])
            if v > best_value:
                best, best_value = LevelProfile((1,) + tail), v
    # report the winner with the canonical evaluation
    best_value = pr_root_profile(best, alpha)
    if best is not start:
        traj.append(("exhaustive", best, best_value))
    return OptimizationResult(best, best_value, "exhaustive", traj, seen)


@dataclass(frozen=True)
class Recommendation:
    action: str
    arc: tuple[int, int]
    cycle_length: int
    target: int
    target_before: float
    predicted_factor: float
    predicted_value: float
    oracle_value: float
    root_before: float
    root_after: float
    warning: str = ""

    @property
    def gain(self) -> float:
        return self.oracle_value / self.target_before

    def to_dict(self) -> dict:
        d = asdict(self)
        d["arc"] = list(self.arc)
        return d


def recommend_bidirectional(structure, target: int, alpha: float = DEFAULT_ALPHA,
                            tol: float = DEFAULT_TOL, verify_tol: float = 1e-9) -> list[Recommendation]:
    """Single back arcs that raise PR(target), best first.

    For the root these are the arcs root -> x (a 2-cycle when x is a child,
    a longer root cycle otherwise); the root may close only one cycle, so
    the items are alternatives.  For any other vertex they are cycles
    closed from it to one of its descendants, which always lower the
    root's value.  Every item is checked against the oracle and dropped
    if the prediction does not hold.
    """
    if isinstance(structure, RootedTree):
        structure = CyclicalTree.from_tree(structure)
    tree = structure.tree
    if not 0 <= target < structure.n:
        raise StructureError(f"vertex {target} outside 0..{structure.n - 1}")
    before = fixed_point_pagerank(structure, alpha, tol)
    out = []
    for x in tree.subtree(target):
        if x == target:
            continue
        try:
            new, l, pred = close_cycle(structure, target, x, alpha)
        except StructureError:
            continue
        after = fixed_point_pagerank(new, alpha, tol)
        predicted = pred.predicted_closing(before)
        if abs(after[target] - predicted) > verify_tol * max(1.0, predicted):
            continue
        is_root = target == tree.root
        action = "promote" if l == 2 else "close-cycle"
        warning = "" if is_root else "PageRank of the root decreases"
        if not is_root and not after[tree.root] < before[tree.root]:
            continue
        out.append(Recommendation(action, (target, x), l, target, before[target], pred.factor, predicted,
                                  after[target], before[tree.root], after[tree.root], warning))
    out.sort(key=lambda r: (-r.predicted_factor, r.arc))
    return out
