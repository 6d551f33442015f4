"""Closed-form PageRank values for tree-like structures.

All functions are pure and work in double precision; binomial
coefficients are exact integers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

from .errors import FamilyError, InterferenceError, OutDegreeCap
from .graph import CyclicalTree, LevelProfile, QCensus, RootedTree

FAMILIES = ("m-ary", "unary", "binomial", "path")
QUEUE_FAMILIES = ("queue-m-ary", "queue-binomial")

# below this distance from 1, m*alpha is treated as the removable singularity
_SINGULAR = 1e-12


@dataclass(frozen=True)
class FamilyParams:
    family: str
    h: int
    m: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES + QUEUE_FAMILIES:
            raise FamilyError(f"unknown family {self.family!r}")
        if not isinstance(self.h, int) or self.h < 0:
            raise FamilyError(f"height must be a non-negative integer, got {self.h!r}")
        if self.family in ("m-ary", "queue-m-ary") and (self.m is None or self.m < 1):
            raise FamilyError(f"{self.family} needs m >= 1, got {self.m!r}")
        if self.family in QUEUE_FAMILIES and self.h < 1:
            raise FamilyError("queue trees need height >= 1")


def pr_root_profile(profile: LevelProfile, alpha: float) -> float:
    """Root PageRank from level counts alone: (1-a)/N * sum a^k n_k."""
    n = profile.order
    return (1.0 - alpha) / n * math.fsum(c * alpha ** k for k, c in enumerate(profile.counts))


def pr_mary(m: int, h: int, alpha: float) -> float:
    if m == 1:
        return pr_unary(h, alpha)
    t = h + 1
    if abs(m * alpha - 1.0) <= _SINGULAR:
        return t * (m - 1) / (m ** t - 1) * (1.0 - alpha)
    # ((m a)^t - 1)/(m^t - 1) rewritten as (a^t - m^-t)/(1 - m^-t) so large t cannot overflow
    inv = float(m) ** -t
    return (1.0 - alpha) * (m - 1) / (m * alpha - 1.0) * (alpha ** t - inv) / (1.0 - inv)


def pr_unary(h: int, alpha: float) -> float:
    return (1.0 - alpha ** (h + 1)) / (h + 1)


def pr_binomial(h: int, alpha: float) -> float:
    return (1.0 - alpha) * ((1.0 + alpha) / 2.0) ** h


def pr_path(h: int, alpha: float) -> float:
    # alpha^(h+2) * (1 - (h+1) alpha^-h + h alpha^-(h+1)) expanded term by term
    tail = (alpha ** (h + 2) - (h + 1) * alpha ** 2 + h * alpha) / (1.0 - alpha) ** 2
    return 2.0 * (1.0 - alpha) / (2 + (h + 1) * h) * (1.0 + tail)


def pr_family(params: FamilyParams, alpha: float) -> float:
    f, h, m = params.family, params.h, params.m
    if f == "m-ary":
        return pr_mary(m, h, alpha)
    if f == "unary":
        return pr_unary(h, alpha)
    if f == "binomial":
        return pr_binomial(h, alpha)
    if f == "path":
        return pr_path(h, alpha)
    return pr_queue_family(params, alpha)


def _geometric(ratio: float, count: int) -> float:
    """1 + ratio + ... + ratio^(count-1)."""
    if abs(ratio - 1.0) <= _SINGULAR:
        return float(count)
    return (ratio ** count - 1.0) / (ratio - 1.0)


def pr_queue_mary(m: int, h: int, alpha: float) -> float:
    if m == 1:
        return pr_unary(h, alpha)
    p, odd = (h + 1) // 2, h % 2 == 1
    upper = (m ** p - 1) // (m - 1)
    ones = p if odd else p + 1
    head = _geometric(m * alpha, p)
    tail = alpha ** p * _geometric(alpha, ones)
    return (1.0 - alpha) / (upper + ones) * (head + tail)


def pr_queue_binomial(h: int, alpha: float) -> float:
    p, odd = (h + 1) // 2, h % 2 == 1
    if odd:
        order = 2 ** (2 * p - 2) + p
        head = math.fsum(comb(2 * p - 1, k) * alpha ** k for k in range(p))
        tail = alpha ** p * _geometric(alpha, p)
    else:
        order = 2 ** (2 * p - 1) - comb(2 * p, p) // 2 + p + 1
        head = math.fsum(comb(2 * p, k) * alpha ** k for k in range(p))
        tail = alpha ** p * _geometric(alpha, p + 1)
    return (1.0 - alpha) / order * (head + tail)


def pr_queue_family(params: FamilyParams, alpha: float) -> float:
    """Root PageRank of the queue tree of an m-ary or binomial tree.

    Uses the parity-split closed forms (h = 2p-1 and h = 2p).
    """
    if params.family == "queue-m-ary":
        return pr_queue_mary(params.m, params.h, alpha)
    if params.family == "queue-binomial":
        return pr_queue_binomial(params.h, alpha)
    raise FamilyError(f"{params.family!r} is not a queue family")


def _check_census(census: QCensus) -> None:
    if census.od_root == 1 and any(census.count(k, 0) for k in range(census.height + 1)):
        raise ValueError("with od(root) = 1 every root path meets the root cycle, so no q=0 entries may occur")


def pr_root_bidirectional(census: QCensus, alpha: float) -> float:
    """Root PageRank of a bidirectional tree, summed level by level."""
    _check_census(census)
    b = 2.0 - alpha ** 2
    terms = []
    for k, row in enumerate(census.entries):
        for q, count in enumerate(row):
            if not count:
                continue
            if census.od_root == 0:
                terms.append(count * alpha ** k / b ** q)
            else:
                terms.append(count * alpha ** k / (b ** (q - 1) * (1.0 - alpha ** 2)))
    return (1.0 - alpha) / census.order * math.fsum(terms)


def pr_root_bidirectional_vectorial(census: QCensus, alpha: float) -> float:
    """Same value as :func:`pr_root_bidirectional`, grouped by q as dot products."""
    _check_census(census)
    h = census.height
    shift = census.od_root
    scale = 1.0 if shift == 0 else 1.0 / (1.0 - alpha ** 2)
    b = 2.0 - alpha ** 2
    total = []
    for q in range(h + 1):
        delta = [census.count(k, q + shift) for k in range(q, h + 1)]
        lam = [alpha ** k for k in range(q, h + 1)]
        total.append(math.fsum(d * l for d, l in zip(delta, lam)) / b ** q)
    return (1.0 - alpha) / census.order * scale * math.fsum(total)


def _require_closed_form(structure: CyclicalTree) -> None:
    caps = structure.cap_violations()
    if caps:
        raise OutDegreeCap("; ".join(caps))
    bad = structure.interfering_arcs()
    if bad:
        raise InterferenceError(f"cycles of back arcs {bad} interfere; use the oracle instead")


def _as_cyclical(structure) -> CyclicalTree:
    return CyclicalTree.from_tree(structure) if isinstance(structure, RootedTree) else structure


def _root_path(structure: CyclicalTree, w: int, a: int) -> list[int] | None:
    """The unique simple path from ``w`` to ``a``, or None."""
    tree = structure.tree
    if tree.is_ancestor(a, w):
        return tree.path_to_root(w)[: tree.level_of[w] - tree.level_of[a] + 1]
    for u, origin in structure.back_arcs:
        if u != a and tree.is_ancestor(a, origin) and tree.is_ancestor(u, a) and tree.is_ancestor(u, w):
            up = tree.path_to_root(w)[: tree.level_of[w] - tree.level_of[u] + 1]
            down = tree.path_to_root(origin)[: tree.level_of[origin] - tree.level_of[a] + 1]
            return up + down
    return None


def pr_vertex_cyclical(structure: CyclicalTree | RootedTree, a: int, alpha: float) -> float:
    """PageRank of vertex ``a`` in a non-interfering cyclical tree.

    Every source ``v`` contributes ``alpha^len / (2^n * prod(loop))`` along
    its unique simple path to ``a``: n counts the out-degree-2 vertices on
    the path other than ``a``, and each cycle sharing a vertex with the
    path adds a loop factor ``1 - alpha^l/2``, or ``1 - alpha^l`` for a
    cycle closed at a root of out-degree 1.
    """
    return pr_vector_cyclical(structure, alpha, targets=[a])[0]


def pr_vector_cyclical(structure: CyclicalTree | RootedTree, alpha: float,
                       targets: list[int] | None = None) -> list[float]:
    structure = _as_cyclical(structure)
    _require_closed_form(structure)
    od = structure.out_degree
    root = structure.root
    cycle_of: dict[int, tuple[int, int]] = {}
    for arc in structure.back_arcs:
        for x in structure.cycle_path(arc):
            cycle_of[x] = arc
    loop = {}
    for arc, l in structure.cycle_lengths.items():
        loop[arc] = 1.0 - alpha ** l if (arc[0] == root and od[root] == 1) else 1.0 - alpha ** l / 2.0
    n_total = structure.n
    out = []
    for a in range(n_total) if targets is None else targets:
        terms = []
        for w in range(n_total):
            path = _root_path(structure, w, a)
            if path is None:
                continue
            branching = sum(1 for x in path[:-1] if od[x] == 2)
            met = {cycle_of[x] for x in path if x in cycle_of}
            denom = 2.0 ** branching * math.prod(loop[c] for c in met)
            terms.append(alpha ** (len(path) - 1) / denom)
        out.append((1.0 - alpha) / n_total * math.fsum(terms))
    return out
