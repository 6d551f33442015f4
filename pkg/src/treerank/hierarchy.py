"""Numerical checks of the orderings between tree families.

Every check is a strict inequality between two closed-form values.  A
comparison whose relative margin is at most ``TIE`` counts as a failure,
so exact ties never pass silently.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from scipy.optimize import bisect

from .closed_forms import (
    pr_binomial,
    pr_mary,
    pr_path,
    pr_queue_binomial,
    pr_queue_mary,
    pr_unary,
)
from .graph import LevelProfile, generate_family
from .transforms import delete_last_level, queue_tree

TIE = 1e-14


def margin(lhs: float, rhs: float) -> float:
    """Relative amount by which lhs exceeds rhs."""
    scale = max(abs(lhs), abs(rhs))
    return (lhs - rhs) / scale if scale else 0.0


@dataclass(frozen=True)
class FactRow:
    claim: str
    params: str
    alpha: float
    holds: bool
    margin: float
    witness: str = ""
    failures: tuple = ()


@dataclass
class FactTable:
    rows: list[FactRow] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def add(self, row: FactRow) -> None:
        self.rows.append(row)

    def row(self, claim: str) -> FactRow:
        for r in self.rows:
            if r.claim == claim:
                return r
        raise KeyError(claim)

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["claim", "params", "alpha", "holds", "margin", "witness"])
        for r in self.rows:
            w.writerow([r.claim, r.params, f"{r.alpha:.12g}", r.holds, f"{r.margin:.12g}", r.witness])
        return buf.getvalue()


def _chain_row(claim: str, params: str, alpha: float, labelled: list[tuple[str, float]]) -> FactRow:
    """Row asserting labelled[0] > labelled[1] > ... ; the witness is the weakest link."""
    worst, where, failures = math.inf, "", []
    for (a, x), (b, y) in zip(labelled, labelled[1:]):
        mg = margin(x, y)
        if mg <= TIE:
            failures.append(f"{a}>{b}")
        if mg < worst:
            worst, where = mg, f"{a}>{b}"
    return FactRow(claim, params, alpha, not failures, worst, where, tuple(failures))


def _merge(claim: str, params: str, alpha: float, rows: list[tuple[str, FactRow]]) -> FactRow:
    """Fold per-parameter rows into one, keeping the worst margin as witness."""
    worst = min(rows, key=lambda t: t[1].margin)
    failures = tuple(f"{tag}: {f}" for tag, r in rows for f in r.failures)
    return FactRow(claim, params, alpha, not failures, worst[1].margin, f"{worst[0]}: {worst[1].witness}", failures)


# constants

def alpha0_equation(a: float) -> float:
    return 5.0 * a - (1.0 + a) ** math.log2(5.0)


def queue_threshold_polynomial(a: float) -> float:
    return 1.0 - 4.0 * a + a ** 2 + a ** 3 + a ** 4


def solve_alpha0(xtol: float = 1e-12) -> float:
    """Damping factor above which the 5-ary tree overtakes the binomial one by order."""
    return bisect(alpha0_equation, 0.5, 0.7, xtol=xtol)


def solve_queue_threshold(xtol: float = 1e-12) -> float:
    # alpha = 1 is also a root, so the bracket stops at 1/2
    return bisect(queue_threshold_polynomial, 0.0, 0.5, xtol=xtol)


# orderings by height

def _height_values(alpha: float, h: int, m_max: int) -> list[tuple[str, float]]:
    vals = [("1", pr_unary(h, alpha)), ("b", pr_binomial(h, alpha))]
    vals += [(str(m), pr_mary(m, h, alpha)) for m in range(2, m_max + 1)]
    return vals


def height_hierarchy(alpha: float, h: int, m_max: int = 6) -> FactTable:
    """PR_1 > PR_b > PR_2 > ... > PR_m_max at height h.

    ``info["threshold"]`` is the smallest h0 in [2, h] such that the chain
    holds at every height from h0 to h (None if it fails at h itself).
    """
    table = FactTable()
    table.add(_chain_row("height-chain", f"h={h} m<={m_max}", alpha, _height_values(alpha, h, m_max)))
    threshold = None
    for g in range(h, 1, -1):
        if not _chain_row("", "", alpha, _height_values(alpha, g, m_max)).holds:
            break
        threshold = g
    table.info["threshold"] = threshold
    return table


def height_limit(k: int, m: int, alpha: float) -> float:
    """Limit of PR_k(h)/PR_m(h) as h grows, for 1 < k < m."""
    return (k - 1) * (m * alpha - 1) / ((m - 1) * (k * alpha - 1))


# orderings by order

def largest_height(family: str, n_max: int, m: int | None = None) -> int:
    """Largest height whose tree of the family has at most n_max vertices."""
    if family == "unary":
        return n_max - 1
    if family == "binomial":
        return n_max.bit_length() - 1
    h = 0
    while (m ** (h + 2) - 1) // (m - 1) <= n_max:
        h += 1
    return h


def size_hierarchy(alpha: float, N: int, m_max: int = 8) -> FactTable:
    """PR_m_max > ... > PR_5 > PR_b > PR_4 > PR_3 > PR_2 > PR_1 at order about N.

    Each family uses its largest instance of order <= N;
    ``info["orders"]`` records the orders actually compared.
    """
    orders, vals = {}, {}
    for m in range(2, m_max + 1):
        h = largest_height("m-ary", N, m)
        orders[str(m)] = (m ** (h + 1) - 1) // (m - 1)
        vals[str(m)] = pr_mary(m, h, alpha)
    hb = largest_height("binomial", N)
    orders["b"], vals["b"] = 2 ** hb, pr_binomial(hb, alpha)
    orders["1"], vals["1"] = N, pr_unary(N - 1, alpha)
    chain = [str(m) for m in range(m_max, 4, -1)] + ["b"] + [str(m) for m in range(min(4, m_max), 0, -1)]
    table = FactTable(info={"orders": orders})
    labelled = [(c, vals[c]) for c in chain]
    table.add(_chain_row("size-chain", f"N<={N} m<={m_max}", alpha, labelled))
    for (a, x), (b, y) in zip(labelled, labelled[1:]):
        table.add(_chain_row(f"size:{a}>{b}", f"orders {orders[a]},{orders[b]}", alpha, [(a, x), (b, y)]))
    return table


# queue trees

def _queue_value(tag: str, h: int, alpha: float) -> float:
    if tag == "b":
        return pr_queue_binomial(h, alpha)
    return pr_queue_mary(int(tag), h, alpha)


def _queue_item(claim: str, alpha: float, hs, tags: list[str], ascending: bool = False) -> FactRow:
    hs = list(hs)
    rows = []
    for h in hs:
        labelled = [(t, _queue_value(t, h, alpha)) for t in tags]
        if ascending:
            labelled = labelled[::-1]
        rows.append((f"h={h}", _chain_row(claim, "", alpha, labelled)))
    order = "<".join(tags) if ascending else ">".join(tags)
    return _merge(claim, f"{order} for h in [{hs[0]},{hs[-1]}]", alpha, rows)


def queue_facts(alpha: float, h_max: int = 40, m_max: int = 6) -> FactTable:
    """The eight computed facts about queue-tree orderings.

    Item 8 (the near-miss of the full chain for h = 5..8) is reported
    with its exceptions in ``failures``; it is not expected to hold.
    """
    arities = [str(m) for m in range(2, m_max + 1)]
    table = FactTable()
    table.add(_queue_item("1", alpha, range(17, h_max + 1), ["1", "b", "2"]))
    table.add(_queue_item("2", alpha, range(2, 17), ["b", "1"]))
    table.add(_queue_item("3", alpha, range(2, h_max + 1), ["b", "2"]))
    table.add(_queue_item("4", alpha, range(15, h_max + 1), ["1", "2"]))
    table.add(_queue_item("5", alpha, range(2, 15), ["2", "1"]))
    table.add(_queue_item("6", alpha, range(9, h_max + 1), arities))
    table.add(_queue_item("7", alpha, (3, 4), arities, ascending=True))
    table.add(_queue_item("8", alpha, range(5, 9), ["1", "b"] + arities))
    return table


def _facts_for(args):
    alpha, h_max, m_max = args
    return alpha, queue_facts(alpha, h_max, m_max)


def queue_facts_sweep(alphas, h_max: int = 40, m_max: int = 6, jobs: int = 1) -> dict[float, FactTable]:
    """queue_facts for several damping factors, optionally in worker processes."""
    tasks = [(a, h_max, m_max) for a in alphas]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_facts_for, tasks))
    else:
        results = [_facts_for(t) for t in tasks]
    return dict(results)


def _queue_profile(tag: str, h: int) -> LevelProfile:
    if tag == "b":
        return queue_tree(generate_family("binomial", h))
    return queue_tree(LevelProfile(tuple(int(tag) ** k for k in range(h + 1))))


def parity_bridge(alpha: float, p_max: int = 20, m_max: int = 6) -> FactTable:
    """PR_q(2p-1) > PR_q(2p) for every queue family and p = 1..p_max.

    For m-ary queue trees the even tree is the odd one plus a last level of
    one vertex, so the gap is the last-level deletion delta, evaluated in
    closed form; subtracting the two values would lose it to rounding once
    the order reaches about 1e15.  Since no cancellation is involved, a
    positive delta counts even below the tie threshold.
    """
    table = FactTable()
    for tag in ["1", "b"] + [str(m) for m in range(2, m_max + 1)]:
        rows = []
        for p in range(1, p_max + 1):
            shorter, delta = delete_last_level(_queue_profile(tag, 2 * p), alpha)
            if shorter == _queue_profile(tag, 2 * p - 1):
                mg = delta / _queue_value(tag, 2 * p, alpha)
                ok = delta > 0.0
            else:
                # binomial queue trees of heights 2p-1 and 2p differ in n_1 as well
                mg = margin(_queue_value(tag, 2 * p - 1, alpha), _queue_value(tag, 2 * p, alpha))
                ok = mg > TIE
            rows.append((f"p={p}", FactRow(tag, "", alpha, ok, mg, "odd>even", () if ok else ("odd>even",))))
        table.add(_merge(f"parity:{tag}", f"p in [1,{p_max}]", alpha, rows))
    return table


def ratio_diagnostics(alpha: float, h: int) -> dict:
    """Path tree against binomial and unary trees, plus the height-limit ratios."""
    if h < 3:
        raise ValueError("path-tree diagnostics need h >= 3")
    rho, b, one = pr_path(h, alpha), pr_binomial(h, alpha), pr_unary(h, alpha)
    two = pr_mary(2, h, alpha)
    return {
        "h": h,
        "alpha": alpha,
        "path_over_binomial": rho / b,
        "path_over_unary": rho / one,
        "path_over_unary_limit": 2 * alpha,
        "binary_over_binomial": two / b,
        "binomial_over_unary": b / one,
        "binary_over_ternary": two / pr_mary(3, h, alpha),
        "binary_over_ternary_limit": height_limit(2, 3, alpha),
    }
