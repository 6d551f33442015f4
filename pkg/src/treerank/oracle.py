"""Topology-agnostic PageRank evaluators.

Both follow the random-surfer equation literally: a vertex without
out-arcs passes nothing on, and no dangling mass is redistributed, so
the values over a rooted tree sum to less than one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence

DEFAULT_ALPHA = 0.85
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10 ** 6


@dataclass(frozen=True, eq=False)
class PRVector:
    values: np.ndarray
    alpha: float
    iterations: int = 0

    @property
    def n(self) -> int:
        return len(self.values)

    def __getitem__(self, v):
        return float(self.values[v])

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values.tolist())

    @property
    def total(self) -> float:
        return math.fsum(self.values.tolist())


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"damping factor must lie in (0, 1), got {alpha}")


def _transition(graph):
    src, dst = graph.arc_arrays()
    od = np.bincount(src, minlength=graph.n).astype(float)
    weight = 1.0 / od[src] if len(src) else np.zeros(0)
    return src, dst, weight


def _step(x, src, dst, weight, n):
    # arcs are ordered by (head, tail): bincount then sums each head's
    # contributions in ascending tail order, the same way every time
    return np.bincount(dst, weights=x[src] * weight, minlength=n)


def fixed_point_pagerank(graph, alpha: float = DEFAULT_ALPHA, tol: float = DEFAULT_TOL,
                         max_iter: int = DEFAULT_MAX_ITER, history: list | None = None) -> PRVector:
    """Iterate ``x -> (1-a)/N + a*M x`` to its unique fixed point.

    ``graph`` is anything with ``n`` and ``arc_arrays()``.  The map is an
    ``alpha``-contraction in the 1-norm, so stopping once successive
    iterates differ by at most ``tol*(1-alpha)/alpha`` in that norm leaves
    an error of at most ``tol`` in every component.  Pass a list as
    ``history`` to collect the 1-norm step sizes.
    """
    _check_alpha(alpha)
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = graph.n
    src, dst, weight = _transition(graph)
    base = (1.0 - alpha) / n
    x = np.full(n, base)
    bound = tol * (1.0 - alpha) / alpha
    for it in range(1, max_iter + 1):
        nxt = base + alpha * _step(x, src, dst, weight, n)
        step = float(np.abs(nxt - x).sum())
        if history is not None:
            history.append(step)
        x = nxt
        if step <= bound:
            x.setflags(write=False)
            return PRVector(x, alpha, it)
    raise NonConvergence(f"no convergence within {max_iter} iterations")


def walk_series_pagerank(graph, alpha: float = DEFAULT_ALPHA, tol: float = DEFAULT_TOL) -> PRVector:
    """Sum walk contributions length by length.

    ``s_L[a]`` collects ``alpha^L * D(rho)`` over all walks of length L
    ending at ``a``; the series is cut at the first L with
    ``alpha^L / (1-alpha) <= tol``.
    """
    _check_alpha(alpha)
    n = graph.n
    src, dst, weight = _transition(graph)
    cutoff = max(0, math.ceil(math.log(tol * (1.0 - alpha)) / math.log(alpha)))
    s = np.ones(n)
    total = s.copy()
    for _ in range(cutoff):
        s = alpha * _step(s, src, dst, weight, n)
        if not s.any():
            break
        total += s
    values = (1.0 - alpha) / n * total
    values.setflags(write=False)
    return PRVector(values, alpha, cutoff)
