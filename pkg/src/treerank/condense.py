"""Strong components, PR-digraphs and their conversion to cyclical trees.

Unique-path questions are settled by backtracking that stops at the
second path found.  That is exponential in the worst case, so inputs
above ``MAX_ORDER`` vertices are refused unless the caller raises the
limit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import NotStronglyConnected, RecognitionError, StructureError
from .graph import CyclicalTree, Digraph, RootedTree, StructureReport

MAX_ORDER = 64


@dataclass(frozen=True)
class Condensation:
    components: tuple[tuple[int, ...], ...]
    component_of: tuple[int, ...]
    dag: Digraph

    def __len__(self):
        return len(self.components)


def strongly_connected_components(graph: Digraph) -> Condensation:
    """SCC partition plus the condensation DAG.

    Components are numbered by their smallest vertex.
    """
    if graph.n == 0:
        return Condensation((), (), Digraph(0, ()))
    src, dst = graph.arc_arrays()
    adj = csr_matrix((np.ones(len(src)), (src, dst)), shape=(graph.n, graph.n))
    _, labels = connected_components(adj, directed=True, connection="strong")
    first: dict[int, int] = {}
    for v, lab in enumerate(labels.tolist()):
        first.setdefault(lab, len(first))
    comp_of = tuple(first[lab] for lab in labels.tolist())
    members: list[list[int]] = [[] for _ in first]
    for v, c in enumerate(comp_of):
        members[c].append(v)
    dag_arcs = {(comp_of[u], comp_of[v]) for u, v in graph.arcs if comp_of[u] != comp_of[v]}
    return Condensation(tuple(tuple(m) for m in members), comp_of, Digraph(len(members), dag_arcs))


def _check_order(graph: Digraph, max_order: int) -> None:
    if graph.n > max_order:
        raise StructureError(f"{graph.n} vertices exceed the unique-path search limit of {max_order}")


def simple_paths(graph: Digraph, source: int, target: int, limit: int = 2) -> list[list[int]]:
    """Up to ``limit`` simple paths from source to target, found by backtracking."""
    if source == target:
        return [[source]]
    found: list[list[int]] = []
    on_path = [False] * graph.n
    path = [source]
    on_path[source] = True
    # each frame is an iterator over the successors still to try
    stack = [iter(graph.successors[source])]
    while stack and len(found) < limit:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            on_path[path.pop()] = False
            continue
        if on_path[nxt]:
            continue
        if nxt == target:
            found.append(path + [target])
            continue
        path.append(nxt)
        on_path[nxt] = True
        stack.append(iter(graph.successors[nxt]))
    return found


def _path_counts(graph: Digraph, root: int) -> list[int]:
    """Number of simple paths (capped at 2) from each vertex to root."""
    reach = graph.reaches(root)
    return [len(simple_paths(graph, v, root)) if reach[v] else 0 for v in range(graph.n)]


def pr_digraph_roots(graph: Digraph, max_order: int = MAX_ORDER) -> set[int]:
    """Vertices r such that every other vertex has exactly one simple path to r."""
    _check_order(graph, max_order)
    if len(strongly_connected_components(graph)) != 1:
        raise NotStronglyConnected("a PR-digraph must be strongly connected")
    return {r for r in range(graph.n) if all(c == 1 for c in _path_counts(graph, r))}


def is_pr_digraph_tree(graph: Digraph, root: int, max_order: int = MAX_ORDER) -> StructureReport:
    """Check the four clauses of a PR-digraph tree rooted at ``root``.

    (a) the condensation is a rooted tree whose components are PR-digraphs
    rooted at their exit vertex, (b) each component is joined to its parent
    by exactly one arc, (c) the root's component is the sink, and (d) every
    vertex has a unique simple path to the root.  Violations are reported
    as ``clause_x: ...`` strings.
    """
    _check_order(graph, max_order)
    if not 0 <= root < graph.n:
        raise ValueError(f"root {root} outside 0..{graph.n - 1}")
    cond = strongly_connected_components(graph)
    rc = cond.component_of[root]
    violations = []

    if cond.dag.out_degree[rc] != 0:
        violations.append(f"clause_c: the root's component {cond.components[rc]} has arcs leaving it")

    exit_vertex = {rc: root}
    for c, members in enumerate(cond.components):
        if c == rc:
            continue
        leaving = [(u, v) for u in members for v in graph.successors[u] if cond.component_of[v] != c]
        heads = {cond.component_of[v] for _, v in leaving}
        if len(heads) != 1:
            violations.append(f"clause_a: component {members} points to {len(heads)} components")
        if len(leaving) != 1:
            violations.append(f"clause_b: component {members} is joined to the rest by {len(leaving)} arcs")
        if len(leaving) >= 1:
            exit_vertex[c] = leaving[0][0]
    if cond.dag.reaches(rc).count(False):
        violations.append("clause_a: some components cannot reach the root's component")
    for c, members in enumerate(cond.components):
        if c not in exit_vertex or len(members) == 1:
            continue
        sub, ids = graph.induced(members)
        local = ids.index(exit_vertex[c])
        if any(n != 1 for n in _path_counts(sub, local)):
            violations.append(f"clause_a: component {members} is not a PR-digraph rooted at {exit_vertex[c]}")

    counts = _path_counts(graph, root)
    bad = [v for v in range(graph.n) if v != root and counts[v] != 1]
    if bad:
        violations.append(f"clause_d: vertices {bad} lack a unique simple path to the root")

    structure = None
    if not violations:
        structure = _decompose(graph, root)
    return StructureReport("pr-digraph-tree", not violations, tuple(violations), structure)


def _decompose(graph: Digraph, root: int) -> CyclicalTree:
    # tree arcs: the first arc of each vertex's unique path to the root
    parent = [-1] * graph.n
    for v in range(graph.n):
        if v != root:
            parent[v] = simple_paths(graph, v, root, limit=1)[0][1]
    tree = RootedTree.from_parents(parent)
    return CyclicalTree(tree, graph.arcs - tree.arcs)


def to_cyclical_tree(graph: Digraph, root: int, max_order: int = MAX_ORDER) -> CyclicalTree:
    """Re-read a PR-digraph tree as a cyclical tree; the arc set is unchanged.

    Out-degree caps and non-interference are not imposed on the result.
    """
    report = is_pr_digraph_tree(graph, root, max_order)
    if not report.ok:
        raise RecognitionError("; ".join(report.violations))
    return report.structure


def decomposition_doc(structure: CyclicalTree) -> dict:
    return {
        "root": structure.root,
        "tree_arcs": [list(a) for a in sorted(structure.tree_arcs)],
        "back_arcs": [list(a) for a in sorted(structure.back_arcs)],
        "cycle_lengths": [[u, v, l] for (u, v), l in sorted(structure.cycle_lengths.items())],
    }
