"""Digraphs, level profiles and the tree-like structures built on them.

Vertex ids are dense integers ``0..n-1``.  Rooted trees are stored as a
parent array with vertices numbered breadth-first from the root, so the
level of a vertex never decreases with its id.
"""
from __future__ import annotations

import json
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    FamilyError,
    FirstLevelNotOne,
    NoTreePath,
    ProfileError,
    StructureError,
)

Arc = tuple[int, int]

MAX_FAMILY_HEIGHT = 60


@dataclass(frozen=True)
class Digraph:
    """Finite digraph without self-loops."""

    n: int
    arcs: frozenset[Arc] = frozenset()

    def __post_init__(self):
        arcs = frozenset((int(u), int(v)) for u, v in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        if self.n < 1:
            raise StructureError(f"a digraph needs at least one vertex, got n={self.n}")
        for u, v in arcs:
            if u == v:
                raise StructureError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise StructureError(f"arc {(u, v)} has an endpoint outside 0..{self.n - 1}")

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in sorted(self.arcs):
            out[u].append(v)
        return tuple(tuple(s) for s in out)

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in sorted(self.arcs):
            inc[v].append(u)
        return tuple(tuple(p) for p in inc)

    @cached_property
    def out_degree(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.successors)

    def arc_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Tail and head arrays, ordered by (head, tail)."""
        ordered = sorted(self.arcs, key=lambda a: (a[1], a[0]))
        arr = np.array(ordered, dtype=np.int64).reshape(-1, 2)
        return arr[:, 0].copy(), arr[:, 1].copy()

    def with_arcs(self, added: Iterable[Arc] = (), removed: Iterable[Arc] = ()) -> "Digraph":
        return Digraph(self.n, (self.arcs - frozenset(removed)) | frozenset(added))

    def reaches(self, target: int, avoid: int | None = None) -> list[bool]:
        """Which vertices have a walk to ``target`` that never enters ``avoid``."""
        seen = [False] * self.n
        if target == avoid:
            return seen
        seen[target] = True
        queue = deque([target])
        while queue:
            x = queue.popleft()
            for p in self.predecessors[x]:
                if not seen[p] and p != avoid:
                    seen[p] = True
                    queue.append(p)
        return seen

    def induced(self, vertices: Iterable[int]) -> tuple["Digraph", list[int]]:
        """Induced subdigraph, relabelled densely; returns it with the old ids."""
        old = sorted(set(vertices))
        new_id = {v: i for i, v in enumerate(old)}
        arcs = [(new_id[u], new_id[v]) for u, v in self.arcs if u in new_id and v in new_id]
        return Digraph(len(old), arcs), old


@dataclass(frozen=True)
class LevelProfile:
    """Per-level vertex counts ``1 n1 ... nh`` of a rooted tree."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(self.counts)
        if not counts:
            raise ProfileError("empty profile")
        for c in counts:
            if isinstance(c, bool) or not isinstance(c, (int, np.integer)):
                raise ProfileError(f"level count {c!r} is not an integer")
            if c < 1:
                raise ProfileError(f"level count {c} is not positive")
        if counts[0] != 1:
            raise FirstLevelNotOne(f"the root level must hold exactly one vertex, got {counts[0]}")
        object.__setattr__(self, "counts", tuple(int(c) for c in counts))

    @property
    def height(self) -> int:
        return len(self.counts) - 1

    @property
    def order(self) -> int:
        return sum(self.counts)

    def __len__(self):
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)

    def __getitem__(self, k):
        return self.counts[k]

    def __str__(self):
        return render_profile(self)


def parse_profile(text: str) -> LevelProfile:
    tokens = text.split()
    if not tokens:
        raise ProfileError("empty profile")
    counts = []
    for tok in tokens:
        try:
            counts.append(int(tok))
        except ValueError:
            raise ProfileError(f"malformed level count {tok!r}") from None
    return LevelProfile(tuple(counts))


def render_profile(profile: LevelProfile) -> str:
    return " ".join(str(c) for c in profile.counts)


@dataclass(frozen=True, eq=False)
class RootedTree:
    """A tree whose arcs all point towards ``root``.

    ``parent[root] == -1``; every other vertex has exactly one out-arc,
    to ``parent[v]``.
    """

    parent: tuple[int, ...]
    root: int
    level_of: tuple[int, ...]

    @classmethod
    def from_parents(cls, parent: Sequence[int]) -> "RootedTree":
        parent = tuple(int(p) for p in parent)
        roots = [v for v, p in enumerate(parent) if p < 0]
        if len(roots) != 1:
            raise StructureError(f"expected exactly one root, found {len(roots)}")
        root = roots[0]
        n = len(parent)
        level = [-1] * n
        level[root] = 0
        for v in range(n):
            chain = []
            x = v
            while level[x] < 0:
                chain.append(x)
                x = parent[x]
                if not 0 <= x < n:
                    raise StructureError(f"parent {x} out of range")
                if len(chain) > n:
                    raise StructureError("parent pointers contain a cycle")
            base = level[x]
            for i, y in enumerate(reversed(chain), start=1):
                level[y] = base + i
        return cls(parent, root, tuple(level))

    @property
    def n(self) -> int:
        return len(self.parent)

    @property
    def height(self) -> int:
        return max(self.level_of)

    @cached_property
    def arcs(self) -> frozenset[Arc]:
        return frozenset((v, p) for v, p in enumerate(self.parent) if p >= 0)

    @cached_property
    def graph(self) -> Digraph:
        return Digraph(self.n, self.arcs)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        ch: list[list[int]] = [[] for _ in range(self.n)]
        for v, p in enumerate(self.parent):
            if p >= 0:
                ch[p].append(v)
        return tuple(tuple(c) for c in ch)

    @cached_property
    def profile(self) -> LevelProfile:
        return LevelProfile(tuple(np.bincount(np.asarray(self.level_of)).tolist()))

    def arc_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        parent = np.asarray(self.parent, dtype=np.int64)
        src = np.flatnonzero(parent >= 0)
        dst = parent[src]
        order = np.lexsort((src, dst))
        return src[order], dst[order]

    def path_to_root(self, v: int) -> list[int]:
        path = [v]
        while self.parent[path[-1]] >= 0:
            path.append(self.parent[path[-1]])
        return path

    def is_ancestor(self, u: int, v: int) -> bool:
        """True when ``u`` lies on the path from ``v`` to the root (u == v allowed)."""
        while self.level_of[v] > self.level_of[u]:
            v = self.parent[v]
        return u == v

    def subtree(self, v: int) -> list[int]:
        out, stack = [], [v]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(self.children[x])
        return sorted(out)


@dataclass(frozen=True, eq=False)
class CyclicalTree:
    """Rooted tree plus back arcs, each closing a cycle along a tree path.

    A back arc ``(u, v)`` leaves the closing vertex ``u`` and enters the
    origin ``v``, a proper descendant of ``u``; the cycle is the tree path
    ``v -> ... -> u`` followed by the back arc.
    """

    tree: RootedTree
    back_arcs: frozenset[Arc] = frozenset()

    def __post_init__(self):
        back = frozenset((int(u), int(v)) for u, v in self.back_arcs)
        object.__setattr__(self, "back_arcs", back)
        for u, v in back:
            if u == v or not self.tree.is_ancestor(u, v):
                raise NoTreePath(f"no tree path from {v} to {u} for back arc {(u, v)}")
            if (u, v) in self.tree.arcs:
                raise StructureError(f"arc {(u, v)} is already a tree arc")

    @classmethod
    def from_tree(cls, tree: RootedTree) -> "CyclicalTree":
        return cls(tree, frozenset())

    @property
    def root(self) -> int:
        return self.tree.root

    @property
    def n(self) -> int:
        return self.tree.n

    @property
    def tree_arcs(self) -> frozenset[Arc]:
        return self.tree.arcs

    @property
    def level_of(self) -> tuple[int, ...]:
        return self.tree.level_of

    @cached_property
    def graph(self) -> Digraph:
        return Digraph(self.n, self.tree.arcs | self.back_arcs)

    def arc_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return self.graph.arc_arrays()

    @cached_property
    def cycle_lengths(self) -> dict[Arc, int]:
        lv = self.tree.level_of
        return {(u, v): lv[v] - lv[u] + 1 for u, v in sorted(self.back_arcs)}

    @cached_property
    def closers(self) -> Counter:
        """Number of back arcs leaving each closing vertex."""
        return Counter(u for u, _ in self.back_arcs)

    @property
    def out_degree(self) -> tuple[int, ...]:
        return self.graph.out_degree

    @property
    def od_root(self) -> int:
        return self.out_degree[self.root]

    @property
    def is_bidirectional(self) -> bool:
        return all(l == 2 for l in self.cycle_lengths.values())

    def cycle_path(self, arc: Arc) -> list[int]:
        """Vertices of the cycle closed by ``arc``: origin first, closing vertex last."""
        u, v = arc
        path = [v]
        while path[-1] != u:
            path.append(self.tree.parent[path[-1]])
        return path

    def interfering_arcs(self) -> list[Arc]:
        """Back arcs whose cycle interior holds a vertex of out-degree other than 1."""
        od = self.out_degree
        return [a for a in sorted(self.back_arcs) if any(od[x] != 1 for x in self.cycle_path(a)[:-1])]

    def cap_violations(self) -> list[str]:
        od = self.out_degree
        out = []
        if od[self.root] > 1:
            out.append(f"root_out_degree: od({self.root})={od[self.root]}")
        out.extend(f"out_degree: od({v})={d}" for v, d in enumerate(od) if v != self.root and d > 2)
        return out

    def with_back_arc(self, arc: Arc) -> "CyclicalTree":
        two = self.tree.parent[arc[1]] == arc[0]
        cls = BidirectionalTree if two and (self.is_bidirectional or isinstance(self, BidirectionalTree)) else CyclicalTree
        return cls(self.tree, self.back_arcs | {arc})


@dataclass(frozen=True, eq=False)
class BidirectionalTree(CyclicalTree):
    """Cyclical tree whose back arcs all close 2-cycles."""

    def __post_init__(self):
        super().__post_init__()
        for arc, l in self.cycle_lengths.items():
            if l != 2:
                raise StructureError(f"back arc {arc} closes a cycle of length {l}, not 2")


@dataclass(frozen=True)
class QCensus:
    """``entries[k][q]``: level-k vertices whose root path meets q cycles."""

    entries: tuple[tuple[int, ...], ...]
    od_root: int = 0

    def __post_init__(self):
        entries = tuple(tuple(int(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", entries)
        if self.od_root not in (0, 1):
            raise StructureError(f"od_root must be 0 or 1, got {self.od_root}")
        for k, row in enumerate(entries):
            if len(row) > k + 2 or any(x < 0 for x in row):
                raise StructureError(f"census row {k} is malformed: {row}")

    @property
    def height(self) -> int:
        return len(self.entries) - 1

    def count(self, k: int, q: int) -> int:
        row = self.entries[k]
        return row[q] if 0 <= q < len(row) else 0

    @property
    def level_counts(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.entries)

    @property
    def order(self) -> int:
        return sum(self.level_counts)


@dataclass(frozen=True)
class StructureReport:
    kind: str
    ok: bool
    violations: tuple[str, ...] = ()
    structure: RootedTree | CyclicalTree | None = field(default=None, compare=False)
    interfering: tuple[Arc, ...] = ()

    @property
    def levels(self) -> dict[int, int] | None:
        if self.structure is None:
            return None
        return dict(enumerate(self.structure.level_of))

    @property
    def tree_arcs(self) -> frozenset[Arc]:
        s = self.structure
        if s is None:
            return frozenset()
        return s.arcs if isinstance(s, RootedTree) else s.tree_arcs

    @property
    def back_arcs(self) -> frozenset[Arc]:
        return self.structure.back_arcs if isinstance(self.structure, CyclicalTree) else frozenset()

    @property
    def cycle_lengths(self) -> dict[Arc, int]:
        return self.structure.cycle_lengths if isinstance(self.structure, CyclicalTree) else {}

    def codes(self) -> set[str]:
        return {v.split(":", 1)[0] for v in self.violations}


def _has_cycle(graph: Digraph) -> bool:
    indeg = [len(p) for p in graph.predecessors]
    queue = deque(v for v in range(graph.n) if indeg[v] == 0)
    removed = 0
    while queue:
        x = queue.popleft()
        removed += 1
        for y in graph.successors[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                queue.append(y)
    return removed < graph.n


def validate(graph: Digraph, root: int, kind: str = "tree", strict: bool = True) -> StructureReport:
    """Check ``graph`` against one of the structure classes.

    ``kind`` is ``"tree"``, ``"bidirectional"`` or ``"cyclical"``.  With
    ``strict`` the out-degree caps (root at most 1, others at most 2) and
    the non-interference condition are enforced as well; these are what
    the closed forms need, not part of the bare definition.
    """
    if kind not in ("tree", "bidirectional", "cyclical"):
        raise ValueError(f"unknown structure kind {kind!r}")
    if not 0 <= root < graph.n:
        raise ValueError(f"root {root} outside 0..{graph.n - 1}")
    if kind == "tree":
        return _validate_tree(graph, root)

    violations: list[str] = []
    reach = graph.reaches(root)
    for v in range(graph.n):
        if not reach[v]:
            violations.append(f"unreachable: {v} has no path to the root")
    if violations:
        return StructureReport(kind, False, tuple(violations))

    parent = [-1] * graph.n
    for v in range(graph.n):
        if v == root:
            continue
        succ = graph.successors[v]
        if len(succ) == 1:
            parent[v] = succ[0]
            continue
        avoiding = graph.reaches(root, avoid=v)
        ups = [w for w in succ if avoiding[w]]
        if len(ups) != 1:
            violations.append(f"ambiguous_parent: {v} has {len(ups)} arcs leading to the root")
        else:
            parent[v] = ups[0]
    if violations:
        return StructureReport(kind, False, tuple(violations))
    try:
        tree = RootedTree.from_parents(parent)
    except StructureError as exc:
        return StructureReport(kind, False, (f"cycle: {exc}",))

    back = graph.arcs - tree.arcs
    for u, v in sorted(back):
        if not tree.is_ancestor(u, v):
            violations.append(f"off_path: back arc {(u, v)} has no tree path from {v} to {u}")
    if violations:
        return StructureReport(kind, False, tuple(violations))
    cls = CyclicalTree
    if kind == "bidirectional":
        for u, v in sorted(back):
            if tree.parent[v] != u:
                violations.append(f"not_two_cycle: back arc {(u, v)} does not reverse a tree arc")
        cls = BidirectionalTree
    if violations:
        return StructureReport(kind, False, tuple(violations))
    structure = cls(tree, back)
    interfering = tuple(structure.interfering_arcs())
    if strict:
        violations.extend(structure.cap_violations())
        violations.extend(f"interference: cycle of back arc {a} has an interior vertex of out-degree 2"
                          for a in interfering)
    return StructureReport(kind, not violations, tuple(violations), structure, interfering)


def _validate_tree(graph: Digraph, root: int) -> StructureReport:
    violations = []
    od = graph.out_degree
    if od[root] != 0:
        violations.append(f"root_out_degree: od({root})={od[root]}")
    for v in range(graph.n):
        if v != root and od[v] != 1:
            violations.append(f"out_degree: od({v})={od[v]}")
    if _has_cycle(graph):
        violations.append("cycle: the digraph is not acyclic")
    if not violations:
        parent = [graph.successors[v][0] if v != root else -1 for v in range(graph.n)]
        tree = RootedTree.from_parents(parent)
        return StructureReport("tree", True, (), tree)
    return StructureReport("tree", False, tuple(violations))


def level_census(structure: RootedTree | CyclicalTree) -> QCensus:
    if isinstance(structure, RootedTree):
        structure = CyclicalTree.from_tree(structure)
    tree = structure.tree
    closers = structure.closers
    q_of = [0] * structure.n
    # vertex ids are not guaranteed level-ordered here, so walk by level
    order = sorted(range(structure.n), key=lambda v: tree.level_of[v])
    for v in order:
        p = tree.parent[v]
        q_of[v] = (q_of[p] if p >= 0 else 0) + closers[v]
    h = tree.height
    rows = [[0] * (k + 2) for k in range(h + 1)]
    for v in range(structure.n):
        rows[tree.level_of[v]][q_of[v]] += 1
    return QCensus(tuple(tuple(r) for r in rows), structure.od_root)


def build_tree(profile: LevelProfile, policy: str = "round-robin", seed: int | None = None) -> RootedTree:
    """A rooted tree with the given level counts.

    ``policy`` decides which level-k vertex each level-(k+1) vertex links to:
    ``round-robin`` (i mod n_k), ``first-parent`` or ``random``.
    """
    counts = np.asarray(profile.counts, dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(counts)))
    n = int(offsets[-1])
    parent = np.full(n, -1, dtype=np.int64)
    level = np.zeros(n, dtype=np.int64)
    rng = np.random.default_rng(seed)
    for k in range(1, len(counts)):
        idx = np.arange(counts[k], dtype=np.int64)
        if policy == "round-robin":
            local = idx % counts[k - 1]
        elif policy == "first-parent":
            local = np.zeros_like(idx)
        elif policy == "random":
            local = rng.integers(0, counts[k - 1], size=counts[k])
        else:
            raise ValueError(f"unknown linking policy {policy!r}")
        parent[offsets[k]:offsets[k + 1]] = offsets[k - 1] + local
        level[offsets[k]:offsets[k + 1]] = k
    return RootedTree(tuple(parent.tolist()), 0, tuple(level.tolist()))


def generate_family(family: str, h: int, m: int | None = None) -> LevelProfile:
    """Level profile of one of the regular tree families.

    Families: ``m-ary`` (needs m), ``unary``, ``binomial`` and ``path``
    (a root with hanging paths of h, h-1, ..., 1 vertices).
    """
    if not isinstance(h, int) or h < 0:
        raise FamilyError(f"height must be a non-negative integer, got {h!r}")
    if h > MAX_FAMILY_HEIGHT:
        raise FamilyError(f"height {h} exceeds the supported maximum {MAX_FAMILY_HEIGHT}")
    if family == "m-ary":
        if m is None or m < 1:
            raise FamilyError(f"m-ary family needs m >= 1, got {m!r}")
        return LevelProfile(tuple(m ** k for k in range(h + 1)))
    if family == "unary":
        return LevelProfile((1,) * (h + 1))
    if family == "binomial":
        return LevelProfile(tuple(comb(h, k) for k in range(h + 1)))
    if family == "path":
        return LevelProfile((1,) + tuple(range(h, 0, -1)))
    raise FamilyError(f"unknown family {family!r}")


# random structures, mostly for property tests and sweeps

def random_profile(rng: random.Random, max_height: int = 8, max_count: int = 9,
                   min_height: int = 0) -> LevelProfile:
    h = rng.randint(min_height, max_height)
    return LevelProfile((1,) + tuple(rng.randint(1, max_count) for _ in range(h)))


def random_tree(n: int, rng: random.Random) -> RootedTree:
    """Uniform-attachment random tree on n vertices, relabelled level by level."""
    parent = [-1] + [rng.randrange(v) for v in range(1, n)]
    return relabel_by_level(RootedTree.from_parents(parent))


def relabel_by_level(tree: RootedTree) -> RootedTree:
    order = sorted(range(tree.n), key=lambda v: (tree.level_of[v], v))
    new_id = {v: i for i, v in enumerate(order)}
    parent = [-1] * tree.n
    for v in range(tree.n):
        p = tree.parent[v]
        parent[new_id[v]] = new_id[p] if p >= 0 else -1
    return RootedTree.from_parents(parent)


def random_cyclical_tree(n: int, rng: random.Random, n_cycles: int = 2, bidirectional: bool = False,
                         root_cycle: bool | None = None) -> CyclicalTree:
    """Random non-interfering cyclical tree.

    Cycles are placed on vertex-disjoint tree paths, which is exactly what
    keeps every cycle interior at out-degree 1.  ``root_cycle`` forces
    (True) or forbids (False) a cycle closed at the root.
    """
    tree = random_tree(n, rng)
    used: set[int] = set()
    back: set[Arc] = set()

    def add(u: int, v: int) -> None:
        path = [v]
        while path[-1] != u:
            path.append(tree.parent[path[-1]])
        used.update(path)
        back.add((u, v))

    def candidates(allow_root: bool) -> list[Arc]:
        out = []
        for v in range(n):
            if v in used or v == tree.root:
                continue
            x = v
            while tree.parent[x] >= 0:
                x = tree.parent[x]
                if x in used:
                    break
                if x == tree.root and not allow_root:
                    break
                if bidirectional and tree.level_of[v] - tree.level_of[x] > 1:
                    break
                out.append((x, v))
        return out

    if root_cycle:
        cands = [a for a in candidates(True) if a[0] == tree.root]
        if cands:
            add(*rng.choice(cands))
    for _ in range(n_cycles - (1 if root_cycle else 0)):
        cands = candidates(root_cycle is None)
        if not cands:
            break
        add(*rng.choice(cands))
    cls = BidirectionalTree if bidirectional else CyclicalTree
    return cls(tree, frozenset(back))


def random_digraph(n: int, density: float, rng: random.Random) -> Digraph:
    arcs = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < density]
    return Digraph(n, arcs)


# serialization

def to_json_doc(graph: Digraph, root: int | None = None) -> dict:
    doc = {"n": graph.n, "arcs": [list(a) for a in sorted(graph.arcs)]}
    if root is not None:
        doc["root"] = root
    return doc


def from_json_doc(doc: Mapping | str) -> tuple[Digraph, int | None]:
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        graph = Digraph(int(doc["n"]), [tuple(a) for a in doc["arcs"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"malformed graph document: {exc}") from None
    root = doc.get("root")
    return graph, (int(root) if root is not None else None)


def to_dot(structure: Digraph | RootedTree | CyclicalTree, name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    if isinstance(structure, Digraph):
        solid, dashed, root = structure.arcs, frozenset(), None
        n = structure.n
    elif isinstance(structure, RootedTree):
        solid, dashed, root = structure.arcs, frozenset(), structure.root
        n = structure.n
    else:
        solid, dashed, root = structure.tree_arcs, structure.back_arcs, structure.root
        n = structure.n
    for v in range(n):
        attrs = ' [shape=doublecircle]' if v == root else ''
        lines.append(f"  {v}{attrs};")
    for u, v in sorted(solid):
        lines.append(f"  {u} -> {v};")
    for u, v in sorted(dashed):
        lines.append(f"  {u} -> {v} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
