"""Command-line entry point: ``treerank <command> ...``.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 no
convergence.  Errors are also written to stderr as a JSON object.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import closed_forms as cf
from . import condense, graph as gc, hierarchy, oracle, optimizer, transforms
from .errors import NonConvergence, TreeRankError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _num(x: float) -> str:
    return f"{x:.12g}"


def _common(p: argparse.ArgumentParser, top: bool) -> None:
    # on subcommands the defaults are suppressed so a flag given before the
    # command is not overwritten by the subparser
    d = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    p.add_argument("--alpha", type=float, default=d(oracle.DEFAULT_ALPHA), help="damping factor")
    p.add_argument("--tol", type=float, default=d(oracle.DEFAULT_TOL), help="oracle tolerance")
    p.add_argument("--seed", type=int, default=d(None), help="seed for random choices")
    p.add_argument("--json", action="store_true", default=d(False), help="JSON output")
    p.add_argument("--jobs", type=int, default=d(1), help="worker processes for sweeps")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="treerank", description="PageRank of tree-like link structures")
    _common(top, True)
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)
    shared = _Parser(add_help=False)
    _common(shared, False)

    def add(name, help):
        return sub.add_parser(name, help=help, parents=[shared])

    p = add("gen", "level profile or graph of a tree family")
    p.add_argument("family", choices=cf.FAMILIES)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--graph", action="store_true", help="emit the tree as a JSON graph document")
    p.add_argument("--policy", default="round-robin", choices=("round-robin", "first-parent", "random"))

    p = add("pr", "PageRank of a profile's root or of every vertex of a graph")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--profile")
    src.add_argument("--graph", help="JSON graph document, '-' for stdin")
    p.add_argument("--root", type=int)
    p.add_argument("--method", default="fixed-point", choices=("fixed-point", "series", "closed-form"))
    p.add_argument("--max-iter", type=int, default=oracle.DEFAULT_MAX_ITER)

    p = add("transform", "structure edits with predicted effects")
    p.add_argument("op", choices=("delete-level", "queue", "promote", "close-cycle"))
    p.add_argument("--profile")
    p.add_argument("--graph")
    p.add_argument("--root", type=int)
    p.add_argument("--arc", type=int, nargs=2, metavar=("V", "U"), help="tree arc v -> u to promote")
    p.add_argument("--u", type=int, help="closing vertex")
    p.add_argument("--v", type=int, help="origin vertex")

    p = add("hierarchy", "orderings between tree families")
    p.add_argument("check", choices=("height", "size", "queue-facts", "thresholds"))
    p.add_argument("--h", type=int, default=30)
    p.add_argument("--N", type=int, default=10 ** 6)
    p.add_argument("--m-max", type=int)
    p.add_argument("--h-max", type=int, default=40)
    p.add_argument("--alphas", type=float, nargs="+", help="sweep several damping factors (queue-facts)")

    p = add("scc", "strong components and PR-digraph trees")
    p.add_argument("op", choices=("components", "pr-roots", "to-cyclical"))
    p.add_argument("--graph", required=True)
    p.add_argument("--root", type=int)
    p.add_argument("--max-order", type=int, default=condense.MAX_ORDER)

    p = add("optimize", "maximize a root's PageRank, or recommend back arcs")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--profile")
    src.add_argument("--graph")
    p.add_argument("--root", type=int)
    p.add_argument("--target", type=int, help="vertex to boost (with --graph)")
    p.add_argument("--min-height", type=int, default=0)
    p.add_argument("--max-order", type=int)
    p.add_argument("--min-level-counts", type=str, default="")
    p.add_argument("--fixed-order", action="store_true")
    p.add_argument("--method", default="rules", choices=("rules", "exhaustive"))

    p = add("export-dot", "Graphviz rendering")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--profile")
    src.add_argument("--graph")
    p.add_argument("--root", type=int)
    return top


def _read_graph(path: str, root: int | None):
    text = sys.stdin.read() if path == "-" else open(path).read()
    try:
        g, doc_root = gc.from_json_doc(text)
    except json.JSONDecodeError as exc:
        raise gc.StructureError(f"graph document is not JSON: {exc}") from None
    return g, root if root is not None else doc_root


def _need_root(root):
    if root is None:
        raise UsageError("a root is required (--root or a 'root' field in the document)")
    return root


def _structure(g, root):
    """The graph as a rooted or cyclical tree, validated without caps."""
    rep = gc.validate(g, root, "tree")
    if rep.ok:
        return rep.structure
    rep = gc.validate(g, root, "cyclical", strict=False)
    if not rep.ok:
        raise gc.StructureError("; ".join(rep.violations))
    return rep.structure


def _emit(args, data, text):
    if args.json:
        print(json.dumps(data, sort_keys=True))
    else:
        print(text)


def _cmd_gen(args):
    prof = gc.generate_family(args.family, args.h, args.m)
    if args.graph:
        tree = gc.build_tree(prof, args.policy, args.seed)
        print(json.dumps(gc.to_json_doc(tree.graph, tree.root)))
    else:
        _emit(args, {"profile": list(prof.counts)}, str(prof))


def _cmd_pr(args):
    if args.profile is not None:
        prof = gc.parse_profile(args.profile)
        if args.method == "closed-form":
            value = cf.pr_root_profile(prof, args.alpha)
        else:
            vec = _oracle(args, gc.build_tree(prof))
            value = vec[0]
        _emit(args, {"root": 0, "value": value, "method": args.method}, _num(value))
        return
    g, root = _read_graph(args.graph, args.root)
    if args.method == "closed-form":
        s = _structure(g, _need_root(root))
        values = cf.pr_vector_cyclical(s, args.alpha)
    else:
        values = list(_oracle(args, g))
    _emit(args, {"values": values, "method": args.method},
          "\n".join(f"{v} {_num(x)}" for v, x in enumerate(values)))


def _oracle(args, g):
    if args.method == "series":
        return oracle.walk_series_pagerank(g, args.alpha, args.tol)
    return oracle.fixed_point_pagerank(g, args.alpha, args.tol, args.max_iter)


def _cmd_transform(args):
    if args.op in ("delete-level", "queue"):
        if args.profile is None:
            raise UsageError(f"{args.op} needs --profile")
        prof = gc.parse_profile(args.profile)
        if args.op == "queue":
            new = transforms.queue_tree(prof)
            _emit(args, {"profile": list(new.counts)}, str(new))
        else:
            new, delta = transforms.delete_last_level(prof, args.alpha)
            _emit(args, {"profile": list(new.counts), "predicted_delta": delta}, f"{new}\n{_num(delta)}")
        return
    if args.graph is None:
        raise UsageError(f"{args.op} needs --graph")
    g, root = _read_graph(args.graph, args.root)
    s = _structure(g, _need_root(root))
    if args.op == "promote":
        if args.arc is None:
            raise UsageError("promote needs --arc V U")
        new, pred = transforms.promote_to_bidirectional(s, tuple(args.arc), args.alpha)
    else:
        if args.u is None or args.v is None:
            raise UsageError("close-cycle needs --u and --v")
        new, _, pred = transforms.close_cycle(s, args.u, args.v, args.alpha)
    doc = gc.to_json_doc(new.graph, new.root)
    doc["prediction"] = {"closing": pred.closing, "origin": pred.origin, "cycle_length": pred.cycle_length,
                         "factor": pred.factor, "root_case": pred.root_case,
                         "decreases": sorted(pred.decreases), "unchanged": sorted(pred.unchanged)}
    print(json.dumps(doc, sort_keys=True))


def _cmd_hierarchy(args):
    if args.check == "thresholds":
        a0, q = hierarchy.solve_alpha0(), hierarchy.solve_queue_threshold()
        _emit(args, {"alpha0": a0, "queue_threshold": q}, f"alpha0={_num(a0)}\nqueue_threshold={_num(q)}")
        return
    if args.check == "queue-facts" and args.alphas:
        sweep = hierarchy.queue_facts_sweep(args.alphas, args.h_max, args.m_max or 6, args.jobs)
        tables = [sweep[a] for a in args.alphas]
    elif args.check == "queue-facts":
        tables = [hierarchy.queue_facts(args.alpha, args.h_max, args.m_max or 6)]
    elif args.check == "height":
        tables = [hierarchy.height_hierarchy(args.alpha, args.h, args.m_max or 6)]
    else:
        tables = [hierarchy.size_hierarchy(args.alpha, args.N, args.m_max or 8)]
    if args.json:
        print(json.dumps([{"rows": [r.__dict__ | {"failures": list(r.failures)} for r in t.rows], "info": t.info}
                          for t in tables], sort_keys=True))
    else:
        for i, t in enumerate(tables):
            text = t.to_csv()
            print(text if i == 0 else text.split("\n", 1)[1], end="")


def _cmd_scc(args):
    g, root = _read_graph(args.graph, args.root)
    if args.op == "components":
        cond = condense.strongly_connected_components(g)
        comps = [list(c) for c in cond.components]
        _emit(args, {"components": comps, "dag_arcs": [list(a) for a in sorted(cond.dag.arcs)]},
              "\n".join(" ".join(map(str, c)) for c in comps))
    elif args.op == "pr-roots":
        roots = sorted(condense.pr_digraph_roots(g, args.max_order))
        _emit(args, {"roots": roots}, " ".join(map(str, roots)))
    else:
        ct = condense.to_cyclical_tree(g, _need_root(root), args.max_order)
        print(json.dumps(condense.decomposition_doc(ct), sort_keys=True))


def _cmd_optimize(args):
    if args.graph is not None:
        g, root = _read_graph(args.graph, args.root)
        if args.target is None:
            raise UsageError("recommendations need --target")
        s = _structure(g, _need_root(root))
        recs = optimizer.recommend_bidirectional(s, args.target, args.alpha, args.tol)
        if args.json:
            print(json.dumps([r.to_dict() for r in recs], sort_keys=True))
        else:
            for r in recs:
                line = f"{r.action} {r.arc[0]}->{r.arc[1]} l={r.cycle_length} factor={_num(r.predicted_factor)}"
                print(line + (f" ({r.warning})" if r.warning else ""))
        return
    start = gc.parse_profile(args.profile)
    bounds = tuple(int(x) for x in args.min_level_counts.split()) if args.min_level_counts else ()
    c = optimizer.Constraints(args.min_height, args.max_order if args.max_order else start.order,
                              bounds, args.fixed_order)
    res = optimizer.optimize_profile(start, c, args.alpha, args.method)
    data = {"best_profile": list(res.best_profile.counts), "best_value": res.best_value, "method": res.method,
            "trajectory": [[rule, list(p.counts), v] for rule, p, v in res.trajectory]}
    text = "\n".join(f"{rule}: {p} {_num(v)}" for rule, p, v in res.trajectory)
    _emit(args, data, f"{text}\nbest: {res.best_profile} {_num(res.best_value)}")


def _cmd_dot(args):
    if args.profile is not None:
        print(gc.to_dot(gc.build_tree(gc.parse_profile(args.profile))), end="")
        return
    g, root = _read_graph(args.graph, args.root)
    print(gc.to_dot(_structure(g, root) if root is not None else g), end="")


COMMANDS = {"gen": _cmd_gen, "pr": _cmd_pr, "transform": _cmd_transform, "hierarchy": _cmd_hierarchy,
            "scc": _cmd_scc, "optimize": _cmd_optimize, "export-dot": _cmd_dot}


def _fail(code: int, kind: str, message: str) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if not 0.0 < args.alpha < 1.0:
            raise UsageError(f"--alpha must lie in (0, 1), got {args.alpha}")
        COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail(1, "usage", str(exc))
    except NonConvergence as exc:
        return _fail(3, type(exc).__name__, str(exc))
    except (TreeRankError, ValueError, OSError) as exc:
        return _fail(2, type(exc).__name__, str(exc))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
