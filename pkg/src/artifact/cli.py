"""Command-line front end.

Every subcommand produces a list of named checks.  Exit status is 0 when all
pass, 1 when one fails, 2 on a usage or input error.  ``--report`` writes
``{command, inputs, horizon, checks, result}`` as JSON; ``--log`` writes the
run's per-stage records as JSON lines.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import fixtures as fx
from .errors import ArtifactError, ParseError
from .report import Check, all_pass, as_dicts, check

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class Outcome:
    def __init__(self, checks: list[Check], result: Optional[dict] = None,
                 log: Optional[list[dict]] = None, horizon: Optional[int] = None):
        self.checks = checks
        self.result = result or {}
        self.log = log
        self.horizon = horizon


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _k(args, default: str):
    from .oracles import MockCeSet

    return MockCeSet.from_text(_read(args.k)) if args.k else fx.k_set(default)


def _family(args):
    from .oracles import CeFamily

    return CeFamily.from_text(_read(args.family)) if args.family else fx.family("a")


def _tree(path: str):
    from .trees import tree_from_treev1

    try:
        return fx.tree_named(path)
    except (KeyError, ValueError):
        return tree_from_treev1(_read(path))


def _horizon(args, default: int) -> int:
    h = default if args.horizon is None else args.horizon
    if h < 1:
        raise ParseError("--horizon must be at least 1")
    return h


def _write_out(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text)


# ---------------------------------------------------------------------------
# build


def cmd_build(args) -> Outcome:
    from .codings import singlepath as sp
    from .codings import staircase as sc
    from .codings import type3 as t3

    if args.construction == "staircase":
        k = _k(args, "staircase")
        h = _horizon(args, 300)
        res = sc.staircase_build(k, h, args.mode)
        bad1, bad2 = [], []
        for s in range(h + 1):
            got = sc.check_properties(res, s)
            if not got["I"]:
                bad1.append(f"stage {s}")
            if not got["II"]:
                bad2.append(f"stage {s}")
        final = sc.check_properties(res, h, k)
        checks = [check("staircase-property-I", bad1, "claim:marker-heights-increase"),
                  check("staircase-property-II", bad2, "claim:blocks-descend"),
                  check("staircase-property-III", [] if final["III"] else ["marker values miss K"],
                        "claim:markers-code-k")]
        _write_out(args, res.tree.to_treev1())
        return Outcome(checks, {"nodes": len(res.tree), "marker_changes": res.markers.change_stages()},
                       res.log, h)
    if args.construction in ("singlepath", "harden"):
        k = _k(args, "singlepath")
        h = _horizon(args, 500)
        if args.construction == "singlepath":
            res = sp.singlepath_build(k, h)
            p, log = res.tree, [{"stage": s + 1, "node": s + 1, "n_s": n} for s, n in enumerate(res.attach)]
        else:
            hres = sp.harden_weak(k, h)
            p, log = hres.tree, [{"stage": s + 1, "attach": n} for s, n in enumerate(hres.even_attach)]
        bad = {"a": [], "b": [], "c": []}
        for s in range(h + 1):
            t = p.freeze(s)
            conds = sp.tech_conditions(t)
            if args.construction == "harden":
                conds = {"a": conds["a"]}
            for name, ok in conds.items():
                if not ok:
                    bad[name].append(f"stage {s}")
        checks = [check("tech-finitely-branching", bad["a"], "claim:tech-a")]
        if args.construction == "singlepath":
            checks += [check("tech-order-refines-ids", bad["b"], "claim:tech-b"),
                       check("tech-successor-computable", bad["c"], "claim:tech-c")]
        t = p.freeze()
        top = max(t.branching(n) for n in t.nodes)
        checks.append(check("binary-branching", [] if top <= 2 else [f"max branching {top}"],
                            "claim:binary-branching", f"max branching {top}"))
        _write_out(args, p.to_treev1())
        return Outcome(checks, {"nodes": len(p)}, log, h)
    # type3
    stack = _stack(args)
    h = _horizon(args, 2000)
    res = t3.type3_build(stack, h)
    lim = t3.Type3Limit.from_stack(stack)
    top = lim.levels[-1]
    got = res.empirical_levels(top)
    want = list(lim.levels)
    checks = [check("branching-levels", [] if got == want else [f"empirical {got} != declared {want}"],
                    "claim:branching-levels", f"levels {got}")]
    log = [{"stage": s + 1, "a": list(res.a_rows[s]), "added": sum(n for _, n in st)}
           for s, st in enumerate(res.added)]
    return Outcome(checks, {"nodes": res.node_count(), "levels": want}, log, h)


def _stack(args):
    from .oracles import ApproxStack

    fam = _family(args)
    return ApproxStack(fam, _k(args, "stack"), args.n_max)


# ---------------------------------------------------------------------------
# embed


def cmd_embed(args) -> Outcome:
    from .embedding import (Embedding, Inconsistent, NotFound, embedding_map_from_text,
                            find_embedding, kruskal_index, verify_embedding, weakly_nontrivial)

    if args.action == "find":
        a, b = _tree(args.src), _tree(args.dst)
        w = find_embedding(a, b)
        if w is NotFound:
            return Outcome([], {"result": "not-found"})
        rep = verify_embedding(w)
        _write_out(args, w.to_text())
        return Outcome([check("witness-verifies", rep.violations, "claim:embedding")],
                       {"result": "found", "map": {str(k): v for k, v in sorted(w.map.items())}})
    if args.action == "check":
        if not args.map:
            raise ParseError("embed check needs --map")
        a, b = _tree(args.src), _tree(args.dst if args.dst else args.src)
        e = Embedding(a, b, embedding_map_from_text(_read(args.map)))
        try:
            rep = verify_embedding(e)
        except ArtifactError as exc:
            return Outcome([Check("embedding-valid", "fail", str(exc), "claim:embedding")])
        return Outcome([check("embedding-valid", rep.violations, "claim:embedding")],
                       {"weakly_nontrivial": weakly_nontrivial(e)})
    # kruskal
    if args.trees:
        seq = [_tree(p) for p in args.trees]
    elif args.fixture == "chains":
        seq = fx.chain_sequence()
    elif args.fixture == "star":
        seq = fx.star_prefixed()
    else:
        seq = fx.random_sequence(args.seed)
    window = args.window or len(seq)
    k = kruskal_index(seq, window)
    if k is Inconsistent:
        return Outcome([Check("kruskal-consistent", "fail", f"no index below {window // 2 + window % 2}",
                              "claim:kruskal")], {"k": None})
    return Outcome([Check("kruskal-consistent", "pass", f"k = {k}", "claim:kruskal")], {"k": k})


# ---------------------------------------------------------------------------
# analyze


def cmd_analyze(args) -> Outcome:
    if args.action == "selfembed":
        return _selfembed(args)
    if args.action == "decode":
        return _decode(args)
    from .analysis.chains import Antichain, chain_or_antichain
    from .trees import StagewiseTree

    if args.tree in (None, "leafy"):
        p = fx.leafy()
    elif args.tree == "leafless":
        p = fx.leafless()
    else:
        p = StagewiseTree.from_treev1(_read(args.tree))
    r = chain_or_antichain(p, args.target, margin=args.margin)
    kind = "antichain" if isinstance(r, Antichain) else "chain"
    ok = r.verify(p.freeze()) and len(r.nodes) == args.target
    return Outcome([check("certificate-verifies", [] if ok else [f"{kind} fails its own check"],
                          "claim:chain-or-antichain", f"{kind} of {len(r.nodes)}")],
                   {"kind": kind, "nodes": list(r.nodes)}, horizon=p.horizon)


def _selfembed(args) -> Outcome:
    from .embedding import nontrivial, verify_embedding, weakly_nontrivial
    from .oracles import limit_oracle

    if args.type == 1:
        from .analysis.synthesis import synthesize_type1
        from .codings.staircase import staircase_build

        h = _horizon(args, 300)
        p = staircase_build(_k(args, "staircase"), h).tree
        syn = synthesize_type1(p, limit_oracle(p))
        e = syn.embedding
        extra = {"k": syn.fixed_prefix}
    elif args.type == 2:
        from .analysis.synthesis import synthesize_type2
        from .codings.singlepath import harden_weak

        h = _horizon(args, 500)
        p = harden_weak(_k(args, "singlepath"), h).tree
        syn = synthesize_type2(p, limit_oracle(p), margin=args.margin or 0)
        e = syn.embedding
        extra = {"k": syn.fixed_prefix}
    else:
        from .analysis.type3_embed import as_embedding, synthesize_type3
        from .codings.type3 import Type3Limit, type3_build

        h = _horizon(args, 2000)
        stack = _stack(args)
        res = type3_build(stack, h)
        syn = synthesize_type3(Type3Limit.from_stack(stack))
        e, ids = as_embedding(syn.alpha, res.strings(6))
        p = e.target
        extra = {"start": syn.start}
    rep = verify_embedding(e)
    checks = [check("embedding-valid", rep.violations, "claim:embedding"),
              check("weakly-nontrivial", [] if weakly_nontrivial(e) else ["map is the identity"],
                    "claim:nontrivial")]
    if args.type != 3:
        nt = nontrivial(e, p, margin=args.margin or 0)
        checks.append(check("nontrivial", [] if nt else ["every old node is in the image"], "claim:nontrivial"))
    else:
        root = e.target.root
        checks.append(check("nontrivial", [] if root not in e.image() else ["root is in the image"],
                            "claim:nontrivial"))
    _write_out(args, e.to_text())
    return Outcome(checks, {"type": args.type, "domain": len(e.map), **extra}, horizon=h)


def _decode(args) -> Outcome:
    if args.type == 3:
        from .analysis.type3_embed import branching_walk, decode_jump, find_expanding_node, synthesize_type3
        from .codings.type3 import Type3Limit

        stack = _stack(args)
        lim = Type3Limit.from_stack(stack)
        syn = synthesize_type3(lim)
        n_max = min(args.n_max, 3)
        xi, k = find_expanding_node(syn.alpha, 5000, lim.nodes(8))
        w = branching_walk(syn.alpha, 200_000, lim.is_branching, n_max, xi, k)
        verdicts = decode_jump(w.c, stack.family)
        bad = [f"A_{v.n}: said {'finite' if v.finite else 'infinite'}" for v in verdicts
               if v.finite != stack.family.is_finite(v.n)]
        dom = [f"c({n}) = {w.c[n]} < b({n}) = {lim.b(n)}" for n in range(n_max + 1) if w.c[n] < lim.b(n)]
        return Outcome([check("dominates-branching-levels", dom, "claim:dominating"),
                        check("jump-verdicts", bad, "claim:decode-jump")],
                       {"c": w.c, "finite": [v.finite for v in verdicts]})
    from .codings.staircase import staircase_build, staircase_decode
    from .embedding import Embedding, embedding_map_from_text

    if not args.embedding:
        raise ParseError("analyze decode --type 1 needs --embedding")
    k = _k(args, "staircase")
    h = _horizon(args, 300)
    res = staircase_build(k, h)
    t = res.tree.freeze()
    m = embedding_map_from_text(_read(args.embedding))
    e = Embedding(t.induced([x for x in m if x in t]), t, m)
    moved = next((x for x in sorted(m) if m[x] != x), None)
    if moved is None:
        return Outcome([Check("decoded-prefix", "fail", "the embedding moves no node", "claim:decode-k")])
    i_max = args.n_max
    d = staircase_decode(e, moved, i_max, k, floor=res.floor)
    truth = {i: frozenset(x for x in k.members() if x < i) for i in range(i_max + 1)}
    bad = [f"K[{i}]" for i in range(i_max + 1) if d.prefixes[i] != truth[i]]
    return Outcome([check("decoded-prefix", bad, "claim:decode-k")],
                   {"psi": d.psi, "bits": d.bits(i_max)}, horizon=h)


# ---------------------------------------------------------------------------
# adversary and verify


def cmd_adversary(args) -> Outcome:
    from .adversary.programs import parse_config

    if args.construction == "isomaxinf":
        from .adversary.isomaxinf import isomaxinf_run
        from .adversary.isomaxinf_audit import isomaxinf_verify

        cfg = parse_config(_read(args.config) if args.config else fx.ISOMAXINF_CONFIG)
        h = _horizon(args, 1000)
        r = isomaxinf_run(cfg.pairs, h, fault=args.inject_fault)
        recs = r.records()
        return Outcome(isomaxinf_verify(recs, args.margin), {"final_path": r.trace[-1]["path"]}, recs, h)
    from .adversary.cac import cac_build, cac_verify

    cfg = parse_config(_read(args.config) if args.config else fx.CAC_CONFIG)
    h = _horizon(args, 500)
    r = cac_build(cfg.enums, h, fault=args.inject_fault)
    recs = r.records()
    return Outcome(cac_verify(recs), {"nodes": len(r.tree)}, recs, h)


def _load_trace(path: str) -> list[dict]:
    out = []
    for lineno, line in enumerate(_read(path).splitlines(), 1):
        if line.strip():
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: {exc.msg}") from None
    if not out:
        raise ParseError(f"{path} is empty")
    return out


def cmd_verify(args) -> Outcome:
    recs = _load_trace(args.trace)
    kind = recs[0].get("kind")
    if kind not in (None, args.construction):
        raise ParseError(f"trace is a {kind} run, not {args.construction}")
    try:
        if args.construction == "isomaxinf":
            from .adversary.isomaxinf_audit import isomaxinf_verify

            checks = isomaxinf_verify(recs, args.margin)
        else:
            from .adversary.cac import cac_verify

            checks = cac_verify(recs)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed trace record: {exc}") from None
    return Outcome(checks, horizon=recs[0].get("horizon"))


def cmd_report(args) -> Outcome:
    checks = []
    for path in args.reports:
        try:
            rep = json.loads(_read(path))
            for c in rep["checks"]:
                checks.append(Check(f"{rep['command']}:{c['name']}", c["status"],
                                    c.get("detail", ""), c.get("anchor", "")))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"{path}: not a report ({exc})") from None
    return Outcome(checks, {"reports": len(args.reports)})


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--horizon", type=int, help="last stage to run")
    common.add_argument("--seed", type=int, default=0, help="seed for random fixtures")
    common.add_argument("--margin", type=int, help="stability margin in stages")
    common.add_argument("--log", help="write per-stage records as JSON lines")
    common.add_argument("--report", help="write the JSON report here")

    p = argparse.ArgumentParser(prog="artifact", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", parents=[common], help="run a coding construction")
    b.add_argument("construction", choices=["staircase", "singlepath", "harden", "type3"])
    b.add_argument("--k", "--k-file", dest="k", help="K schedule ('stage <s> elem <x>' lines)")
    b.add_argument("--family", help="c.e. family schedule for type3")
    b.add_argument("--mode", choices=["extend-top", "insert-bottom"], default="extend-top")
    b.add_argument("--n-max", type=int, default=4)
    b.add_argument("--out", help="write the tree (treev1)")
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("embed", parents=[common], help="embedding queries")
    e.add_argument("action", choices=["find", "check", "kruskal"])
    e.add_argument("--src", help="treev1 file or a name like chain-5")
    e.add_argument("--dst")
    e.add_argument("--map", help="embedding file ('<src> -> <dst>' lines)")
    e.add_argument("--trees", nargs="*", help="tree sequence for kruskal")
    e.add_argument("--fixture", choices=["random", "chains", "star"], default="random")
    e.add_argument("--window", type=int)
    e.add_argument("--out", help="write the witness")
    e.set_defaults(func=cmd_embed)

    a = sub.add_parser("analyze", parents=[common], help="self-embeddings, decoding, chains")
    a.add_argument("action", choices=["selfembed", "decode", "cac"])
    a.add_argument("--type", type=int, choices=[1, 2, 3], default=1)
    a.add_argument("--k", "--k-file", dest="k")
    a.add_argument("--family")
    a.add_argument("--n-max", type=int, default=5)
    a.add_argument("--embedding", help="embedding file to decode")
    a.add_argument("--tree", help="treev1 file, or leafy / leafless")
    a.add_argument("--target", type=int, default=30)
    a.add_argument("--out", help="write the synthesized embedding")
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("adversary", parents=[common], help="run a priority construction")
    d.add_argument("construction", choices=["isomaxinf", "cac"])
    d.add_argument("--config", help="adversary config file")
    d.add_argument("--inject-fault", action="store_true", help="test-only protection breach")
    d.set_defaults(func=cmd_adversary)

    v = sub.add_parser("verify", parents=[common], help="audit a saved trace")
    v.add_argument("construction", choices=["isomaxinf", "cac"])
    v.add_argument("--trace", required=True)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", parents=[common], help="merge reports into one verdict")
    r.add_argument("reports", nargs="+")
    r.set_defaults(func=cmd_report)
    return p


def _inputs(args) -> dict:
    keys = ("construction", "action", "type", "k", "family", "src", "dst", "map", "trees", "fixture",
            "embedding", "tree", "target", "config", "trace", "reports", "seed", "margin", "inject_fault")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) not in (None, False)}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out: Outcome = args.func(args)
    except ParseError as exc:
        print(f"artifact: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArtifactError as exc:
        out = Outcome([Check("run", "fail", f"{type(exc).__name__}: {exc}", "")])
    horizon = out.horizon if out.horizon is not None else args.horizon
    report = {"command": " ".join(x for x in (args.command, getattr(args, "construction", None),
                                              getattr(args, "action", None)) if x),
              "inputs": _inputs(args), "horizon": horizon, "checks": as_dicts(out.checks),
              "result": out.result}
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    if args.report:
        Path(args.report).write_text(text + "\n")
    if args.log and out.log is not None:
        with open(args.log, "w") as fh:
            for rec in out.log:
                fh.write(json.dumps(rec, sort_keys=True, default=str) + "\n")
    for c in out.checks:
        print(f"{c.status.upper():4}  {c.name}  {c.detail}")
    if out.result:
        print(json.dumps(out.result, sort_keys=True, default=str))
    return EXIT_OK if all_pass(out.checks) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
