"""Command-line front end; every command prints one JSON document on stdout.

Exit status: 0 for a decided computation (whatever the answer), 2 for bad
input, 3 when a bounded search is exhausted.
"""

from __future__ import annotations

import argparse
import sys

from . import constructions as cons
from . import greens, kernels, relcore
from .errors import ClosureError, InputError, MissingOperationError, PreconditionError
from .jsonio import (dumps, load_env, load_graph, load_group, load_injection, load_pgroup,
                     load_relation, load_representation, load_structure)
from .pgroups import (canonical_homotopy, check_H_embedding, embed_into_group, group_homotopy,
                      validate)
from .structures import search_representation, verify_representation
from .terms import eval_concrete, parse_term, signature

EXIT_OK, EXIT_INPUT, EXIT_EXHAUSTED = 0, 2, 3


class Outcome:
    def __init__(self, payload: dict, summary: str, code: int = EXIT_OK):
        self.payload, self.summary, self.code = payload, summary, code


def _relation_json(r) -> dict:
    return r.to_json()


# rel ------------------------------------------------------------------------------------------

def cmd_rel_eval(args):
    env = load_env(args.env) if args.env else {}
    try:
        term = parse_term(args.term)
    except (ValueError, KeyError) as exc:
        raise InputError(str(exc), field="--term") from None
    try:
        r = eval_concrete(term, env, n=args.n)
    except KeyError as exc:
        raise InputError(str(exc.args[0]) if exc.args else "unbound variable", path=args.env, field="--term") from None
    except ValueError as exc:
        raise InputError(str(exc), path=args.env, field="--term") from None
    return Outcome({"verdict": "ok", "result": _relation_json(r)}, f"{len(r)} pairs on base {r.n}")


def cmd_rel_check(args):
    s = load_structure(args.structure)
    cand = load_representation(args.rep, s)
    sig = signature(args.signature) if args.signature else None
    v = verify_representation(cand, sig)
    return Outcome(v.to_json(), f"representation {v.status}")


def cmd_rel_search(args):
    s = load_structure(args.structure)
    gens = args.generators.split(",") if args.generators else None
    try:
        res = search_representation(s, args.max_base, gens)
    except KeyError as exc:
        raise InputError(str(exc), field="--generators") from None
    if res.found:
        cand = res.witness
        return Outcome({"verdict": "found", "result": cand.to_json()}, f"found on base {cand.base_size}")
    return Outcome({"verdict": "none_up_to", "bound": res.bound}, f"no representation up to base {res.bound}",
                   EXIT_EXHAUSTED)


# construct ---------------------------------------------------------------------------------------

def cmd_construct(args):
    kind = args.kind
    if kind in ("e0", "e1", "e2"):
        p = load_pgroup(args.pgroup)
        if kind == "e0":
            s = cons.build_E0(p)
            return Outcome({"verdict": "ok", "result": s.to_json()}, f"E0 with {len(s)} elements")
        if kind == "e1":
            s = cons.build_E1(p, literal=args.literal)
        else:
            s = cons.build_E2(p, strict=args.compat_strict_e2)
        out = {
            "verdict": "ok",
            "variant": s.variant,
            "mode": "literal" if s.literal else "strict" if s.strict else "default",
            "size": len(s),
            "carrier_counts": s.carrier_counts(),
            "signature": s.signature.to_json(),
        }
        if args.export_tables:
            try:
                out["result"] = s.to_json()
            except ClosureError as exc:
                out["verdict"] = "not closed"
                out["notes"] = [str(exc)]
            except ValueError as exc:
                raise InputError(str(exc), field="--export-tables") from None
        return Outcome(out, f"{s.variant} with {len(s)} elements")
    g = load_group(args.group)
    if kind == "b3":
        s = cons.build_B3(g)
        return Outcome({"verdict": "ok", "result": s.to_json()}, f"B3 with {len(s)} elements")
    if kind == "theta":
        cand = cons.build_theta(g)
        v = verify_representation(cand)
        return Outcome({"verdict": v.status, "violations": v.violations, "result": cand.to_json()},
                       f"theta over base {cand.base_size}: {v.status}")
    # theta-plus
    if not args.pgroup or not args.injection:
        raise InputError("theta-plus needs --pgroup and --injection", field="--pgroup")
    p = load_pgroup(args.pgroup)
    inj = load_injection(args.injection, p, g)
    e1 = cons.build_E1(p, literal=args.literal)
    cand = cons.build_theta_plus(p, g, inj, e1)
    v = verify_representation(cand, signature("complement-compose"))
    out = {
        "verdict": v.status,
        "violations": v.violations,
        "notes": v.notes,
        "base": cand.base_size,
        "size": len(e1),
        "group_replaced": cand.meta["group_replaced"],
        "group_order": len(cand.meta["group"]),
        "mode": "literal" if args.literal else "default",
    }
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dumps(cand.to_json()))
    return Outcome(out, f"theta-plus over base {cand.base_size}: {v.status}")


# pgroup --------------------------------------------------------------------------------------------

def cmd_pgroup_validate(args):
    v = validate(load_pgroup(args.pgroup))
    return Outcome(v.to_json(), f"partial group {v.status}")


def cmd_pgroup_embed(args):
    p = load_pgroup(args.pgroup)
    res = embed_into_group(p, args.max_order)
    if res.found:
        return Outcome({"verdict": "found", "order": res.stats["order"], "result": res.witness.to_json(p)},
                       f"embeds into a group of order {res.stats['order']}")
    return Outcome({"verdict": "none_up_to", "bound": res.bound}, f"no group up to order {res.bound}", EXIT_EXHAUSTED)


def cmd_pgroup_homotopy(args):
    p = load_pgroup(args.pgroup)
    if args.group:
        g = load_group(args.group)
        if not args.injection:
            raise InputError("--group needs --injection", field="--injection")
        h = group_homotopy(p, g, load_injection(args.injection, p, g))
        target = "B3"
    else:
        h = canonical_homotopy(p)
        target = "E0"
    v = check_H_embedding(h, greens.greens_classify(h.target))
    out = {"verdict": v.status, "violations": v.violations, "target": target, "result": h.to_json()}
    return Outcome(out, f"homotopy into {target}: H-embedding {v.status}")


# greens ---------------------------------------------------------------------------------------------

def cmd_greens_classify(args):
    s = load_structure(args.structure)
    if not s.has_op("compose"):
        raise InputError("structure has no compose table", path=args.structure, field="tables")
    c = greens.greens_classify(s)
    return Outcome({"verdict": "ok", **c.to_json(s.carrier)},
                   f"{len(c.classes('L'))} L-, {len(c.classes('R'))} R-, {len(c.classes('H'))} H-classes")


def cmd_greens_rel(args):
    if not 1 <= args.n <= 3:
        raise InputError("base size must be 1, 2 or 3", field="--n")
    t = greens.rel_semigroup_table(args.n)
    c = greens.greens_classify(t)
    names = [str(sorted(relcore.Relation.from_code(args.n, x).pairs())) for x in range(len(t))]
    out = {"verdict": "ok", "n": args.n, "size": len(t), **c.to_json(names)}
    return Outcome(out, f"Rel({args.n}): {len(c.classes('H'))} H-classes")


# kernel --------------------------------------------------------------------------------------------

def cmd_kernel_decide(args):
    d = kernels.is_kernel(load_relation(args.relation))
    out = {"verdict": d.verdict}
    if d.answer:
        out["witness"] = [list(p) for p in sorted(d.witness.pairs())]
    else:
        out["reason"] = d.reason
    return Outcome(out, f"kernel: {d.verdict}")


def cmd_kernel_witness(args):
    r = load_relation(args.relation)
    if args.witness:
        s = load_relation(args.witness)
        if s.n != r.n:
            raise InputError("witness base differs from relation base", path=args.witness, field="n")
        ok = kernels.kernel_witness_check(r, s)
        return Outcome({"verdict": "ok" if ok else "violated"}, f"witness check: {ok}")
    d = kernels.is_kernel(r)
    out = {"verdict": d.verdict}
    if d.answer:
        out["result"] = d.witness.to_json()
        out["cliques"] = d.cliques
    return Outcome(out, f"kernel: {d.verdict}")


def cmd_kernel_lemma(args):
    rep = kernels.lemma_condition_check(load_relation(args.relation))
    return Outcome({"verdict": "ok", **rep},
                   f"edge-only condition {rep['edge_condition_met']}, kernel {rep['is_kernel_result']}")


def cmd_kernel_reduce(args):
    g = load_graph(args.graph)
    try:
        r = kernels.cec_reduce(g, args.k)
    except ValueError as exc:
        raise InputError(str(exc), field="--k") from None
    return Outcome({"verdict": "ok", "result": r.to_json()}, f"kernel instance on base {r.n}")


def cmd_kernel_cover(args):
    size, cover = kernels.min_clique_edge_cover(load_graph(args.graph))
    return Outcome({"verdict": "ok", "size": size, "cliques": cover.cliques}, f"minimum clique edge cover {size}")


# parser ---------------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine output only (no summary line on stderr)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="accepted for compatibility; computations run single-threaded")
    common.add_argument("--compat-strict-e2", action="store_true", default=argparse.SUPPRESS,
                        help="strict reading of the E2 composition table")

    parser = argparse.ArgumentParser(prog="relkit", parents=[common],
                                     description="Binary relations, relation-algebra reducts and the kernel problem.")
    groups = parser.add_subparsers(dest="group", required=True)

    def sub(group, name, func, help_text):
        sp = group.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
        return sp

    rel = groups.add_parser("rel", help="relations and representations").add_subparsers(dest="cmd", required=True)
    sp = sub(rel, "eval", cmd_rel_eval, "evaluate a term on concrete relations")
    sp.add_argument("--term", required=True)
    sp.add_argument("--env")
    sp.add_argument("--n", type=int, help="base size when the term has no variables")
    sp = sub(rel, "check-rep", cmd_rel_check, "verify a representation")
    sp.add_argument("--structure", required=True)
    sp.add_argument("--rep", required=True)
    sp.add_argument("--signature", help="preset or comma list; default the structure's own")
    sp = sub(rel, "search-rep", cmd_rel_search, "bounded representation search")
    sp.add_argument("--structure", required=True)
    sp.add_argument("--max-base", type=int, required=True)
    sp.add_argument("--generators")

    con = groups.add_parser("construct", help="reduction structures").add_subparsers(dest="cmd", required=True)
    for kind in ("e0", "e1", "e2", "b3", "theta", "theta-plus"):
        sp = sub(con, kind, cmd_construct, f"build {kind}")
        sp.set_defaults(kind=kind, export_tables=False, literal=False, pgroup=None, injection=None, out=None)
        if kind in ("e0", "e1", "e2", "theta-plus"):
            sp.add_argument("--pgroup", required=kind != "theta-plus")
        if kind in ("e1", "e2"):
            sp.add_argument("--export-tables", action="store_true")
        if kind in ("e1", "theta-plus"):
            sp.add_argument("--literal", action="store_true", help="unrestricted barred composition rule")
        if kind in ("b3", "theta", "theta-plus"):
            sp.add_argument("--group", required=True)
        if kind == "theta-plus":
            sp.add_argument("--injection")
            sp.add_argument("--out", help="write the full representation here")

    pg = groups.add_parser("pgroup", help="square partial groups").add_subparsers(dest="cmd", required=True)
    sp = sub(pg, "validate", cmd_pgroup_validate, "check the partial group conditions")
    sp.add_argument("--pgroup", required=True)
    sp = sub(pg, "embed", cmd_pgroup_embed, "bounded completion to a finite group")
    sp.add_argument("--pgroup", required=True)
    sp.add_argument("--max-order", type=int, required=True)
    sp = sub(pg, "homotopy", cmd_pgroup_homotopy, "canonical homotopy and H-embedding check")
    sp.add_argument("--pgroup", required=True)
    sp.add_argument("--group")
    sp.add_argument("--injection")

    gr = groups.add_parser("greens", help="Green's relations").add_subparsers(dest="cmd", required=True)
    sp = sub(gr, "classify", cmd_greens_classify, "classify a structure's compose table")
    sp.add_argument("--structure", required=True)
    sp = sub(gr, "relsemigroup", cmd_greens_rel, "classify Rel(X) for |X| <= 3")
    sp.add_argument("--n", type=int, required=True)

    kn = groups.add_parser("kernel", help="the kernel problem").add_subparsers(dest="cmd", required=True)
    for name, func in (("decide", cmd_kernel_decide), ("witness", cmd_kernel_witness), ("lemma-report", cmd_kernel_lemma)):
        sp = sub(kn, name, func, f"kernel {name}")
        sp.add_argument("--relation", required=True)
        if name == "witness":
            sp.add_argument("--witness", help="check this witness instead of constructing one")
    sp = sub(kn, "reduce-cec", cmd_kernel_reduce, "clique edge cover to kernel instance")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp = sub(kn, "cover", cmd_kernel_cover, "exact minimum clique edge cover")
    sp.add_argument("--graph", required=True)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    for flag, default in (("json", False), ("threads", 1), ("compat_strict_e2", False)):
        if not hasattr(args, flag):
            setattr(args, flag, default)
    try:
        outcome = args.func(args)
    except InputError as exc:
        stdout.write(dumps({"verdict": "input_error", "error": str(exc),
                            "path": str(exc.path) if exc.path else None, "field": exc.field}))
        stderr.write(f"relkit: {exc}\n")
        return EXIT_INPUT
    except (PreconditionError, MissingOperationError) as exc:
        stdout.write(dumps({"verdict": "input_error", "error": str(exc), "path": None, "field": None}))
        stderr.write(f"relkit: {exc}\n")
        return EXIT_INPUT
    stdout.write(dumps(outcome.payload))
    if not args.json:
        stderr.write(outcome.summary + "\n")
    return outcome.code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
