"""Command-line interface: solve, explain, bench, verify-iis, serve.

Exit codes: 0 success; 1 failed verification or pipeline error; 2 usage or
missing file; 3 parse error; 4 timeout; 5 infeasible main problem.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .bench import builtin_corpus, emit_report, run_suite
from .errors import ExmipError, FormatError, SolveTimeout
from .iis import verify_iis
from .model import parse_model, write_model
from .queries import ExtendedCase, Query, explain
from .rcpsp import RcpspContext, build_rcpsp_context, parse_psplib, start_time
from .reasons import graph_to_dict, serialize
from .solver import MilpStatus, solve_milp
from .wdp import WdpContext, build_wdp_context, parse_cats

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_TIMEOUT = 4
EXIT_INFEASIBLE = 5

_EXTENSIONS = {".sm": "psplib", ".cats": "cats", ".model": "canonical", ".txt": "canonical"}


def _infer_family(path: str, family: str | None) -> str:
    if family:
        return family
    ext = os.path.splitext(path)[1].lower()
    if ext in _EXTENSIONS:
        return _EXTENSIONS[ext]
    raise FormatError(f"cannot infer family from {path!r}; pass --family")


def _load_context(path: str, family: str | None):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    name = os.path.splitext(os.path.basename(path))[0]
    family = _infer_family(path, family)
    if family == "psplib":
        return build_rcpsp_context(parse_psplib(text, name=name)), family
    if family == "cats":
        return build_wdp_context(parse_cats(text, name=name)), family
    if family == "canonical":
        return parse_model(text), family
    raise FormatError(f"unknown family {family!r}; expected psplib, cats, or canonical")


def _solution_lines(ctx, assignment) -> list[str]:
    if isinstance(ctx, RcpspContext):
        completions = ctx.decode_completions(assignment)
        lines = [f"{'activity':>9} {'start':>6} {'completion':>11} {'predecessors':>14}"]
        for a in ctx.instance.activities:
            preds = ",".join(str(h) for h in sorted(ctx.instance.predecessors(a.id))) or "-"
            lines.append(
                f"{a.id:>9} {start_time(a, completions[a.id]):>6} "
                f"{completions[a.id]:>11} {preds:>14}"
            )
        return lines
    if isinstance(ctx, WdpContext):
        selected = set(ctx.decode_selection(assignment))
        lines = [f"{'bid':>4} {'price':>8} {'selected':>9}  goods"]
        for b in ctx.instance.bids:
            mark = "yes" if b.id in selected else "no"
            lines.append(
                f"{b.id:>4} {b.price:>8g} {mark:>9}  {','.join(map(str, sorted(b.goods)))}"
            )
        return lines
    return [f"{v.name} = {assignment[v.id]:g}" for v in ctx.variables]


def cmd_solve(args) -> int:
    loaded, family = _load_context(args.path, args.family)
    if family == "canonical":
        ctx, model = loaded, loaded
    else:
        ctx, model = loaded, loaded.model
    result = solve_milp(model, time_limit=args.time_limit)
    if result.status is MilpStatus.TIMEOUT:
        print("timeout: no proven optimum", file=sys.stderr)
        return EXIT_TIMEOUT
    if result.status is MilpStatus.INFEASIBLE:
        print("main problem infeasible", file=sys.stderr)
        return EXIT_INFEASIBLE
    if args.json:
        print(json.dumps({"f_star": result.objective, "assignment": list(result.assignment.values)}))
    else:
        print(f"f* = {result.objective:g}")
        for line in _solution_lines(ctx, result.assignment):
            print(line)
    return EXIT_OK


def cmd_explain(args) -> int:
    loaded, family = _load_context(args.path, args.family)
    if family == "canonical":
        print("explain requires a psplib or cats instance", file=sys.stderr)
        return EXIT_USAGE
    ctx = loaded
    try:
        query = Query.from_json(json.loads(args.query))
    except json.JSONDecodeError as exc:
        print(f"query is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_USAGE
    solve_result = solve_milp(ctx.model, time_limit=args.time_limit)
    if solve_result.status is MilpStatus.TIMEOUT:
        print("timeout while solving the main problem", file=sys.stderr)
        return EXIT_TIMEOUT
    if solve_result.status is MilpStatus.INFEASIBLE:
        print("main problem infeasible", file=sys.stderr)
        return EXIT_INFEASIBLE

    result = explain(ctx, solve_result.objective, query,
                     algorithm=args.algo, time_limit=args.time_limit)
    if args.out:
        artifact = {
            "instance": os.path.basename(args.path),
            "family": family,
            "f_star": solve_result.objective,
            "query": query.to_json(),
            "case": result.case.value,
            "asp_model": write_model(result.asp.model),
        }
        if result.iis is not None:
            artifact["iis"] = {
                "algorithm": result.iis.algorithm,
                "constraint_ids": list(result.iis.constraint_ids),
                "size": len(result.iis),
                "oracle_calls": result.iis.stats.oracle_calls,
                "wall_time": result.iis.stats.wall_time,
            }
            artifact["graph"] = graph_to_dict(result.graph)
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(artifact, fh, indent=2, sort_keys=True)

    if result.case is ExtendedCase.OPTIMALITY:
        payload = {
            "case": "optimality",
            "message": result.notice.message,
            "f_star": result.notice.f_star,
            "witness": list(result.notice.witness.values),
        }
        print(json.dumps(payload, indent=2))
        return EXIT_OK
    if args.format == "dot":
        sys.stdout.write(serialize(result.graph, "dot").decode())
    else:
        payload = {
            "case": result.case.value,
            "extended_objective": result.extended_objective,
            "graph": graph_to_dict(result.graph),
            "iis": {
                "algorithm": result.iis.algorithm,
                "constraint_ids": list(result.iis.constraint_ids),
                "size": len(result.iis),
                "oracle_calls": result.iis.stats.oracle_calls,
            },
        }
        print(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_bench(args) -> int:
    problems = builtin_corpus(seed=args.seed)
    if args.families:
        wanted = set(args.families.split(","))
        problems = [p for p in problems if p.family in wanted]
    if args.instances:
        wanted = set(args.instances.split(","))
        problems = [p for p in problems if p.instance_id in wanted]
    kinds = None
    if args.kinds:
        wanted = tuple(args.kinds.split(","))
        kinds = {
            "rcpsp": tuple(k for k in wanted if k.startswith("Q")),
            "wdp": tuple(k for k in wanted if k.startswith("W")),
        }
    algorithms = tuple(args.algos.split(","))
    records = run_suite(
        problems, kinds=kinds, algorithms=algorithms,
        time_limit=args.time_limit, seed=args.seed, verify=args.verify,
    )
    csv_text, summary = emit_report(records, out_dir=args.out)
    print(summary)
    if args.out:
        print(f"wrote {os.path.join(args.out, 'records.csv')}")
    failures = [r for r in records if r.error and r.outcome == "error"]
    audit_failures = [r for r in records if r.error.startswith("iis-audit-failed")]
    if audit_failures:
        print(f"{len(audit_failures)} IIS audits FAILED", file=sys.stderr)
        return EXIT_FAIL
    if failures:
        print(f"{len(failures)} records errored", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify_iis(args) -> int:
    with open(args.artifact, encoding="utf-8") as fh:
        doc = json.load(fh)
    if "asp_model" not in doc or "iis" not in doc:
        print("artifact lacks asp_model/iis fields", file=sys.stderr)
        return EXIT_USAGE
    model = parse_model(doc["asp_model"])
    audit = verify_iis(model, tuple(doc["iis"]["constraint_ids"]))
    print(
        json.dumps(
            {
                "valid": audit.valid,
                "whole_infeasible": audit.whole_infeasible,
                "redundant_ids": list(audit.redundant_ids),
                "oracle_calls": audit.oracle_calls,
            },
            indent=2,
        )
    )
    return EXIT_OK if audit.valid else EXIT_FAIL


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir, max_workers=args.workers, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exmip",
        description="Contrastive explanations for MILP solutions via IIS extraction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance and print the optimum")
    p.add_argument("path")
    p.add_argument("--family", choices=("psplib", "cats", "canonical"))
    p.add_argument("--time-limit", type=float, default=120.0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("explain", help="answer a contrastive query about the optimum")
    p.add_argument("path")
    p.add_argument("--family", choices=("psplib", "cats", "canonical"))
    p.add_argument("--query", required=True, help='JSON, e.g. \'{"kind":"W2","bid":3}\'')
    p.add_argument("--algo", choices=("deletion", "additive", "smallest"), default="deletion")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--time-limit", type=float, default=120.0)
    p.add_argument("--out", help="write a self-contained artifact JSON here")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("bench", help="run the benchmark suite over the built-in corpus")
    p.add_argument("--families", help="comma list: rcpsp,wdp")
    p.add_argument("--instances", help="comma list of instance ids")
    p.add_argument("--kinds", help="comma list of query kinds")
    p.add_argument("--algos", default="deletion,additive,smallest")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-limit", type=float, default=120.0)
    p.add_argument("--verify", action="store_true", help="audit every IIS (leave-one-out)")
    p.add_argument("--out", help="directory for records.csv and summary.txt")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify-iis", help="re-audit a stored explanation artifact")
    p.add_argument("artifact")
    p.set_defaults(func=cmd_verify_iis)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=int(os.environ.get("EXMIP_PORT", "8080")))
    p.add_argument("--data-dir", default=os.environ.get("EXMIP_DATA_DIR"))
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--ui-dir", default=None, help="serve a built explorer UI from this directory")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"file not found: {exc.filename}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SolveTimeout as exc:
        print(f"timeout: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    except ExmipError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
