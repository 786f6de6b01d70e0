"""Command-line interface.

Exit codes: 0 success, 1 validation error (bad documents, malformed models,
out-of-range parameters), 2 runtime error (impossible evidence, internal
failures). Set HEISENBN_STRICT=0 to parse documents permissively (unknown
keys ignored). Commands that use randomness honor --seed; every shipped
command is deterministic.
"""

from __future__ import annotations

import argparse
import pathlib
import sys

from . import io
from .calibrate import Priors, fit_parameters
from .defect import (
    DEFAULT_PARAMS,
    DEFECTS_FOUND,
    FIELD_DEFECTS,
    build_defect_network,
    diagnose_from_verification,
    predict_defects,
)
from .errors import HeisenbnError, InferenceError, ValidationError
from .faulttree import compile_fault_tree, posterior_cause_ranking, top_event_probability
from .inference import query_posteriors
from .network import Soft
from .sensitivity import tornado_analysis


def _read(path: str) -> str:
    p = pathlib.Path(path)
    if not p.exists():
        raise ValidationError(f"no such file: {path}")
    return p.read_text("utf-8")


def _write(path: str, text: str) -> None:
    pathlib.Path(path).write_text(text, "utf-8")


def _print(text: str) -> None:
    sys.stdout.write(text)


def _load_params(path: str | None):
    return io.parse_params(_read(path)) if path else DEFAULT_PARAMS


def _apply_horizon(scenario, horizon):
    if horizon is None:
        return scenario
    import dataclasses
    return dataclasses.replace(scenario, horizon_months=horizon)


def _posterior_table(report) -> str:
    lines = []
    for nid in sorted(report.entries):
        post = report.entries[nid]
        lines.append(f"node: {nid}")
        width = max(len(s) for s in post.states)
        for state, prob in zip(post.states, post.probs):
            lines.append(f"  {state:<{width}}  {float(prob):.6f}")
        if post.mean is not None:
            lines.append(f"  mean {post.mean:.6g}  variance {post.variance:.6g}")
        lines.append("")
    return "\n".join(lines)


def cmd_validate(args) -> int:
    io.parse_model(_read(args.model))
    print(f"{args.model}: valid")
    return 0


def cmd_infer(args) -> int:
    net = io.parse_model(_read(args.model))
    ev = io.parse_evidence(_read(args.evidence), net) if args.evidence else \
        io.parse_evidence("{}", net)
    report = query_posteriors(net, ev, args.target)
    if args.format == "table":
        _print(_posterior_table(report))
    else:
        _print(io.canonical_json(io.posterior_report_obj(report)))
    return 0


def cmd_predict(args) -> int:
    scenario = _apply_horizon(io.parse_scenario(_read(args.scenario)),
                              args.horizon_months)
    report = predict_defects(scenario, _load_params(args.params))
    _print(io.canonical_json(io.posterior_report_obj(report)))
    return 0


def cmd_diagnose(args) -> int:
    scenario = _apply_horizon(io.parse_scenario(_read(args.scenario)),
                              args.horizon_months)
    report = diagnose_from_verification(scenario, _load_params(args.params), args.found)
    _print(io.canonical_json(io.posterior_report_obj(report)))
    return 0


def cmd_sensitivity(args) -> int:
    net = io.parse_model(_read(args.model))
    ev = io.parse_evidence(_read(args.evidence), net) if args.evidence else \
        io.parse_evidence("{}", net)
    if args.inputs:
        inputs = [s for s in args.inputs.split(",") if s]
    else:
        inputs = [nid for nid in sorted(net.node_ids)
                  if nid != args.target and not net.parents(nid)]
    result = tornado_analysis(net, ev, args.target, inputs)
    _print(io.canonical_json(io.sensitivity_obj(result)))
    return 0


def cmd_calibrate(args) -> int:
    records = io.parse_records(_read(args.records))
    priors = io.parse_priors(_read(args.priors)) if args.priors else Priors()
    init = _load_params(args.init)
    fitted, report = fit_parameters(records, priors, init)
    _write(args.out, io.serialize_params(fitted))
    _print(io.canonical_json(io.fit_report_obj(report)))
    return 0


def cmd_template(args) -> int:
    scenario = _apply_horizon(io.parse_scenario(_read(args.scenario)),
                              args.horizon_months)
    net, ev = build_defect_network(scenario, _load_params(args.params))
    _write(args.out, io.serialize_model(net))
    if args.evidence_out:
        _write(args.evidence_out, io.serialize_evidence(ev, net))
    print(f"wrote {args.out}")
    return 0


def cmd_ft2bn(args) -> int:
    ft = io.parse_fault_tree_doc(_read(args.fault_tree))
    _write(args.out, io.serialize_model(compile_fault_tree(ft)))
    print(f"wrote {args.out}")
    return 0


def cmd_ft_top(args) -> int:
    ft = io.parse_fault_tree_doc(_read(args.fault_tree))
    p = top_event_probability(ft)
    _print(io.canonical_json({"top": ft.top, "probability": float(p)}))
    return 0


def cmd_ft_diagnose(args) -> int:
    ft = io.parse_fault_tree_doc(_read(args.fault_tree))
    parts = args.top_soft.split(",")
    if len(parts) != 2:
        raise ValidationError("--top-soft takes two weights: false,true")
    try:
        weights = (float(parts[0]), float(parts[1]))
    except ValueError:
        raise ValidationError(f"--top-soft weights must be numbers, got {args.top_soft!r}")
    ranking = posterior_cause_ranking(ft, Soft(weights))
    _print(io.canonical_json(io.cause_ranking_obj(ft.top, ranking)))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    app = create_app(snapshot_path=args.snapshot, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heisenbn",
        description="Bayesian-network toolkit for software defect prediction "
                    "and fault-tree analysis.")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for commands that use randomness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a model document")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("infer", help="posterior marginals given evidence")
    p.add_argument("model")
    p.add_argument("--evidence")
    p.add_argument("--target", nargs="+", required=True)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("predict", help="forward defect prediction for a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--params")
    p.add_argument("--horizon-months", type=int, default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("diagnose", help="backward pass from an observed found count")
    p.add_argument("--scenario", required=True)
    p.add_argument("--params")
    p.add_argument("--found", type=int, required=True)
    p.add_argument("--horizon-months", type=int, default=None)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("sensitivity", help="tornado sweeps and mutual information")
    p.add_argument("model")
    p.add_argument("--evidence")
    p.add_argument("--target", required=True)
    p.add_argument("--inputs", help="comma-separated input node ids "
                                    "(default: every root node)")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("calibrate", help="fit parameters to project records")
    p.add_argument("--records", required=True)
    p.add_argument("--priors")
    p.add_argument("--init", help="initial params document (default: built-ins)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("template", help="emit the defect-template network for a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--params")
    p.add_argument("--horizon-months", type=int, default=None)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--evidence-out")
    p.set_defaults(func=cmd_template)

    p = sub.add_parser("ft2bn", help="compile a fault tree to a model document")
    p.add_argument("fault_tree")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_ft2bn)

    p = sub.add_parser("ft-top", help="top-event probability of a fault tree")
    p.add_argument("fault_tree")
    p.set_defaults(func=cmd_ft_top)

    p = sub.add_parser("ft-diagnose", help="cause ranking given soft top-event evidence")
    p.add_argument("fault_tree")
    p.add_argument("--top-soft", required=True,
                   help="likelihood weights for the top node as false,true")
    p.set_defaults(func=cmd_ft_diagnose)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--snapshot", help="persist sessions to this file on shutdown")
    p.add_argument("--ui", help="also serve a built frontend directory at /ui")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InferenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HeisenbnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
