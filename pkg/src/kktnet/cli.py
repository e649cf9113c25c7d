"""Command-line interface.

Exit codes: 0 conditions satisfied or command succeeded, 2 violated,
3 degenerate, 1 usage or I/O error.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .deviation import LossMode, classify, compute_residuals
from .errors import DegenerateProfile, KKTNetError
from .fileio import Report, load_dataset, load_params, params_to_dict, save_params
from .fuzz import random_instance
from .kkt import Status, assemble_kkt_residual, check, multipliers_from_witness
from .model import evaluate, get_activation
from .solver import Grid, bisect_uniform_no_hidden, brute_force_oracle, grad_check

EXIT_CODES = {"ok": 0, Status.SATISFIED.value: 0, Status.VIOLATED.value: 2, Status.DEGENERATE.value: 3}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def exit_code(report: Report) -> int:
    return EXIT_CODES[report.status]


def _verdict_certificate(verdict) -> dict | None:
    cert = {}
    if verdict.witness is not None:
        w = verdict.witness
        if hasattr(w, "lamhat"):
            cert["lamhat"] = [[i, v] for i, v in w.lamhat.items()]
            cert["muhat"] = [[i, v] for i, v in w.muhat.items()]
            cert["split"] = w.split
            cert["point"] = w.point
        else:
            cert["t"] = [[i, v] for i, v in w.t.items()]
    if verdict.separation is not None:
        sep = verdict.separation
        cert["separation"] = {"a": sep.a, "b": sep.b, "delta": sep.delta}
    if verdict.target is not None:
        cert["s"] = verdict.target
    return cert or None


def _load_model(args):
    params, act = load_params(args.params)
    if args.activation:
        act = get_activation(args.activation)
    return params, act


def cmd_eval(args) -> Report:
    params, act = _load_model(args)
    data = load_dataset(args.data)
    values = evaluate(params, act, data.points)
    return Report("eval", "ok", result={"values": values})


def cmd_residuals(args) -> Report:
    params, act = _load_model(args)
    data = load_dataset(args.data)
    mode = LossMode.parse(args.loss)
    profile = compute_residuals(params, act, data)
    summary = {"z_max": profile.z_max, "l1_total": profile.l1_total}
    result = {"residuals": profile.residuals}
    try:
        cls = classify(profile, mode, args.tol)
    except DegenerateProfile:
        return Report("residuals", Status.DEGENERATE.value, result=result, classification=summary)
    summary.update(cls.summary())
    return Report("residuals", "ok", result=result, classification=summary)


def cmd_check(args) -> Report:
    params, act = _load_model(args)
    data = load_dataset(args.data)
    mode = LossMode.parse(args.loss)
    profile = compute_residuals(params, act, data)
    summary = {"z_max": profile.z_max, "l1_total": profile.l1_total}
    try:
        verdict = check(params, act, data, mode, args.tol, args.condition)
    except DegenerateProfile:
        return Report("check", Status.DEGENERATE.value, classification=summary,
                      config={"loss": mode.value, "condition": args.condition})
    summary.update(verdict.classification.summary())
    norm = None
    if verdict.satisfied:
        mult = multipliers_from_witness(verdict)
        _, norm = assemble_kkt_residual(params, act, data, verdict.classification, mult)
    return Report(
        "check",
        verdict.status.value,
        result={"residual_norm": verdict.residual_norm},
        classification=summary,
        certificate=_verdict_certificate(verdict),
        kkt_residual_norm=norm,
        config={"loss": mode.value, "condition": args.condition},
    )


def cmd_solve_bisect(args) -> Report:
    data = load_dataset(args.data)
    act = get_activation(args.activation or "sigmoid")
    params, z_star = bisect_uniform_no_hidden(data, act, args.eps)
    if args.params_out:
        save_params(params, act, args.params_out)
    return Report("solve-bisect", "ok",
                  result={"z_star": z_star, "params": params_to_dict(params, act)},
                  config={"eps": args.eps})


def cmd_grad_check(args) -> Report:
    params, act = _load_model(args)
    data = load_dataset(args.data)
    rep = grad_check(params, act, data, args.h)
    status = "ok" if rep.ok else Status.VIOLATED.value
    return Report("grad-check", status, result={
        "max_rel_err": rep.max_rel_err, "worst_point": rep.worst_point,
        "worst_param": rep.worst_param, "threshold": rep.threshold, "h": rep.h,
    })


def _parse_grid(text: str) -> Grid:
    try:
        lo, hi, res = text.split(",")
        return Grid(float(lo), float(hi), int(res))
    except ValueError:
        raise UsageError(f"--grid expects LO,HI,RESOLUTION, got {text!r}") from None


def cmd_oracle(args) -> Report:
    data = load_dataset(args.data)
    act = get_activation(args.activation or "sigmoid")
    grid = _parse_grid(args.grid)
    params, value = brute_force_oracle(data, act, args.loss, args.arch, grid, n_units=args.units)
    return Report("oracle", "ok",
                  result={"loss": value, "params": params_to_dict(params, act)},
                  config={"loss": LossMode.parse(args.loss).value, "grid": args.grid, "arch": args.arch})


def cmd_fuzz(args) -> Report:
    rng = np.random.default_rng(args.seed)
    mode = LossMode.parse(args.loss)
    counts = {s.value: 0 for s in Status}
    worst = 0.0
    for _ in range(args.count):
        params, act, data = random_instance(rng, mode)
        try:
            verdict = check(params, act, data, mode, args.tol, args.condition)
        except DegenerateProfile:
            counts[Status.DEGENERATE.value] += 1
            continue
        counts[verdict.status.value] += 1
        if verdict.satisfied:
            mult = multipliers_from_witness(verdict)
            worst = max(worst, assemble_kkt_residual(params, act, data, verdict.classification, mult)[1])
    return Report("fuzz", "ok", result={"counts": counts, "max_kkt_residual": worst},
                  config={"seed": args.seed, "count": args.count, "loss": mode.value})


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kktnet", description="KKT optimality checks for shallow network approximation")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, data=True, params=True):
        if data:
            p.add_argument("--data", required=True, help="CSV dataset with header t1,...,td,f")
        if params:
            p.add_argument("--params", required=True, help="JSON network parameters")
        p.add_argument("--activation", choices=["sigmoid", "tanh", "softplus"], help="override the activation")
        p.add_argument("--out", help="write the JSON report here")
        p.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")

    p = sub.add_parser("eval", help="model values at the dataset points")
    common(p)
    p.set_defaults(func=cmd_eval)

    for name, func, help_text in (
        ("residuals", cmd_residuals, "deviation profile and point classification"),
        ("check", cmd_check, "decide the necessary optimality condition"),
    ):
        p = sub.add_parser(name, help=help_text)
        common(p)
        p.add_argument("--loss", default="uniform", choices=["uniform", "l1", "manhattan"])
        p.add_argument("--tol", type=float, help="classification tolerance")
        if name == "check":
            p.add_argument("--condition", default="kkt", choices=["kkt", "hull"],
                           help="uniform only: stationarity (kkt) or equal-split hull test")
        p.set_defaults(func=func)

    p = sub.add_parser("solve-bisect", help="uniform no-hidden-layer fit by bisection")
    common(p, params=False)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--params-out", help="write the fitted parameters as JSON")
    p.set_defaults(func=cmd_solve_bisect)

    p = sub.add_parser("grad-check", help="analytic vs finite-difference parameter gradients")
    common(p)
    p.add_argument("--h", type=float, default=1e-5)
    p.set_defaults(func=cmd_grad_check)

    p = sub.add_parser("oracle", help="brute-force grid search")
    common(p, params=False)
    p.add_argument("--loss", default="uniform", choices=["uniform", "l1", "manhattan"])
    p.add_argument("--grid", default="-10,10,201", help="LO,HI,RESOLUTION per parameter (write --grid=-1,1,21 for negative LO)")
    p.add_argument("--arch", default="no_hidden", choices=["no_hidden", "one_hidden"])
    p.add_argument("--units", type=int, default=1)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("fuzz", help="random instances with prescribed deviation patterns")
    common(p, data=False, params=False)
    p.add_argument("--loss", default="uniform", choices=["uniform", "l1", "manhattan"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--tol", type=float)
    p.add_argument("--condition", default="kkt", choices=["kkt", "hull"])
    p.set_defaults(func=cmd_fuzz)
    return parser


def _summary(report: Report) -> str:
    parts = [report.command, report.status]
    r = report.result
    for key in ("z_star", "loss", "residual_norm", "max_rel_err"):
        if key in r:
            parts.append(f"{key}={r[key]:.6g}")
    if report.classification and "n1" in report.classification:
        c = report.classification
        parts.append(f"n1={c['n1']} n2={c['n2']} n3={c['n3']}")
    if "counts" in r:
        parts.append(" ".join(f"{k}={v}" for k, v in sorted(r["counts"].items())))
    return " ".join(parts)


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage() + "kktnet: error: a subcommand is required")
        start = time.perf_counter()
        report = args.func(args)
        if args.timings:
            report.timings = {"seconds": time.perf_counter() - start}
        if args.out:
            report.write(args.out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except OSError as exc:
        print(parser.format_usage() + f"kktnet: error: {exc}", file=sys.stderr)
        return 1
    except (KKTNetError, ValueError) as exc:
        print(f"kktnet: error: {exc}", file=sys.stderr)
        return 1
    print(_summary(report))
    return exit_code(report)


def main():
    sys.exit(run_cli())
