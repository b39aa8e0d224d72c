"""Command-line front end.

Exit codes: 0 success, 2 solver error or failed verification, 3 invalid
flags or configuration.  Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import math
import re
import sys

from . import acceptance, charts, darboux, locus, nevanlinna, output, qes
from .config import ConfigError, RunConfig, load_config
from .contour import IntegrationError, ProblemPoint
from .spectrum import Box, SpectrumError, find_eigenvalues_in_box, lowest_levels

EXIT_OK = 0
EXIT_SOLVER = 2
EXIT_USAGE = 3

SOLVER_ERRORS = (SpectrumError, IntegrationError, locus.LocusError, nevanlinna.NevanlinnaError,
                 darboux.DarbouxError, qes.QesError, charts.ChartError, ArithmeticError)

# flags whose values may start with '-' (argparse would take "-2,2" for an option)
_VALUE_FLAGS = {"--b", "--J", "--b-range", "--box", "--mu"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def finite_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return v


def float_list(n: int):
    def parse(text: str) -> tuple[float, ...]:
        parts = text.split(",")
        if len(parts) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
        return tuple(finite_float(p) for p in parts)
    return parse


def lambda_index(text: str) -> tuple[str, int]:
    m = re.fullmatch(r"(qes)?(\d+)", text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"expected an integer or qesK, got {text!r}")
    return ("qes" if m.group(1) else "level", int(m.group(2)))


def _join_values(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False, allow_abbrev=False)
    common.add_argument("--config", help="JSON file overriding the defaults")
    common.add_argument("--output-dir", help="directory for CSV/JSON artifacts")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--eigen-tol", type=finite_float, help="eigenvalue tolerance")
    common.add_argument("--radius", help="seeding radius: 'auto' or a number")

    p = _Parser(prog="ptquartic", allow_abbrev=False,
                description="Spectral locus of -y'' + (z^4 - 2bz^2 + 2Jz) y = lambda y.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("spectrum", parents=[common], help="eigenvalues at (b, J)")
    s.add_argument("--b", type=finite_float, required=True)
    s.add_argument("--J", type=finite_float, required=True)
    s.add_argument("--box", type=float_list(4), help="re0,re1,im0,im1")
    s.add_argument("--n-max", type=int, default=6)

    s = sub.add_parser("qes", parents=[common], help="QES polynomial Q_J or its roots")
    s.add_argument("--J", type=int, required=True)
    s.add_argument("--b", type=finite_float)

    s = sub.add_parser("darboux", parents=[common], help="Darboux spectral correspondence")
    s.add_argument("--J", type=int, required=True)
    s.add_argument("--b", type=finite_float, required=True)
    s.add_argument("--n-max", type=int, default=5)

    s = sub.add_parser("nevanlinna", parents=[common], help="asymptotic values and verdict")
    s.add_argument("--b", type=finite_float, required=True)
    s.add_argument("--J", type=finite_float, required=True)
    s.add_argument("--lambda-index", type=lambda_index, required=True)
    s.add_argument("--mu", type=finite_float, default=0.0)

    s = sub.add_parser("trace", parents=[common], help="trace branches of the real locus")
    s.add_argument("--J", type=finite_float, required=True)
    s.add_argument("--b-range", type=float_list(2), required=True)
    s.add_argument("--branches", type=int, default=3)
    s.add_argument("--step", type=finite_float, default=locus.STEP0)

    s = sub.add_parser("figures", parents=[common], help="figure data for integer J")
    s.add_argument("--J", type=int, required=True)
    s.add_argument("--b-range", type=float_list(2), default=(-3.0, 3.0))
    s.add_argument("--branches", type=int, default=4)

    s = sub.add_parser("charts", parents=[common], help="chart catalog as JSON")
    s.add_argument("--J", type=int, required=True)
    s.add_argument("--m-max", type=int, required=True)

    s = sub.add_parser("verify-all", parents=[common], help="run the acceptance suite")
    s.add_argument("--only", help="comma-separated criterion numbers")
    return p


def _config(args) -> RunConfig:
    cfg = load_config(args.config)
    radius = args.radius
    if radius is not None and radius != "auto":
        try:
            radius = float(radius)
        except ValueError:
            raise ConfigError(f"radius must be 'auto' or a number, got {radius!r}") from None
    return cfg.replace(output_dir=args.output_dir, workers=args.workers,
                       eigen_tol=args.eigen_tol, radius=radius)


def _fail_usage(msg: str):
    raise UsageError(msg)


def _eigen_rows(evs):
    return [{"lambda": e.lam, "residual": e.residual, "conjugate_pair": e.conjugate_pair,
             "multiplicity": e.multiplicity} for e in evs]


def cmd_spectrum(args, cfg):
    if args.box is not None:
        re0, re1, im0, im1 = args.box
        if not (re0 < re1 and im0 < im1):
            _fail_usage("--box needs re0 < re1 and im0 < im1")
        sp = find_eigenvalues_in_box(args.b, args.J, Box(re0, re1, im0, im1), cfg.eigen_tol,
                                     cfg.fixed_radius)
        return {"b": args.b, "J": args.J, "box": [sp.box.re0, sp.box.re1, sp.box.im0, sp.box.im1],
                "winding": sp.winding, "eigenvalues": _eigen_rows(sp.eigenvalues)}, EXIT_OK
    if args.n_max < 1:
        _fail_usage("--n-max must be >= 1")
    evs, complete, searched = lowest_levels(args.b, args.J, args.n_max, cfg.eigen_tol,
                                            radius=cfg.fixed_radius)
    evs = sorted(evs, key=lambda e: (e.conjugate_pair, e.lam.real, -e.lam.imag))
    return {"b": args.b, "J": args.J, "n_max": args.n_max, "complete": complete,
            "searched_down_to": searched, "eigenvalues": _eigen_rows(evs)}, EXIT_OK


def cmd_qes(args, cfg):
    if args.J < 1:
        _fail_usage("--J must be a positive integer: QES eigenfunctions exist only then")
    if args.b is None:
        data = qes.qes_to_json(args.J)
        data["text"] = str(qes.qes_polynomial(args.J))
        return data, EXIT_OK
    return {"J": args.J, "b": args.b, "roots": qes.qes_eigenvalues(args.J, args.b)}, EXIT_OK


def cmd_darboux(args, cfg):
    if args.J < 0:
        _fail_usage("--J must be a non-negative integer")
    if args.n_max < 1:
        _fail_usage("--n-max must be >= 1")
    rep = darboux.verify_spectral_shift(args.J, args.b, args.n_max, eigen_tol=cfg.eigen_tol)
    out = {"J": args.J, "b": args.b, "status": "PASS" if rep.passed else "FAIL",
           "max_discrepancy": rep.max_discrepancy, "tol": rep.tol,
           "qes_roots": rep.qes_roots, "non_qes": rep.non_qes, "partner": rep.partner}
    if args.J > 0:
        w = darboux.wronskian_of_qes(args.J, args.b)
        out["wronskian_constant"] = str(w.constant) if w.is_constant else None
    if rep.note:
        out["note"] = rep.note
    return out, EXIT_OK if rep.passed else EXIT_SOLVER


def _pick_lambda(args, cfg) -> complex:
    kind, k = args.lambda_index
    if kind == "qes":
        J = args.J
        if not (J >= 1 and J == round(J)):
            _fail_usage("qesK needs a positive integer J")
        if k >= round(J):
            _fail_usage(f"qes index {k} out of range for J={round(J)}")
        return qes.qes_eigenvalues(int(round(J)), args.b)[k]
    evs, _, _ = lowest_levels(args.b, args.J, k + 1, cfg.eigen_tol, radius=cfg.fixed_radius)
    levels = [e.lam for e in evs for _ in range(e.multiplicity)]
    if len(levels) <= k:
        raise SpectrumError(f"level {k} not found")
    return levels[k]


def cmd_nevanlinna(args, cfg):
    lam = _pick_lambda(args, cfg)
    point = ProblemPoint(args.b, args.J, lam)
    v = nevanlinna.theorem2_check(point, args.mu, cfg.qes_threshold, cfg.ratio_tol)
    vals = v.values
    out = {"b": args.b, "J": args.J, "lambda": lam,
           "values": {"a": vals.a, "c": vals.c, "a_zero": vals.a_zero,
                      "c_infinite": vals.c_infinite, "normalization": vals.normalization,
                      "estimates_radius": vals.estimates_radius,
                      "convergence_gap": vals.convergence_gap},
           "verdict": v.classification, "a_ratio": v.a_ratio, "c_imag_ratio": v.c_imag_ratio,
           "consistent": v.consistent}
    if args.J == 0 and lam.imag == 0:
        s = nevanlinna.symmetric_value_A(args.b, lam.real, check=False)
        out["A"] = s.A
        out["identity_residual"] = s.identity_residual
    return out, EXIT_OK


def _curve_summary(c: locus.LocusCurve, path) -> dict:
    return {"branch": c.branch_id, "file": path.name, "samples": len(c.samples),
            "truncated": c.truncated, "graph": c.is_graph(),
            "max_residual": max(c.residuals, default=0.0)}


def _events(curves) -> list[dict]:
    return [{"branch": c.branch_id, "type": e.type, "b": e.b, "lambda": e.lam, "note": e.note}
            for c in curves for e in c.events]


def cmd_trace(args, cfg):
    b0, b1 = args.b_range
    if not b0 < b1:
        _fail_usage("--b-range needs b0 < b1")
    if args.branches < 1:
        _fail_usage("--branches must be >= 1")
    curves = locus.trace_branches(args.J, (b0, b1), args.branches, args.step,
                                  workers=cfg.workers)
    tag = output.fmt_float(args.J)
    files = []
    for c in curves:
        path = output.write_curve_csv(c, cfg.out / f"trace_J{tag}_branch{c.branch_id}.csv")
        files.append(_curve_summary(c, path))
    ev = output.write_json({"J": args.J, "b_range": [b0, b1], "events": _events(curves)},
                           cfg.out / f"trace_J{tag}_events.json")
    return {"J": args.J, "curves": files, "events_file": ev.name,
            "events": len(_events(curves))}, EXIT_OK


def cmd_figures(args, cfg):
    if abs(args.J) > 3:
        _fail_usage("--J must satisfy |J| <= 3")
    b0, b1 = args.b_range
    if not b0 < b1:
        _fail_usage("--b-range needs b0 < b1")
    fd = locus.emit_figure_data(args.J, (b0, b1), args.branches, workers=cfg.workers)
    tag = str(args.J)
    solid = [_curve_summary(c, output.write_curve_csv(c, cfg.out / f"fig_J{tag}_branch{c.branch_id}.csv"))
             for c in fd.solid]
    dotted = [{"branch": c.branch_id, "samples": len(c.samples),
               "file": output.write_curve_csv(c, cfg.out / f"fig_J{tag}_{c.branch_id}.csv").name}
              for c in fd.dotted]
    cands = [{"b": e.b, "lambda": e.lam} for e in fd.candidates]
    ev = output.write_json({"J": args.J, "b_range": [b0, b1], "qes_overlay": fd.overlay_J,
                            "intersection_candidates": cands, "events": _events(fd.solid)},
                           cfg.out / f"fig_J{tag}_events.json")
    return {"J": args.J, "solid": solid, "dotted": dotted, "qes_overlay": fd.overlay_J,
            "intersection_candidates": cands, "events_file": ev.name}, EXIT_OK


def cmd_charts(args, cfg):
    if args.m_max < 0:
        _fail_usage("--m-max must be >= 0")
    return {"J": args.J, "m_max": args.m_max, "charts": charts.catalog(args.J, args.m_max)}, EXIT_OK


def cmd_verify_all(args, cfg):
    which = None
    if args.only:
        try:
            which = sorted({int(t) for t in args.only.split(",")})
        except ValueError:
            _fail_usage(f"--only expects comma-separated integers, got {args.only!r}")
        if any(i not in acceptance.CHECKS for i in which):
            _fail_usage(f"criteria are numbered 1..{len(acceptance.CHECKS)}")
    results = []
    for i in which or sorted(acceptance.CHECKS):
        r = acceptance.run_criterion(i, cfg.workers)
        print(r.line(), file=sys.stderr, flush=True)
        results.append(r)
    ok = all(r.passed for r in results)
    data = {"passed": ok, "criteria": [
        {"id": r.id, "name": r.name, "status": "PASS" if r.passed else "FAIL",
         "seconds": round(r.seconds, 1), "detail": r.detail} for r in results]}
    return data, EXIT_OK if ok else EXIT_SOLVER


COMMANDS = {"spectrum": cmd_spectrum, "qes": cmd_qes, "darboux": cmd_darboux,
            "nevanlinna": cmd_nevanlinna, "trace": cmd_trace, "figures": cmd_figures,
            "charts": cmd_charts, "verify-all": cmd_verify_all}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_values(argv))
        cfg = _config(args)
        data, code = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"ptquartic: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SOLVER_ERRORS as exc:
        print(f"ptquartic: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    sys.stdout.write(output.dumps(data))
    return code


if __name__ == "__main__":
    sys.exit(main())
