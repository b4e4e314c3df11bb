"""Command-line front end.

Every command prints either a text report or one JSON document of the form
``{"command", "status": "ok", "input", "result"}``; failures print
``{"command", "status": "error", "error": {"code", "message"}}`` (JSON) or a
one-line message on stderr (text) and exit with status 2 (bad input) or 3
(numerical budget exceeded).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .cones import decompose_domain
from .errors import InputError, MonoasymError
from .exact import as_fraction, fmt_fraction
from .parsing import parse_expression, parse_ratio_list
from .sublevel import SublevelProblem, dominant_phase_per_cell, expand_multi, sublevel_expansion
from .transfer import laplace_expansion, mellin_meromorphic, oscillatory_expansion
from .verify import QuadratureSpec, verify_case

COMMANDS = ("sublevel", "oscillatory", "laplace", "poles", "decompose", "verify")


def rational(text: str) -> Fraction:
    """Exact rational from ``p/q``, an integer, or a decimal/scientific literal."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def build_problem(phases: list[str], amplitude: str, dim: int | None) -> SublevelProblem:
    if not phases:
        raise InputError("at least one --phase is required")
    asts = [parse_expression(s) for s in phases]
    amp = parse_expression(amplitude)
    n = max([a.dimension for a in asts] + [amp.dimension])
    if dim is not None:
        if dim < n:
            raise InputError(f"--dim {dim} is smaller than the largest variable index {n}")
        n = dim
    if n < 1:
        raise InputError("phases must involve at least one variable")
    return SublevelProblem(tuple(a.to_phase(n) for a in asts), amp.to_amplitude(n))


def _problem_json(p: SublevelProblem) -> dict:
    return {"dimension": p.dimension,
            "phases": [str(ph) for ph in p.phases],
            "amplitude": str(p.amplitude)}


def _sublevel_result(p: SublevelProblem) -> tuple[dict, str]:
    V = expand_multi(p)
    cells = []
    if len(p.phases) > 1:
        for red in dominant_phase_per_cell(p.phases, p.amplitude):
            part = sublevel_expansion(red.problem)
            cells.append({"cell": red.cell.to_json() if red.cell else None,
                          "dominant_phase": red.dominant,
                          "germ_text": part.germ.pretty(part.variable),
                          "scale": fmt_fraction(part.scale)})
    result = {"parts": [q.to_json() for q in V.parts],
              "threshold": fmt_fraction(V.threshold),
              "total_mass": fmt_fraction(V.total_mass),
              "exact_everywhere": V.exact_everywhere,
              "cells": cells}
    return result, V.describe()


def _series_result(series, value_at=None) -> tuple[dict, str]:
    result = series.to_json()
    text = series.describe()
    if value_at is not None:
        v = complex(series(float(value_at)))
        result["value"] = {"at": float(value_at), "re": v.real, "im": v.imag}
        shown = f"{v.real:.12g}" if series.variable == "tau" else f"{v.real:.12g}{v.imag:+.12g}j"
        text += f"\nvalue at {series.variable}={float(value_at):g}: {shown}"
    return result, text


def run(args: argparse.Namespace) -> tuple[dict, dict, str]:
    """Dispatch one command; returns ``(input, result, text)``."""
    cmd = args.command
    if cmd == "decompose":
        ratios, n = parse_ratio_list(args.ratios, args.dim)
        cells = decompose_domain(ratios)
        inp = {"dimension": n, "ratios": [str(r) for r in ratios]}
        result = {"cells": [c.to_json() for c in cells]}
        lines = [f"{len(cells)} cells"]
        for c in cells:
            lines.append(f"  {','.join(c.sign_pattern)}: H={c.cone.H} eps={c.map.eps} N={c.map.N}")
        return inp, result, "\n".join(lines)

    p = build_problem(args.phase, args.amplitude, args.dim)
    inp = _problem_json(p)
    if cmd == "sublevel":
        result, text = _sublevel_result(p)
    elif cmd == "oscillatory":
        V = expand_multi(p)
        inp["order"] = fmt_fraction(args.order)
        result, text = _series_result(oscillatory_expansion(V, args.order, conjugate=args.conjugate),
                                      args.lam)
    elif cmd == "laplace":
        V = expand_multi(p)
        inp["order"] = fmt_fraction(args.order)
        result, text = _series_result(laplace_expansion(V, args.order), args.tau)
    elif cmd == "poles":
        poles = mellin_meromorphic(expand_multi(p))
        result = {"poles": [d.to_json() for d in poles]}
        text = "\n".join(
            f"z = {fmt_fraction(d.location)}: order {d.order}, principal part "
            f"[{', '.join(fmt_fraction(c) for c in d.principal_part)}]" for d in poles) or "no poles"
    else:
        quad = QuadratureSpec(method=args.method, seed=args.seed,
                              points=args.samples if args.samples is not None
                              else (10 ** 6 if "carlo" in args.method else 20))
        result = verify_case(p, t=args.t, lam=args.lam, tau=args.tau, order_cap=args.order,
                             quad=quad)
        inp.update({"method": args.method, "seed": args.seed})
        text = (f"{result['case']}: symbolic {result['symbolic_value']}  numeric "
                f"{result['numeric_value']}  rel_err {result['rel_err']:.3g}  {result['verdict']}")
    return inp, result, text


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="monoasym",
                                 description="Exact asymptotics of monomial sublevel volumes, "
                                             "oscillatory and Laplace integrals.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, problem=True):
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--dim", type=int, default=None, help="number of variables (default: inferred)")
        if problem:
            sp.add_argument("--phase", action="append", default=[],
                            help="monomial phase such as 'x1^2*x2' (repeatable)")
            sp.add_argument("--amplitude", default="1", help="polynomial amplitude (default 1)")

    sp = sub.add_parser("sublevel", help="exact sublevel volume germ")
    common(sp)
    sp = sub.add_parser("oscillatory", help="oscillatory integral expansion in lambda")
    common(sp)
    sp.add_argument("--order", type=rational, default=Fraction(2), help="largest exponent kept")
    sp.add_argument("--conjugate", action="store_true", help="expand the e^{-i lambda f} branch")
    sp.add_argument("--lambda", dest="lam", type=rational, default=None, help="evaluate the series here")
    sp = sub.add_parser("laplace", help="Laplace integral expansion in tau")
    common(sp)
    sp.add_argument("--order", type=rational, default=Fraction(2))
    sp.add_argument("--tau", type=rational, default=None, help="evaluate the series here")
    sp = sub.add_parser("poles", help="poles of the Mellin continuation")
    common(sp)
    sp = sub.add_parser("decompose", help="cone decomposition for monomial ratios")
    common(sp, problem=False)
    sp.add_argument("--ratios", required=True, help="comma separated monomials, e.g. 'x1*x2^-1'")
    sp = sub.add_parser("verify", help="compare symbolic and numeric values")
    common(sp)
    sp.add_argument("--t", type=rational, default=None)
    sp.add_argument("--lambda", dest="lam", type=rational, default=None)
    sp.add_argument("--tau", type=rational, default=None)
    sp.add_argument("--order", type=rational, default=Fraction(3))
    sp.add_argument("--method", default="adaptive-nested",
                    choices=("tensor-gauss", "adaptive-nested", "monte-carlo", "quasi-monte-carlo"))
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        for name in ("order", "t", "lam", "tau"):
            v = getattr(args, name, None)
            if v is not None:
                setattr(args, name, as_fraction(v))
        inp, result, text = run(args)
    except MonoasymError as exc:
        if args.format == "json":
            doc = {"command": args.command, "status": "error",
                   "error": {"code": exc.code, "message": str(exc)}}
            print(json.dumps(doc, indent=2))
        else:
            print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_status
    if args.format == "json":
        doc = {"command": args.command, "status": "ok", "input": inp, "result": result}
        print(json.dumps(doc, indent=2))
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
