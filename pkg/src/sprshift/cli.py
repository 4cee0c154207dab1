"""Command-line interface: ``classify``, ``embed``, ``iso`` and ``verify``.

Every command prints one canonical JSON report (sorted keys, no whitespace)
to stdout or ``--out``.  Exit codes: 0 ok, 2 parse error, 3 construction
failure, 4 theorem hypotheses unmet, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .embeddings import (
    ConstructionError,
    build_loop_coding,
    certify_padded_entropy,
    choose_truncation,
)
from .graph import DirectedMultigraph, GraphError, essential, period, strongly_connected_components
from .loops import LoopSystem, LoopSystemError, TruncationTooLarge, loop_system_from_json
from .rational import as_fraction, fraction_str
from .spectra import DEFAULT_TOL, perron_bound
from .suites import run_all
from .verdicts import HypothesesUnmet, ShiftDescriptor, borel_conjugacy, borel_iso_free_parts

EXIT_OK, EXIT_PARSE, EXIT_CONSTRUCTION, EXIT_THEOREM, EXIT_VERIFY = 0, 2, 3, 4, 5


class ParseError(ValueError):
    pass


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def load_presentation(path: str) -> DirectedMultigraph | LoopSystem:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        if isinstance(data, dict) and "type" in data:
            return loop_system_from_json(data)
        return DirectedMultigraph.from_json(data)
    except (GraphError, LoopSystemError, TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from exc


def _canonical_input(pres: DirectedMultigraph | LoopSystem) -> dict:
    return pres.to_json()


def _components(g: DirectedMultigraph, tol: Fraction) -> list[dict]:
    dec = strongly_connected_components(g)
    out = []
    for comp in dec.nontrivial_components():
        sub = g.subgraph(comp)
        out.append(
            {
                "vertices": sub.to_json()["vertices"],
                "period": str(period(sub)),
                "entropy": perron_bound(sub, tol).to_json(),
            }
        )
    return out


def cmd_classify(args) -> tuple[int, dict]:
    pres = load_presentation(args.input)
    d = ShiftDescriptor.of(pres, args.nmax, args.tol)
    result = d.to_json()
    if isinstance(pres, DirectedMultigraph):
        result["components"] = _components(essential(pres), args.tol)
    return EXIT_OK, {"input": _canonical_input(pres), "result": result}


def cmd_embed(args) -> tuple[int, dict]:
    pres = load_presentation(args.input)
    if not isinstance(pres, LoopSystem):
        raise ParseError("embed expects a loop system")
    if args.lambda_target is None:
        raise ParseError("--lambda-target is required")
    target = args.lambda_target
    plan = choose_truncation(pres, target, pad_polynomial=not args.no_pad, tol=args.tol)
    padded = certify_padded_entropy(plan, args.tol, args.cap)
    coding = build_loop_coding(plan, args.ncap, args.cap)
    result = {
        "plan": plan.to_json(),
        "padded_entropy": padded.to_json(),
        "coding": coding.to_json(),
        "passed": True,
    }
    return EXIT_OK, {"input": _canonical_input(pres), "result": result}


def cmd_iso(args) -> tuple[int, dict]:
    a_pres, b_pres = load_presentation(args.a), load_presentation(args.b)
    a = ShiftDescriptor.of(a_pres, args.nmax, args.tol, "a")
    b = ShiftDescriptor.of(b_pres, args.nmax, args.tol, "b")
    free = borel_iso_free_parts(a, b)
    conj = borel_conjugacy(a, b, args.ncheck)
    result = {
        "a": a.to_json(),
        "b": b.to_json(),
        "free_part_isomorphism": free.to_json(),
        "borel_conjugacy": conj.to_json(),
    }
    return EXIT_OK, {"input": {"a": _canonical_input(a_pres), "b": _canonical_input(b_pres)}, "result": result}


def cmd_verify(args) -> tuple[int, dict]:
    results = run_all(args.seed, fault=args.inject_fault)
    summary = {r.name: r.to_json() for r in results}
    passed = all(r.passed for r in results)
    out: dict[str, Any] = {"suites": summary, "passed": passed}
    if not passed:
        first = next(r for r in results if not r.passed)
        out["first_counterexample"] = {"suite": first.name, "example": first.counterexample}
    return (EXIT_OK if passed else EXIT_VERIFY), {"result": out}


def _rational(text: str) -> Fraction:
    try:
        value = as_fraction(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from exc
    return value


def _positive_rational(text: str) -> Fraction:
    value = _rational(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sprshift", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"sprshift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=_positive_rational, default=DEFAULT_TOL, help="entropy tolerance (p/q)")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--cap", type=_positive_int, default=None, help="size cap (default: SHIFT_CAP or built-in)")
        p.add_argument("--timing", action="store_true", help="add wall-clock timing (breaks byte-identity)")

    p = sub.add_parser("classify", help="invariants of a graph or loop system")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--nmax", type=_positive_int, default=10)
    common(p)

    p = sub.add_parser("embed", help="truncate-and-pad construction for a loop system")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--lambda-target", type=_positive_rational)
    p.add_argument("--ncap", type=_positive_int, default=None, help="coding length cap (default 2N)")
    p.add_argument("--no-pad", action="store_true", help="use a polynomial source without padding")
    common(p)

    p = sub.add_parser("iso", help="free-part isomorphism and bounded conjugacy verdicts")
    p.add_argument("-a", required=True)
    p.add_argument("-b", required=True)
    p.add_argument("--nmax", type=_positive_int, default=10)
    p.add_argument("--ncheck", type=_positive_int, default=10)
    common(p)

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    common(p)
    return parser


COMMANDS = {"classify": cmd_classify, "embed": cmd_embed, "iso": cmd_iso, "verify": cmd_verify}


def _config(args) -> dict:
    cfg = {}
    for key, value in sorted(vars(args).items()):
        if key in ("out", "timing"):
            continue
        if isinstance(value, Fraction):
            value = fraction_str(value)
        elif value is not None and not isinstance(value, (bool, int, str)):
            value = str(value)
        cfg[key] = value
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    start = time.perf_counter()
    report: dict[str, Any] = {"tool": "sprshift", "version": __version__, "command": args.command, "config": _config(args)}
    try:
        code, body = COMMANDS[args.command](args)
        report.update(body)
    except ParseError as exc:
        code, report["error"] = EXIT_PARSE, {"kind": "parse", "message": str(exc)}
    except (ConstructionError, TruncationTooLarge) as exc:
        code, report["error"] = EXIT_CONSTRUCTION, {"kind": "construction", "message": str(exc)}
    except HypothesesUnmet as exc:
        code, report["error"] = EXIT_THEOREM, {"kind": "theorem_hypotheses", "message": str(exc)}
    report["exit_code"] = code
    if args.timing:
        report["timing_seconds"] = f"{time.perf_counter() - start:.3f}"
    text = canonical_json(report) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
