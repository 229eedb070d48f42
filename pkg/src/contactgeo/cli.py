"""Command-line interface: scenario listing, staged runs, report emission.

Subcommands: list-scenarios, check-ambient, classify, verify.  Reports
are emitted as JSON (stable key order, byte-identical for identical
inputs) or as text with one line per check.  Exit code is 0 iff no
asserted check failed; config/schema errors exit with 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from .immersion import DegeneratePointError
from .pipeline import VerificationReport, run_scenario
from .scenarios import BUILTIN_SCENARIOS, ConfigError, load_config

__all__ = ["main", "build_parser", "emit_report"]

_STAGE_OF = {"check-ambient": "ambient", "classify": "classify", "verify": "verify"}


def _jsonable(obj):
    """Coerce numpy scalars/arrays so json.dumps stays deterministic."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def emit_report(report: VerificationReport, fmt: str = "text") -> str:
    """Render a report as a JSON document or line-oriented text."""
    data = _jsonable(report.as_dict())
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=True) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")

    lines = [
        f"scenario: {data['scenario']}  (seed {data['seed']}, "
        f"{data['sample_count']} samples)",
    ]
    for c in data["checks"]:
        tol = "-" if c["tol"] is None else f"{c['tol']:.3e}"
        lines.append(
            f"  [{c['verdict']:>4}] {c['name']:<38} value={c['value']:.6e} tol={tol}"
        )
    cls = data.get("classification")
    if cls:
        lines.append(f"classification: {cls['label']}  dims={cls['dims']}")
        if cls.get("slant_angle") is not None:
            lines.append(f"  slant angle: {cls['slant_angle']:.12f} rad")
        if cls.get("normal_dims") is not None:
            lines.append(f"  normal split dims: {cls['normal_dims']}")
    w = data.get("warped")
    if w:
        lines.append(f"warped analysis: {w['verdict']}")
        lines.append(
            f"  f reference {w['f_reference']:.6g} at gauge point, "
            f"spread {w['f_spread']:.3e}"
        )
        if "warp_expr_rel_error" in w:
            lines.append(f"  recovery vs declared f: {w['warp_expr_rel_error']:.3e}")
    t = data.get("theorem41")
    if t:
        lines.append("inequality report:")
        lines.append(f"  ||sigma||^2 = {t['lhs']:.9f} (path 2: {t['lhs_path2']:.9f})")
        lines.append(f"  rhs statement (i):  {t['rhs_statement_i']:.9f}")
        lines.append(f"  rhs statement (ii): {t['rhs_statement_ii']:.9f}")
        lines.append(f"  rhs proof variant of (i): {t['rhs_proof_variant_i']:.9f}")
        lines.append(
            f"  margin {t['margin']:.9f}, min over samples "
            f"{t['min_margin_over_samples']:.9f}"
        )
        lines.append(f"  hypotheses: {t['hypothesis_flags']}")
    if data["degenerate_points"]:
        lines.append(f"degenerate samples skipped: {len(data['degenerate_points'])}")
    for note in data["notes"]:
        lines.append(f"note: {note}")
    lines.append(f"overall: {data['overall']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------


def _parse_kv(pairs: Sequence[str], flag: str) -> Dict[str, float]:
    out: Dict[str, float] = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"{flag} expects name=value, got {item!r}")
        name, _, value = item.partition("=")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"{flag} {name}: {value!r} is not a number")
    return out


def _add_run_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("scenario", help="built-in scenario name or JSON config path")
    sub.add_argument("--samples", type=int, default=100, metavar="N")
    sub.add_argument("--seed", type=int, default=42, metavar="S")
    sub.add_argument(
        "--set", action="append", default=[], metavar="NAME=VALUE",
        help="override a scenario constant (repeatable), e.g. --set k=1",
    )
    sub.add_argument(
        "--tol", action="append", default=[], metavar="KEY=VALUE",
        help="override a tolerance (repeatable), e.g. --tol lemma=1e-5",
    )
    sub.add_argument("--report", metavar="PATH", help="write the report to a file")
    sub.add_argument("--format", choices=["json", "text"], default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contactgeo",
        description="numerical checks for contact-metric submanifold geometry",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    subs.add_parser("list-scenarios", help="list built-in scenarios")
    for cmd, help_text in (
        ("check-ambient", "ambient structure identities only"),
        ("classify", "ambient + frames + skew-CR classification"),
        ("verify", "full pipeline including warped analysis and inequality"),
    ):
        _add_run_flags(subs.add_parser(cmd, help=help_text))
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-scenarios":
        for name in sorted(BUILTIN_SCENARIOS):
            print(name)
        return 0

    try:
        scenario = load_config(
            args.scenario,
            constants=_parse_kv(args.set, "--set"),
            sample_count=args.samples,
            seed=args.seed,
            tol_overrides=_parse_kv(args.tol, "--tol"),
        )
        report = run_scenario(scenario, stage=_STAGE_OF[args.command])
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DegeneratePointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    rendered = emit_report(report, args.format)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(rendered)
        print(f"{report.scenario}: {'pass' if report.passed else 'fail'} "
              f"({args.report})")
    else:
        sys.stdout.write(rendered)
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
