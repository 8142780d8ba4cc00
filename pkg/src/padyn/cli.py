"""Command-line front end.

One analysis per process: parse the map (or automaton), compute Mahler
coefficients, run the coefficient-based theorem checks, corroborate with
the brute-force residue-ring oracles, and emit a text report plus an
optional JSON/CSV/PGM dump.  A map failing a theorem condition is still a
successful analysis; only configuration mistakes (exit 2) and blown
enumeration or precision budgets (exit 3) are process failures.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import automata, dynamics, mahler
from .errors import (
    AutomatonFormatError,
    BudgetError,
    DegenerateAutomatonError,
    MapSyntaxError,
    PrecisionError,
    UnboundedLookaheadError,
)
from .mapdsl import AutoApply, Var, parse_map
from .padic import is_prime

__all__ = ["main", "run_command", "render_report"]

_CHECKS = ("lipschitz-mp", "lipschitz-ergodic", "cs", "cs-mp", "cs-ergodic", "bernoulli")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=2, help="prime alphabet size")
    common.add_argument("--K", type=int, default=16, help="working precision in digits")
    common.add_argument("--map", help="map expression in the DSL")
    common.add_argument("--file", help="automaton file defining the map")
    common.add_argument("--n", type=int, default=1, help="complex-shift level")
    common.add_argument("--mmax", type=int, default=16, help="highest Mahler index")
    common.add_argument("--kmax", type=int, default=6, help="oracle depth")
    common.add_argument("--grid", type=int, default=64, help="box-counting grid size")
    common.add_argument("--budget", type=int, help="enumeration budget (table entries)")
    common.add_argument("--json", help="write the JSON report to this path")
    common.add_argument("--csv", help="write the plot-point CSV to this path")
    common.add_argument("--pgm", help="write the raster PGM to this path")
    common.add_argument(
        "--strict-m1",
        action="store_true",
        dest="strict_m1",
        help="apply the ergodicity tail clause from m = 1 (comparison mode)",
    )

    parser = argparse.ArgumentParser(prog="padyn", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("analyze", parents=[common], help="run the whole pipeline")
    sub.add_parser("mahler", parents=[common], help="Mahler coefficient table")
    check = sub.add_parser("check", parents=[common], help="one theorem check")
    check.add_argument("which", choices=_CHECKS)
    sub.add_parser("preimages", parents=[common], help="preimage censuses per level")
    sub.add_parser("cycles", parents=[common], help="cycle reports per level")
    orbit = sub.add_parser("orbit", parents=[common], help="iterate the padded endomap")
    orbit.add_argument("--x0", type=int, required=True, help="start point")
    orbit.add_argument("--steps", type=int, default=16, help="iteration count")
    orbit.add_argument("--m", type=int, default=8, help="modulus digit count")
    sub.add_parser("plotset", parents=[common], help="plot set and box counting")
    auto = sub.add_parser("automaton", parents=[common], help="inspect an automaton file")
    auto.add_argument("action", choices=("run", "check"))
    auto.add_argument("--word", default="", help="input word for 'run' (digit string)")
    return parser


def _resolve_budget(args) -> int | None:
    if args.budget is not None:
        return args.budget
    env = os.environ.get("PADYN_BUDGET")
    return int(env) if env else None


def _config_echo(args, budget) -> dict:
    cfg = {
        "subcommand": args.subcommand,
        "p": args.p,
        "K": args.K,
        "map": args.map,
        "file": args.file,
        "n": args.n,
        "mmax": args.mmax,
        "kmax": args.kmax,
        "grid": args.grid,
        "budget": budget,
        "strict_m1": args.strict_m1,
        "json": args.json,
        "csv": args.csv,
        "pgm": args.pgm,
    }
    for extra in ("which", "action", "word", "x0", "steps", "m"):
        if hasattr(args, extra):
            cfg[extra] = getattr(args, extra)
    return cfg


def _get_expr(args):
    if (args.map is None) == (args.file is None):
        raise ValueError("exactly one of --map and --file is required")
    if args.map is not None:
        return parse_map(args.map)
    machine = automata.parse_automaton(Path(args.file).read_text())
    verdict = automata.check_nondegenerate(machine)
    if not verdict.nondegenerate:
        raise DegenerateAutomatonError(f"degenerate at state {verdict.witness}")
    return AutoApply(args.file, machine, automata.max_output_deficit(machine), Var())


def _coefficient_rows(coeffs: mahler.MahlerCoeffs) -> list[dict]:
    return [
        {
            "m": m,
            "residue": coeffs.residues[m],
            "signed": coeffs.signed(m),
            "valuation": str(coeffs.valuation(m)),
        }
        for m in range(coeffs.max_index + 1)
    ]


def _census_section(expr, args, budget) -> list[dict]:
    rows = []
    for k in range(2, args.kmax + 1):
        lm = dynamics.level_map(expr, args.p, args.n, k, budget)
        census = dynamics.preimage_census(lm)
        rows.append(
            {
                "n": args.n,
                "k": k,
                "domain_digits": lm.domain_digits,
                "codomain_digits": lm.codomain_digits,
                "expected": census.expected,
                "uniform": census.uniform,
                "verdict": str(census),
                "witness_point": census.witness_point,
                "witness_pair": list(census.witness_pair) if census.witness_pair else None,
                "counts": list(census.counts) if len(census.counts) <= 256 else None,
            }
        )
    return rows


def _cycles_section(expr, args, budget) -> list[dict]:
    rows = []
    for k in range(1, args.kmax + 1):
        m = args.n * k
        em = dynamics.padded_endomap(expr, args.p, m, budget)
        report = dynamics.cycle_report(em)
        rows.append(_cycle_row(m, report))
    return rows


def _cycle_row(m: int, report: dynamics.CycleReport) -> dict:
    small = sum(len(c) for c in report.cycles) <= 256
    return {
        "kind": "cycles",
        "m": m,
        "cycle_count": len(report.cycles),
        "cycle_lengths": list(report.cycle_lengths),
        "unique_cycle": report.unique_cycle,
        "distance_histogram": {str(d): c for d, c in report.distance_histogram.items()},
        "cycles": [list(c) for c in report.cycles] if small else None,
    }


def _plotset_section(expr, args, budget) -> tuple[dict, dynamics.PlotSet, dynamics.BoxCount]:
    ps = dynamics.accumulate_plot(expr, args.p, args.n, args.kmax, budget)
    bc = dynamics.box_count(ps, args.grid)
    section = {
        "n": args.n,
        "k_max": args.kmax,
        "points": len(ps.points),
        "per_level": [{"k": k, "points": len(ps.levels[k])} for k in ps.k_values],
        "box": [
            {
                "grid": bc.grid,
                "covered": bc.covered,
                "cells": bc.grid * bc.grid,
                "fraction": str(bc.fraction),
            }
        ],
    }
    return section, ps, bc


def _dispatch(args, budget) -> dict:
    if not is_prime(args.p):
        raise ValueError(f"p must be prime, got {args.p}")
    if args.K < 1 or args.mmax < 1 or args.kmax < 1:
        raise ValueError("K, mmax and kmax must all be >= 1")
    report = {
        "config": _config_echo(args, budget),
        "coefficients": [],
        "verdicts": {},
        "census": [],
        "cycles": [],
        "plotset": None,
        "timing": None,
    }

    if args.subcommand == "automaton":
        if not args.file:
            raise ValueError("the automaton subcommand requires --file")
        machine = automata.parse_automaton(Path(args.file).read_text())
        verdict = automata.check_nondegenerate(machine)
        report["verdicts"]["nondegenerate"] = {
            "kind": "nondegenerate" if verdict.nondegenerate else "degenerate_at",
            "witness": verdict.witness,
        }
        report["verdicts"]["synchronous"] = {
            "kind": "synchronous" if machine.synchronous else "asynchronous"
        }
        if args.action == "check":
            if verdict.nondegenerate:
                try:
                    deficit = automata.max_output_deficit(machine)
                    report["verdicts"]["lookahead"] = {"kind": "bounded", "deficit": deficit}
                except UnboundedLookaheadError:
                    report["verdicts"]["lookahead"] = {"kind": "unbounded", "deficit": None}
        else:
            word = [int(c) for c in args.word]
            trace = automata.run(machine, word)
            report["verdicts"]["run"] = {
                "kind": "run",
                "input": args.word,
                "output": "".join(str(d) for d in trace.output),
                "states": list(trace.states),
            }
        return report

    expr = _get_expr(args)

    if args.subcommand == "orbit":
        result = dynamics.orbit(expr, args.p, args.x0, args.steps, args.m)
        report["cycles"].append(
            {
                "kind": "orbit",
                "m": args.m,
                "x0": args.x0,
                "points": list(result.points),
                "cycle_start": result.cycle_start,
                "cycle_length": result.cycle_length,
            }
        )
        return report

    if args.subcommand == "preimages":
        report["census"] = _census_section(expr, args, budget)
        return report

    if args.subcommand == "cycles":
        report["cycles"] = _cycles_section(expr, args, budget)
        return report

    if args.subcommand == "plotset":
        section, ps, bc = _plotset_section(expr, args, budget)
        report["plotset"] = section
        if args.csv:
            Path(args.csv).write_text(dynamics.to_csv(ps))
        if args.pgm:
            Path(args.pgm).write_text(dynamics.to_pgm(bc))
        return report

    coeffs = mahler.mahler_coeffs(expr, args.p, args.mmax, args.K)
    report["coefficients"] = _coefficient_rows(coeffs)

    if args.subcommand == "mahler":
        return report

    if args.subcommand == "check":
        which = args.which
        if which == "lipschitz-mp":
            verdict = mahler.check_lipschitz_mp(coeffs)
        elif which == "lipschitz-ergodic":
            verdict = mahler.check_lipschitz_ergodic(coeffs, strict_m1=args.strict_m1)
        elif which == "cs":
            verdict = mahler.check_complex_shift_bound(coeffs, args.n)
        elif which == "cs-mp":
            verdict = mahler.check_cs_mp(coeffs, args.n)
        elif which == "cs-ergodic":
            verdict = mahler.check_cs_ergodic(coeffs, args.n)
        else:
            verdict = mahler.check_bernoulli_properties(coeffs, args.n)
        report["verdicts"][which.replace("-", "_")] = verdict.to_json()
        return report

    # analyze: every check plus the oracles
    report["verdicts"]["lipschitz_mp"] = mahler.check_lipschitz_mp(coeffs).to_json()
    report["verdicts"]["lipschitz_ergodic"] = mahler.check_lipschitz_ergodic(
        coeffs, strict_m1=args.strict_m1
    ).to_json()
    report["verdicts"]["cs"] = mahler.check_complex_shift_bound(coeffs, args.n).to_json()
    report["verdicts"]["cs_mp"] = mahler.check_cs_mp(coeffs, args.n).to_json()
    report["verdicts"]["cs_ergodic"] = mahler.check_cs_ergodic(coeffs, args.n).to_json()
    report["census"] = _census_section(expr, args, budget)
    report["cycles"] = _cycles_section(expr, args, budget)
    section, ps, bc = _plotset_section(expr, args, budget)
    report["plotset"] = section
    if args.csv:
        Path(args.csv).write_text(dynamics.to_csv(ps))
    if args.pgm:
        Path(args.pgm).write_text(dynamics.to_pgm(bc))
    return report


def _verdict_line(name: str, data: dict) -> str:
    kind = data.get("kind", "")
    if kind == "satisfied_up_to":
        text = f"SatisfiedUpTo({data['bound']})"
        if data.get("total"):
            text += " (total: finitely many nonzero coefficients)"
    elif kind == "violated_at":
        text = f"ViolatedAt({data['m']}): {data['condition']}; observed {data['observed']}"
        if data.get("definitive"):
            text += " [definitive: condition is necessary for p=2]"
    elif kind == "undecidable_at":
        text = f"UndecidableAt({data['m']}): {data['condition']}"
    else:
        text = ", ".join(f"{k}={v}" for k, v in data.items() if k != "kind" and v is not None)
        text = f"{kind}" + (f" ({text})" if text else "")
    if data.get("note"):
        text += f" [{data['note']}]"
    return f"  {name}: {text}"


def render_report(report: dict, fmt: str = "text") -> str:
    """Serialize a report; JSON output is byte-deterministic."""
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    cfg = report["config"]
    shown = " ".join(
        f"{k}={v!r}" for k, v in cfg.items() if v is not None and v is not False
    )
    lines = [f"padyn {cfg.get('subcommand', '?')}", f"config: {shown}"]
    if report["coefficients"]:
        p, K = cfg["p"], cfg["K"]
        lines.append(f"coefficients (signed representatives mod {p}^{K}):")
        for row in report["coefficients"]:
            lines.append(f"  a_{row['m']:<4d} = {row['signed']:<24d} [{row['valuation']}]")
    if report["verdicts"]:
        lines.append("verdicts:")
        for name, data in report["verdicts"].items():
            lines.append(_verdict_line(name, data))
    if report["census"]:
        lines.append("preimage census:")
        for row in report["census"]:
            lines.append(
                f"  k={row['k']}: Z/{cfg['p']}^{row['domain_digits']} -> "
                f"Z/{cfg['p']}^{row['codomain_digits']}: {row['verdict']}"
            )
    if report["cycles"]:
        lines.append("cycle structure (zero-padded lift):")
        for row in report["cycles"]:
            if row.get("kind") == "orbit":
                flag = (
                    f"enters a {row['cycle_length']}-cycle at step {row['cycle_start']}"
                    if row["cycle_start"] is not None
                    else "no repeat within the horizon"
                )
                lines.append(f"  orbit of {row['x0']} mod {cfg['p']}^{row['m']}: {flag}")
                lines.append(f"    {row['points']}")
            else:
                detail = (
                    f"cycles {row['cycles']}"
                    if row["cycles"] is not None and row["cycle_count"] <= 8
                    else f"lengths {row['cycle_lengths'][:8]}"
                )
                verdict = "UniqueCycle" if row["unique_cycle"] else "MultipleCycles"
                lines.append(
                    f"  m={row['m']}: {row['cycle_count']} cycle(s), {verdict}, {detail}"
                )
    if report["plotset"]:
        ps = report["plotset"]
        lines.append(
            f"plot set: k=1..{ps['k_max']}, {ps['points']} distinct points"
        )
        for box in ps["box"]:
            lines.append(
                f"  grid {box['grid']}: {box['covered']}/{box['cells']} cells covered"
                f" ({box['fraction']})"
            )
    if report["timing"]:
        lines.append(f"elapsed: {report['timing']['seconds']}s")
    return "\n".join(lines) + "\n"


def run_command(argv) -> tuple[int, dict | None]:
    """Run one CLI invocation; returns (exit code, report or None)."""
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else 2), None
    started = time.perf_counter()
    try:
        budget = _resolve_budget(args)
        report = _dispatch(args, budget)
    except (BudgetError, PrecisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3, None
    except (
        MapSyntaxError,
        AutomatonFormatError,
        DegenerateAutomatonError,
        UnboundedLookaheadError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2, None
    report["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
    sys.stdout.write(render_report(report, "text"))
    if args.json:
        Path(args.json).write_text(render_report(report, "json"))
    return 0, report


def main() -> None:
    raise SystemExit(run_command(sys.argv[1:])[0])
