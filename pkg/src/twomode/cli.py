"""Command-line entry point: ``twomode spectrum|integrals|verify``.

Exit codes: 0 success, 1 property failure (verify), 2 bad input,
3 physics refusal (modes not localized, degenerate perturbation theory),
4 numerical failure (no convergence, grid too coarse).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .eigensolver import NoConvergence
from .modes import GridTooCoarse, NotLocalized
from .perturbation import DegenerateSpectrum
from .pipeline import ScenarioError, load_scenario, run_integrals, run_spectrum, to_csv, to_json
from .verify import DEFAULT_THETAS, format_results, timed_suite

EXIT_PROPERTY = 1
EXIT_SCHEMA = 2
EXIT_PHYSICS = 3
EXIT_NUMERIC = 4


def _parse_floats(raw: str) -> tuple[float, ...]:
    return tuple(float(x) for x in raw.split(",") if x.strip())


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text, encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twomode", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def io_flags(cmd):
        cmd.add_argument("--input", type=Path, required=True, help="scenario JSON file")
        cmd.add_argument("--output", type=Path, default=None, help="write report here instead of stdout")
        cmd.add_argument("--format", choices=["json", "csv"], default="json")

    spec = sub.add_parser("spectrum", help="analytic vs numeric spectrum with perturbative corrections")
    io_flags(spec)
    spec.add_argument("--exact", action="store_true",
                      help="report the exact spectrum when perturbation theory refuses (degenerate levels)")

    ints = sub.add_parser("integrals", help="mode integrals and model parameters from a trap potential")
    io_flags(ints)
    ints.add_argument("--self-check", action="store_true",
                      help="fail if doubling the grid shifts the lowest trap levels by more than 1e-6")

    ver = sub.add_parser("verify", help="run the property suite")
    ver.add_argument("--max-n", type=int, default=8)
    ver.add_argument("--thetas", type=_parse_floats, default=DEFAULT_THETAS,
                     help="comma-separated mixing angles")
    ver.add_argument("--output", type=Path, default=None)
    ver.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


def _fail(code: int, where: str, exc: Exception) -> int:
    print(f"twomode: {where}: {exc}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "verify":
        results, elapsed = timed_suite(max_n=args.max_n, thetas=args.thetas, inject_fault=args.inject_fault)
        _emit(format_results(results), args.output)
        print(f"verify finished in {elapsed:.1f} s", file=sys.stderr)
        return 0 if all(r.passed for r in results) else EXIT_PROPERTY

    try:
        scenario = load_scenario(args.input)
        if args.command == "spectrum":
            report = run_spectrum(scenario, exact=args.exact)
        else:
            report = run_integrals(scenario, self_check=args.self_check)
    except ScenarioError as exc:
        return _fail(EXIT_SCHEMA, "scenario", exc)
    except NotLocalized as exc:
        return _fail(EXIT_PHYSICS, "modes.build_modes", exc)
    except DegenerateSpectrum as exc:
        return _fail(EXIT_PHYSICS, "perturbation.second_order", exc)
    except NoConvergence as exc:
        return _fail(EXIT_NUMERIC, "eigensolver.jacobi_eigh", exc)
    except GridTooCoarse as exc:
        return _fail(EXIT_NUMERIC, "modes.solve_trap", exc)

    _emit(to_csv(report) if args.format == "csv" else to_json(report), args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
