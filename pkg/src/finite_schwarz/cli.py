"""Command-line front end: ``finite-schwarz run``, ``finite-schwarz presets``."""

from __future__ import annotations

import argparse
import re
import sys
from importlib import resources

from . import report, scenario
from .errors import FiniteSchwarzError, ScenarioError
from .verify import FAIL, HYPOTHESIS_VIOLATED, PASS, Grid

EXIT_CODES = {PASS: 0, FAIL: 2, HYPOTHESIS_VIOLATED: 3}
EXIT_USAGE = 1


def _preset_dir():
    return resources.files("finite_schwarz") / "presets"


def list_presets():
    """``[(name, description)]`` for every packaged preset, sorted by name."""
    out = []
    for entry in sorted(_preset_dir().iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".toml"):
            sf = load_preset(entry.name[: -len(".toml")])
            out.append((sf.name, sf.description))
    return out


def load_preset(name):
    entry = _preset_dir() / f"{name}.toml"
    if not entry.is_file():
        raise ScenarioError(f"unknown preset {name!r}")
    return scenario.parse(entry.read_text(encoding="utf-8"), f"preset:{name}", name=name)


def _grid(text):
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError("expected NxM, e.g. 64x128")
    try:
        return Grid(int(m.group(1)), int(m.group(2)))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0 or x == float("inf"):
        raise argparse.ArgumentTypeError("must be a positive finite number")
    return x


def build_parser():
    p = argparse.ArgumentParser(prog="finite-schwarz", description="Verify finite shrinking lemmas on concrete scenarios.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario file or a packaged preset")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("file", nargs="?", help="scenario file (TOML)")
    src.add_argument("--preset", help="name of a packaged preset")
    r.add_argument("--out", help="write the machine-readable report (JSON) here")
    r.add_argument("--points", action="store_true", help="include the per-point table in the report")
    r.add_argument("--plot", help="write the grid table (CSV) here")
    r.add_argument("--grid", type=_grid, help="override the grid, NxM (radial x angular)")
    r.add_argument("--tol-ineq", type=_positive, help="override the inequality slack")
    r.add_argument("--tol-subharmonic", type=_positive, help="override the subharmonicity slack")
    r.add_argument("--quiet", action="store_true", help="print only the verdict line")

    sub.add_parser("presets", help="list packaged presets")
    return p


def _run(args, out, err):
    try:
        sf = load_preset(args.preset) if args.preset else scenario.load(args.file)
    except ScenarioError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    tol = {"ineq_slack": args.tol_ineq, "subharmonic_slack": args.tol_subharmonic}
    try:
        outcome = scenario.run(sf, grid=args.grid, tolerances=tol)
    except FiniteSchwarzError as exc:
        print(f"error: {sf.origin}: {exc}", file=err)
        return EXIT_USAGE

    lines = report.summary_lines(sf, outcome)
    print(lines[0] if args.quiet else "\n".join(lines), file=out)
    try:
        if args.out:
            report.write(report.build(sf, outcome, include_points=args.points), args.out)
        if args.plot:
            report.write_plot(outcome, args.plot)
    except (OSError, ValueError) as exc:
        print(f"error: cannot write output: {exc}", file=err)
        return EXIT_USAGE
    return EXIT_CODES[outcome.verdict]


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; the contract reserves 2 for FAIL.
        return EXIT_USAGE if exc.code else 0
    if args.command == "presets":
        for name, desc in list_presets():
            print(f"{name:22s} {desc}", file=out)
        return 0
    return _run(args, out, err)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
