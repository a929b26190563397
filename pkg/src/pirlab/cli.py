"""``pirlab`` command-line entry point.

Exit status: 0 on success, 1 on data errors, 2 on usage errors.  Errors are
reported on stderr as a single JSON object.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import experiment as ex
from .exceptions import PirlabError
from .instances import GENERATOR_KINDS, generate_problem, load_instance
from .pattern_geometry import GridSpec, build_pattern_stack, render_svg
from .prime_relations import build_hierarchy, format_signs, ptm_sequence
from .swarm import RunConfig, run
from .validation import check_integers


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, newline="\n")
    else:
        sys.stdout.write(text)


def _default_seed() -> int:
    raw = os.environ.get("PIRLAB_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"PIRLAB_SEED must be an integer, got {raw!r}") from None


def _read_integers(path: str) -> list[int]:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = text.replace(",", " ").split()
    try:
        return [int(x) for x in data]
    except (TypeError, ValueError) as exc:
        raise PirlabError(f"cannot read integers from {path}: {exc}") from exc


def cmd_ptm(args) -> None:
    _write(format_signs(ptm_sequence(args.length)) + "\n", args.out)


def _signs(args):
    return tuple(args.signs) if args.signs else ptm_sequence(args.length)


def cmd_hierarchy(args) -> None:
    signs = _signs(args)
    ints = check_integers(_read_integers(args.integers), len(signs)) if args.integers else None
    h = build_hierarchy(signs, ints)
    _write(h.to_json() + "\n", args.out)


def _grid_and_signs(args):
    signs = _signs(args)
    return signs, GridSpec(args.eps, args.delta, len(signs))


def cmd_geometry(args) -> None:
    signs, grid = _grid_and_signs(args)
    stack = build_pattern_stack(signs, grid, args.max_level, tol=args.tol)
    _write(stack.to_csv(), args.out)


def cmd_render(args) -> None:
    signs, grid = _grid_and_signs(args)
    stack = build_pattern_stack(signs, grid, args.max_level)
    _write(render_svg(stack, grid), args.out)


def _run_config(args, v: float = 0.0) -> RunConfig:
    return RunConfig(
        n_agents=args.agents,
        v=v,
        seed=args.seed if args.seed is not None else _default_seed(),
        tour_mode="closed" if args.closed else "open",
        ptm_offset_mode=args.ptm_offsets,
    )


def cmd_tsp_run(args) -> None:
    instance = load_instance(args.instance, tsplib_round=args.tsplib_round)
    result = run(instance, _run_config(args, args.v))
    _write(result.to_json() + "\n", args.out)


def _instances(args):
    if args.instances:
        folder = Path(args.instances)
        if not folder.is_dir():
            raise PirlabError(f"{folder} is not a directory")
        files = sorted(p for p in folder.iterdir() if p.suffix.lower() in (".json", ".csv", ".tsp"))
        if not files:
            raise PirlabError(f"no instance files in {folder}")
        return [load_instance(p, tsplib_round=args.tsplib_round) for p in files]
    seed = args.seed if args.seed is not None else _default_seed()
    return [generate_problem(args.generate, args.n, seed + i) for i in range(args.count)]


def cmd_sweep(args) -> None:
    problems = _instances(args)
    cfg = ex.SweepConfig(ex.default_grid(args.grid), args.replicates, _run_config(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows, reports = [], []
    for i, p in enumerate(problems):
        sweep = ex.sweep_v(p, cfg, i, args.jobs)
        (out / f"sweep_{i:03d}.csv").write_text(sweep.to_csv(), newline="\n")
        rows.append(ex.problem_row(i, p, sweep))
        if len(sweep.grid) >= 3:
            rep = ex.concavity_report(sweep)
            reports.append((i, rep))
    problems_csv = ex.rows_to_csv(rows)
    (out / "problems.csv").write_text(problems_csv, newline="\n")
    lines = ["id,curvature,concave,vertex,interior_max,sign_changes,unimodal"]
    for i, r in reports:
        lines.append(f"{i},{r.curvature!r},{int(r.concave)},{r.vertex!r},{int(r.interior_max)},"
                     f"{r.sign_changes},{int(r.unimodal)}")
    (out / "concavity.csv").write_text("\n".join(lines) + "\n", newline="\n")
    sys.stdout.write(problems_csv)


def cmd_fit(args) -> None:
    rows = ex.rows_from_csv(Path(args.problems).read_text())
    fit = ex.fit_line([r.c_p for r in rows], [r.c_a for r in rows])
    _write(fit.summary_csv(), args.out)


def cmd_predict(args) -> None:
    value = ex.predict_complexity(args.cp, args.slope, args.intercept)
    _write(f"{value:.12g}\n", args.out)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _sign_string(text: str) -> tuple[int, ...]:
    if not text or set(text) - {"+", "-"}:
        raise argparse.ArgumentTypeError("signs must be a non-empty string of '+' and '-'")
    return tuple(1 if c == "+" else -1 for c in text)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pirlab", description="Prime integer relation hierarchies, pattern geometry "
                                                "and the PTM-guided multi-agent TSP experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def seq_args(p):
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--length", type=_positive_int, help="use the PTM sequence of this length")
        group.add_argument("--signs", type=_sign_string, help="explicit sign string such as '+--+'")
        p.add_argument("--out", help="write to this file instead of stdout")

    p = sub.add_parser("ptm", help="print a PTM prefix as +/- characters")
    p.add_argument("--length", type=_positive_int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ptm)

    p = sub.add_parser("hierarchy", help="build the prime integer relation hierarchy (JSON)")
    seq_args(p)
    p.add_argument("--integers", help="file with the integer assignment (JSON list or whitespace separated)")
    p.set_defaults(func=cmd_hierarchy)

    for name, func, help_text in (
        ("geometry", cmd_geometry, "pattern metrics CSV (level, block, W, H, S, arc_length)"),
        ("render", cmd_render, "SVG drawing of the pattern stack"),
    ):
        p = sub.add_parser(name, help=help_text)
        seq_args(p)
        p.add_argument("--eps", default="1", help="abscissa unit as p/q (default 1)")
        p.add_argument("--delta", default="1", help="ordinate unit as p/q (default 1)")
        p.add_argument("--max-level", type=int, default=None)
        if name == "geometry":
            p.add_argument("--tol", type=float, default=1e-9, help="arc length quadrature tolerance")
        p.set_defaults(func=func)

    def run_args(p):
        p.add_argument("--agents", type=_positive_int, default=50)
        p.add_argument("--seed", type=int, default=None, help="master seed (default $PIRLAB_SEED or 0)")
        p.add_argument("--closed", action="store_true", help="add the return leg to city 0")
        p.add_argument("--ptm-offsets", choices=("staggered", "shared"), default="staggered")
        p.add_argument("--tsplib-round", action="store_true", help="TSPLIB nint distance rounding")

    p = sub.add_parser("tsp-run", help="one run of the multi-agent algorithm (JSON)")
    p.add_argument("--instance", required=True, help="JSON coords, CSV matrix or TSPLIB EUC_2D file")
    p.add_argument("--v", type=float, required=True)
    run_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tsp_run)

    p = sub.add_parser("sweep", help="sweep v over a grid for a set of instances (CSV files)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--instances", help="directory of instance files")
    src.add_argument("--generate", choices=GENERATOR_KINDS, help="generate instances instead")
    p.add_argument("--count", type=_positive_int, default=10, help="generated instance count")
    p.add_argument("--n", type=_positive_int, default=30, help="generated instance size")
    p.add_argument("--grid", type=_positive_int, default=21, help="number of equally spaced v values")
    p.add_argument("--replicates", type=_positive_int, default=20)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    run_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="least-squares fit of C(A) on C(p) from a sweep's problems.csv")
    p.add_argument("--problems", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="predicted C(A) = slope * C(p) + intercept")
    p.add_argument("--cp", type=float, required=True)
    p.add_argument("--slope", type=float, default=ex.DEFAULT_SLOPE)
    p.add_argument("--intercept", type=float, default=ex.DEFAULT_INTERCEPT)
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except UsageError as exc:
        _emit_error("usage", str(exc))
        return 2
    except (PirlabError, OSError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
