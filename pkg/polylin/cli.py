import argparse
import logging
import sys
from typing import Optional, Sequence

from .config import Tolerances
from .exceptions import PolylinException, UsageException
from .experiment import Experiment, ExperimentConfig, parse_linearizations, resolve_scaling
from .matpoly import random_polynomial
from .mpjson import dump_polynomial, dumps, load_polynomial
from .report import plot_ratios, read_plot_points

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_ERROR = 2


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="in_path", help="input file (MPJSON polynomial, or diagnostics for plot)")
    common.add_argument("--out", dest="out_path", help="output file; standard output if omitted")
    common.add_argument("--seed", type=int, default=0, help="seed of the random problem (default 0)")
    common.add_argument(
        "--scaling",
        default="none",
        help="none | maxnorm | tropical:<j> | user:<beta>,<gamma> (default none)",
    )
    common.add_argument("--lin", default="T,R,D1,Dk,C1", help="comma-separated linearizations (default T,R,D1,Dk,C1)")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="table format (default csv)")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    return common


def _problem_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, help="matrix dimension of a random problem")
    parser.add_argument("--k", type=int, help="grade of a random problem")
    parser.add_argument("--hermitian", action="store_true", help="symmetrize the random coefficients")


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="polylin",
        description="Block-symmetric linearizations of matrix polynomials: conditioning and backward-error experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="write a random matrix polynomial as MPJSON")
    _problem_options(gen)

    sub.add_parser("scale", parents=[common], help="scale an MPJSON polynomial and record (beta, gamma)")

    for name, text in (
        ("ratios", "tabulate condition-number and backward-error ratios"),
        ("bounds", "check every bound; exit status 1 on a violation"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        _problem_options(p)
        p.add_argument("--plot", dest="plot_path", help="also write the ratio plot as SVG")
        if name == "bounds":
            p.add_argument("--bound-scale", type=float, help="multiply every upper bound (harness self-test)")

    sub.add_parser("plot", parents=[common], help="plot a diagnostics CSV/JSON file as SVG")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _emit(text: str, out_path: Optional[str]) -> None:
    if out_path is None:
        sys.stdout.write(text)
        return
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    logger.info(f"Wrote {out_path}")


def cmd_gen(args: argparse.Namespace) -> int:
    if args.n is None or args.k is None:
        parser_error("gen needs --n and --k")
    P = random_polynomial(args.n, args.k, args.seed, hermitian=args.hermitian)
    metadata = {"generator": "philox", "n": args.n, "k": args.k, "seed": args.seed, "hermitian": args.hermitian}
    if args.out_path is None:
        sys.stdout.write(dumps(P, metadata))
    else:
        dump_polynomial(P, args.out_path, metadata)
    return EXIT_OK


def cmd_scale(args: argparse.Namespace) -> int:
    if args.in_path is None:
        parser_error("scale needs --in")
    P, metadata = load_polynomial(args.in_path)
    spec = resolve_scaling(args.scaling, P)
    if spec is None:
        logger.warning("Scaling 'none' requested; the polynomial is copied unchanged")
        scaled = P
    else:
        scaled = P.scale(spec)
        metadata = dict(metadata, scaling=spec.to_dict(), source=str(args.in_path))
    _emit(dumps(scaled, metadata), args.out_path)
    return EXIT_OK


def _experiment(args: argparse.Namespace, tolerances: Tolerances) -> Experiment:
    config = ExperimentConfig(
        n=args.n,
        k=args.k,
        seed=args.seed,
        path=args.in_path,
        hermitian=args.hermitian,
        scaling=args.scaling,
        linearizations=parse_linearizations(args.lin),
        tolerances=tolerances,
    )
    return Experiment(config)


def _write_table(table, args: argparse.Namespace) -> None:
    text = table.to_csv() if args.format == "csv" else table.to_json()
    _emit(text, args.out_path)
    if args.out_path is not None:
        sys.stdout.write(table.summary_text())
    if args.plot_path:
        plot_ratios(table.plot_points(), args.plot_path)


def cmd_ratios(args: argparse.Namespace) -> int:
    table = _experiment(args, Tolerances.from_env()).ratios()
    _write_table(table, args)
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    tolerances = Tolerances.from_env()
    if args.bound_scale is not None:
        tolerances = tolerances.override(bound_scale=args.bound_scale)
    table, violations = _experiment(args, tolerances).bounds()
    _write_table(table, args)
    if violations:
        logger.error(f"{len(violations)} bound violations")
        return EXIT_VIOLATIONS
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    if args.in_path is None or args.out_path is None:
        parser_error("plot needs --in and --out")
    plot_ratios(read_plot_points(args.in_path), args.out_path)
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "scale": cmd_scale,
    "ratios": cmd_ratios,
    "bounds": cmd_bounds,
    "plot": cmd_plot,
}


def parser_error(message: str) -> None:
    raise UsageException(message)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the polylin command line.

    Returns:
        int: 0 on success, 1 if a bound is violated, 2 on errors.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except UsageException as e:
        parser.print_usage(sys.stderr)
        logger.error(str(e))
        return EXIT_ERROR
    except PolylinException as e:
        logger.error(str(e))
        return EXIT_ERROR
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
