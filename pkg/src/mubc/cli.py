"""Command-line interface: ``mubc <subcommand> [options]``.

Exit codes: 0 success, 2 invalid input or bases file, 3 property violation
(``prop1-check``), 4 inadmissible bound parameters.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import bounds
from .errors import InadmissibleError, MubcError
from .measure import purity_sum_check
from .mub import dumps_bases, load_bases, product_mubs, standard_mubs, validate_mub_set
from .search import SearchConfig, extendibility_report, maximize_total_entropy
from .serialize import dumps17, fmt17
from .state import (
    mub_diagonal_mixture,
    random_simplex_weights,
    rng_stream,
    save_density,
    signed_weights,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PROPERTY = 3
EXIT_INADMISSIBLE = 4

PROPERTY_TOL = 1e-9


def _default_seed() -> int:
    return int(os.environ.get("MUBC_SEED", "42"))


def _render(record: dict, fmt: str, entropy_keys=(), bits: bool = False) -> str:
    """Render a flat record; ``bits`` rescales entropy fields in text mode only."""
    if fmt == "json":
        return dumps17(record) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(record.keys())
        writer.writerow([_cell(v) for v in record.values()])
        return buf.getvalue()
    lines = []
    width = max(len(k) for k in record)
    for key, val in record.items():
        if bits and key in entropy_keys and isinstance(val, float):
            text = f"{val / math.log(2):.6g} bits"
        elif isinstance(val, float):
            text = f"{val:.6g}"
        elif val is None:
            text = "-"
        else:
            text = str(val)
        lines.append(f"{key:<{width}}  {text}")
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return fmt17(v)
    return str(v)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _mub_set(args):
    if args.bases_file:
        return load_bases(args.bases_file)
    if args.dim is None:
        raise MubcError("give --dim (prime) or --bases-file")
    return standard_mubs(args.dim, args.n_bases)


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        restarts=args.restarts,
        max_iterations=args.max_iterations,
        convergence_tol=args.tol,
        seed=args.seed,
        parallel=args.parallel,
        workers=args.workers,
        chart=args.chart,
    )


# -- subcommands -------------------------------------------------------------------

def cmd_bound(args) -> int:
    n = args.n_bases if args.n_bases is not None else args.dim + 1
    report = bounds.bound_report(n, args.dim, args.purity, args.coherent_weight)
    if args.format == "csv":
        _emit(bounds.CSV_HEADER + "\n" + report.csv_row() + "\n", args.output)
    else:
        keys = ("h_t_plus", "n_ln_d", "lower_q", "mutual_info_bound")
        _emit(_render(report.to_dict(), args.format, keys, args.bits), args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    d = args.dim
    ns = [args.n_bases] if args.n_bases is not None else list(range(1, d + 2))
    lines = [bounds.CSV_HEADER]
    for n in ns:
        for purity in np.linspace(1.0 / d, 1.0, args.points):
            lines.append(bounds.bound_report(n, d, float(purity)).csv_row())
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    m = _mub_set(args)
    report = validate_mub_set(m.bases)
    record = {
        "dim": m.dim,
        "n_bases": m.n_bases,
        "max_deviation": report.max_deviation,
        "max_orthonormality_defect": report.max_orthonormality_defect,
        "passed": report.passed,
    }
    _emit(_render(record, args.format), args.output)
    return EXIT_OK


def cmd_maximize(args) -> int:
    m = _mub_set(args)
    result = maximize_total_entropy(m, _search_config(args))
    record = {
        "dim": m.dim,
        "n_bases": m.n_bases,
        "best_value": result.best_value,
        "n_ln_d": m.n_bases * math.log(m.dim),
        "h_t_plus_pure": bounds.h_t_plus(m.n_bases, m.dim, 1.0),
        "restarts_run": result.restarts_run,
        "converged_fraction": result.converged_fraction,
    }
    if result.best_params:
        record.update({f"param_{k}": v for k, v in result.best_params.items()})
    if args.format == "json":
        record["best_table"] = result.best_table.p
    if args.state_out:
        save_density(result.best_state, args.state_out)
    keys = ("best_value", "n_ln_d", "h_t_plus_pure")
    _emit(_render(record, args.format, keys, args.bits), args.output)
    return EXIT_OK


def cmd_extendibility(args) -> int:
    m = _mub_set(args)
    report = extendibility_report(
        m,
        _search_config(args),
        coherent_tol=args.coherent_tol,
        separation_tol=args.separation_tol,
        bound_slack=args.bound_slack,
    )
    if args.state_out:
        save_density(report.coherent_state, args.state_out)
    keys = ("n_ln_d", "h_t_plus_pure", "achieved_max")
    _emit(_render(report.to_dict(), args.format, keys, args.bits), args.output)
    return EXIT_OK


def cmd_prop1_check(args) -> int:
    m = _mub_set(args)
    rng = rng_stream(args.seed)
    worst_eq = 0.0
    worst_ineq = 0.0
    for _ in range(args.samples):
        lam = random_simplex_weights((m.n_bases, m.dim), rng)
        if args.allow_signed_weights:
            lam = signed_weights(lam, rng)
        rho = mub_diagonal_mixture(m, lam, allow_signed=args.allow_signed_weights)
        rep = purity_sum_check(rho, m)
        worst_eq = max(worst_eq, rep.equality_deviation)
        worst_ineq = max(worst_ineq, rep.inequality_slack)
    ok = worst_eq < PROPERTY_TOL and worst_ineq <= PROPERTY_TOL
    record = {
        "dim": m.dim,
        "n_bases": m.n_bases,
        "samples": args.samples,
        "max_equality_deviation": worst_eq,
        "max_inequality_violation": max(worst_ineq, 0.0),
        "equality_branch": ok,
        "passed": ok,
    }
    _emit(_render(record, args.format), args.output)
    return EXIT_OK if ok else EXIT_PROPERTY


def cmd_export_bases(args) -> int:
    if args.product:
        a, b = args.product
        m = product_mubs(standard_mubs(a), standard_mubs(b))
    else:
        m = _mub_set(args)
    _emit(dumps_bases(m) + "\n", args.output)
    return EXIT_OK


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--bits", action="store_true", help="show entropies in bits (text output only)")

    bases = argparse.ArgumentParser(add_help=False)
    bases.add_argument("--dim", type=int, help="prime dimension for the built-in MUBs")
    bases.add_argument("--n-bases", type=int, help="number of bases (default d+1)")
    bases.add_argument("--bases-file", help="JSON bases file; supersedes --dim/--n-bases")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--restarts", type=int, default=128)
    search.add_argument("--seed", type=int, default=_default_seed())
    search.add_argument("--max-iterations", type=int, default=2000)
    search.add_argument("--tol", type=float, default=1e-12, help="simplex function-spread tolerance")
    search.add_argument("--parallel", action="store_true")
    search.add_argument("--workers", type=int)
    search.add_argument("--chart", choices=("generic", "amplitude"), default="generic")
    search.add_argument("--state-out", help="write the best state as density-matrix JSON")

    parser = argparse.ArgumentParser(prog="mubc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", parents=[common], help="closed-form certainty bounds")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n-bases", type=int)
    p.add_argument("--purity", type=float, default=1.0)
    p.add_argument("--coherent-weight", type=float, default=0.0)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("sweep", parents=[common], help="CSV grid of bounds over purity")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n-bases", type=int)
    p.add_argument("--points", type=int, default=11)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", parents=[common, bases], help="check a set of bases")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("maximize", parents=[common, bases, search], help="maximize total entropy")
    p.set_defaults(func=cmd_maximize)

    p = sub.add_parser("extendibility", parents=[common, bases, search], help="extendibility report")
    p.add_argument("--coherent-tol", type=float, default=1e-6)
    p.add_argument("--separation-tol", type=float, default=1e-3)
    p.add_argument("--bound-slack", type=float, default=1e-6)
    p.set_defaults(func=cmd_extendibility)

    p = sub.add_parser("prop1-check", parents=[common, bases], help="purity-sum identity on random mixtures")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--allow-signed-weights", action="store_true",
                   help="also shift weights per basis so some are negative (state is PSD-checked)")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.set_defaults(func=cmd_prop1_check)

    p = sub.add_parser("export-bases", parents=[common, bases], help="write bases as JSON")
    p.add_argument("--product", type=int, nargs=2, metavar=("D1", "D2"),
                   help="tensor products of the built-in sets for two primes")
    p.set_defaults(func=cmd_export_bases)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InadmissibleError as exc:
        print(f"mubc: inadmissible parameters: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except (MubcError, OSError) as exc:
        print(f"mubc: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
