"""Command-line front end.

``proxpoint run CONFIG`` performs one solve and writes ``trace.csv`` and
``solution.csv`` (plus PGM images for hologram problems) to the output
directory. ``proxpoint sweep CONFIG`` runs every combination of the
``sweep.solvers``, ``sweep.mu`` and ``sweep.sigma`` lists under a shared
iteration budget and writes one trace per cell and a ``summary.csv``.

Log verbosity is read from the ``PROXPOINT_LOG`` environment variable
(``DEBUG``, ``INFO``, ``WARNING``; default ``WARNING``).

Exit codes: 0 when every solve converged or stopped at an iteration
limit, 1 when a solve aborted, 2 for configuration errors.
"""

import argparse
import csv
import dataclasses
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .baselines import ista_run
from .config import ConfigError, build_problem, load_config, make_ista_params, make_ppp_params
from .io import write_pgm, write_vector_csv
from .ppp import run_ppp
from .prox import objective

__all__ = ["main", "run_command", "sweep_command"]

EXIT_OK, EXIT_ABORT, EXIT_CONFIG = 0, 1, 2
SUMMARY_HEADER = ("solver", "mu", "sigma", "status", "final_psi", "n_outer", "total_inner")


def _solve(cfg, problem, solver, mu=None, sigma=None, budget=None):
    if solver == "ista":
        return ista_run(problem, params=make_ista_params(cfg, budget=budget))
    params = make_ppp_params(cfg, solver=solver, mu=mu, sigma=sigma, budget=budget)
    return run_ppp(problem, params=params)


def _write_outputs(cfg, out_dir, problem, u, trace, image_shape):
    out_dir.mkdir(parents=True, exist_ok=True)
    trace.to_csv(out_dir / "trace.csv")
    write_vector_csv(out_dir / "solution.csv", u)
    if image_shape is not None and cfg.output["pgm"]:
        write_pgm(out_dir / "solution.pgm", u.reshape(image_shape))
        grid = getattr(problem.K, "grid_shape", None)
        if grid is not None:
            write_pgm(out_dir / "data.pgm", problem.g.reshape(grid))


def run_command(cfg, output_dir=None):
    """Execute one solve and report it on standard output."""
    problem, _, image_shape = build_problem(cfg)
    out_dir = Path(output_dir) if output_dir is not None else cfg.output_dir
    u, trace = _solve(cfg, problem, cfg.solver)
    _write_outputs(cfg, out_dir, problem, u, trace, image_shape)
    print(f"solver:      {cfg.solver}")
    print(f"status:      {trace.status}")
    print(f"final psi:   {objective(problem, u):.10g}")
    print(f"outer iters: {trace.n_outer}")
    print(f"inner iters: {trace.total_inner}")
    print(f"output:      {out_dir}")
    if trace.status == "aborted":
        print(f"error: {trace.message}", file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK


def _cell_name(solver, mu, sigma):
    return solver if solver == "ista" else f"{solver}_mu{mu:g}_sigma{sigma:g}"


def _run_cell(cfg, solver, mu, sigma, budget, cell_dir):
    problem, _, image_shape = build_problem(cfg)
    u, trace = _solve(cfg, problem, solver, mu, sigma, budget)
    _write_outputs(cfg, cell_dir, problem, u, trace, image_shape)
    return {
        "solver": solver,
        "mu": "" if solver == "ista" else f"{mu:g}",
        "sigma": "" if solver == "ista" else f"{sigma:g}",
        "status": trace.status,
        "final_psi": f"{objective(problem, u):.15g}",
        "n_outer": trace.n_outer,
        "total_inner": trace.total_inner,
    }


def sweep_command(cfg, output_dir=None, jobs=1):
    """Run the solver x mu x sigma grid and write ``summary.csv``.

    Plain ISTA has neither parameter and contributes a single cell.
    """
    out_dir = Path(output_dir) if output_dir is not None else cfg.output_dir
    budget = cfg.sweep["total_iter_budget"]
    cells = []
    for solver in cfg.sweep["solvers"]:
        if solver == "ista":
            cells.append((solver, None, None))
            continue
        for mu in cfg.sweep["mu"]:
            for sigma in cfg.sweep["sigma"]:
                cells.append((solver, float(mu), float(sigma)))
    # validate every cell before doing any work
    for solver, mu, sigma in cells:
        if solver != "ista":
            try:
                make_ppp_params(cfg, solver=solver, mu=mu, sigma=sigma, budget=budget)
            except ValueError as exc:
                raise cfg.error("sweep.mu", str(exc)) from None
    args = [
        (cfg, s, mu, sigma, budget, out_dir / _cell_name(s, mu, sigma)) for s, mu, sigma in cells
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_cell, *zip(*args)))
    else:
        rows = [_run_cell(*a) for a in args]

    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "summary.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_HEADER, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    for r in rows:
        print(
            f"{_cell_name(r['solver'], float(r['mu'] or 0), float(r['sigma'] or 0)):32s} "
            f"{r['status']:17s} psi={r['final_psi']} outer={r['n_outer']} inner={r['total_inner']}"
        )
    print(f"summary: {out_dir / 'summary.csv'}")
    return EXIT_ABORT if any(r["status"] == "aborted" for r in rows) else EXIT_OK


def _parser():
    parser = argparse.ArgumentParser(
        prog="proxpoint",
        description="Projection proximal-point solvers for l1-regularized least squares.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("run", "solve one configured problem"),
                       ("sweep", "run a mu x sigma x solver parameter study")):
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("config", help="TOML configuration file")
        cmd.add_argument("--output-dir", help="override output_dir from the config")
        cmd.add_argument("--seed", type=int, help="override seed from the config")
        if name == "sweep":
            cmd.add_argument("--jobs", type=int, default=1, help="cells run in parallel")
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    level = os.environ.get("PROXPOINT_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
        if args.command == "run":
            return run_command(cfg, args.output_dir)
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        return sweep_command(cfg, args.output_dir, args.jobs)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
