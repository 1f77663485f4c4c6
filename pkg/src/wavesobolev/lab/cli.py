"""Command line entry point: ``wavesobolev <experiment> [options]``.

Exit status is 0 iff every asserted tolerance passed, 1 if a check failed
and 2 for configuration errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .config import EXPERIMENTS, ConfigError, default_config, load_config
from .experiments import run_experiment

__all__ = ["build_parser", "main"]


def _grid_pair(text: str) -> tuple[int, int]:
    try:
        nt, nx = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("--grid expects 'nt,nx'")
    return nt, nx


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wavesobolev", description=__doc__.splitlines()[0])
    p.add_argument("experiment", help=f"one of: {', '.join(EXPERIMENTS)}")
    p.add_argument("--config", help="INI (.ini/.cfg) or JSON (.json) configuration file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=_u64, help="unsigned 64-bit seed")
    p.add_argument("--grid", type=_grid_pair, metavar="NT,NX", help="time and space point counts")
    for name in ("s", "theta", "gamma", "eps", "alpha"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--T", type=lambda s: tuple(float(v) for v in s.split(",")), metavar="T1,T2,...",
                   help="comma-separated slab lengths")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.config:
            cfg = load_config(args.config)
            if cfg.experiment != args.experiment:
                raise ConfigError([f"config is for {cfg.experiment!r}, command asks for {args.experiment!r}"])
        else:
            cfg = default_config(args.experiment)
        grid = cfg.grid
        if args.grid:
            grid = replace(grid, Nt=args.grid[0], Nx=args.grid[1])
        cfg = cfg.with_overrides(grid=grid, seed=args.seed, out=args.out, s=args.s, theta=args.theta,
                                 gamma=args.gamma, eps=args.eps, alpha=args.alpha, T_list=args.T)
        result = run_experiment(cfg)
    except (ConfigError, ValueError) as exc:
        problems = getattr(exc, "problems", [str(exc)])
        for msg in problems:
            print(f"error: {msg}", file=sys.stderr)
        return 2
    for c in result.summary["checks"]:
        print(f"{c['verdict']} {c['quantity']}: measured={c['measured']} tolerance {c['tolerance']}")
    print(f"{result.summary['verdict']} {cfg.experiment} -> {result.csv_path.parent}")
    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())
