from __future__ import annotations

import argparse
import logging
import sys
import traceback
from typing import List, Optional

from lozenge_lab.dimers.double_dimer import superimpose
from lozenge_lab.dimers.sampler import cftp
from lozenge_lab.errors import LabError
from lozenge_lab.lab.config import ExperimentConfig, load_experiment_config
from lozenge_lab.lab.experiments import run_experiment
from lozenge_lab.lab.perturbations import domain_pair
from lozenge_lab.lab.render import render_svg
from lozenge_lab.reporting.output_manager import OutputManager, save_report
from lozenge_lab.trees.graph import disk_grid
from lozenge_lab.trees.ust import wilson_ust
from lozenge_lab.utils.logger import default_logger as logger, log_exception
from lozenge_lab.utils.rng import derive_rng

EXPERIMENTS = ("sample", "robustness", "spreadout", "winding", "decoupling", "crossing-estimate")
RENDER_KINDS = ("tiling", "double-dimer", "tree")

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_ERROR = 2


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON experiment configuration")
    parser.add_argument("--seed", type=int, help="Master seed")
    parser.add_argument("--workers", type=int, help="Worker processes")
    parser.add_argument("--samples", type=int, help="Samples per schedule point")
    parser.add_argument("--progress", action="store_true", default=None,
                        help="Show progress bars")


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="lozenge-lab",
        description="Lozenge tiling and spanning-tree experiments",
    )
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")
    commands = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        sub = commands.add_parser(name, help=f"Run the {name} experiment")
        _add_run_options(sub)
        sub.add_argument("--out", help="Report path without extension (default: output/<command>)")
        if name == "sample":
            sub.add_argument("--domain", help="Domain to tile, hex:a,b,c")
            sub.add_argument("--n", dest="samples", type=int, help="Number of tilings (same as --samples)")
    render = commands.add_parser("render", help="Draw a fresh sample as SVG")
    render.add_argument("what", choices=RENDER_KINDS)
    _add_run_options(render)
    render.add_argument("--size", type=int, default=None,
                        help="Hexagon side (tiling, double-dimer) or 1/mesh (tree)")
    render.add_argument("--out", help="SVG path (default: output/<what>.svg)")
    return parser.parse_args(argv)


def _config(args: argparse.Namespace, kind: Optional[str]) -> ExperimentConfig:
    overrides = {
        "kind": kind,
        "seed": args.seed,
        "workers": args.workers,
        "samples": args.samples,
        "progress": args.progress,
        "domain": getattr(args, "domain", None),
    }
    return load_experiment_config(args.config, overrides)


def run_command(args: argparse.Namespace) -> int:
    """Run one experiment and save its report; returns the exit code."""
    cfg = _config(args, args.command)
    report = run_experiment(cfg)
    save_report(report, args.out or args.command)
    if not report.ok:
        failed = ", ".join(k for k, v in report.invariants.items() if not v)
        logger.error(f"Run-level invariants failed: {failed}")
        return EXIT_INVARIANT
    return EXIT_OK


def run_render(args: argparse.Namespace) -> int:
    """Sample one object with the configured seed and draw it."""
    cfg = _config(args, "sample")
    rng = derive_rng(cfg.seed)
    if args.what == "tiling":
        domain, _ = domain_pair(args.size or cfg.hexagon, "none")
        obj = cftp(domain, rng)
    elif args.what == "double-dimer":
        domain, perturbed = domain_pair(args.size or cfg.sizes[0], cfg.perturbation)
        obj = superimpose(cftp(domain, rng), cftp(perturbed, rng))
    else:
        obj = wilson_ust(disk_grid(1.0 / (args.size or 16), 1.0), rng=rng)
    dest = OutputManager().resolve(args.out or f"{args.what}.svg")
    render_svg(obj, dest)
    logger.log(f"Rendered {args.what} to {dest}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_arguments(argv)
    if args.debug:
        logging.getLogger().setLevel(logging.DEBUG)
        logger.set_level(logging.DEBUG)

    try:
        if args.command == "render":
            return run_render(args)
        return run_command(args)
    except LabError as exc:
        log_exception(logger, f"{args.command} failed", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except KeyboardInterrupt:
        logger.log("Interrupted.")
        return EXIT_ERROR
    except OSError as exc:
        logger.error(f"I/O failure: {exc}")
        logger.debug(traceback.format_exc())
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
