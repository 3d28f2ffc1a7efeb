"""Command-line front end: ``altfpt {simulate,estimate,bounds,scenario}``.

Stages communicate through files so that an expensive simulation can be
re-estimated without re-running it.  Every command writes a JSON manifest
next to its output holding the effective configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import CDF_LOWER, CDF_UPPER, PDF_LOWER, bound_curve, check_upper_bound_hypothesis
from .density import default_bandwidth, default_grid, estimate_cdf, estimate_density
from .engine import simulate_batch
from .errors import DomainError, HypothesisError, PreconditionError, RejectionLimitError
from .files import (
    MANIFEST_SCHEMA,
    InputFormatError,
    read_samples,
    write_csv,
    write_manifest,
    write_samples,
)
from .scenarios import ScenarioConfig, preset

logger = logging.getLogger("altfpt")

OUTPUT_DIR_ENV = "ALTFPT_OUTPUT_DIR"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_IO = 4
EXIT_HYPOTHESIS = 5
EXIT_NUMERICS = 6


def manifest_path(out):
    return Path(str(out) + ".manifest.json")


def _manifest(command, config, outputs, started, **extra):
    m = {
        "schema": MANIFEST_SCHEMA,
        "tool_version": __version__,
        "command": command,
        "config": config.to_dict() if config is not None else None,
        "outputs": [str(p) for p in outputs],
        "wall_time_s": round(time.perf_counter() - started, 3),
    }
    m.update(extra)
    return m


def load_config(path):
    """Read a config document, or the config snapshot inside a run manifest."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"{path}: not valid JSON ({exc})") from None
    if isinstance(doc, dict) and doc.get("schema") == MANIFEST_SCHEMA:
        doc = doc.get("config")
    return ScenarioConfig.from_dict(doc)


def cmd_simulate(config: ScenarioConfig, out, workers=1):
    """Simulate ``config.n`` runs and write the sample file plus its manifest."""
    started = time.perf_counter()
    batch = simulate_batch(config.params, config.n, config.seed, workers=workers)
    write_samples(out, batch)
    manifest = _manifest(
        "simulate", config, [out], started,
        seed=config.seed, n=config.n, censored_fraction=batch.censored_fraction,
    )
    write_manifest(manifest_path(out), manifest)
    return batch, manifest


def _density_columns(batch, bandwidth, grid_points):
    """Returns ``(columns, bandwidth, source)`` or ``None`` when there is nothing to smooth."""
    x = batch.crossing_times
    if bandwidth is None:
        if x.size < 2:
            return None
        bandwidth, source = default_bandwidth(x), "silverman"
    else:
        source = "flag"
    grid = default_grid(x, bandwidth, grid_points)
    est = estimate_density(x, len(batch), bandwidth, grid)
    cols = {"t": grid, "h_hat": est.h_hat, "se": est.se, "cdf_hat": estimate_cdf(est)}
    return cols, bandwidth, source


def cmd_estimate(samples_path, out, bandwidth=None, grid_points=512):
    """Kernel density and cdf estimates from a sample file.

    Returns the manifest, or ``None`` (after printing a notice) when there
    are too few crossings to estimate anything.
    """
    started = time.perf_counter()
    batch = read_samples(samples_path)
    result = _density_columns(batch, bandwidth, grid_points)
    if result is None:
        print(
            f"no crossings to estimate from: {len(batch) - batch.n_censored} crossed "
            f"out of {len(batch)} runs (pass --bandwidth to smooth a single crossing)",
            file=sys.stderr,
        )
        return None
    cols, bw, source = result
    write_csv(out, cols)
    manifest = _manifest(
        "estimate", None, [out], started,
        samples=str(samples_path), n=len(batch), n_censored=batch.n_censored,
        bandwidth=bw, bandwidth_source=source, grid_points=grid_points,
    )
    write_manifest(manifest_path(out), manifest)
    return manifest


def _bound_columns(config, grid_points, t_end, upper):
    params = config.params
    k = params.initial_regime
    if upper == "yes":
        check_upper_bound_hypothesis(params)
    with_upper = upper == "yes" or (
        upper == "auto" and params.sigma1 == params.sigma2 and params.mu2 <= params.mu1
    )
    grid = np.linspace(0.0, t_end, grid_points)
    cols = {"t": grid}
    cols[f"pdf_lower_{k}"] = bound_curve(PDF_LOWER, grid, params, k=k).values
    cols[f"cdf_lower_{k}"] = bound_curve(CDF_LOWER, grid, params, k=k).values
    if with_upper:
        cols["cdf_upper"] = bound_curve(CDF_UPPER, grid, params).values
    return cols


def cmd_bounds(config: ScenarioConfig, out, grid_points=None, t_end=None, upper="auto"):
    """Write the analytic bound curves for the configured initial regime."""
    started = time.perf_counter()
    grid_points = grid_points or config.bound_points
    t_end = t_end or config.bounds_horizon
    cols = _bound_columns(config, grid_points, t_end, upper)
    write_csv(out, cols)
    manifest = _manifest("bounds", config, [out], started, grid_points=grid_points, t_end=t_end,
                         columns=list(cols))
    write_manifest(manifest_path(out), manifest)
    return manifest


def cmd_scenario(config: ScenarioConfig, out_dir, workers=1):
    """Simulate, estimate and bound one configuration into ``out_dir``."""
    started = time.perf_counter()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    samples = out_dir / "samples.csv"
    density = out_dir / "density.csv"
    bounds = out_dir / "bounds.csv"

    batch = simulate_batch(config.params, config.n, config.seed, workers=workers)
    write_samples(samples, batch)
    outputs = [samples]
    extra = {}
    result = _density_columns(batch, config.bandwidth, config.grid_points)
    if result is None:
        print("no crossings to estimate from; density.csv not written", file=sys.stderr)
    else:
        cols, bw, source = result
        write_csv(density, cols)
        outputs.append(density)
        extra.update(bandwidth=bw, bandwidth_source=source)
    cols = _bound_columns(config, config.bound_points, config.bounds_horizon, "auto")
    write_csv(bounds, cols)
    outputs.append(bounds)
    manifest = _manifest(
        "scenario", config, outputs, started,
        seed=config.seed, n=config.n, censored_fraction=batch.censored_fraction, **extra,
    )
    write_manifest(out_dir / "manifest.json", manifest)
    return manifest


# -- argument handling -------------------------------------------------------


def _add_source(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=["fig1", "fig2", "fig3"])
    src.add_argument("--config", type=Path, help="JSON config (or a run manifest)")


def _add_run(p):
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--t-max", type=float, dest="t_max")
    p.add_argument("--workers", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(prog="altfpt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"altfpt {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate first-passage times into a sample file")
    _add_source(p)
    _add_run(p)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("estimate", help="kernel density/cdf estimate from a sample file")
    p.add_argument("samples", type=Path)
    p.add_argument("--bandwidth", type=float)
    p.add_argument("--grid-points", type=int, default=512, dest="grid_points")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("bounds", help="analytic pdf/cdf bound curves")
    _add_source(p)
    p.add_argument("--grid-points", type=int, dest="grid_points")
    p.add_argument("--t-max", type=float, dest="t_max", help="right end of the bound grid")
    p.add_argument("--upper", choices=["auto", "yes", "no"], default="auto",
                   help="emit the equal-variance cdf upper bound")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("scenario", help="simulate, estimate and bound in one go")
    _add_source(p)
    _add_run(p)
    p.add_argument("--bandwidth", type=float)
    p.add_argument("--grid-points", type=int, dest="grid_points")
    p.add_argument("--beta", type=float, nargs="+", help="barrier level(s); several values sweep")
    p.add_argument("--out", type=Path)
    return parser


def _base_config(args):
    return preset(args.preset) if args.preset else load_config(args.config)


def _run_overrides(config, args):
    changes = {}
    for key in ("n", "seed", "t_max"):
        if getattr(args, key, None) is not None:
            changes[key] = getattr(args, key)
    return config.replace(**changes) if changes else config


def _default_out(args, name):
    if args.out is not None:
        return args.out
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    base.mkdir(parents=True, exist_ok=True)
    return base / name


def _dispatch(args):
    if args.command == "simulate":
        config = _run_overrides(_base_config(args), args)
        out = _default_out(args, "samples.csv")
        _, manifest = cmd_simulate(config, out, workers=args.workers)
        print(f"wrote {out} (censored fraction {manifest['censored_fraction']:.6g})")
    elif args.command == "estimate":
        out = _default_out(args, "density.csv")
        if cmd_estimate(args.samples, out, args.bandwidth, args.grid_points) is not None:
            print(f"wrote {out}")
    elif args.command == "bounds":
        config = _base_config(args)
        out = _default_out(args, "bounds.csv")
        cmd_bounds(config, out, args.grid_points, args.t_max, args.upper)
        print(f"wrote {out}")
    elif args.command == "scenario":
        config = _run_overrides(_base_config(args), args)
        if args.bandwidth is not None:
            config = config.replace(bandwidth=args.bandwidth)
        if args.grid_points is not None:
            config = config.replace(grid_points=args.grid_points)
        out = _default_out(args, config.name)
        betas = args.beta or [config.params.beta]
        for beta in betas:
            cfg = config.replace(beta=beta) if args.beta else config
            target = Path(out) / f"beta={beta!r}" if len(betas) > 1 else Path(out)
            cmd_scenario(cfg, target, workers=args.workers)
            print(f"wrote {target}/")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "n", None) is not None and args.n < 1:
        parser.error("--n must be a positive integer")
    try:
        _dispatch(args)
    except HypothesisError as exc:
        print(f"altfpt: hypothesis not met: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (DomainError, InputFormatError, KeyError, TypeError) as exc:
        print(f"altfpt: invalid configuration or input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"altfpt: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PreconditionError, RejectionLimitError) as exc:
        print(f"altfpt: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    return EXIT_OK
