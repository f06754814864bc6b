"""Batch front end: parse a config, run one mode, emit CSV tables and SVG.

Usage:
    biostab <mode> --config <path> [--set key=value ...] [--out <dir>]

Exit codes: 0 success, 2 configuration error, 3 convergence failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

import numpy as np

from . import neutral as neutral_mod
from . import output
from .config import MODES, RunConfig, load_config
from .errors import BiostabError, ConfigError, ConvergenceError
from .stability import ModeProblem, growth_spectrum, refine_nrk, solve_neutral_R
from .steady import solve_basic_state

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4


def _k_grid(cfg: RunConfig) -> np.ndarray:
    return neutral_mod.default_k_grid(cfg.k_min, cfg.k_max, cfg.n_k)


def _complementary_R(cfg: RunConfig) -> float:
    """The prescribed Rayleigh number that is *not* the eigen-parameter."""
    return cfg.R_T if cfg.eigen_parameter == "RB" else cfg.R_B


def _run_steady(cfg: RunConfig, out_dir: str) -> str:
    state = solve_basic_state(cfg.suspension_params(), cfg.n_grid)
    output.write_steady_csv(state, os.path.join(out_dir, "steady.csv"))
    i = int(np.argmax(state.n_p))
    return f"n={cfg.n_grid} max n_p={state.n_p[i]:.6g} at z={state.z[i]:.4g}"


def _run_spectrum(cfg: RunConfig, out_dir: str) -> str:
    state = solve_basic_state(cfg.suspension_params(), cfg.n_grid)
    mp = ModeProblem(
        state=state,
        params=cfg.suspension_params(),
        k=cfg.k,
        R_B=cfg.R_B,
        eigen_param=cfg.eigen_parameter,
    )
    spec = growth_spectrum(mp)
    output.write_spectrum_csv(spec, os.path.join(out_dir, "spectrum.csv"))
    lead = spec.leading
    return f"k={cfg.k:g} leading gamma={lead.real:.6g}{lead.imag:+.6g}i ({spec.n_modes} modes)"


def _trace(cfg: RunConfig) -> neutral_mod.NeutralCurve:
    return neutral_mod.trace_branch(
        cfg.suspension_params(),
        _k_grid(cfg),
        eigen_param=cfg.eigen_parameter,
        R_seed_bracket=cfg.seed_bracket(),
        R_B=cfg.R_B,
        n=cfg.n_trace,
        rtol=cfg.tol_R,
    )


def _run_neutral(cfg: RunConfig, out_dir: str) -> str:
    curve = _trace(cfg)
    output.write_neutral_csv(curve, os.path.join(out_dir, "neutral_curve.csv"))
    output.emit_svg(
        [curve],
        os.path.join(out_dir, "neutral_curve.svg"),
        labels=[f"{cfg.eigen_parameter}(k)"],
        ylabel=f"R_{cfg.eigen_parameter[1]}",
    )
    lowest = min(curve.points, key=lambda p: p.R)
    return (
        f"{len(curve.points)} points, {len(curve.gaps)} gaps, "
        f"lowest R={lowest.R:.6g} at k={lowest.k:.4g}"
    )


def _run_critical(cfg: RunConfig, out_dir: str) -> str:
    curve = _trace(cfg)
    cp = neutral_mod.find_critical(curve)
    # Polish the located minimum on the reporting grid; keep the matrix
    # value if the Newton stage fails.
    state = solve_basic_state(cfg.suspension_params(), cfg.n_grid)
    mp = ModeProblem(
        state=state,
        params=cfg.suspension_params(),
        k=cp.k_c,
        R_B=cfg.R_B,
        eigen_param=cfg.eigen_parameter,
    )
    guess = solve_neutral_R(mp, (cp.R_c - max(1.0, 0.05 * abs(cp.R_c)),
                                 cp.R_c + max(1.0, 0.05 * abs(cp.R_c))), rtol=cfg.tol_R)
    try:
        refined = refine_nrk(guess, mp)
        cp = neutral_mod.CriticalPoint(
            k_c=cp.k_c, R_c=refined.R, sigma_c=refined.sigma, oscillatory=refined.oscillatory
        )
    except ConvergenceError as exc:
        logger.warning("NRK refinement failed, keeping matrix value: %s", exc)
        cp = neutral_mod.CriticalPoint(
            k_c=cp.k_c, R_c=guess.R, sigma_c=guess.sigma, oscillatory=guess.oscillatory
        )
    output.write_critical_csv(
        [(_complementary_R(cfg), cp.k_c, cp.R_c, cp.sigma_c)],
        os.path.join(out_dir, "critical.csv"),
    )
    output.write_neutral_csv(curve, os.path.join(out_dir, "neutral_curve.csv"))
    output.emit_svg(
        [curve],
        os.path.join(out_dir, "neutral_curve.svg"),
        labels=[f"{cfg.eigen_parameter}(k)"],
        criticals=[cp],
        ylabel=f"R_{cfg.eigen_parameter[1]}",
    )
    kind = "oscillatory" if cp.oscillatory else "stationary"
    return f"k_c={cp.k_c:.6g} R_c={cp.R_c:.8g} sigma_c={cp.sigma_c:.4g} ({kind})"


def _run_sweep(cfg: RunConfig, out_dir: str) -> str:
    values = cfg.sweep_value_list()
    result = neutral_mod.sweep(
        cfg.suspension_params(),
        cfg.sweep_parameter,
        values,
        k_grid=_k_grid(cfg),
        eigen_param=cfg.eigen_parameter,
        R_seed_bracket=cfg.seed_bracket(),
        R_B=cfg.R_B,
        n=cfg.n_trace,
        rtol=cfg.tol_R,
    )
    output.write_sweep_csv(result, os.path.join(out_dir, "sweep.csv"))
    plotted = [
        (curve, row)
        for curve, row in zip(result.curves, result.rows)
        if curve is not None and len(curve.points) >= 2
    ]
    if plotted:
        output.emit_svg(
            [c for c, _ in plotted],
            os.path.join(out_dir, "sweep.svg"),
            labels=[f"{cfg.sweep_parameter}={r.value}" for _, r in plotted],
            criticals=[
                neutral_mod.CriticalPoint(r.k_c, r.R_c, r.sigma_c)
                if r.error is None
                else None
                for _, r in plotted
            ],
            ylabel=f"R_{cfg.eigen_parameter[1]}",
        )
    failed = sum(1 for r in result.rows if r.error is not None)
    return f"{len(result.rows)} rows ({failed} failed), parameter {cfg.sweep_parameter}"


_RUNNERS = {
    "steady": _run_steady,
    "spectrum": _run_spectrum,
    "neutral": _run_neutral,
    "critical": _run_critical,
    "sweep": _run_sweep,
}


def run(config_path, overrides=(), mode=None, out_dir=None) -> int:
    """Execute one mode; returns the process exit code."""
    t0 = time.perf_counter()
    try:
        cfg = load_config(config_path, overrides)
        if mode is not None:
            cfg.mode = mode
        if cfg.mode not in MODES:
            raise ConfigError(f"mode {cfg.mode!r} is not one of {MODES}")
        target = out_dir if out_dir is not None else cfg.out_dir
        os.makedirs(target, exist_ok=True)
        summary = _RUNNERS[cfg.mode](cfg, target)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, BiostabError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    wall = time.perf_counter() - t0
    print(f"{cfg.mode}: {summary}; wall {wall:.2f} s")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="biostab",
        description="Linear-stability solver for photo-thermal bioconvection in a porous layer.",
    )
    parser.add_argument("mode", choices=MODES, help="what to compute")
    parser.add_argument("--config", required=True, help="path to the run configuration")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="key=value",
        help="override a config key (repeatable)",
    )
    parser.add_argument("--out", default=None, help="output directory (default: config out_dir)")
    args = parser.parse_args(argv)
    if not logging.getLogger().handlers:
        logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return run(args.config, overrides=args.overrides, mode=args.mode, out_dir=args.out)


if __name__ == "__main__":
    sys.exit(main())
