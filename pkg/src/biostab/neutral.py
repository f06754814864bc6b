"""Neutral-curve tracing over wavenumber, critical points, parameter sweeps.

The first branch of the neutral curve R(k) is traced by continuation: each
wavenumber reuses the previous marginal Rayleigh number as the bracket
center. The critical point is the curve minimum over k, refined by a
golden-section search that re-solves the marginal problem at every probe.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BiostabError, ConvergenceError, KRangeError, NoNeutralPointError
from .model import SuspensionParams
from .stability import ModeProblem, NeutralPoint, solve_neutral_R
from .steady import solve_basic_state

logger = logging.getLogger(__name__)

SWEEPABLE = ("R_T", "Le", "Da", "tau_H", "G_c", "V_c", "top_boundary")

GOLDEN_K_TOL = 1e-3
_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def default_k_grid(k_min: float = 0.5, k_max: float = 10.0, n_k: int = 40) -> np.ndarray:
    """Logarithmically spaced wavenumber grid bracketing the usual minima."""
    return np.geomspace(k_min, k_max, n_k)


@dataclass(frozen=True)
class NeutralCurve:
    """Marginal points over a wavenumber grid for one configuration.

    points are sorted by k ascending; wavenumbers where no marginal R was
    bracketed are recorded in gaps rather than invented. R_B is the
    prescribed complementary Rayleigh number used when eigen_param='RT'.
    """

    points: tuple
    gaps: tuple
    eigen_param: str
    params: SuspensionParams
    R_B: float = 0.0
    n: int = 200
    rtol: float = 1e-6


@dataclass(frozen=True)
class CriticalPoint:
    """Minimum of a neutral curve: the first mode to destabilize."""

    k_c: float
    R_c: float
    sigma_c: float
    oscillatory: bool = False


@dataclass(frozen=True)
class SweepRow:
    value: object
    k_c: float
    R_c: float
    sigma_c: float
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    """One critical point per requested parameter value, in request order."""

    param: str
    rows: tuple
    curves: tuple = field(default=())


def _continuation_bracket(R_prev: float, rtol_pad: float = 0.25) -> tuple[float, float]:
    half = max(rtol_pad * abs(R_prev), 1.0)
    return (R_prev - half, R_prev + half)


def trace_branch(
    params: SuspensionParams,
    k_grid: np.ndarray,
    eigen_param: str = "RB",
    R_seed_bracket: tuple[float, float] = (100.0, 30000.0),
    R_B: float = 0.0,
    n: int = 200,
    rtol: float = 1e-6,
) -> NeutralCurve:
    """Trace the first neutral branch over the given wavenumber grid.

    k_grid must be strictly monotone and positive; it is walked in the
    given order (continuation), and the returned curve is sorted by k.
    The first solved point uses R_seed_bracket, later ones re-center on
    the previous marginal R. More than 50% failed wavenumbers aborts.
    """
    k_grid = np.asarray(k_grid, dtype=float)
    if k_grid.ndim != 1 or k_grid.size < 2:
        raise ValueError("k_grid must be a 1-D array with at least 2 entries")
    if np.any(k_grid <= 0.0):
        raise ValueError("all wavenumbers must be > 0")
    dk = np.diff(k_grid)
    if not (np.all(dk > 0.0) or np.all(dk < 0.0)):
        raise ValueError("k_grid must be strictly monotone")

    state = solve_basic_state(params, n)
    points: list[NeutralPoint] = []
    gaps: list[float] = []
    prev_R: float | None = None
    for k in k_grid:
        mp = ModeProblem(state=state, params=params, k=float(k), R_B=R_B, eigen_param=eigen_param)
        bracket = R_seed_bracket if prev_R is None else _continuation_bracket(prev_R)
        try:
            pt = solve_neutral_R(mp, bracket, rtol=rtol)
        except NoNeutralPointError as exc:
            logger.warning("gap at k=%g: %s", k, exc)
            gaps.append(float(k))
            continue
        points.append(pt)
        prev_R = pt.R

    if len(gaps) > 0.5 * k_grid.size:
        raise ConvergenceError(
            f"branch tracing failed: {len(gaps)} of {k_grid.size} wavenumbers "
            f"have no bracketed neutral point"
        )
    points.sort(key=lambda p: p.k)
    return NeutralCurve(
        points=tuple(points),
        gaps=tuple(sorted(gaps)),
        eigen_param=eigen_param,
        params=params,
        R_B=R_B,
        n=n,
        rtol=rtol,
    )


def _curve_prober(curve: NeutralCurve):
    """Marginal-point solver bound to the curve's configuration."""
    state = solve_basic_state(curve.params, curve.n)

    def probe(k: float, R_near: float) -> NeutralPoint:
        mp = ModeProblem(
            state=state,
            params=curve.params,
            k=float(k),
            R_B=curve.R_B,
            eigen_param=curve.eigen_param,
        )
        return solve_neutral_R(mp, _continuation_bracket(R_near), rtol=curve.rtol)

    return probe


def find_critical(curve: NeutralCurve, probe=None) -> CriticalPoint:
    """Locate the curve minimum over k and refine it by golden section.

    The coarse grid minimum must be interior; a minimum on either grid
    edge means the traced k-range is too narrow to contain the critical
    point. probe(k, R_near) may be injected for testing; by default it
    re-solves the marginal problem of this curve.
    """
    pts = list(curve.points)
    if len(pts) < 5:
        raise ValueError(f"need at least 5 valid points to locate a minimum, got {len(pts)}")
    R_values = np.array([p.R for p in pts])
    i_min = int(np.argmin(R_values))
    if i_min == 0:
        raise KRangeError(
            f"k-range too narrow: minimum sits on the lower edge k={pts[0].k:g}"
        )
    if i_min == len(pts) - 1:
        raise KRangeError(
            f"k-range too narrow: minimum sits on the upper edge k={pts[-1].k:g}"
        )

    if probe is None:
        probe = _curve_prober(curve)

    # Golden-section search on R(k) within the bracketing grid interval.
    a, b = pts[i_min - 1].k, pts[i_min + 1].k
    best = pts[i_min]
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    pc = probe(c, best.R)
    pd = probe(d, best.R)
    while b - a > GOLDEN_K_TOL:
        if pc.R < pd.R:
            b, d, pd = d, c, pc
            c = b - _INVPHI * (b - a)
            pc = probe(c, pd.R)
        else:
            a, c, pc = c, d, pd
            d = a + _INVPHI * (b - a)
            pd = probe(d, pc.R)
    best = min((best, pc, pd), key=lambda p: p.R)
    return CriticalPoint(
        k_c=best.k, R_c=best.R, sigma_c=best.sigma, oscillatory=best.oscillatory
    )


def _sweep_row(params, vary, value, k_grid, eigen_param, R_seed_bracket, R_B, n, rtol):
    try:
        row_params = replace(params, **{vary: value})
        curve = trace_branch(
            row_params,
            k_grid,
            eigen_param=eigen_param,
            R_seed_bracket=R_seed_bracket,
            R_B=R_B,
            n=n,
            rtol=rtol,
        )
        cp = find_critical(curve)
        return SweepRow(value=value, k_c=cp.k_c, R_c=cp.R_c, sigma_c=cp.sigma_c), curve
    except (BiostabError, ValueError) as exc:
        logger.warning("sweep row %s=%r failed: %s", vary, value, exc)
        return SweepRow(value=value, k_c=np.nan, R_c=np.nan, sigma_c=np.nan, error=str(exc)), None


def sweep(
    params: SuspensionParams,
    vary: str,
    values,
    k_grid: np.ndarray | None = None,
    eigen_param: str = "RB",
    R_seed_bracket: tuple[float, float] = (100.0, 30000.0),
    R_B: float = 0.0,
    n: int = 200,
    rtol: float = 1e-6,
    max_workers: int = 1,
) -> SweepResult:
    """Critical point as a function of one swept parameter.

    Rows are computed independently (optionally in threads) and always
    reported in the order of `values`; a failing row records its error
    instead of aborting the sweep.
    """
    if vary not in SWEEPABLE:
        raise ValueError(f"cannot sweep {vary!r}; choose one of {SWEEPABLE}")
    if k_grid is None:
        k_grid = default_k_grid()
    jobs = [
        (params, vary, v, k_grid, eigen_param, R_seed_bracket, R_B, n, rtol) for v in values
    ]
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(lambda args: _sweep_row(*args), jobs))
    else:
        results = [_sweep_row(*args) for args in jobs]
    rows = tuple(r for r, _ in results)
    curves = tuple(c for _, c in results)
    return SweepResult(param=vary, rows=rows, curves=curves)
