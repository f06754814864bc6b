"""CSV tables and self-contained SVG plots for solver results.

All numbers are rendered with 12 significant digits through repr-stable
formatting, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .neutral import CriticalPoint, NeutralCurve, SweepResult
from .stability import Spectrum
from .steady import BasicState

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def fmt(x) -> str:
    """One number, 12 significant digits, locale-independent."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return "%.12g" % x


def _write_rows(path, header, rows):
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_steady_csv(state: BasicState, path) -> None:
    """Steady profiles, one row per grid node."""
    rows = zip(state.z, state.psi, state.n_p, state.G_p, state.M_p)
    _write_rows(path, "z,psi,n_p,G_p,M_p", rows)


def write_neutral_csv(curve: NeutralCurve, path) -> None:
    """Valid marginal points of one curve; gaps are simply absent."""
    rows = ((p.k, p.R, p.sigma, p.branch) for p in curve.points)
    _write_rows(path, "k,R,sigma,branch", rows)


def write_spectrum_csv(spectrum: Spectrum, path) -> None:
    """Growth rates sorted by descending real part."""
    rows = ((g.real, g.imag) for g in spectrum.gammas)
    _write_rows(path, "re_gamma,im_gamma", rows)


def write_critical_csv(rows, path) -> None:
    """Rows of (param_value, k_c, R_c, sigma_c); shared by critical/sweep."""
    _write_rows(path, "param_value,k_c,R_c,sigma_c", rows)


def write_sweep_csv(result: SweepResult, path) -> None:
    rows = ((r.value, r.k_c, r.R_c, r.sigma_c) for r in result.rows)
    write_critical_csv(rows, path)


def _ticks(lo: float, hi: float, count: int = 6):
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, count)


def emit_svg(
    curves,
    path,
    labels=None,
    criticals=None,
    xlabel: str = "k",
    ylabel: str = "R",
    title: str | None = None,
) -> None:
    """Render neutral curves as a standalone SVG plot.

    Each curve becomes one polyline through its valid points (gaps are
    bridged by the line, never given fabricated values). Optional
    criticals (CriticalPoint per curve, or None entries) are marked with
    filled circles. The file embeds no external assets.
    """
    if isinstance(curves, NeutralCurve):
        curves = [curves]
    curves = list(curves)
    if not curves:
        raise ValueError("emit_svg needs at least one curve")
    for curve in curves:
        if len(curve.points) < 2:
            gaps = ", ".join("%g" % g for g in curve.gaps) or "none recorded"
            raise ValueError(
                f"curve has fewer than 2 valid points; failed wavenumbers: {gaps}"
            )
    if labels is None:
        labels = [f"curve {i + 1}" for i in range(len(curves))]
    if criticals is None:
        criticals = [None] * len(curves)

    width, height = 720.0, 540.0
    ml, mr, mt, mb = 80.0, 24.0, 36.0, 56.0
    pw, ph = width - ml - mr, height - mt - mb

    all_k = np.concatenate([[p.k for p in c.points] for c in curves])
    all_R = np.concatenate([[p.R for p in c.points] for c in curves])
    for cp in criticals:
        if isinstance(cp, CriticalPoint):
            all_k = np.append(all_k, cp.k_c)
            all_R = np.append(all_R, cp.R_c)
    kx_lo, kx_hi = float(all_k.min()), float(all_k.max())
    ry_lo, ry_hi = float(all_R.min()), float(all_R.max())
    pad = 0.05 * max(ry_hi - ry_lo, 1e-12)
    ry_lo, ry_hi = ry_lo - pad, ry_hi + pad
    if kx_hi <= kx_lo:
        kx_hi = kx_lo + 1.0

    def sx(k):
        return ml + (k - kx_lo) / (kx_hi - kx_lo) * pw

    def sy(r):
        return mt + (ry_hi - r) / (ry_hi - ry_lo) * ph

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" '
        f'viewBox="0 0 {width:g} {height:g}">',
        f'<rect x="0" y="0" width="{width:g}" height="{height:g}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" '
            f'font-family="sans-serif" font-size="15">{escape(title)}</text>'
        )

    # axes and ticks
    ax = f'M {ml:.1f} {mt:.1f} L {ml:.1f} {mt + ph:.1f} L {ml + pw:.1f} {mt + ph:.1f}'
    parts.append(f'<path d="{ax}" stroke="black" fill="none" stroke-width="1"/>')
    for tk in _ticks(kx_lo, kx_hi):
        x = sx(tk)
        parts.append(
            f'<line x1="{x:.1f}" y1="{mt + ph:.1f}" x2="{x:.1f}" y2="{mt + ph + 5:.1f}" '
            f'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.1f}" y="{mt + ph + 20:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{escape("%.4g" % tk)}</text>'
        )
    for tr in _ticks(ry_lo, ry_hi):
        y = sy(tr)
        parts.append(
            f'<line x1="{ml - 5:.1f}" y1="{y:.1f}" x2="{ml:.1f}" y2="{y:.1f}" '
            f'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{ml - 9:.1f}" y="{y + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{escape("%.4g" % tr)}</text>'
        )
    parts.append(
        f'<text x="{ml + pw / 2:.1f}" y="{height - 14:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{escape(xlabel)}</text>'
    )
    parts.append(
        f'<text x="20" y="{mt + ph / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14" '
        f'transform="rotate(-90 20 {mt + ph / 2:.1f})">{escape(ylabel)}</text>'
    )

    for i, curve in enumerate(curves):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{sx(p.k):.2f},{sy(p.R):.2f}" for p in curve.points)
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
    for i, cp in enumerate(criticals):
        if not isinstance(cp, CriticalPoint):
            continue
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(
            f'<circle cx="{sx(cp.k_c):.2f}" cy="{sy(cp.R_c):.2f}" r="4" '
            f'fill="{color}" stroke="black" stroke-width="0.8"/>'
        )

    # legend, top right of the plot area
    lx, ly = ml + pw - 170.0, mt + 10.0
    for i, label in enumerate(labels):
        color = _PALETTE[i % len(_PALETTE)]
        y = ly + 18.0 * i
        parts.append(
            f'<line x1="{lx:.1f}" y1="{y:.1f}" x2="{lx + 26:.1f}" y2="{y:.1f}" '
            f'stroke="{color}" stroke-width="1.8"/>'
        )
        parts.append(
            f'<text x="{lx + 32:.1f}" y="{y + 4:.1f}" font-family="sans-serif" '
            f'font-size="12">{escape(str(label))}</text>'
        )

    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(parts) + "\n")
