"""Swimming response to light, its calibration, and the attenuated light field.

The mean vertical swimming bias of the cells is a smooth function M(G) of
the local light intensity G. It is positive (upward swimming) below a
critical intensity G_c, zero at G_c, and negative above it. The shape
parameter beta is calibrated so that the zero of M lands exactly on G_c.
Light decays exponentially with the cell column density above (absorption
only, no scattering).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ConvergenceError

# Amplitudes of the two sine harmonics of the taxis response curve.
_A1 = 0.8
_A2 = 0.1

TOP_BOUNDARIES = ("free", "rigid")


@dataclass(frozen=True)
class SuspensionParams:
    """Dimensionless parameters of one suspension / porous-layer configuration.

    V_c     swimming speed scaled on the cell diffusion scale (>= 0)
    tau_H   extinction coefficient of the suspension over the layer depth (>= 0)
    I_t     light intensity incident at the top boundary (> 0)
    G_c     critical intensity where the swimming bias changes sign (0 < G_c < 1)
    Pr      Prandtl number (> 0)
    phi     porosity of the medium (0 < phi <= 1)
    Da      Darcy number; 1/Da -> 0 recovers a clear fluid (> 0)
    Le      Lewis number, thermal over cell diffusivity (> 0)
    R_T     thermal Rayleigh number; positive means a hotter top boundary
            (stabilizing), negative models heating from below
    top_boundary  'free' (stress-free) or 'rigid'; the bottom is always rigid
    """

    V_c: float = 10.0
    tau_H: float = 0.5
    I_t: float = 0.8
    G_c: float = 0.63
    Pr: float = 5.0
    phi: float = 0.76
    Da: float = 0.1
    Le: float = 0.4
    R_T: float = 0.0
    top_boundary: str = "free"

    def __post_init__(self):
        if not self.V_c >= 0.0:
            raise ConfigError(f"V_c must be >= 0, got {self.V_c}")
        if not self.tau_H >= 0.0:
            raise ConfigError(f"tau_H must be >= 0, got {self.tau_H}")
        if not self.I_t > 0.0:
            raise ConfigError(f"I_t must be > 0, got {self.I_t}")
        if not 0.0 < self.G_c < 1.0:
            raise ConfigError(f"G_c must lie in (0, 1), got {self.G_c}")
        if not self.Pr > 0.0:
            raise ConfigError(f"Pr must be > 0, got {self.Pr}")
        if not 0.0 < self.phi <= 1.0:
            raise ConfigError(f"phi must lie in (0, 1], got {self.phi}")
        if not self.Da > 0.0:
            raise ConfigError(f"Da must be > 0, got {self.Da}")
        if not self.Le > 0.0:
            raise ConfigError(f"Le must be > 0, got {self.Le}")
        if not math.isfinite(self.R_T):
            raise ConfigError(f"R_T must be finite, got {self.R_T}")
        if self.top_boundary not in TOP_BOUNDARIES:
            raise ConfigError(
                f"top_boundary must be one of {TOP_BOUNDARIES}, got {self.top_boundary!r}"
            )


@dataclass(frozen=True)
class PhototaxisModel:
    """Calibrated taxis curve: beta is the shape parameter, xi_c the
    rescaled intensity at which the response crosses zero."""

    beta: float
    xi_c: float


def xi(G, beta):
    """Rescaled intensity Xi(G) = G * exp(beta * (G - 1)). Xi(1) = 1 always."""
    G = np.asarray(G, dtype=float)
    out = G * np.exp(beta * (G - 1.0))
    return out if out.ndim else float(out)


def dxi_dG(G, beta):
    """First derivative of the rescaled intensity."""
    G = np.asarray(G, dtype=float)
    out = np.exp(beta * (G - 1.0)) * (1.0 + beta * G)
    return out if out.ndim else float(out)


def taxis(G, beta):
    """Mean vertical swimming bias M(G); lies within [-0.9, 0.9]."""
    x = np.asarray(xi(G, beta))
    out = _A1 * np.sin(1.5 * np.pi * x) - _A2 * np.sin(0.5 * np.pi * x)
    return out if out.ndim else float(out)


def dtaxis_dG(G, beta):
    """Analytic dM/dG via the chain rule."""
    G = np.asarray(G, dtype=float)
    x = np.asarray(xi(G, beta))
    dM_dxi = _A1 * 1.5 * np.pi * np.cos(1.5 * np.pi * x) - _A2 * 0.5 * np.pi * np.cos(
        0.5 * np.pi * x
    )
    out = dM_dxi * dxi_dG(G, beta)
    return out if out.ndim else float(out)


def d2taxis_dG2(G, beta):
    """Analytic second derivative of the swimming bias.

    Kept closed form so that the linearized coefficients stay smooth on
    coarse grids instead of amplifying finite-difference noise.
    """
    G = np.asarray(G, dtype=float)
    x = np.asarray(xi(G, beta))
    e = np.exp(beta * (G - 1.0))
    dx = e * (1.0 + beta * G)
    d2x = e * beta * (2.0 + beta * G)
    dM_dxi = _A1 * 1.5 * np.pi * np.cos(1.5 * np.pi * x) - _A2 * 0.5 * np.pi * np.cos(
        0.5 * np.pi * x
    )
    d2M_dxi2 = -_A1 * (1.5 * np.pi) ** 2 * np.sin(1.5 * np.pi * x) + _A2 * (
        0.5 * np.pi
    ) ** 2 * np.sin(0.5 * np.pi * x)
    out = d2M_dxi2 * dx * dx + dM_dxi * d2x
    return out if out.ndim else float(out)


def _taxis_of_xi(x):
    return _A1 * math.sin(1.5 * math.pi * x) - _A2 * math.sin(0.5 * math.pi * x)


def calibrate_beta(G_c: float) -> PhototaxisModel:
    """Fit the shape parameter so the swimming bias vanishes at G_c.

    The smallest positive zero xi_c of the response curve in rescaled
    intensity is located by bisection on (0.1, 1.0); the bracket is
    tightened well past 1e-12 so that M(G_c) itself vanishes within
    1e-12. beta then follows in closed form from Xi(G_c) = xi_c.
    """
    if not 0.0 < G_c < 1.0:
        raise ConfigError(f"G_c must lie in (0, 1), got {G_c}")
    lo, hi = 0.1, 1.0
    flo, fhi = _taxis_of_xi(lo), _taxis_of_xi(hi)
    if flo * fhi > 0.0:
        raise ConvergenceError("taxis-zero bracketing failed on (0.1, 1.0)")
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        fmid = _taxis_of_xi(mid)
        if flo * fmid <= 0.0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    xi_c = 0.5 * (lo + hi)
    beta = math.log(xi_c / G_c) / (G_c - 1.0)
    return PhototaxisModel(beta=beta, xi_c=xi_c)


def light_field(psi, tau_H: float, I_t: float):
    """Light intensity from the integrated concentration profile.

    psi(z) is the cell column integral measured from the top, so psi(1) = 0
    and the intensity decays as exp(tau_H * psi) going downward.
    """
    psi = np.asarray(psi, dtype=float)
    out = I_t * np.exp(tau_H * psi)
    return out if out.ndim else float(out)
