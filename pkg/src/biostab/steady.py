"""Quiescent basic state: the steady cell-concentration column.

With no flow, the cells settle into a vertical profile n_p(z) whose
up/down drift (set by the local light through the swimming bias) balances
diffusion. The column integral psi(z) of the concentration, measured from
the top, turns the concentration equation plus light attenuation into a
single second-order two-point problem

    psi'' = V_c * M(I_t * exp(tau_H * psi)) * psi',  psi(0) = -1, psi(1) = 0,

solved here by shooting on the unknown bottom slope psi'(0) = n_p(0).
The steady temperature is simply T_p(z) = z and is never stored.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import model
from .errors import ConvergenceError
from .model import SuspensionParams

SHOOT_TOL = 1e-10
_BRACKET_LO = 1e-6
_BRACKET_HI = 50.0
_MAX_BRACKET_ITER = 100


@dataclass(frozen=True)
class BasicState:
    """Steady profiles and the derived linearization coefficients.

    All arrays live on the same uniform grid z of n + 1 nodes on [0, 1].
    aleph1..aleph3 are the z-dependent coefficients of the linearized
    cell-transport operator; dn_p is the analytic slope of n_p.
    """

    z: np.ndarray
    psi: np.ndarray
    n_p: np.ndarray
    G_p: np.ndarray
    M_p: np.ndarray
    dMdG: np.ndarray
    dn_p: np.ndarray
    aleph1: np.ndarray
    aleph2: np.ndarray
    aleph3: np.ndarray

    @property
    def n(self) -> int:
        """Number of grid intervals."""
        return self.z.size - 1


def aleph_coefficients(state: BasicState, params: SuspensionParams) -> BasicState:
    """Fill the linearization coefficients from the steady profiles.

    aleph3 is the mean drift speed, aleph2 the shading feedback on the
    local response, and aleph1 the vertical gradient of that feedback.
    aleph1 is evaluated with the chain rule (using dn_p/dz = V_c*M_p*n_p
    and dG_p/dz = tau_H*n_p*G_p) rather than by numerical differentiation,
    which would inject grid noise into the eigenproblem.
    """
    taxis_fit = model.calibrate_beta(params.G_c)
    beta = taxis_fit.beta
    V_c, tau_H = params.V_c, params.tau_H
    n_p, G_p, dMdG = state.n_p, state.G_p, state.dMdG
    d2M = model.d2taxis_dG2(G_p, beta)
    dn_p = V_c * state.M_p * n_p
    dG_p = tau_H * n_p * G_p
    aleph3 = V_c * state.M_p
    aleph2 = 2.0 * tau_H * V_c * n_p * G_p * dMdG
    aleph1 = tau_H * V_c * (dn_p * G_p * dMdG + n_p * dG_p * dMdG + n_p * G_p * dG_p * d2M)
    return replace(state, dn_p=dn_p, aleph1=aleph1, aleph2=aleph2, aleph3=aleph3)


def solve_basic_state(params: SuspensionParams, n: int = 200) -> BasicState:
    """Solve the steady column problem and resample it on a uniform grid.

    Parameters
    ----------
    params : suspension configuration.
    n : number of grid intervals (>= 32); the grid has n + 1 nodes.

    The shooting residual psi(1) is driven below 1e-10; the integrator is
    an adaptive Runge-Kutta scheme at tolerance 1e-10, and its dense output
    is what gets resampled, so refining n does not change matched nodes.
    """
    if n < 32:
        raise ValueError(f"grid size n must be >= 32, got {n}")
    taxis_fit = model.calibrate_beta(params.G_c)
    beta = taxis_fit.beta
    V_c, tau_H, I_t = params.V_c, params.tau_H, params.I_t

    def rhs(_z, y):
        G = I_t * np.exp(tau_H * y[0])
        return (y[1], V_c * model.taxis(G, beta) * y[1])

    def shoot(slope, dense=False):
        sol = solve_ivp(
            rhs,
            (0.0, 1.0),
            (-1.0, slope),
            method="DOP853",
            rtol=1e-10,
            atol=1e-10,
            dense_output=dense,
        )
        if not sol.success:
            raise ConvergenceError(f"steady integration failed: {sol.message}")
        return sol

    def residual(slope):
        return shoot(slope).y[0, -1]

    # Bracket the bottom slope; the residual is monotone in the slope, so
    # expand geometrically on whichever side has the wrong sign.
    lo, hi = _BRACKET_LO, _BRACKET_HI
    f_lo, f_hi = residual(lo), residual(hi)
    for it in range(_MAX_BRACKET_ITER + 1):
        if f_lo * f_hi <= 0.0:
            break
        if it == _MAX_BRACKET_ITER:
            raise ConvergenceError(
                "steady shooting: slope bracket expansion exhausted "
                f"(last bracket [{lo:g}, {hi:g}])"
            )
        if f_hi < 0.0:
            hi *= 2.0
            f_hi = residual(hi)
        else:
            lo *= 0.1
            f_lo = residual(lo)
    slope = brentq(residual, lo, hi, xtol=1e-14, maxiter=100)

    sol = shoot(slope, dense=True)
    z = np.linspace(0.0, 1.0, n + 1)
    psi, n_p = sol.sol(z)
    psi = np.asarray(psi)
    n_p = np.asarray(n_p)
    if abs(psi[-1]) > SHOOT_TOL:
        raise ConvergenceError(
            f"steady shooting residual {psi[-1]:.3e} exceeds {SHOOT_TOL:g}"
        )

    G_p = model.light_field(psi, tau_H, I_t)
    M_p = np.asarray(model.taxis(G_p, beta))
    dMdG = np.asarray(model.dtaxis_dG(G_p, beta))
    zeros = np.zeros_like(z)
    state = BasicState(
        z=z,
        psi=psi,
        n_p=n_p,
        G_p=G_p,
        M_p=M_p,
        dMdG=dMdG,
        dn_p=zeros,
        aleph1=zeros,
        aleph2=zeros,
        aleph3=zeros,
    )
    return aleph_coefficients(state, params)
