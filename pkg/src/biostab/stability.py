"""Linear stability of the basic state at a fixed horizontal wavenumber.

The perturbation fields are the vertical velocity W, the integrated cell
concentration Phi (concentration itself is D Phi), and the temperature T.
Discretizing the three coupled ODEs with fourth-order finite differences
turns the growth rate gamma into a generalized matrix eigenvalue,

    A(R_B, R_T) X = gamma B X,   X = (W, Phi, T) on the grid,

with boundary condition rows carrying zero rows in B. Two backends find
marginal (Re gamma = 0) points: bracketed root finding on the leading
growth rate of the matrix pencil, and a bordered Newton iteration on the
same discretization with the Rayleigh number and frequency appended as
unknown constants.

Sign conventions: the cell-buoyancy term enters the vertical momentum
balance as + R_B k^2 D Phi and the thermal-buoyancy term as - R_T k^2 T,
so positive R_T (hotter top) is stabilizing and the classical heated
from below benchmarks sit on the negative R_T branch.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.optimize import brentq
from scipy.sparse.linalg import splu

from .errors import ConvergenceError, EigensolverError, NoNeutralPointError
from .fd import diff_matrix
from .model import SuspensionParams
from .steady import BasicState

logger = logging.getLogger(__name__)

EIGEN_PARAMS = ("RB", "RT")

# Modes with |gamma| above this are discretization artifacts of the
# B-singular pencil and are discarded.
SPURIOUS_CUTOFF = 1e8
# ... as are modes whose energy sits almost entirely on the boundary rows.
BOUNDARY_ENERGY_CUTOFF = 0.99

OSCILLATORY_TOL = 1e-6

NRK_TOL = 1e-10
NRK_MAX_ITER = 25


@dataclass(frozen=True)
class ModeProblem:
    """One stability problem: basic state, parameters, and wavenumber.

    R_B is the prescribed bioconvective Rayleigh number; which Rayleigh
    number acts as the unknown in neutral-point solves is selected by
    eigen_param ('RB' or 'RT'), the other one keeping its prescribed value
    (params.R_T respectively R_B).
    """

    state: BasicState
    params: SuspensionParams
    k: float
    R_B: float = 0.0
    eigen_param: str = "RB"

    def __post_init__(self):
        if not self.k > 0.0:
            raise ValueError(
                f"wavenumber k must be > 0 (k = 0 degenerates the normal-mode "
                f"reduction), got {self.k}"
            )
        if not self.R_B >= 0.0:
            raise ValueError(f"prescribed R_B must be >= 0, got {self.R_B}")
        if self.eigen_param not in EIGEN_PARAMS:
            raise ValueError(
                f"eigen_param must be one of {EIGEN_PARAMS}, got {self.eigen_param!r}"
            )


@dataclass(frozen=True)
class Spectrum:
    """Finite growth rates of one discretized problem, sorted by Re desc."""

    gammas: np.ndarray
    n_modes: int

    @property
    def max_growth_rate(self) -> float:
        return float(self.gammas[0].real)

    @property
    def leading(self) -> complex:
        return complex(self.gammas[0])


@dataclass(frozen=True)
class NeutralPoint:
    """A marginally stable point: Re gamma = 0 at (k, R)."""

    k: float
    R: float
    sigma: float
    branch: int = 1
    oscillatory: bool = False


@dataclass(frozen=True)
class _Operators:
    """Assembled pencil split by Rayleigh-number coupling.

    A(R_B, R_T) = A0 + R_B * A_RB + R_T * A_RT. boundary_idx are the nine
    row/unknown slots taken by boundary conditions (zero rows of B);
    d2w0 extracts the curvature of W at the bottom wall from a full vector.
    """

    A0: np.ndarray
    A_RB: np.ndarray
    A_RT: np.ndarray
    B: np.ndarray
    boundary_idx: np.ndarray
    d2w0: np.ndarray


def build_operators(state: BasicState, params: SuspensionParams, k: float) -> _Operators:
    """Discretize the coupled perturbation system at wavenumber k.

    Block layout of the unknown vector: W nodes, then Phi nodes, then T
    nodes (m = n + 1 each). Equation rows sit at interior nodes; boundary
    rows replace the nearest node rows (two per end for W, the cell-flux
    condition at both ends plus Phi = 0 at the top for Phi, and T = 0 at
    both ends for T), nine in total.
    """
    z = state.z
    n = state.n
    m = n + 1
    k2 = k * k
    Pr, phi, Da, Le = params.Pr, params.phi, params.Da, params.Le

    D1 = diff_matrix(z, 1)
    D2 = diff_matrix(z, 2)
    D3 = diff_matrix(z, 3)
    D4 = diff_matrix(z, 4)
    eye = np.eye(m)

    A0 = np.zeros((3 * m, 3 * m))
    A_RB = np.zeros((3 * m, 3 * m))
    A_RT = np.zeros((3 * m, 3 * m))
    B = np.zeros((3 * m, 3 * m))
    W = slice(0, m)
    P = slice(m, 2 * m)
    T = slice(2 * m, 3 * m)

    # Vertical momentum, fourth order in W: rows at nodes 2 .. n-2.
    rows = np.arange(2, n - 1)
    L_W = -D4 + (2.0 * k2 + 1.0 / Da) * D2 - (k2 * k2 + k2 / Da) * eye
    A0[rows, W] = L_W[rows]
    A_RB[rows, P] = -k2 * D1[rows]
    A_RT[rows, T] = +k2 * eye[rows]
    B[rows, W] = -(1.0 / (Pr * phi)) * (D2[rows] - k2 * eye[rows])

    # Momentum boundary rows: no-slip bottom, no penetration both ends,
    # stress-free (D2 W = 0) or no-slip (D W = 0) top.
    A0[0, W] = eye[0]
    A0[1, W] = D1[0]
    A0[n - 1, W] = D2[n] if params.top_boundary == "free" else D1[n]
    A0[n, W] = eye[n]

    # Cell transport, third order in Phi: rows at nodes 1 .. n-2.
    rows = np.arange(1, n - 1)
    L_P = (
        D3
        - state.aleph3[:, None] * D2
        - (k2 + state.aleph2)[:, None] * D1
        - np.diag(state.aleph1)
    )
    A0[m + rows, P] = L_P[rows]
    A0[m + rows, W] = -Le * np.diag(state.dn_p)[rows]
    B[m + rows, P] = Le * D1[rows]

    # Zero cell flux through both walls, and Phi(1) = 0 by definition of
    # the column integral.
    flux = state.aleph2[:, None] * eye + 2.0 * state.aleph3[:, None] * D1 - 2.0 * D2
    A0[m, P] = flux[0]
    A0[m + n - 1, P] = flux[n]
    A0[m + n, P] = eye[n]

    # Heat transport: rows at nodes 1 .. n-1; the basic gradient is one.
    rows = np.arange(1, n)
    A0[2 * m + rows, T] = (D2 - k2 * eye)[rows]
    A0[2 * m + rows, W] = -eye[rows]
    B[2 * m + rows, T] = eye[rows]

    # Fixed-temperature walls.
    A0[2 * m, T] = eye[0]
    A0[3 * m - 1, T] = eye[n]

    boundary_idx = np.array(
        [0, 1, n - 1, n, m, m + n - 1, m + n, 2 * m, 3 * m - 1]
    )
    d2w0 = np.zeros(3 * m)
    d2w0[W] = D2[0]
    return _Operators(A0=A0, A_RB=A_RB, A_RT=A_RT, B=B, boundary_idx=boundary_idx, d2w0=d2w0)


def _pencil(ops: _Operators, R_B: float, R_T: float) -> np.ndarray:
    return ops.A0 + R_B * ops.A_RB + R_T * ops.A_RT


def assemble_operators(mp: ModeProblem, n: int | None = None):
    """Dense (A, B) with A X = gamma B X at the prescribed (R_B, R_T)."""
    if n is not None and n != mp.state.n:
        raise ValueError(f"grid mismatch: state has n={mp.state.n}, requested n={n}")
    ops = build_operators(mp.state, mp.params, mp.k)
    return _pencil(ops, mp.R_B, mp.params.R_T), ops.B


def _filtered_eig(A: np.ndarray, B: np.ndarray, boundary_idx: np.ndarray):
    """Generalized eigensolve with artifact filtering.

    Drops non-finite eigenvalues (from the singular B rows), values beyond
    the magnitude cutoff, and modes whose squared norm is concentrated
    beyond 99% on the boundary slots. Returns (gammas, vectors) sorted by
    descending real part with imaginary part as tie-breaker.
    """
    try:
        w, v = sla.eig(A, B, check_finite=False)
    except Exception as exc:  # LinAlgError or LAPACK non-convergence
        raise EigensolverError(f"generalized eigensolve failed: {exc}") from exc
    keep = np.isfinite(w) & (np.abs(w) <= SPURIOUS_CUTOFF)
    energy = np.sum(np.abs(v) ** 2, axis=0)
    boundary_energy = np.sum(np.abs(v[boundary_idx, :]) ** 2, axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        keep &= boundary_energy <= BOUNDARY_ENERGY_CUTOFF * energy
    w, v = w[keep], v[:, keep]
    if w.size == 0:
        raise EigensolverError("all eigenvalues were filtered as spurious")
    order = np.lexsort((-w.imag, -w.real))
    return w[order], v[:, order]


def growth_spectrum(mp: ModeProblem, n: int | None = None) -> Spectrum:
    """Finite growth rates of the discretized problem, leading mode first."""
    if n is not None and n != mp.state.n:
        raise ValueError(f"grid mismatch: state has n={mp.state.n}, requested n={n}")
    ops = build_operators(mp.state, mp.params, mp.k)
    w, _ = _filtered_eig(_pencil(ops, mp.R_B, mp.params.R_T), ops.B, ops.boundary_idx)
    return Spectrum(gammas=w, n_modes=w.size)


def _eigen_coupling(mp: ModeProblem, ops: _Operators):
    """(fixed part of A, coupling matrix of the unknown Rayleigh number)."""
    if mp.eigen_param == "RB":
        return ops.A0 + mp.params.R_T * ops.A_RT, ops.A_RB
    return ops.A0 + mp.R_B * ops.A_RB, ops.A_RT


def solve_neutral_R(
    mp: ModeProblem,
    bracket: tuple[float, float],
    rtol: float = 1e-6,
) -> NeutralPoint:
    """Find R on the given bracket where the leading growth rate vanishes.

    If the leading growth rate does not change sign across the bracket,
    the bracket is widened geometrically about its center up to ten times
    its original width. The root is then pinned by a bracketed
    secant/bisection hybrid to relative tolerance rtol in R; the marginal
    frequency sigma comes from the leading eigenvalue at the root.
    """
    ops = build_operators(mp.state, mp.params, mp.k)
    A_fixed, A_R = _eigen_coupling(mp, ops)

    def leading(R):
        w, _ = _filtered_eig(A_fixed + R * A_R, ops.B, ops.boundary_idx)
        return w[0]

    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError(f"bracket must satisfy R_lo < R_hi, got {bracket}")
    f_lo, f_hi = leading(lo).real, leading(hi).real
    width0 = hi - lo
    while not (f_lo == 0.0 or f_hi == 0.0 or f_lo * f_hi < 0.0):
        if hi - lo >= 10.0 * width0:
            raise NoNeutralPointError(
                f"no neutral point in range: max Re gamma keeps sign "
                f"{np.sign(f_lo):+.0f} on [{lo:g}, {hi:g}] at k={mp.k:g}"
            )
        center, half = 0.5 * (hi + lo), 0.8 * (hi - lo)
        lo, hi = center - half, center + half
        f_lo, f_hi = leading(lo).real, leading(hi).real

    R = brentq(lambda r: leading(r).real, lo, hi, rtol=rtol, xtol=1e-12)
    marginal = leading(R)
    sigma = float(marginal.imag)
    return NeutralPoint(
        k=mp.k,
        R=float(R),
        sigma=sigma,
        branch=1,
        oscillatory=abs(sigma) > OSCILLATORY_TOL,
    )


# ---------------------------------------------------------------------------
# Bordered-Newton refinement
# ---------------------------------------------------------------------------


def _seed_mode(ops: _Operators, A_fixed, A_R, R: float, sigma: float):
    """Near-null mode of the pencil at (R, i*sigma) by inverse iteration.

    A - i*sigma*B is only approximately singular at the bracketed neutral
    point, so a sparse LU exists and two generalized inverse-iteration
    steps isolate the marginal mode far cheaper than a full eigensolve.
    The mode is normalized so the wall curvature of W equals one.
    """
    K = A_fixed + R * A_R
    if sigma != 0.0:
        K = K.astype(complex) - 1j * sigma * ops.B
    dim = K.shape[0]
    try:
        lu = splu(sp.csc_matrix(K))
    except RuntimeError as exc:
        raise ConvergenceError(f"seed-mode factorization failed: {exc}") from exc
    # deterministic generic start vector
    x = np.sin(7.3 * np.arange(dim) + 0.2)
    if sigma != 0.0:
        x = x.astype(complex)
    for _ in range(2):
        x = lu.solve(ops.B @ x)
        nrm = np.linalg.norm(x)
        if not np.isfinite(nrm) or nrm == 0.0:
            raise ConvergenceError("seed-mode inverse iteration broke down")
        x /= nrm
    scale = ops.d2w0 @ x
    if abs(scale) < 1e-12:
        raise ConvergenceError("cannot normalize mode: wall curvature of W vanishes")
    return x / scale


def refine_nrk(guess: NeutralPoint, mp: ModeProblem, n: int | None = None) -> NeutralPoint:
    """Polish a marginal point with Newton iterations on the discrete BVP.

    The discretized fields are augmented by the unknown Rayleigh number R
    and (for oscillatory modes) the frequency sigma, both constants in z,
    and the system is closed by normalizing the wall curvature of W to
    1 + 0i. Iterations stop when the largest scaled update drops below
    1e-10; the Rayleigh-number update is measured relative to max(1, |R|).

    Raises ConvergenceError after 25 iterations or on a singular Jacobian;
    callers are expected to keep the matrix-backend point in that case.
    """
    if n is not None and n != mp.state.n:
        raise ValueError(f"grid mismatch: state has n={mp.state.n}, requested n={n}")
    ops = build_operators(mp.state, mp.params, mp.k)
    A_fixed, A_R = _eigen_coupling(mp, ops)
    oscillatory = abs(guess.sigma) > OSCILLATORY_TOL

    x = _seed_mode(ops, A_fixed, A_R, guess.R, guess.sigma if oscillatory else 0.0)
    A_fixed_s = sp.csr_matrix(A_fixed)
    A_R_s = sp.csr_matrix(A_R)
    B_s = sp.csr_matrix(ops.B)
    d2w0_s = sp.csr_matrix(ops.d2w0)
    dim = A_fixed.shape[0]

    R = float(guess.R)
    sigma = float(guess.sigma) if oscillatory else 0.0

    for it in range(1, NRK_MAX_ITER + 1):
        if oscillatory:
            xr, xi_ = x.real, x.imag
            K = A_fixed_s + R * A_R_s
            F = np.concatenate(
                [
                    K @ xr + sigma * (B_s @ xi_),
                    K @ xi_ - sigma * (B_s @ xr),
                    [ops.d2w0 @ xr - 1.0, ops.d2w0 @ xi_],
                ]
            )
            J = sp.bmat(
                [
                    [K, sigma * B_s, sp.csr_matrix((A_R_s @ xr)[:, None]), sp.csr_matrix((B_s @ xi_)[:, None])],
                    [-sigma * B_s, K, sp.csr_matrix((A_R_s @ xi_)[:, None]), sp.csr_matrix((-(B_s @ xr))[:, None])],
                    [d2w0_s, sp.csr_matrix((1, dim)), None, None],
                    [sp.csr_matrix((1, dim)), d2w0_s, None, None],
                ],
                format="csc",
            )
        else:
            xr = x.real
            K = A_fixed_s + R * A_R_s
            F = np.concatenate([K @ xr, [ops.d2w0 @ xr - 1.0]])
            J = sp.bmat(
                [[K, sp.csr_matrix((A_R_s @ xr)[:, None])], [d2w0_s, None]],
                format="csc",
            )
        try:
            delta = splu(J).solve(-F)
        except RuntimeError as exc:
            raise ConvergenceError(f"NRK Jacobian singular at iteration {it}: {exc}") from exc
        if not np.all(np.isfinite(delta)):
            raise ConvergenceError(f"NRK update not finite at iteration {it}")

        if oscillatory:
            dxr, dxi = delta[:dim], delta[dim : 2 * dim]
            dR, dsig = delta[-2], delta[-1]
            x = (xr + dxr) + 1j * (xi_ + dxi)
            R += dR
            sigma += dsig
            err = max(
                np.max(np.abs(dxr)),
                np.max(np.abs(dxi)),
                abs(dR) / max(1.0, abs(R)),
                abs(dsig) / max(1.0, abs(sigma)),
            )
        else:
            dxr, dR = delta[:dim], delta[-1]
            x = (xr + dxr).astype(complex)
            R += dR
            err = max(np.max(np.abs(dxr)), abs(dR) / max(1.0, abs(R)))

        if err < NRK_TOL:
            logger.info(
                "nrk converged in %d iterations: k=%g R=%.10g sigma=%.3g", it, mp.k, R, sigma
            )
            if abs(R - guess.R) > 0.005 * max(1.0, abs(R)):
                logger.warning(
                    "nrk moved R by more than 0.5%% from the matrix value "
                    "(%.6g -> %.6g at k=%g)",
                    guess.R,
                    R,
                    mp.k,
                )
            return NeutralPoint(
                k=mp.k,
                R=R,
                sigma=sigma,
                branch=guess.branch,
                oscillatory=abs(sigma) > OSCILLATORY_TOL,
            )

    raise ConvergenceError(
        f"NRK did not converge within {NRK_MAX_ITER} iterations at k={mp.k:g} "
        f"(last update {err:.3e})"
    )
