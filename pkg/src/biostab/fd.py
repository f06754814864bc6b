"""Fourth-order finite-difference derivative matrices on the solver grid.

Weights come from Fornberg's recursion, so boundary rows automatically get
one-sided stencils of the same formal order as the centered interior ones.
"""

from __future__ import annotations

import numpy as np


def fd_weights(x0: float, nodes: np.ndarray, order: int) -> np.ndarray:
    """Finite-difference weights for the order-th derivative at x0.

    Returns an array w of shape (order + 1, len(nodes)); row m holds the
    weights of the m-th derivative so that sum(w[m] * f(nodes)) ~ f^(m)(x0).
    """
    nodes = np.asarray(nodes, dtype=float)
    n = nodes.size
    w = np.zeros((order + 1, n))
    c1 = 1.0
    c4 = nodes[0] - x0
    w[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5, c4 = c4, nodes[i] - x0
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for m in range(mn, 0, -1):
                    w[m, i] = c1 * (m * w[m - 1, i - 1] - c5 * w[m, i - 1]) / c2
                w[0, i] = -c1 * c5 * w[0, i - 1] / c2
            for m in range(mn, 0, -1):
                w[m, j] = ((nodes[i] - x0) * w[m, j] - m * w[m - 1, j]) / c3
            w[0, j] = (nodes[i] - x0) * w[0, j] / c3
        c1 = c2
    return w


def diff_matrix(z: np.ndarray, order: int) -> np.ndarray:
    """Dense differentiation matrix of the given derivative order on nodes z.

    Interior rows use centered stencils (5 points for orders 1-2, 7 points
    for orders 3-4); rows too close to an end use one-sided stencils of
    width order + 4. All rows are fourth-order accurate.
    """
    if order not in (1, 2, 3, 4):
        raise ValueError(f"derivative order must be 1..4, got {order}")
    z = np.asarray(z, dtype=float)
    n = z.size - 1
    half = 2 if order <= 2 else 3
    width = order + 4
    if n + 1 < width:
        raise ValueError(f"need at least {width} nodes for order {order}")
    D = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        if half <= i <= n - half:
            cols = np.arange(i - half, i + half + 1)
        elif i < half:
            cols = np.arange(width)
        else:
            cols = np.arange(n - width + 1, n + 1)
        D[i, cols] = fd_weights(z[i], z[cols], order)[order]
    return D
