"""Gauss-Legendre panel rules used by every quadrature in the package.

All rules here use fixed node sets, so the error of a quadrature is a smooth
function of its parameters. The membership tests take finite differences of
quadrature-backed functions, and adaptive node switching would show up there
as noise.
"""

from functools import lru_cache

import numpy as np


class QuadratureError(ArithmeticError):
    """Raised when a quadrature misses its tolerance within the panel budget."""

    def __init__(self, message, achieved_error=float("nan")):
        super().__init__(message)
        self.achieved_error = achieved_error


@lru_cache(maxsize=None)
def gauss_legendre(n):
    """Nodes and weights on [-1, 1] (cached, read-only)."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_nodes(a, b, n=20):
    """Map an n-point Gauss rule onto [a, b]; returns (nodes, weights)."""
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def fixed_gauss(f, a, b, n=20):
    """Integrate a vectorized f over [a, b] with one n-point rule."""
    u, w = panel_nodes(a, b, n)
    return np.dot(w, f(u))


def composite_gauss(f, edges, n=20):
    """Integrate a vectorized f over consecutive panels given by `edges`."""
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(n)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    u = mid[:, None] + half[:, None] * x[None, :]
    vals = f(u.ravel()).reshape(u.shape)
    return np.sum(vals * (half[:, None] * w[None, :]))
