"""Spectral grids, differentiation, quadrature, and Legendre transforms.

Everything lives on the delay interval [-h, 0], obtained from the reference
interval [-1, 1] through theta = (h/2)(vartheta - 1).  Reference-interval
tables are cached per N and rescaled on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import DimensionError, sym_eigen

__all__ = [
    "NodeSet",
    "cheb_nodes",
    "cheb_diffmat",
    "clenshaw_curtis_weights",
    "gauss_legendre",
    "legendre_vals",
    "transform_leg_to_chebvals",
]

# NodeSet kinds: "cheb" is Gauss-Lobatto-Chebyshev (endpoints included),
# "gauss" is Gauss-Legendre (endpoints excluded), "gauss0" is a Gauss rule
# with the right endpoint 0 appended at zero weight so that quadrature
# matrices keep an explicit phi(0) block.
_KINDS = ("cheb", "gauss", "gauss0")


@dataclass(frozen=True)
class NodeSet:
    """A quadrature grid on [-h, 0]: ascending nodes and weights summing to h."""

    kind: str
    h: float
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown node kind {self.kind!r}")
        if not self.h > 0.0:
            raise ValueError("h must be positive")
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size == 0:
            raise DimensionError("nodes and weights must be matching 1-d arrays")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("nodes must be strictly ascending")
        if nodes[0] < -self.h - 1e-12 * self.h or nodes[-1] > 1e-12 * self.h:
            raise ValueError("nodes must lie within [-h, 0]")
        if self.kind == "cheb":
            if nodes[0] != -self.h or nodes[-1] != 0.0:
                raise ValueError("Chebyshev grid must include both endpoints")
        elif self.kind == "gauss":
            if nodes[0] <= -self.h or nodes[-1] >= 0.0:
                raise ValueError("Gauss grid must exclude the endpoints")
            if np.any(weights <= 0.0):
                raise ValueError("Gauss weights must be positive")
        else:  # gauss0
            if nodes[-1] != 0.0 or weights[-1] != 0.0:
                raise ValueError("gauss0 grid must end with node 0 at zero weight")
        if abs(float(weights.sum()) - self.h) > 1e-12 * self.h:
            raise ValueError("weights must sum to h")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size


def _check_order(N):
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise ValueError(f"order must be an integer >= 1, got {N!r}")
    return int(N)


def _check_h(h):
    h = float(h)
    if not np.isfinite(h) or h <= 0.0:
        raise ValueError(f"delay h must be positive and finite, got {h!r}")
    return h


@lru_cache(maxsize=None)
def _unit_cheb_nodes(N):
    x = -np.cos(np.pi * np.arange(N + 1) / N)
    x.setflags(write=False)
    return x


@lru_cache(maxsize=None)
def _unit_cc_weights(N):
    # Exact integrals of the Lagrange cardinals on [-1, 1]: the cosine-sum
    # form of the Clenshaw-Curtis rule.  Even-degree Chebyshev moments
    # 2/(1 - k^2) drive the sum; the k = N/2 term is halved for even N.
    j = np.arange(N + 1)
    theta = np.pi * j / N
    k = np.arange(1, N // 2 + 1)
    if k.size:
        b = np.where(2 * k == N, 1.0, 2.0)
        corr = (b / (4.0 * k * k - 1.0)) @ np.cos(2.0 * np.outer(k, theta))
    else:
        corr = np.zeros_like(theta)
    w = (1.0 - corr) / N
    w[1:-1] *= 2.0
    w.setflags(write=False)
    return w


def cheb_nodes(N, h):
    """Gauss-Lobatto-Chebyshev grid of N+1 ascending nodes on [-h, 0].

    The nodes are theta_k = (h/2)(vartheta_k - 1) with
    vartheta_k = -cos(k pi / N); the weights are the Clenshaw-Curtis weights,
    so the grid integrates degree-N polynomials exactly.
    """
    N = _check_order(N)
    h = _check_h(h)
    nodes = 0.5 * h * (_unit_cheb_nodes(N) - 1.0)
    weights = 0.5 * h * _unit_cc_weights(N)
    return NodeSet("cheb", h, nodes, weights)


@lru_cache(maxsize=None)
def _unit_cheb_diffmat(N):
    x = _unit_cheb_nodes(N)
    c = np.ones(N + 1)
    c[0] = c[-1] = 2.0
    j = np.arange(N + 1)
    # Node differences via 2 sin((j+k)pi/2N) sin((j-k)pi/2N) to avoid
    # cancellation between nearly equal cosines.
    sums = np.add.outer(j, j) * (np.pi / (2 * N))
    diffs = np.subtract.outer(j, j) * (np.pi / (2 * N))
    denom = 2.0 * np.sin(sums) * np.sin(diffs)
    np.fill_diagonal(denom, 1.0)
    sign = np.where((np.add.outer(j, j) % 2) == 0, 1.0, -1.0)
    D = sign * np.outer(c, 1.0 / c) / denom
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    D.setflags(write=False)
    return D


def cheb_diffmat(N, h):
    """Differentiation matrix on the [-h, 0] Chebyshev grid of cheb_nodes.

    Entry (j, k) is the derivative of the k-th Lagrange cardinal at node j.
    Row sums vanish exactly (the diagonal is the negated off-diagonal sum).
    """
    N = _check_order(N)
    h = _check_h(h)
    return (2.0 / h) * _unit_cheb_diffmat(N)


def clenshaw_curtis_weights(N, h):
    """Clenshaw-Curtis weights on [-h, 0] for the N+1 Chebyshev nodes."""
    N = _check_order(N)
    h = _check_h(h)
    return 0.5 * h * _unit_cc_weights(N)


@lru_cache(maxsize=None)
def _unit_gauss(count):
    # Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the
    # Legendre recurrence, weights come from the first eigenvector rows.
    k = np.arange(1, count)
    beta = k / np.sqrt(4.0 * k * k - 1.0)
    J = np.zeros((count, count))
    if count > 1:
        J[np.arange(count - 1), np.arange(1, count)] = beta
        J[np.arange(1, count), np.arange(count - 1)] = beta
    ew, ev = sym_eigen(J)
    x = ew
    w = 2.0 * ev[0, :] ** 2
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(count, h):
    """Gauss-Legendre rule with `count` interior nodes on [-h, 0].

    Exact for polynomials of degree <= 2*count - 1.
    """
    count = _check_order(count)
    h = _check_h(h)
    x, w = _unit_gauss(count)
    return NodeSet("gauss", h, 0.5 * h * (x - 1.0), 0.5 * h * w)


def legendre_vals(k_max, points):
    """Table of Legendre polynomial values p_k(x) for k = 0..k_max.

    Returns an array of shape (len(points), k_max + 1) built with the
    three-term recurrence (k+1) p_{k+1} = (2k+1) x p_k - k p_{k-1}.
    """
    if not isinstance(k_max, (int, np.integer)) or k_max < 0:
        raise ValueError(f"k_max must be a nonnegative integer, got {k_max!r}")
    x = np.atleast_1d(np.asarray(points, dtype=float))
    if x.ndim != 1:
        raise DimensionError("points must be one-dimensional")
    if x.size and (x.min() < -1.0 - 1e-12 or x.max() > 1.0 + 1e-12):
        raise ValueError("points must lie within [-1, 1]")
    out = np.empty((x.size, int(k_max) + 1))
    out[:, 0] = 1.0
    if k_max >= 1:
        out[:, 1] = x
    for k in range(1, int(k_max)):
        out[:, k + 1] = ((2 * k + 1) * x * out[:, k] - k * out[:, k - 1]) / (k + 1)
    return out


@lru_cache(maxsize=None)
def _unit_leg_cheb(N):
    V = legendre_vals(N, np.asarray(_unit_cheb_nodes(N)))
    Vinv = np.linalg.solve(V, np.eye(N + 1))
    V.setflags(write=False)
    Vinv.setflags(write=False)
    return V, Vinv


def transform_leg_to_chebvals(N, n=1):
    """Coefficient-to-values map between Legendre and Chebyshev-grid bases.

    Returns the pair (T_cv, T_vc): T_cv maps stacked Legendre coefficient
    blocks to values on the ascending Chebyshev grid, and T_vc is its
    inverse (dense LU, cached per N).  Block k of row j of T_cv is
    p_k(vartheta_j) * I_n; the first and last block rows are therefore
    ((-1)^k I_n)_k and (I_n)_k.
    """
    N = _check_order(N)
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"block size n must be a positive integer, got {n!r}")
    V, Vinv = _unit_leg_cheb(N)
    if n == 1:
        return V.copy(), Vinv.copy()
    eye = np.eye(int(n))
    return np.kron(V, eye), np.kron(Vinv, eye)
