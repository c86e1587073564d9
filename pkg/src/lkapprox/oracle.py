"""Reference route: the delay Lyapunov matrix and direct quadrature of V.

Independent of the spectral closures, the functional can be written with
kernels built from the delay Lyapunov matrix Psi and integrated by
quadrature.  Psi is constructed semi-analytically from its three defining
properties (dynamic, symmetry, algebraic) via a linear boundary-value
problem of dimension 2 n^2, so this module supplies trusted cross-checks
for everything the closures produce.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import expm
from .linalg import schur_complement, sym_eigen
from .spectral import NodeSet, cheb_nodes, gauss_legendre

__all__ = [
    "LyapunovConditionError",
    "DelayLyapunovMatrix",
    "build_delay_lyap",
    "kernels",
    "Kernels",
    "assemble_quad",
    "k1_quad",
    "property_residuals",
]


class LyapunovConditionError(RuntimeError):
    """The boundary-value problem for Psi is numerically singular.

    This happens exactly when the delay system violates the Lyapunov
    condition (two characteristic roots summing to zero).
    """


@dataclass
class DelayLyapunovMatrix:
    """Psi on [-h, h], realized as the pair Y(s) = Psi(s), Z(s) = Psi(s - h).

    The pair solves Y' = Y A0 + Z A1, Z' = -A0' Z - A1' Y on [0, h] with
    boundary conditions Z(h) = Y(0), Y(0) symmetric, and
    Y'(0) + Y'(0)' = -(Q0 + Q1 + h Q2).  Negative arguments are served
    through the symmetry Psi(-tau) = Psi(tau)'.
    """

    system: object
    Qtilde: np.ndarray
    M: np.ndarray          # generator of the stacked (vec Y, vec Z) flow
    u0: np.ndarray         # (vec Y(0), vec Z(0))
    cond: float
    _cache: dict = field(default_factory=dict, repr=False)

    def pair(self, s):
        """(Y(s), Z(s)) for s in [0, h]."""
        h = self.system.h
        s = float(s)
        if s < -1e-12 * h or s > h * (1.0 + 1e-12):
            raise ValueError(f"argument {s} outside [0, {h}]")
        s = min(max(s, 0.0), h)
        got = self._cache.get(s)
        if got is None:
            n = self.system.n
            u = expm(self.M * s) @ self.u0
            Y = u[: n * n].reshape(n, n, order="F")
            Z = u[n * n:].reshape(n, n, order="F")
            got = (Y, Z)
            self._cache[s] = got
        return got

    def __call__(self, tau):
        """Psi(tau) for tau in [-h, h]."""
        h = self.system.h
        tau = float(tau)
        if abs(tau) > h * (1.0 + 1e-12):
            raise ValueError(f"argument {tau} outside [-{h}, {h}]")
        if tau >= 0.0:
            return self.pair(tau)[0]
        return self.pair(-tau)[0].T


def build_delay_lyap(system, weights):
    """Construct Psi for the system under the lumped weight Q0 + Q1 + h Q2."""
    n = system.n
    A0, A1, h = system.A0, system.A1, system.h
    Qt = weights.combined(h)
    eye = np.eye(n)

    nn = n * n
    M = np.zeros((2 * nn, 2 * nn))
    M[:nn, :nn] = np.kron(A0.T, eye)
    M[:nn, nn:] = np.kron(A1.T, eye)
    M[nn:, :nn] = -np.kron(eye, A1.T)
    M[nn:, nn:] = -np.kron(eye, A0.T)
    E = expm(M * h)

    # Column-major vec: entry (i, j) of Y sits at i + j*n.
    def _y(i, j):
        return i + j * n

    def _z(i, j):
        return nn + i + j * n

    rows = []
    rhs = []
    # Z(h) = Y(0): the propagated lower half minus the initial upper half.
    C = E[nn:, :].copy()
    C[:, :nn] -= np.eye(nn)
    rows.append(C)
    rhs.extend([0.0] * nn)
    # Y(0) symmetric.
    sym = np.zeros((n * (n - 1) // 2, 2 * nn))
    r = 0
    for i in range(n):
        for j in range(i + 1, n):
            sym[r, _y(i, j)] = 1.0
            sym[r, _y(j, i)] = -1.0
            r += 1
    rows.append(sym)
    rhs.extend([0.0] * r)
    # Y0 A0 + A0' Y0 + Z0 A1 + A1' Z0' = -Qt, upper triangle.
    alg = np.zeros((n * (n + 1) // 2, 2 * nn))
    r = 0
    for i in range(n):
        for j in range(i, n):
            for k in range(n):
                alg[r, _y(i, k)] += A0[k, j]
                alg[r, _y(k, j)] += A0[k, i]
                alg[r, _z(i, k)] += A1[k, j]
                alg[r, _z(j, k)] += A1[k, i]
            rhs.append(-Qt[i, j])
            r += 1
    rows.append(alg)

    B = np.vstack(rows)
    b = np.asarray(rhs)
    u0, _, rank, sv = np.linalg.lstsq(B, b, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0.0 else np.inf
    if rank < 2 * nn or not np.isfinite(cond) or cond > 1e12:
        raise LyapunovConditionError(
            f"boundary system is numerically singular (cond = {cond:.3e}); "
            "the delay system violates the Lyapunov condition"
        )
    return DelayLyapunovMatrix(system=system, Qtilde=Qt, M=M, u0=u0, cond=cond)


@dataclass(frozen=True)
class Kernels:
    """The quadratic kernels of V in terms of Psi."""

    corner: np.ndarray   # Psi(0)
    cross: object        # theta -> Psi(-h - theta) A1
    double: object       # (xi, theta) -> A1' Psi(xi - theta) A1
    point: object        # theta -> Q1 + (h + theta) Q2


def kernels(dl, weights):
    A1 = dl.system.A1
    h = dl.system.h
    Q1, Q2 = weights.Q1, weights.Q2

    def cross(theta):
        return dl(-h - theta) @ A1

    def double(xi, theta):
        return A1.T @ dl(xi - theta) @ A1

    def point(theta):
        return Q1 + (h + theta) * Q2

    return Kernels(corner=dl(0.0), cross=cross, double=double, point=point)


def assemble_quad(dl, weights, rule="cc", N=40):
    """Quadrature matrix of V on a value grid ending with the theta = 0 block.

    rule "cc" uses the N+1 Chebyshev nodes (the endpoint block then overlaps
    the last quadrature node); rule "gauss" uses N interior Gauss nodes plus
    an appended zero-weight endpoint, so the matrix keeps the same
    (nN + n)-block shape and the lower-bound elimination applies unchanged.
    """
    system = dl.system
    n, h = system.n, system.h
    ker = kernels(dl, weights)
    if rule == "cc":
        grid = cheb_nodes(int(N), h)
    elif rule == "gauss":
        g = gauss_legendre(int(N), h)
        grid = NodeSet(
            "gauss0", h,
            np.append(g.nodes, 0.0),
            np.append(g.weights, 0.0),
        )
    else:
        raise ValueError(f"unknown quadrature rule {rule!r}")

    t = grid.nodes
    w = grid.weights
    m = t.size
    d = n * m
    P = np.zeros((d, d))

    def blk(j, k):
        return slice(j * n, (j + 1) * n), slice(k * n, (k + 1) * n)

    quad_idx = range(m) if rule == "cc" else range(m - 1)
    for j in quad_idx:
        rj, _ = blk(j, j)
        for k in quad_idx:
            if k < j:
                continue
            K = w[j] * w[k] * ker.double(t[j], t[k])
            _, ck = blk(j, k)
            P[rj, ck] += K
            if k != j:
                rk, cj = blk(k, j)
                P[rk, cj] += K.T
        P[rj, rj] += w[j] * ker.point(t[j])

    last = slice(d - n, d)
    for k in quad_idx:
        _, ck = blk(0, k)
        C = ker.cross(t[k]) * w[k]
        P[last, ck] += C
        P[ck, last] += C.T
    P[last, last] += ker.corner
    return 0.5 * (P + P.T), grid


def k1_quad(dl, weights, rule="cc", N=40, check_psd=True):
    """Lower-bound coefficient computed from the quadrature matrix."""
    P, grid = assemble_quad(dl, weights, rule=rule, N=N)
    n = dl.system.n
    p = P.shape[0] - n
    S = schur_complement(P, p, check_psd=check_psd)
    return float(sym_eigen(S).eigenvalues[0])


def property_residuals(dl, points=25):
    """Relative residuals of the three defining properties of Psi.

    dynamic: central-difference check of Psi' = Psi(.) A0 + Psi(. - h) A1 at
    interior points of (0, h); symmetry: the propagated Z(s) against the
    reflected Y(h - s)'; algebraic: Y'(0) + Y'(0)' + (Q0 + Q1 + h Q2).
    """
    system = dl.system
    A0, A1, h = system.A0, system.A1, system.h
    psi0 = dl(0.0)
    scale = max(1.0, float(np.linalg.norm(psi0, "fro"))
                * (1.0 + float(np.linalg.norm(A0, 2)) + float(np.linalg.norm(A1, 2))))
    delta = 1e-5 * h
    taus = np.linspace(0.0, h, points + 2)[1:-1]

    dyn = 0.0
    for tau in taus:
        dpsi = (dl(tau + delta) - dl(tau - delta)) / (2.0 * delta)
        rhs = dl(tau) @ A0 + dl(tau - h) @ A1
        dyn = max(dyn, float(np.linalg.norm(dpsi - rhs, "fro")))

    sym = 0.0
    for s in np.linspace(0.0, h, points):
        Y_refl = dl.pair(h - s)[0]
        Z_prop = dl.pair(s)[1]
        sym = max(sym, float(np.linalg.norm(Z_prop - Y_refl.T, "fro")))

    Y0, Z0 = dl.pair(0.0)
    dY0 = Y0 @ A0 + Z0 @ A1
    alg = float(np.linalg.norm(dY0 + dY0.T + dl.Qtilde, "fro"))

    return {
        "dynamic": dyn / scale,
        "symmetry": sym / max(1.0, float(np.linalg.norm(psi0, "fro"))),
        "algebraic": alg / max(1.0, float(np.linalg.norm(dl.Qtilde, "fro"))),
    }
