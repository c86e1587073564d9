"""Functional approximations of complete type and their quadratic lower bound.

A build solves one Lyapunov matrix equation for the chosen spectral closure
and packages the result with its stability verdicts.  The tight lower-bound
coefficient k1 (the largest k with k ||x(t)||^2 <= V) is the smallest
eigenvalue of a generalized Schur complement that eliminates the
history part of the state.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .discretize import (
    CostWeights,
    DiscreteModel,
    FunctionSpec,
    RfdeSystem,
    build_cheb_model,
    build_leg_model,
    build_Qy,
    discretize_cheb,
    discretize_leg,
)
from .linalg import (
    ConvergenceError,
    DimensionError,
    is_hurwitz,
    schur_complement,
    solve_lyapunov,
    sym_eigen,
)

__all__ = [
    "FunctionalApprox",
    "build_functional",
    "evaluate",
    "k1",
    "stability_by_psd",
    "baseline_k1",
    "critical_delay",
    "split_components",
]


@dataclass
class FunctionalApprox:
    """A built functional: V(phi) = d(phi)' P d(phi) in scheme coordinates.

    P is the grid-values matrix for the "cheb" scheme and the Legendre
    coefficient matrix for "legendre".  `residual` is the relative residual
    of the Lyapunov solve the build performed, `lam_min`/`lam_max` are the
    extreme eigenvalues of P, and `psd` is the positivity verdict
    lam_min >= -1e-8 max(1, lam_max).
    """

    scheme: str
    system: RfdeSystem
    weights: CostWeights
    N: int
    split: bool
    model: DiscreteModel
    P: np.ndarray
    residual: float
    hurwitz: bool
    max_re: float
    lam_min: float
    lam_max: float
    psd: bool
    _grid_P: np.ndarray = None
    _k1: float = None

    def grid_matrix(self):
        """P expressed on the Chebyshev value grid (both schemes)."""
        if self.scheme == "cheb":
            return self.P
        if self._grid_P is None:
            T_vc = self.model.values_to_coeff()
            M = T_vc.T @ self.P @ T_vc
            self._grid_P = 0.5 * (M + M.T)
        return self._grid_P


def _relative_residual(P, A, Q):
    res = float(np.linalg.norm(P @ A + A.T @ P + Q, "fro"))
    scale = max(
        1.0,
        float(np.linalg.norm(Q, "fro"))
        + 2.0 * float(np.linalg.norm(A, "fro")) * float(np.linalg.norm(P, "fro")),
    )
    return res / scale


def _legendre_cost(weights, N, h):
    """Coefficient-basis cost for the tau closure.

    Only the endpoint rows of the coefficient-to-values map survive the
    congruence of the corner blocks, giving Q0 on every block and
    (-1)^(j+k) Q1 on block (j, k); the integral term is diagonal with
    moments h/(2k+1) (and h on the matcher block).
    """
    jk = np.add.outer(np.arange(N + 1), np.arange(N + 1))
    alt = np.where(jk % 2 == 0, 1.0, -1.0)
    Q = np.kron(np.ones((N + 1, N + 1)), weights.Q0) + np.kron(alt, weights.Q1)
    if np.any(weights.Q2):
        diag = np.append(h / (2.0 * np.arange(N) + 1.0), h)
        Q += np.kron(np.diag(diag), weights.Q2)
    return Q


def build_functional(system, weights, scheme="legendre", N=20, *,
                     split=True, allow_incomplete=False):
    """Build the spectral approximation of the prescribed-derivative functional.

    Parameters
    ----------
    scheme : {"legendre", "cheb"}
        Coefficient (tau) or grid-value (collocation) closure.
    split : bool
        For the "cheb" scheme, lump the weights into the endpoint block and
        add the exactly known delayed and integral parts afterwards; this
        removes the dominant quadrature error.  The direct cost matrix is
        kept behind split=False.  Ignored for "legendre", whose integral
        term is already exact in the coefficient basis.
    allow_incomplete : bool
        Waive the complete-type requirement Q0 > 0, Q1 > 0, Q2 >= 0.
    """
    if scheme not in ("cheb", "legendre"):
        raise ValueError(f"unknown scheme {scheme!r}")
    if weights.n != system.n:
        raise DimensionError(
            f"weights are {weights.n}-dimensional but the system is {system.n}-dimensional"
        )
    if not allow_incomplete and not weights.is_complete():
        raise ValueError(
            "weights do not satisfy the complete-type contract "
            "(Q0 > 0, Q1 > 0, Q2 >= 0); pass allow_incomplete=True to waive"
        )
    N = int(N)
    if N < 1:
        raise ValueError(f"order must be an integer >= 1, got {N!r}")

    n, h = system.n, system.h
    d = n * (N + 1)
    if scheme == "cheb":
        model = build_cheb_model(system, N)
        if split:
            Q_solve = np.zeros((d, d))
            Q_solve[d - n:, d - n:] = weights.combined(h)
            P0 = solve_lyapunov(model.A, Q_solve)
            residual = _relative_residual(P0, model.A, Q_solve)
            w = model.nodes.weights
            P = P0 + np.kron(np.diag(w), weights.Q1)
            if np.any(weights.Q2):
                P = P + np.kron(np.diag(w * (h + model.nodes.nodes)), weights.Q2)
        else:
            Q_solve = build_Qy(weights, N, h)
            P = solve_lyapunov(model.A, Q_solve)
            residual = _relative_residual(P, model.A, Q_solve)
    else:
        model = build_leg_model(system, N)
        Q_solve = _legendre_cost(weights, N, h)
        P = solve_lyapunov(model.A, Q_solve)
        residual = _relative_residual(P, model.A, Q_solve)

    hurwitz, max_re = is_hurwitz(model.A)
    ew = np.linalg.eigvalsh(0.5 * (P + P.T))
    lam_min, lam_max = float(ew[0]), float(ew[-1])
    psd = lam_min >= -1e-8 * max(1.0, lam_max)
    return FunctionalApprox(
        scheme=scheme, system=system, weights=weights, N=N,
        split=bool(split) if scheme == "cheb" else True,
        model=model, P=P, residual=residual,
        hurwitz=hurwitz, max_re=max_re,
        lam_min=lam_min, lam_max=lam_max, psd=psd,
    )


def evaluate(fa, phi):
    """V(phi) for a segment given as a FunctionSpec."""
    if phi.n != fa.system.n:
        raise DimensionError(
            f"segment is {phi.n}-dimensional but the system is {fa.system.n}-dimensional"
        )
    if fa.scheme == "cheb":
        y = discretize_cheb(phi, fa.N, fa.system.h)
        return float(y @ fa.P @ y)
    zeta = discretize_leg(phi, fa.N, fa.system.h)
    return float(zeta @ fa.P @ zeta)


def k1(fa, check_psd=True):
    """Tight coefficient of the quadratic lower bound k1 ||x(t)||^2 <= V.

    Eliminates the history blocks by a generalized Schur complement; for the
    tau scheme the elimination runs in combined coordinates whose last block
    is the endpoint value.  With check_psd the indefinite case (functional
    past the stability boundary) raises instead of returning a negative
    number.
    """
    n, N = fa.system.n, fa.N
    p = n * N
    if fa._k1 is None:
        if fa.scheme == "cheb":
            M = fa.P
        else:
            d = n * (N + 1)
            T_cc = np.eye(d)
            T_cc[p:, :p] = -np.tile(np.eye(n), (1, N))
            M = T_cc.T @ fa.P @ T_cc
        S = schur_complement(M, p, check_psd=False)
        fa._k1 = float(sym_eigen(S).eigenvalues[0])
    if check_psd:
        nrm2 = max(abs(fa.lam_min), abs(fa.lam_max))
        if fa.lam_min < -1e-8 * nrm2:
            raise ValueError(
                f"functional is indefinite (lam_min = {fa.lam_min:.3e}); "
                "pass check_psd=False to evaluate anyway"
            )
    return fa._k1


def stability_by_psd(fa):
    """Stability verdict from positivity of P.

    Returns (psd, lam_min).  For orders past the scheme's resolution
    threshold this verdict matches the Hurwitz test of the closure matrix.
    """
    return fa.psd, fa.lam_min


def baseline_k1(system, weights, method="norm-ratio"):
    """Classical lower-bound coefficients used as comparison baselines.

    "norm-ratio": min(lam_min(Q0)/(2||A0|| + ||A1||), lam_min(Q1)/||A1||),
    with the second ratio +inf for a delay-free system (A1 = 0).
    "alpha-max": the largest alpha keeping
    blkdiag(Q0, Q1) + alpha [[A0' + A0, A1], [A1', 0]] positive semidefinite,
    located by bisection (tolerance 1e-8).
    """
    if weights.n != system.n:
        raise DimensionError("weights and system dimensions differ")
    n = system.n
    if method == "norm-ratio":
        a0 = float(np.linalg.norm(system.A0, 2))
        a1 = float(np.linalg.norm(system.A1, 2))
        q0 = float(np.linalg.eigvalsh(weights.Q0)[0])
        q1 = float(np.linalg.eigvalsh(weights.Q1)[0])
        bound0 = q0 / (2.0 * a0 + a1) if (2.0 * a0 + a1) > 0.0 else np.inf
        bound1 = q1 / a1 if a1 > 0.0 else np.inf
        return float(min(bound0, bound1))
    if method != "alpha-max":
        raise ValueError(f"unknown baseline method {method!r}")

    S = np.zeros((2 * n, 2 * n))
    S[:n, :n] = weights.Q0
    S[n:, n:] = weights.Q1
    M = np.zeros((2 * n, 2 * n))
    M[:n, :n] = system.A0.T + system.A0
    M[:n, n:] = system.A1
    M[n:, :n] = system.A1.T

    def _feasible(alpha):
        ew = sym_eigen(S + alpha * M).eigenvalues
        scale = max(1.0, float(abs(ew[-1])))
        return ew[0] >= -1e-12 * scale

    lam_min_S = float(np.linalg.eigvalsh(S)[0])
    if lam_min_S < 0.0:
        raise ValueError("blkdiag(Q0, Q1) must be positive semidefinite")
    norm_M = float(np.linalg.norm(M, 2))
    hi = lam_min_S / max(1e-300, norm_M)
    if hi <= 0.0:
        # Singular blkdiag(Q0, Q1): the natural seed vanishes, but the
        # feasible alpha interval can still be a proper [0, alpha*].
        hi = 1e-8
    lo = 0.0
    for _ in range(200):
        if not _feasible(hi):
            break
        lo = hi
        hi *= 2.0
    else:
        raise ConvergenceError(
            "no finite feasibility bound for alpha; the loss matrix is not sign-definite"
        )
    while hi - lo > 1e-8 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if _feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def critical_delay(system, scheme="legendre", N=20, bracket=(1.0, 10.0), tol=1e-4):
    """Delay at which the closure's spectral abscissa crosses zero.

    Bisection on h; the lower bracket must be stable and the upper bracket
    unstable (both for the chosen closure).
    """
    h_lo, h_hi = float(bracket[0]), float(bracket[1])
    if not (0.0 < h_lo < h_hi):
        raise ValueError(f"bracket must satisfy 0 < lo < hi, got {bracket!r}")
    tol = float(tol)
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    builder = build_cheb_model if scheme == "cheb" else build_leg_model
    if scheme not in ("cheb", "legendre"):
        raise ValueError(f"unknown scheme {scheme!r}")

    def _abscissa(h):
        model = builder(dataclasses.replace(system, h=h), N)
        return is_hurwitz(model.A)[1]

    if _abscissa(h_lo) >= 0.0:
        raise ValueError(f"system is not stable at the lower bracket h = {h_lo}")
    if _abscissa(h_hi) < 0.0:
        raise ValueError(f"system is still stable at the upper bracket h = {h_hi}")
    while h_hi - h_lo > tol:
        mid = 0.5 * (h_lo + h_hi)
        if _abscissa(mid) < 0.0:
            h_lo = mid
        else:
            h_hi = mid
    return 0.5 * (h_lo + h_hi)


def split_components(system, weights, N):
    """The three addends of the functional in coefficient coordinates.

    P0 solves the closure's Lyapunov equation with all weight lumped into
    the endpoint block (derivative weights (Q0 + Q1 + h Q2, 0, 0)); P1 and
    P2 are the closed forms of the delayed term int phi' Q1 phi and the
    weighted integral term int (h + s) phi' Q2 phi.  Their sum equals the
    direct build's P exactly, up to the solver's residual.
    """
    if weights.n != system.n:
        raise DimensionError("weights and system dimensions differ")
    N = int(N)
    if N < 1:
        raise ValueError(f"order must be an integer >= 1, got {N!r}")
    n, h = system.n, system.h
    model = build_leg_model(system, N)
    Qt = weights.combined(h)
    P0 = solve_lyapunov(model.A, np.kron(np.ones((N + 1, N + 1)), Qt))

    diag1 = np.append(h / (2.0 * np.arange(N) + 1.0), 0.0)
    P1 = np.kron(np.diag(diag1), weights.Q1)

    tri = np.zeros((N + 1, N + 1))
    for a in range(N):
        tri[a, a] = 2.0 / (2 * a + 1)
    for a in range(N - 1):
        tri[a, a + 1] = tri[a + 1, a] = 2.0 * (a + 1) / ((2 * a + 1) * (2 * a + 3))
    P2 = (h / 2.0) ** 2 * np.kron(tri, weights.Q2)
    return P0, P1, P2
