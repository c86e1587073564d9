"""Dense linear-algebra primitives shared by the approximation pipeline.

Thin, contract-checked wrappers around LAPACK-backed routines plus the
generalized Schur complement used for quadratic lower bounds.  All inputs
are real; eigenvalues may come back complex.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

__all__ = [
    "DimensionError",
    "ConvergenceError",
    "SingularOperatorError",
    "NumericalFailureError",
    "RangeError",
    "SymEigen",
    "eigenvalues",
    "is_hurwitz",
    "solve_lyapunov",
    "sym_eigen",
    "schur_complement",
    "expm",
]


class DimensionError(ValueError):
    """Operand shapes do not match the operation's contract."""


class ConvergenceError(RuntimeError):
    """An iterative eigenvalue computation failed to converge."""


class SingularOperatorError(RuntimeError):
    """The map X -> X A + A^T X is numerically singular.

    Attributes
    ----------
    pair : tuple of complex
        The eigenvalue pair (lam_i, lam_j) with lam_i + lam_j closest to zero.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NumericalFailureError(RuntimeError):
    """A computed quantity failed its residual gate.

    Attributes
    ----------
    residual : float
        The offending residual norm.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class RangeError(RuntimeError):
    """Result left the representable floating-point range."""


def _as_square(A, name="A"):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DimensionError(f"{name} must be square and nonempty, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


def _check_symmetric(S, name):
    nrm = np.linalg.norm(S, "fro")
    if np.linalg.norm(S - S.T, "fro") > 1e-10 * max(1.0, nrm):
        raise ValueError(f"{name} is not symmetric to working tolerance")


def eigenvalues(A):
    """Eigenvalues of a real square matrix (QR algorithm, unordered)."""
    A = _as_square(A)
    try:
        return scipy.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration did not converge: {exc}") from exc


def is_hurwitz(A, margin=0.0):
    """Test whether every eigenvalue of A satisfies Re(lam) < -margin.

    Returns
    -------
    (bool, float)
        The verdict and the spectral abscissa max Re(lam).
    """
    if margin < 0.0:
        raise ValueError("margin must be nonnegative")
    lam = eigenvalues(A)
    max_re = float(np.max(lam.real))
    return max_re < -margin, max_re


def solve_lyapunov(A, Q):
    """Solve P A + A^T P = -Q for the symmetric matrix P.

    Uses the real-Schur (Bartels-Stewart) factorization.  The operator is
    singular exactly when two eigenvalues of A sum to zero, so that pairing
    is checked first; afterwards the residual ||P A + A^T P + Q||_F is gated
    at 1e-9 relative to max(1, ||Q||_F + 2 ||A||_F ||P||_F).

    Raises
    ------
    SingularOperatorError
        If min |lam_i + lam_j| falls below 1e-10 * max(1, rho(A)).
    NumericalFailureError
        If the residual gate fails.
    """
    A = _as_square(A)
    Q = _as_square(Q, "Q")
    if Q.shape != A.shape:
        raise DimensionError(f"A and Q dimensions differ: {A.shape} vs {Q.shape}")
    _check_symmetric(Q, "Q")

    lam = eigenvalues(A)
    sums = np.abs(lam[:, None] + lam[None, :])
    i, j = np.unravel_index(int(np.argmin(sums)), sums.shape)
    gap = float(sums[i, j])
    if gap < 1e-10 * max(1.0, float(np.abs(lam).max())):
        raise SingularOperatorError(
            f"eigenvalues {lam[i]:.6g} and {lam[j]:.6g} sum to {gap:.3e}; "
            "the Lyapunov operator is singular",
            pair=(complex(lam[i]), complex(lam[j])),
        )

    # P A + A^T P = -Q  is  (A^T) P + P (A^T)^T = -Q in scipy's convention.
    P = scipy.linalg.solve_continuous_lyapunov(A.T, -Q)
    P = 0.5 * (P + P.T)

    residual = float(np.linalg.norm(P @ A + A.T @ P + Q, "fro"))
    scale = max(
        1.0,
        float(np.linalg.norm(Q, "fro"))
        + 2.0 * float(np.linalg.norm(A, "fro")) * float(np.linalg.norm(P, "fro")),
    )
    if residual > 1e-9 * scale:
        raise NumericalFailureError(
            f"Lyapunov residual {residual:.3e} exceeds 1e-9 * {scale:.3e}",
            residual=residual,
        )
    return P


class SymEigen(NamedTuple):
    eigenvalues: np.ndarray   # ascending
    eigenvectors: np.ndarray  # orthonormal columns


def sym_eigen(S):
    """Full eigendecomposition of a symmetric matrix, eigenvalues ascending."""
    S = _as_square(S, "S")
    _check_symmetric(S, "S")
    w, V = np.linalg.eigh(0.5 * (S + S.T))
    return SymEigen(w, V)


def schur_complement(P, p, check_psd=True):
    """Generalized Schur complement X - B^T Z^+ B of the leading p x p block.

    P is partitioned as [[Z, B], [B^T, X]] with Z of order p.  When Z is well
    conditioned (lam_min > 1e-10 lam_max) a direct solve is used; otherwise
    Z^+ is formed from the eigendecomposition with rank cutoff
    p * eps * lam_max(Z).

    Parameters
    ----------
    check_psd : bool
        Enforce the precondition lam_min(P) >= -1e-8 ||P||_2.  Callers that
        deliberately probe indefinite P (e.g. past a stability boundary)
        may disable the check.
    """
    P = _as_square(P, "P")
    d = P.shape[0]
    if not 0 <= p < d:
        raise DimensionError(f"block order p={p} must satisfy 0 <= p < {d}")
    _check_symmetric(P, "P")
    P = 0.5 * (P + P.T)

    if check_psd:
        w = np.linalg.eigvalsh(P)
        nrm2 = max(abs(float(w[0])), abs(float(w[-1])))
        if w[0] < -1e-8 * nrm2:
            raise ValueError(
                f"P is indefinite (lam_min = {w[0]:.3e}, ||P||_2 = {nrm2:.3e})"
            )

    if p == 0:
        return P.copy()

    Z = P[:p, :p]
    B = P[:p, p:]
    X = P[p:, p:]
    zw, zV = sym_eigen(Z)
    zmax = float(zw[-1])
    if zmax > 0.0 and float(zw[0]) > 1e-10 * zmax:
        S = X - B.T @ np.linalg.solve(Z, B)
    else:
        cutoff = p * np.finfo(float).eps * max(zmax, 0.0)
        inv = np.zeros_like(zw)
        keep = zw > cutoff
        inv[keep] = 1.0 / zw[keep]
        G = zV.T @ B
        S = X - G.T @ (inv[:, None] * G)
    return 0.5 * (S + S.T)


def expm(A):
    """Matrix exponential (scaling-and-squaring with Pade approximation)."""
    A = _as_square(A)
    E = scipy.linalg.expm(A)
    if not np.all(np.isfinite(E)):
        raise RangeError("matrix exponential overflowed the floating-point range")
    return E
