"""Shared oracles for the test suite.

Everything here is an independent route to a quantity the library also
computes: Newton-refined characteristic roots, a Kronecker-vectorization
Lyapunov solve, and high-order quadrature of the functional's integral
formula with the integration domain split at the kernel's diagonal kink.
"""

import numpy as np

from lkapprox import RfdeSystem
from lkapprox.spectral import gauss_legendre


def newton_char_root(seed, A0, A1, h, iters=80):
    """Refine a characteristic root of det(sI - A0 - e^{-sh} A1) = 0.

    Newton iteration on the scalar function d(s) = det(sI - A0 - e^{-sh}A1),
    with the derivative taken by Jacobi's formula d'(s) = d(s) tr(M(s)^{-1}
    M'(s)).  The seed is typically an eigenvalue of a discrete model.
    """
    n = A0.shape[0]
    s = complex(seed)
    eye = np.eye(n)
    for _ in range(iters):
        E = np.exp(-s * h)
        M = s * eye - A0 - E * A1
        Mp = eye + h * E * A1
        try:
            X = np.linalg.solve(M, Mp)
        except np.linalg.LinAlgError:
            break
        step = 1.0 / np.trace(X)
        s = s - step
        if abs(step) < 1e-14 * max(1.0, abs(s)):
            break
    return s


def kron_lyap_solve(A, Q):
    """Solve P A + A^T P = -Q through the Kronecker-vectorized linear system.

    The operator (A^T (x) I + I (x) A^T) acts on the column-major vec of P.
    The matrix is filled block-wise in place so that dimension-123 instances
    (d^2 = 15129 unknowns) stay within memory.
    """
    d = A.shape[0]
    At = A.T
    K = np.zeros((d * d, d * d))
    # kron(At, I): block (i, j) is At[i, j] * I_d.
    for i in range(d):
        Ki = K[i * d:(i + 1) * d]
        for j in range(d):
            Ki[:, j * d:(j + 1) * d].flat[:: d + 1] += At[i, j]
    # kron(I, At): At repeated along the block diagonal.
    for i in range(d):
        K[i * d:(i + 1) * d, i * d:(i + 1) * d] += At
    vecP = np.linalg.solve(K, -Q.reshape(-1, order="F"))
    P = vecP.reshape(d, d, order="F")
    return 0.5 * (P + P.T)


def quad_V(dl, weights, phi, m=60):
    """Quadrature of the functional's integral formula with exact kernels.

    V = x' Psi(0) x + 2 x' int Psi(-h-s) A1 phi(s) ds
      + int int phi(u)' A1' Psi(u - s) A1 phi(s) du ds
      + int phi(s)' (Q1 + (h+s) Q2) phi(s) ds,  x = phi(0).

    Psi has a derivative jump across u = s, so the double integral is split
    at the diagonal (the integrand is symmetric in (u, s)) and each smooth
    triangle integrated with an iterated Gauss rule; the single integrals use
    the same m-point rule.  Spectrally accurate for smooth phi.
    """
    A1 = dl.system.A1
    h = dl.system.h
    x = phi(0.0)
    V = float(x @ dl(0.0) @ x)
    outer = gauss_legendre(m, h)
    gu, wu = np.polynomial.legendre.leggauss(m)
    acc2 = 0.0
    for t, wt in zip(outer.nodes, outer.weights):
        pt = phi(t)
        V += 2.0 * wt * float(x @ dl(-h - t) @ A1 @ pt)
        V += wt * float(pt @ ((weights.Q1 + (h + t) * weights.Q2) @ pt))
        half = -t / 2.0
        for xu, wx in zip(t + half * (gu + 1.0), wu):
            acc2 += wt * (half * wx) * float(phi(xu) @ A1.T @ dl(xu - t) @ A1 @ pt)
    return V + 2.0 * acc2


def random_stable_matrix(rng, d, margin=0.1):
    """A random matrix with spectral abscissa at most -margin."""
    A = rng.standard_normal((d, d))
    shift = float(np.max(np.linalg.eigvals(A).real))
    return A - (shift + margin) * np.eye(d)


def random_stable_rfde(rng, n=2):
    """A random delay system that is exponentially stable for every delay.

    Drawn so that the matrix measure of A0 plus the norm of A1 is negative
    (mu2(A0) + ||A1||_2 < 0), which certifies delay-independent stability and
    in particular the solvability of the delay Lyapunov problem.
    """
    W = rng.standard_normal((n, n))
    delta = rng.uniform(0.4, 1.6)
    A0 = W - (float(np.linalg.eigvalsh(0.5 * (W + W.T))[-1]) + delta) * np.eye(n)
    B = rng.standard_normal((n, n))
    A1 = B * (rng.uniform(0.2, 0.9) * delta / max(1e-12, float(np.linalg.norm(B, 2))))
    h = float(rng.uniform(0.1, 5.0))
    return RfdeSystem(A0, A1, h)


def gram_psi(dl, nodes):
    """The block matrix (Psi(t_j - t_k))_{jk} on the given nodes."""
    n = dl.system.n
    m = len(nodes)
    G = np.zeros((n * m, n * m))
    for j in range(m):
        for k in range(m):
            G[j * n:(j + 1) * n, k * n:(k + 1) * n] = dl(nodes[j] - nodes[k])
    return 0.5 * (G + G.T)
