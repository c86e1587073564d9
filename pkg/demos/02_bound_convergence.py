"""Convergence of the lower-bound coefficient k1 with the approximation
order, and what happens on a system whose delay-free part is unstable.

Four routes compute k1: two spectral ODE closures (Chebyshev collocation
and Legendre tau) and two quadrature assemblies of the exact kernel
formula (Clenshaw-Curtis and Gauss).  All approach one limit; the tau
route gets there at machine precision almost immediately, while the
quadrature routes close in at a polynomial rate because the kernel's
derivative jumps across the diagonal.

Run:  python3 demos/02_bound_convergence.py
"""

import numpy as np

from lkapprox import (
    CostWeights,
    RfdeSystem,
    build_delay_lyap,
    build_functional,
    k1,
    k1_quad,
)

system = RfdeSystem(
    A0=np.array([[-2.0, 0.0], [0.0, -0.9]]),
    A1=np.array([[-1.0, 0.0], [-1.0, -1.0]]),
    h=2.0,
)
weights = CostWeights(np.eye(2), np.eye(2), np.zeros((2, 2)))
dl = build_delay_lyap(system, weights)

print("k1 by order and method (2-D example, h = 2):\n")
print(f"{'N':>4s} {'cheb':>14s} {'legendre':>14s} {'quad-cc':>14s} {'quad-gauss':>14s}")
for N in (5, 10, 20, 40, 80):
    row = [
        k1(build_functional(system, weights, "cheb", N)),
        k1(build_functional(system, weights, "legendre", N)),
        k1_quad(dl, weights, rule="cc", N=N),
        k1_quad(dl, weights, rule="gauss", N=N),
    ]
    print(f"{N:4d} " + " ".join(f"{v:14.10f}" for v in row))

print("""
The legendre column is constant to ~13 digits from N = 10 on: the tau
closure is exact on polynomial segments and the functional's kernels are
entire, so its error collapses spectrally.  The quadrature columns drift
toward the same value at the slower, kink-limited rate.
""")

# A system stabilized by its delayed term: A0 alone is unstable, yet the
# delayed feedback makes the loop stable for small h.  The complete-type
# machinery still certifies it, with a bound that shrinks as the order
# grows when the weight pair is left incomplete (Q1 = Q2 = 0).
system2 = RfdeSystem([[1.0]], [[-2.0]], 0.3)
w_incomplete = CostWeights([[1.0]], [[0.0]], [[0.0]])
print("delay-stabilized scalar system x' = x(t) - 2 x(t - 0.3),")
print("incomplete weights (Q1 = Q2 = 0):\n")
print(f"{'N':>4s} {'k1 cheb':>14s} {'k1 legendre':>14s}")
for N in (5, 10, 20, 40):
    kc = k1(build_functional(system2, w_incomplete, "cheb", N, allow_incomplete=True))
    kl = k1(build_functional(system2, w_incomplete, "legendre", N, allow_incomplete=True))
    print(f"{N:4d} {kc:14.10f} {kl:14.10f}")
print("""
Without the two history weights the functional admits no uniform
positive lower bound, and the computed k1 decays toward zero as the
discretization resolves more of the history: completeness of the weight
triple is what makes the bound survive refinement.
""")
