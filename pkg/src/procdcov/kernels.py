"""Order-4 kernel of the distance-covariance V-statistic, its symmetrization,
and second Hoeffding projections against a discrete law.

The raw kernel on pairs z = (x, y), written in the distance matrices A and B
of one paired sample, is

    f(z1, z2, z3, z4) = a12*b12 + a12*b34 - 2*a12*b13,

and h is its average over the 24 argument orders.  The projection against a
law H,

    h2(z_a, z_b; H) = E[h(z_a, z_b, Z, Z')] - E[h(z_a, Z, Z', Z'')]
                      - E[h(Z, z_b, Z', Z'')] + E[h(Z, Z', Z'', Z''')],

has zero marginal integrals by construction; with H the empirical law of the
sample itself this degeneracy holds exactly: every row of the matrix of h2
values averages to zero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dcov import DistMatrix

__all__ = ["KernelContext", "H2Matrix", "kernel_f", "kernel_h",
           "h2_matrix", "h2_product_law", "double_centered"]


def double_centered(m: np.ndarray) -> np.ndarray:
    """m - rowmean - colmean + grandmean, grouped so symmetry survives fp."""
    rm = m.mean(axis=1)
    return (m - (rm[:, None] + rm[None, :])) + m.mean()


@dataclass(frozen=True)
class KernelContext:
    """Distance matrices of one paired sample plus every aggregate the kernel
    closed forms need: row means, grand means, and paired cross-moments.

    Bootstrap evaluation touches these caches millions of times; nothing here
    rescans trajectories.
    """

    a: DistMatrix
    b: DistMatrix

    def __post_init__(self):
        if self.a.n != self.b.n:
            raise ValueError("paired distance matrices must have equal n")
        A, B = self.a.entries, self.b.entries
        n = self.a.n
        prod = A * B
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "row_mean_a", A.mean(axis=1))
        object.__setattr__(self, "row_mean_b", B.mean(axis=1))
        object.__setattr__(self, "grand_mean_a", float(A.mean()))
        object.__setattr__(self, "grand_mean_b", float(B.mean()))
        # mean_j A(a,j)B(b,j) as a matrix, plus its contractions against the
        # marginal row means.
        object.__setattr__(self, "prod_row_mean", prod.mean(axis=1))
        object.__setattr__(self, "prod_grand_mean", float(prod.mean()))
        object.__setattr__(self, "cross", A @ B / n)
        object.__setattr__(self, "cross_a_rowb", A @ self.row_mean_b / n)
        object.__setattr__(self, "cross_b_rowa", B @ self.row_mean_a / n)


@dataclass(frozen=True)
class H2Matrix:
    """n x n values of the projected kernel h2 against a reference law."""

    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def _check_indices(n: int, idx: tuple[int, ...]) -> None:
    for i in idx:
        if not 0 <= i < n:
            raise ValueError(f"index {i} out of range [0, {n})")


def kernel_f(ctx: KernelContext, i1: int, i2: int, i3: int, i4: int) -> float:
    """Raw order-4 kernel evaluated at sample indices."""
    _check_indices(ctx.n, (i1, i2, i3, i4))
    A, B = ctx.a.entries, ctx.b.entries
    return A[i1, i2] * B[i1, i2] + A[i1, i2] * B[i3, i4] - 2.0 * A[i1, i2] * B[i1, i3]


def kernel_h(ctx: KernelContext, i1: int, i2: int, i3: int, i4: int) -> float:
    """Symmetrized kernel: average of kernel_f over all 24 argument orders."""
    idx = (i1, i2, i3, i4)
    _check_indices(ctx.n, idx)
    total = 0.0
    for perm in itertools.permutations(idx):
        total += kernel_f(ctx, *perm)
    return total / 24.0


def h2_matrix(ctx: KernelContext) -> H2Matrix:
    """h2 against the empirical law of the paired sample, for all index pairs.

    Expanding the 24 argument orders of h and taking empirical expectations
    (averages with replacement) reduces E[h(z_a, z_b, Z, Z')] to aggregates of
    A, B; subtracting the two marginal projections and adding the mean is then
    exactly a double-centering.  Correctness is pinned by the brute-force
    enumeration oracle in the tests rather than by the algebra here.
    """
    if ctx.n < 2:
        raise ValueError("h2 needs a sample of at least two pairs")
    A, B = ctx.a.entries, ctx.b.entries
    abar, bbar = ctx.row_mean_a, ctx.row_mean_b
    q, s1 = ctx.prod_row_mean, ctx.prod_grand_mean
    r, u, v = ctx.cross, ctx.cross_a_rowb, ctx.cross_b_rowa
    prod = A * B
    ab_outer = np.outer(abar, bbar)
    h12 = (prod + 2.0 * (q[:, None] + q[None, :]) + s1
           + ctx.grand_mean_b * A + ctx.grand_mean_a * B
           + 2.0 * (ab_outer + ab_outer.T)
           - A * (bbar[:, None] + bbar[None, :])
           - B * (abar[:, None] + abar[None, :])
           - ((abar * bbar)[:, None] + (abar * bbar)[None, :])
           - (r + r.T)
           - (u[:, None] + u[None, :])
           - (v[:, None] + v[None, :])) / 6.0
    return H2Matrix(double_centered(h12))


def h2_product_law(a: DistMatrix, b: DistMatrix) -> H2Matrix:
    """h2 under the product of the empirical marginals, where it factorizes:
    entry (a, b) = (1/6) * Atilde(a,b) * Btilde(a,b) with Atilde, Btilde the
    double-centered distance matrices.
    """
    if a.n != b.n:
        raise ValueError("distance matrices must have equal n")
    if a.n < 2:
        raise ValueError("h2 needs a sample of at least two pairs")
    return H2Matrix(double_centered(a.entries) * double_centered(b.entries) / 6.0)
