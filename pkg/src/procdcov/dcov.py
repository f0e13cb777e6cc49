"""Sample distance covariance and correlation of discretized paths.

Distances are step-function L2 distances raised to a power beta in (0, 2).
The V-statistic

    T = I1 + I3 - 2*I2,
    I1 = mean(A o B),  I3 = mean(A) * mean(B),
    I2 = mean_k( rowmean_A(k) * rowmean_B(k) ),

over a pair of n x n distance matrices costs O(n^2).  numpy reductions use
pairwise summation, which keeps the near-cancellation of I1, I3, I2 under
independence from swamping the O(1/n) signal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.spatial.distance import cdist

from .grid import PairedSample, Partition, Trajectory

__all__ = [
    "DcovParams",
    "DistMatrix",
    "dist_matrix",
    "dist_matrix_from_values",
    "sample_dcov",
    "sample_dcor",
    "u_stat_T",
    "c0_constant",
    "N_ENUM",
]

# Cutoff below which the U-statistic is evaluated by direct tuple enumeration;
# the closed form takes over above it and both are cross-checked on the overlap.
N_ENUM = 12

# Relative guard for the correlation denominator; see sample_dcor.
EPS_DENOM = 1e-14


@dataclass(frozen=True)
class DcovParams:
    """Exponent beta of the distance kernel, restricted to (0, 2)."""

    beta: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.beta < 2.0:
            raise ValueError(f"beta must lie in (0, 2), got {self.beta}")


@dataclass(frozen=True)
class DistMatrix:
    """Symmetric n x n matrix of beta-powered step-L2 distances, zero diagonal."""

    entries: np.ndarray
    beta: float

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        object.__setattr__(self, "entries", e)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("entries must be a square matrix")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def to_csv(self, path) -> None:
        # Debug format, not a stable interchange: header "n,beta" then rows.
        with open(path, "w") as fh:
            fh.write("n,beta\n")
            fh.write(f"{self.n},{'%.17g' % self.beta}\n")
            np.savetxt(fh, self.entries, delimiter=",", fmt="%.17g")

    @classmethod
    def from_csv(cls, path) -> "DistMatrix":
        with open(path) as fh:
            fh.readline()
            n_s, beta_s = fh.readline().strip().split(",")
            entries = np.loadtxt(fh, delimiter=",", ndmin=2)
        if entries.shape != (int(n_s), int(n_s)):
            raise ValueError(f"{path}: matrix shape {entries.shape} != header n={n_s}")
        return cls(entries, float(beta_s))


def dist_matrix_from_values(values: np.ndarray, partition: Partition,
                            params: DcovParams) -> DistMatrix:
    """Pairwise beta-powered distances for an (n, p) array of path values."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] < 1:
        raise ValueError("need an (n, p) array with n >= 1")
    weighted = values * np.sqrt(partition.weights)
    d = cdist(weighted, weighted)
    np.fill_diagonal(d, 0.0)
    if params.beta != 1.0:
        d **= params.beta
    return DistMatrix(d, params.beta)


def dist_matrix(paths: Sequence[Trajectory], params: DcovParams) -> DistMatrix:
    """Pairwise matrix of step_l2_distance(path_k, path_l)**beta."""
    if len(paths) == 0:
        raise ValueError("need at least one trajectory")
    part = paths[0].partition
    for t in paths:
        if t.partition != part:
            raise ValueError("all trajectories must share one partition")
    return dist_matrix_from_values(np.stack([t.values for t in paths]), part, params)


def _check_same_n(a: DistMatrix, b: DistMatrix) -> int:
    if a.n != b.n:
        raise ValueError(f"distance matrices differ in size: {a.n} vs {b.n}")
    return a.n


def sample_dcov(a: DistMatrix, b: DistMatrix) -> float:
    """Sample distance covariance I1 + I3 - 2*I2 of two distance matrices."""
    _check_same_n(a, b)
    A, B = a.entries, b.entries
    i1 = float(np.mean(A * B))
    i3 = float(np.mean(A)) * float(np.mean(B))
    i2 = float(np.mean(A.mean(axis=1) * B.mean(axis=1)))
    return i1 + i3 - 2.0 * i2


def sample_dcor(a: DistMatrix, b: DistMatrix) -> Optional[float]:
    """Sample distance correlation, or None when a denominator degenerates.

    Constant samples produce an all-zero distance matrix and hence a zero
    denominator; that is a legal input and yields None rather than NaN.
    """
    _check_same_n(a, b)
    dxx = sample_dcov(a, a)
    dyy = sample_dcov(b, b)
    eps = EPS_DENOM * float(np.mean(a.entries)) * float(np.mean(b.entries))
    if dxx <= eps or dyy <= eps:
        return None
    return sample_dcov(a, b) / np.sqrt(dxx * dyy)


def _f_value(A: np.ndarray, B: np.ndarray, i1: int, i2: int, i3: int, i4: int) -> float:
    return A[i1, i2] * B[i1, i2] + A[i1, i2] * B[i3, i4] - 2.0 * A[i1, i2] * B[i1, i3]


def _u_stat_enumerate(A: np.ndarray, B: np.ndarray, n: int) -> float:
    total = 0.0
    for t in itertools.permutations(range(n), 4):
        total += _f_value(A, B, *t)
    return total / (n * (n - 1) * (n - 2) * (n - 3))


def _u_stat_closed_form(A: np.ndarray, B: np.ndarray, n: int) -> float:
    # inclusion-exclusion over the overlap patterns of the two index pairs of
    # each kernel term; only O(n^2) aggregates appear
    s1 = float((A * B).sum())
    sa = float(A.sum())
    sb = float(B.sum())
    c = float((A.sum(axis=1) * B.sum(axis=1)).sum())
    total = ((n - 2) * (n - 3) + 2) * s1 + sa * sb - 4.0 * c - 2.0 * (n - 3) * (c - s1)
    return total / (n * (n - 1) * (n - 2) * (n - 3))


def u_stat_T(a: DistMatrix, b: DistMatrix) -> float:
    """U-statistic version of sample_dcov over mutually distinct index tuples.

    For n <= N_ENUM the average is taken by direct enumeration of all ordered
    4-tuples of distinct indices; beyond that an inclusion-exclusion closed
    form in O(n^2) aggregates is used.  The two paths agree on the overlap.
    """
    n = _check_same_n(a, b)
    if n < 4:
        raise ValueError(f"the U-statistic needs n >= 4, got n={n}")
    if n <= N_ENUM:
        return _u_stat_enumerate(a.entries, b.entries, n)
    return _u_stat_closed_form(a.entries, b.entries, n)


def c0_constant(params: DcovParams) -> float:
    """The constant c0 = integral over R of (1 - exp(-s^2/2)) / |s|^(1 + beta/2) ds.

    Evaluated by adaptive quadrature to absolute error <= 1e-8. The integrand
    is regular at 0 since 1 - exp(-s^2/2) ~ s^2/2.
    """
    beta = params.beta
    integrand = lambda s: -np.expm1(-0.5 * s * s) * s ** (-1.0 - 0.5 * beta)
    inner, err_inner = quad(integrand, 0.0, 2.0, epsabs=1e-11, epsrel=1e-11)
    tail, err_tail = quad(integrand, 2.0, np.inf, epsabs=1e-11, epsrel=1e-11)
    if 2.0 * (err_inner + err_tail) > 1e-8:
        raise RuntimeError("quadrature for c0 did not reach the 1e-8 error target")
    return 2.0 * (inner + tail)


def pair_dist_matrices(sample: PairedSample, params: DcovParams) -> tuple[DistMatrix, DistMatrix]:
    """Distance matrices of the X paths and the Y paths of a paired sample."""
    return (dist_matrix_from_values(sample.x, sample.partition, params),
            dist_matrix_from_values(sample.y, sample.partition, params))
