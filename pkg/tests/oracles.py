"""Independent brute-force oracles the fast implementations are checked against.

Everything here is written as literal sums/enumerations (or classical closed
forms) and stays independent of the code paths under test.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.special import gamma as gamma_fn

from procdcov import DcovParams, PairedSample, dist_matrix_from_values, uniform_partition


def naive_dcov(A: np.ndarray, B: np.ndarray) -> float:
    """Literal O(n^3) triple-sum evaluation of I1 + I3 - 2*I2."""
    n = A.shape[0]
    i1 = sum(A[k, l] * B[k, l] for k in range(n) for l in range(n)) / n**2
    i3 = (sum(A[k, l] for k in range(n) for l in range(n)) / n**2) \
        * (sum(B[k, l] for k in range(n) for l in range(n)) / n**2)
    i2 = sum(A[k, l] * B[k, m]
             for k in range(n) for l in range(n) for m in range(n)) / n**3
    return i1 + i3 - 2.0 * i2


def naive_dcor(Ax: np.ndarray, Ay: np.ndarray) -> float:
    return naive_dcov(Ax, Ay) / np.sqrt(naive_dcov(Ax, Ax) * naive_dcov(Ay, Ay))


def f_tensor(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """f evaluated on every ordered index 4-tuple, as an (n,n,n,n) tensor."""
    n = A.shape[0]
    i, j, k, l = np.ix_(*[np.arange(n)] * 4)
    return A[i, j] * B[i, j] + A[i, j] * B[k, l] - 2.0 * A[i, j] * B[i, k]


def h_tensor(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Symmetrized kernel on every tuple: average of f over all axis orders."""
    F = f_tensor(A, B)
    H = np.zeros_like(F)
    for perm in itertools.permutations(range(4)):
        H += np.transpose(F, perm)
    return H / 24.0


def h2_brute(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Projected kernel against the empirical law by full tuple enumeration."""
    H = h_tensor(A, B)
    h12 = H.mean(axis=(2, 3))
    h1 = H.mean(axis=(1, 2, 3))
    return h12 - h1[:, None] - h1[None, :] + H.mean()


def u_stat_enum(A: np.ndarray, B: np.ndarray) -> float:
    """Average of f over all ordered tuples of mutually distinct indices."""
    n = A.shape[0]
    total = 0.0
    count = 0
    for i, j, k, l in itertools.permutations(range(n), 4):
        total += A[i, j] * B[i, j] + A[i, j] * B[k, l] - 2.0 * A[i, j] * B[i, k]
        count += 1
    return total / count


def c0_gamma(beta: float) -> float:
    """Closed form of the integral via t = s^2/2 and the identity
    int_0^inf (1 - exp(-t)) t^(-1-g) dt = Gamma(1-g)/g."""
    g = beta / 4.0
    return 2.0 ** (-beta / 4.0) * gamma_fn(1.0 - g) / g


def random_paired_sample(rng: np.random.Generator, n: int, p: int) -> PairedSample:
    part = uniform_partition(p)
    return PairedSample(part, rng.normal(size=(n, p)), rng.normal(size=(n, p)))


def random_dist_pair(rng: np.random.Generator, n: int, p: int, beta: float):
    sample = random_paired_sample(rng, n, p)
    params = DcovParams(beta)
    return (dist_matrix_from_values(sample.x, sample.partition, params),
            dist_matrix_from_values(sample.y, sample.partition, params))
