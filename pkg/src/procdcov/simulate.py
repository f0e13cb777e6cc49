"""Path generators for the simulation study: correlated fractional Brownian
motion pairs, (geometric) Brownian motion, alpha-stable Levy motion, and
Pareto-shock heavy-tailed pairs.

All generators draw on a uniform grid t_i = i/p and consume a private
numpy Generator, so identical streams give bit-identical paths.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .grid import Trajectory, uniform_partition

__all__ = [
    "FbmPairSpec",
    "StableSpec",
    "ParetoShockSpec",
    "fbm_pair",
    "fbm_pair_values",
    "gbm_path",
    "gbm_values",
    "stable_levy_path",
    "stable_values",
    "pareto_shock_pair",
    "pareto_shock_values",
    "pareto_draw",
]


@dataclass(frozen=True)
class FbmPairSpec:
    """Fractional Brownian pair with marginal Hurst exponent H and
    cross-covariance rho * C_H(s, t)."""

    H: float
    rho: float = 0.0
    p: int = 100

    def __post_init__(self):
        if not 0.0 < self.H < 1.0:
            raise ValueError(f"Hurst exponent must lie in (0, 1), got {self.H}")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"cross-correlation must lie in [-1, 1], got {self.rho}")
        if self.p < 1:
            raise ValueError("grid size must be >= 1")


@dataclass(frozen=True)
class StableSpec:
    """Stable law S_alpha(sigma, beta_skew, mu) in the classical
    1-parametrization: the characteristic function is
    exp(-sigma^a |t|^a (1 - i*beta*sign(t)*tan(pi*a/2)) + i*mu*t) for a != 1,
    with the usual log form at a = 1."""

    alpha: float = 1.8
    beta_skew: float = 0.3
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError(f"stability index must lie in (0, 2], got {self.alpha}")
        if not -1.0 <= self.beta_skew <= 1.0:
            raise ValueError(f"skewness must lie in [-1, 1], got {self.beta_skew}")
        if self.sigma <= 0.0:
            raise ValueError("scale must be positive")


@dataclass(frozen=True)
class ParetoShockSpec:
    """Brownian pairs hit by Pareto(alpha) shocks: a joint shock scaling both
    components, or separate iid shocks on correlated Brownian motions."""

    alpha: float
    model: str = "joint_shock"
    rho: float = 0.5

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError("tail index must be positive")
        if self.model not in ("joint_shock", "separate_shocks"):
            raise ValueError(f"unknown shock model {self.model!r}")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"correlation must lie in [-1, 1], got {self.rho}")


# ---------------------------------------------------------------------------
# fractional Brownian pairs

_CHOL_CACHE: dict[tuple[float, int], np.ndarray] = {}
_CHOL_LOCK = threading.Lock()


def _fbm_cholesky(H: float, p: int) -> np.ndarray:
    """Lower Cholesky factor of the p x p fBM covariance on the grid i/p.

    Near the positive-semidefinite boundary the factorization may fail from
    rounding; a diagonal jitter of 1e-12 * trace/dim is added and escalated
    by 100x at most three times before giving up.
    """
    with _CHOL_LOCK:
        cached = _CHOL_CACHE.get((H, p))
    if cached is not None:
        return cached
    t = np.arange(1, p + 1) / p
    cov = 0.5 * (t[:, None] ** (2 * H) + t[None, :] ** (2 * H)
                 - np.abs(t[:, None] - t[None, :]) ** (2 * H))
    base = 1e-12 * np.trace(cov) / p
    jitter = 0.0
    for _ in range(4):
        try:
            L = np.linalg.cholesky(cov + jitter * np.eye(p))
            break
        except np.linalg.LinAlgError:
            jitter = base if jitter == 0.0 else jitter * 100.0
    else:
        raise RuntimeError(
            f"fBM covariance factorization failed for H={H}, p={p} even after "
            f"diagonal jitter up to {jitter:g}")
    with _CHOL_LOCK:
        _CHOL_CACHE[(H, p)] = L
    return L


def warm_fbm_cache(H: float, p: int) -> None:
    if H != 0.5:
        _fbm_cholesky(H, p)


def fbm_pair_values(spec: FbmPairSpec, n: int, rng: np.random.Generator
                    ) -> tuple[np.ndarray, np.ndarray]:
    """n correlated fBM pairs as (n, p) arrays.

    The joint 2p x 2p covariance [[C, rho*C], [rho*C, C]] factors as a
    Kronecker product, so only the p x p block is factorized: with iid
    standard normal blocks G1, G2,

        X = L G1,   Y = rho * X + sqrt(1 - rho^2) * L G2

    has exactly the target joint law.  For H = 1/2 the factor L is the
    cumulative-sum operator and the matrix product is skipped.
    """
    p = spec.p
    g = rng.standard_normal((2, n, p))
    if spec.H == 0.5:
        x = np.cumsum(g[0] / np.sqrt(p), axis=1)
        w = np.cumsum(g[1] / np.sqrt(p), axis=1)
    else:
        L = _fbm_cholesky(spec.H, p)
        x = g[0] @ L.T
        w = g[1] @ L.T
    y = spec.rho * x + np.sqrt(max(0.0, 1.0 - spec.rho ** 2)) * w
    return x, y


def fbm_pair(spec: FbmPairSpec, rng: np.random.Generator) -> tuple[Trajectory, Trajectory]:
    part = uniform_partition(spec.p)
    x, y = fbm_pair_values(spec, 1, rng)
    return Trajectory(part, x[0]), Trajectory(part, y[0])


# ---------------------------------------------------------------------------
# (geometric) Brownian motion

def brownian_values(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    return np.cumsum(rng.standard_normal((n, p)) / np.sqrt(p), axis=1)


def gbm_values(mu: float, sigma: float, p: int, n: int,
               rng: np.random.Generator) -> np.ndarray:
    if sigma <= 0.0:
        raise ValueError("volatility must be positive")
    t = np.arange(1, p + 1) / p
    b = brownian_values(n, p, rng)
    return np.exp((mu - 0.5 * sigma ** 2) * t + sigma * b)


def gbm_path(mu: float, sigma: float, p: int, rng: np.random.Generator) -> Trajectory:
    """Geometric Brownian motion exp((mu - sigma^2/2) t + sigma B(t))."""
    return Trajectory(uniform_partition(p), gbm_values(mu, sigma, p, 1, rng)[0])


# ---------------------------------------------------------------------------
# alpha-stable Levy motion

def _standard_stable(alpha: float, beta: float, shape,
                     rng: np.random.Generator) -> np.ndarray:
    """S_alpha(1, beta, 0) variates via the Chambers-Mallows-Stuck transform."""
    u = rng.uniform(-np.pi / 2, np.pi / 2, size=shape)
    w = rng.standard_exponential(size=shape)
    if alpha == 1.0:
        half_pi = np.pi / 2
        return ((half_pi + beta * u) * np.tan(u)
                - beta * np.log(half_pi * w * np.cos(u) / (half_pi + beta * u))) / half_pi
    tan_term = beta * np.tan(np.pi * alpha / 2)
    theta0 = np.arctan(tan_term) / alpha
    scale0 = (1 + tan_term ** 2) ** (1 / (2 * alpha))
    return (scale0 * np.sin(alpha * (u + theta0)) / np.cos(u) ** (1 / alpha)
            * (np.cos(u - alpha * (u + theta0)) / w) ** ((1 - alpha) / alpha))


def stable_increments(spec: StableSpec, shape, delta: float,
                      rng: np.random.Generator) -> np.ndarray:
    """Increments of the Levy motion over intervals of length delta."""
    scale = spec.sigma * delta ** (1 / spec.alpha)
    z = _standard_stable(spec.alpha, spec.beta_skew, shape, rng)
    if spec.alpha == 1.0:
        # the 1-parametrization is not scale-closed at alpha = 1; a log
        # correction keeps sigma * Z distributed as S_1(sigma, beta, 0)
        return scale * z + (2 / np.pi) * spec.beta_skew * scale * np.log(scale) \
            + spec.mu * delta
    return scale * z + spec.mu * delta


def stable_values(spec: StableSpec, p: int, n: int,
                  rng: np.random.Generator) -> np.ndarray:
    return np.cumsum(stable_increments(spec, (n, p), 1.0 / p, rng), axis=1)


def stable_levy_path(spec: StableSpec, p: int, rng: np.random.Generator) -> Trajectory:
    """Levy motion with iid stable increments on the uniform grid."""
    return Trajectory(uniform_partition(p), stable_values(spec, p, 1, rng)[0])


# ---------------------------------------------------------------------------
# Pareto-shock pairs

def pareto_draw(alpha: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Pareto variates with survival P(A > x) = (1 + x)^(-alpha) by inverse CDF."""
    return (1.0 - rng.random(n)) ** (-1.0 / alpha) - 1.0


def pareto_shock_values(spec: ParetoShockSpec, p: int, n: int,
                        rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    if spec.model == "joint_shock":
        shock = np.sqrt(pareto_draw(spec.alpha, n, rng))[:, None]
        return shock * brownian_values(n, p, rng), shock * brownian_values(n, p, rng)
    a1 = np.sqrt(pareto_draw(spec.alpha, n, rng))[:, None]
    a2 = np.sqrt(pareto_draw(spec.alpha, n, rng))[:, None]
    db1 = rng.standard_normal((n, p)) / np.sqrt(p)
    dw = rng.standard_normal((n, p)) / np.sqrt(p)
    b1 = np.cumsum(db1, axis=1)
    b2 = np.cumsum(spec.rho * db1 + np.sqrt(max(0.0, 1.0 - spec.rho ** 2)) * dw, axis=1)
    return a1 * b1, a2 * b2


def pareto_shock_pair(spec: ParetoShockSpec, p: int,
                      rng: np.random.Generator) -> tuple[Trajectory, Trajectory]:
    part = uniform_partition(p)
    x, y = pareto_shock_values(spec, p, 1, rng)
    return Trajectory(part, x[0]), Trajectory(part, y[0])
