"""Gaussian-process regression over joint action-context points.

Matern-3/2 covariance with per-dimension lengthscales, a bounded sliding
window of observations, closed-form posterior mean/variance, and the two
acquisition scores used by the agents (UCB for the contextual bandits, EI for
the context-free EI baseline).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import cho_solve, cholesky
from scipy.stats import norm

SQRT3 = math.sqrt(3.0)
MAX_JITTER = 1e-4


class ContractError(ValueError):
    """Raised when a caller violates an operation's preconditions."""


class NumericalError(RuntimeError):
    """Raised when the kernel matrix cannot be factorized."""


@dataclass(frozen=True)
class KernelParams:
    """Matern-3/2 hyperparameters.

    Parameters
    ----------
    lengthscales : sequence of float
        One positive lengthscale per input dimension.
    signal_variance : float
        Prior variance of the latent function, ``k(z, z)``.
    noise_variance : float
        Observation noise variance added to the kernel diagonal.
    jitter : float
        Initial diagonal regularizer; escalated x10 on factorization failure.
    """

    lengthscales: tuple[float, ...]
    signal_variance: float = 1.0
    noise_variance: float = 1e-4
    jitter: float = 1e-8

    def __post_init__(self):
        ls = tuple(float(v) for v in np.atleast_1d(self.lengthscales))
        object.__setattr__(self, "lengthscales", ls)
        if not ls or any(not (v > 0) for v in ls):
            raise ContractError("lengthscales must all be > 0")
        if not self.signal_variance > 0:
            raise ContractError("signal_variance must be > 0")
        if not self.noise_variance >= 0:
            raise ContractError("noise_variance must be >= 0")
        if not self.jitter > 0:
            raise ContractError("jitter must be > 0")

    @classmethod
    def isotropic(cls, dim: int, lengthscale: float = 0.2, **kw) -> "KernelParams":
        return cls(lengthscales=(lengthscale,) * dim, **kw)

    @property
    def dim(self) -> int:
        return len(self.lengthscales)


def _check_dim(z: np.ndarray, params: KernelParams):
    if z.shape[-1] != params.dim:
        raise ContractError(
            f"point dimension {z.shape[-1]} does not match {params.dim} lengthscales"
        )


def matern32(z1, z2, params: KernelParams) -> float:
    """Covariance between two points: ``s2 * (1 + sqrt(3) r) * exp(-sqrt(3) r)``."""
    a = np.asarray(z1, dtype=float)
    b = np.asarray(z2, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ContractError(f"points must be equal-length vectors, got {a.shape} and {b.shape}")
    _check_dim(a, params)
    r = math.sqrt(float(np.sum(((a - b) / np.asarray(params.lengthscales)) ** 2)))
    return params.signal_variance * (1.0 + SQRT3 * r) * math.exp(-SQRT3 * r)


def matern32_matrix(A, B, params: KernelParams) -> np.ndarray:
    """Cross-covariance matrix between the rows of ``A`` (n, d) and ``B`` (m, d)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    _check_dim(A, params)
    _check_dim(B, params)
    ls = np.asarray(params.lengthscales)
    As, Bs = A / ls, B / ls
    sq = (
        np.sum(As**2, axis=1)[:, None]
        + np.sum(Bs**2, axis=1)[None, :]
        - 2.0 * As @ Bs.T
    )
    r = np.sqrt(np.maximum(sq, 0.0))
    return params.signal_variance * (1.0 + SQRT3 * r) * np.exp(-SQRT3 * r)


class DataWindow:
    """The most recent ``capacity`` observations, oldest first."""

    def __init__(self, capacity: int = 30, entries: Iterable = ()):
        if capacity < 1:
            raise ContractError("window capacity must be a positive integer")
        self.capacity = int(capacity)
        self._entries: deque = deque(maxlen=self.capacity)
        for z, y in entries:
            self.push(z, y)

    def push(self, z, y: float) -> "DataWindow":
        y = float(y)
        if not math.isfinite(y):
            raise ContractError(f"observation must be finite, got {y}")
        z = np.array(z, dtype=float)
        z.setflags(write=False)
        self._entries.append((z, y))
        return self

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    @property
    def entries(self) -> list:
        return list(self._entries)

    @property
    def Z(self) -> np.ndarray:
        if not self._entries:
            return np.empty((0, 0))
        return np.vstack([z for z, _ in self._entries])

    @property
    def y(self) -> np.ndarray:
        return np.array([y for _, y in self._entries], dtype=float)

    def copy(self) -> "DataWindow":
        return DataWindow(self.capacity, self._entries)


def push(window: DataWindow, z, y: float) -> DataWindow:
    return window.push(z, y)


@dataclass(frozen=True)
class GpPosterior:
    """Fitted posterior. ``chol`` is the lower Cholesky factor of
    ``K + (noise + jitter) I`` and ``weights`` solves that system against
    ``y - prior_mean``. An empty posterior (no data) predicts the prior."""

    params: KernelParams
    Z: np.ndarray
    y: np.ndarray
    chol: np.ndarray | None = None
    weights: np.ndarray | None = None
    jitter: float = 0.0
    prior_mean: float = 0.0

    @property
    def is_prior(self) -> bool:
        return self.chol is None

    @property
    def n(self) -> int:
        return 0 if self.is_prior else len(self.y)


def fit(window: DataWindow | Sequence, params: KernelParams, prior_mean: float = 0.0) -> GpPosterior:
    """Factorize the kernel matrix of the window's points.

    ``window`` may also be a plain sequence of ``(z, y)`` pairs. Jitter starts
    at ``params.jitter`` and grows by 10x up to 1e-4 before giving up.
    """
    entries = list(window)
    if not entries:
        return GpPosterior(params=params, Z=np.empty((0, params.dim)), y=np.empty(0),
                           prior_mean=float(prior_mean))
    Z = np.vstack([np.asarray(z, dtype=float) for z, _ in entries])
    y = np.array([v for _, v in entries], dtype=float)
    if not np.all(np.isfinite(y)):
        raise ContractError("observations must be finite")
    if not np.all(np.isfinite(Z)):
        raise ContractError("training points must be finite")
    _check_dim(Z, params)

    K = matern32_matrix(Z, Z, params)
    eye = np.eye(len(y))
    jitter = params.jitter
    while True:
        try:
            L = cholesky(K + (params.noise_variance + jitter) * eye, lower=True)
            break
        except np.linalg.LinAlgError:
            jitter *= 10.0
            if jitter > MAX_JITTER * (1 + 1e-9):
                raise NumericalError("kernel matrix not positive definite after max jitter")
    weights = cho_solve((L, True), y - prior_mean)
    for arr in (Z, y, L, weights):
        arr.setflags(write=False)
    return GpPosterior(params=params, Z=Z, y=y, chol=L, weights=weights,
                       jitter=jitter, prior_mean=float(prior_mean))


def predict_many(post: GpPosterior, Zs) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance at each row of ``Zs``."""
    Zs = np.atleast_2d(np.asarray(Zs, dtype=float))
    _check_dim(Zs, post.params)
    s2 = post.params.signal_variance
    if post.is_prior:
        m = len(Zs)
        return np.full(m, post.prior_mean), np.full(m, s2)
    Ks = matern32_matrix(post.Z, Zs, post.params)
    mean = post.prior_mean + Ks.T @ post.weights
    v = cho_solve((post.chol, True), Ks)
    var = s2 - np.sum(Ks * v, axis=0)
    return mean, np.maximum(var, 0.0)


def predict(post: GpPosterior, z) -> tuple[float, float]:
    z = np.asarray(z, dtype=float)
    if z.ndim != 1:
        raise ContractError("predict expects a single point; use predict_many for batches")
    m, v = predict_many(post, z[None, :])
    return float(m[0]), float(v[0])


def _check_zeta(zeta):
    if np.any(np.asarray(zeta) < 0):
        raise ContractError("zeta must be non-negative")


def ucb_score(post: GpPosterior, z, zeta: float) -> float:
    _check_zeta(zeta)
    m, v = predict(post, z)
    return m + math.sqrt(zeta) * math.sqrt(v)


def ucb_scores(post: GpPosterior, Zs, zeta: float) -> np.ndarray:
    _check_zeta(zeta)
    m, v = predict_many(post, Zs)
    return m + math.sqrt(zeta) * np.sqrt(v)


def expected_improvement(mean, var, best: float) -> np.ndarray:
    """Closed-form EI for maximization; reduces to ``max(mean - best, 0)`` at zero variance."""
    mean = np.asarray(mean, dtype=float)
    sd = np.sqrt(np.maximum(np.asarray(var, dtype=float), 0.0))
    gain = mean - best
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(sd > 0, gain / np.where(sd > 0, sd, 1.0), 0.0)
    ei = np.where(sd > 0, gain * norm.cdf(u) + sd * norm.pdf(u), np.maximum(gain, 0.0))
    return np.maximum(ei, 0.0)


def ei_score(post: GpPosterior, z, best_so_far: float) -> float:
    m, v = predict(post, z)
    return float(expected_improvement(m, v, best_so_far))


def ei_scores(post: GpPosterior, Zs, best_so_far: float) -> np.ndarray:
    m, v = predict_many(post, Zs)
    return expected_improvement(m, v, best_so_far)
