"""Leverage-score row sampling of a weighted design matrix.

Given ``A`` and a positive diagonal ``Q = diag(q)``, :func:`subsample` returns a
sparse positive diagonal ``Q~`` with ``A^T Q~ A`` spectrally close to
``A^T Q A``. Leverage scores are computed exactly by a thin QR factorisation.

Sampling scheme
---------------
Let ``tau`` be the leverage scores of ``diag(sqrt(q)) A`` and
``pi_i ∝ max(tau_i, d/n)`` (the floor keeps every row reachable, which makes
the estimator unbiased). With budget ``m = ceil(c0 d ln(n/delta) / eps0^2)``:

* rows with ``m pi_i >= 1`` are saturated and kept with weight ``q_i``;
* the remaining ``m - |saturated|`` draws are i.i.d. with replacement from
  ``pi`` restricted to the other rows, each draw of row ``i`` adding
  ``q_i / (m_rest pi'_i)``.

If every row saturates, ``Q~ = Q`` exactly. Random draws use numpy's Philox
counter-based generator keyed by the seed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigError, DegenerateWeightError, InputShapeError, RankError

OVERSAMPLING = 8.0
DEFAULT_EPSILON0 = 0.01


class SamplingWarning(UserWarning):
    pass


def make_rng(seed) -> np.random.Generator:
    """Philox-backed generator; the same seed gives the same stream on every platform."""
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


@dataclass(frozen=True, eq=False)
class SampledDiagonal:
    indices: np.ndarray
    values: np.ndarray
    epsilon0: float
    delta: float
    seed: int
    sample_count: int
    n: int = 0

    def dense(self, n: int | None = None) -> np.ndarray:
        out = np.zeros(self.n if n is None else n)
        out[self.indices] = self.values
        return out

    def to_dict(self) -> dict:
        return {
            "indices": [int(i) for i in self.indices],
            "values": [float(v) for v in self.values],
            "epsilon0": self.epsilon0,
            "delta": self.delta,
            "seed": int(self.seed),
            "sample_count": int(self.sample_count),
            "n": int(self.n),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "SampledDiagonal":
        return cls(
            indices=np.asarray(obj["indices"], dtype=np.int64),
            values=np.asarray(obj["values"], dtype=np.float64),
            epsilon0=float(obj["epsilon0"]),
            delta=float(obj["delta"]),
            seed=int(obj["seed"]),
            sample_count=int(obj["sample_count"]),
            n=int(obj.get("n", 0)),
        )


def _check_inputs(A, q):
    A = np.asarray(A, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if A.ndim != 2:
        raise InputShapeError(f"A must be 2-d, got shape {A.shape}")
    if q.shape != (A.shape[0],):
        raise InputShapeError(f"q has shape {q.shape}, expected ({A.shape[0]},)")
    if not np.all(q > 0):
        bad = int(np.argmin(q))
        raise DegenerateWeightError(f"q must be positive; q[{bad}] = {q[bad]!r}")
    return A, q


def leverage_scores(A, q) -> np.ndarray:
    """Row leverage scores of ``diag(sqrt(q)) A``; they sum to d."""
    A, q = _check_inputs(A, q)
    n, d = A.shape
    if n < d:
        raise RankError(f"A has fewer rows ({n}) than columns ({d})")
    Aq = np.sqrt(q)[:, None] * A
    Qf, Rf = np.linalg.qr(Aq, mode="reduced")
    diag = np.abs(np.diag(Rf))
    if diag.min() <= max(n, d) * np.finfo(float).eps * diag.max():
        raise RankError("weighted design matrix is rank deficient")
    tau = np.einsum("ij,ij->i", Qf, Qf)
    return np.clip(tau, 0.0, 1.0)


def sample_size(n: int, d: int, epsilon0: float, delta: float,
                oversampling: float = OVERSAMPLING) -> int:
    return int(math.ceil(oversampling * d * math.log(n / delta) / epsilon0 ** 2))


def subsample(A, q, epsilon0: float = DEFAULT_EPSILON0, delta: float = 0.01,
              seed: int = 0, oversampling: float = OVERSAMPLING) -> SampledDiagonal:
    """Leverage-score sample a diagonal ``Q~`` with A^T Q~ A ~_{eps0} A^T Q A."""
    if not 0.0 < epsilon0 <= 0.1:
        raise ConfigError(f"epsilon0 must lie in (0, 0.1], got {epsilon0}")
    if not 0.0 < delta < 0.1:
        raise ConfigError(f"delta must lie in (0, 0.1), got {delta}")
    A, q = _check_inputs(A, q)
    n, d = A.shape
    tau = leverage_scores(A, q)
    m = sample_size(n, d, epsilon0, delta, oversampling)
    if m > n * math.log(max(n, 2)):
        warnings.warn(
            f"sample budget m={m} exceeds n ln n for n={n}; sampling saturates",
            SamplingWarning, stacklevel=2,
        )
    pi = np.maximum(tau, d / n)
    pi = pi / pi.sum()
    saturated = m * pi >= 1.0
    weights = np.where(saturated, q, 0.0)
    rest = np.flatnonzero(~saturated)
    if rest.size:
        m_rest = m - int(saturated.sum())
        p_rest = pi[rest] / pi[rest].sum()
        rng = make_rng(seed)
        draws = rng.choice(rest.size, size=m_rest, replace=True, p=p_rest)
        counts = np.bincount(draws, minlength=rest.size)
        weights[rest] = q[rest] * counts / (m_rest * p_rest)
    idx = np.flatnonzero(weights > 0)
    return SampledDiagonal(
        indices=idx, values=weights[idx], epsilon0=float(epsilon0),
        delta=float(delta), seed=int(seed), sample_count=m, n=n,
    )


def whitened_eigenvalues(A, q, q_tilde) -> np.ndarray:
    """Eigenvalues of (A^T Q A)^{-1/2} (A^T Q~ A) (A^T Q A)^{-1/2}."""
    A = np.asarray(A, dtype=np.float64)
    G = A.T @ (np.asarray(q)[:, None] * A)
    Gt = A.T @ (np.asarray(q_tilde)[:, None] * A)
    try:
        return scipy.linalg.eigh(0.5 * (Gt + Gt.T), 0.5 * (G + G.T), eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise RankError(f"A^T Q A is not positive definite: {exc}") from exc


def verify_spectral(A, q, sampled: SampledDiagonal):
    """Whitened eigenvalue range and whether it lies in [1 - eps0, 1 + eps0]."""
    A, q = _check_inputs(A, q)
    ev = whitened_eigenvalues(A, q, sampled.dense(A.shape[0]))
    lo, hi = float(ev[0]), float(ev[-1])
    eps = sampled.epsilon0
    return lo, hi, bool(lo >= 1.0 - eps and hi <= 1.0 + eps)
