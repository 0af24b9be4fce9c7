"""Seeded synthetic problem instances."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..kernel import ProblemInstance, evaluate, min_weight_squared
from ..sketch import make_rng

B_MODES = ("simplex_random", "one_hot", "softmax_of_random_x")
GAMMA_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)


def weight_level(n: int, gamma: float | None, l: float, sigma_min: float,
                 C: float) -> float:
    """w_i^2 used by the generator: the admissible minimum plus one.

    With ``gamma=None`` the minimum is taken over the worst gamma in [0, 1],
    so the instance stays admissible after :meth:`ProblemInstance.with_gamma`.
    The threshold is affine in gamma, so the endpoints suffice.
    """
    if gamma is None:
        need = max(min_weight_squared(n, g, l, sigma_min, C) for g in (0.0, 1.0))
    else:
        need = min_weight_squared(n, gamma, l, sigma_min, C)
    return need + 1.0


def generate_instance(n: int, d: int, R: float = 10.0, seed: int = 0,
                      b_mode: str = "softmax_of_random_x", C: float = 10.0,
                      l: float = 1.0, gamma: float | None = None,
                      theorem_mode: bool = False) -> ProblemInstance:
    """Gaussian A scaled to ||A|| = R/2, b per ``b_mode``, uniform weights.

    ``gamma=None`` stores gamma = 0.5 but sizes w for every gamma in [0, 1].
    For ``softmax_of_random_x`` the point with f(x_true) = b is stored in
    ``metadata["x_true"]``.
    """
    n, d = int(n), int(d)
    if d < 1 or n < d:
        raise ConfigError(f"need n >= d >= 1, got n={n}, d={d}")
    if b_mode not in B_MODES:
        raise ConfigError(f"unknown b_mode {b_mode!r}; expected one of {B_MODES}")
    if not R > 0:
        raise ConfigError("R must be positive")
    if n == 1:
        raise ConfigError("n must be at least 2")
    rng = make_rng(seed)
    A = rng.standard_normal((n, d))
    sv = np.linalg.svd(A, compute_uv=False)
    A *= (0.5 * R) / sv[0]
    sigma_min = float(sv[-1] * (0.5 * R) / sv[0])
    if sigma_min <= 0:
        raise ConfigError("generated A is rank deficient")

    meta = {"generator": {"n": n, "d": d, "R": R, "seed": int(seed),
                          "b_mode": b_mode, "C": C, "l": l}}
    if b_mode == "simplex_random":
        b = rng.exponential(size=n)
        b /= b.sum()
    elif b_mode == "one_hot":
        b = np.zeros(n)
        b[int(rng.integers(n))] = 1.0
    else:
        x_true = rng.standard_normal(d)
        x_true *= 0.5 / max(np.linalg.norm(x_true), 1e-300)
        b = None
    w_sq = weight_level(n, gamma, l, sigma_min, C)
    w = np.full(n, np.sqrt(w_sq))
    g = 0.5 if gamma is None else gamma
    if b is None:
        # b must be f(x_true) exactly; evaluate on a throwaway instance
        probe = ProblemInstance(A=A, b=np.zeros(n), w=w, gamma=g, l=l, R=R)
        b = np.array(evaluate(probe, x_true).f)
        b = b / b.sum() if b.sum() > 1.0 else b
        meta["x_true"] = [float(v) for v in x_true]
    return ProblemInstance(A=A, b=b, w=w, gamma=g, l=l, R=R, metadata=meta,
                           theorem_mode=theorem_mode)
