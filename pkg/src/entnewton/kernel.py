"""Softmax prediction and the scalar/vector loss quantities at a point.

The objects here are the literal ones: ``u = exp(Ax)`` is never max-shifted.
Instances whose logits leave the double-precision ``exp`` range make
:func:`evaluate` raise :class:`~entnewton.errors.ExpOverflowError` instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import ConfigError, ExpOverflowError, InputShapeError

# log(DBL_MAX); exp() of anything larger is inf.
EXP_MAX = float(np.log(np.finfo(np.float64).max))

# R >= 10 is required for the convergence guarantee's preconditions.
THEOREM_MIN_RADIUS = 10.0


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """One regression problem ``(A, b, w, gamma, l, R)``.

    Immutable after construction. ``sigma_min`` and ``spectral_norm`` of A are
    computed once by a full SVD and cached.

    Parameters
    ----------
    A : (n, d) array
    b : (n,) array, target distribution (b >= 0, ||b||_1 <= 1)
    w : (n,) array, regularization weights
    gamma : float in [0, 1], weight of the entropy (creativity) term
    l : float > 0, strong-convexity target
    R : float > 0, radius bound with ||A|| <= R
    theorem_mode : bool
        If set, R >= 10 is enforced. Otherwise a smaller R is accepted and a
        warning is recorded in ``warnings``.
    reg_only : bool
        Drop the softmax terms so that L = L_reg. Used as a quadratic test
        objective.
    """

    A: np.ndarray
    b: np.ndarray
    w: np.ndarray
    gamma: float
    l: float = 1.0
    R: float = 10.0
    metadata: dict = field(default_factory=dict)
    theorem_mode: bool = False
    reg_only: bool = False
    sigma_min: float = field(init=False)
    spectral_norm: float = field(init=False)
    warnings: tuple = field(init=False)

    def __post_init__(self):
        A = np.asarray(self.A, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
            raise InputShapeError(f"A must be a non-empty matrix, got shape {A.shape}")
        n, d = A.shape
        b = np.asarray(self.b, dtype=np.float64)
        w = np.asarray(self.w, dtype=np.float64)
        if b.shape != (n,):
            raise InputShapeError(f"b has shape {b.shape}, expected ({n},)")
        if w.shape != (n,):
            raise InputShapeError(f"w has shape {w.shape}, expected ({n},)")
        for name, arr in (("A", A), ("b", b), ("w", w)):
            if not np.all(np.isfinite(arr)):
                raise ConfigError(f"{name} has non-finite entries")
        gamma, l, R = float(self.gamma), float(self.l), float(self.R)
        if not 0.0 <= gamma <= 1.0:
            raise ConfigError(f"gamma must lie in [0, 1], got {gamma}")
        if not (l > 0 and math.isfinite(l)):
            raise ConfigError(f"l must be a positive finite real, got {l}")
        if not (R > 0 and math.isfinite(R)):
            raise ConfigError(f"R must be a positive finite real, got {R}")
        if np.any(b < 0):
            raise ConfigError("b must be entrywise nonnegative")
        if b.sum() > 1.0 + 1e-12:
            raise ConfigError(f"||b||_1 = {b.sum()!r} exceeds 1")

        sv = np.linalg.svd(A, compute_uv=False)
        norm_A = float(sv[0])
        if norm_A > R * (1.0 + 1e-12):
            raise ConfigError(f"||A|| = {norm_A:.6g} exceeds R = {R:.6g}")
        warns = []
        if R < THEOREM_MIN_RADIUS:
            if self.theorem_mode:
                raise ConfigError(f"theorem mode requires R >= 10, got R = {R}")
            warns.append(f"R = {R:g} < 10: theorem preconditions unchecked")

        set_ = object.__setattr__
        set_(self, "A", _frozen(A))
        set_(self, "b", _frozen(b))
        set_(self, "w", _frozen(w))
        set_(self, "gamma", gamma)
        set_(self, "l", l)
        set_(self, "R", R)
        set_(self, "metadata", dict(self.metadata))
        # sigma_min of a tall matrix; zero when n < d
        set_(self, "sigma_min", float(sv[-1]) if n >= d else 0.0)
        set_(self, "spectral_norm", norm_A)
        set_(self, "warnings", tuple(warns))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.A.shape[1]

    @property
    def w_squared(self) -> np.ndarray:
        return self.w * self.w

    def with_gamma(self, gamma: float) -> "ProblemInstance":
        return self.replace(gamma=gamma)

    def replace(self, **changes: Any) -> "ProblemInstance":
        kw = dict(
            A=self.A, b=self.b, w=self.w, gamma=self.gamma, l=self.l, R=self.R,
            metadata=self.metadata, theorem_mode=self.theorem_mode,
            reg_only=self.reg_only,
        )
        kw.update(changes)
        return ProblemInstance(**kw)


@dataclass(frozen=True, eq=False)
class Evaluation:
    """Every point-dependent quantity at ``x``.

    ``Ax`` and ``log_f`` are kept alongside the named quantities because the
    derivative code reuses them.
    """

    x: np.ndarray
    Ax: np.ndarray
    u: np.ndarray
    alpha: float
    f: np.ndarray
    log_f: np.ndarray
    c: np.ndarray
    h: np.ndarray
    L_ent: float
    L_exp: float
    L_reg: float
    L: float
    gamma: float

    @property
    def n(self) -> int:
        return self.f.shape[0]


def _check_point(problem: ProblemInstance, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (problem.d,):
        raise InputShapeError(f"x has shape {x.shape}, expected ({problem.d},)")
    if not np.all(np.isfinite(x)):
        raise InputShapeError("x has non-finite entries")
    return x


def evaluate(problem: ProblemInstance, x) -> Evaluation:
    """Evaluate u, alpha, f, c, h and the three loss terms at ``x``.

    ``L = (1 - gamma) L_exp - gamma L_ent + L_reg``. Entropy uses natural log
    with the convention ``0 ln 0 = 0``.
    """
    x = _check_point(problem, x)
    z = problem.A @ x
    i_max = int(np.argmax(z))
    if z[i_max] > EXP_MAX:
        raise ExpOverflowError(i_max, z[i_max])
    u = np.exp(z)
    alpha = float(np.sum(u))
    if not math.isfinite(alpha):
        raise ExpOverflowError(i_max, z[i_max])
    f = u / alpha
    with np.errstate(divide="ignore"):
        log_f = np.log(f)
    h = np.where(f > 0, f * np.where(f > 0, log_f, 0.0), 0.0)
    L_ent = float(-np.sum(h))
    c = f - problem.b
    L_exp = 0.5 * float(c @ c)
    wz = problem.w * z
    L_reg = 0.5 * float(wz @ wz)
    g = problem.gamma
    if problem.reg_only:
        L = L_reg
    else:
        L = (1.0 - g) * L_exp - g * L_ent + L_reg
    return Evaluation(
        x=_frozen(x), Ax=_frozen(z), u=_frozen(u), alpha=alpha, f=_frozen(f),
        log_f=_frozen(log_f), c=_frozen(c), h=_frozen(h), L_ent=L_ent,
        L_exp=L_exp, L_reg=L_reg, L=float(L), gamma=g,
    )


def min_weight_squared(n: int, gamma: float, l: float, sigma_min_A: float,
                       constant: float = 10.0) -> float:
    """Smallest admissible w_i^2 for the positive-definiteness conditions.

    Returns ``(1-gamma)*C + gamma*C*ln(n)^2 + l/sigma_min(A)^2``. Use C=10 for
    H >= l I, C=200 for the 1/10 diagonal approximation, and C=100 for the
    convergence guarantee's stated precondition.
    """
    if not sigma_min_A > 0:
        raise ConfigError(f"sigma_min(A) must be positive, got {sigma_min_A}")
    C = float(constant)
    log_n = math.log(n)
    out = (1.0 - gamma) * C + gamma * C * log_n * log_n + l / sigma_min_A ** 2
    if not math.isfinite(out):
        raise ConfigError("min_weight_squared is not finite")
    return out


def weights_satisfy(problem: ProblemInstance, constant: float) -> bool:
    """True when every w_i^2 meets :func:`min_weight_squared` at ``constant``."""
    if problem.sigma_min <= 0:
        return False
    need = min_weight_squared(problem.n, problem.gamma, problem.l,
                              problem.sigma_min, constant)
    return bool(np.all(problem.w_squared >= need))
