"""Gradients, the Hessian decomposition H = A^T D A, and a finite-difference oracle.

Column-wise helpers take a single column ``a = A[:, i]``; their vectorised
counterparts work on the whole matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InputShapeError, NumericalError, SymmetryError
from .kernel import Evaluation, ProblemInstance, evaluate

FD_STEP_FIRST = 1e-5
FD_STEP_SECOND = 1e-4
SYMMETRY_TOL = 1e-8

# Known mutations for the negative-control run of the oracle suite.
MUTATIONS = ("flip_hf_sign",)


@dataclass(frozen=True, eq=False)
class GradientBundle:
    """Gradient pieces. ``g_ent`` is the gradient of L_ent itself; the minus
    sign is applied only when forming ``g_total``."""

    g_exp: np.ndarray
    g_ent: np.ndarray
    g_reg: np.ndarray
    g_total: np.ndarray


@dataclass(frozen=True, eq=False)
class HessianParts:
    B1: np.ndarray
    B2: np.ndarray
    B2_rank: np.ndarray
    B2_diag: np.ndarray
    D: np.ndarray
    H: np.ndarray
    asymmetry: float


def _col(ev: Evaluation, a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.shape != ev.f.shape:
        raise InputShapeError(f"column has shape {a.shape}, expected {ev.f.shape}")
    return a


def _finite(name, arr):
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"{name} has non-finite entries")
    return arr


def jacobian_f_column(ev: Evaluation, a) -> np.ndarray:
    """df/dx_i = f o a - <f, a> f."""
    a = _col(ev, a)
    f = ev.f
    return f * a - (f @ a) * f


def grad_log_f_column(ev: Evaluation, a) -> np.ndarray:
    """d(log f)/dx_i = a - <f, a> 1."""
    a = _col(ev, a)
    return a - (ev.f @ a)


def grad_h_column(ev: Evaluation, a) -> np.ndarray:
    """dh/dx_i = -<f, a>(f + h) + a o (f + h)."""
    a = _col(ev, a)
    fh = ev.f + ev.h
    return a * fh - (ev.f @ a) * fh


def grad_L_ent(ev: Evaluation, A) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != ev.n:
        raise InputShapeError(f"A has shape {A.shape}, expected ({ev.n}, d)")
    return -(A.T @ (ev.f * ev.L_ent + ev.h))


def grad_total(problem: ProblemInstance, ev: Evaluation) -> GradientBundle:
    """Gradient of L = (1-gamma) L_exp - gamma L_ent + L_reg.

    The reality term uses the softmax Jacobian ``diag(f) - f f^T``, i.e.
    ``g_exp = A^T (f o c - <c, f> f)``.
    """
    A = problem.A
    if ev.x.shape != (problem.d,) or ev.n != problem.n:
        raise InputShapeError("evaluation does not match problem dimensions")
    f, c = ev.f, ev.c
    g_reg = A.T @ (problem.w_squared * ev.Ax)
    if problem.reg_only:
        zero = np.zeros(problem.d)
        return GradientBundle(zero, zero.copy(), g_reg, _finite("g_total", g_reg.copy()))
    g_exp = A.T @ (f * c - (c @ f) * f)
    g_ent = grad_L_ent(ev, A)
    g = problem.gamma
    g_total = (1.0 - g) * g_exp - g * g_ent + g_reg
    for name, v in (("g_exp", g_exp), ("g_ent", g_ent), ("g_total", g_total)):
        _finite(name, v)
    return GradientBundle(g_exp, g_ent, g_reg, g_total)


def hess_log_f_entry(ev: Evaluation, a_i, a_j) -> float:
    """Scalar s with d^2(log f)/dx_i dx_j = s * 1_n."""
    a_i, a_j = _col(ev, a_i), _col(ev, a_j)
    f = ev.f
    return float((f @ a_i) * (f @ a_j) - f @ (a_i * a_j))


def build_B2(ev: Evaluation, mutation: str | None = None):
    """Entropy kernel with d^2 L_ent / dx^2 = A^T B2 A.

    Returns ``(B2_rank, B2_diag, B2)`` where
    ``B2_rank = (2 L_ent + 1) f f^T + f h^T + h f^T`` and
    ``B2_diag = -diag((L_ent + 1) f + h)``.
    """
    f, h, L = ev.f, ev.h, ev.L_ent
    hf = np.outer(h, f)
    if mutation == "flip_hf_sign":
        hf = -hf
    elif mutation is not None:
        raise ConfigError(f"unknown mutation {mutation!r}; known: {MUTATIONS}")
    B_rank = (2.0 * L + 1.0) * np.outer(f, f) + np.outer(f, h) + hf
    B_diag = np.diag(-((L + 1.0) * f + h))
    B2 = B_rank + B_diag
    _finite("B2", B2)
    return B_rank, B_diag, B2


def build_B1(ev: Evaluation) -> np.ndarray:
    """Reality kernel with d^2 L_exp / dx^2 = A^T B1 A.

    ``B1 = <3f-2b, f> f f^T - p f^T - f p^T + diag(p) - <f-b, f> diag(f)``
    with ``p = (2f - b) o f``. Written here in terms of ``c = f - b``.
    """
    f, c = ev.f, ev.c
    p = (f + c) * f
    cf = float(c @ f)
    B1 = (float(f @ f) + 2.0 * cf) * np.outer(f, f) - np.outer(p, f) - np.outer(f, p)
    B1[np.diag_indices_from(B1)] += p - cf * f
    return _finite("B1", B1)


def build_hessian(problem: ProblemInstance, ev: Evaluation,
                  mutation: str | None = None, check_symmetry: bool = True) -> HessianParts:
    """Assemble D = (1-gamma) B1 - gamma B2 + W^2 and H = A^T D A.

    H is always returned symmetrised; the relative asymmetry before
    symmetrisation is kept in ``asymmetry``.
    """
    n = problem.n
    W2 = np.diag(problem.w_squared)
    if problem.reg_only:
        zero = np.zeros((n, n))
        B1 = B2 = B_rank = B_diag = zero
        D = W2
    else:
        B1 = build_B1(ev)
        B_rank, B_diag, B2 = build_B2(ev, mutation)
        g = problem.gamma
        D = (1.0 - g) * B1 - g * B2 + W2
    A = problem.A
    H_raw = A.T @ D @ A
    _finite("H", H_raw)
    scale = np.linalg.norm(H_raw)
    asym = float(np.linalg.norm(H_raw - H_raw.T) / scale) if scale > 0 else 0.0
    if check_symmetry and asym > SYMMETRY_TOL:
        raise SymmetryError(f"Hessian asymmetry {asym:.3e} exceeds {SYMMETRY_TOL:g}")
    H = 0.5 * (H_raw + H_raw.T)
    return HessianParts(B1=B1, B2=B2, B2_rank=B_rank, B2_diag=B_diag, D=D, H=H,
                        asymmetry=asym)


# -- finite differences -------------------------------------------------------

FD_TARGETS = ("f", "log_f", "h", "L_ent", "L_exp", "L_reg", "L", "grad_L")


def _target_fn(problem, target):
    if target == "grad_L":
        return lambda x: grad_total(problem, evaluate(problem, x)).g_total
    attr = {"L_ent": "L_ent", "L_exp": "L_exp", "L_reg": "L_reg", "L": "L",
            "f": "f", "log_f": "log_f", "h": "h"}[target]
    return lambda x: np.asarray(getattr(evaluate(problem, x), attr), dtype=np.float64)


def _central_first(fn, x, step):
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        cols.append((fn(x + e) - fn(x - e)) / (2.0 * step))
    # (..., d): derivative index last
    return np.stack(cols, axis=-1)


def _central_second(fn, x, step):
    d = x.size
    f0 = fn(x)
    out = np.zeros(np.shape(f0) + (d, d))
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = step
        out[..., i, i] = (fn(x + ei) - 2.0 * f0 + fn(x - ei)) / step ** 2
        for j in range(i + 1, d):
            ej = np.zeros(d)
            ej[j] = step
            v = (fn(x + ei + ej) - fn(x + ei - ej) - fn(x - ei + ej)
                 + fn(x - ei - ej)) / (4.0 * step ** 2)
            out[..., i, j] = v
            out[..., j, i] = v
    return out


def finite_difference_oracle(problem: ProblemInstance, x, target: str,
                             step: float | None = None, order: int = 1) -> np.ndarray:
    """Central-difference derivative of ``target`` at ``x``.

    ``order=1`` gives the gradient (scalar targets, shape (d,)) or Jacobian
    (vector targets, shape (n, d)); for ``grad_L`` this is the Hessian.
    ``order=2`` gives second derivatives with the two derivative indices last.
    Second-order objects use Richardson extrapolation over steps h and h/2.
    """
    if target not in FD_TARGETS:
        raise ConfigError(f"unknown target {target!r}; expected one of {FD_TARGETS}")
    if order not in (1, 2) or (order == 2 and target == "grad_L"):
        raise ConfigError(f"unsupported order {order} for target {target!r}")
    second = order == 2 or target == "grad_L"
    if step is None:
        step = FD_STEP_SECOND if second else FD_STEP_FIRST
    if not 1e-8 <= step <= 1e-3:
        raise ConfigError(f"finite-difference step {step!r} outside [1e-8, 1e-3]")
    x = np.asarray(x, dtype=np.float64)
    fn = _target_fn(problem, target)
    scheme = _central_second if order == 2 else _central_first
    if not second:
        return scheme(fn, x, step)
    coarse = scheme(fn, x, step)
    fine = scheme(fn, x, step / 2.0)
    return (4.0 * fine - coarse) / 3.0
