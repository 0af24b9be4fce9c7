"""Exact and approximate Newton iterations with per-iteration residual tracking.

The approximate step replaces the Hessian by ``A^T Q~ A``, where ``Q~`` is a
leverage-score sample of a diagonal surrogate ``Q`` of D (see
:func:`surrogate_diagonal`). Both steps move along ``-H^{-1} g``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .analysis import hessian_lipschitz_constant, spectral_norm
from .calculus import build_hessian, grad_total
from .errors import (
    ConfigError, DegenerateWeightError, ExpOverflowError, IndefiniteHessianError,
    NumericalError, PreconditionError,
)
from .kernel import Evaluation, ProblemInstance, evaluate, min_weight_squared
from .sketch import OVERSAMPLING, make_rng, subsample

log = logging.getLogger(__name__)

MODES = ("exact", "approx")
CONTRACTION = 0.4
COND_WARN = 1e12
TRACE_COLUMNS = ("iter", "grad_norm", "loss", "loss_exp", "loss_ent", "loss_reg",
                 "res_to_opt", "sample_count", "time_ms")


@dataclass
class SolverConfig:
    mode: str = "exact"
    epsilon: float = 1e-8
    delta: float = 0.01
    epsilon0: float = 0.01
    max_iterations: int = 100
    l: Optional[float] = None
    M_override: Optional[float] = None
    seed: int = 0
    literal_surrogate: bool = False
    theorem_mode: bool = False
    oversampling: float = OVERSAMPLING

    def __post_init__(self):
        aliases = {"exact_newton": "exact", "approx_newton": "approx"}
        self.mode = aliases.get(self.mode, self.mode)
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if not 0 < self.delta < 1:
            raise ConfigError("delta must lie in (0, 1)")
        if self.max_iterations < 0:
            raise ConfigError("max_iterations must be nonnegative")
        if self.theorem_mode:
            if not (0 < self.epsilon < 0.1 and 0 < self.delta < 0.1):
                raise ConfigError("theorem mode requires epsilon, delta in (0, 0.1)")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class IterationRecord:
    t: int
    x: np.ndarray
    grad_norm: float
    L: float
    L_exp: float
    L_ent: float
    L_reg: float
    step_mode: str
    wall_time: float
    res: Optional[float] = None
    sample_count: int = 0
    # whitened eigenvalue range of the approximate Hessian against the true one
    hessian_ratio: Optional[tuple] = None


@dataclass
class SolverTrace:
    records: list = field(default_factory=list)
    status: str = "running"
    x_star: Optional[np.ndarray] = None
    init_check: str = "unchecked"
    M: Optional[float] = None
    T: Optional[int] = None

    @property
    def iterations(self) -> int:
        return sum(1 for r in self.records if r.step_mode != "init")

    @property
    def residuals(self) -> list:
        return [r.res for r in self.records]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(TRACE_COLUMNS)
        for r in self.records:
            wr.writerow([
                r.t, repr(r.grad_norm), repr(r.L), repr(r.L_exp), repr(r.L_ent),
                repr(r.L_reg), "" if r.res is None else repr(r.res),
                r.sample_count, repr(r.wall_time * 1e3),
            ])
        return buf.getvalue()

    def to_dict(self) -> dict:
        recs = []
        for r in self.records:
            d = asdict(r)
            d["x"] = [float(v) for v in r.x]
            if r.hessian_ratio is not None:
                d["hessian_ratio"] = list(r.hessian_ratio)
            recs.append(d)
        return {
            "status": self.status,
            "init_check": self.init_check,
            "M": self.M,
            "T": self.T,
            "x_star": None if self.x_star is None else [float(v) for v in self.x_star],
            "records": recs,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _solve_pd(H: np.ndarray, g: np.ndarray) -> np.ndarray:
    try:
        cf = scipy.linalg.cho_factor(H, lower=True, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise IndefiniteHessianError(
            f"Hessian is not positive definite ({exc}); the weight precondition "
            "is likely violated at this point"
        ) from exc
    diag = np.abs(np.diag(cf[0]))
    if diag.min() > 0 and (diag.max() / diag.min()) ** 2 > COND_WARN:
        log.warning("Hessian condition number above %.0e", COND_WARN)
    return scipy.linalg.cho_solve(cf, g)


def newton_step_exact(problem: ProblemInstance, x, ev: Evaluation | None = None) -> np.ndarray:
    """x - H(x)^{-1} g(x) via a Cholesky solve."""
    ev = evaluate(problem, x) if ev is None else ev
    g = grad_total(problem, ev).g_total
    H = build_hessian(problem, ev).H
    return ev.x - _solve_pd(H, g)


def surrogate_diagonal(problem: ProblemInstance, ev: Evaluation,
                       literal: bool = False) -> np.ndarray:
    """Diagonal surrogate Q of D used by the approximate step.

    Default: the diagonal-matrix parts of D,
    ``(1-gamma)(p - <c,f> f) + gamma((L_ent+1) f + h) + w o w`` with
    ``p = (2f - b) o f``. ``literal=True`` gives the entropy-only form
    ``-((L_ent+1) f + h) + w o w``.
    """
    w2 = problem.w_squared
    if problem.reg_only:
        return w2.copy()
    f, h, c = ev.f, ev.h, ev.c
    ent = (ev.L_ent + 1.0) * f + h
    if literal:
        return w2 - ent
    p = (f + c) * f
    g = problem.gamma
    return (1.0 - g) * (p - float(c @ f) * f) + g * ent + w2


def _check_surrogate(problem, q):
    if np.all(q > 0):
        return
    bad = int(np.argmin(q))
    hint = ""
    if problem.sigma_min > 0:
        need = min_weight_squared(problem.n, problem.gamma, problem.l,
                                  problem.sigma_min, 200)
        hint = f"; weights with w_i^2 >= {need:.6g} (C=200) keep Q positive"
    raise DegenerateWeightError(f"surrogate diagonal Q[{bad}] = {q[bad]:.6g} <= 0{hint}")


def newton_step_approx(problem: ProblemInstance, x, epsilon0: float = 0.01,
                       delta_iter: float = 0.01, seed_t: int = 0,
                       literal: bool = False, oversampling: float = OVERSAMPLING,
                       ev: Evaluation | None = None):
    """One sampled-Hessian step. Returns ``(x_next, sampled_diagonal)``."""
    ev = evaluate(problem, x) if ev is None else ev
    q = surrogate_diagonal(problem, ev, literal)
    _check_surrogate(problem, q)
    sd = subsample(problem.A, q, epsilon0, delta_iter, seed_t, oversampling)
    A = problem.A
    qt = sd.dense(problem.n)
    H_tilde = A.T @ (qt[:, None] * A)
    g = grad_total(problem, ev).g_total
    return ev.x - _solve_pd(0.5 * (H_tilde + H_tilde.T), g), sd


def iteration_budget(res0: float, epsilon: float) -> int:
    """ceil(log(res0/eps) / log(2.5)), the iteration count for 0.4 contraction."""
    if res0 <= epsilon:
        return 1
    return max(1, math.ceil(math.log(res0 / epsilon) / math.log(1.0 / CONTRACTION)))


def _step_seed(seed: int, t: int) -> int:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(t),))
    return int(ss.generate_state(1, np.uint64)[0])


def estimate_M(problem: ProblemInstance, center, radius: float, samples: int = 16,
               seed: int = 0) -> float:
    """Empirical Hessian Lipschitz constant on the ball around ``center``.

    Max over ``samples`` random pairs of ||H(a) - H(b)|| / ||a - b||.
    The symbolic n^2 exp(30 R^2) is logged for comparison.
    """
    center = np.asarray(center, dtype=np.float64)
    rng = make_rng(seed)
    d = problem.d

    def draw():
        v = rng.standard_normal(d)
        v *= radius * rng.random() ** (1.0 / d) / np.linalg.norm(v)
        return center + v

    best = 0.0
    for _ in range(samples):
        a, b = draw(), draw()
        dist = float(np.linalg.norm(a - b))
        if dist == 0:
            continue
        Ha = build_hessian(problem, evaluate(problem, a)).H
        Hb = build_hessian(problem, evaluate(problem, b)).H
        best = max(best, spectral_norm(Ha - Hb, symmetric=True) / dist)
    log.debug("empirical M = %.6g, symbolic n^2 exp(30 R^2) = %.6g", best,
              hessian_lipschitz_constant(problem.n, problem.R, 30.0))
    return best


def solve(problem: ProblemInstance, x0, config: SolverConfig | None = None,
          x_star=None):
    """Run (approximate) Newton from ``x0``.

    Stops when ||g|| <= l * epsilon or after ``max_iterations`` steps. When
    ``x_star`` is given, ``res_t = ||x_t - x*||`` is recorded each iteration.

    Returns ``(x, trace)``. An :class:`IndefiniteHessianError` carries the
    trace so far in its ``trace`` attribute.
    """
    config = SolverConfig() if config is None else config
    l = problem.l if config.l is None else float(config.l)
    tol = l * config.epsilon
    x = np.array(x0, dtype=np.float64)
    trace = SolverTrace(x_star=None if x_star is None else np.asarray(x_star, dtype=np.float64))
    xs = trace.x_star
    t0 = time.perf_counter()

    def record(t, ev, gnorm, mode, sc=0, ratio=None):
        trace.records.append(IterationRecord(
            t=t, x=ev.x.copy(), grad_norm=gnorm, L=ev.L, L_exp=ev.L_exp,
            L_ent=ev.L_ent, L_reg=ev.L_reg, step_mode=mode,
            wall_time=time.perf_counter() - t0,
            res=None if xs is None else float(np.linalg.norm(ev.x - xs)),
            sample_count=sc, hessian_ratio=ratio,
        ))

    try:
        ev = evaluate(problem, x)
        g = grad_total(problem, ev).g_total
    except (NumericalError, ExpOverflowError) as exc:
        log.warning("initial point not evaluable: %s", exc)
        trace.status = "numerical_failure"
        return x, trace
    gnorm = float(np.linalg.norm(g))
    record(0, ev, gnorm, "init")

    if xs is not None:
        res0 = float(np.linalg.norm(x - xs))
    else:
        res0 = gnorm / l
    trace.T = iteration_budget(res0, config.epsilon)
    delta_iter = config.delta / trace.T

    if xs is not None and config.M_override is not None:
        trace.M = float(config.M_override)
        ok = trace.M * res0 <= 0.1 * l
        trace.init_check = "satisfied" if ok else "violated"
        if config.theorem_mode and not ok:
            raise PreconditionError(
                f"initialization M*res0 = {trace.M * res0:.3g} exceeds 0.1 l = {0.1 * l:.3g}")

    t = 0
    while gnorm > tol and t < config.max_iterations:
        t += 1
        try:
            if config.mode == "exact":
                H = build_hessian(problem, ev).H
                x = ev.x - _solve_pd(H, g)
                sc, ratio = 0, None
            else:
                x, sd = newton_step_approx(
                    problem, ev.x, config.epsilon0, delta_iter,
                    _step_seed(config.seed, t), config.literal_surrogate,
                    config.oversampling, ev=ev,
                )
                sc = sd.sample_count
                H = build_hessian(problem, ev).H
                qt = sd.dense(problem.n)
                Ht = problem.A.T @ (qt[:, None] * problem.A)
                ratio = _ratio_range(H, 0.5 * (Ht + Ht.T))
            if not np.all(np.isfinite(x)):
                raise NumericalError("non-finite iterate")
            ev = evaluate(problem, x)
            g = grad_total(problem, ev).g_total
        except IndefiniteHessianError as exc:
            trace.status = "numerical_failure"
            exc.trace = trace
            raise
        except (NumericalError, ExpOverflowError) as exc:
            log.warning("numerical failure at iteration %d: %s", t, exc)
            trace.status = "numerical_failure"
            return x, trace
        gnorm = float(np.linalg.norm(g))
        record(t, ev, gnorm, config.mode, sc, ratio)

    trace.status = "converged" if gnorm <= tol else "max_iters"
    return ev.x.copy(), trace


def _ratio_range(H, H_tilde):
    try:
        e = scipy.linalg.eigh(H_tilde, H, eigvals_only=True)
    except np.linalg.LinAlgError:
        return None
    return float(e[0]), float(e[-1])
