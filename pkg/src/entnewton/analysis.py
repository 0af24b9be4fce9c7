"""Empirical certificates for the spectral and Lipschitz properties of the loss.

Each check reduces to an extreme-eigenvalue or norm computation and reports a
margin, so sweeps can log how close the claims come to failing.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .calculus import build_B1, build_B2, build_hessian
from .errors import DegenerateWeightError, PreconditionError
from .kernel import Evaluation, ProblemInstance, evaluate, min_weight_squared

POWER_ITERATION_THRESHOLD = 2000
WEIGHT_CONSTANTS = (10, 100, 200)
# relative slack for proven inequalities
LIPSCHITZ_SLACK = 1e-8


def spectral_norm(M: np.ndarray, symmetric: bool | None = None) -> float:
    """Largest singular value of M (largest |eigenvalue| if symmetric)."""
    M = np.asarray(M, dtype=np.float64)
    if M.size == 0:
        return 0.0
    if max(M.shape) > POWER_ITERATION_THRESHOLD:
        return _power_norm(M)
    if symmetric is None:
        symmetric = M.shape[0] == M.shape[1] and np.array_equal(M, M.T)
    if symmetric:
        ev = np.linalg.eigvalsh(M)
        return float(max(abs(ev[0]), abs(ev[-1])))
    return float(np.linalg.svd(M, compute_uv=False)[0])


def _power_norm(M, iters=500, tol=1e-12):
    rng = np.random.default_rng(0)
    v = rng.standard_normal(M.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(iters):
        u = M.T @ (M @ v)
        nu = np.linalg.norm(u)
        if nu == 0:
            return 0.0
        v = u / nu
        new = math.sqrt(nu)
        if abs(new - sigma) <= tol * new:
            return new
        sigma = new
    return sigma


def lambda_min(M: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


# -- PSD certificate -----------------------------------------------------------

@dataclass
class SpectralCertificate:
    lambda_min_H: float
    l_target: float
    psd_margin: float
    H_norm: float
    wsq_condition_satisfied: dict
    psd_claim_holds: bool | None
    approx_ratio_bounds: tuple | None
    approx_claim_holds: bool | None

    def to_dict(self) -> dict:
        return asdict(self)


def certify_psd(problem: ProblemInstance, x, approx_ratio: bool | None = None,
                ev: Evaluation | None = None) -> SpectralCertificate:
    """Check H >= l I (C=10 weights) and W^2 ~_{1/10} B + W^2 (C=200 weights).

    Claims whose weight precondition fails are reported as ``None`` rather
    than as failures. ``approx_ratio=None`` computes the ratio bounds only when
    every w_i > 0; ``True`` demands them.
    """
    ev = evaluate(problem, x) if ev is None else ev
    parts = build_hessian(problem, ev)
    eig = np.linalg.eigvalsh(parts.H)
    lam, H_norm = float(eig[0]), float(max(abs(eig[0]), abs(eig[-1])))
    l = problem.l
    conds = {}
    for C in WEIGHT_CONSTANTS:
        if problem.sigma_min > 0:
            need = min_weight_squared(problem.n, problem.gamma, l, problem.sigma_min, C)
            conds[C] = bool(np.all(problem.w_squared >= need))
        else:
            conds[C] = False
    psd_ok = None
    if conds[10]:
        psd_ok = lam >= l - 1e-8 * H_norm

    w = problem.w
    has_zero = bool(np.any(w == 0))
    if approx_ratio and has_zero:
        raise DegenerateWeightError("approximation ratio needs every w_i != 0")
    bounds, approx_ok = None, None
    if approx_ratio or (approx_ratio is None and not has_zero):
        B = parts.D - np.diag(problem.w_squared)
        inv_w = 1.0 / np.abs(w)
        Mw = np.eye(problem.n) + inv_w[:, None] * B * inv_w[None, :]
        e = np.linalg.eigvalsh(0.5 * (Mw + Mw.T))
        bounds = (float(e[0]), float(e[-1]))
        if conds[200]:
            approx_ok = bounds[0] >= 0.9 - 1e-8 and bounds[1] <= 1.1 + 1e-8
    return SpectralCertificate(
        lambda_min_H=lam, l_target=l, psd_margin=lam - l, H_norm=H_norm,
        wsq_condition_satisfied=conds, psd_claim_holds=psd_ok,
        approx_ratio_bounds=bounds, approx_claim_holds=approx_ok,
    )


# -- B-block sandwiches --------------------------------------------------------

@dataclass
class SandwichCheck:
    """``lower <= X <= upper`` in the PSD order.

    ``lower_margin`` is lambda_min(X - lower); ``upper_margin`` is
    lambda_min(upper - X). ``applicable`` is False when the claim's
    precondition fails and the check is skipped.
    """

    name: str
    lower_margin: float
    upper_margin: float
    passed: bool
    applicable: bool = True


@dataclass
class BlockBoundReport:
    n: int
    checks: list = field(default_factory=list)
    B1_extremes: tuple = (0.0, 0.0)
    B2_extremes: tuple = (0.0, 0.0)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.applicable)

    def get(self, name) -> SandwichCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _sandwich(name, X, lower, upper, applicable=True):
    lo = lambda_min(X - lower)
    up = lambda_min(upper - X)
    scale = 1.0 + max(spectral_norm(lower, True), spectral_norm(upper, True))
    tol = 1e-12 * scale
    return SandwichCheck(name, lo, up, bool(lo >= -tol and up >= -tol), applicable)


def bound_B_blocks(ev: Evaluation) -> BlockBoundReport:
    """Check the rank/diagonal sandwiches on B2 and the +-4 I bound on B1.

    The rank-one upper bound ``(2 L_ent + 1) <= 3 ln n`` and the diagonal
    bound both require ``ln n >= 1``; for n <= 2 they are skipped.
    """
    n = ev.n
    f, h, L = ev.f, ev.h, ev.L_ent
    log_n = math.log(n)
    I = np.eye(n)
    ff = np.outer(f, f)
    hh = np.outer(h, h)
    B_rank, B_diag, B2 = build_B2(ev)
    B1 = build_B1(ev)
    rank1 = (2.0 * L + 1.0) * ff
    rank2 = np.outer(f, h) + np.outer(h, f)
    big = log_n >= 1.0
    rep = BlockBoundReport(n=n)
    lo1 = lambda_min(rank1 - ff)
    rep.checks.append(SandwichCheck("rank1_lower", lo1, math.inf, lo1 >= -1e-12))
    up1 = lambda_min(3.0 * log_n * ff - rank1)
    rep.checks.append(SandwichCheck("rank1_upper", math.inf, up1,
                                    up1 >= -1e-12 or not big, applicable=big))
    rep.checks.append(_sandwich("rank2", rank2, -(ff + hh), ff + hh))
    dbound = (2.0 * log_n * float(np.max(np.abs(f))) + float(np.max(np.abs(h)))) * I
    dchk = _sandwich("diag", B_diag, -dbound, dbound, applicable=big)
    dchk.passed = dchk.passed or not big
    rep.checks.append(dchk)
    rep.checks.append(_sandwich("B2_log2n", B2, -10.0 * log_n ** 2 * I, 10.0 * log_n ** 2 * I))
    rep.checks.append(_sandwich("B1_4I", B1, -4.0 * I, 4.0 * I))
    e1 = np.linalg.eigvalsh(B1)
    e2 = np.linalg.eigvalsh(B2)
    rep.B1_extremes = (float(e1[0]), float(e1[-1]))
    rep.B2_extremes = (float(e2[0]), float(e2[-1]))
    return rep


# -- Lipschitz suite -----------------------------------------------------------

@dataclass
class BoundCheck:
    """``lhs <= rhs`` with relative slack. ``kind`` is "assert" for proven
    inequalities, "info" for claims reported but not asserted."""

    name: str
    lhs: float
    rhs: float
    holds: bool
    applicable: bool = True
    kind: str = "assert"

    @property
    def violation(self) -> float:
        return max(0.0, self.lhs - self.rhs)


@dataclass
class LipschitzReport:
    G_norms: list
    f_delta: float
    h_delta: float
    ent_delta: float
    log_f_delta: float
    H_delta: float
    H_full_delta: float
    x_delta: float
    beta_symbolic: float
    beta_computed: float
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.holds for c in self.checks if c.applicable and c.kind == "assert")

    def get(self, name) -> BoundCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _bound(name, lhs, rhs, applicable=True, kind="assert"):
    lhs, rhs = float(lhs), float(rhs)
    holds = lhs <= rhs + LIPSCHITZ_SLACK * max(abs(rhs), abs(lhs), 1e-300)
    return BoundCheck(name, lhs, rhs, bool(holds), applicable, kind)


def G_blocks(ex: Evaluation, ey: Evaluation) -> list:
    """The seven difference blocks whose sum bounds B(x) - B(y)."""
    fx, fy, hx, hy = ex.f, ey.f, ex.h, ey.h
    Lx, Ly = ex.L_ent, ey.L_ent
    return [
        Lx * np.outer(fx, fx) - Ly * np.outer(fy, fy),
        np.outer(fx, fx) - np.outer(fy, fy),
        np.outer(fx, hx) - np.outer(fy, hy),
        np.outer(hx, fx) - np.outer(hy, fy),
        np.diag(Lx * fx - Ly * fy),
        np.diag(fx - fy),
        np.diag(hx - hy),
    ]


def alpha_lower_bound(problem: ProblemInstance) -> float:
    """A lower bound on alpha(x) valid over the whole ball ||x|| <= R.

    alpha >= exp(max_i (Ax)_i) >= exp(-||A|| R), and by AM-GM
    alpha >= n exp(-||A^T 1|| R / n). The larger of the two is returned.
    """
    A, R, n = problem.A, problem.R, problem.n
    b1 = -problem.spectral_norm * R
    b2 = math.log(n) - float(np.linalg.norm(A.sum(axis=0))) * R / n
    return math.exp(max(b1, b2))


def hessian_lipschitz_constant(n: int, R: float, exponent: float = 40.0) -> float:
    """n^2 exp(exponent R^2); inf when it overflows."""
    with np.errstate(over="ignore"):
        return float(n ** 2 * np.exp(np.float64(exponent * R * R)))


def lipschitz_suite(problem: ProblemInstance, x, y) -> LipschitzReport:
    """Evaluate the G1..G7 blocks and every Lipschitz bound for the pair (x, y)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    R = problem.R
    for name, v in (("x", x), ("y", y)):
        if np.linalg.norm(v) > R * (1.0 + 1e-12):
            raise PreconditionError(f"||{name}||_2 = {np.linalg.norm(v):.6g} exceeds R = {R:g}")
    n = problem.n
    ex, ey = evaluate(problem, x), evaluate(problem, y)
    A = problem.A
    G = G_blocks(ex, ey)
    Gn = [spectral_norm(g, symmetric=i not in (2, 3)) for i, g in enumerate(G)]
    df = float(np.linalg.norm(ex.f - ey.f))
    dh = float(np.linalg.norm(ex.h - ey.h))
    dent = abs(ex.L_ent - ey.L_ent)
    dlog = float(np.linalg.norm(ex.log_f - ey.log_f))
    dx = float(np.linalg.norm(x - y))
    B2x, B2y = build_B2(ex)[2], build_B2(ey)[2]
    H_delta = spectral_norm(A.T @ (B2x - B2y) @ A, symmetric=True)
    Hx, Hy = build_hessian(problem, ex).H, build_hessian(problem, ey).H
    H_full = spectral_norm(Hx - Hy, symmetric=True)
    log_n = math.log(n)
    sq = math.sqrt(n)
    R2 = R * R
    beta_sym = math.exp(-R2)
    beta = max(alpha_lower_bound(problem), beta_sym)

    checks = [
        _bound("G1", Gn[0], 4 * sq * R2 * df),
        _bound("G2", Gn[1], 2 * df),
        _bound("G3", Gn[2], 6 * R2 * log_n * df),
        _bound("G4", Gn[3], 6 * R2 * log_n * df),
        _bound("G5", Gn[4], 6 * sq * R2 * df),
        _bound("G6", Gn[5], df),
        _bound("G7", Gn[6], 3 * R2 * df),
    ]
    summary_ok = R >= 1.0
    for i, g in enumerate(Gn, start=1):
        checks.append(_bound(f"summary_G{i}", g, 4 * sq * R2 * df, applicable=summary_ok))
    checks.append(_bound("L_ent_lipschitz", dent, sq * dh))
    checks.append(_bound("h_lipschitz", dh, 3 * R2 * df))

    with np.errstate(divide="ignore", invalid="ignore"):
        closeness = float(np.max(np.abs(1.0 - ey.f / ex.f)))
        rel_df = float(np.linalg.norm((ey.f - ex.f) / ex.f))
    close = closeness <= 0.1
    # literal statement is refuted; keep it visible but do not assert it
    checks.append(_bound("log_f_lipschitz_literal", dlog, df, applicable=close, kind="info"))
    checks.append(_bound("log_f_lipschitz_corrected", dlog, rel_df / 0.9, applicable=close))

    with np.errstate(over="ignore"):
        R_f = float(np.exp(np.float64(-2 * math.log(beta) + 1.5 * log_n + 3 * R2)))
    checks.append(_bound("softmax_lipschitz", df, R_f * dx))
    checks.append(_bound("entropy_block_aggregate", H_delta,
                         R2 * (2 * Gn[0] + sum(Gn[1:]))))
    K40 = hessian_lipschitz_constant(n, R, 40.0)
    checks.append(_bound("hessian_lipschitz_40", H_delta, K40 * dx,
                         applicable=math.isfinite(K40)))
    K30 = hessian_lipschitz_constant(n, R, 30.0)
    checks.append(_bound("hessian_lipschitz_30", H_delta, K30 * dx,
                         applicable=math.isfinite(K30), kind="info"))
    return LipschitzReport(
        G_norms=Gn, f_delta=df, h_delta=dh, ent_delta=dent, log_f_delta=dlog,
        H_delta=H_delta, H_full_delta=H_full, x_delta=dx,
        beta_symbolic=beta_sym, beta_computed=beta, checks=checks,
    )


# -- verification records ------------------------------------------------------

@dataclass
class LemmaRecord:
    """Aggregate of one claim over a campaign.

    ``margins`` are the signed slack of each checked instance (negative means
    violated); ``kind`` "assert" rows count toward failure, "info" rows do not.
    With ``max_rate`` set, an assert row fails only when the violation
    fraction exceeds it (for probabilistic guarantees).
    """

    name: str
    kind: str = "assert"
    checked: int = 0
    skipped: int = 0
    violations: int = 0
    max_violation: float = 0.0
    margin_min: float = math.inf
    margin_sum: float = 0.0
    note: str = ""
    max_rate: float | None = None

    def add(self, margin: float, violated: bool, violation: float = 0.0):
        self.checked += 1
        if violated:
            self.violations += 1
            self.max_violation = max(self.max_violation, float(violation))
        self.margin_min = min(self.margin_min, float(margin))
        self.margin_sum += float(margin)

    def skip(self):
        self.skipped += 1

    @property
    def failed(self) -> bool:
        if self.kind != "assert":
            return False
        if self.max_rate is None:
            return self.violations > 0
        return self.checked > 0 and self.violations > self.max_rate * self.checked

    def to_dict(self) -> dict:
        mean = self.margin_sum / self.checked if self.checked else None
        return {
            "name": self.name,
            "kind": self.kind,
            "instances_checked": self.checked,
            "skipped": self.skipped,
            "violations": self.violations,
            "max_violation": self.max_violation,
            "margin_min": self.margin_min if self.checked else None,
            "margin_mean": mean,
            "max_rate": self.max_rate,
            "failed": self.failed,
            "note": self.note,
        }
