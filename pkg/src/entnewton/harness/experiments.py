"""Gamma sweeps and the verification campaigns behind ``check``.

Every campaign draws its instances from Philox streams keyed by
``(seed, campaign tag, index)``, so a report is reproducible from its config.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import time
import warnings
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from ..analysis import (
    LemmaRecord, bound_B_blocks, certify_psd, lipschitz_suite,
)
from ..calculus import build_hessian, finite_difference_oracle, grad_total
from ..errors import ConfigError, IndefiniteHessianError, NumericalError, ExpOverflowError
from ..kernel import ProblemInstance, evaluate, min_weight_squared, weights_satisfy
from ..sketch import SamplingWarning, leverage_scores, subsample, verify_spectral
from ..solver import (
    CONTRACTION, SolverConfig, estimate_M, iteration_budget, newton_step_exact, solve,
)
from .instances import B_MODES, GAMMA_GRID, generate_instance

log = logging.getLogger(__name__)

ORACLE_GRAD_TOL = 1e-13
ORACLE_MAX_ITER = 200
GRAD_REL_TOL = 1e-6
HESS_REL_TOL = 1e-5
ASYMMETRY_TOL = 1e-8
SWEEP_COLUMNS = ("gamma", "L_exp_at_opt", "L_ent_at_opt", "L_at_opt", "iterations",
                 "converged", "status", "x_opt")


def stream(seed: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


def _int_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2 ** 63 - 1))


def point_in_ball(rng: np.random.Generator, d: int, radius: float) -> np.ndarray:
    v = rng.standard_normal(d)
    return v * (radius * rng.random() ** (1.0 / d) / np.linalg.norm(v))


# -- sweep ---------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    n: int = 16
    d: int = 4
    R: float = 10.0
    b_mode: str = "softmax_of_random_x"
    C: float = 10.0
    l: float = 1.0
    gamma_grid: list = field(default_factory=lambda: list(GAMMA_GRID))
    mode: str = "exact"
    epsilon: float = 1e-8
    delta: float = 0.01
    epsilon0: float = 0.01
    max_iterations: int = 100
    warm_start_iterations: int = 2
    seed: int = 7
    out_dir: str = "out"

    def __post_init__(self):
        self.gamma_grid = [float(g) for g in self.gamma_grid]
        if any(not 0.0 <= g <= 1.0 for g in self.gamma_grid):
            raise ConfigError("gamma grid values must lie in [0, 1]")
        if self.n < self.d:
            raise ConfigError("n must be at least d")
        if self.b_mode not in B_MODES:
            raise ConfigError(f"unknown b_mode {self.b_mode!r}")

    def solver_config(self, seed: int) -> SolverConfig:
        return SolverConfig(mode=self.mode, epsilon=self.epsilon, delta=self.delta,
                            epsilon0=self.epsilon0, max_iterations=self.max_iterations,
                            seed=seed)

    def instance(self) -> ProblemInstance:
        return generate_instance(self.n, self.d, self.R, self.seed, self.b_mode,
                                 self.C, self.l, gamma=None)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(obj) - known
        if extra:
            raise ConfigError(f"unknown experiment config keys: {sorted(extra)}")
        return cls(**obj)


@dataclass
class SweepRow:
    gamma: float
    x_opt: np.ndarray
    L_exp_at_opt: float
    L_ent_at_opt: float
    L_at_opt: float
    iterations: int
    converged: bool
    status: str


@dataclass
class SweepResult:
    rows: list

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(SWEEP_COLUMNS)
        for r in self.rows:
            wr.writerow([
                repr(r.gamma), repr(r.L_exp_at_opt), repr(r.L_ent_at_opt), repr(r.L_at_opt),
                r.iterations, int(r.converged), r.status,
                " ".join(repr(float(v)) for v in r.x_opt),
            ])
        return buf.getvalue()

    @property
    def entropies(self) -> list:
        return [r.L_ent_at_opt for r in self.rows]


def solve_row(problem: ProblemInstance, config: ExperimentConfig, seed: int) -> SweepRow:
    """Exact-Newton warm start from 0, then the configured mode.

    ``iterations`` counts both phases. Failures are recorded in the row's
    ``status`` rather than raised.
    """
    x = np.zeros(problem.d)
    nan = float("nan")
    try:
        warm = SolverConfig(mode="exact", epsilon=config.epsilon,
                            max_iterations=config.warm_start_iterations)
        x, warm_trace = solve(problem, x, warm)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SamplingWarning)
            x, trace = solve(problem, x, config.solver_config(seed))
    except IndefiniteHessianError as exc:
        log.warning("gamma=%g: %s", problem.gamma, exc)
        return SweepRow(problem.gamma, x, nan, nan, nan, 0, False, "indefinite_hessian")
    ev = evaluate(problem, x)
    return SweepRow(problem.gamma, np.array(x), ev.L_exp, ev.L_ent, ev.L,
                    warm_trace.iterations + trace.iterations,
                    trace.status == "converged", trace.status)


def run_sweep(config: ExperimentConfig) -> SweepResult:
    base = config.instance()
    rows = []
    for k, g in enumerate(config.gamma_grid):
        rows.append(solve_row(base.with_gamma(g), config, config.seed ^ k))
    return SweepResult(rows)


# -- x* oracle -----------------------------------------------------------------

def oracle_solution(problem: ProblemInstance, x0=None, tol: float = ORACLE_GRAD_TOL,
                    max_iterations: int = ORACLE_MAX_ITER) -> tuple:
    """Long exact-Newton run. Stops at grad norm <= tol, after
    ``max_iterations``, or when the gradient stops improving for three steps.

    Returns ``(x_star, grad_norm, iterations)``; the best iterate is kept.
    """
    x = np.zeros(problem.d) if x0 is None else np.array(x0, dtype=np.float64)
    ev = evaluate(problem, x)
    best_x, best_g = x, float(np.linalg.norm(grad_total(problem, ev).g_total))
    stall, it = 0, 0
    while best_g > tol and it < max_iterations and stall < 3:
        it += 1
        x = newton_step_exact(problem, x, ev)
        ev = evaluate(problem, x)
        g = float(np.linalg.norm(grad_total(problem, ev).g_total))
        if g < best_g:
            best_x, best_g, stall = x, g, 0
        else:
            stall += 1
    return np.array(best_x), best_g, it


# -- campaigns -----------------------------------------------------------------

@dataclass
class CheckConfig:
    seed: int = 0
    oracle_instances: int = 100
    fact_pairs: int = 1000
    psd_instances: int = 100
    approx_instances: int = 100
    block_evaluations: int = 1000
    lipschitz_pairs: int = 500
    sketch_seeds: int = 500
    convergence_instances: int = 20
    c_constant: float | None = None
    mutation: str | None = None

    def constant(self, default: float) -> float:
        return default if self.c_constant is None else float(self.c_constant)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "CheckConfig":
        known = {f.name for f in fields(cls)}
        extra = set(obj) - known
        if extra:
            raise ConfigError(f"unknown check config keys: {sorted(extra)}")
        return cls(**obj)


def _records(*specs) -> dict:
    return {name: LemmaRecord(name, kind) for name, kind in specs}


def _random_oracle_instance(rng) -> ProblemInstance:
    n = int(rng.integers(2, 51))
    d = int(rng.integers(1, min(10, n) + 1))
    R = float(rng.uniform(0.5, 1.5))
    A = rng.standard_normal((n, d))
    A *= R * rng.uniform(0.3, 1.0) / np.linalg.norm(A, 2)
    b = rng.exponential(size=n)
    b *= rng.uniform(0.5, 1.0) / b.sum()
    w = rng.uniform(0.0, 1.5, size=n)
    return ProblemInstance(A=A, b=b, w=w, gamma=float(rng.uniform()), R=R)


def oracle_campaign(cfg: CheckConfig) -> dict:
    """Analytic gradient and Hessian against central differences."""
    recs = _records(("gradient_fd", "assert"), ("hessian_fd", "assert"),
                    ("hessian_symmetry", "assert"))
    recs["gradient_fd"].note = f"rel err <= {GRAD_REL_TOL:g}"
    recs["hessian_fd"].note = f"rel err <= {HESS_REL_TOL:g}" + (
        f"; mutation {cfg.mutation}" if cfg.mutation else "")
    for i in range(cfg.oracle_instances):
        rng = stream(cfg.seed, 1, i)
        p = _random_oracle_instance(rng)
        x = point_in_ball(rng, p.d, p.R)
        ev = evaluate(p, x)
        g = grad_total(p, ev).g_total
        g_fd = finite_difference_oracle(p, x, "L")
        rel = float(np.linalg.norm(g - g_fd) / max(np.linalg.norm(g_fd), 1e-300))
        recs["gradient_fd"].add(GRAD_REL_TOL - rel, rel > GRAD_REL_TOL, rel)
        parts = build_hessian(p, ev, mutation=cfg.mutation, check_symmetry=False)
        H_fd = finite_difference_oracle(p, x, "grad_L")
        H_fd = 0.5 * (H_fd + H_fd.T)
        rel = float(np.linalg.norm(parts.H - H_fd) / max(np.linalg.norm(H_fd), 1e-300))
        recs["hessian_fd"].add(HESS_REL_TOL - rel, rel > HESS_REL_TOL, rel)
        a = parts.asymmetry
        recs["hessian_symmetry"].add(ASYMMETRY_TOL - a, a > ASYMMETRY_TOL, a)
    return recs


def fact_campaign(cfg: CheckConfig) -> dict:
    """Normalisation and range facts for f, h and L_ent."""
    recs = _records(("f_sums_to_one", "assert"), ("L_ent_range", "assert"),
                    ("h_entry_range", "assert"), ("h_l1_bound", "assert"),
                    ("log_inv_f_2R2", "assert"), ("log_inv_f_general", "assert"))
    recs["log_inv_f_2R2"].note = "applies for R >= 10"
    recs["log_inv_f_general"].note = "||ln(1/f)||_inf <= ln n + 2 ||A|| ||x||"
    for i in range(cfg.fact_pairs):
        rng = stream(cfg.seed, 2, i)
        n = int(rng.integers(2, 201))
        d = int(rng.integers(1, min(8, n) + 1))
        R = 10.0 if i % 2 == 0 else float(rng.uniform(0.5, 1.5))
        mode = B_MODES[int(rng.integers(len(B_MODES)))]
        p = generate_instance(n, d, R, _int_seed(rng), mode, 10.0)
        x = point_in_ball(rng, d, R)
        ev = evaluate(p, x)
        ln_n = math.log(n)
        e = abs(float(ev.f.sum()) - 1.0)
        recs["f_sums_to_one"].add(1e-12 - e, e > 1e-12, e)
        lo, hi = ev.L_ent, ln_n + 1e-10
        recs["L_ent_range"].add(min(lo, hi - ev.L_ent), lo < 0 or ev.L_ent > hi,
                                max(-lo, ev.L_ent - hi, 0.0))
        hmin, hmax = float(ev.h.min()), float(ev.h.max())
        bad = max(-1.0 - 1e-12 - hmin, hmax - 1e-12, 0.0)
        recs["h_entry_range"].add(min(hmin + 1.0, -hmax), bad > 0, bad)
        h1 = float(np.abs(ev.h).sum())
        recs["h_l1_bound"].add(hi - h1, h1 > hi, h1 - hi)
        linf = float(np.max(-ev.log_f))
        if R >= 10.0:
            rhs = 2.0 * R * R
            recs["log_inv_f_2R2"].add(rhs - linf, linf > rhs, linf - rhs)
        else:
            recs["log_inv_f_2R2"].skip()
        rhs = ln_n + 2.0 * p.spectral_norm * float(np.linalg.norm(x))
        tol = 1e-12 * max(1.0, rhs)
        recs["log_inv_f_general"].add(rhs - linf, linf > rhs + tol, linf - rhs)
    return recs


def _weighted_instance(rng, n, d, R, C, gamma, exact_min=True) -> ProblemInstance:
    """Instance whose w_i^2 equal the C-threshold exactly (the tightest case)."""
    mode = B_MODES[int(rng.integers(len(B_MODES)))]
    p = generate_instance(n, d, R, _int_seed(rng), mode, C, gamma=gamma)
    if exact_min:
        wsq = min_weight_squared(n, gamma, p.l, p.sigma_min, C)
        p = p.replace(w=np.full(n, np.nextafter(math.sqrt(wsq), np.inf)))
    return p


def psd_campaign(cfg: CheckConfig) -> dict:
    C = cfg.constant(10.0)
    recs = _records(("hessian_lower_bound", "assert"))
    recs["hessian_lower_bound"].note = f"lambda_min(H) >= l - 1e-8 ||H||, weights at C={C:g}"
    for i in range(cfg.psd_instances):
        rng = stream(cfg.seed, 3, i)
        n = int(rng.integers(2, 81))
        d = int(rng.integers(1, min(8, n) + 1))
        gamma = GAMMA_GRID[i % len(GAMMA_GRID)]
        p = _weighted_instance(rng, n, d, 10.0, C, gamma)
        x = point_in_ball(rng, d, p.R)
        cert = certify_psd(p, x, approx_ratio=False)
        if cert.psd_claim_holds is None:
            recs["hessian_lower_bound"].skip()
            continue
        margin = cert.lambda_min_H - (p.l - 1e-8 * cert.H_norm)
        recs["hessian_lower_bound"].add(margin, not cert.psd_claim_holds, -margin)
    return recs


def approx_campaign(cfg: CheckConfig) -> dict:
    C = cfg.constant(200.0)
    recs = _records(("diagonal_approximation", "assert"))
    recs["diagonal_approximation"].note = f"eig(W^-1 D W^-1) in [0.9, 1.1], weights at C={C:g}"
    for i in range(cfg.approx_instances):
        rng = stream(cfg.seed, 4, i)
        n = int(rng.integers(2, 81))
        d = int(rng.integers(1, min(8, n) + 1))
        gamma = GAMMA_GRID[i % len(GAMMA_GRID)]
        p = _weighted_instance(rng, n, d, 10.0, C, gamma)
        x = point_in_ball(rng, d, p.R)
        cert = certify_psd(p, x, approx_ratio=True)
        if cert.approx_claim_holds is None:
            recs["diagonal_approximation"].skip()
            continue
        lo, hi = cert.approx_ratio_bounds
        margin = min(lo - 0.9, 1.1 - hi)
        recs["diagonal_approximation"].add(margin, not cert.approx_claim_holds, -margin)
    return recs


def block_campaign(cfg: CheckConfig) -> tuple:
    """B-block sandwiches; also returns the extreme eigenvalues seen."""
    recs = {}
    ext = {"B1_min": math.inf, "B1_max": -math.inf, "B2_over_log2n_max": 0.0}
    for i in range(cfg.block_evaluations):
        rng = stream(cfg.seed, 5, i)
        n = int(rng.integers(2, 101))
        d = int(rng.integers(1, min(8, n) + 1))
        R = 10.0 if i % 2 else 1.5
        mode = B_MODES[int(rng.integers(len(B_MODES)))]
        p = generate_instance(n, d, R, _int_seed(rng), mode, 10.0)
        rep = bound_B_blocks(evaluate(p, point_in_ball(rng, d, R)))
        for chk in rep.checks:
            rec = recs.setdefault(chk.name, LemmaRecord(chk.name))
            if not chk.applicable:
                rec.skip()
                continue
            margin = min(chk.lower_margin, chk.upper_margin)
            rec.add(margin, not chk.passed, -margin)
        ext["B1_min"] = min(ext["B1_min"], rep.B1_extremes[0])
        ext["B1_max"] = max(ext["B1_max"], rep.B1_extremes[1])
        ln2 = math.log(n) ** 2
        ext["B2_over_log2n_max"] = max(ext["B2_over_log2n_max"],
                                       max(abs(v) for v in rep.B2_extremes) / ln2)
    return recs, ext


def lipschitz_campaign(cfg: CheckConfig, R: float = 1.5) -> dict:
    recs = {}
    for i in range(cfg.lipschitz_pairs):
        rng = stream(cfg.seed, 6, i)
        n = int(rng.integers(2, 61))
        d = int(rng.integers(1, min(6, n) + 1))
        mode = B_MODES[int(rng.integers(len(B_MODES)))]
        p = generate_instance(n, d, R, _int_seed(rng), mode, 10.0)
        x = point_in_ball(rng, d, R)
        if i % 2:
            y = point_in_ball(rng, d, R)
        else:
            y = x + point_in_ball(rng, d, 10.0 ** rng.uniform(-3, -1))
            if np.linalg.norm(y) > R:
                y *= R / np.linalg.norm(y)
        rep = lipschitz_suite(p, x, y)
        for chk in rep.checks:
            rec = recs.setdefault(chk.name, LemmaRecord(chk.name, chk.kind))
            if not chk.applicable:
                rec.skip()
                continue
            rec.add(chk.rhs - chk.lhs, not chk.holds, chk.violation)
    recs["log_f_lipschitz_literal"].note = "stated without the 1/f(x) weighting; reported only"
    recs["hessian_lipschitz_30"].note = "tighter exponent variant; reported only"
    return recs


def sketch_campaign(cfg: CheckConfig, n: int = 500, d: int = 4, epsilon0: float = 0.05,
                    delta: float = 0.01) -> dict:
    """Spectral guarantee of the leverage-score sample over many seeds.

    A second, info-only row repeats the trial with an oversampling constant
    small enough that rows are genuinely sampled rather than all kept.
    """
    rng = stream(cfg.seed, 7, 0)
    A = rng.standard_normal((n, d))
    A *= 5.0 / np.linalg.norm(A, 2)
    q = np.exp(rng.normal(0.0, 1.0, size=n))
    allowed = delta + 2.0 * math.sqrt(delta / cfg.sketch_seeds) if cfg.sketch_seeds else 0.0
    recs = {
        "leverage_sum": LemmaRecord("leverage_sum", note="|sum tau - d| <= 1e-8"),
        "sketch_spectral": LemmaRecord("sketch_spectral", max_rate=allowed,
                                       note=f"failure rate <= {allowed:.4g}"),
        "sketch_spectral_sparse": LemmaRecord(
            "sketch_spectral_sparse", kind="info",
            note="oversampling 0.02 so that m < n; reported only"),
    }
    tau = leverage_scores(A, q)
    e = abs(float(tau.sum()) - d)
    recs["leverage_sum"].add(1e-8 - e, e > 1e-8, e)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SamplingWarning)
        for s in range(cfg.sketch_seeds):
            for name, c0 in (("sketch_spectral", None), ("sketch_spectral_sparse", 0.02)):
                kw = {} if c0 is None else {"oversampling": c0}
                sd = subsample(A, q, epsilon0, delta, seed=cfg.seed * 1_000_003 + s, **kw)
                lo, hi, ok = verify_spectral(A, q, sd)
                margin = min(lo - (1 - epsilon0), (1 + epsilon0) - hi)
                recs[name].add(margin, not ok, -margin)
    return recs


def convergence_instance(seed: int, gamma: float, n: int = 100, d: int = 8,
                         R: float = 10.0, C: float = 200.0, l: float = 1.0):
    """Instance, oracle x*, empirical M and a starting point with M res0 <= 0.05 l.

    M is estimated on the ball around x* of the chosen starting radius, and
    the radius is shrunk until the initialization condition holds there.
    """
    rng = stream(seed, 8, 0)
    p = generate_instance(n, d, R, _int_seed(rng), "softmax_of_random_x", C, l, gamma=gamma)
    x_star, _, _ = oracle_solution(p)
    radius = 1.0
    for _ in range(20):
        M = estimate_M(p, x_star, radius, samples=16, seed=_int_seed(rng))
        if M * radius <= 0.05 * l:
            break
        radius = 0.05 * l / M
    u = rng.standard_normal(d)
    x0 = x_star + radius * u / np.linalg.norm(u)
    return p, x_star, M, x0


def convergence_campaign(cfg: CheckConfig, epsilon: float = 1e-8) -> dict:
    C = cfg.constant(200.0)
    recs = {}
    for mode in ("exact", "approx"):
        for name in ("contraction", "iteration_bound", "one_step_shrink", "descent"):
            key = f"{name}_{mode}"
            recs[key] = LemmaRecord(key, kind="info" if (name == "descent" and mode == "approx")
                                    else "assert")
    recs["initialization"] = LemmaRecord("initialization", note="M res0 <= 0.1 l")
    for i in range(cfg.convergence_instances):
        gamma = GAMMA_GRID[i % len(GAMMA_GRID)]
        p, x_star, M, x0 = convergence_instance(cfg.seed * 7919 + i, gamma, C=C)
        res0 = float(np.linalg.norm(x0 - x_star))
        ok_w = weights_satisfy(p, 200.0)
        init_ok = M * res0 <= 0.1 * p.l
        if not ok_w:
            for r in recs.values():
                r.skip()
            continue
        recs["initialization"].add(0.1 * p.l - M * res0, not init_ok, M * res0 - 0.1 * p.l)
        floor = 1e-12 * max(1.0, float(np.linalg.norm(x_star)))
        bound = iteration_budget(res0, epsilon) + 2
        for mode in ("exact", "approx"):
            conf = SolverConfig(mode=mode, epsilon=epsilon, seed=cfg.seed + i, M_override=M)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", SamplingWarning)
                try:
                    _, trace = solve(p, x0, conf, x_star=x_star)
                except (IndefiniteHessianError, NumericalError, ExpOverflowError):
                    recs[f"contraction_{mode}"].add(-1.0, True, math.inf)
                    continue
            res = trace.residuals
            its = trace.iterations
            rec = recs[f"iteration_bound_{mode}"]
            rec.add(bound - its, its > bound or trace.status != "converged", its - bound)
            for t in range(len(res) - 1):
                if res[t] <= floor:
                    continue
                ratio = res[t + 1] / res[t]
                recs[f"contraction_{mode}"].add(CONTRACTION - ratio, ratio > CONTRACTION,
                                                ratio - CONTRACTION)
                rbar = M * res[t]
                eps0 = 0.0
                hr = trace.records[t + 1].hessian_ratio
                if hr is not None:
                    eps0 = max(1.0 - hr[0], hr[1] - 1.0)
                shrink = 2.0 * (eps0 + rbar / (p.l - rbar)) * res[t] if rbar < p.l else math.inf
                slack = shrink + floor
                recs[f"one_step_shrink_{mode}"].add(slack - res[t + 1], res[t + 1] > slack,
                                                    res[t + 1] - slack)
            for a, b in zip(trace.records, trace.records[1:]):
                inc = b.L - a.L
                recs[f"descent_{mode}"].add(1e-10 - inc, inc > 1e-10, inc)
    return recs


CAMPAIGNS = ("oracle", "facts", "psd", "approx", "blocks", "lipschitz", "sketch", "convergence")


def run_check(cfg: CheckConfig, campaigns=CAMPAIGNS) -> dict:
    """Run the verification battery; returns a JSON-ready report.

    ``report["exit_code"]`` is 1 if any assert-kind record failed, else 0.
    """
    report = {"config": cfg.to_dict(), "campaigns": {}, "timing_s": {}}
    failures = []
    for name in campaigns:
        t0 = time.perf_counter()
        fn = {
            "oracle": oracle_campaign, "facts": fact_campaign, "psd": psd_campaign,
            "approx": approx_campaign, "blocks": block_campaign,
            "lipschitz": lipschitz_campaign, "sketch": sketch_campaign,
            "convergence": convergence_campaign,
        }.get(name)
        if fn is None:
            raise ConfigError(f"unknown campaign {name!r}; expected one of {CAMPAIGNS}")
        out = fn(cfg)
        extra = None
        if isinstance(out, tuple):
            out, extra = out
        entry = {"records": [r.to_dict() for r in out.values()]}
        if extra is not None:
            entry["extremes"] = extra
        report["campaigns"][name] = entry
        report["timing_s"][name] = time.perf_counter() - t0
        failures += [f"{name}/{r.name}" for r in out.values() if r.failed]
    report["failures"] = failures
    report["exit_code"] = 1 if failures else 0
    return report
