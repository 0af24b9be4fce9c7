"""Acceptance criteria, one test each. Every test records a PASS/FAIL line
that is echoed in the pytest terminal summary."""

import math
import time
import warnings

import numpy as np
import pytest

from entnewton import SolverConfig, evaluate, solve
from entnewton.harness.cli import main
from entnewton.harness.experiments import (
    CheckConfig, approx_campaign, block_campaign, convergence_campaign, fact_campaign,
    lipschitz_campaign, oracle_campaign, psd_campaign, sketch_campaign,
)
from entnewton.harness.instances import generate_instance
from entnewton.sketch import SamplingWarning, sample_size
from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.filterwarnings("ignore::entnewton.sketch.SamplingWarning")

SEED = 2024


def record(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def summary(recs, names=None):
    rows = [r for r in recs.values() if names is None or r.name in names]
    bad = [f"{r.name}({r.violations}/{r.checked})" for r in rows if r.failed]
    return bad, sum(r.checked for r in rows)


def test_criterion_01_calculus_oracle():
    t0 = time.perf_counter()
    recs = oracle_campaign(CheckConfig(seed=SEED, oracle_instances=100))
    dt = time.perf_counter() - t0
    g, h = recs["gradient_fd"], recs["hessian_fd"]
    ok = not g.failed and not h.failed and g.checked == h.checked == 100 and dt <= 60
    record(1, ok, f"100 instances, max grad rel err {worst_error(g):.2e} (<=1e-6), "
                  f"max Hessian rel err {worst_error(h):.2e} (<=1e-5), {dt:.1f}s (<=60s)")


def worst_error(rec):
    # largest observed error = tolerance minus the smallest margin
    tol = 1e-6 if rec.name == "gradient_fd" else 1e-5
    return tol - rec.margin_min


def test_criterion_02_fact_battery():
    recs = fact_campaign(CheckConfig(seed=SEED, fact_pairs=1000))
    bad, checked = summary(recs)
    lit = recs["log_inv_f_2R2"]
    record(2, not bad and recs["f_sums_to_one"].checked == 1000,
           f"1000 pairs, {checked} checks, violations: {bad or 'none'} "
           f"(2R^2 bound checked on {lit.checked} pairs with R>=10)")


def test_criterion_03_psd_certificate():
    rec = psd_campaign(CheckConfig(seed=SEED, psd_instances=100))["hessian_lower_bound"]
    record(3, not rec.failed and rec.checked == 100,
           f"{rec.checked} instances at the C=10 weight threshold, "
           f"{rec.violations} violations, min margin {rec.margin_min:.3g}")


def test_criterion_04_diagonal_approximation():
    rec = approx_campaign(CheckConfig(seed=SEED, approx_instances=100))["diagonal_approximation"]
    record(4, not rec.failed and rec.checked == 100,
           f"{rec.checked} instances at the C=200 threshold, {rec.violations} outside "
           f"[0.9, 1.1], min margin {rec.margin_min:.3g}")


def test_criterion_05_block_bounds():
    recs, ext = block_campaign(CheckConfig(seed=SEED, block_evaluations=1000))
    bad, _ = summary(recs, {"B1_4I", "B2_log2n"})
    n = recs["B1_4I"].checked
    record(5, not bad and n == 1000,
           f"{n} evaluations, B1 eig range [{ext['B1_min']:.3f}, {ext['B1_max']:.3f}], "
           f"max |eig B2|/ln^2 n = {ext['B2_over_log2n_max']:.3f}, violations: {bad or 'none'}")


def test_criterion_06_lipschitz_suite():
    recs = lipschitz_campaign(CheckConfig(seed=SEED, lipschitz_pairs=500), R=1.5)
    wanted = {f"G{i}" for i in range(1, 8)} | {f"summary_G{i}" for i in range(1, 8)}
    wanted |= {"L_ent_lipschitz", "h_lipschitz"}
    bad, checked = summary(recs, wanted)
    record(6, not bad and recs["G1"].checked == 500,
           f"500 pairs in the R=1.5 ball, {checked} G/entropy/h checks, "
           f"violations: {bad or 'none'}")


def test_criterion_07_leverage_sketch():
    n, d, eps0, delta = 500, 4, 0.05, 0.01
    recs = sketch_campaign(CheckConfig(seed=SEED, sketch_seeds=500), n, d, eps0, delta)
    spec, lev = recs["sketch_spectral"], recs["leverage_sum"]
    sparse = recs["sketch_spectral_sparse"]
    rate = spec.violations / spec.checked
    m = sample_size(n, d, eps0, delta)
    record(7, not spec.failed and not lev.failed and spec.checked == 500,
           f"failure rate {rate:.4f} (<= {spec.max_rate:.4f}), |sum tau - d| ok; "
           f"budget m={m} >= n so every row is kept; "
           f"info: with m < n the rate is {sparse.violations / sparse.checked:.3f}")


def test_criterion_08_convergence_contract():
    t0 = time.perf_counter()
    recs = convergence_campaign(CheckConfig(seed=SEED, convergence_instances=20))
    dt = time.perf_counter() - t0
    names = {f"{k}_{m}" for k in ("contraction", "iteration_bound") for m in ("exact", "approx")}
    names.add("initialization")
    bad, _ = summary(recs, names)
    c = recs["iteration_bound_exact"].checked + recs["iteration_bound_approx"].checked
    record(8, not bad and c == 40 and dt <= 120,
           f"20 instances x 2 modes, {recs['contraction_exact'].checked + recs['contraction_approx'].checked}"
           f" contraction steps, violations: {bad or 'none'}, {dt:.1f}s (<=120s)")


def test_criterion_09_pure_entropy_closed_form():
    worst_x, worst_ent, runs = 0.0, 0.0, 0
    for i in range(20):
        rng = np.random.default_rng(SEED + i)
        n = int(rng.integers(2, 80))
        d = int(rng.integers(1, min(n, 8) + 1))
        p = generate_instance(n, d, 10.0, SEED + i, "simplex_random", 10.0, gamma=1.0)
        x0 = rng.standard_normal(d) * 0.05
        for mode in ("exact", "approx"):
            x, trace = solve(p, x0, SolverConfig(mode=mode, epsilon=1e-8))
            worst_x = max(worst_x, float(np.linalg.norm(x)))
            worst_ent = max(worst_ent, abs(evaluate(p, x).L_ent - math.log(n)))
            runs += 1
    record(9, worst_x <= 1e-8 and worst_ent <= 1e-6,
           f"{runs} solves, max ||x|| {worst_x:.2e} (<=1e-8), "
           f"max |L_ent - ln n| {worst_ent:.2e} (<=1e-6)")


def test_criterion_10_sweep_determinism(tmp_path):
    for name in ("a", "b"):
        assert main(["sweep", "--seed", "7", "--mode", "approx", "--out", str(tmp_path / name)]) == 0
    a = (tmp_path / "a" / "sweep.csv").read_bytes()
    b = (tmp_path / "b" / "sweep.csv").read_bytes()
    record(10, a == b, f"two sweep runs, {len(a)} bytes each, identical={a == b}")


def test_criterion_11_mutation_negative_control():
    recs = oracle_campaign(CheckConfig(seed=SEED, oracle_instances=100, mutation="flip_hf_sign"))
    h = recs["hessian_fd"]
    record(11, h.failed,
           f"flip_hf_sign: Hessian oracle flags {h.violations}/{h.checked} instances, "
           f"max rel err {h.max_violation:.2e}")
