"""Regenerate frozen.json with an independent extended-precision reference.

Nothing from the package is imported: every quantity is recomputed from its
definition in mpmath at 50 digits. Run once; tests only read the output.

    python3 tests/oracles/generate_frozen.py
"""

import json
from pathlib import Path

import mpmath as mp
import numpy as np

mp.mp.dps = 50
OUT = Path(__file__).with_name("frozen.json")


def mp_loss(A, b, w, gamma, x):
    n, d = len(A), len(A[0])
    z = [mp.fsum(mp.mpf(A[i][j]) * x[j] for j in range(d)) for i in range(n)]
    u = [mp.exp(v) for v in z]
    alpha = mp.fsum(u)
    f = [v / alpha for v in u]
    h = [fi * mp.log(fi) for fi in f]
    L_ent = -mp.fsum(h)
    L_exp = mp.fsum((fi - mp.mpf(bi)) ** 2 for fi, bi in zip(f, b)) / 2
    L_reg = mp.fsum((mp.mpf(wi) * zi) ** 2 for wi, zi in zip(w, z)) / 2
    L = (1 - mp.mpf(gamma)) * L_exp - mp.mpf(gamma) * L_ent + L_reg
    return dict(alpha=alpha, f=f, h=h, L_ent=L_ent, L_exp=L_exp, L_reg=L_reg, L=L)


def fl(v):
    if isinstance(v, list):
        return [fl(t) for t in v]
    return float(v)


def evaluation_case():
    rng = np.random.default_rng(42)
    n, d = 8, 3
    A = rng.standard_normal((n, d))
    A *= 2.0 / np.linalg.norm(A, 2)
    b = rng.random(n)
    b /= b.sum()
    w = rng.uniform(0.5, 2.0, n)
    x = rng.standard_normal(d)
    gamma = 0.3
    out = mp_loss(A.tolist(), b.tolist(), w.tolist(), gamma, [mp.mpf(v) for v in x])
    return {"A": A.tolist(), "b": b.tolist(), "w": w.tolist(), "x": x.tolist(),
            "gamma": gamma, "R": 2.0, "expected": {k: fl(v) for k, v in out.items()}}


def derivative_case():
    rng = np.random.default_rng(7)
    n, d = 5, 2
    A = rng.standard_normal((n, d))
    A *= 1.2 / np.linalg.norm(A, 2)
    b = rng.random(n)
    b *= 0.9 / b.sum()
    w = rng.uniform(0.0, 1.0, n)
    x = rng.standard_normal(d) * 0.5
    gamma = 0.6
    Al, bl, wl = A.tolist(), b.tolist(), w.tolist()

    def L(*xs):
        return mp_loss(Al, bl, wl, gamma, list(xs))["L"]

    x0 = [mp.mpf(v) for v in x]
    grad, hess = [], [[None] * d for _ in range(d)]
    for i in range(d):
        order = tuple(1 if k == i else 0 for k in range(d))
        grad.append(mp.diff(L, x0, order))
        for j in range(d):
            order = [0] * d
            order[i] += 1
            order[j] += 1
            hess[i][j] = mp.diff(L, x0, tuple(order))
    return {"A": Al, "b": bl, "w": wl, "x": x.tolist(), "gamma": gamma, "R": 1.2,
            "expected": {"grad": fl(grad), "hessian": fl(hess)}}


def leverage_case():
    rng = np.random.default_rng(200)
    n, d = 200, 5
    A = rng.standard_normal((n, d))
    q = rng.uniform(0.2, 3.0, n)
    G = A.T @ (q[:, None] * A)
    Gi = np.linalg.inv(G)
    tau = q * np.einsum("ij,jk,ik->i", A, Gi, A)
    return {"A": A.tolist(), "q": q.tolist(), "expected": {"tau": tau.tolist()}}


def whitened_case():
    rng = np.random.default_rng(31)
    n, d = 40, 3
    A = rng.standard_normal((n, d))
    q = rng.uniform(0.5, 2.0, n)
    qt = np.where(rng.random(n) < 0.6, q * rng.uniform(0.5, 1.5, n), 0.0)
    Am = mp.matrix(A.tolist())
    G = Am.T * mp.diag([mp.mpf(v) for v in q]) * Am
    Gt = Am.T * mp.diag([mp.mpf(v) for v in qt]) * Am
    Lc = mp.cholesky(G)
    Li = mp.inverse(Lc)
    M = Li * Gt * Li.T
    M = (M + M.T) / 2
    ev = sorted(mp.eigsy(M)[0])
    return {"A": A.tolist(), "q": q.tolist(), "q_tilde": qt.tolist(),
            "expected": {"eigenvalues": fl(list(ev))}}


def main():
    frozen = {
        "evaluate_n8_d3": evaluation_case(),
        "derivatives_n5_d2": derivative_case(),
        "leverage_n200_d5": leverage_case(),
        "whitened_n40_d3": whitened_case(),
        "min_weight_squared": {
            "args": {"n": 16, "gamma": 0.5, "l": 1.0, "sigma_min": 2.0, "constant": 200.0},
            "expected": float(100 + 100 * mp.log(16) ** 2 + mp.mpf(1) / 4),
        },
    }
    OUT.write_text(json.dumps(frozen, indent=1) + "\n")
    print(OUT)


if __name__ == "__main__":
    main()
