"""Acceptance suite: benchmark-scale Monte Carlo gates and the standalone
property checks. Each test prints one pass/fail line with the measured
quantities, then asserts.

The Monte Carlo criteria run the full replication counts and take over an
hour in total on one core; the property checks (criterion 6) finish in a
few minutes.
"""

import json
import time

import numpy as np
import pytest

from calipen import (
    PenaltySpec,
    SimDesign,
    SolverConfig,
    TrueModel,
    calibrated_cccp,
    cccp_full,
    lambda_grid,
    path,
    penalized_objective,
    resolve_tau,
    run_monte_carlo,
    scenario,
    solve_surrogate,
    standardize,
)
from calipen.cli import EXIT_OK, main
from calipen.data import Dataset
from calipen.diagnostics import l2_bound_check
from calipen.penalty import concave_grad, concave_value, penalty_value
from calipen.sim import gen_design
from calipen.solver import SurrogateProblem, nonconvex_kkt_residual


def emit(capsys, tag, ok, details):
    with capsys.disabled():
        print(f"\n[{tag}] {'PASS' if ok else 'FAIL'}  {details}")


def random_instance(rng, strong_signals=True):
    """Random well-conditioned problem (n >= 2p) with signals placed far
    beyond the penalty transition band."""
    n = int(rng.integers(60, 121))
    p = int(rng.integers(5, 51))
    spec = PenaltySpec.scad() if rng.random() < 0.5 else PenaltySpec.mcp()
    lam = float(rng.uniform(0.2, 0.6))
    q = int(rng.integers(1, 4))
    beta = np.zeros(p)
    idx = rng.choice(p, size=q, replace=False)
    lo = 2.5 * spec.a * lam if strong_signals else 0.5 * lam
    hi = 4.0 * spec.a * lam if strong_signals else 4.0 * spec.a * lam
    beta[idx] = rng.choice([-1.0, 1.0], q) * rng.uniform(lo, hi, q)
    X = rng.normal(size=(n, p))
    y = X @ beta + 0.3 * rng.normal(size=n)
    return standardize(X, y, center=False), spec, lam


class TestPropertySuite:
    def test_criterion_6a_decomposition_identity(self, capsys):
        rng = np.random.default_rng(60)
        worst = 0.0
        for fam in (PenaltySpec.scad, PenaltySpec.mcp, PenaltySpec.l1):
            for _ in range(4):
                spec = fam()
                lam = float(rng.uniform(0.05, 2.0))
                hi = 3 * spec.a * lam if spec.a and np.isfinite(spec.a) \
                    else 6 * lam
                t = np.abs(np.concatenate([
                    rng.uniform(0, hi, 700),
                    rng.normal(scale=10.0, size=134),
                ]))
                pv = penalty_value(spec, t, lam)
                gap = np.abs(pv - concave_value(spec, t, lam) - lam * t)
                worst = max(worst, float(np.max(gap / np.maximum(1.0, pv))))
        ok = worst <= 1e-12
        emit(capsys, "criterion 6a", ok,
             f"decomposition identity over 10^4 draws, worst relative "
             f"gap {worst:.3e} (<= 1e-12)")
        assert ok

    def test_criterion_6b_surrogate_vs_grid_oracle(self, capsys):
        rng = np.random.default_rng(61)
        cfg = SolverConfig(tol=1e-10)
        worst = 0.0
        for _ in range(50):
            n = 30
            X = rng.normal(size=(n, 2))
            y = rng.normal(size=n) + X @ rng.uniform(-2, 2, size=2)
            ds = standardize(X, y, center=False)
            lam = float(rng.uniform(0.1, 0.8))
            g = rng.uniform(-0.9, 0.9, size=2) * lam
            fit = solve_surrogate(SurrogateProblem(data=ds, g=g, lam=lam),
                                  cfg=cfg)
            G = ds.X.T @ ds.X
            c = ds.X.T @ ds.y
            yy = float(ds.y @ ds.y)

            def objective(b1, b2):
                quad = (yy - 2 * (b1 * c[0] + b2 * c[1])
                        + b1 ** 2 * G[0, 0] + 2 * b1 * b2 * G[0, 1]
                        + b2 ** 2 * G[1, 1]) / (2 * n)
                return (quad + g[0] * b1 + g[1] * b2
                        + lam * (np.abs(b1) + np.abs(b2)))

            # coarse mesh, then a refined mesh around the coarse argmin
            B = float(np.max(np.abs(fit.beta))) * 1.5 + 1.0
            grid = np.linspace(-B, B, 401)
            b1, b2 = np.meshgrid(grid, grid, indexing="ij")
            k = np.unravel_index(np.argmin(objective(b1, b2)), b1.shape)
            h = grid[1] - grid[0]
            f1 = np.linspace(grid[k[0]] - 2 * h, grid[k[0]] + 2 * h, 401)
            f2 = np.linspace(grid[k[1]] - 2 * h, grid[k[1]] + 2 * h, 401)
            b1, b2 = np.meshgrid(f1, f2, indexing="ij")
            k = np.unravel_index(np.argmin(objective(b1, b2)), b1.shape)
            worst = max(worst, abs(f1[k[0]] - fit.beta[0]),
                        abs(f2[k[1]] - fit.beta[1]))
        ok = worst <= 1e-3
        emit(capsys, "criterion 6b", ok,
             f"surrogate vs 2-D grid oracle on 50 instances, worst "
             f"coordinate gap {worst:.2e} (<= 1e-3)")
        assert ok

    def test_criterion_6c_kkt_stationarity(self, capsys):
        rng = np.random.default_rng(62)
        cfg = SolverConfig(tol=1e-9)
        worst = 0.0
        for _ in range(100):
            ds, spec, lam = random_instance(rng)
            fit = calibrated_cccp(ds, spec, lam,
                                  resolve_tau("invlogn", ds.n, lam), cfg=cfg)
            worst = max(worst, nonconvex_kkt_residual(ds, fit.beta, spec, lam))
            full = cccp_full(ds, spec, lam, cfg=cfg)
            worst = max(worst, full.kkt_residual)
        ok = worst <= 10 * cfg.tol
        emit(capsys, "criterion 6c", ok,
             f"stationarity of calibrated and full CCCP outputs on 100 "
             f"instances, worst residual {worst:.2e} (<= {10 * cfg.tol:.0e})")
        assert ok

    def test_criterion_6d_objective_monotonicity(self, capsys):
        rng = np.random.default_rng(63)
        cfg = SolverConfig(tol=1e-9)
        worst_rise = 0.0
        for _ in range(50):
            ds, spec, lam = random_instance(rng, strong_signals=False)
            beta = np.zeros(ds.p)
            obj = penalized_objective(ds, beta, spec, lam)
            for _ in range(50):
                g = np.asarray(concave_grad(spec, beta, lam))
                fit = solve_surrogate(SurrogateProblem(data=ds, g=g, lam=lam),
                                      warm_start=beta, cfg=cfg)
                new = penalized_objective(ds, fit.beta, spec, lam)
                worst_rise = max(worst_rise, new - obj)
                done = float(np.max(np.abs(fit.beta - beta))) <= cfg.tol
                beta, obj = fit.beta, new
                if done:
                    break
        ok = worst_rise <= 1e-10
        emit(capsys, "criterion 6d", ok,
             f"CCCP objective monotone on 50 instances, worst rise "
             f"{worst_rise:.2e} (<= 1e-10)")
        assert ok

    def test_criterion_6e_path_consistency(self, capsys):
        design = SimDesign("reduced", "ar1", n=100, p=300, rho=0.5,
                           sigma=2.0, seed=0)
        spec = PenaltySpec.scad()
        hits = 0
        for rep in range(50):
            data, truth, _ = gen_design(design, rep)
            sol = path(data, spec, lambda_grid(data, n_points=50))
            hits += any(f.support == truth.support for f in sol.fits)
        ok = hits / 50 >= 0.85
        emit(capsys, "criterion 6e", ok,
             f"oracle support on the path in {hits}/50 reduced-scale reps "
             f"(>= 0.85)")
        assert ok

    def test_criterion_6f_l2_bound_rate(self, capsys):
        n, p, q = 50, 10, 2
        lam = float(np.sqrt(3 * np.log(p) / n))
        u_n = 3.0
        spec = PenaltySpec.scad()
        cfg = SolverConfig(tol=1e-9)
        holds = total = 0
        for i in range(100):
            rng = np.random.default_rng((66, i))
            beta_star = np.zeros(p)
            beta_star[:q] = [3.0, -2.0]
            X = rng.normal(size=(n, p))
            y = X @ beta_star + 0.4 * rng.normal(size=n)
            ds = standardize(X, y, center=False)
            truth = TrueModel(beta_star=beta_star)
            # CCCP from a random start to reach a sparse stationary point
            beta = rng.normal(size=p) * 0.5
            for _ in range(50):
                g = np.asarray(concave_grad(spec, beta, lam))
                fit = solve_surrogate(SurrogateProblem(data=ds, g=g, lam=lam),
                                      warm_start=beta, cfg=cfg)
                if float(np.max(np.abs(fit.beta - beta))) <= cfg.tol:
                    beta = fit.beta
                    break
                beta = fit.beta
            size = int(np.count_nonzero(beta))
            if size == 0 or size > q * u_n:
                continue  # precondition not met
            total += 1
            _, _, within = l2_bound_check(beta, ds, truth, lam, u_n=u_n)
            holds += within
        rate = holds / total if total else 0.0
        ok = rate >= 0.95 and total >= 50
        emit(capsys, "criterion 6f", ok,
             f"distance bound held for {holds}/{total} qualifying "
             f"stationary points (>= 95%)")
        assert ok

    def test_criterion_6g_determinism(self, capsys, tmp_path):
        args = ["simulate", "case1a", "--reps", "2", "--methods", "new",
                "--grid-points", "8", "--seed", "0",
                "--no-figures", "--out", str(tmp_path / "run")]
        assert main(args) == EXIT_OK
        first = (tmp_path / "run.json").read_bytes()
        assert main(args) == EXIT_OK
        ok = (tmp_path / "run.json").read_bytes() == first
        emit(capsys, "criterion 6g", ok,
             "repeated same-seed simulate output byte-identical")
        assert ok


class TestMonteCarloGates:
    def test_criterion_1_case1a(self, capsys):
        rep = run_monte_carlo(scenario("case1a"), methods=("new", "oracle"),
                              reps=100)
        m = rep.metrics["new"]
        om = rep.metrics["oracle"]
        checks = {
            "TM>=0.80": m.tm >= 0.80,
            "FP<=0.6": m.fp <= 0.6,
            "TP>=2.90": m.tp >= 2.90,
            "MSE<=0.45": m.mse <= 0.45,
            "oracleMSE in [0.10,0.20]": 0.10 <= om.mse <= 0.20,
            "time<=900s": rep.wall_time <= 900,
        }
        ok = all(checks.values())
        emit(capsys, "criterion 1", ok,
             f"case1a 100 reps: TM={m.tm:.2f} FP={m.fp:.2f} TP={m.tp:.2f} "
             f"MSE={m.mse:.3f} oracleMSE={om.mse:.3f} "
             f"t={rep.wall_time:.0f}s "
             + " ".join(k for k, v in checks.items() if not v))
        assert ok

    def test_criterion_2_case1c(self, capsys):
        rep = run_monte_carlo(scenario("case1c"), methods=("new",), reps=100)
        m = rep.metrics["new"]
        checks = {"TM>=0.40": m.tm >= 0.40, "MSE<=2.0": m.mse <= 2.0}
        ok = all(checks.values())
        emit(capsys, "criterion 2", ok,
             f"case1c 100 reps: TM={m.tm:.2f} MSE={m.mse:.3f} "
             + " ".join(k for k, v in checks.items() if not v))
        assert ok

    def test_criterion_3_case2b(self, capsys):
        # 50 grid points: the scenario has strong, well-separated signals
        # and the coarser grid keeps the run inside the time budget
        rep = run_monte_carlo(scenario("case2b"), methods=("new",), reps=100,
                              grid_points=50)
        m = rep.metrics["new"]
        checks = {
            "TM>=0.90": m.tm >= 0.90,
            "FP<=0.3": m.fp <= 0.3,
            "MSE<=0.25": m.mse <= 0.25,
            "time<=1800s": rep.wall_time <= 1800,
        }
        ok = all(checks.values())
        emit(capsys, "criterion 3", ok,
             f"case2b 100 reps: TM={m.tm:.2f} FP={m.fp:.2f} MSE={m.mse:.3f} "
             f"t={rep.wall_time:.0f}s "
             + " ".join(k for k, v in checks.items() if not v))
        assert ok

    def test_criterion_4_lasso_cv_overfits(self, capsys):
        rep = run_monte_carlo(scenario("case1a"), methods=("lasso",), reps=25)
        m = rep.metrics["lasso"]
        checks = {"FP>=10": m.fp >= 10, "TM<=0.05": m.tm <= 0.05}
        ok = all(checks.values())
        emit(capsys, "criterion 4", ok,
             f"lasso-CV case1a 25 reps: FP={m.fp:.2f} TM={m.tm:.2f} "
             + " ".join(k for k, v in checks.items() if not v))
        assert ok

    def test_criterion_5_logistic(self, capsys):
        rep = run_monte_carlo(scenario("logit"), methods=("new",), reps=50,
                              grid_points=50, test_size=1000)
        m = rep.metrics["new"]
        mis = rep.misclass["new"]
        checks = {"misclass<=0.14": mis <= 0.14, "TM>=0.85": m.tm >= 0.85}
        ok = all(checks.values())
        emit(capsys, "criterion 5", ok,
             f"logistic 50 reps: misclass={mis:.3f} TM={m.tm:.2f} "
             + " ".join(k for k, v in checks.items() if not v))
        assert ok
