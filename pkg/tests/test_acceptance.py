"""Acceptance gate: one test per exit criterion, each at its stated
tolerance and runtime budget, printing a [PASS]/[FAIL]/[WAIVED] line.

Run with `pytest tests/test_acceptance.py -s` to see every line.
"""

import json
import math
import os
import time
from contextlib import contextmanager

import numpy as np
import pytest
from scipy import stats as sps

from whatif import (ObjectiveSpec, Scenario, from_columns, ks_two_sample,
                    load_csv, resample_with_fraction)
from whatif.bayesopt import (GPModel, OptimizeConfig, expected_improvement,
                             gp_posterior, matern52, minimize_on_unit_interval)
from whatif.cli import main
from whatif.engine import EngineConfig, generate_hypotheses, sweep_values, \
    swept_columns
from whatif.backtest import backtest
from whatif.resample import target_count
from whatif.tabular import match_mask
from whatif.workflows import whatif_report


@contextmanager
def criterion(name: str, budget_seconds: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    elapsed = time.perf_counter() - start
    if elapsed >= budget_seconds:
        print(f"[FAIL] {name}: took {elapsed:.1f}s, budget "
              f"{budget_seconds:.0f}s")
        raise AssertionError(f"{name} exceeded its runtime budget")
    print(f"[PASS] {name} ({elapsed:.1f}s)")


def test_resampler_exactness_and_uniformity():
    with criterion("resampler exactness + stratum uniformity", 10):
        rng = np.random.default_rng(0)
        n = 1000
        labels = np.where(rng.random(n) < 0.37, "v", "w")
        big = from_columns({"c": labels.tolist(),
                            "m": rng.normal(0, 1, n).tolist()})
        mask = match_mask(big, "c", "v")
        for x in np.round(np.arange(0, 11) / 10, 10):
            expected = target_count(float(x), n)
            for rep in range(30):
                draw = resample_with_fraction(big, Scenario("c", "v", float(x)),
                                              seed=rep)
                assert len(draw.row_indices) == n
                assert mask[draw.row_indices].sum() == expected

        # conditional preservation on a 20-row dataset over 1e4 draws
        small = from_columns({"c": ["v"] * 8 + ["w"] * 12,
                              "m": list(range(20))})
        small_mask = match_mask(small, "c", "v")
        scenario = Scenario("c", "v", 0.4)
        counts = np.zeros(20, dtype=np.int64)
        for i in range(10_000):
            draw = resample_with_fraction(small, scenario, seed=i)
            assert small_mask[draw.row_indices].sum() == 8  # 0.4 * 20
            counts += np.bincount(draw.row_indices, minlength=20)
        for stratum in (np.flatnonzero(small_mask),
                        np.flatnonzero(~small_mask)):
            _, p = sps.chisquare(counts[stratum])
            assert p > 0.001, f"stratum uniformity rejected: p={p}"


def dense_posterior_oracle(model, x):
    k = matern52(model.x, model.x, model.length_scale, model.signal_var)
    k = k + (model.noise_var + model.jitter) * np.eye(len(model.x))
    k_inv = np.linalg.inv(k)
    k_star = matern52(model.x, np.array([x]), model.length_scale,
                      model.signal_var)[:, 0]
    mu = float(k_star @ k_inv @ model.y_standardized)
    var = float(model.signal_var - k_star @ k_inv @ k_star)
    return (mu * model.y_scale + model.y_mean,
            math.sqrt(max(var, 0.0)) * model.y_scale)


def test_gp_and_ei_oracle_equivalence():
    with criterion("GP posterior + EI oracle equivalence", 60):
        rng = np.random.default_rng(101)
        models = []
        for _ in range(100):
            n = int(rng.integers(1, 11))
            model = GPModel(
                rng.uniform(0, 1, n), rng.normal(0, 1, n),
                length_scale=float(rng.uniform(0.05, 1.0)), signal_var=1.0,
                noise_var=float(rng.choice([1e-4, 1e-2, 1e-1])))
            models.append(model)
            for x in rng.uniform(0, 1, 3):
                mu, sigma = gp_posterior(model, float(x))
                mu_o, sigma_o = dense_posterior_oracle(model, float(x))
                assert abs(mu - mu_o) < 1e-8
                assert abs(sigma - sigma_o) < 1e-8

        for i in range(20):
            model = models[int(rng.integers(0, len(models)))]
            x = float(rng.uniform(0, 1))
            xi = 0.01
            f_best = float(np.min(model.y))
            mu, sigma = gp_posterior(model, x)
            draws = rng.normal(mu, sigma, size=1_000_000)
            mc = float(np.maximum(f_best - xi - draws, 0.0).mean())
            ei = expected_improvement(model, x, f_best, xi)
            assert abs(ei - mc) < 1e-3, f"EI query {i}: {ei} vs MC {mc}"


def test_bo_convergence_on_planted_v():
    with criterion("BO convergence on planted V (min at 0.4)", 300):
        hits = 0
        for seed in range(50):
            rng = np.random.default_rng(2000 + seed)

            def v_shape(x):
                return abs(x - 0.4) + rng.normal(0.0, 0.01)

            result = minimize_on_unit_interval(
                v_shape, OptimizeConfig(iterations=20, init_points=5, xi=0.01))
            assert result.iterations_used <= 20
            hits += abs(result.x_star - 0.4) <= 0.05
        assert hits >= 45, f"only {hits}/50 seeds converged"


def brute_force_ks_d(a, b):
    best = 0.0
    for t in np.concatenate([a, b]):
        fa = np.sum(a <= t) / a.size
        fb = np.sum(b <= t) / b.size
        best = max(best, abs(fa - fb))
    return best


def permutation_p_value(a, b, n_perm, rng):
    n_a, n_b = len(a), len(b)
    d_obs, _ = ks_two_sample(a, b)
    labels = np.zeros(n_a + n_b)
    labels[:n_a] = 1.0
    hits = 0
    done = 0
    while done < n_perm:
        m = min(20_000, n_perm - done)
        perm = np.argsort(rng.random((m, n_a + n_b)), axis=1)
        lab = labels[perm]
        fa = np.cumsum(lab, axis=1) / n_a
        fb = np.cumsum(1.0 - lab, axis=1) / n_b
        d = np.max(np.abs(fa - fb), axis=1)
        hits += int(np.sum(d >= d_obs - 1e-12))
        done += m
    return hits / n_perm


def test_ks_statistic_and_p_value():
    with criterion("KS statistic exactness + asymptotic p accuracy", 120):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            n_a = int(rng.integers(2, 60))
            n_b = int(rng.integers(2, 60))
            a = rng.normal(0, 1, n_a)
            b = rng.normal(rng.uniform(-1, 1), rng.uniform(0.5, 2), n_b)
            if rng.random() < 0.3:  # exercise tied values too
                a = np.round(a, 1)
                b = np.round(b, 1)
            d, _ = ks_two_sample(a, b)
            assert d == brute_force_ks_d(a, b)

        for i in range(20):
            a = rng.normal(0, 1, 100)
            b = rng.normal(rng.uniform(0, 0.4), rng.uniform(0.9, 1.2), 100)
            _, p_asym = ks_two_sample(a, b)
            p_perm = permutation_p_value(a, b, 100_000, rng)
            assert abs(p_asym - p_perm) < 0.02, \
                f"pair {i}: asym {p_asym} vs perm {p_perm}"


def planted_ranking_dataset(seed, n=400):
    rng = np.random.default_rng(seed)
    signal = rng.choice(["v", "w", "z"], size=n, p=[0.3, 0.35, 0.35])
    metric = rng.normal(100, 10, size=n) + 50.0 * (signal == "v")
    return from_columns({
        "signal": signal.tolist(),
        "noise_a": rng.choice(["x", "y"], size=n).tolist(),
        "noise_b": rng.choice(["p", "q", "r"], size=n).tolist(),
        "noise_c": rng.choice(["s", "t"], size=n).tolist(),
        "m": metric.tolist(),
    })


def test_algorithm_sweep_planted_ranking():
    with criterion("column/value sweep ranks the planted signal first", 300):
        hits = 0
        for seed in range(20):
            dataset = planted_ranking_dataset(seed)
            config = EngineConfig(
                objective=ObjectiveSpec("m", "mean", direction="maximize"),
                n_sample=10, iterations=10, init_points=5, min_support=5,
                master_seed=seed)
            result = generate_hypotheses(dataset, config)
            enumerated = sum(len(sweep_values(dataset, c, config))
                             for c in swept_columns(dataset, config))
            assert result.attempted + len(result.skipped) == enumerated
            top = result.recommendations[0]
            hits += (top.scenario.column == "signal"
                     and top.scenario.value == "v")
        assert hits >= 19, f"signal ranked first in only {hits}/20 seeds"


def test_backtest_protocol():
    with criterion("backtest: stationary MAE + planted fraction shift", 120):
        rng = np.random.default_rng(31)
        n = 2000
        cats = rng.choice(["a", "b", "c"], size=2 * n, p=[0.5, 0.3, 0.2])
        metric = rng.normal(100, 10, size=2 * n)
        stationary = from_columns({
            "t": [0] * n + [1] * n,
            "c": cats.tolist(),
            "m": metric.tolist(),
        })
        report = backtest(stationary, "t", 1, ObjectiveSpec("m", "mean"),
                          columns=["c"], n_sample=30, seed=8)
        assert report.mae <= 0.05, f"stationary MAE {report.mae}"

        # planted shift: fraction of 'v' moves 0.3 -> 0.6, metric = 100*1[v]
        per = 2000
        rows_c, rows_m, rows_t = [], [], []
        for period, frac in ((0, 0.3), (1, 0.6)):
            k = round(frac * per)
            labels = np.array(["v"] * k + ["w"] * (per - k))
            rng.shuffle(labels)
            rows_c.extend(labels.tolist())
            rows_m.extend((100.0 * (labels == "v")).tolist())
            rows_t.extend([period] * per)
        shifted = from_columns({"t": rows_t, "c": rows_c, "m": rows_m})
        report = backtest(shifted, "t", 1, ObjectiveSpec("m", "mean"),
                          columns=["c"], n_sample=30, seed=9)
        v_row = next(r for r in report.results if r.value == "v")
        se = v_row.simulated_std / math.sqrt(30)
        assert abs(v_row.simulated_metric - 60.0) <= max(3 * se, 1e-9)


OUTAGE_ENV = "WHATIF_OUTAGE_CSV"


def test_public_outage_dataset_replication():
    """Qualitative replication on the public outage dataset; waived when the
    dataset is not available locally (no general network egress here)."""
    path = os.environ.get(OUTAGE_ENV)
    if not path or not os.path.exists(path):
        print(f"[WAIVED] public-dataset replication: set {OUTAGE_ENV} to the "
              "outage CSV to enable; synthetic suite substitutes")
        pytest.skip("outage dataset not available; criterion waived")
    cause_col = os.environ.get("WHATIF_OUTAGE_CAUSE", "cause")
    restore_col = os.environ.get("WHATIF_OUTAGE_RESTORE", "duration_minutes")
    customers_col = os.environ.get("WHATIF_OUTAGE_CUSTOMERS",
                                   "customers_affected")
    severe = os.environ.get("WHATIF_OUTAGE_SEVERE", "severe weather")
    vandalism = os.environ.get("WHATIF_OUTAGE_VANDALISM", "vandalism")
    with criterion("public outage dataset replication", 300):
        dataset = load_csv(path)
        restore = whatif_report(dataset, cause_col, severe, 0.01,
                                ObjectiveSpec(restore_col, "mean"),
                                n_sample=30, seed=0)
        baseline = restore["report"]["baseline_stats"]["mean"]
        projected = restore["whatif_summary"]["metric_mean"]
        change = (projected - baseline) / baseline
        paper_change = (2490 - 2900) / 2900
        assert change < 0, "severe-weather reduction must cut restore time"
        assert abs(change - paper_change) <= 0.15
        customers = whatif_report(dataset, cause_col, vandalism, 0.0,
                                  ObjectiveSpec(customers_col, "mean"),
                                  n_sample=30, seed=0)
        assert customers["report"]["ks_p_value"] > 0.05


@pytest.fixture
def determinism_csv(tmp_path):
    rng = np.random.default_rng(77)
    n = 120
    causes = rng.choice(["weather", "vandalism", "equipment"], size=n,
                        p=[0.4, 0.2, 0.4])
    minutes = np.where(causes == "weather", 300.0, 100.0) \
        + rng.normal(0, 15, n)
    period = ([0] * (n // 2)) + ([1] * (n // 2))
    lines = ["t,cause,minutes"]
    lines += [f"{t},{c},{float(m)!r}"
              for t, c, m in zip(period, causes, minutes)]
    path = tmp_path / "d.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


def test_cli_determinism(determinism_csv, tmp_path):
    with criterion("CLI determinism: byte-identical JSON across runs", 120):
        commands = {
            "whatif": ["whatif", "--data", determinism_csv, "--column",
                       "cause", "--value", "weather", "--fraction", "0.05",
                       "--metric", "minutes", "--seed", "13"],
            "margins": ["margins", "--data", determinism_csv, "--column",
                        "cause", "--value", "weather", "--metric", "minutes",
                        "--seed", "13", "--n-sample", "5",
                        "--iterations", "10"],
            "recommend": ["recommend", "--data", determinism_csv, "--metric",
                          "minutes", "--seed", "13", "--n-sample", "4",
                          "--iterations", "10", "--exclude-columns", "t"],
            "backtest": ["backtest", "--data", determinism_csv,
                         "--time-column", "t", "--split", "1", "--metric",
                         "minutes", "--seed", "13", "--n-sample", "5",
                         "--columns", "cause"],
        }
        for name, argv in commands.items():
            outputs = []
            for run in (0, 1):
                out = tmp_path / f"{name}_{run}.json"
                assert main(argv + ["--out", str(out)]) == 0
                outputs.append(out.read_bytes())
            assert outputs[0] == outputs[1], f"{name} output not reproducible"
            json.loads(outputs[0])  # and it is valid JSON
