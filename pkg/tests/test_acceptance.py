"""End-to-end acceptance checks at desk scale.

Each criterion emits exactly one `criterion N: PASS/FAIL (...)` line. The
lines are printed inside the test (visible in captured output on failure)
and also registered with conftest, which echoes them all in a terminal
section at the end of the run so a tee'd log keeps an auditable record.
Simulation campaigns are shared module-scoped fixtures pinned to master
seed 7; everything here is deterministic.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from rcmsim.analysis import components, coupled_statistics, isolated_count
from rcmsim.cli import (CampaignConfig, format_summary_csv,
                        format_summary_json, format_trials_csv,
                        format_trials_json, run_campaign)
from rcmsim.geometry import Metric, distance_arrays
from rcmsim.models import gaussian, table_model, unit_disk
from rcmsim.sampler import (NetworkSample, SampleParams, build_graph,
                            couple_torus_to_square, sample_points)
from rcmsim.theory import ChenSteinParams, chen_stein_terms, expected_isolated
from oracles import bfs_components
import conftest

SEED = 7
UD = unit_disk()
GAUSS = gaussian()


def _line(n, ok, detail):
    text = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(text, flush=True)
    conftest.criterion_lines.append(text)


def _report(n, ok, detail):
    _line(n, ok, detail)
    assert ok, f"criterion {n} failed: {detail}"


def _run(model, rho_list, b_list, metric, trials):
    cfg = CampaignConfig(model=model, rho_list=tuple(rho_list),
                         b_list=tuple(b_list), metric=metric, trials=trials,
                         master_seed=SEED, epsilon=0.25,
                         output_path="unused.csv", format="csv")
    return run_campaign(cfg, workers=1)


@pytest.fixture(scope="module")
def torus_sweep():
    t0 = time.perf_counter()
    summary, rows, _ = _run(UD, [500.0, 2000.0], [0.0], "torus", 5000)
    return summary, rows, time.perf_counter() - t0


@pytest.fixture(scope="module")
def dense_torus():
    summary, rows, _ = _run(UD, [4000.0], [0.0], "torus", 5000)
    return summary, rows


@pytest.fixture(scope="module")
def coupled_sweep():
    summary, rows, _ = _run(UD, [500.0, 4000.0], [0.0], "coupled", 3000)
    return summary, rows


@pytest.fixture(scope="module")
def square_sweep():
    summary, rows, _ = _run(UD, [4000.0], [-3.0, 3.0], "square", 2000)
    return summary, rows


@pytest.fixture(scope="module")
def gaussian_torus():
    summary, rows, _ = _run(GAUSS, [2000.0], [0.0], "torus", 5000)
    return summary, rows


def test_criterion_1_unit_disk_torus_exactness():
    t0 = time.perf_counter()
    worst = 0.0
    for rho in (1e3, 1e4):
        for b in (-1.0, 0.0, 1.0, 2.0):
            got = expected_isolated(UD, rho, b, Metric.TORUS)
            worst = max(worst, abs(got - math.exp(-b)))
    dt = time.perf_counter() - t0
    _report(1, worst < 1e-6 and dt < 1.0,
            f"max deviation from e^-b is {worst:.3g}, {dt:.3f}s")


def test_criterion_2_mean_isolated(torus_sweep):
    summary, _, elapsed = torus_sweep
    cell = summary.cells[1]
    assert cell.rho == 2000.0
    ok = abs(cell.mean_isolated - 1.0) <= 0.06 and elapsed < 300.0
    _report(2, ok, f"mean isolated {cell.mean_isolated:.4f} "
                   f"(target 1.00 +/- 0.06), campaign {elapsed:.0f}s")


def test_criterion_3_tv_convergence(torus_sweep):
    summary, _, _ = torus_sweep
    tv500 = summary.cells[0].tv_to_poisson
    tv2000 = summary.cells[1].tv_to_poisson
    ok = tv2000 <= 0.05 and tv2000 < tv500
    _report(3, ok, f"tv(2000) = {tv2000:.4f} <= 0.05 and < tv(500) = {tv500:.4f}")


def test_criterion_4_prob_no_isolated(dense_torus):
    summary, _ = dense_torus
    p0 = summary.cells[0].p_no_isolated
    ok = abs(p0 - math.exp(-1.0)) <= 0.025
    _report(4, ok, f"P(W=0) = {p0:.4f} vs e^-1 = {math.exp(-1.0):.4f} +/- 0.025")


def test_criterion_5_boundary_excess(coupled_sweep):
    summary, _ = coupled_sweep
    lo, hi = summary.cells  # rho = 500, then 4000
    decreasing = hi.mean_boundary < lo.mean_boundary
    in_ci = (abs(lo.mean_boundary - lo.theory_boundary_excess) <= lo.ci99_boundary
             and abs(hi.mean_boundary - hi.theory_boundary_excess) <= hi.ci99_boundary)
    _report(5, decreasing and in_ci,
            f"boundary mean at 500: {lo.mean_boundary:.4f} vs theory "
            f"{lo.theory_boundary_excess:.4f} +/- {lo.ci99_boundary:.4f}; "
            f"at 4000: {hi.mean_boundary:.4f} vs {hi.theory_boundary_excess:.4f} "
            f"+/- {hi.ci99_boundary:.4f}")


def test_criterion_6_square_isolation_sweep(square_sweep):
    # The b = +3 leg is a real finite-size gap, kept deliberately: the
    # square-metric mean isolated count at rho = 4000 sits near 0.33
    # rather than the limiting e^{-3} ~ 0.05, because the boundary layer
    # shrinks only like 1/sqrt(log rho). Roughly a quarter of trials still
    # hold an isolated node, so the <= 0.10 bound is out of reach at desk
    # scale; the quadrature prediction agrees with the simulation, the
    # limit does not.
    summary, _ = square_sweep
    low, high = summary.cells  # b = -3, then +3
    frac_low = 1.0 - low.p_no_isolated
    frac_high = 1.0 - high.p_no_isolated
    ok = frac_low >= 0.95 and frac_high <= 0.10
    _report(6, ok,
            f"frac with >= 1 isolated: {frac_low:.4f} at b=-3 (need >= 0.95), "
            f"{frac_high:.4f} at b=+3 (need <= 0.10)")


def test_criterion_7_mean_degree(dense_torus):
    _, rows = dense_torus
    target = math.log(4000.0)
    mean = float(np.mean([r.mean_degree for r in rows[:1000]]))
    ok = abs(mean - target) <= 0.02 * target
    _report(7, ok, f"mean degree {mean:.4f} vs log rho = {target:.4f} +/- 2%")


def test_criterion_8_dependence_terms():
    chen_stein_terms.cache_clear()
    t0 = time.perf_counter()
    seq = [chen_stein_terms(UD, rho, 0.0, ChenSteinParams(epsilon=0.25))
           for rho in (1e3, 1e4, 1e5, 1e6)]
    dt = time.perf_counter() - t0
    b1s = [s[0] for s in seq]
    b2s = [s[1] for s in seq]
    decreasing = (all(x > y for x, y in zip(b1s, b1s[1:]))
                  and all(x > y for x, y in zip(b2s, b2s[1:])))
    pinned = abs(b1s[1] - 0.02815) <= 1e-4
    _report(8, decreasing and pinned and dt < 30.0,
            f"b1: {b1s[0]:.4g} > {b1s[1]:.4g} > {b1s[2]:.4g} > {b1s[3]:.4g}, "
            f"b2: {b2s[0]:.4g} > {b2s[1]:.4g} > {b2s[2]:.4g} > {b2s[3]:.4g}, "
            f"b1(1e4) = {b1s[1]:.5f}, {dt:.1f}s")


def test_criterion_9_gaussian_kernel(gaussian_torus):
    summary, _ = gaussian_torus
    cell = summary.cells[0]
    target = expected_isolated(GAUSS, 2000.0, 0.0, Metric.TORUS)
    ok = abs(cell.mean_isolated - target) <= cell.ci99_isolated
    _report(9, ok, f"mean isolated {cell.mean_isolated:.4f} vs quadrature "
                   f"{target:.6f} +/- {cell.ci99_isolated:.4f} (99% CI)")


def test_criterion_10_property_suites(tmp_path):
    cases = 10_000
    rng = np.random.default_rng(202408)
    try:
        # metric axioms, vectorized over all cases at once
        pts = rng.random((cases, 6)) - 0.5
        ax, ay, bx, by, cx, cy = pts.T
        for metric in (Metric.TORUS, Metric.SQUARE):
            d_ab = distance_arrays(metric, ax, ay, bx, by)
            d_ba = distance_arrays(metric, bx, by, ax, ay)
            d_aa = distance_arrays(metric, ax, ay, ax, ay)
            d_ac = distance_arrays(metric, ax, ay, cx, cy)
            d_cb = distance_arrays(metric, cx, cy, bx, by)
            assert np.array_equal(d_ab, d_ba)
            assert np.all(d_aa == 0.0)
            assert np.all(d_ab >= 0.0)
            assert np.all(d_ab <= d_ac + d_cb + 1e-12)
        d_tor = distance_arrays(Metric.TORUS, ax, ay, bx, by)
        d_sq = distance_arrays(Metric.SQUARE, ax, ay, bx, by)
        assert np.all(d_tor <= d_sq + 1e-15)
        assert np.all(d_tor <= math.sqrt(0.5) + 1e-15)
        metric_cases = cases

        # bucket-grid edges vs exhaustive pair scan on small instances
        table = table_model([(0.0, 1.0), (1.0, 0.6), (2.0, 0.0)])
        models = (UD, table)
        edge_cases = 0
        for k in range(cases):
            model = models[k % 2]
            metric = (Metric.TORUS, Metric.SQUARE)[(k // 2) % 2]
            rho = 30.0 + (k % 97) * 1.2
            b = 0.1 + (k % 7) * 0.1
            p = SampleParams(rho, b, model, metric, 1000 + k, k % 5)
            points = sample_points(p)
            assert len(points) <= 300
            grid = build_graph(p, points).edges
            exact = build_graph(p, points, exact=True).edges
            assert np.array_equal(grid, exact)
            edge_cases += 1

        # union-find components vs breadth-first search
        base = SampleParams(50.0, 0.0, UD, Metric.TORUS, 1, 0)
        comp_cases = 0
        for k in range(cases):
            n = int(rng.integers(0, 50))
            m = int(rng.integers(0, 2 * n + 1)) if n >= 2 else 0
            if m:
                i = rng.integers(0, n, size=m)
                j = rng.integers(0, n, size=m)
                keep = i != j
                lo = np.minimum(i, j)[keep]
                hi = np.maximum(i, j)[keep]
                pairs = sorted({(int(a), int(c)) for a, c in zip(lo, hi)})
            else:
                pairs = []
            edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
            s = NetworkSample(base, np.zeros((n, 2)), edges)
            assert components(s) == bfs_components(n, pairs)
            comp_cases += 1

        # coupling: square edges nest in torus edges and the isolation
        # count splits exactly, on every trial
        coup_cases = 0
        for k in range(cases):
            p = SampleParams(80.0, 0.0, UD, Metric.TORUS,
                             9000 + k // 50, k % 50)
            c = couple_torus_to_square(p)
            t_set = set(map(tuple, c.torus_edges))
            s_set = set(map(tuple, c.square_edges))
            r_set = set(map(tuple, c.removed_edges))
            assert s_set <= t_set and not (s_set & r_set)
            assert (s_set | r_set) == t_set
            deg_t = c.torus_sample().degrees()
            deg_s = c.square_sample().degrees()
            assert np.all(deg_s <= deg_t)
            w_t = isolated_count(c.torus_sample())
            w_s = isolated_count(c.square_sample())
            w_e = int(np.count_nonzero((deg_s == 0) & (deg_t > 0)))
            assert w_s == w_t + w_e
            rec = coupled_statistics(c)
            assert (rec.isolated_torus, rec.isolated_square,
                    rec.isolated_boundary) == (w_t, w_s, w_e)
            coup_cases += 1

        # campaign reruns are byte-identical
        pool = [(60.0, 0.0), (60.0, 0.5), (120.0, 0.0), (120.0, 0.5),
                (200.0, 0.0), (200.0, 0.5)]
        metrics = ("torus", "square", "coupled")
        det_cases = 0
        for k in range(cases):
            rho, b = pool[k % len(pool)]
            cfg = CampaignConfig(model=UD, rho_list=(rho,), b_list=(b,),
                                 metric=metrics[k % 3], trials=1 + k % 3,
                                 master_seed=int(rng.integers(2**32)),
                                 epsilon=0.25, output_path="x.csv",
                                 format=("csv", "json")[k % 2])
            texts = []
            for _ in range(2):
                summary, rows, _ = run_campaign(cfg)
                if cfg.format == "csv":
                    texts.append(format_trials_csv(rows)
                                 + format_summary_csv(summary))
                else:
                    texts.append(format_trials_json(rows)
                                 + format_summary_json(summary))
            assert texts[0] == texts[1]
            det_cases += 1

        # and across processes with different worker counts
        sub_cases = 0
        for name, metric, fmt in (("t", "torus", "csv"),
                                  ("c", "coupled", "csv"),
                                  ("j", "torus", "json")):
            cfg_path = tmp_path / f"{name}.json"
            out = tmp_path / f"{name}_out.{fmt}"
            cfg_path.write_text(json.dumps({
                "model": {"kind": "unit_disk"}, "rho_list": [100.0],
                "b_list": [0.0], "metric": metric, "trials": 6,
                "master_seed": SEED, "output_path": str(out), "format": fmt,
            }))
            blobs = []
            for workers in ("1", "3"):
                res = subprocess.run(
                    [sys.executable, "-m", "rcmsim.cli", "simulate",
                     str(cfg_path), "--workers", workers],
                    capture_output=True, text=True)
                assert res.returncode == 0, res.stderr
                summary_file = out.with_name(out.stem + "_summary" + out.suffix)
                blobs.append(out.read_bytes() + summary_file.read_bytes())
                sub_cases += 1
            assert blobs[0] == blobs[1]
    except AssertionError as e:
        _line(10, False, str(e).splitlines()[0][:140])
        raise

    _report(10, True,
            f"metric axioms {metric_cases}, grid-vs-exact {edge_cases}, "
            f"components {comp_cases}, coupling splits {coup_cases}, "
            f"rerun determinism {det_cases} + {sub_cases} cross-process")
