"""Acceptance gate: every criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS line
per criterion.
"""

import hashlib
import time

import numpy as np
import pytest

from pesc.cli import main
from pesc.core import box_kernel, convolve_at, convolve_full, lift, lifted_distance
from pesc.costs import make_cost
from pesc.data_consistency import MeasurementModel, project_row
from pesc.epigraph import EpigraphConfig, project_epigraph, project_level_set, project_supporting_hyperplane
from pesc.formats import write_kernel, write_pgm
from pesc.metrics import bsnr
from pesc.oracle import oracle_cost_check, oracle_epigraph_projection, oracle_objective
from pesc.solver import SolverConfig, deconvolve
from pesc.synth import DegradationSpec, calibrate_sigma, degrade

from conftest import piecewise_constant, random_kernel

EXACT = EpigraphConfig(eps=1e-10, max_iters=500)


def _report(num, text):
    print(f"PASS criterion {num}: {text}")


def acceptance_scene():
    """The fixed synthetic scene: 64x64 piecewise-constant, 3x3 box blur."""
    return piecewise_constant(64, seed=7, blocks=6), box_kernel(3)


def test_criterion_1_oracle_equivalence():
    start = time.time()
    rng = np.random.default_rng(42)
    worst_dist = 0.0
    worst_obj = 0.0
    for kind in ("tv", "l1", "l2"):
        f = make_cost(kind)
        for _ in range(100):
            n = int(rng.integers(1, 6))
            v = rng.uniform(-1, 1, n) * 2
            r = project_epigraph(v, f, EXACT)
            w_o, y_o = oracle_epigraph_projection(v, f)
            dist = np.sqrt(np.sum((r.w_star - w_o) ** 2) + (r.y_star - y_o) ** 2)
            obj_excess = oracle_objective(v, r.w_star, f) - oracle_objective(v, w_o, f)
            worst_dist = max(worst_dist, dist)
            worst_obj = max(worst_obj, obj_excess)
            assert dist <= 1e-3
            assert obj_excess <= 1e-4
    elapsed = time.time() - start
    assert elapsed < 60
    _report(1, f"300 projections agree with the oracle "
               f"(max distance {worst_dist:.2e}, max objective excess {worst_obj:.2e}, "
               f"{elapsed:.1f}s)")


def test_criterion_2_scalar_analytic_case():
    r = project_epigraph(np.array([2.0]), make_cost("l1"), EXACT)
    err = np.sqrt((r.w_star[0] - 1.0) ** 2 + (r.y_star - 1.0) ** 2)
    assert err <= 1e-6
    _report(2, f"projection of [2] under l1 returns ([1], 1) to {err:.2e}")


def test_criterion_3_kaczmarz_exactness_and_fejer():
    rng = np.random.default_rng(1234)
    for _ in range(50):
        w = rng.uniform(0, 255, (8, 8))
        k = random_kernel(rng, 3)
        z = convolve_full(w, k)
        m = MeasurementModel(z, k)
        v = rng.uniform(0, 255, (8, 8))
        for y in range(8):
            for x in range(8):
                dist_before = np.linalg.norm(v - w)
                v = project_row(v, m, (x, y))
                resid = z[y, x] - convolve_at(v, k, x, y)
                assert abs(resid) <= 1e-9 * (1 + abs(z[y, x]))
                assert np.linalg.norm(v - w) <= dist_before + 1e-9
    _report(3, "row residuals <= 1e-9*(1+|z_i|); distance to the truth "
               "never grew across 50 noiseless 8x8 sweeps")


def test_criterion_4_distance_trace_shape():
    truth = piecewise_constant(32, seed=3, blocks=5)
    rng = np.random.default_rng(5)
    noisy = truth + 10.0 * rng.standard_normal(truth.shape)
    f = make_cost("tv")
    r = project_epigraph(noisy, f, EpigraphConfig(eps=1e-3, max_iters=200, exact=False))
    d = np.asarray(r.distances)
    increases = np.where(np.diff(d) > 0)[0]
    if increases.size:
        assert r.refined
        assert np.all(np.diff(d[: increases[0] + 1]) <= 0)
    final = np.sqrt(np.sum((noisy - r.w_star) ** 2) + f.eval(r.w_star) ** 2)
    assert final <= d.min() + 1e-3
    _report(4, f"distance record fell monotonically until the refinement trigger "
               f"(at step {increases[0] + 2 if increases.size else 'none'}); "
               f"final distance {final:.4f} <= min recorded {d.min():.4f} + 1e-3")


def test_criterion_5_isnr_trace_shape():
    start = time.time()
    truth, k = acceptance_scene()
    z, _ = degrade(truth, DegradationSpec(kernel=k, target_bsnr_db=40.0, seed=11))
    _, trace = deconvolve(z, k, SolverConfig(outer_iters=10), ground_truth=truth)
    series = [float(s) for s in trace.isnr_series()]
    peak = int(np.argmax(series)) + 1
    assert peak > 1
    assert series[-1] > 0.0
    elapsed = time.time() - start
    assert elapsed < 60
    _report(5, f"ISNR peaks at outer iteration {peak} (> 1) and ends at "
               f"{series[-1]:.2f} dB > 0 ({elapsed:.1f}s)")


def test_criterion_6_bsnr_round_trip():
    rng = np.random.default_rng(8)
    z = rng.uniform(0, 255, (32, 32))
    for target in (30.0, 35.0, 40.0, 45.0, 50.0):
        sigma = calibrate_sigma(z, target)
        assert bsnr(z, sigma, z.size) == pytest.approx(target, abs=1e-9)
    truth = piecewise_constant(128, seed=4)
    k = box_kernel(3)
    z_tilde = convolve_full(truth, k)
    worst = 0.0
    for target in (30.0, 35.0, 40.0, 45.0, 50.0):
        z_noisy, _ = degrade(truth, DegradationSpec(kernel=k, target_bsnr_db=target, seed=6))
        noise = np.sum((z_noisy - z_tilde) ** 2)
        signal = np.sum((z_tilde - z_tilde.mean()) ** 2)
        empirical = 10 * np.log10(signal / noise)
        worst = max(worst, abs(empirical - target))
        assert empirical == pytest.approx(target, abs=0.2)
    _report(6, f"analytic round-trip exact to 1e-9 dB on the 30-50 grid; "
               f"empirical BSNR within {worst:.3f} dB on 128x128")


def test_criterion_7_monotone_bsnr_to_isnr_trend():
    truth, k = acceptance_scene()
    finals = []
    for target in (30.0, 40.0, 50.0):
        z, _ = degrade(truth, DegradationSpec(kernel=k, target_bsnr_db=target, seed=11))
        _, trace = deconvolve(z, k, SolverConfig(outer_iters=10), ground_truth=truth)
        finals.append(float(trace.final_isnr()))
    assert finals[0] <= finals[1] <= finals[2]
    _report(7, "final ISNR non-decreasing over BSNR 30/40/50 dB: "
               + " <= ".join(f"{v:.2f}" for v in finals))


def test_criterion_8_property_suites(tmp_path):
    # subgradient inequality
    for kind in ("tv", "l1", "l2"):
        report = oracle_cost_check(make_cost(kind), samples=1000, seed=77)
        assert report.max_violation <= 1e-9
    # TV homogeneity and zero on constants
    tv = make_cost("tv")
    rng = np.random.default_rng(99)
    for _ in range(100):
        w = rng.uniform(-2, 2, (5, 5))
        c = rng.uniform(0, 4)
        assert tv.eval(c * w) == pytest.approx(c * tv.eval(w), rel=1e-10, abs=1e-12)
    assert tv.eval(np.full((6, 6), 3.14)) == 0.0
    # projection idempotence and feasibility
    f = make_cost("l1")
    v0 = lift(np.array([1.0]), 1.0)
    again = project_supporting_hyperplane(v0, np.array([2.0]), f)
    assert lifted_distance(v0, again) <= 1e-12
    assert project_level_set(lift(np.array([0.5]), -1.0), 0.0).y == -1.0
    for _ in range(25):
        v = rng.uniform(-2, 2, 4)
        r = project_epigraph(v, tv, EXACT)
        assert r.y_star >= tv.eval(r.w_star) - 1e-6 * (1 + tv.eval(r.w_star))
        fixed = project_epigraph(r.w_star, tv, EXACT) if tv.eval(r.w_star) == 0 else None
        if fixed is not None:
            assert np.array_equal(fixed.w_star, r.w_star)
    # CLI determinism by file hash
    clean = piecewise_constant(16, seed=31)
    clean_path = tmp_path / "clean.pgm"
    write_pgm(clean_path, clean)
    kernel_path = tmp_path / "k.txt"
    write_kernel(kernel_path, box_kernel(3))
    digests = []
    for tag in ("one", "two"):
        out = tmp_path / f"{tag}.pgm"
        side = tmp_path / f"{tag}.txt"
        assert main(["synth", str(clean_path), "--kernel", str(kernel_path), "--bsnr", "40",
                     "--seed", "13", "--out", str(out), "--sigma-out", str(side)]) == 0
        restored = tmp_path / f"{tag}_restored.pgm"
        assert main(["deconv", str(out), "--kernel", str(kernel_path), "-K", "3",
                     "--out", str(restored)]) == 0
        digests.append(
            (hashlib.sha256(out.read_bytes()).hexdigest(),
             hashlib.sha256(restored.read_bytes()).hexdigest())
        )
    assert digests[0] == digests[1]
    _report(8, "subgradient inequality, homogeneity, idempotence/feasibility, "
               "and CLI hash determinism all hold")
