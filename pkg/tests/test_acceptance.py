"""Acceptance gate: one test per headline requirement, in order.

Heavy Monte Carlo configurations are shared through the row cache in
``tsrm_lab.montecarlo``, so the hidden-probability and scaling tests
reuse the same sampled batches.  Two historical claims about the
position law are kept as strict xfails right next to the corrected
tests that replace them; the package README walks through why.
"""

import time
from collections import Counter

import numpy as np
import pytest

from tsrm_lab import analytics, kernels, montecarlo, oracle, walk, web
from tsrm_lab.cli import main as cli_main
from tsrm_lab.montecarlo import ExperimentConfig
from tsrm_lab.profiles import event_weight, interval

HEAVY_SEED = 42
HEAVY_SAMPLES = 100000
UNIFORMITY_LADDER = (100.0, 1000.0, 10000.0)
SCALING_LADDER = (1000.0, 10000.0, 100000.0)
FIXED_K_SAMPLES = 1000000


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    # compile every jit kernel outside the timed sections
    kernels.audit_trace(1, 0, 16)
    walk.run(8, 1, backend="kernel")
    web.explore_run(8, 1)
    kernels.sample_batch(1, 50.0, 0, 4, 10000, False)
    kernels.fixed_k_batch(1, 1, 0, 4)


@pytest.fixture(scope="module")
def law6():
    return oracle.enumerate_law(6)


@pytest.fixture(scope="module")
def fixed_k_counts():
    """Observed (x, profile signature) counts at one, two, three coins."""
    out = {}
    for k in (1, 2, 3):
        rows = kernels.fixed_k_batch(HEAVY_SEED, k, 0, FIXED_K_SAMPLES)
        out[k] = Counter((int(r[0]), int(r[3])) for r in rows)
    return out


def test_01_walk_identities_audit():
    """Coin-count identity, slope law, and position reconstruction hold
    on every step of 100 independent million-scale walks."""
    t0 = time.perf_counter()
    for seed in range(1, 101):
        bad = kernels.audit_trace(seed, 0, 10000)
        assert tuple(int(v) for v in bad) == (0, 0, 0), f"seed {seed}"
    assert time.perf_counter() - t0 < 10.0


def test_02_maze_coupling_exact():
    """The rectangle-maze explorer and the addressed-coin walk are the
    same process: traces agree step for step on 100 seeds."""
    t0 = time.perf_counter()
    for seed in range(1, 101):
        maze = web.explore_run(10000, seed)
        ref = walk.run(10000, seed, addressed=True, backend="kernel")
        assert np.array_equal(maze.positions, ref.positions), f"seed {seed}"
        assert np.array_equal(maze.heights, ref.heights)
        assert np.array_equal(maze.coin_flags, ref.coin_flags)
    assert time.perf_counter() - t0 < 30.0


@pytest.mark.xfail(strict=True, reason=(
    "the single-weight formula undercounts endpoint atoms: positions "
    "where the modified profile returns to zero carry twice the flat "
    "weight, and the origin atom of a non-flat profile carries none"))
def test_03_literal_flat_weight_everywhere(law6):
    for (x, f), p in law6.entries.items():
        assert p == event_weight(f), (x, f)


def test_03_position_law_exact(law6):
    """Exact finite-coin law: both enumeration routes agree atom for
    atom, every level has mass one, and interior positions of one
    profile share one probability."""
    t0 = time.perf_counter()
    assert len(law6.entries) == 116
    for k in range(7):
        assert law6.level_mass(k) == 1
        assert oracle.admissible_pairs(k) == law6.level(k)
    by_profile = {}
    for (x, f), p in law6.entries.items():
        assert x in interval(f)
        if f.value(x) >= 1:
            by_profile.setdefault(f, set()).add(p)
    for f, probs in by_profile.items():
        assert probs == {event_weight(f)}
    assert time.perf_counter() - t0 < 60.0


@pytest.mark.xfail(strict=True, reason=(
    "conditioned on the coin count alone, the position is not uniform "
    "over the admissible interval: after one coin the walker sits at "
    "the fresh endpoint, never at the interior or the origin"))
def test_04_literal_uniform_over_interval(law6, fixed_k_counts):
    sig = {f: oracle.profile_signature(f) for (_, f) in law6.level(1)}
    counts = fixed_k_counts[1]
    for f, s in sig.items():
        itv = interval(f)
        total = sum(counts.get((x, s), 0) for x in itv)
        expect = total / len(itv)
        for x in itv:
            dev = abs(counts.get((x, s), 0) - expect)
            assert dev <= 4.0 * np.sqrt(expect), (x, f)


def test_04_conditional_law_and_rank_uniformity(law6, fixed_k_counts):
    """Sampled frequencies match the exact conditional law within four
    sigma atom by atom, and the interval-rank statistic approaches
    uniformity along a rising ladder of level parameters."""
    t0 = time.perf_counter()
    for k in (1, 2, 3):
        counts = fixed_k_counts[k]
        keyed = {(x, oracle.profile_signature(f)): p
                 for (x, f), p in law6.level(k).items()}
        assert set(counts) <= set(keyed), "unexpected observation"
        n = FIXED_K_SAMPLES
        for key, p in keyed.items():
            mean = n * float(p)
            sigma = np.sqrt(n * float(p) * (1.0 - float(p)))
            assert abs(counts.get(key, 0) - mean) <= 4.0 * sigma, key
    config = ExperimentConfig(seed=HEAVY_SEED, samples=HEAVY_SAMPLES,
                              a_ladder=UNIFORMITY_LADDER)
    report = montecarlo.uniformity_test(config)
    assert report.checks["ks_strictly_decreasing"]
    assert report.checks["mirror_exact_pairing"]
    assert report.checks["mirror_independent_consistent"]
    assert report.passed, report.checks
    assert time.perf_counter() - t0 < 600.0


def test_05a_limit_probability_closed_forms():
    """The no-internal-zero limit probability evaluates near 0.2251 and
    its two closed forms agree to near machine precision."""
    form_gamma, form_airy = analytics.hidden_probability_forms()
    assert abs(form_gamma - 0.2251) <= 1e-4
    assert abs(form_gamma - form_airy) <= 1e-12


def test_05b_quadrature_identity():
    """The double-product integral identity closes to 1e-8."""
    out = analytics.quadrature_check()
    assert out["err_two_uv"] <= 1e-8
    assert out["passed"] is True


def test_05c_limit_probability_monte_carlo():
    """Sampled no-internal-zero frequency at the top level parameter
    sits within max(3 sigma, 0.01) of the closed form and the bias
    shrinks as the ladder climbs."""
    t0 = time.perf_counter()
    config = ExperimentConfig(seed=HEAVY_SEED, samples=HEAVY_SAMPLES,
                              a_ladder=SCALING_LADDER)
    report = montecarlo.hidden_probability_mc(config)
    assert report.checks["top_level_within_tolerance"]
    assert report.checks["bias_shrinks_along_ladder"]
    assert report.passed, report.checks
    assert time.perf_counter() - t0 < 1800.0


def test_06_scaled_profile_equation():
    """The scaled-profile solution satisfies its differential equation
    to 1e-9, its square integrates to the closed form within 1e-8, and
    the boundary slope matches the gamma closed form to 1e-12."""
    t0 = time.perf_counter()
    assert analytics.ode_residual_max(0.0, 10.0, 201, 0.02) <= 1e-9
    out = analytics.quadrature_check()
    assert out["err_u_squared"] <= 1e-8
    _, up0 = analytics.airy_u(0.0)
    assert abs(up0 - analytics.u_prime0_exact()) <= 1e-12
    assert time.perf_counter() - t0 < 1.0


def test_07_scaling_ladder():
    """Rescaled position distributions stabilize: consecutive-level KS
    distances shrink, the top level is mirror symmetric, and step count
    and profile area normalize to the level parameter."""
    t0 = time.perf_counter()
    config = ExperimentConfig(seed=HEAVY_SEED, samples=HEAVY_SAMPLES,
                              a_ladder=SCALING_LADDER)
    report = montecarlo.scaling_diagnostics(config)
    assert report.checks["position_ks_pairwise_decreasing"]
    assert report.checks["mirror_symmetric"]
    assert report.checks["steps_normalization_near_one"]
    assert report.checks["area_normalization_near_one"]
    assert report.passed, report.checks
    assert time.perf_counter() - t0 < 1200.0


def test_08_reports_are_reproducible(tmp_path):
    """Re-running any experiment with the same inputs writes
    byte-identical report files."""
    runs = {
        "uniformity": ("experiment", "uniformity", "--A-ladder", "50,200",
                       "--samples", "1500", "--seed", "42"),
        "oracle": ("experiment", "oracle", "--max-coins", "4", "--A", "8"),
        "airy": ("experiment", "airy-check",),
    }
    for name, argv in runs.items():
        a = tmp_path / name / "a"
        b = tmp_path / name / "b"
        montecarlo._ROW_CACHE.clear()
        assert cli_main([*argv, "--out", str(a)]) == 0
        montecarlo._ROW_CACHE.clear()
        assert cli_main([*argv, "--out", str(b)]) == 0
        files_a = sorted(p.name for p in a.iterdir())
        files_b = sorted(p.name for p in b.iterdir())
        assert files_a == files_b and files_a
        for fname in files_a:
            assert (a / fname).read_bytes() == (b / fname).read_bytes(), fname
