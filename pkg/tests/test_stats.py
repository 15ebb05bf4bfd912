import numpy as np
import pytest
import scipy.special
import scipy.stats

from tsrm_lab import stats


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(2024)


def test_ks_uniform_matches_scipy(rng):
    for n in (10, 100, 5000):
        u = rng.uniform(size=n)
        ours = stats.ks_uniform(u)
        ref = scipy.stats.kstest(u, "uniform").statistic
        assert ours == pytest.approx(ref, abs=1e-12)


def test_ks_uniform_rejects_empty():
    with pytest.raises(ValueError):
        stats.ks_uniform(np.array([]))


def test_ks_two_sample_matches_scipy(rng):
    a = rng.normal(size=400)
    b = rng.normal(0.3, size=700)
    ours = stats.ks_two_sample(a, b)
    ref = scipy.stats.ks_2samp(a, b, method="asymp").statistic
    assert ours == pytest.approx(ref, abs=1e-12)
    with pytest.raises(ValueError):
        stats.ks_two_sample(a, np.array([]))


def test_ks_two_sample_handles_ties():
    a = np.array([0.0, 0.0, 1.0, 1.0])
    b = np.array([0.0, 1.0, 1.0, 1.0])
    ref = scipy.stats.ks_2samp(a, b, method="asymp").statistic
    assert stats.ks_two_sample(a, b) == pytest.approx(ref, abs=1e-12)


def test_kolmogorov_sf_matches_scipy():
    for lam in (0.3, 0.5, 0.8, 1.0, 1.5, 2.0):
        assert stats.kolmogorov_sf(lam) == pytest.approx(
            scipy.special.kolmogorov(lam), rel=1e-12)
    assert stats.kolmogorov_sf(0.0) == 1.0
    assert stats.kolmogorov_sf(-1.0) == 1.0
    assert stats.kolmogorov_sf(10.0) < 1e-80


def test_ks_pvalues_are_calibrated(rng):
    # under the null the p-value itself should look uniform
    pvals = []
    for _ in range(200):
        u = rng.uniform(size=500)
        pvals.append(stats.ks_uniform_pvalue(stats.ks_uniform(u), 500))
    pvals = np.asarray(pvals)
    assert 0.35 < np.mean(pvals) < 0.65
    assert np.mean(pvals < 0.05) < 0.12


def test_two_sample_pvalue_tracks_effective_size(rng):
    a = rng.uniform(size=800)
    b = rng.uniform(size=800)
    d = stats.ks_two_sample(a, b)
    p = stats.ks_two_sample_pvalue(d, 800, 800)
    ref = scipy.stats.ks_2samp(a, b, method="asymp").pvalue
    assert p == pytest.approx(ref, abs=0.02)


def test_gamma_p_matches_scipy():
    for a in (0.5, 1.0, 2.5, 9.5, 40.0):
        for x in (1e-6, 0.3, 1.0, 4.0, 25.0, 80.0):
            assert stats._gamma_p(a, x) == pytest.approx(
                scipy.special.gammainc(a, x), rel=1e-12, abs=1e-300)
    assert stats._gamma_p(3.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        stats._gamma_p(-1.0, 1.0)
    with pytest.raises(ValueError):
        stats._gamma_p(1.0, -1.0)


def test_gamma_q_matches_scipy_in_the_tail():
    for a in (0.5, 2.5, 9.5, 40.0):
        for x in (0.3, 4.0, 25.0, 200.0):
            assert stats._gamma_q(a, x) == pytest.approx(
                scipy.special.gammaincc(a, x), rel=1e-12, abs=1e-300)
    assert stats._gamma_q(3.0, 0.0) == 1.0


def test_chi_square_sf_matches_scipy():
    for df in (1, 5, 19, 60):
        for x in (0.5, 4.0, 18.0, 45.0, 120.0):
            assert stats.chi_square_sf(x, df) == pytest.approx(
                scipy.stats.chi2.sf(x, df), rel=1e-10, abs=1e-280)
    assert stats.chi_square_sf(0.0, 5) == 1.0
    with pytest.raises(ValueError):
        stats.chi_square_sf(1.0, 0)


def test_chi_square_stat_frozen():
    obs = np.array([12.0, 8.0, 10.0])
    exp = np.array([10.0, 10.0, 10.0])
    assert stats.chi_square_stat(obs, exp) == pytest.approx(0.8)
    with pytest.raises(ValueError):
        stats.chi_square_stat(obs, exp[:2])
    with pytest.raises(ValueError):
        stats.chi_square_stat(obs, np.array([10.0, 0.0, 10.0]))
