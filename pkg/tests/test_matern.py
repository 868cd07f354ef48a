import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.spatial import cKDTree
from scipy.stats import chi2

from packbound.geometry import alpha2
from packbound.matern import (
    MaternConfig,
    MaternResult,
    _ghost_accept,
    _rsa_accept,
    arrivals,
    centers_to_csv,
    decorrelation_profile,
    g2_matern,
    g2_matern_limit,
    hist_to_csv,
    phi_of_t,
    saturation_time,
    simulate,
)


def test_phi_of_t():
    assert phi_of_t(2, 0.0) == 0.0
    assert_allclose(phi_of_t(3, 1e6), 0.125, rtol=1e-15)
    # quadratic truncation error at small t
    v = math.pi
    t = 1e-4
    assert abs(phi_of_t(2, t) - (v * t / 4.0 - v**2 * t**2 / 8.0)) < v**3 * t**3
    with pytest.raises(ValueError):
        phi_of_t(2, -1.0)


def test_saturation_time():
    t = saturation_time(1)
    assert_allclose(phi_of_t(1, t), 0.5 * (1.0 - 1e-4), rtol=1e-12)
    with pytest.raises(ValueError):
        saturation_time(2, deficit=0.0)


def test_g2_finite_time():
    assert g2_matern(2, 0.5, 3.0) == 0.0
    assert g2_matern(3, 2.0, 0.7) == 1.0
    assert g2_matern(3, 2.8, 123.0) == 1.0
    # long-time value approaches the saturated curve
    assert_allclose(g2_matern(2, 1.5, 1e5), g2_matern_limit(2, 1.5), rtol=1e-12)
    assert_allclose(g2_matern(1, 1.0, 1e7), 4.0 / 3.0, rtol=1e-10)
    # low coverage looks ideal-gas beyond contact
    assert_allclose(g2_matern(2, 1.3, 1e-4), 1.0, atol=1e-3)
    with pytest.raises(ValueError):
        g2_matern(2, 1.5, 0.0)


def test_g2_limit():
    assert_allclose(g2_matern_limit(1, 1.0), 4.0 / 3.0, rtol=1e-15)
    assert g2_matern_limit(4, 2.0) == 1.0
    assert g2_matern_limit(3, 0.2) == 0.0
    expected = 2.0 / (2.0 - alpha2(5, 1.2, 1.0))
    assert_allclose(g2_matern_limit(5, 1.2), expected, rtol=1e-14)


def test_config_validation():
    good = dict(d=2, L=30.0, T=5.0, kappa=1, seed=3, bins=50)
    MaternConfig(**good)
    for bad in (
        dict(good, d=4),
        dict(good, L=2.0),
        dict(good, T=0.0),
        dict(good, kappa=2),
        dict(good, bins=10),
        dict(good, seed=-1),
    ):
        with pytest.raises(ValueError):
            MaternConfig(**bad)


def test_simulated_configuration_is_packing():
    res = simulate(MaternConfig(d=2, L=20.0, T=30.0, kappa=1, seed=42))
    acc = res.accepted_centers
    assert len(acc) > 10
    tree = cKDTree(acc, boxsize=20.0)
    dmin, _ = tree.query(acc, k=2)
    assert float(dmin[:, 1].min()) >= 1.0 - 1e-12
    assert res.phi_hat <= 1.0
    assert res.ghost_count == len(arrivals(42, 2, 20.0, 30.0)[0]) - len(acc)


def test_result_rejects_overlapping_centers():
    base = simulate(MaternConfig(d=1, L=10.0, T=1.0, kappa=1, seed=0))
    bad = np.array([[1.0], [1.3]])
    with pytest.raises(ValueError):
        MaternResult(
            config=base.config,
            accepted_centers=bad,
            ghost_count=0,
            phi_hat=0.1,
            phi_analytic=0.1,
            bin_centers=base.bin_centers,
            pair_counts=base.pair_counts,
            pair_norm=base.pair_norm,
            g2_hat=base.g2_hat,
            g2_stderr=base.g2_stderr,
            g2_analytic=base.g2_analytic,
        )


def test_ghost_acceptance_order_independent():
    pos, times = arrivals(9, 2, 25.0, 8.0)
    acc = pos[_ghost_accept(pos, times, 25.0)]
    rng = np.random.default_rng(123)
    perm = rng.permutation(len(pos))
    acc_shuf = pos[perm][_ghost_accept(pos[perm], times[perm], 25.0)]
    a = set(map(tuple, np.round(acc, 10)))
    b = set(map(tuple, np.round(acc_shuf, 10)))
    assert a == b


def test_coupled_runs_are_monotone_in_T():
    sets = []
    phis = []
    for T in (1.0, 3.0, 9.0):
        res = simulate(MaternConfig(d=1, L=80.0, T=T, kappa=1, seed=17))
        sets.append(set(map(tuple, np.round(res.accepted_centers, 10))))
        phis.append(res.phi_hat)
    assert sets[0] <= sets[1] <= sets[2]
    assert phis[0] <= phis[1] <= phis[2]


def test_ghost_accepted_is_subset_of_rsa():
    # with identical arrivals, anything the ghost rule keeps survives RSA too
    pos, times = arrivals(11, 1, 100.0, 5.0)
    ghost = pos[_ghost_accept(pos, times, 100.0)]
    rsa = _rsa_accept(pos, times, 100.0)
    gs = set(map(tuple, np.round(ghost, 10)))
    rs = set(map(tuple, np.round(rsa, 10)))
    assert gs <= rs
    assert len(rs) > len(gs)


def test_density_estimate_within_three_se():
    res = simulate(MaternConfig(d=2, L=40.0, T=50.0, kappa=1, seed=7))
    n = len(res.accepted_centers)
    se = res.phi_hat / math.sqrt(n)
    assert abs(res.phi_hat - res.phi_analytic) <= 3.0 * se


def test_tail_histogram_consistent_with_ideal_gas():
    # pool a few seeds so per-bin expected pair counts clear 5
    C = None
    E = None
    for seed in range(1, 7):
        res = simulate(MaternConfig(d=1, L=200.0, T=saturation_time(1), kappa=1, seed=seed))
        mask = res.bin_centers >= 2.0
        c = res.pair_counts[mask].astype(float)
        e = res.pair_norm[mask]
        C = c if C is None else C + c
        E = e if E is None else E + e
    keep = E > 5.0
    x2 = float(((C[keep] - E[keep]) ** 2 / E[keep]).sum())
    dof = int(keep.sum())
    assert dof > 10
    assert x2 < chi2.ppf(0.95, dof)


def test_rsa_mode_reports_nan_analytics():
    res = simulate(MaternConfig(d=1, L=50.0, T=20.0, kappa=0, seed=4))
    assert math.isnan(res.phi_analytic)
    assert np.all(np.isnan(res.g2_analytic))
    assert res.phi_hat > 0.5  # beats the ghost saturation


def test_simulation_deterministic():
    cfg = MaternConfig(d=2, L=15.0, T=10.0, kappa=1, seed=99)
    a = simulate(cfg)
    b = simulate(cfg)
    assert np.array_equal(a.accepted_centers, b.accepted_centers)
    assert np.array_equal(a.pair_counts, b.pair_counts)


def test_decorrelation_profile():
    prof = decorrelation_profile(60)
    assert prof[0] == (1, pytest.approx(1.0 / 3.0, rel=1e-12))
    excess = dict(prof)
    for d in range(50, 59, 2):
        ratio = excess[d + 2] / excess[d]
        assert abs(ratio - 0.75) < 0.075
    vals = [e for _, e in prof]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        decorrelation_profile(301)


def test_csv_outputs():
    res = simulate(MaternConfig(d=2, L=12.0, T=5.0, kappa=1, seed=2))
    hist = hist_to_csv(res).strip().split("\n")
    assert hist[0] == "r,g2_hat,stderr,g2_analytic"
    assert len(hist) == res.config.bins + 1
    cent = centers_to_csv(res).strip().split("\n")
    assert cent[0] == "x1,x2"
    assert len(cent) == len(res.accepted_centers) + 1
    row = [float(v) for v in cent[1].split(",")]
    assert len(row) == 2
