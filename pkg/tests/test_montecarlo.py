import math

import numpy as np
import pytest

from sdfrelay.bounds import dominant_probability
from sdfrelay.errors import DomainError
from sdfrelay.geometry import dominant_regions, path_loss
from sdfrelay.model import NetworkConfig
from sdfrelay.montecarlo import (McEstimate, Outcome, SimulationParams, Snapshot, auto_window_radius,
                                 classify_arrays, classify_sdf, estimate_outage, interference_batch,
                                 interference_pair, protocol_outage, sample_block, sample_snapshot,
                                 simulate_interference, tail_interference)

XS = (15.0, 0.0)


def cfg(lam=1e-3, x_r=(6.0, 0.0), fading="rayleigh", beta=0.1):
    return NetworkConfig.create(XS, x_r, alpha=4.0, beta=beta, lam=lam, fading=fading)


def test_params_validation():
    with pytest.raises(DomainError):
        SimulationParams(trials=0)
    with pytest.raises(DomainError):
        SimulationParams(trials=10, seed=-1)
    with pytest.raises(DomainError):
        SimulationParams(trials=10, window_radius=0.0)


def test_zero_density_is_empty_and_estimates_zero():
    c = cfg(lam=0.0)
    snap = sample_snapshot(c, SimulationParams(trials=10), 3)
    assert len(snap) == 0
    res = estimate_outage(c, SimulationParams(trials=1000))
    assert res.bc.p_hat == 0.0 and res.mac.p_hat == 0.0 and res.total.p_hat == 0.0


def test_mean_count_matches_poisson_mean():
    c = cfg(lam=1e-3)
    params = SimulationParams(trials=100_000, window_radius=100.0)
    counts = np.concatenate([sample_block(c, params, b).counts for b in range(math.ceil(100_000 / 4096))])
    counts = counts[:100_000]
    se = counts.std(ddof=1) / math.sqrt(len(counts))
    assert abs(counts.mean() - 10 * math.pi) < 3 * se


def test_snapshot_is_pure_function_of_seed_and_index():
    c = cfg(lam=3e-3)
    params = SimulationParams(trials=10_000, seed=42)
    a = sample_snapshot(c, params, 5000)
    b = sample_snapshot(c, params, 5000)
    np.testing.assert_array_equal(a.positions, b.positions)
    np.testing.assert_array_equal(a.g, b.g)
    batch = sample_block(c, params, 1)
    inside = batch.snapshot(5000 - 4096)
    np.testing.assert_array_equal(a.positions, inside.positions)
    np.testing.assert_array_equal(a.h, inside.h)
    assert (a.u_sr, a.u_sd, a.u_rd) == (inside.u_sr, inside.u_sd, inside.u_rd)
    other = sample_snapshot(c, SimulationParams(trials=10_000, seed=43), 5000)
    assert len(other) != len(a) or not np.array_equal(other.positions, a.positions)


def test_results_independent_of_thread_count():
    c = cfg(lam=3e-3)
    one = estimate_outage(c, SimulationParams(trials=30_000, seed=9, threads=1))
    four = estimate_outage(c, SimulationParams(trials=30_000, seed=9, threads=4))
    assert one == four


def test_interference_pair_examples():
    lay = cfg().layout
    assert interference_pair(Snapshot.from_points(np.empty((0, 2))), lay, 4.0) == (0.0, 0.0)
    i_r, _ = interference_pair(Snapshot.from_points([[6.0, 0.0]]), lay, 4.0)
    assert i_r == 1.0
    i_r, i_d = interference_pair(Snapshot.from_points([[3.0, 0.0]]), lay, 4.0)
    assert i_r == pytest.approx(1 / 82) and i_d == pytest.approx(1 / 82)


def test_batch_interference_matches_per_snapshot():
    c = cfg(lam=3e-3)
    batch = sample_block(c, SimulationParams(trials=200, seed=1), 0)
    i_r, i_d = interference_batch(batch, c.layout, 4.0)
    for k in (0, 17, 199):
        pr, pd = interference_pair(batch.snapshot(k), c.layout, 4.0)
        assert i_r[k] == pytest.approx(pr, rel=1e-12)
        assert i_d[k] == pytest.approx(pd, rel=1e-12)


def test_classify_examples():
    c = cfg(fading="pathloss-only")
    assert classify_sdf(Snapshot.from_points(np.empty((0, 2))), c) is Outcome.SUCCESS
    reg = dominant_regions(c.layout, 4.0, 0.1)
    # a point on the axis strictly inside both disks
    x = 0.5 * ((6.0 - reg.r1) + reg.r2)
    assert abs(x - 6.0) < reg.r1 and abs(x) < reg.r2
    snap = Snapshot.from_points([[x, 0.0]])
    i_r, i_d = interference_pair(snap, c.layout, 4.0)
    assert path_loss(9.0, 4.0) / i_r < 0.1 and 2 * path_loss(15.0, 4.0) / i_d < 0.1
    assert classify_sdf(snap, c) is Outcome.BC_OUTAGE
    mac = Snapshot.from_points([[1.0, 0.0]], u_sr=1e3, u_sd=1e-6, u_rd=1e-6)
    assert classify_sdf(mac, cfg()) is Outcome.MAC_OUTAGE


def test_zero_interference_means_success_even_with_deep_fades():
    labels = classify_arrays(np.zeros(3), np.zeros(3), np.full((3, 3), 1e-300), cfg())
    assert np.all(labels == Outcome.SUCCESS)


@pytest.mark.parametrize("lam", [1e-3, 3e-2])
def test_event_algebra_matches_stepwise_protocol(lam):
    c = cfg(lam=lam)
    batch = sample_block(c, SimulationParams(trials=3000, seed=2), 0, n_trials=3000)
    i_r, i_d = interference_batch(batch, c.layout, 4.0)
    labels = classify_arrays(i_r, i_d, batch.u, c)
    assert set(np.unique(labels)) <= {0, 1, 2}
    assert np.count_nonzero(labels == Outcome.MAC_OUTAGE) > 0
    for k in range(3000):
        assert protocol_outage(batch.snapshot(k), c) == (labels[k] != Outcome.SUCCESS)


def test_interference_correlation_decreases_with_separation():
    corrs = []
    for sep in (3.0, 12.0, 40.0):
        c = cfg(lam=1e-3, x_r=(0.0, sep), fading="pathloss-only")
        i_r, i_d = simulate_interference(c, SimulationParams(trials=40_000, seed=4, window_radius=200.0))
        corrs.append(np.corrcoef(np.log(i_r + 1e-12), np.log(i_d + 1e-12))[0, 1])
    assert corrs[0] > 0
    assert corrs[0] > corrs[1] > corrs[2]


def test_occupancy_of_disjoint_parts_is_uncorrelated():
    c = cfg(lam=3e-3, fading="pathloss-only")
    reg = dominant_regions(c.layout, 4.0, 0.1)
    n = 40_000
    params = SimulationParams(trials=n, seed=8, window_radius=100.0)
    a_only, d_only = [], []
    for b in range(math.ceil(n / 4096)):
        batch = sample_block(c, params, b)
        in_r = np.hypot(batch.x - 6.0, batch.y) < reg.r1
        in_d = np.hypot(batch.x, batch.y) < reg.r2
        ids = batch.trial_ids
        a_only.append(np.bincount(ids, weights=in_r & ~in_d, minlength=batch.n_trials) > 0)
        d_only.append(np.bincount(ids, weights=in_d & ~in_r, minlength=batch.n_trials) > 0)
    a, d = np.concatenate(a_only), np.concatenate(d_only)
    corr = np.corrcoef(a, d)[0, 1]
    assert abs(corr) < 3 / math.sqrt(n)


@pytest.mark.parametrize("lam", [1e-3, 3e-3])
def test_window_truncation_effect_below_one_se(lam):
    # sample on a 50% larger disk and compare against its own restriction to the
    # default disk; the restriction is an exact realization on the smaller disk
    c = cfg(lam=lam)
    R = auto_window_radius(c)
    big = 1.5 * R
    n = 100_000
    params = SimulationParams(trials=n, seed=21)
    tail_small, tail_big = tail_interference(c, R), tail_interference(c, big)
    diff = 0
    total = 0
    for b in range(math.ceil(n / 4096)):
        batch = sample_block(c, params, b, radius=big)
        i_r, i_d = interference_batch(batch, c.layout, 4.0)
        lab_big = classify_arrays(i_r + tail_big[0], i_d + tail_big[1], batch.u, c)
        keep = np.hypot(batch.x, batch.y) < R
        ids = batch.trial_ids
        d2r = (batch.x - 6.0) ** 2 + batch.y ** 2
        d2d = batch.x ** 2 + batch.y ** 2
        j_r = np.bincount(ids, weights=keep * batch.g / (1 + d2r ** 2), minlength=batch.n_trials)
        j_d = np.bincount(ids, weights=keep * batch.h / (1 + d2d ** 2), minlength=batch.n_trials)
        lab_small = classify_arrays(j_r + tail_small[0], j_d + tail_small[1], batch.u, c)
        diff += int(np.count_nonzero(lab_big != Outcome.SUCCESS)) - int(np.count_nonzero(lab_small != Outcome.SUCCESS))
        total += int(np.count_nonzero(lab_big != Outcome.SUCCESS))
    se = McEstimate.from_count(total, n, 0).se
    assert abs(diff) / n < se


def test_standard_error_halves_per_quadrupling():
    c = cfg(lam=3e-3)
    trials = [10_000 * 2 ** k for k in range(5)]
    ses = [estimate_outage(c, SimulationParams(trials=t, seed=k)).total.se for k, t in enumerate(trials)]
    slope = np.polyfit(np.log(trials), np.log(ses), 1)[0]
    assert slope == pytest.approx(-0.5, abs=0.05)


def test_pathloss_only_overlap_estimate_in_linear_regime():
    c = cfg(lam=1e-3, fading="pathloss-only")
    res = estimate_outage(c, SimulationParams(trials=200_000, seed=3))
    reg = dominant_regions(c.layout, 4.0, 0.1)
    bound = dominant_probability(reg, 1e-3)
    assert res.bc.p_hat >= bound - 3 * res.bc.se
    # in the linear regime q is a modest multiple of lam times the lens area
    assert 1.0 < res.bc.p_hat / (1e-3 * reg.area_lens) < 2.0


def test_window_radius_rules():
    c = cfg(lam=1e-3)
    assert auto_window_radius(c.with_lambda(0.0)) == 100.0
    assert auto_window_radius(c) >= 100.0
    assert auto_window_radius(c, tail_correction=False) >= auto_window_radius(c)
    far = NetworkConfig.create((40.0, 0.0), (30.0, 0.0), lam=1e-6)
    assert auto_window_radius(far) >= 200.0
