import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sdfrelay.diversity import (ANALYTIC_GRID, default_theorem_family, estimate_scdo, fit_loglog_slope,
                                log_grid, outage_curve, verify_theorem_table)
from sdfrelay.errors import DomainError, ZeroOutageError
from sdfrelay.model import NetworkConfig

GRID = log_grid(*ANALYTIC_GRID)


def test_log_grid_shape():
    g = log_grid(1e-6, 1e-4, 8)
    assert len(g) == 8
    assert g[0] == pytest.approx(1e-4) and g[-1] == pytest.approx(1e-6)
    assert all(a > b for a, b in zip(g, g[1:]))


def test_linear_exponential_slope():
    fit = estimate_scdo(lambda lam: -math.expm1(-351.1 * lam), log_grid(1e-7, 1e-5, 8))
    assert fit.delta_hat == pytest.approx(1.0, abs=0.01)


def test_pure_power_law_slope_is_exact():
    fit = estimate_scdo(lambda lam: 7.3 * lam ** 2, GRID)
    assert fit.delta_hat == pytest.approx(2.0, abs=1e-10)
    assert fit.intercept == pytest.approx(math.log(7.3), abs=1e-8)
    assert fit.residual < 1e-10


@settings(max_examples=50)
@given(st.floats(1e-6, 1e6), st.floats(0.5, 3.0))
def test_slope_invariant_to_scaling(scale, power):
    q = lambda lam: 1e-3 * lam ** power * (1 + 50 * lam)
    base = estimate_scdo(q, GRID).delta_hat
    scaled = estimate_scdo(lambda lam: scale * q(lam), GRID).delta_hat
    assert scaled == pytest.approx(base, abs=1e-9)


def test_grid_validation():
    q = lambda lam: lam
    with pytest.raises(DomainError):
        estimate_scdo(q, [1e-4, 1e-5, 1e-6, 1e-6, 3e-5])
    with pytest.raises(DomainError):
        estimate_scdo(q, [1e-4])
    with pytest.raises(DomainError):
        estimate_scdo(q, log_grid(1e-5, 1e-4, 8))
    with pytest.raises(DomainError):
        estimate_scdo(q, [1e-4, 1e-5, 0.0, 1e-6, 3e-5])


def test_zero_outage_raises():
    with pytest.raises(ZeroOutageError):
        fit_loglog_slope([1e-3, 1e-4], [1e-3, 0.0])


def test_threads_do_not_change_fit():
    q, _ = outage_curve(NetworkConfig.create((15.0, 0.0), (6.0, 0.0)))
    assert estimate_scdo(q, GRID) == estimate_scdo(q, GRID, threads=4)


def test_theorem_table_default_family():
    checks = verify_theorem_table()
    assert [c.case.name for c in checks] == ["rayleigh", "fading-interference", "pathloss-overlap",
                                             "pathloss-disjoint"]
    for c in checks:
        assert c.passed, (c.case.name, c.fit.delta_hat)


def test_overlap_case_slope_one_despite_quadratic_term():
    case = default_theorem_family()[2]
    q, source = outage_curve(case.config)
    assert source == "bound"
    assert estimate_scdo(q, GRID).delta_hat == pytest.approx(1.0, abs=0.01)


@pytest.mark.parametrize("index", [0, 1, 2, 3])
def test_grid_shift_stability(index):
    case = default_theorem_family()[index]
    q, _ = outage_curve(case.config)
    a = estimate_scdo(q, GRID).delta_hat
    b = estimate_scdo(q, log_grid(1e-7, 1e-5, 8)).delta_hat
    assert abs(a - b) < 0.05


def test_outage_curve_rejects_unknown_model():
    from sdfrelay.model import FadingSpec, Fading
    odd = NetworkConfig.create((15.0, 0.0), (6.0, 0.0)).with_fading(
        FadingSpec(Fading.RAYLEIGH, Fading.DETERMINISTIC, Fading.DETERMINISTIC))
    with pytest.raises(DomainError):
        outage_curve(odd)
