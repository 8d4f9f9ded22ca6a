import math

import pytest
from hypothesis import given, settings, strategies as st

from capacity import milc_binary_erasure, milc_binary_symmetric
from config import config
from constrained_rate import (LOSS_LIMITED, PLATEAU, approx_p_bec, approx_p_bsc, family_loss,
                              family_rate, max_rate_bec, max_rate_bsc, max_rate_numeric,
                              shannon_capacity, solve_loss_equation)
from handlers import DomainError
from mim import ImportanceParam, binary_mim, importance_loss
from optimizer import OptimizerOptions
from probability import Channel, binary_entropy
from verification import approximation_gaps

W = ImportanceParam(0.1)
FAST = OptimizerOptions(starts=3)

def test_golden_plateaus(golden):
    for key, solver in (("maxrate_bsc_beta", max_rate_bsc), ("maxrate_bec_beta", max_rate_bec)):
        g = golden[key]
        w = ImportanceParam(g["varpi"])
        for beta, turning, plateau in zip(g["beta"], g["turning_point"], g["plateau_rate"]):
            result = solver(w, beta, turning + config.GOLDEN_TOL)
            assert result.regime == PLATEAU
            assert result.rate == pytest.approx(plateau, abs=config.GOLDEN_TOL)
            assert result.optimal_p == 0.5

def test_bsc_plateau_value():
    result = max_rate_bsc(W, 0.1, 0.05)
    assert result.rate == pytest.approx(0.5310, abs=1e-4)
    assert result.rate == pytest.approx(1 - binary_entropy(0.1), abs=1e-10)

def test_bsc_at_regime_boundary():
    assert max_rate_bsc(W, 0.2, 0.0185).rate == pytest.approx(0.2781, abs=1e-4)

def test_bec_plateau_and_erased_channel():
    assert max_rate_bec(W, 0.2, 0.05).rate == pytest.approx(0.8, abs=1e-10)
    assert max_rate_bec(W, 0.3, 0.0359).rate == pytest.approx(0.7, abs=1e-10)
    assert max_rate_bec(W, 1.0, 0.01).rate == pytest.approx(0.0, abs=1e-12)

def test_loss_limited_regime_meets_budget():
    eps = 0.01
    result = max_rate_bsc(W, 0.1, eps)
    assert result.regime == LOSS_LIMITED
    assert 0.0 <= result.optimal_p < 0.5
    assert family_loss("bsc", 0.1, W, result.optimal_p) == pytest.approx(eps, abs=1e-8)
    assert result.rate == pytest.approx(family_rate("bsc", 0.1, result.optimal_p))
    assert result.rate < 1 - binary_entropy(0.1)

def test_beta_above_half_maps_to_mirror_channel():
    assert max_rate_bsc(W, 0.9, 0.01).rate == pytest.approx(max_rate_bsc(W, 0.1, 0.01).rate, abs=1e-10)

def test_tiny_budget_gives_tiny_rate():
    assert max_rate_bsc(W, 0.1, 1e-9).rate < 1e-3
    assert max_rate_bec(W, 0.1, 1e-9).rate < 1e-4

def test_parameter_errors():
    with pytest.raises(DomainError):
        max_rate_bsc(W, 0.1, 0.0)
    with pytest.raises(DomainError):
        max_rate_bsc(ImportanceParam(2.0), 0.1, 0.01)
    with pytest.raises(DomainError):
        max_rate_bec(W, 1.2, 0.01)

def test_solve_loss_equation_inverts_known_point():
    w = ImportanceParam(1.0)
    eps = binary_mim(0.25, w) - 1.0
    root = solve_loss_equation("bec", 0.0, w, eps)
    assert not root.plateau
    assert root.p == pytest.approx(0.25, abs=1e-10)
    assert abs(root.residual) <= 1e-12

def test_solve_loss_equation_plateau_cases():
    capacity = milc_binary_symmetric(W, 0.1).capacity
    root = solve_loss_equation("bsc", 0.1, W, capacity)
    assert root.plateau and root.p == 0.5
    assert solve_loss_equation("bsc", 0.5, ImportanceParam(1.0), 1e-6).plateau

def test_approx_bec_direct_evaluation():
    approx = approx_p_bec(W, 0.2, 0.02)
    assert not approx.fallback
    assert approx.p == pytest.approx((1 - math.sqrt(1 - 0.16 / 0.328)) / 2)
    assert approx.p == pytest.approx(0.14216, abs=1e-5)
    assert approx.p == pytest.approx(solve_loss_equation("bec", 0.2, W, 0.02).p, abs=1e-3)

def test_approx_zero_budget():
    assert approx_p_bsc(W, 0.1, 0.0).p == 0.0
    assert approx_p_bec(W, 0.1, 0.0).p == 0.0

def test_approx_bsc_close_to_exact():
    approx = approx_p_bsc(W, 0.1, 0.01)
    exact = solve_loss_equation("bsc", 0.1, W, 0.01).p
    assert not approx.fallback
    assert abs(approx.p - exact) <= 0.02

def test_approx_bsc_falls_back_without_channel_gap():
    approx = approx_p_bsc(W, 0.5, 0.01)
    assert approx.fallback

def test_shannon_capacity():
    assert shannon_capacity("bsc", 0.1) == pytest.approx(1 - binary_entropy(0.1))
    assert shannon_capacity("bec", 0.3) == pytest.approx(0.7)

def test_numeric_matches_closed_form():
    bsc = max_rate_numeric(Channel.bsc(0.1), W, 0.05, FAST)
    assert bsc.regime == PLATEAU
    assert bsc.rate == pytest.approx(0.5310, abs=1e-4)

    closed = max_rate_bec(W, 0.3, 0.01)
    numeric = max_rate_numeric(Channel.bec(0.3), W, 0.01, FAST)
    assert numeric.regime == LOSS_LIMITED
    assert numeric.rate == pytest.approx(closed.rate, abs=1e-4)
    assert importance_loss(numeric.optimal_input, Channel.bec(0.3), W).loss <= 0.01 + 1e-8

def test_numeric_on_identical_rows():
    result = max_rate_numeric(Channel.constant([0.5, 0.5], 2), W, 0.01, FAST)
    assert result.rate == pytest.approx(0.0, abs=1e-12)

@given(st.sampled_from(["bsc", "bec"]), st.floats(0.0, 0.45), st.floats(0.01, 1.9),
       st.floats(0.01, 1.5), st.floats(0.01, 1.5))
@settings(max_examples=500, derandomize=True, deadline=None)
def test_rate_monotone_then_flat(family, beta, varpi, a, b):
    w = ImportanceParam(varpi)
    solver = max_rate_bsc if family == "bsc" else max_rate_bec
    capacity = (milc_binary_symmetric if family == "bsc" else milc_binary_erasure)(w, beta).capacity
    if capacity <= 0.0:
        return
    lo, hi = sorted((a * capacity, b * capacity))
    r_lo, r_hi = solver(w, beta, lo), solver(w, beta, hi)
    assert r_lo.rate <= r_hi.rate + 1e-10
    for result, eps in ((r_lo, lo), (r_hi, hi)):
        assert 0.0 <= result.rate <= 1.0
        assert 0.0 <= result.optimal_p <= 0.5
        assert family_loss(family, beta, w, result.optimal_p) <= eps + 1e-8
        if eps >= capacity:
            assert result.regime == PLATEAU
            assert result.rate == pytest.approx(shannon_capacity(family, beta), abs=1e-10)

def test_approximation_gaps_within_measured_bounds():
    gaps = approximation_gaps(W)
    assert gaps.rate <= config.APPROX_RATE_TOL
    assert gaps.p <= config.APPROX_P_TOL
    assert gaps.rate > 0.0
