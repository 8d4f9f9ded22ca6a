import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from config import config
from distortion import (CLOSED_FORM, ENDPOINT, DistortionSpec, achievable_floor, alpha_star, average_distortion,
                        distortion_domain, midf_bernoulli_hamming, midf_numeric, optimal_test_channel,
                        shannon_rd_bernoulli, varpi_bound)
from handlers import DomainError, ValidationError
from mim import ImportanceParam, binary_mim
from optimizer import OptimizerOptions
from probability import Channel, Distribution, posterior

W = ImportanceParam(0.2)

def test_golden_rates_at_zero_distortion(golden):
    g = golden["midf_bernoulli_p"]
    w = ImportanceParam(g["varpi"])
    for p, expected in zip(g["p"], g["rate"]):
        assert midf_bernoulli_hamming(p, w, g["d"]).rate == pytest.approx(expected, abs=config.GOLDEN_TOL)

def test_reference_point():
    result = midf_bernoulli_hamming(0.3, W, 0.1)
    assert result.rate == pytest.approx(0.0504649, abs=1e-6)
    assert result.method == CLOSED_FORM
    assert result.achieved_distortion == pytest.approx(0.1, abs=1e-12)
    assert result.varpi_bound_ok

def test_test_channel_entries():
    assert alpha_star(0.3, 0.1) == pytest.approx(0.25)
    assert_allclose(optimal_test_channel(0.3, 0.1).matrix, [[0.75, 0.25], [0.0357142857, 0.9642857143]], atol=1e-9)

def test_zero_rate_at_maximum_distortion():
    for p in (0.1, 0.3, 0.45, 0.7):
        assert midf_bernoulli_hamming(p, W, min(p, 1 - p)).rate == pytest.approx(0.0, abs=1e-12)

def test_zero_distortion_keeps_full_importance():
    assert midf_bernoulli_hamming(0.4, W, 0.0).rate == pytest.approx(binary_mim(0.4, W) - 1.0)
    assert_allclose(optimal_test_channel(0.4, 0.0).matrix, np.eye(2))

def test_half_source_at_half_distortion_is_endpoint():
    result = midf_bernoulli_hamming(0.5, W, 0.5)
    assert result.method == ENDPOINT
    assert result.rate == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainError):
        optimal_test_channel(0.5, 0.5)

def test_domain_errors():
    with pytest.raises(DomainError):
        midf_bernoulli_hamming(0.3, W, 0.31)
    with pytest.raises(DomainError):
        midf_bernoulli_hamming(0.0, W, 0.0)
    with pytest.raises(DomainError):
        midf_bernoulli_hamming(0.3, W, -0.01)

def test_distortion_spec_validation():
    with pytest.raises(ValidationError):
        DistortionSpec([[0.0, -1.0], [1.0, 0.0]])
    assert_allclose(DistortionSpec.hamming(2).matrix, [[0.0, 1.0], [1.0, 0.0]])

def test_distortion_domain_and_average():
    px = Distribution.bernoulli(0.3)
    assert distortion_domain(px, DistortionSpec.hamming(2)) == (0.0, pytest.approx(0.3))
    assert average_distortion(px, Channel.bsc(0.1), DistortionSpec.hamming(2)) == pytest.approx(0.1)

def test_varpi_bound():
    px = Distribution.bernoulli(0.3)
    # p(y) = (0.34, 0.66), max p(x) = 0.7
    assert varpi_bound(px, Channel.bsc(0.1)) == pytest.approx(2 * 0.34 / 0.7)

def test_shannon_rd():
    assert shannon_rd_bernoulli(0.5, 0.0) == pytest.approx(1.0)
    assert shannon_rd_bernoulli(0.3, 0.3) == 0.0
    assert shannon_rd_bernoulli(0.3, 0.4) == 0.0

def test_numeric_matches_closed_form():
    px = Distribution.bernoulli(0.3)
    result = midf_numeric(px, DistortionSpec.hamming(2), 0.1, W, OptimizerOptions(starts=3))
    assert result.rate == pytest.approx(0.0504649, abs=config.RD_NUMERIC_TOL)
    assert result.achieved_distortion <= 0.1 + 1e-9

def test_numeric_matches_closed_form_on_random_triples():
    rng = np.random.default_rng(3)
    hamming = DistortionSpec.hamming(2)
    for _ in range(6):
        p = float(rng.uniform(0.1, 0.9))
        D = float(rng.uniform(0.05, 0.9)) * min(p, 1 - p)
        w = ImportanceParam(float(rng.uniform(0.1, 2.0)))
        result = midf_numeric(Distribution.bernoulli(p), hamming, D, w, OptimizerOptions(starts=3))
        assert result.rate == pytest.approx(midf_bernoulli_hamming(p, w, D).rate, abs=config.RD_NUMERIC_TOL)
        assert result.achieved_distortion <= D + 1e-9

def test_floor_of_distortion_without_zero_entries():
    px = Distribution.uniform(2)
    d = DistortionSpec([[0.2, 1.0], [1.0, 0.3]])
    assert distortion_domain(px, d) == (0.0, pytest.approx(0.6))
    assert achievable_floor(px, d) == pytest.approx(0.25)
    assert achievable_floor(px, DistortionSpec.hamming(2)) == 0.0

    with pytest.raises(DomainError):
        midf_numeric(px, d, 0.2, W)
    at_floor = midf_numeric(px, d, 0.25, W)
    assert at_floor.method == ENDPOINT
    assert_allclose(at_floor.argmin_channel.matrix, np.eye(2))
    assert at_floor.achieved_distortion == pytest.approx(0.25)

def test_numeric_endpoints():
    px = Distribution.bernoulli(0.3)
    hamming = DistortionSpec.hamming(2)
    top = midf_numeric(px, hamming, 0.3, W)
    assert top.method == ENDPOINT
    assert top.rate == pytest.approx(0.0, abs=1e-12)
    bottom = midf_numeric(px, hamming, 0.0, W)
    assert bottom.method == ENDPOINT
    assert bottom.rate == pytest.approx(binary_mim(0.3, W) - 1.0)
    with pytest.raises(DomainError):
        midf_numeric(px, hamming, -0.1, W)

@given(st.floats(0.02, 0.98), st.floats(0.0, 1.0))
@settings(max_examples=500, derandomize=True, deadline=None)
def test_test_channel_posterior_error_is_distortion(p, frac):
    D = frac * min(p, 1 - p) * 0.999
    post = posterior(Distribution.bernoulli(p), optimal_test_channel(p, D))
    for j in range(2):
        if post.reachable[j] and post.output_marginal.probs[j] > 1e-9:
            assert 1.0 - post.matrix[j, j] == pytest.approx(D, abs=1e-12)

@given(st.floats(0.02, 0.98), st.floats(0.01, 2.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
@settings(max_examples=500, derandomize=True, deadline=None)
def test_rate_monotone_and_midpoint_convex(p, varpi, a, b):
    w = ImportanceParam(varpi)
    d_max = min(p, 1 - p)
    lo, hi = sorted((a * d_max, b * d_max))
    r_lo = midf_bernoulli_hamming(p, w, lo).rate
    r_hi = midf_bernoulli_hamming(p, w, hi).rate
    r_mid = midf_bernoulli_hamming(p, w, (lo + hi) / 2).rate
    assert r_hi <= r_lo + 1e-12
    assert r_mid <= (r_lo + r_hi) / 2 + 1e-12
