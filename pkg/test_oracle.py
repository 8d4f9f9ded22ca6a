import numpy as np
import pytest
from numpy.testing import assert_allclose

from capacity import milc_binary_erasure, milc_binary_symmetric
from constrained_rate import max_rate_bsc
from distortion import midf_bernoulli_hamming
from handlers import DomainError, ValidationError
from mim import ImportanceParam, binary_mim
from oracle import (GridSpec, grid_max_loss, grid_max_mi_under_loss, grid_min_rd, lipschitz_gap,
                    simplex_grid)
from probability import Channel, binary_entropy

FINE = GridSpec(1e-4)

def test_gridspec_validation():
    with pytest.raises(ValidationError):
        GridSpec(0.0)
    with pytest.raises(ValidationError):
        GridSpec(0.6)
    assert GridSpec(0.25, 3).point_count() == 15

def test_gridspec_for_channel_defaults():
    assert GridSpec.for_channel(Channel.bsc(0.1)) == GridSpec(1e-4, 2)
    assert GridSpec.for_channel(Channel.identity(3)) == GridSpec(1e-2, 3)
    assert GridSpec.for_channel(Channel.identity(3), 0.05).resolution == 0.05

def test_simplex_grid_points_lie_on_simplex():
    g = GridSpec(0.1, 3)
    points = list(simplex_grid(g))
    assert len(points) == g.point_count() == 66
    assert_allclose([p.sum() for p in points], 1.0, atol=1e-12)
    assert all(np.all(p >= 0.0) for p in points)

def test_max_loss_bsc_reference():
    value, argmax = grid_max_loss(Channel.bsc(0.1), ImportanceParam(1.0), FINE)
    assert value == pytest.approx(0.4081, abs=1e-4)
    assert_allclose(argmax, [0.5, 0.5])

def test_max_loss_identity_four_symbols():
    value, argmax = grid_max_loss(Channel.identity(4), ImportanceParam(2.0), GridSpec(0.05, 4))
    assert value == pytest.approx(3.4817, abs=1e-3)
    assert_allclose(argmax, [0.25] * 4)

def test_max_loss_identical_rows_is_zero():
    value, _ = grid_max_loss(Channel.constant([0.3, 0.7], 2), ImportanceParam(1.0), GridSpec(1e-3))
    assert value == pytest.approx(0.0, abs=1e-12)

def test_max_loss_guards():
    with pytest.raises(DomainError):
        grid_max_loss(Channel.identity(5), ImportanceParam(1.0), GridSpec(0.5, 5))
    with pytest.raises(DomainError):
        grid_max_loss(Channel.identity(3), ImportanceParam(1.0), GridSpec(0.5, 2))

@pytest.mark.parametrize("family,beta,varpi", [("bsc", 0.3, 1.0), ("bsc", 0.8, 0.5), ("bec", 0.2, 1.7)])
def test_max_loss_bounded_by_closed_form(family, beta, varpi):
    w = ImportanceParam(varpi)
    ch = Channel.bsc(beta) if family == "bsc" else Channel.bec(beta)
    closed = (milc_binary_symmetric if family == "bsc" else milc_binary_erasure)(w, beta).capacity
    g = GridSpec(1e-2)
    value, _ = grid_max_loss(ch, w, g)
    assert value <= closed + 1e-12
    assert closed - value <= lipschitz_gap(w, g)

def test_min_rd_reference():
    value, alpha, beta = grid_min_rd(0.3, ImportanceParam(0.2), 0.1, FINE)
    assert value == pytest.approx(0.05046, abs=1e-5)
    assert alpha == pytest.approx(0.25, abs=1e-3)
    assert 0.3 * alpha + 0.7 * beta == pytest.approx(0.1)

def test_min_rd_endpoints():
    w = ImportanceParam(0.2)
    value, alpha, _ = grid_min_rd(0.3, w, 0.0, FINE)
    assert value == pytest.approx(binary_mim(0.3, w) - 1.0)
    assert alpha == 0.0
    value, _, _ = grid_min_rd(0.3, w, 0.3, FINE)
    assert value == pytest.approx(0.0, abs=1e-12)

@pytest.mark.parametrize("p,D,varpi", [(0.2, 0.05, 0.5), (0.6, 0.3, 1.5), (0.45, 0.2, 2.0)])
def test_min_rd_matches_closed_form(p, D, varpi):
    w = ImportanceParam(varpi)
    value, _, _ = grid_min_rd(p, w, D, FINE)
    assert value == pytest.approx(midf_bernoulli_hamming(p, w, D).rate, abs=1e-4)

def test_min_rd_rejects_bad_source():
    with pytest.raises(DomainError):
        grid_min_rd(1.0, ImportanceParam(0.2), 0.1, FINE)

def test_max_mi_under_loss():
    w = ImportanceParam(0.1)
    ch = Channel.bsc(0.1)
    rate, p = grid_max_mi_under_loss(ch, w, 0.05, FINE)
    assert rate == pytest.approx(0.5310, abs=1e-4)
    assert p == pytest.approx(0.5)
    assert grid_max_mi_under_loss(ch, w, 100.0, FINE)[0] == pytest.approx(1 - binary_entropy(0.1))
    assert grid_max_mi_under_loss(ch, w, 1e-12, FINE)[0] == pytest.approx(0.0, abs=1e-9)

def test_max_mi_under_loss_matches_loss_limited_regime():
    w = ImportanceParam(0.1)
    rate, _ = grid_max_mi_under_loss(Channel.bsc(0.2), w, 0.01, FINE)
    assert rate == pytest.approx(max_rate_bsc(w, 0.2, 0.01).rate, abs=1e-3)

def test_max_mi_requires_binary_input():
    with pytest.raises(DomainError):
        grid_max_mi_under_loss(Channel.identity(3), ImportanceParam(0.1), 0.1, FINE)
