import math

import numpy as np
import pytest

from resetruin.spectral_core import (
    WalkConfig,
    classical_ruin,
    decompose,
    eigenvalue,
    midpoint_value,
    reset_weight,
    ruin_probability_spectral,
    ruin_profile_spectral,
)


class TestWalkConfig:
    def test_accepts_valid_corner_values(self):
        cfg = WalkConfig(a=2, z=0, p=0.5, gamma=0.0)
        assert cfg.q == 0.5
        WalkConfig(a=3, z=3, p=0.999, gamma=0.999)

    @pytest.mark.parametrize("kwargs", [
        dict(a=1, z=0, p=0.5, gamma=0.0),
        dict(a=2.0, z=1, p=0.5, gamma=0.0),
        dict(a=5, z=-1, p=0.5, gamma=0.0),
        dict(a=5, z=6, p=0.5, gamma=0.0),
        dict(a=5, z=2, p=0.0, gamma=0.0),
        dict(a=5, z=2, p=1.0, gamma=0.0),
        dict(a=5, z=2, p=0.5, gamma=1.0),
        dict(a=5, z=2, p=0.5, gamma=-0.1),
    ])
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(ValueError):
            WalkConfig(**kwargs)


def test_eigenvalue_formula():
    assert eigenvalue(10, 0.5, 1) == pytest.approx(math.cos(math.pi / 10), rel=1e-15)
    expected = 2 * math.sqrt(0.3 * 0.7) * math.cos(5 * math.pi / 6)
    assert eigenvalue(6, 0.3, 5) == pytest.approx(expected, rel=1e-15)


def test_eigenvalues_descend_with_mode_index():
    values = [eigenvalue(8, 0.4, nu) for nu in range(1, 8)]
    assert all(x > y for x, y in zip(values, values[1:]))
    assert all(abs(v) < 1.0 for v in values)


def test_reset_weight_definition():
    lam = eigenvalue(5, 0.5, 1)
    assert reset_weight(lam, 0.3) == pytest.approx(1.0 / (1.0 - lam * 0.7), rel=1e-15)
    # gamma = 0 keeps the weight finite because |lam| < 1
    assert reset_weight(lam, 0.0) == pytest.approx(1.0 / (1.0 - lam), rel=1e-15)


# z=1 and z=a-1 discriminate the weight form: the constant part of the
# weight cancels from interior-site ratios but not next to a boundary
@pytest.mark.parametrize("z", [1, 3, 6])
def test_decomposition_reconstructs_the_ruin_ratio(z):
    cfg = WalkConfig(a=7, z=z, p=0.55, gamma=0.4)
    dec = decompose(cfg)
    assert len(dec.modes) == cfg.a - 1
    num = sum(m.A * reset_weight(m.lam, cfg.gamma) for m in dec.modes)
    den = sum((m.A + m.B) * reset_weight(m.lam, cfg.gamma) for m in dec.modes)
    # the shared log_scale prefactor cancels in the ratio
    assert num / den == pytest.approx(ruin_probability_spectral(cfg), abs=1e-13)


def test_profile_boundaries_interior_range_and_monotonicity():
    prof = ruin_profile_spectral(9, 0.55, 0.25)
    assert prof.shape == (10,)
    assert prof[0] == 1.0 and prof[9] == 0.0
    assert np.all(prof[1:9] > 0.0) and np.all(prof[1:9] < 1.0)
    assert np.all(np.diff(prof) <= 0.0)


def test_profile_matches_pointwise_evaluation():
    a, p, gamma = 8, 0.35, 0.6
    prof = ruin_profile_spectral(a, p, gamma)
    for z in range(a + 1):
        q = ruin_probability_spectral(WalkConfig(a=a, z=z, p=p, gamma=gamma))
        assert prof[z] == pytest.approx(q, abs=1e-15)


def test_no_resetting_reduces_to_the_classical_walk():
    for a in (2, 5, 12):
        for p in (0.3, 0.5, 0.8):
            prof = ruin_profile_spectral(a, p, 0.0)
            for z in range(a + 1):
                assert prof[z] == pytest.approx(classical_ruin(a, z, p), abs=1e-13)


def test_reflection_symmetry_without_bias():
    # mirroring z swaps the two absorbing ends when p = 1/2
    for a, z, gamma in [(9, 2, 0.45), (12, 5, 0.7), (5, 1, 0.05)]:
        left = ruin_probability_spectral(WalkConfig(a=a, z=z, p=0.5, gamma=gamma))
        right = ruin_probability_spectral(WalkConfig(a=a, z=a - z, p=0.5, gamma=gamma))
        assert left + right == pytest.approx(1.0, abs=1e-12)


def test_classical_ruin_closed_form():
    assert classical_ruin(8, 3, 0.5) == pytest.approx(1.0 - 3 / 8, rel=1e-15)
    r = 0.4 / 0.6
    expected = (r ** 2 - r ** 5) / (1.0 - r ** 5)
    assert classical_ruin(5, 2, 0.6) == pytest.approx(expected, rel=1e-14)


def test_classical_ruin_survives_strong_bias():
    value = classical_ruin(4000, 2000, 0.9)
    assert 0.0 <= value < 1e-300  # astronomically unlikely, not NaN or overflow
    assert classical_ruin(4000, 2000, 0.1) == pytest.approx(1.0, abs=1e-15)
    profile = [classical_ruin(30, z, 0.55) for z in range(31)]
    assert all(x >= y for x, y in zip(profile, profile[1:]))


def test_midpoint_value_formula_and_domain():
    assert midpoint_value(6, 0.5) == 0.5
    c = (0.3 / 0.7) ** 2
    assert midpoint_value(4, 0.7) == pytest.approx(c / (1.0 + c), rel=1e-14)
    with pytest.raises(ValueError):
        midpoint_value(7, 0.5)
    # extreme bias saturates instead of overflowing
    assert midpoint_value(1000, 0.99) == 0.0
    assert midpoint_value(1000, 0.01) == 1.0


def test_midpoint_is_unaffected_by_resetting():
    for a, p in [(6, 0.3), (10, 0.55)]:
        target = midpoint_value(a, p)
        for gamma in (0.0, 0.5, 0.97):
            cfg = WalkConfig(a=a, z=a // 2, p=p, gamma=gamma)
            assert ruin_probability_spectral(cfg) == pytest.approx(target, abs=1e-13)


def test_strong_bias_stays_in_range():
    value = ruin_probability_spectral(WalkConfig(a=400, z=200, p=0.95, gamma=0.5))
    assert 0.0 <= value <= 1.0
    value = ruin_probability_spectral(WalkConfig(a=201, z=100, p=0.9, gamma=0.4))
    assert 0.0 <= value < 1e-6
