import numpy as np
import pytest

from resetruin import oracle
from resetruin.renewal import (
    finite_time_spectral,
    generating_functions,
    ruin_probability_renewal,
)
from resetruin.spectral_core import (
    WalkConfig,
    midpoint_value,
    ruin_probability_spectral,
)


def test_finite_time_distribution_matches_dp():
    cfg = WalkConfig(a=6, z=2, p=0.45, gamma=0.2)
    horizon = 40
    ft = finite_time_spectral(cfg, horizon)
    dp = oracle.finite_time_dp(6, 2, 0.45, horizon)
    assert ft.horizon == dp.horizon == horizon
    np.testing.assert_allclose(ft.u, dp.u, atol=1e-12)
    np.testing.assert_allclose(ft.v, dp.v, atol=1e-12)
    np.testing.assert_allclose(ft.s, dp.s, atol=1e-12)


def test_finite_time_parity_zeros():
    # ruin at step k from z needs k >= z steps of matching parity
    ft = finite_time_spectral(WalkConfig(a=8, z=3, p=0.5, gamma=0.0), 20)
    for k in range(1, 21):
        if k < 3 or (k - 3) % 2:
            assert ft.u[k - 1] == pytest.approx(0.0, abs=1e-13)
    assert ft.u[2] > 0.0


def test_finite_time_rejects_bad_horizon():
    cfg = WalkConfig(a=4, z=2, p=0.5, gamma=0.0)
    with pytest.raises(ValueError):
        finite_time_spectral(cfg, 0)


def test_generating_function_ratio_is_the_ruin_probability():
    cfg = WalkConfig(a=7, z=3, p=0.6, gamma=0.35)
    big_u, big_s = generating_functions(cfg)
    assert 0.0 < big_u < big_s <= 1.0 + 1e-12
    assert big_u / big_s == pytest.approx(ruin_probability_renewal(cfg), rel=1e-12)


def test_generating_function_matches_discounted_dp():
    a, z, p, gamma = 7, 3, 0.6, 0.35
    big_u, big_s = generating_functions(WalkConfig(a=a, z=z, p=p, gamma=gamma))
    dp_u, dp_s = oracle.discounted_dp(a, z, p, 1.0 - gamma)
    assert big_u == pytest.approx(dp_u, abs=1e-12)
    assert big_s == pytest.approx(dp_s, abs=1e-12)


def test_absorbed_start_has_no_later_absorption():
    assert generating_functions(WalkConfig(a=5, z=0, p=0.4, gamma=0.2)) == (0.0, 0.0)
    assert generating_functions(WalkConfig(a=5, z=5, p=0.4, gamma=0.2)) == (0.0, 0.0)
    assert ruin_probability_renewal(WalkConfig(a=5, z=0, p=0.4, gamma=0.2)) == 1.0
    assert ruin_probability_renewal(WalkConfig(a=5, z=5, p=0.4, gamma=0.2)) == 0.0


def test_agrees_with_spectral_route():
    worst = 0.0
    for a in (2, 3, 8, 13):
        for z in range(1, a):
            for p in (0.35, 0.5, 0.65):
                for gamma in (0.0, 0.4, 0.9):
                    cfg = WalkConfig(a=a, z=z, p=p, gamma=gamma)
                    diff = abs(ruin_probability_renewal(cfg)
                               - ruin_probability_spectral(cfg))
                    worst = max(worst, diff)
    assert worst <= 1e-12


def test_midpoint_collapses_to_the_reset_free_value():
    for a, p in [(8, 0.3), (12, 0.62)]:
        for gamma in (0.05, 0.5, 0.95):
            cfg = WalkConfig(a=a, z=a // 2, p=p, gamma=gamma)
            value = ruin_probability_renewal(cfg)
            assert value == pytest.approx(midpoint_value(a, p), abs=1e-14)


def test_strong_bias_ratio_is_stable():
    cfg = WalkConfig(a=300, z=150, p=0.9, gamma=0.4)
    value = ruin_probability_renewal(cfg)
    assert 0.0 <= value <= 1.0
    assert value == pytest.approx(ruin_probability_spectral(cfg), abs=1e-12)
