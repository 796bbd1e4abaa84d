import pytest

from resetruin.critical import (
    bias_shift_coefficient,
    central_site_bound,
    derivative,
    midpoint_invariance_sweep,
    sign_change,
)
from resetruin.oracle import exact_ruin
from resetruin.spectral_core import WalkConfig, ruin_probability_spectral


def _h(a, z, p, gamma):
    return derivative(WalkConfig(a=a, z=z, p=p, gamma=gamma)).h


# values pinned from the bundled reference datasets (6-decimal data)
@pytest.mark.parametrize("a,z,p,gamma,expected", [
    (10, 4, 0.5, 0.3, 0.488381),
    (10, 3, 0.6, 0.3, 1.039181),
    (11, 5, 0.5, 0.6, 0.389674),
    (11, 5, 0.5, 0.3, 0.411404),
    (11, 5, 0.5, 0.9, 0.456835),
])
def test_derivative_reference_points(a, z, p, gamma, expected):
    assert _h(a, z, p, gamma) == pytest.approx(expected, abs=1e-6)


def test_even_midpoint_derivative_is_exactly_zero():
    for a, p, gamma in [(10, 0.5, 0.3), (10, 0.6, 0.3), (4, 0.25, 0.8), (20, 0.7, 0.05)]:
        comp = derivative(WalkConfig(a=a, z=a // 2, p=p, gamma=gamma))
        assert comp.h == 0.0


def test_components_assemble_into_h():
    comp = derivative(WalkConfig(a=7, z=3, p=0.55, gamma=0.4))
    assert comp.s2 > 0.0
    assembled = (-comp.s1 * comp.s2 + comp.s3 * comp.s4) / comp.s2 ** 2
    assert assembled == pytest.approx(comp.h, rel=1e-9)


def test_derivative_matches_finite_differences_of_both_routes():
    eps = 1e-6
    for a in (5, 11):
        for z in range(1, a):
            for p in (0.4, 0.5):
                for gamma in (0.3, 0.9):
                    h = _h(a, z, p, gamma)
                    for q_of in (ruin_probability_spectral, exact_ruin):
                        up = q_of(WalkConfig(a=a, z=z, p=p, gamma=gamma + eps))
                        down = q_of(WalkConfig(a=a, z=z, p=p, gamma=gamma - eps))
                        fd = (up - down) / (2.0 * eps)
                        # absolute floor covers exact zeros, where the
                        # difference quotient is pure rounding noise
                        assert abs(fd - h) <= max(1e-6 * abs(h), 1e-9)


def test_antisymmetry_of_the_unbiased_derivative():
    for a in (9, 13):
        for gamma in (0.2, 0.7):
            for z in range(1, a):
                assert abs(_h(a, z, 0.5, gamma) + _h(a, a - z, 0.5, gamma)) <= 1e-10


def test_derivative_domain_errors():
    with pytest.raises(ValueError):
        derivative(WalkConfig(a=6, z=0, p=0.5, gamma=0.3))
    with pytest.raises(ValueError):
        derivative(WalkConfig(a=6, z=6, p=0.5, gamma=0.3))
    with pytest.raises(ValueError):
        derivative(WalkConfig(a=6, z=3, p=0.5, gamma=0.0))


def test_sign_change_even_interval():
    for p in (0.5, 0.6):
        report = sign_change(10, p, 0.3)
        assert len(report.h_values) == 9
        assert report.bracket == (5, 5)
        assert report.z_cross == 5.0
        assert report.midpoint_exact
        assert report.h_values[4] == 0.0


def test_sign_change_odd_interval():
    report = sign_change(11, 0.5, 0.3)
    assert report.bracket == (5, 6)
    assert report.z_cross == 5.5  # exact by antisymmetry
    assert not report.midpoint_exact
    assert report.h_values[0] > 0.0 and report.h_values[-1] < 0.0


def test_sign_change_crossing_moves_with_the_bias():
    below = sign_change(11, 0.499, 0.3).z_cross
    above = sign_change(11, 0.501, 0.3).z_cross
    assert below < 5.5 < above


def test_sign_change_rejects_tiny_intervals():
    with pytest.raises(ValueError):
        sign_change(2, 0.5, 0.3)


def test_magnitude_suppression_with_stronger_resetting():
    # away from the crossing, resetting flattens the profile; holds on
    # the plotted unbiased grid for a=10 (the a=11 central pair does not
    # follow it, so the property is asserted exactly where observed)
    for z in range(1, 10):
        if z == 5:
            continue
        magnitudes = [abs(_h(10, z, 0.5, g)) for g in (0.3, 0.6, 0.9)]
        assert magnitudes[0] >= magnitudes[1] >= magnitudes[2]


def test_midpoint_invariance_sweep_small_grid():
    dev = midpoint_invariance_sweep(4, (0.3, 0.6), (0.2, 0.8))
    assert dev <= 1e-12
    with pytest.raises(ValueError):
        midpoint_invariance_sweep(5, (0.5,), (0.5,))


def test_bias_shift_coefficient_sign_and_scale():
    c = bias_shift_coefficient(11, 0.3)
    assert c == pytest.approx(4.6211, abs=0.05)
    assert bias_shift_coefficient(21, 0.6) > 0.0
    with pytest.raises(ValueError):
        bias_shift_coefficient(10, 0.3)


def test_central_site_bound_value():
    bound = central_site_bound(11, (0.4, 0.5, 0.6), 0.3)
    assert bound == pytest.approx(11 * 0.411404, abs=2e-3)
    with pytest.raises(ValueError):
        central_site_bound(10, (0.5,), 0.3)
