"""Reset-rate sensitivity of the ruin probability.

h_z(gamma) = d q_z / d gamma decides whether raising the reset rate hurts
(h > 0, more ruin) or protects (h < 0) a walker started at z.  Writing the
ruin probability as a ratio of resolvent-weighted mode sums and
differentiating gives h = (-S1*S2 + S3*S4)/S2**2 with

    S1 = sum_nu A_nu * lam_nu / (1 - lam_nu*s)**2
    S2 = sum_nu (A_nu + B_nu) / (1 - lam_nu*s)
    S3 = sum_nu A_nu / (1 - lam_nu*s)
    S4 = sum_nu (A_nu + B_nu) * lam_nu / (1 - lam_nu*s)**2

at s = 1 - gamma.  S2 and S3 carry the plain resolvent weight, not the
excursion weight lam*s/(1 - lam*s); the two agree away from the boundary
sites but only the former stays correct at z = 1 and z = a - 1 (their
difference is the step-one absorption mass, which vanishes elsewhere).

The common coefficient scale cancels in h, which reduces to

    h = c * (E*O2 - O*E2) / (c*E + O)**2,    c = (q/p)**(a/2)

with E, O the ruin/survival mode sums and E2, O2 their lam*w**2-weighted
companions.  The numerator cancels catastrophically near the sign-change
site, so the double-double evaluation carries a certified noise bound and
falls back to mpmath at escalated precision whenever the bound cannot
vouch for the target accuracy, mirroring the discipline of the ruin ratio
itself.  At the even-a midpoint the parity structure makes the numerator
an exact bitwise zero; that identity is asserted, never assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import mpmath

from . import _dd
from .errors import NumericError, StructuralViolationError
from .spectral_core import (
    WalkConfig,
    _bias_power,
    _eo_sums,
    _log_qp,
    _mode_frame,
    midpoint_value,
    ruin_probability_spectral,
)

__all__ = [
    "CriticalPointReport",
    "DerivativeComponents",
    "bias_shift_coefficient",
    "central_site_bound",
    "derivative",
    "midpoint_invariance_sweep",
    "sign_change",
]

# declared tolerance for the even-a midpoint zero; the structural branch
# actually returns bitwise 0.0, so this is pure slack
_ZERO_TOL = 1e-9

# the fast path must certify both a small absolute error and a sign-certain
# relative one; boundary-site derivatives can be genuinely tiny (1e-14 and
# far below at large a) yet meaningfully signed, so anything the bound
# cannot vouch for escalates to mpmath instead of being classified away
_DD_BOUND_CAP = 1e-13
_DD_REL_GUARD = 0.01


@dataclass(frozen=True)
class DerivativeComponents:
    """The four resolvent sums and the assembled derivative.

    h is mathematically (-s1*s2 + s3*s4)/s2**2 but is evaluated through the
    reduced scale-free ratio above, so it stays accurate where naive
    recombination of the binary64 fields would cancel to noise.  The s
    fields are diagnostics at literal coefficient scale; under extreme bias
    they may saturate to 0 or inf even though h remains finite.
    """

    s1: float
    s2: float
    s3: float
    s4: float
    h: float


@dataclass(frozen=True)
class CriticalPointReport:
    """Sign-change scan of h_z over the interior sites of one (a, p, gamma).

    bracket is the adjacent site pair with opposite signs, degenerating to
    (site, site) when a site carries an exact zero (the even-a midpoint).
    z_cross linearly interpolates inside the bracket; the discrete chain
    has no dynamics at fractional z, so this is a reporting convention for
    tracking how the crossing shifts, nothing more.
    """

    a: int
    p: float
    gamma: float
    h_values: Tuple[float, ...]
    bracket: Tuple[int, int]
    z_cross: float
    midpoint_exact: bool


def _coef_scale(log_k: float, value: float) -> float:
    """value * exp(log_k) without overflowing the intermediate."""
    if value == 0.0 or not math.isfinite(log_k):
        return 0.0 if value == 0.0 else math.copysign(math.inf, value)
    m = log_k + math.log(abs(value))
    if m > 709.0:
        return math.copysign(math.inf, value)
    if m < -745.0:
        return math.copysign(0.0, value)
    return math.copysign(math.exp(m), value)


def _mp_components(a: int, z: int, p: float, gamma: float):
    """Re-evaluate the reduced derivative in mpmath, escalating precision.

    Acceptance needs every mode sum resolved to 20 significant digits and
    the cancelling numerator E*O2 - O*E2 resolved to 15; precision doubles
    until both hold.  Same expression tree as the fast path.
    """
    dps = 60
    while dps <= 3200:
        with mpmath.workdps(dps):
            pm = mpmath.mpf(p)
            s = 1 - mpmath.mpf(gamma)
            root = 2 * mpmath.sqrt(pm * (1 - pm))
            E = O = E2 = O2 = mpmath.mpf(0)
            big = big2 = mpmath.mpf(0)
            for nu in range(1, a):
                lam = root * mpmath.cospi(mpmath.mpf(nu) / a)
                w = 1 / (1 - lam * s)
                g = mpmath.sinpi(mpmath.mpf(nu * z) / a) * mpmath.sinpi(mpmath.mpf(nu) / a) * w
                g2 = g * lam * w
                sign = 1 if nu % 2 else -1
                E += g
                O += sign * g
                E2 += g2
                O2 += sign * g2
                big = max(big, abs(g))
                big2 = max(big2, abs(g2))
            cut = mpmath.mpf(10) ** (20 - dps)
            if (abs(E) > big * cut and abs(O) > big * cut
                    and abs(E2) > big2 * cut and abs(O2) > big2 * cut):
                ja = E * O2
                jb = O * E2
                j = ja - jb
                if abs(j) > max(abs(ja), abs(jb)) * mpmath.mpf(10) ** (15 - dps):
                    c = ((1 - pm) / pm) ** (mpmath.mpf(a) / 2)
                    h = float(c * j / (c * E + O) ** 2)
                    lqp = float(mpmath.log((1 - pm) / pm))
                    base = math.log(2.0 / a) + 0.5 * (math.log(p) + math.log(1.0 - p))
                    ka = base + 0.5 * z * lqp
                    kb = base - 0.5 * (a - z) * lqp
                    s1 = _coef_scale(ka, float(E2))
                    s3 = _coef_scale(ka, float(E))
                    s2 = _coef_scale(ka, float(E)) + _coef_scale(kb, float(O))
                    s4 = _coef_scale(ka, float(E2)) + _coef_scale(kb, float(O2))
                    return s1, s2, s3, s4, h
        dps *= 2
    raise NumericError(
        f"derivative mode sums exhausted escalated precision at a={a}, z={z}, "
        f"p={p}, gamma={gamma}"
    )


def derivative(config: WalkConfig) -> DerivativeComponents:
    """The gamma-derivative of the ruin probability at one configuration.

    Requires an interior start and 0 < gamma < 1.  The returned h carries a
    certified error of at most 1e-13 and at most one percent of |h|, so its
    sign is always trustworthy; the even-a midpoint is an exact structural
    zero (bitwise 0.0), independent of bias.
    """
    a, z, p, gamma = config.a, config.z, float(config.p), config.gamma
    if not 0 < z < a:
        raise ValueError("derivative needs an interior start site")
    if not 0.0 < gamma < 1.0:
        raise ValueError("derivative is defined for 0 < gamma < 1")

    frame = _mode_frame(a, p, gamma)
    E, O, fl, E2, O2, fl2 = _eo_sums(frame, a, z, want_lam_w2=True)

    lqp = _log_qp(p)
    base = math.log(2.0 / a) + 0.5 * (math.log(p) + math.log(1.0 - p))
    log_ka = base + 0.5 * z * lqp
    log_kb = base - 0.5 * (a - z) * lqp

    ef, of = _dd.to_float(E), _dd.to_float(O)
    e2f, o2f = _dd.to_float(E2), _dd.to_float(O2)

    def fields(h: float) -> DerivativeComponents:
        s1 = _coef_scale(log_ka, e2f)
        s3 = _coef_scale(log_ka, ef)
        s2 = _coef_scale(log_ka, ef) + _coef_scale(log_kb, of)
        s4 = _coef_scale(log_ka, e2f) + _coef_scale(log_kb, o2f)
        return DerivativeComponents(s1=s1, s2=s2, s3=s3, s4=s4, h=h)

    if 2 * z == a:
        # even modes vanish on exact signed table zeros and odd modes agree
        # term by term, so both sum pairs must coincide bitwise
        if not (float(E[0]) == float(O[0]) and float(E[1]) == float(O[1])
                and float(E2[0]) == float(O2[0]) and float(E2[1]) == float(O2[1])):
            raise StructuralViolationError(
                f"midpoint parity identity broken at a={a}, p={p}, gamma={gamma}"
            )
        return fields(0.0)

    t = 0.5 * a * lqp
    if abs(t) <= 300.0:
        c = _bias_power(a, p)
        cf = _dd.to_float(c)
        ja = _dd.mul(E, O2)
        jb = _dd.mul(O, E2)
        j = _dd.sub(ja, jb)
        jf = _dd.to_float(j)
        den = _dd.add(_dd.mul(c, E), O)
        df = _dd.to_float(den)
        # noise budget: sum floors propagated through the products, plus
        # slack for the dd product/ratio roundings themselves
        ej = (fl * (abs(o2f) + abs(e2f)) + fl2 * (abs(ef) + abs(of))
              + (abs(_dd.to_float(ja)) + abs(_dd.to_float(jb))) * 2.0 ** -96)
        eden = (cf + 1.0) * fl + abs(df) * 2.0 ** -96
        if df > 16.0 * eden:
            h_dd = _dd.div(_dd.mul(c, j), _dd.mul(den, den))
            h = _dd.to_float(h_dd)
            bound = cf * (ej / df**2 + 2.0 * abs(jf) * eden / abs(df) ** 3)
            if bound <= _DD_BOUND_CAP and bound <= _DD_REL_GUARD * abs(h):
                return fields(h)

    s1, s2, s3, s4, h = _mp_components(a, z, p, gamma)
    return DerivativeComponents(s1=s1, s2=s2, s3=s3, s4=s4, h=h)


def sign_change(a: int, p: float, gamma: float) -> CriticalPointReport:
    """Locate the unique harmful-to-protective transition of h_z.

    Scans the interior sites and demands the structure the theory
    guarantees: positive at z=1, negative at z=a-1, exactly one transition,
    with at most one zero site sitting between the blocks.  Every computed
    h is sign-certified, so classification is by sign alone; only an exact
    0.0 (the structural midpoint zero) counts as a zero site.  Anything
    else raises StructuralViolationError; such a finding would falsify the
    uniqueness result and must surface loudly.
    """
    if a < 3:
        raise ValueError("sign-change scan needs a >= 3")
    h_values = tuple(
        derivative(WalkConfig(a=a, z=z, p=p, gamma=gamma)).h for z in range(1, a)
    )
    signs = [0 if v == 0.0 else (1 if v > 0.0 else -1) for v in h_values]

    if signs[0] != 1 or signs[-1] != -1:
        raise StructuralViolationError(
            f"boundary derivative signs violated at a={a}, p={p}, gamma={gamma}: "
            f"h_1={h_values[0]:.3e}, h_{a - 1}={h_values[-1]:.3e}"
        )
    nonzero = [(i, s) for i, s in enumerate(signs) if s]
    flips = [
        (i1, i2)
        for (i1, s1), (i2, s2) in zip(nonzero, nonzero[1:])
        if s1 != s2
    ]
    if len(flips) != 1 or signs.count(0) > 1:
        raise StructuralViolationError(
            f"expected exactly one sign change at a={a}, p={p}, gamma={gamma}, "
            f"got signs {signs}"
        )
    zeros = [i for i, s in enumerate(signs) if s == 0]
    lo, hi = flips[0]
    if zeros and not lo < zeros[0] < hi:
        raise StructuralViolationError(
            f"zero site outside the transition at a={a}, p={p}, gamma={gamma}"
        )

    if zeros:
        site = zeros[0] + 1
        bracket = (site, site)
        z_cross = float(site)
    else:
        site = lo + 1
        bracket = (site, site + 1)
        h0, h1 = h_values[lo], h_values[hi]
        z_cross = site + h0 / (h0 - h1)

    midpoint_exact = a % 2 == 0 and abs(h_values[a // 2 - 1]) <= _ZERO_TOL
    return CriticalPointReport(
        a=a,
        p=float(p),
        gamma=float(gamma),
        h_values=h_values,
        bracket=bracket,
        z_cross=z_cross,
        midpoint_exact=midpoint_exact,
    )


def midpoint_invariance_sweep(a: int, p_values, gamma_values) -> float:
    """Largest deviation of q_{a/2}(gamma) from its gamma-free closed form.

    Even a only; the sweep is the numerical witness that resetting has
    exactly zero effect at the midpoint site.
    """
    if a % 2:
        raise ValueError("midpoint invariance is an even-a property")
    z = a // 2
    worst = 0.0
    for p in p_values:
        target = midpoint_value(a, p)
        for gamma in gamma_values:
            q = ruin_probability_spectral(WalkConfig(a=a, z=z, p=p, gamma=gamma))
            worst = max(worst, abs(q - target))
    return worst


def bias_shift_coefficient(a: int, gamma: float, eps: float = 1e-3) -> float:
    """First-order shift coefficient of the crossing under bias, odd a.

    Central-differences z_cross across p = 1/2 +- eps and scales per the
    expansion z_cross = a/2 + C*(p - q)/2 + O((p-q)**2): the measured
    crossing moves toward the favored boundary, so C > 0 with this
    orientation.  eps balances the quadratic truncation against
    cancellation in the z_cross difference.
    """
    if a % 2 == 0:
        raise ValueError("the bias shift is an odd-a property")
    up = sign_change(a, 0.5 + eps, gamma).z_cross
    down = sign_change(a, 0.5 - eps, gamma).z_cross
    return (up - down) / (2.0 * eps)


def central_site_bound(a: int, p_values, gamma: float) -> float:
    """a * max |h| over the two central sites and a bias grid, odd a.

    The scaled maximum stays bounded as a grows: no integer site is exactly
    reset-neutral for odd a, but the two central sites are nearly so, with
    sensitivity decaying like 1/a.
    """
    if a % 2 == 0:
        raise ValueError("the central-site bound is an odd-a property")
    worst = 0.0
    for p in p_values:
        for z in ((a - 1) // 2, (a + 1) // 2):
            h = derivative(WalkConfig(a=a, z=z, p=p, gamma=gamma)).h
            worst = max(worst, abs(h))
    return a * worst
