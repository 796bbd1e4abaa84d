"""Walk configuration and the closed-form spectral route.

The walk lives on sites 0..a with absorbing ends. Each tick resets the
walker to its starting site z with probability gamma; otherwise it steps
right with probability p and left with probability q = 1 - p. Write
s = 1 - gamma. Conditional on never resetting, the interior transition
operator conjugated by the diagonal weight (q/p)**(x/2) is symmetric
tridiagonal with eigenvalues

    lambda_nu = 2*sqrt(p*q)*cos(pi*nu/a),   nu = 1..a-1,

and eigenfunctions sin(pi*nu*x/a). The reset-free absorption
probabilities at exactly step k factor over modes as

    u_k = sum_nu A_nu * lambda_nu**(k-1)   (ruin side),
    v_k = sum_nu B_nu * lambda_nu**(k-1)   (escape side),

with coefficients

    A_nu = sqrt(p*q) * (2/a) * (q/p)**(z/2)     * sin(pi*nu*z/a)     * sin(pi*nu/a),
    B_nu = sqrt(p*q) * (2/a) * (p/q)**((a-z)/2) * sin(pi*nu*(a-z)/a) * sin(pi*nu/a).

The lambda**(k-1) normalisation is fixed by propagating the walk one
step at a time and is validated against the dynamic-programming oracle
in the test suite; see tests for the boundary cases (z = 1 and z = a-1)
that pin it down. Resetting turns the walk into a renewal process over
excursions from z, and summing the geometric series in s gives the ruin
probability as a ratio of resolvent-weighted mode sums:

    w_nu  = 1 / (1 - lambda_nu * s),
    ruin  = sum_nu A_nu * w_nu / sum_nu (A_nu + B_nu) * w_nu.

Numerics. The alternating signs of sin(pi*nu*z/a) cancel the mode sums
down to order (2*s*sqrt(p*q))**(z-1), which for mid-interval z and small
s sits far below the binary64 rounding noise of the individual terms.
All mode sums are therefore accumulated in double-double precision with
exact sine tables (module _dd); reductions use math.fsum and are exact,
so summation order does not affect the result. The common magnitude
(q/p)**(a/2) between the two sums is applied as a separate factor, in
log space when it would overflow, so strong bias and large a stay
representable. Every returned ratio comes with a rigorous rounding
bound derived from the per-sum noise floors; when the fast path cannot
certify the bound the same closed form is re-evaluated in mpmath at
whatever working precision the cancellation depth demands (deep
interior z under heavy resetting and strong bias), so accuracy never
degrades silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import mpmath
import numpy as np

from . import _dd
from .errors import NumericError, StructuralViolationError

__all__ = [
    "WalkConfig",
    "SpectralMode",
    "SpectralDecomposition",
    "eigenvalue",
    "decompose",
    "reset_weight",
    "ruin_probability_spectral",
    "ruin_profile_spectral",
    "classical_ruin",
    "midpoint_value",
]


@dataclass(frozen=True)
class WalkConfig:
    """Parameters of one walk: interval size, start site, bias, reset rate.

    a: number of sites minus one; boundaries 0 and a absorb. Integer >= 2.
    z: starting (and reset) site, integer in 0..a.
    p: probability of a right step, strictly inside (0, 1).
    gamma: per-tick reset probability, in [0, 1). gamma = 1 is rejected
        because the walker would reset forever and never absorb.
    """

    a: int
    z: int
    p: float
    gamma: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.a, (int, np.integer)) or self.a < 2:
            raise ValueError(f"a must be an integer >= 2, got {self.a!r}")
        if not isinstance(self.z, (int, np.integer)) or not 0 <= self.z <= self.a:
            raise ValueError(f"z must be an integer in 0..{self.a}, got {self.z!r}")
        p = self.p
        if not (isinstance(p, (int, float, np.floating)) and 0.0 < p < 1.0):
            raise ValueError(f"p must lie strictly inside (0, 1), got {self.p!r}")
        g = self.gamma
        if not (isinstance(g, (int, float, np.floating)) and 0.0 <= g < 1.0):
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma!r}")

    @property
    def q(self) -> float:
        """Left-step probability 1 - p."""
        return 1.0 - float(self.p)


@dataclass(frozen=True)
class SpectralMode:
    """One eigenmode: index nu, eigenvalue lam, scaled coefficients A and B.

    A and B are stored at unit scale; multiply by exp(log_scale) of the
    owning decomposition to recover the literal coefficient values.
    """

    nu: int
    lam: float
    A: float
    B: float


@dataclass(frozen=True)
class SpectralDecomposition:
    """All a-1 modes of a configuration plus the common magnitude factor.

    log_scale is the natural log of the factor removed from every A and
    B so that strong bias (the (q/p)**(z/2) growth) cannot overflow the
    stored coefficients. Ratios of coefficient sums are unaffected.
    """

    config: WalkConfig
    modes: Tuple[SpectralMode, ...]
    log_scale: float


def _log_qp(p: float) -> float:
    # ln(q/p), stable for p near 0 or 1
    return math.log1p(-p) - math.log(p)


def eigenvalue(a: int, p: float, nu: int) -> float:
    """Eigenvalue 2*sqrt(p*(1-p))*cos(pi*nu/a) of the symmetrized interior operator."""
    if not isinstance(a, (int, np.integer)) or a < 2:
        raise ValueError(f"a must be an integer >= 2, got {a!r}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p!r}")
    if not isinstance(nu, (int, np.integer)) or not 1 <= nu <= a - 1:
        raise ValueError(f"mode index must lie in 1..{a - 1}, got {nu!r}")
    r = _dd.sqrt(_dd.mul((float(p), 0.0), _dd.one_minus(float(p))))
    lam = _dd.mul(_dd.mul_f(_dd.cos_pi_frac(nu, a), 2.0), r)
    return _dd.to_float(lam)


def reset_weight(lam: float, gamma: float) -> float:
    """Per-mode resolvent weight w = 1/(1 - lam*(1-gamma)).

    This is the weight attached to each mode in the absorption sums;
    the geometric-series variant lam*(1-gamma)*w differs from it by
    exactly 1, which cancels from interior-site ratios but not at the
    sites adjacent to a boundary, where only this form reproduces the
    linear-solve route.
    """
    if not abs(lam) < 1.0:
        raise ValueError(f"|lam| must be < 1, got {lam!r}")
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma!r}")
    x = lam * (1.0 - gamma)
    return 1.0 / (1.0 - x)


def decompose(config: WalkConfig) -> SpectralDecomposition:
    """Eigenvalues and absorption coefficients for every mode.

    Coefficients are normalised so that the reset-free walk satisfies
    u_k = sum_nu A_nu*lam_nu**(k-1) and v_k = sum_nu B_nu*lam_nu**(k-1);
    the common magnitude max over the two coefficient families is pulled
    out into log_scale.
    """
    a, z, p = config.a, config.z, float(config.p)
    q = 1.0 - p
    nu = np.arange(1, a)
    r = _dd.sqrt(_dd.mul((p, 0.0), _dd.one_minus(p)))
    lam = _dd.mul(_dd.mul_f(_dd.cos_pi_frac(nu, a), 2.0), r)

    sin_nu = _dd.sin_pi_frac(nu, a)[0]
    sin_az = _dd.sin_pi_frac(nu * z, a)[0]
    sin_bz = _dd.sin_pi_frac(nu * (a - z), a)[0]

    lqp = _log_qp(p)
    base = math.log(2.0 / a) + 0.5 * (math.log(p) + math.log(q))
    log_a = base + 0.5 * z * lqp
    log_b = base - 0.5 * (a - z) * lqp
    log_scale = max(log_a, log_b)
    coef_a = math.exp(log_a - log_scale) * sin_az * sin_nu
    coef_b = math.exp(log_b - log_scale) * sin_bz * sin_nu

    modes = tuple(
        SpectralMode(nu=int(n), lam=float(lam[0][i] + lam[1][i]),
                     A=float(coef_a[i]), B=float(coef_b[i]))
        for i, n in enumerate(nu)
    )
    return SpectralDecomposition(config=config, modes=modes, log_scale=log_scale)


def _mode_frame(a: int, p: float, gamma: float):
    """Per-mode dd tables shared by every z of a (a, p, gamma) triple."""
    nu = np.arange(1, a)
    r = _dd.sqrt(_dd.mul((p, 0.0), _dd.one_minus(p)))
    lam = _dd.mul(_dd.mul_f(_dd.cos_pi_frac(nu, a), 2.0), r)
    s = _dd.one_minus(gamma)
    w = _dd.div(_dd.dd(np.ones(a - 1)), _dd.sub((1.0, 0.0), _dd.mul(lam, s)))
    sin_nu = _dd.sin_pi_frac(nu, a)
    parity = np.where(nu % 2 == 0, -1.0, 1.0)
    return nu, lam, w, sin_nu, parity


def _eo_sums(frame, a: int, z: int, want_lam_w2: bool = False):
    """Resolvent-weighted mode sums for one start site.

    Returns (E, O, floor) where E = sum_nu sigma_nu*w_nu with
    sigma_nu = sin(pi*nu*z/a)*sin(pi*nu/a), O the same sum with the
    (-1)**(nu+1) parity signs of the escape side, and floor the
    double-double noise level of either reduction (anything below it
    carries no significant digits). With want_lam_w2 also returns the
    pair weighted by lam*w**2 plus its own floor, as needed by the
    gamma-derivative.
    """
    nu, lam, w, sin_nu, parity = frame
    sigma = _dd.mul(_dd.sin_pi_frac(nu * z, a), sin_nu)
    g = _dd.mul(sigma, w)
    even = _dd.total(g)
    odd = _dd.total((parity * g[0], parity * g[1]))
    floor = float(np.abs(g[0]).sum()) * 2.0 ** -98
    if not want_lam_w2:
        return even, odd, floor
    g2 = _dd.mul(g, _dd.mul(lam, w))
    even2 = _dd.total(g2)
    odd2 = _dd.total((parity * g2[0], parity * g2[1]))
    floor2 = float(np.abs(g2[0]).sum()) * 2.0 ** -98
    return even, odd, floor, even2, odd2, floor2


def _bias_power(a: int, p: float):
    """(q/p)**(a/2) as a dd pair; caller checks representability."""
    qp = _dd.div(_dd.one_minus(p), (p, 0.0))
    c = _dd.powi(qp, a // 2)
    if a % 2:
        c = _dd.mul(c, _dd.sqrt(qp))
    return c


def _saturate(x: float) -> float:
    """1/(1 + exp(x)) with graceful saturation at the ends."""
    if x >= 745.0:
        return 0.0
    if x <= -745.0:
        return 1.0
    return 1.0 / (1.0 + math.exp(x))


# Certified absolute-error budget of the double-double fast path; a
# ratio whose computable noise bound exceeds this is re-derived in
# mpmath at escalated precision instead of being returned degraded.
_DD_ERROR_TARGET = 1e-13


def _sum_ratio(a: int, z: int, p: float, gamma: float,
               even, odd, floor: float) -> float:
    """Assemble ruin = c*E / (c*E + O) with c = (q/p)**(a/2).

    Both sums are mathematically positive and the ratio is monotone in
    each, so the per-sum noise floor converts into a rigorous bound on
    the assembled probability. The double-double fast path returns only
    when that bound clears _DD_ERROR_TARGET; every other case falls
    through to _mp_ratio.

    At the exact midpoint 2*z == a the even modes carry a factor
    sin(pi*nu/2) = 0 while the odd modes of the two sums coincide term
    by term, so E == O bitwise (the sine table stores exact signed
    zeros and the fsum reductions are exact) and the ratio collapses to
    the reset-free c/(1+c) whatever the noise floor says. The equality
    is asserted rather than assumed.
    """
    t = 0.5 * a * _log_qp(p)
    if 2 * z == a:
        if not (float(even[0]) == float(odd[0])
                and float(even[1]) == float(odd[1])):
            raise StructuralViolationError(
                f"midpoint mode sums must agree bitwise at a={a}, p={p}, "
                f"gamma={gamma}: E={even!r}, O={odd!r}"
            )
        return _saturate(-t)
    e_hi, o_hi = float(even[0]), float(odd[0])
    if e_hi > floor and o_hi > floor:
        if abs(t) <= 300.0:
            c = _bias_power(a, p)
            cf = _dd.to_float(c)
            num = _dd.mul(c, even)
            den = _dd.add(num, odd)
            d = _dd.to_float(den)
            noise = (cf + 1.0) * floor
            if d > 16.0 * noise and 2.2 * noise / d <= _DD_ERROR_TARGET:
                return min(1.0, max(0.0, _dd.to_float(_dd.div(num, den))))
        else:
            # c overflows binary64: assemble x = ln(O/E) - ln(c) instead
            r_e, r_o = floor / e_hi, floor / o_hi
            if max(r_e, r_o) <= 0.0625:
                x = math.log(_dd.to_float(_dd.div(odd, even))) - t
                dx = 1.1 * (r_e + r_o)
                if dx * min(0.25, math.exp(dx - abs(x))) <= _DD_ERROR_TARGET:
                    return _saturate(x)
    return _mp_ratio(a, z, p, gamma)


def _mp_ratio(a: int, z: int, p: float, gamma: float) -> float:
    """The same spectral ratio at escalated working precision.

    Covers the corners where the double-double floor cannot certify the
    target: the cancellation depth of a mode sum grows like
    min(z, a-z) * ln(1/(2*s*sqrt(p*q))), so precision is raised until
    both sums retain at least twenty significant digits.
    """
    dps = 50
    while dps <= 1600:
        with mpmath.workdps(dps):
            pm = mpmath.mpf(p)
            sm = 1 - mpmath.mpf(gamma)
            r2 = 2 * mpmath.sqrt(pm * (1 - pm))
            e_sum = mpmath.mpf(0)
            o_sum = mpmath.mpf(0)
            big = mpmath.mpf(0)
            for nu in range(1, a):
                lam = r2 * mpmath.cospi(mpmath.mpf(nu) / a)
                g = (mpmath.sinpi(mpmath.mpf(nu * z) / a)
                     * mpmath.sinpi(mpmath.mpf(nu) / a)
                     / (1 - lam * sm))
                e_sum += g
                o_sum += g if nu % 2 else -g
                big = max(big, abs(g))
            cutoff = big * mpmath.mpf(10) ** (20 - dps)
            if e_sum > cutoff and o_sum > cutoff:
                c = ((1 - pm) / pm) ** (mpmath.mpf(a) / 2)
                return float(c * e_sum / (c * e_sum + o_sum))
        dps *= 2
    raise NumericError(
        f"mode sums exhausted escalated precision at a={a}, z={z}, "
        f"p={p}, gamma={gamma}"
    )


def ruin_probability_spectral(config: WalkConfig) -> float:
    """Ruin probability by the closed-form spectral ratio."""
    a, z = config.a, config.z
    if z == 0:
        return 1.0
    if z == a:
        return 0.0
    p, gamma = float(config.p), float(config.gamma)
    frame = _mode_frame(a, p, gamma)
    even, odd, floor = _eo_sums(frame, a, z)
    return _sum_ratio(a, z, p, gamma, even, odd, floor)


def ruin_profile_spectral(a: int, p: float, gamma: float) -> np.ndarray:
    """Ruin probability at every site, boundaries included (length a+1)."""
    if not isinstance(a, (int, np.integer)) or a < 2:
        raise ValueError(f"a must be an integer >= 2, got {a!r}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p!r}")
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma!r}")
    p, gamma = float(p), float(gamma)
    frame = _mode_frame(a, p, gamma)
    out = np.empty(a + 1)
    out[0], out[a] = 1.0, 0.0
    for z in range(1, a):
        even, odd, floor = _eo_sums(frame, a, z)
        out[z] = _sum_ratio(a, z, p, gamma, even, odd, floor)
    return out


def classical_ruin(a: int, z: int, p: float) -> float:
    """Reset-free ruin probability, stable under strong bias.

    ((q/p)**z - (q/p)**a) / (1 - (q/p)**a) for p != 1/2, else 1 - z/a;
    the linear branch is taken for |p - 1/2| < 1e-12 where the
    exponential form degenerates to 0/0.
    """
    if not isinstance(a, (int, np.integer)) or a < 2:
        raise ValueError(f"a must be an integer >= 2, got {a!r}")
    if not isinstance(z, (int, np.integer)) or not 0 <= z <= a:
        raise ValueError(f"z must be an integer in 0..{a}, got {z!r}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p!r}")
    if z == 0:
        return 1.0
    if z == a:
        return 0.0
    if abs(p - 0.5) < 1e-12:
        return 1.0 - z / a
    ell = _log_qp(p)
    if ell > 0.0:
        # drift toward 0: rewrite with non-positive exponents
        return math.expm1((z - a) * ell) / math.expm1(-a * ell)
    # drift toward a: ruin is small; keep it in factored form
    return math.exp(z * ell) * math.expm1((a - z) * ell) / math.expm1(a * ell)


def midpoint_value(a: int, p: float) -> float:
    """Ruin probability from z = a/2 (even a): c/(1+c) with c = (q/p)**(a/2).

    The value is independent of gamma; computed through the log of c so
    extreme bias saturates to 0 or 1 instead of overflowing.
    """
    if not isinstance(a, (int, np.integer)) or a < 2:
        raise ValueError(f"a must be an integer >= 2, got {a!r}")
    if a % 2:
        raise ValueError(f"midpoint value needs even a, got {a!r}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p!r}")
    t = 0.5 * a * _log_qp(p)
    if t >= 0.0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)
