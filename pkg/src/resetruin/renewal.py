"""Renewal route: finite-time absorption laws and generating functions.

Between resets the walk is reset-free, so conditioning on the first
reset tick splits every trajectory into independent excursions from z.
With u_k (ruin at exactly step k of the reset-free walk), v_k (escape at
step k), s_k = u_k + v_k and s = 1 - gamma, the restart decomposition
sums to

    ruin = U(s) / S(s),   U(s) = sum_k u_k s^k,   S(s) = sum_k s_k s^k.

U and S are evaluated in closed form through the spectral expansion of
u_k and v_k: summing the geometric series in k gives, per mode,
sum_k lambda**(k-1) s^k = s * (1 + f) with f = lambda*s/(1 - lambda*s)
the reset weight. The algebra is identical to the spectral route; the
code path is deliberately separate (literal a-z sine lookups, weights
built from f, prefactors carried in log space) so transcription slips
in either route cannot hide.

Sums are accumulated in double-double precision for the same
cancellation reasons as in spectral_core, with the same discipline: the
returned ratio carries a rigorous noise bound, and whenever the fast
path cannot certify the target accuracy the renewal expression tree is
re-evaluated in mpmath at whatever precision the cancellation requires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import mpmath
import numpy as np

from . import _dd
from .errors import NumericError, StructuralViolationError
from .spectral_core import WalkConfig, decompose, _log_qp

__all__ = [
    "FiniteTimeDistribution",
    "finite_time_spectral",
    "generating_functions",
    "ruin_probability_renewal",
]


@dataclass(frozen=True)
class FiniteTimeDistribution:
    """Reset-free absorption probabilities by exact step count.

    u[k-1] is the probability of ruin at exactly step k, v[k-1] the same
    for escape at a, s[k-1] their sum; arrays cover k = 1..horizon and
    zero entries are stored, not skipped. config.gamma plays no role in
    these quantities.
    """

    config: WalkConfig
    horizon: int
    u: np.ndarray
    v: np.ndarray
    s: np.ndarray


def finite_time_spectral(config: WalkConfig, horizon: int) -> FiniteTimeDistribution:
    """u, v, s for k = 1..horizon by mode summation.

    Mode sums reproduce the exact parity zeros (k < z or k with the
    wrong parity) only up to rounding, so entries are clipped at 0.
    """
    if not isinstance(horizon, (int, np.integer)) or horizon < 1:
        raise ValueError(f"horizon must be an integer >= 1, got {horizon!r}")
    dec = decompose(config)
    lam = np.array([m.lam for m in dec.modes])
    coef_a = np.array([m.A for m in dec.modes])
    coef_b = np.array([m.B for m in dec.modes])
    scale = math.exp(dec.log_scale)
    k = np.arange(1, horizon + 1)
    powers = lam[None, :] ** (k[:, None] - 1)  # 0**0 == 1 covers a == 2
    u = np.maximum(scale * (powers @ coef_a), 0.0)
    v = np.maximum(scale * (powers @ coef_b), 0.0)
    return FiniteTimeDistribution(config=config, horizon=int(horizon),
                                  u=u, v=v, s=u + v)


def _renewal_sums(config: WalkConfig):
    """Per-side dd sums and log prefactors of the generating functions.

    Returns (log_ma, ta, log_mb, tb) with U = s*exp(log_ma)*ta and
    V = s*exp(log_mb)*tb.
    """
    a, z, p, gamma = config.a, config.z, float(config.p), float(config.gamma)
    q = 1.0 - p
    nu = np.arange(1, a)
    root = _dd.sqrt(_dd.mul((p, 0.0), _dd.one_minus(p)))
    lam_s = _dd.mul(_dd.mul(_dd.mul_f(_dd.cos_pi_frac(nu, a), 2.0), root),
                    _dd.one_minus(gamma))
    f = _dd.div(lam_s, _dd.sub((1.0, 0.0), lam_s))
    w = _dd.add((1.0, 0.0), f)
    sin_nu = _dd.sin_pi_frac(nu, a)
    ga = _dd.mul(_dd.mul(_dd.sin_pi_frac(nu * z, a), sin_nu), w)
    gb = _dd.mul(_dd.mul(_dd.sin_pi_frac(nu * (a - z), a), sin_nu), w)
    ta = _dd.total(ga)
    tb = _dd.total(gb)
    lqp = _log_qp(p)
    base = math.log(2.0 / a) + 0.5 * (math.log(p) + math.log(q))
    log_ma = base + 0.5 * z * lqp
    log_mb = base - 0.5 * (a - z) * lqp
    floor_a = float(np.abs(ga[0]).sum()) * 2.0 ** -98
    floor_b = float(np.abs(gb[0]).sum()) * 2.0 ** -98
    return log_ma, ta, floor_a, log_mb, tb, floor_b


def generating_functions(config: WalkConfig) -> Tuple[float, float]:
    """(U, S) evaluated at s = 1 - gamma.

    U/S is the ruin probability; prefer ruin_probability_renewal for the
    ratio, which stays finite under bias strong enough to overflow U
    itself.
    """
    if config.z == 0 or config.z == config.a:
        # already absorbed at time 0; no absorption at any k >= 1
        return 0.0, 0.0
    s = 1.0 - float(config.gamma)
    log_ma, ta, _, log_mb, tb, _ = _renewal_sums(config)
    big_u = s * math.exp(log_ma) * _dd.to_float(ta)
    big_v = s * math.exp(log_mb) * _dd.to_float(tb)
    return big_u, big_u + big_v


# Certified absolute-error budget of the fast path, matching the
# spectral route's discipline (the constant lives in each module so the
# two implementations share no code).
_DD_ERROR_TARGET = 1e-13


def ruin_probability_renewal(config: WalkConfig) -> float:
    """Ruin probability as the generating-function ratio U/S.

    Evaluated as 1/(1 + V/U) with the V/U magnitude assembled in log
    space, so the answer survives prefactors far outside binary64
    range. The sigmoid argument carries a rigorous noise bound from the
    per-sum floors; when the bound cannot certify _DD_ERROR_TARGET the
    ratio is recomputed by _mp_renewal_ratio at escalated precision.

    At the exact midpoint 2*z == a the two sine families coincide term
    by term (even modes vanish on exact signed zeros in the tables), so
    ta == tb bitwise and the ratio collapses to the reset-free value;
    the bitwise equality is asserted, not assumed.
    """
    if config.z == 0:
        return 1.0
    if config.z == config.a:
        return 0.0
    a, z = config.a, config.z
    p, gamma = float(config.p), float(config.gamma)
    log_ma, ta, floor_a, log_mb, tb, floor_b = _renewal_sums(config)
    if 2 * z == a:
        if not (float(ta[0]) == float(tb[0]) and float(ta[1]) == float(tb[1])):
            raise StructuralViolationError(
                f"midpoint generating-function sums must agree bitwise at "
                f"a={a}, p={p}, gamma={gamma}: ta={ta!r}, tb={tb!r}"
            )
        return _sigmoid_ratio(log_mb - log_ma)
    ta_hi, tb_hi = float(ta[0]), float(tb[0])
    if ta_hi > floor_a and tb_hi > floor_b:
        r_a, r_b = floor_a / ta_hi, floor_b / tb_hi
        if max(r_a, r_b) <= 0.0625:
            x = log_mb - log_ma + math.log(_dd.to_float(_dd.div(tb, ta)))
            # noise of the sums, plus rounding of the log prefactors
            dx = 1.1 * (r_a + r_b) + 4e-16 * (abs(log_ma) + abs(log_mb) + 1.0)
            if dx * min(0.25, math.exp(dx - abs(x))) <= _DD_ERROR_TARGET:
                return _sigmoid_ratio(x)
    return _mp_renewal_ratio(config)


def _mp_renewal_ratio(config: WalkConfig) -> float:
    """The same generating-function ratio at escalated precision.

    Mirrors the _renewal_sums expression tree (reset weights f, sums
    weighted by 1 + f, explicit a-z lookups on the escape side) in
    mpmath, raising the working precision until both sums keep at
    least twenty significant digits.
    """
    a, z = config.a, config.z
    p, gamma = float(config.p), float(config.gamma)
    dps = 50
    while dps <= 1600:
        with mpmath.workdps(dps):
            pm = mpmath.mpf(p)
            qm = 1 - pm
            sm = 1 - mpmath.mpf(gamma)
            root2 = 2 * mpmath.sqrt(pm * qm)
            ta = mpmath.mpf(0)
            tb = mpmath.mpf(0)
            big = mpmath.mpf(0)
            for nu in range(1, a):
                lam_s = root2 * mpmath.cospi(mpmath.mpf(nu) / a) * sm
                w = 1 + lam_s / (1 - lam_s)
                sin_nu = mpmath.sinpi(mpmath.mpf(nu) / a)
                ga = mpmath.sinpi(mpmath.mpf(nu * z) / a) * sin_nu * w
                gb = mpmath.sinpi(mpmath.mpf(nu * (a - z)) / a) * sin_nu * w
                ta += ga
                tb += gb
                big = max(big, abs(ga), abs(gb))
            cutoff = big * mpmath.mpf(10) ** (20 - dps)
            if ta > cutoff and tb > cutoff:
                ratio = (pm / qm) ** (mpmath.mpf(a) / 2) * tb / ta
                return float(1 / (1 + ratio))
        dps *= 2
    raise NumericError(
        f"generating-function sums exhausted escalated precision at "
        f"a={a}, z={z}, p={p}, gamma={gamma}"
    )


def _sigmoid_ratio(x: float) -> float:
    """1/(1 + exp(x)), saturating at the representable ends."""
    if x >= 745.0:
        return 0.0
    if x <= -745.0:
        return 1.0
    return 1.0 / (1.0 + math.exp(x))
