"""Double-double arithmetic and exact trigonometric tables.

The spectral route sums terms sin(pi*nu*z/a) * sin(pi*nu/a) * w_nu over
modes nu. Far from the boundaries these terms cancel almost completely:
the true sum scales like (s*sqrt(pq))**(z-1) and can sit fifteen or more
orders of magnitude below the largest term, so a plain binary64
accumulation returns rounding noise there. All spectral accumulations
therefore run in double-double precision, roughly 31 significant digits,
with each quantity held as an unevaluated pair hi + lo of binary64
numbers.

Products use Dekker splitting (no FMA assumed); sums use the Knuth
two-sum. Reductions go through math.fsum, which is exact over the
expanded list of hi and lo parts. Sines of rational multiples of pi come
from a per-denominator quarter-wave table built once with mpmath and
addressed by exact integer reduction, so symmetry relations such as
sin(pi*(a-z)*nu/a) = (-1)**(nu+1) * sin(pi*z*nu/a) hold bit for bit.

All pair functions accept and return (hi, lo) tuples whose elements are
float64 scalars or ndarrays; scalars and arrays mix freely under numpy
broadcasting.
"""

import math
from functools import lru_cache

import mpmath
import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a, b):
    # requires |a| >= |b| elementwise
    s = a + b
    err = b - (s - a)
    return s, err


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    lo = a - hi
    return hi, lo


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def dd(x):
    """Promote a float or ndarray to a dd pair with zero low part."""
    x = np.asarray(x, dtype=np.float64)
    return x, np.zeros_like(x)


def one_minus(x):
    """1 - x as an exact dd pair (two_sum is error free here)."""
    return two_sum(1.0, -np.asarray(x, dtype=np.float64))


def add(x, y):
    s, e = two_sum(x[0], y[0])
    e = e + x[1] + y[1]
    return quick_two_sum(s, e)


def neg(x):
    return -x[0], -x[1]


def sub(x, y):
    return add(x, neg(y))


def mul(x, y):
    p, e = two_prod(x[0], y[0])
    e = e + x[0] * y[1] + x[1] * y[0]
    return quick_two_sum(p, e)


def mul_f(x, f):
    """dd pair times plain float64."""
    p, e = two_prod(x[0], f)
    e = e + x[1] * f
    return quick_two_sum(p, e)


def div(x, y):
    q1 = x[0] / y[0]
    r = sub(x, mul_f(y, q1))
    q2 = r[0] / y[0]
    r = sub(r, mul_f(y, q2))
    q3 = r[0] / y[0]
    s, e = quick_two_sum(q1, q2)
    return add((s, e), dd(q3))


def recip(y):
    return div(dd(np.ones_like(np.asarray(y[0]))), y)


def sqrt(x):
    """Square root of a scalar dd pair (one Newton step on binary64 seed)."""
    if x[0] < 0.0:
        raise ValueError("dd sqrt of negative value")
    if x[0] == 0.0:
        return 0.0, 0.0
    r = math.sqrt(x[0])
    t = div(x, (r, 0.0))
    s, e = add((r, 0.0), t)
    return s * 0.5, e * 0.5


def powi(x, n):
    """Integer power of a scalar dd pair by binary exponentiation."""
    if n < 0:
        return recip(powi(x, -n))
    acc = (1.0, 0.0)
    base = x
    while n:
        if n & 1:
            acc = mul(acc, base)
        base = mul(base, base)
        n >>= 1
    return acc


def total(x):
    """Exact reduction of a dd array to a scalar dd pair.

    math.fsum over the concatenated hi and lo parts is exact, so the
    result does not depend on summation order; the low part is recovered
    from a second fsum including the negated high part.
    """
    terms = np.asarray(x[0]).ravel().tolist() + np.asarray(x[1]).ravel().tolist()
    hi = math.fsum(terms)
    terms.append(-hi)
    lo = math.fsum(terms)
    return hi, lo


def to_float(x):
    return float(x[0]) + float(x[1])


@lru_cache(maxsize=128)
def quarter_sine_table(a):
    """Read-only dd table of sin(pi*k/(2a)) for k = 0..a."""
    if a < 1:
        raise ValueError("table denominator must be a positive integer")
    with mpmath.workdps(40):
        vals = [mpmath.sinpi(mpmath.mpf(k) / (2 * a)) for k in range(a + 1)]
        hi = np.array([float(v) for v in vals])
        lo = np.array([float(v - h) for v, h in zip(vals, hi.tolist())])
    hi.setflags(write=False)
    lo.setflags(write=False)
    return hi, lo


def sin_pi_frac(j, a):
    """sin(pi*j/a) for integer j (scalar or array) as a dd pair.

    Reduction is exact: the angle is folded onto the quarter-wave table
    modulo 4a in integer arithmetic, so equal angles give bitwise equal
    values and multiples of pi give exact zeros.
    """
    hi_t, lo_t = quarter_sine_table(a)
    j = np.asarray(j, dtype=np.int64)
    m = np.mod(2 * j, 4 * a)
    negate = m >= 2 * a
    m = np.where(negate, m - 2 * a, m)
    m = np.where(m > a, 2 * a - m, m)
    sign = np.where(negate, -1.0, 1.0)
    return sign * hi_t[m], sign * lo_t[m]


def cos_pi_frac(nu, a):
    """cos(pi*nu/a) for integer nu as a dd pair, via cos t = sin(pi/2 - t)."""
    hi_t, lo_t = quarter_sine_table(a)
    n = a - 2 * np.asarray(nu, dtype=np.int64)
    sign = np.where(n < 0, -1.0, 1.0)
    idx = np.abs(n)
    if np.any(idx > a):
        raise ValueError("mode index outside 0..a")
    return sign * hi_t[idx], sign * lo_t[idx]
