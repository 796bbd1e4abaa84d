"""Ground-truth engines independent of the spectral algebra.

Everything here treats the reset walk as a plain finite Markov chain:
first-step linear systems solved by direct elimination, probability-mass
propagation in time, and direct matrix constructions. No eigenvalue or
coefficient formula from the closed-form route is reused, so agreement
between these oracles and the analytic routes is a genuine cross-check.

Conditioning note. The assembled first-step operator I - s*W - gamma*R
(tridiagonal plus the dense reset column) has condition number of the
order of the expected absorption time, which under heavy resetting from
a deep interior site exceeds 1e16; backward-stable elimination on it
returns garbage without failing any residual check. The exact route
therefore solves the equivalent pair of *killed-walk* systems
(I - s*W)x = boundary influx, whose condition number stays O(a**2), and
combines them through the excursion identity

    ruin(z) = alpha(z) / (alpha(z) + beta(z)),

where alpha/beta are the probabilities that a single reset-free
excursion ends in absorption at 0 / at a before the reset strikes; the
identity is exact because excursions between resets are independent and
identically distributed. Solved without pivoting, the killed tridiagonal
system is subtraction-free apart from its pivot recurrence (bounded away
from zero), so alpha and beta come out with small *componentwise
relative* error however tiny they are, and the ratio inherits it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericError
from .renewal import FiniteTimeDistribution
from .spectral_core import WalkConfig

__all__ = [
    "LinearSystem",
    "build_linear_system",
    "killed_absorption",
    "exact_ruin",
    "exact_ruin_profile",
    "finite_time_dp",
    "discounted_dp",
    "doob_symmetry_check",
    "symmetrized_operator",
    "symmetrized_eigenvalues",
]

# absorption-mass tail must drop below this before truncated series stop
_TAIL = 2.0 ** -48
_MAX_DP_STEPS = 5_000_000


@dataclass(frozen=True)
class LinearSystem:
    """First-step equations for the ruin probability, one row per interior site."""

    dimension: int
    matrix: np.ndarray
    rhs: np.ndarray


def build_linear_system(config: WalkConfig) -> LinearSystem:
    """Encode phi(x) = gamma*phi(z) + (1-gamma)*(p*phi(x+1) + q*phi(x-1)).

    Unknowns are phi(1)..phi(a-1) with phi(0) = 1, phi(a) = 0 folded
    into the right-hand side. The reset term couples every row to
    column z, so the matrix is tridiagonal plus one dense column.
    """
    a, z, p, gamma = config.a, config.z, float(config.p), float(config.gamma)
    q = 1.0 - p
    s = 1.0 - gamma
    n = a - 1
    m = np.eye(n)
    idx = np.arange(n)
    m[idx[:-1], idx[:-1] + 1] -= s * p
    m[idx[1:], idx[1:] - 1] -= s * q
    rhs = np.zeros(n)
    rhs[0] = s * q  # phi(0) = 1 enters through the left step from site 1
    if 1 <= z <= a - 1:
        m[:, z - 1] -= gamma
    elif z == 0:
        rhs += gamma  # phi(0) = 1
    # z == a contributes nothing: phi(a) = 0
    return LinearSystem(dimension=n, matrix=m, rhs=rhs)


def killed_absorption(a: int, p: float, gamma: float):
    """Single-excursion absorption probabilities (alpha, beta), length a+1.

    alpha[x] is the probability that the reset-free walk started at x
    reaches 0 before a and before the first reset fires (each step
    survives with probability s = 1 - gamma); beta[x] the same for a.
    Both solve the killed tridiagonal system (I - s*W)x = influx, done
    here by elimination without pivoting: the pivot recurrence
    d <- 1 - s*s*p*q/d stays above 1/2, every other operation combines
    non-negative quantities, and so each component carries only a small
    relative error regardless of magnitude.
    """
    if not isinstance(a, (int, np.integer)) or a < 2:
        raise ValueError(f"a must be an integer >= 2, got {a!r}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p!r}")
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma!r}")
    p = float(p)
    s = 1.0 - float(gamma)
    sp = s * p
    sq = s * (1.0 - p)
    n = a - 1
    d = np.empty(n)
    ra = np.empty(n)
    rb = np.empty(n)
    d[0] = 1.0
    ra[0] = sq  # influx from the absorbing site 0 into site 1
    rb[0] = sp if n == 1 else 0.0
    for i in range(1, n):
        m = sq / d[i - 1]
        d[i] = 1.0 - m * sp
        ra[i] = m * ra[i - 1]
        rb[i] = m * rb[i - 1] + (sp if i == n - 1 else 0.0)
    if not d.min() > 0.25:
        raise NumericError(
            f"killed-system pivots degenerated at a={a}, p={p}, gamma={gamma}"
        )
    alpha = np.zeros(a + 1)
    beta = np.zeros(a + 1)
    alpha[0] = 1.0
    beta[a] = 1.0
    alpha[n] = ra[n - 1] / d[n - 1]
    beta[n] = rb[n - 1] / d[n - 1]
    for i in range(n - 1, 0, -1):
        alpha[i] = (ra[i - 1] + sp * alpha[i + 1]) / d[i - 1]
        beta[i] = (rb[i - 1] + sp * beta[i + 1]) / d[i - 1]
    return alpha, beta


def exact_ruin(config: WalkConfig) -> float:
    """Ruin probability by direct linear solve (excursion form).

    Excursions between resets are i.i.d., so
    ruin = alpha / (alpha + beta) with the per-excursion absorption
    probabilities of killed_absorption; both terms are non-negative with
    small relative error, hence so is the ratio, at every corner of the
    parameter space.
    """
    if config.z == 0:
        return 1.0
    if config.z == config.a:
        return 0.0
    alpha, beta = killed_absorption(config.a, float(config.p), float(config.gamma))
    az, bz = alpha[config.z], beta[config.z]
    if not az + bz > 0.0:
        raise NumericError(
            f"excursion absorption underflowed at a={config.a}, z={config.z}, "
            f"p={config.p}, gamma={config.gamma}"
        )
    return float(az / (az + bz))


def exact_ruin_profile(a: int, p: float, gamma: float) -> np.ndarray:
    """Ruin probability at every start site (length a+1), two solves total.

    The reset column of the assembled first-step system moves with the
    start site, but the excursion identity needs only the z-independent
    killed-walk solves, so one pair covers the whole profile.
    """
    alpha, beta = killed_absorption(a, p, gamma)
    denom = alpha + beta
    if not denom.min() > 0.0:
        raise NumericError(
            f"excursion absorption underflowed at a={a}, p={p}, gamma={gamma}"
        )
    return alpha / denom


def finite_time_dp(a: int, z: int, p: float, horizon: int) -> FiniteTimeDistribution:
    """u, v, s for k = 1..horizon by direct probability-mass propagation.

    mass[x] is the probability of being interior at site x after k-1
    reset-free steps; absorbing q*mass[1] and p*mass[a-1] at step k is
    exact to floating precision, making this the arbiter for the
    spectral coefficients.
    """
    config = WalkConfig(a=a, z=z, p=p, gamma=0.0)
    if not isinstance(horizon, (int, np.integer)) or horizon < 1:
        raise ValueError(f"horizon must be an integer >= 1, got {horizon!r}")
    q = 1.0 - float(p)
    u = np.zeros(horizon)
    v = np.zeros(horizon)
    mass = np.zeros(a + 1)
    if 1 <= z <= a - 1:
        mass[z] = 1.0
    for k in range(horizon):
        u[k] = q * mass[1]
        v[k] = float(p) * mass[a - 1]
        inner = float(p) * mass[0:a - 1] + q * mass[2:a + 1]
        mass[1:a] = inner
        mass[0] = mass[a] = 0.0
    return FiniteTimeDistribution(config=config, horizon=int(horizon),
                                  u=u, v=v, s=u + v)


def discounted_dp(a: int, z: int, p: float, s: float):
    """(U, S) = (sum_k u_k s^k, sum_k s_k s^k) by truncated propagation.

    Truncation is certified: the remaining interior mass bounds every
    future absorption probability, so for s < 1 the discarded tail is at
    most mass*s**(k+1)/(1-s) and for s = 1 at most mass itself; the loop
    runs until that bound drops below 2**-48, well inside the promised
    2**-40.
    """
    if not 0.0 < s <= 1.0:
        raise ValueError(f"discount s must lie in (0, 1], got {s!r}")
    WalkConfig(a=a, z=z, p=p, gamma=0.0)
    p = float(p)
    q = 1.0 - p
    mass = np.zeros(a + 1)
    if 1 <= z <= a - 1:
        mass[z] = 1.0
    big_u = 0.0
    big_s = 0.0
    power = 1.0  # s**k
    for _ in range(_MAX_DP_STEPS):
        interior = float(mass[1:a].sum())
        tail = interior * (power * s / (1.0 - s) if s < 1.0 else 1.0)
        if tail < _TAIL:
            break
        power *= s
        uk = q * mass[1]
        vk = p * mass[a - 1]
        big_u += uk * power
        big_s += (uk + vk) * power
        inner = p * mass[0:a - 1] + q * mass[2:a + 1]
        mass[1:a] = inner
        mass[0] = mass[a] = 0.0
    else:
        raise NumericError(
            f"discounted propagation did not certify its tail within "
            f"{_MAX_DP_STEPS} steps (a={a}, p={p}, s={s})"
        )
    return big_u, big_s


def _conjugated_operator(a: int, p: float) -> np.ndarray:
    """D^{-1} Q D: interior one-step matrix conjugated by the bias weight."""
    q = 1.0 - p
    n = a - 1
    big_q = np.zeros((n, n))
    idx = np.arange(n)
    big_q[idx[:-1], idx[:-1] + 1] = p
    big_q[idx[1:], idx[1:] - 1] = q
    # diagonal weight (q/p)**(x/2) at sites x = 1..a-1
    x = np.arange(1, a, dtype=float)
    d = np.exp(0.5 * x * (math.log1p(-p) - math.log(p)))
    return (1.0 / d)[:, None] * big_q * d[None, :]


def doob_symmetry_check(a: int, p: float) -> float:
    """Max |P(x,y) - P(y,x)| of the conjugated interior operator.

    The bias conjugation renders the operator symmetric exactly; the
    returned value is pure floating-point asymmetry.
    """
    if not isinstance(a, (int, np.integer)) or a < 2:
        raise ValueError(f"a must be an integer >= 2, got {a!r}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p!r}")
    sym = _conjugated_operator(a, float(p))
    return float(np.abs(sym - sym.T).max())


def symmetrized_operator(a: int, p: float) -> np.ndarray:
    """The conjugated interior operator as a dense matrix (for inspection)."""
    if not isinstance(a, (int, np.integer)) or a < 2:
        raise ValueError(f"a must be an integer >= 2, got {a!r}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p!r}")
    return _conjugated_operator(a, float(p))


def symmetrized_eigenvalues(a: int, p: float) -> np.ndarray:
    """Spectrum of the conjugated operator, descending, by tridiagonal solve.

    Works from the constructed matrix entries (averaging the residual
    floating-point asymmetry of the two off-diagonals), not from any
    closed-form eigenvalue expression, so it is an independent check of
    the spectral route.
    """
    sym = symmetrized_operator(a, p)
    if a == 2:
        return np.array([sym[0, 0]])
    diag = np.diag(sym).copy()
    off = 0.5 * (np.diag(sym, 1) + np.diag(sym, -1))
    vals = scipy.linalg.eigh_tridiagonal(diag, off, eigvals_only=True)
    return vals[::-1].copy()
