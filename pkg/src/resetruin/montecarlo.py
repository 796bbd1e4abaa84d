"""Monte Carlo estimation of the ruin probability under resetting.

A trajectory is simulated exactly as the chain is defined: one uniform per
tick decides reset-versus-step and the step direction in a single
comparison chain, so a reset consumes a tick even when the walker already
sits at the reset site.  Trajectory j draws its randomness from the
counter-based substream (seed, j) of `philox`, which makes estimates a pure
function of (config, n_sim, seed): batch totals are integers merged by
addition, so chunking, execution order, and thread count cannot change the
result, only the wall time.

The vectorized engine advances all unabsorbed trajectories of a chunk in
lockstep; a trajectory absorbed at tick t has taken exactly t+1 steps, so
no per-trajectory step counters are carried.  The scalar path exists for
inspection and produces bit-identical outcomes (tested).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import philox
from .errors import RunawayError
from .spectral_core import WalkConfig

__all__ = [
    "DEFAULT_SEED",
    "STEP_CAP",
    "McEstimate",
    "TrajectoryOutcome",
    "estimate_ruin",
    "simulate_trajectory",
]

DEFAULT_SEED = 2024

# an overlong trajectory indicates a mis-specified chain, not bad luck: at
# any gamma < 1 the absorption time has geometric tails far inside this cap
STEP_CAP = 1_000_000_000

_CHUNK = 8192


@dataclass(frozen=True)
class TrajectoryOutcome:
    """Terminal record of a single trajectory."""

    absorbed_at: str  # "ruin" (hit 0) or "success" (hit a)
    steps: int
    resets: int

    def __post_init__(self):
        if self.absorbed_at not in ("ruin", "success"):
            raise ValueError(f"absorbed_at must be 'ruin' or 'success', got {self.absorbed_at!r}")
        if self.steps < 1:
            raise ValueError("absorption takes at least one step")
        if not 0 <= self.resets < self.steps:
            raise ValueError("reset count must lie in [0, steps)")


@dataclass(frozen=True)
class McEstimate:
    """Aggregate of an n_sim-trajectory run."""

    p_hat: float
    stderr: float
    n_sim: int
    seed: int
    mean_steps: float


def _require_interior(config: WalkConfig) -> None:
    if not 0 < config.z < config.a:
        raise ValueError(
            f"simulation needs an interior start, got z={config.z} with a={config.a}"
        )


def simulate_trajectory(config: WalkConfig, stream: philox.SubStream) -> TrajectoryOutcome:
    """Run one trajectory to absorption on a scalar substream.

    The tick rule: with u the stream's next uniform, u < gamma resets the
    walker to z, u < gamma + (1-gamma)*p steps right, anything else steps
    left.  Conditional on not resetting the step is +1 with probability
    exactly p.
    """
    _require_interior(config)
    a, z, gamma = config.a, config.z, config.gamma
    thresh = gamma + (1.0 - gamma) * config.p
    pos = z
    resets = 0
    for t in range(STEP_CAP):
        u = stream.uniform(t)
        if u < gamma:
            pos = z
            resets += 1
        elif u < thresh:
            pos += 1
        else:
            pos -= 1
        if pos == 0:
            return TrajectoryOutcome("ruin", t + 1, resets)
        if pos == a:
            return TrajectoryOutcome("success", t + 1, resets)
    raise RunawayError(f"trajectory not absorbed within {STEP_CAP} steps")


def _simulate_block(config: WalkConfig, start: int, count: int, seed: int):
    """Vectorized lockstep run of trajectories [start, start+count).

    Returns integer totals (ruined, steps_sum, resets_sum).  Uses the same
    uniforms and the same comparison chain as simulate_trajectory, so the
    two paths agree trajectory by trajectory.
    """
    a, z, gamma = config.a, config.z, config.gamma
    thresh = gamma + (1.0 - gamma) * config.p
    traj = np.arange(start, start + count, dtype=np.uint64)
    pos = np.full(count, z, dtype=np.int64)
    resets = np.zeros(count, dtype=np.int64)
    ruined = 0
    steps_sum = 0
    resets_sum = 0
    t = 0
    words = None
    while traj.size:
        if t >= STEP_CAP:
            raise RunawayError(
                f"{traj.size} trajectories not absorbed within {STEP_CAP} steps"
            )
        word = t & 3
        if word == 0:
            words = philox.philox4_blocks(t >> 2, traj, seed, philox.STREAM_TAG)
        u = philox.words_to_uniforms(words[word])
        reset = u < gamma
        right = ~reset & (u < thresh)
        pos = np.where(reset, np.int64(z), pos + np.where(right, 1, -1))
        resets += reset
        t += 1
        done = (pos == 0) | (pos == a)
        if done.any():
            ruined += int((pos[done] == 0).sum())
            steps_sum += int(done.sum()) * t
            resets_sum += int(resets[done].sum())
            keep = ~done
            traj = traj[keep]
            pos = pos[keep]
            resets = resets[keep]
            words = words[:, keep]
    return ruined, steps_sum, resets_sum


def _thread_count(threads) -> int:
    if threads is None:
        threads = os.environ.get("RESET_RUIN_THREADS", "1")
    n = int(threads)
    if n < 1:
        raise ValueError("thread count must be positive")
    return n


def _totals(config: WalkConfig, n_sim: int, seed: int, threads=None):
    """Exact integer totals over all trajectories; thread-count invariant."""
    spans = [(s, min(_CHUNK, n_sim - s)) for s in range(0, n_sim, _CHUNK)]
    workers = _thread_count(threads)
    if workers == 1 or len(spans) == 1:
        parts = [_simulate_block(config, s, c, seed) for s, c in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda sc: _simulate_block(config, *sc, seed), spans))
    ruined = sum(p[0] for p in parts)
    steps_sum = sum(p[1] for p in parts)
    resets_sum = sum(p[2] for p in parts)
    return ruined, steps_sum, resets_sum


def estimate_ruin(
    config: WalkConfig,
    n_sim: int = 100_000,
    seed: int = DEFAULT_SEED,
    threads=None,
) -> McEstimate:
    """Estimate the ruin probability from n_sim independent trajectories.

    Deterministic given (config, n_sim, seed): trajectory i always consumes
    substream (seed, i), and per-chunk results are integer sums, so the
    estimate is bit-identical for any thread count (set via the `threads`
    argument or the RESET_RUIN_THREADS environment variable).
    """
    _require_interior(config)
    n_sim = int(n_sim)
    if n_sim < 1:
        raise ValueError("n_sim must be positive")
    ruined, steps_sum, _ = _totals(config, n_sim, int(seed), threads)
    p_hat = ruined / n_sim
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / n_sim)
    return McEstimate(
        p_hat=p_hat,
        stderr=stderr,
        n_sim=n_sim,
        seed=int(seed),
        mean_steps=steps_sum / n_sim,
    )
