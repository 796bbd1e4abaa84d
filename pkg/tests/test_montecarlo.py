import numpy as np
import pytest

from resetruin import montecarlo, philox
from resetruin.errors import RunawayError
from resetruin.montecarlo import estimate_ruin, simulate_trajectory
from resetruin.oracle import exact_ruin
from resetruin.philox import SubStream, philox4, philox4_blocks, words_to_uniforms
from resetruin.spectral_core import WalkConfig

# Known-answer vectors for Philox-4x64 with 10 rounds. The first two are
# the published reference inputs (all-zero and all-ones); the third pins
# this module's own stream parameters.
_KAT = [
    ((0, 0, 0, 0), (0, 0),
     (0x16554D9ECA36314C, 0xDB20FE9D672D0FDC,
      0xD7E772CEE186176B, 0x7E68B68AEC7BA23B)),
    ((2**64 - 1,) * 4, (2**64 - 1, 2**64 - 1),
     (0x87B092C3013FE90B, 0x438C3C67BE8D0224,
      0x9CC7D7C69CD777B6, 0xA09CAEBF594F0BA0)),
    ((0, 1, 2, 3), (42, philox.STREAM_TAG),
     (0x25F594EFF6D7A1BF, 0xA9FC311C3C9FF853,
      0xF519912BDF57D83E, 0x015DA7C7A0E46C80)),
]


@pytest.mark.parametrize("counter,key,expected", _KAT)
def test_philox_known_answers(counter, key, expected):
    assert philox4(counter, key) == expected


def _bump_counter(counter):
    # numpy's Philox increments its 256-bit counter before generating
    # the first block, so its block for counter c is ours for c + 1
    words = list(counter)
    for i in range(4):
        words[i] = (words[i] + 1) & (2**64 - 1)
        if words[i]:
            break
    return tuple(words)


def test_philox_agrees_with_numpy_up_to_counter_convention():
    rng = np.random.default_rng(123)
    for _ in range(25):
        counter = tuple(int(x) for x in rng.integers(0, 2**64, 4, dtype=np.uint64))
        key = tuple(int(x) for x in rng.integers(0, 2**64, 2, dtype=np.uint64))
        ref = np.random.Philox(counter=np.array(counter, dtype=np.uint64),
                               key=np.array(key, dtype=np.uint64))
        assert tuple(int(w) for w in ref.random_raw(4)) \
            == philox4(_bump_counter(counter), key)


def test_philox_numpy_convention_carries_across_words():
    counter = (2**64 - 1, 7, 0, 0)
    key = (11, 13)
    ref = np.random.Philox(counter=np.array(counter, dtype=np.uint64),
                           key=np.array(key, dtype=np.uint64))
    assert _bump_counter(counter) == (0, 8, 0, 0)
    assert tuple(int(w) for w in ref.random_raw(4)) == philox4((0, 8, 0, 0), key)


def test_block_generator_matches_scalar_path():
    traj = np.array([0, 1, 5, 2**63, 2**64 - 1], dtype=np.uint64)
    for block in (0, 1, 250_000_000):
        words = philox4_blocks(block, traj, 2024, philox.STREAM_TAG)
        assert words.shape == (4, traj.size)
        for j, t in enumerate(traj):
            expected = philox4((block, int(t), 0, 0), (2024, philox.STREAM_TAG))
            assert tuple(int(w) for w in words[:, j]) == expected


def test_uniforms_use_53_bits():
    words = np.array([0, 2**64 - 1, 1 << 11], dtype=np.uint64)
    u = words_to_uniforms(words)
    assert u[0] == 0.0
    assert u[1] == (2**53 - 1) * 2.0**-53
    assert u[2] == 2.0**-53
    assert np.all((0.0 <= u) & (u < 1.0))


def test_substream_indexes_words_within_blocks():
    stream = SubStream(99, 3)
    for t in (0, 1, 4, 7, 1023):
        words = philox4((t // 4, 3, 0, 0), (99, philox.STREAM_TAG))
        assert stream.uniform(t) == (words[t % 4] >> 11) * 2.0**-53


def test_trajectory_outcome_invariants():
    cfg = WalkConfig(a=5, z=2, p=0.5, gamma=0.3)
    for i in range(50):
        out = simulate_trajectory(cfg, SubStream(2024, i))
        assert out.absorbed_at in ("ruin", "success")
        assert out.steps >= 1
        assert 0 <= out.resets < out.steps


def test_block_path_reproduces_scalar_trajectories():
    cfg = WalkConfig(a=5, z=2, p=0.5, gamma=0.3)
    seed, count = 777, 1500
    ruined = steps = resets = 0
    for i in range(count):
        out = simulate_trajectory(cfg, SubStream(seed, i))
        ruined += out.absorbed_at == "ruin"
        steps += out.steps
        resets += out.resets
    assert montecarlo._simulate_block(cfg, 0, count, seed) == (ruined, steps, resets)


def test_estimate_is_thread_count_invariant(monkeypatch):
    cfg = WalkConfig(a=6, z=2, p=0.45, gamma=0.25)
    one = estimate_ruin(cfg, n_sim=30_000, seed=5, threads=1)
    four = estimate_ruin(cfg, n_sim=30_000, seed=5, threads=4)
    assert one == four  # bit-identical, not merely close
    monkeypatch.setenv("RESET_RUIN_THREADS", "3")
    env = estimate_ruin(cfg, n_sim=30_000, seed=5)
    assert env == one


def test_estimate_matches_exact_probability():
    cfg = WalkConfig(a=5, z=2, p=0.6, gamma=0.3)
    est = estimate_ruin(cfg, n_sim=20_000, seed=2024)
    q = exact_ruin(cfg)
    sigma = (q * (1.0 - q) / est.n_sim) ** 0.5
    assert abs(est.p_hat - q) <= 4.0 * sigma
    assert est.stderr == pytest.approx(sigma, rel=0.1)


def test_reset_rate_identity():
    # each surviving tick resets independently, so total resets grow as
    # gamma times total steps
    cfg = WalkConfig(a=7, z=3, p=0.5, gamma=0.35)
    _, steps_sum, resets_sum = montecarlo._totals(cfg, 20_000, seed=11)
    assert resets_sum / steps_sum == pytest.approx(0.35, rel=0.05)


def test_boundary_start_is_rejected():
    with pytest.raises(ValueError):
        estimate_ruin(WalkConfig(a=5, z=0, p=0.5, gamma=0.1), n_sim=10)
    with pytest.raises(ValueError):
        estimate_ruin(WalkConfig(a=5, z=5, p=0.5, gamma=0.1), n_sim=10)
    with pytest.raises(ValueError):
        estimate_ruin(WalkConfig(a=5, z=2, p=0.5, gamma=0.1), n_sim=0)


def test_runaway_trajectories_raise(monkeypatch):
    monkeypatch.setattr(montecarlo, "STEP_CAP", 4)
    cfg = WalkConfig(a=30, z=15, p=0.5, gamma=0.0)
    with pytest.raises(RunawayError):
        simulate_trajectory(cfg, SubStream(0, 0))
    with pytest.raises(RunawayError):
        estimate_ruin(cfg, n_sim=64, seed=0)
