import math

import numpy as np
import pytest

from avoidance.policies import (
    avoiding_walkers,
    independent,
    round_robin,
    simulate,
    staying_in_waves,
    trivial_k1,
)
from avoidance.traces import (
    CouplingTrace,
    WalkerTrace,
    check_1avoidance,
    check_walker_avoidance,
)


def test_simulate_is_deterministic():
    a = simulate(trivial_k1(0.3), 10, seed=42)
    b = simulate(trivial_k1(0.3), 10, seed=42)
    c = simulate(trivial_k1(0.3), 10, seed=43)
    assert (a.rows == b.rows).all()
    assert (a.rows != c.rows).any()


def test_round_robin_rows():
    tr = simulate(round_robin(2), 4, seed=0)
    assert tr.rows.tolist() == [[1, 0], [0, 1], [1, 0], [0, 1]]


def test_independent_walkers_collide():
    tr = simulate(independent(2, 0.5), 10**5, seed=1)
    report = check_1avoidance(tr)
    assert not report.ok
    freq = report.count("simultaneous") / tr.T
    # collisions at rate ~ p^2 = 0.25
    assert abs(freq - 0.25) < 5 * math.sqrt(0.25 * 0.75 / tr.T)


def test_avoiding_walkers_pass_checks():
    for k, n, looped, seed in [(1, 5, False, 0), (2, 6, False, 1), (3, 5, True, 2), (4, 9, False, 3)]:
        tr = simulate(avoiding_walkers(n, k, looped=looped), 200, seed=seed)
        assert isinstance(tr, WalkerTrace)
        assert check_walker_avoidance(tr).ok, (k, n, looped)


def test_avoiding_walkers_k1_is_uniform_off_diagonal():
    tr = simulate(avoiding_walkers(4, 1), 200_000, seed=7)
    pos = tr.rows[:, 0]
    assert (pos[1:] != pos[:-1]).all()
    counts = np.bincount(pos, minlength=5)[1:]
    assert abs(counts.max() - counts.min()) / tr.T < 0.01


def test_avoiding_walkers_needs_room():
    with pytest.raises(ValueError):
        avoiding_walkers(3, 3, looped=False)
    avoiding_walkers(3, 3, looped=True)  # legal: everyone may stay put


def test_waves_repeat_rows_exactly():
    n, T, seed = 5, 2000, 11
    policy = staying_in_waves(avoiding_walkers(n, 1), n)
    tr = simulate(policy, T, seed)
    # reconstruct the wave mask: the indicators are drawn first from the stream
    rng = np.random.default_rng(seed)
    waves = rng.random(T) < 1.0 / n
    prev = np.concatenate([[policy.start[0]], tr.rows[:-1, 0]])
    assert (tr.rows[waves, 0] == prev[waves]).all()
    # the inner walker is loopless, so repeats happen only through waves
    assert (tr.rows[~waves, 0] != prev[~waves]).all()


def test_waves_frequency_matches_rate():
    n, T = 5, 10**6
    policy = staying_in_waves(avoiding_walkers(n, 1), n)
    tr = simulate(policy, T, seed=3)
    prev = np.concatenate([[policy.start[0]], tr.rows[:-1, 0]])
    stay_rate = (tr.rows[:, 0] == prev).mean()
    sigma = math.sqrt((1 / n) * (1 - 1 / n) / T)
    assert abs(stay_rate - 1 / n) < 4 * sigma


def test_waves_positions_are_uniform():
    # staying in waves turns the loopless uniform walker into an i.i.d.
    # uniform one: P(stay) = 1/n and P(move to any fixed other vertex) = 1/n
    n, T = 5, 10**6
    tr = simulate(staying_in_waves(avoiding_walkers(n, 1), n), T, seed=17)
    counts = np.bincount(tr.rows[:, 0], minlength=n + 1)[1:]
    sigma = math.sqrt((1 / n) * (1 - 1 / n) / T)
    for c in counts:
        assert abs(c / T - 1 / n) < 4 * sigma


def test_waves_requires_loopless_inner():
    with pytest.raises(ValueError):
        staying_in_waves(avoiding_walkers(5, 1, looped=True), 5)
    with pytest.raises(ValueError):
        staying_in_waves(avoiding_walkers(5, 1), 6)


def test_waves_multiwalker_passes_walker_check():
    policy = staying_in_waves(avoiding_walkers(7, 3), 7)
    tr = simulate(policy, 500, seed=23)
    assert tr.looped
    assert check_walker_avoidance(tr).ok


def test_simulate_rejects_bad_T():
    with pytest.raises(ValueError):
        simulate(trivial_k1(0.5), 0, seed=0)


def test_binary_policies_emit_coupling_traces():
    assert isinstance(simulate(trivial_k1(0.2), 5, 0), CouplingTrace)
    assert isinstance(simulate(independent(3, 0.2), 5, 0), CouplingTrace)
