"""Environment layer: PU processes, slot resolution, reward matrix."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from puesim.env import (ChannelState, PuModel, RewardMatrix, resolve_slot,
                        step_pu, validate_pu_model)
from tests.conftest import PI


def test_validate_accepts_reference_iid_vector():
    model = PuModel.iid(PI)
    assert validate_pu_model(model, 10) is model


def test_validate_accepts_boundary_probabilities():
    model = PuModel.iid([1.0, 1.0])
    assert validate_pu_model(model, 2) is model


def test_validate_rejects_length_mismatch():
    model = PuModel.markov(np.full(9, 0.5), np.full(10, 0.5), np.full(10, 0.5))
    with pytest.raises(ValueError, match="length"):
        validate_pu_model(model, 10)


def test_validate_rejects_out_of_range_probability_naming_channel():
    probs = np.full(10, 0.5)
    probs[7] = 1.5
    with pytest.raises(ValueError, match="7"):
        validate_pu_model(PuModel.iid(probs), 10)


def test_validate_rejects_single_channel():
    with pytest.raises(ValueError):
        validate_pu_model(PuModel.iid([0.5]), 1)


def test_step_pu_iid_degenerate_always_idle():
    rng = np.random.default_rng(0)
    state = step_pu(PuModel.iid([1.0, 1.0, 1.0]), None, rng)
    assert state.t == 1
    assert state.pu_idle.all()


def test_step_pu_markov_absorbing_idle():
    rng = np.random.default_rng(0)
    model = PuModel.markov([0.5, 0.5], [0.0, 0.0], [1.0, 1.0])
    state = step_pu(model, None, rng)
    assert state.pu_idle.all()
    for _ in range(50):
        state = step_pu(model, state, rng)
        assert state.pu_idle.all()


def test_step_pu_iid_empirical_frequency():
    # 10^6 Bernoulli samples via 10^4 steps of 100 identical channels.
    rng = np.random.default_rng(42)
    model = PuModel.iid(np.full(100, 0.85))
    hits = 0
    for _ in range(10_000):
        hits += int(step_pu(model, None, rng).pu_idle.sum())
    assert abs(hits / 1e6 - 0.85) < 0.002


def test_step_pu_markov_half_half_stationary():
    # p01 = p10 = 0.5 has stationary idle frequency 1/2.
    rng = np.random.default_rng(7)
    model = PuModel.markov(np.full(100, 0.5), np.full(100, 0.5), np.full(100, 0.5))
    state = None
    hits = 0
    for _ in range(10_000):
        state = step_pu(model, state, rng)
        hits += int(state.pu_idle.sum())
    assert abs(hits / 1e6 - 0.5) < 0.005


def _state(idle):
    return ChannelState(t=1, pu_idle=np.asarray(idle, dtype=bool))


def test_resolve_slot_effective_attack():
    out = resolve_slot(_state([True] * 6), su_choice=3, attack=3, observe_set=(1,))
    assert not out.su_transmitted
    assert out.attacker_hidden_reward == 1
    assert out.observations == [(1, 0)]


def test_resolve_slot_observation_catches_su():
    out = resolve_slot(_state([True] * 6), su_choice=2, attack=5, observe_set=(2,))
    assert out.su_transmitted
    assert out.attacker_hidden_reward == 0
    assert out.observations == [(2, 1)]


def test_resolve_slot_busy_channel_yields_zero_row():
    idle = [True] * 6
    idle[2] = False
    out = resolve_slot(_state(idle), su_choice=2, attack=4, observe_set=(2, 3))
    assert not out.su_transmitted
    assert out.attacker_hidden_reward == 0
    assert all(x == 0 for _, x in out.observations)


def test_resolve_slot_rejects_observing_attacked_channel():
    with pytest.raises(ValueError):
        resolve_slot(_state([True] * 4), su_choice=0, attack=1, observe_set=(1,))


def test_resolve_slot_no_attacker():
    out = resolve_slot(_state([True] * 4), su_choice=0, attack=None, observe_set=())
    assert out.su_transmitted
    assert out.attacker_hidden_reward == 0
    assert out.su_rewards.tolist() == [1, 1, 1, 1]


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_resolve_slot_properties(data):
    k = data.draw(st.integers(2, 8))
    idle = data.draw(st.lists(st.booleans(), min_size=k, max_size=k))
    su = data.draw(st.integers(0, k - 1))
    attack = data.draw(st.integers(0, k - 1))
    others = [j for j in range(k) if j != attack]
    m = data.draw(st.integers(0, k - 1))
    observe = tuple(data.draw(st.permutations(others))[:m])
    out = resolve_slot(_state(idle), su_choice=su, attack=attack,
                       observe_set=observe)
    # su_rewards: idle everywhere except the attacked channel.
    assert out.su_rewards[attack] == 0
    for j in range(k):
        if j != attack:
            assert out.su_rewards[j] == int(idle[j])
    # transmission requires an idle, unattacked channel.
    assert out.su_transmitted == (idle[su] and su != attack)
    # x_t has at most one nonzero entry and observations report exactly x_t.
    x = [int(su == j and idle[j]) for j in range(k)]
    assert sum(x) <= 1
    assert out.attacker_hidden_reward == x[attack]
    assert out.observations == [(j, x[j]) for j in observe]


def test_reward_matrix_accepts_single_occupancy_rows():
    m = np.zeros((5, 3), dtype=np.int64)
    m[0, 1] = 1
    m[3, 2] = 1
    RewardMatrix(entries=m)


def test_reward_matrix_rejects_double_occupancy_row():
    m = np.zeros((4, 3), dtype=np.int64)
    m[2, 0] = 1
    m[2, 1] = 1
    with pytest.raises(ValueError):
        RewardMatrix(entries=m)
