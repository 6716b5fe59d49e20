"""Slotted cognitive-radio environment: PU activity, slot resolution, rewards.

The attacker's reward on channel j is 1 exactly when the SU attempted j
and the primary user was idle there, i.e. the SU would have occupied j
absent any attack.  The realized T x K table of these rewards is the
ground truth used for G_max and regret.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

IID = "iid"
MARKOV = "markov"


@dataclass
class PuModel:
    """Per-channel primary-user activity process.

    kind "iid": each channel idle independently with ``idle_prob[k]``.
    kind "markov": two-state chain per channel with busy->idle transition
    ``p01[k]``, idle->busy transition ``p10[k]`` and initial idle
    probability ``p1[k]``.
    """

    kind: str
    idle_prob: np.ndarray | None = None
    p01: np.ndarray | None = None
    p10: np.ndarray | None = None
    p1: np.ndarray | None = None

    @classmethod
    def iid(cls, idle_prob) -> "PuModel":
        return cls(kind=IID, idle_prob=np.asarray(idle_prob, dtype=float))

    @classmethod
    def markov(cls, p01, p10, p1) -> "PuModel":
        return cls(
            kind=MARKOV,
            p01=np.asarray(p01, dtype=float),
            p10=np.asarray(p10, dtype=float),
            p1=np.asarray(p1, dtype=float),
        )


@dataclass
class ChannelState:
    """PU occupancy for one slot: pu_idle[k] is True when PU k is inactive."""

    t: int
    pu_idle: np.ndarray


@dataclass
class SlotOutcome:
    su_channel: int
    su_transmitted: bool
    attacker_hidden_reward: int
    observations: list[tuple[int, int]]
    su_rewards: np.ndarray


@dataclass
class RewardMatrix:
    """Realized T x K binary attacker-reward table x_t(j)."""

    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries)
        if self.entries.ndim != 2:
            raise ValueError("reward matrix must be 2-dimensional")
        if (self.entries.sum(axis=1) > 1).any():
            raise ValueError("a reward row has more than one nonzero entry")


def _check_probs(name: str, vec, n_channels: int) -> None:
    if vec is None:
        raise ValueError(f"{name} is required for this PU model kind")
    vec = np.asarray(vec)
    if vec.shape != (n_channels,):
        raise ValueError(
            f"{name} has length {vec.shape[0] if vec.ndim == 1 else vec.shape},"
            f" expected {n_channels}"
        )
    bad = np.flatnonzero((vec < 0.0) | (vec > 1.0))
    if bad.size:
        raise ValueError(
            f"{name}[{bad[0]}] = {vec[bad[0]]} is outside [0, 1]"
        )


def validate_pu_model(model: PuModel, n_channels: int) -> PuModel:
    """Check vector lengths and probability ranges; returns the model."""
    if n_channels < 2:
        raise ValueError("need at least 2 channels")
    if model.kind == IID:
        _check_probs("idle_prob", model.idle_prob, n_channels)
    elif model.kind == MARKOV:
        _check_probs("p01", model.p01, n_channels)
        _check_probs("p10", model.p10, n_channels)
        _check_probs("p1", model.p1, n_channels)
    else:
        raise ValueError(f"unknown PU model kind {model.kind!r}")
    return model


def step_pu(model: PuModel, prev: ChannelState | None, rng) -> ChannelState:
    """Advance every channel's PU one slot; channels evolve independently."""
    if model.kind == IID:
        n = model.idle_prob.shape[0]
        u = rng.random(n)
        idle = u < model.idle_prob
        t = 1 if prev is None else prev.t + 1
        return ChannelState(t=t, pu_idle=idle)

    n = model.p1.shape[0]
    u = rng.random(n)
    if prev is None:
        return ChannelState(t=1, pu_idle=u < model.p1)
    was_idle = prev.pu_idle
    # idle stays idle unless it flips busy w.p. p10; busy frees w.p. p01
    idle = np.where(was_idle, ~(u < model.p10), u < model.p01)
    return ChannelState(t=prev.t + 1, pu_idle=idle)


def resolve_slot(state: ChannelState, su_choice: int, attack: int | None,
                 observe_set) -> SlotOutcome:
    """Resolve one slot's interactions.

    ``attack`` is None on a pure-observation slot (no channel is
    attacked).  ``observe_set`` must not contain the attacked channel.
    """
    observe_set = list(observe_set)
    if attack is not None and attack in observe_set:
        raise ValueError("observe_set must not contain the attacked channel")

    pu_idle = state.pu_idle
    n = pu_idle.shape[0]
    su_attempt = bool(pu_idle[su_choice])
    transmitted = su_attempt and su_choice != attack

    def x(j: int) -> int:
        return 1 if (j == su_choice and su_attempt) else 0

    hidden = x(attack) if attack is not None else 0
    observations = [(j, x(j)) for j in observe_set]

    su_rewards = np.zeros(n, dtype=np.int64)
    su_rewards[pu_idle] = 1
    if attack is not None:
        su_rewards[attack] = 0

    return SlotOutcome(
        su_channel=su_choice,
        su_transmitted=transmitted,
        attacker_hidden_reward=hidden,
        observations=observations,
        su_rewards=su_rewards,
    )
