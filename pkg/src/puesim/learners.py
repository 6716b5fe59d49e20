"""Exponential-weights learners: POLA, PROLA (with m observations), Hedge.

All learner state lives in log-domain weights; decisions use a single
uniform draw per sample via inverse-CDF, so runs are reproducible given
the rng stream.  The sampling primitives are the same compiled helpers
used by the fused simulation kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels

E_MINUS_2 = math.e - 2.0


@dataclass
class WeightState:
    """Log-domain exponential weights plus the slot counter."""

    log_weights: np.ndarray
    t: int = 1

    @classmethod
    def initial(cls, n_channels: int) -> "WeightState":
        return cls(log_weights=np.zeros(n_channels), t=1)


@dataclass(frozen=True)
class PolaParams:
    n_channels: int
    horizon: int
    eta: float

    def __post_init__(self):
        cap = (math.log(self.n_channels) / (self.n_channels ** 2 * self.horizon)) ** (1.0 / 3.0)
        if not 0.0 < self.eta <= cap * (1.0 + 1e-12):
            raise ValueError(
                f"eta={self.eta} outside (0, (ln K/(K^2 T))^(1/3)] = (0, {cap}]"
            )


@dataclass(frozen=True)
class ProlaParams:
    n_channels: int
    horizon: int
    gamma: float
    eta: float
    m: int = 1

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma={self.gamma} outside (0, 1)")
        cap = self.gamma / (2.0 * (self.n_channels - 1))
        if not 0.0 < self.eta <= cap * (1.0 + 1e-12):
            raise ValueError(f"eta={self.eta} outside (0, gamma/(2(K-1))] = (0, {cap}]")
        if not 1 <= self.m <= self.n_channels - 1:
            raise ValueError(f"m={self.m} outside [1, K-1]")


@dataclass(frozen=True)
class PolaAttack:
    channel: int


@dataclass(frozen=True)
class PolaObserve:
    channel: int


@dataclass(frozen=True)
class ProlaAct:
    attack: int
    observe_set: tuple[int, ...]


# Feedback: list of (channel, reward) pairs for the observed channels.


def pola_delta(n_channels: int, t: int) -> float:
    """Observation probability min{1, (K ln K / t)^(1/3)}."""
    return _kernels.pola_delta(n_channels, t)


def pola_decide(state: WeightState, params: PolaParams, rng) -> PolaAttack | PolaObserve:
    """Observe w.p. delta_t (channel uniform), else attack from the weights."""
    delta = pola_delta(params.n_channels, state.t)
    u_branch = rng.random()
    u_channel = rng.random()
    if u_branch < delta:
        return PolaObserve(_kernels.pick_uniform(params.n_channels, u_channel))
    return PolaAttack(_kernels.pick_from_log_weights(state.log_weights, u_channel))


def pola_update(state: WeightState, params: PolaParams, decision, feedback) -> WeightState:
    """Importance-weighted update on an observe slot; no-op on attack slots."""
    log_w = state.log_weights.copy()
    if isinstance(decision, PolaObserve):
        if len(feedback) != 1 or feedback[0][0] != decision.channel:
            raise ValueError("feedback must cover exactly the observed channel")
        _, x = feedback[0]
        if x not in (0, 1):
            raise ValueError(f"reward {x} outside {{0, 1}}")
        delta = pola_delta(params.n_channels, state.t)
        log_w[decision.channel] += params.eta * (x * params.n_channels / delta)
        _kernels.renormalize(log_w)
    elif isinstance(decision, PolaAttack):
        if feedback:
            raise ValueError("attack slots carry no feedback")
    else:
        raise TypeError(f"not a POLA decision: {decision!r}")
    return WeightState(log_weights=log_w, t=state.t + 1)


def pola_default_eta(n_channels: int, horizon: int) -> float:
    """Learning rate minimizing the regret bound for a known horizon."""
    K, T = n_channels, horizon
    threshold = 2.577 * K * math.log(K)
    if T <= threshold:
        raise ValueError(
            f"horizon {T} <= 2.577 K ln K = {threshold:.2f}; supply eta explicitly"
        )
    lnk = math.log(K)
    inner = 0.75 * ((T + 1) ** 4 / (K * lnk)) ** (1.0 / 3.0) + K * lnk / 4.0
    return math.sqrt(lnk / (E_MINUS_2 * K * inner))


def prola_probs(state: WeightState, params: ProlaParams) -> np.ndarray:
    """Attack distribution: exploration-mixed exponential weights."""
    out = np.empty(params.n_channels)
    _kernels.mixed_probs(state.log_weights, params.gamma, out)
    return out


def prola_decide(state: WeightState, params: ProlaParams, rng) -> ProlaAct:
    """Sample the attack channel, then a uniform m-subset of the others."""
    probs = prola_probs(state, params)
    u_attack = rng.random()
    us = rng.random(params.m)
    attack = _kernels.pick_from_probs(probs, u_attack)
    pool = np.zeros(params.n_channels - 1, np.int64)
    obs = np.zeros(params.m, np.int64)
    _kernels.m_subset_excluding(params.n_channels, attack, us, params.m, pool, obs)
    return ProlaAct(attack=attack, observe_set=tuple(int(j) for j in obs))


def prola_update(state: WeightState, params: ProlaParams, decision: ProlaAct,
                 feedback) -> WeightState:
    """Importance-weighted update over the observed channels.

    The observation probability of channel j is (m/(K-1)) * (1 - p_t(j)),
    with p_t the attack distribution before this update.
    """
    if sorted(ch for ch, _ in feedback) != sorted(decision.observe_set):
        raise ValueError("feedback channels do not match the observe set")
    probs = prola_probs(state, params)
    coef = params.m / (params.n_channels - 1.0)
    log_w = state.log_weights.copy()
    for ch, x in feedback:
        if x not in (0, 1):
            raise ValueError(f"reward {x} outside {{0, 1}}")
        log_w[ch] += params.eta * (x / (coef * (1.0 - probs[ch])))
    _kernels.renormalize(log_w)
    return WeightState(log_weights=log_w, t=state.t + 1)


def prola_default_params(n_channels: int, horizon: int, m: int = 1) -> ProlaParams:
    """gamma = 1/2 and the bound-minimizing eta for a known horizon."""
    K, T = n_channels, horizon
    threshold = 8.0 * (K - 1) * math.log(K) / E_MINUS_2
    if T < threshold:
        raise ValueError(
            f"horizon {T} < 8(K-1) ln K/(e-2) = {threshold:.2f}; supply eta explicitly"
        )
    eta = math.sqrt(math.log(K) / (2.0 * E_MINUS_2 * (K - 1) * T))
    return ProlaParams(n_channels=K, horizon=T, gamma=0.5, eta=eta, m=m)


def hedge_default_eta(n_channels: int, horizon: int) -> float:
    """Standard full-information tuning sqrt(8 ln K / T)."""
    return math.sqrt(8.0 * math.log(n_channels) / horizon)


def hedge_decide(state: WeightState, eta_su: float, rng) -> int:
    """Sample a channel proportional to the weights."""
    return _kernels.pick_from_log_weights(state.log_weights, rng.random())


def hedge_update(state: WeightState, eta_su: float, rewards) -> WeightState:
    """Full-information exponential update from the whole reward vector."""
    rewards = np.asarray(rewards)
    if rewards.shape != state.log_weights.shape:
        raise ValueError("rewards length must equal the channel count")
    log_w = state.log_weights + eta_su * rewards
    _kernels.renormalize(log_w)
    return WeightState(log_weights=log_w, t=state.t + 1)


def uniform_decide(n_channels: int, rng) -> int:
    """Baseline: attack a uniformly random channel."""
    return _kernels.pick_uniform(n_channels, rng.random())
