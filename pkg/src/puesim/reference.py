"""Slow per-step runner composing the public env/learner operations.

Used to cross-check the fused kernel: both paths consume the same rng
streams in the same order, so traces must match bit for bit.  The
attacker update here receives only the observation feedback, never the
hidden reward or the reward matrix.
"""

from __future__ import annotations

import numpy as np

from . import env, learners
from .harness import ExperimentConfig, run_streams


def run_one_reference(config: ExperimentConfig, run_index: int):
    """Same contract as harness.run_one, built from the per-step operations."""
    K, T = config.n_channels, config.horizon
    params = config.resolve_learner_params()
    checkpoints = config.resolved_checkpoints()
    pu_rng, su_rng, atk_rng = run_streams(config.base_seed, run_index)

    pola_params = prola_params = None
    if config.attacker == "pola":
        pola_params = learners.PolaParams(K, T, params["eta"])
    elif config.attacker == "prola":
        prola_params = learners.ProlaParams(K, T, params["gamma"],
                                            params["eta"], config.m)

    su_state = learners.WeightState.initial(K)
    atk_state = learners.WeightState.initial(K)
    col_sums = np.zeros(K, np.int64)
    gain = 0
    traffic = 0

    n_ck = checkpoints.shape[0]
    gain_out = np.zeros(n_ck, np.int64)
    gmax_out = np.zeros(n_ck, np.int64)
    traffic_out = np.zeros(n_ck, np.int64)
    ci = 0

    state = None
    for t in range(1, T + 1):
        state = env.step_pu(config.pu, state, pu_rng)

        if config.su_policy == "hedge":
            su = learners.hedge_decide(su_state, params["eta_su"], su_rng)
        elif config.su_policy == "fixed":
            su = config.su_fixed
        else:
            su = learners.uniform_decide(K, su_rng)

        attack: int | None = None
        observe_set: tuple[int, ...] = ()
        decision = None
        if config.attacker == "pola":
            decision = learners.pola_decide(atk_state, pola_params, atk_rng)
            if isinstance(decision, learners.PolaAttack):
                attack = decision.channel
            else:
                observe_set = (decision.channel,)
        elif config.attacker == "prola":
            decision = learners.prola_decide(atk_state, prola_params, atk_rng)
            attack = decision.attack
            observe_set = decision.observe_set
        elif config.attacker == "uniform":
            attack = learners.uniform_decide(K, atk_rng)
        elif config.attacker == "fixed":
            attack = config.atk_fixed

        outcome = env.resolve_slot(state, su, attack, observe_set)

        if state.pu_idle[su]:
            col_sums[su] += 1
        if outcome.su_transmitted:
            traffic += 1
        if attack is not None:
            gain += outcome.attacker_hidden_reward

        if config.su_policy == "hedge":
            su_state = learners.hedge_update(su_state, params["eta_su"],
                                             outcome.su_rewards)

        if config.attacker == "pola":
            feedback = outcome.observations if observe_set else []
            atk_state = learners.pola_update(atk_state, pola_params, decision,
                                             feedback)
        elif config.attacker == "prola":
            atk_state = learners.prola_update(atk_state, prola_params, decision,
                                              outcome.observations)

        if ci < n_ck and t == checkpoints[ci]:
            gain_out[ci] = gain
            gmax_out[ci] = col_sums.max()
            traffic_out[ci] = traffic
            ci += 1

    return gain_out, gmax_out, traffic_out
