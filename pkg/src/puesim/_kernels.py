"""Numba kernels shared by the modular learner API and the fused slot loop.

Every random decision is driven by uniforms in [0, 1) handed in by the
caller, so the per-step API and the fused ``run_slots`` loop consume the
same streams in the same order and produce bit-identical trajectories.
"""

import numpy as np
from numba import njit

# PU process kinds
PU_IID = 0
PU_MARKOV = 1

# SU policies
SU_HEDGE = 0
SU_FIXED = 1
SU_UNIFORM = 2

# attacker policies
ATK_NONE = 0
ATK_POLA = 1
ATK_PROLA = 2
ATK_UNIFORM = 3
ATK_FIXED = 4

# subtract the max log-weight once it exceeds this; ratios are unaffected
RENORM_THRESHOLD = 500.0


@njit(cache=True, nogil=True)
def pick_uniform(n, u):
    """Index in [0, n) from one uniform draw."""
    i = int(u * n)
    if i > n - 1:
        i = n - 1
    return i


@njit(cache=True, nogil=True)
def pick_from_log_weights(log_w, u):
    """Inverse-CDF sample with P(i) proportional to exp(log_w[i])."""
    n = log_w.shape[0]
    mx = log_w[0]
    for i in range(1, n):
        if log_w[i] > mx:
            mx = log_w[i]
    total = 0.0
    for i in range(n):
        total += np.exp(log_w[i] - mx)
    target = u * total
    acc = 0.0
    for i in range(n):
        acc += np.exp(log_w[i] - mx)
        if acc >= target:
            return i
    return n - 1


@njit(cache=True, nogil=True)
def pick_from_probs(p, u):
    """Inverse-CDF sample from an (approximately normalized) prob vector."""
    n = p.shape[0]
    total = 0.0
    for i in range(n):
        total += p[i]
    target = u * total
    acc = 0.0
    for i in range(n):
        acc += p[i]
        if acc >= target:
            return i
    return n - 1


@njit(cache=True, nogil=True)
def mixed_probs(log_w, gamma, out):
    """out[i] = (1-gamma) * softmax(log_w)[i] + gamma/K."""
    n = log_w.shape[0]
    mx = log_w[0]
    for i in range(1, n):
        if log_w[i] > mx:
            mx = log_w[i]
    total = 0.0
    for i in range(n):
        total += np.exp(log_w[i] - mx)
    for i in range(n):
        out[i] = (1.0 - gamma) * (np.exp(log_w[i] - mx) / total) + gamma / n


@njit(cache=True, nogil=True)
def m_subset_excluding(n_channels, exclude, us, m, pool, out):
    """Uniform m-subset of {0..K-1} minus {exclude}, by partial Fisher-Yates.

    ``us`` supplies m uniforms; ``pool`` is scratch of length K-1.
    """
    n = 0
    for i in range(n_channels):
        if i != exclude:
            pool[n] = i
            n += 1
    for i in range(m):
        j = i + int(us[i] * (n - i))
        if j > n - 1:
            j = n - 1
        tmp = pool[i]
        pool[i] = pool[j]
        pool[j] = tmp
        out[i] = pool[i]


@njit(cache=True, nogil=True)
def pola_delta(n_channels, t):
    """Observation probability min{1, (K ln K / t)^(1/3)}."""
    d = (n_channels * np.log(n_channels) / t) ** (1.0 / 3.0)
    if d > 1.0:
        d = 1.0
    return d


@njit(cache=True, nogil=True)
def renormalize(log_w):
    """Shift log-weights down when the max exceeds the overflow threshold."""
    n = log_w.shape[0]
    mx = log_w[0]
    for i in range(1, n):
        if log_w[i] > mx:
            mx = log_w[i]
    if mx > RENORM_THRESHOLD:
        for i in range(n):
            log_w[i] -= mx


@njit(cache=True, nogil=True)
def run_slots(n_channels, horizon,
              pu_kind, idle_prob, p01, p10, p1,
              su_policy, su_fixed, eta_su,
              attacker, atk_fixed, gamma, eta, m,
              pu_u, su_u, atk_u,
              checkpoints,
              gain_out, gmax_out, traffic_out):
    """Run the full slot loop for one Monte-Carlo run.

    pu_u is (T, K); su_u is (T,); atk_u is (T, d) where d is the
    attacker's fixed per-slot draw count.  Outputs are integer traces at
    the checkpoint slots: cumulative attacker gain, running G_max of the
    realized reward matrix, and cumulative SU traffic.
    """
    K = n_channels
    pu_idle = np.zeros(K, np.uint8)
    lw_su = np.zeros(K)
    lw_atk = np.zeros(K)
    col_sums = np.zeros(K, np.int64)
    probs = np.zeros(K)
    pool = np.zeros(K - 1, np.int64)
    obs = np.zeros(max(m, 1), np.int64)

    gain = 0
    traffic = 0
    ci = 0
    n_ck = checkpoints.shape[0]

    for ti in range(horizon):
        t = ti + 1

        # advance the primary-user activity
        if pu_kind == PU_IID:
            for k in range(K):
                pu_idle[k] = 1 if pu_u[ti, k] < idle_prob[k] else 0
        else:
            if ti == 0:
                for k in range(K):
                    pu_idle[k] = 1 if pu_u[ti, k] < p1[k] else 0
            else:
                for k in range(K):
                    if pu_idle[k] == 1:
                        pu_idle[k] = 0 if pu_u[ti, k] < p10[k] else 1
                    else:
                        pu_idle[k] = 1 if pu_u[ti, k] < p01[k] else 0

        # SU channel choice
        if su_policy == SU_HEDGE:
            su = pick_from_log_weights(lw_su, su_u[ti])
        elif su_policy == SU_FIXED:
            su = su_fixed
        else:
            su = pick_uniform(K, su_u[ti])

        # attacker decision
        attack = -1
        n_obs = 0
        delta = 0.0
        if attacker == ATK_POLA:
            delta = pola_delta(K, t)
            if atk_u[ti, 0] < delta:
                obs[0] = pick_uniform(K, atk_u[ti, 1])
                n_obs = 1
            else:
                attack = pick_from_log_weights(lw_atk, atk_u[ti, 1])
        elif attacker == ATK_PROLA:
            mixed_probs(lw_atk, gamma, probs)
            attack = pick_from_probs(probs, atk_u[ti, 0])
            m_subset_excluding(K, attack, atk_u[ti, 1:], m, pool, obs)
            n_obs = m
        elif attacker == ATK_UNIFORM:
            attack = pick_uniform(K, atk_u[ti, 0])
        elif attacker == ATK_FIXED:
            attack = atk_fixed

        # resolve the slot; x_t(j) = 1 iff the SU attempted j and PU idle
        su_attempt = pu_idle[su] == 1
        if su_attempt:
            col_sums[su] += 1
            if su != attack:
                traffic += 1
            if su == attack:
                gain += 1

        # SU full-information update
        if su_policy == SU_HEDGE:
            for j in range(K):
                if pu_idle[j] == 1 and j != attack:
                    lw_su[j] += eta_su
            renormalize(lw_su)

        # attacker update from observations only
        if attacker == ATK_POLA and n_obs == 1:
            jj = obs[0]
            x = 1.0 if (jj == su and su_attempt) else 0.0
            lw_atk[jj] += eta * (x * K / delta)
            renormalize(lw_atk)
        elif attacker == ATK_PROLA:
            coef = m / (K - 1.0)
            for o in range(m):
                jj = obs[o]
                x = 1.0 if (jj == su and su_attempt) else 0.0
                lw_atk[jj] += eta * (x / (coef * (1.0 - probs[jj])))
            renormalize(lw_atk)

        # record checkpoint traces
        if ci < n_ck and t == checkpoints[ci]:
            mx = col_sums[0]
            for k in range(1, K):
                if col_sums[k] > mx:
                    mx = col_sums[k]
            gain_out[ci] = gain
            gmax_out[ci] = mx
            traffic_out[ci] = traffic
            ci += 1
