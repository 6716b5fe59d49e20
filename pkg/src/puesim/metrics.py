"""Regret accounting and the analytical bound curves for overlay plots."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .env import RewardMatrix

E_MINUS_2 = math.e - 2.0


@dataclass
class RegretTrace:
    """Per-run regret/gain trace sampled at checkpoint slots."""

    checkpoints: np.ndarray
    regret: np.ndarray
    gain: np.ndarray

    def __post_init__(self):
        if not (len(self.checkpoints) == len(self.regret) == len(self.gain)):
            raise ValueError("trace vectors must share the checkpoint grid")
        # Per-run regret may dip below zero: an attacker that switches
        # channels can collect more than the best *fixed* channel's column
        # sum.  Only the checkpoint/regret/gain alignment is enforced.


@dataclass
class BoundCurve:
    kind: str  # pola_upper | pola_lower | prola_upper | prola_lower | prola_m_upper
    checkpoints: np.ndarray
    values: np.ndarray
    constant: float | None = None


def gmax(matrix: RewardMatrix | np.ndarray, upto: int) -> int:
    """Best fixed channel in hindsight: max column sum over slots 1..upto."""
    entries = matrix.entries if isinstance(matrix, RewardMatrix) else np.asarray(matrix)
    if not 1 <= upto <= entries.shape[0]:
        raise ValueError(f"upto={upto} outside [1, {entries.shape[0]}]")
    return int(entries[:upto].sum(axis=0).max())


def pola_upper_bound(n_channels: int, t) -> float | np.ndarray:
    """Regret upper bound (sqrt(3(e-2)) + 3/2) * (T^2 K ln K)^(1/3)."""
    if n_channels < 2:
        raise ValueError("need at least 2 channels")
    coef = math.sqrt(3.0 * E_MINUS_2) + 1.5
    t = np.asarray(t, dtype=float)
    out = coef * (t ** 2 * n_channels * math.log(n_channels)) ** (1.0 / 3.0)
    return out if out.ndim else float(out)


def prola_upper_bound(n_channels: int, t, m: int = 1) -> float | np.ndarray:
    """Regret upper bound; m = 1 and m >= 2 carry different constants."""
    if not 1 <= m <= n_channels - 1:
        raise ValueError(f"m={m} outside [1, K-1]")
    t = np.asarray(t, dtype=float)
    lnk = math.log(n_channels)
    if m == 1:
        out = 2.0 * math.sqrt(2.0 * E_MINUS_2) * np.sqrt(t * (n_channels - 1) * lnk)
    else:
        out = 4.0 * math.sqrt(E_MINUS_2) * np.sqrt(t * (n_channels - 1) / m * lnk)
    return out if out.ndim else float(out)


def lower_bound(kind: str, n_channels: int, t, constant: float) -> float | np.ndarray:
    """Parametric lower-bound curve; the constant is a caller-supplied scale."""
    if constant <= 0.0:
        raise ValueError("lower-bound constant must be positive")
    t = np.asarray(t, dtype=float)
    if kind == "pola":
        out = constant * (n_channels * t ** 2) ** (1.0 / 3.0)
    elif kind == "prola":
        out = constant * np.sqrt(n_channels * t)
    else:
        raise ValueError(f"unknown lower bound kind {kind!r}")
    return out if out.ndim else float(out)


def loglog_slope(trace, window: tuple[int, int]) -> float:
    """Least-squares slope of log(regret) vs log(t) over a slot window.

    ``trace`` is a RegretTrace or a (checkpoints, regret) pair.
    """
    if isinstance(trace, RegretTrace):
        checkpoints, regret = trace.checkpoints, trace.regret
    else:
        checkpoints, regret = trace
    checkpoints = np.asarray(checkpoints)
    regret = np.asarray(regret, dtype=float)
    lo, hi = window
    mask = (checkpoints >= lo) & (checkpoints <= hi)
    if mask.sum() < 5:
        raise ValueError("need at least 5 checkpoints inside the window")
    if (regret[mask] <= 0.0).any():
        raise ValueError("slope undefined: nonpositive regret inside the window")
    slope, _ = np.polyfit(np.log(checkpoints[mask]), np.log(regret[mask]), 1)
    return float(slope)
