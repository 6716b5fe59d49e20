"""Slotted cognitive-radio simulator with online-learning PUE attackers."""

from .env import PuModel, ChannelState, SlotOutcome, RewardMatrix
from .harness import ExperimentConfig, AggregateResult, run_experiment, run_one
from .learners import WeightState, PolaParams, ProlaParams
from .metrics import (gmax, pola_upper_bound, prola_upper_bound, lower_bound,
                      loglog_slope, RegretTrace)

__all__ = [
    "PuModel", "ChannelState", "SlotOutcome", "RewardMatrix",
    "ExperimentConfig", "AggregateResult", "run_experiment", "run_one",
    "WeightState", "PolaParams", "ProlaParams",
    "gmax", "pola_upper_bound", "prola_upper_bound", "lower_bound",
    "loglog_slope", "RegretTrace",
]
