"""Secure buffer-aided relaying with hybrid half-/full-duplex modes.

Alice sends to Bob through a full-duplex relay (Rooney) with a finite buffer
while Eve listens to both. The package computes per-slot secrecy rates,
chooses a transmission mode per slot, analyzes the relay buffer as a
birth-death chain, optimizes the tie-break policy with a linear-fractional
program and checks everything against a slot-level simulation.
"""

from .channel import ChannelDraw, SinrSet, SystemParams, compute_sinrs, sample_channel_draw
from .markov import (ModeProbabilities, NonErgodicChainError, StationaryDistribution,
                     evaluate_policy, limiting_distribution, stationary, throughput,
                     transition_probs)
from .montecarlo import ProbEstimate, estimate_mode_probs
from .optimize import (LfpError, LfpInfeasible, LfpInstance, PolicySolution,
                       brute_force_policy, build_lfp, optimize_policy, solve_lfp)
from .policy import Indicators, Mode, QueuePolicy, apply_mode, indicators, select_mode
from .rates import SecrecySnapshot, df_fd_eve_rate, rf_fd_region, secrecy_snapshot
from .sim import SchemeVariant, SimReport, run_slots, validate_against_markov

__version__ = "0.1.0"
