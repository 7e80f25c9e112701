"""Minimum active friending under the linear threshold model.

Given a social graph, an initiator ``s`` and a target ``t``, find a small set
of users to invite so that ``t`` accepts a friend request from ``s`` with
probability close to the best achievable.
"""

import types as _types

from .baselines import GrowResult, Selection, Strategy, grow_until, hd, sp
from .cover import CoverInstance, CoverSolution, build_cover_instance, solve_exact, solve_greedy
from .diffusion import (FEstimate, Method, estimate_f_thresholds, estimate_f_traces, exact_f,
                        exact_pmax, forward_process1)
from .errors import (ActiveFriendingError, ContractViolation, EnumerationTooLarge, GraphFormatError,
                     InfeasibleCoverError, IntractableError, InvalidInstanceError, NormalizationError,
                     ParameterError, PMaxTooSmall)
from .graph import Instance, SocialGraph, VmaxMode, WeightScheme, compute_vmax, load_edge_list
from .harness import ExperimentConfig, PairResult, run_experiment, sample_pairs
from .pmax import PmaxEstimate, stopping_rule_estimate, upsilon
from .raf import RafConfig, RafOptions, RafSolution, compute_l_star, raf, solve_alpha_one, solve_params
from .realization import (ALEPH0, BackwardTrace, FriendingOutcome, RealizationBatch, Terminal,
                          enumerate_realizations, forward_process2, sample_backward_trace,
                          sample_batch, trace_distribution, trace_of)

__all__ = sorted(name for name, obj in globals().items()
                 if not name.startswith("_") and not isinstance(obj, _types.ModuleType))
