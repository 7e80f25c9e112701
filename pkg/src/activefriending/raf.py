"""Realization-based active friending (RAF).

Pipeline: derive accuracy parameters from (alpha, epsilon), estimate p_max
with the stopping rule, size a batch of backward traces, and cover a
beta-fraction of its type-1 traces with as few invitations as possible.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

from scipy.optimize import brentq

from .cover import DEFAULT_EXACT_CAP, build_cover_instance, solve
from .diffusion import FEstimate, estimate_f_traces
from .errors import ParameterError, PMaxTooSmall
from .graph import VmaxMode, compute_vmax
from .pmax import PmaxEstimate, stopping_rule_estimate
from .realization import RealizationBatch, sample_batch
from .rng import derive_seed

RESIDUAL_TOL = 1e-12


def _beta(alpha, x):
    return (alpha - x) / (1.0 + x)


def _slack_residual(alpha, epsilon, x):
    # beta (1 - x) - x - (alpha - epsilon), with x = eps1 (1 + eps0)
    return _beta(alpha, x) * (1.0 - x) - x - (alpha - epsilon)


def _check_alpha_epsilon(alpha, epsilon):
    if not 0.0 < alpha <= 1.0:
        raise ParameterError(f"alpha must lie in (0, 1], got {alpha}")
    if not 0.0 < epsilon < alpha:
        raise ParameterError(f"epsilon must lie in (0, alpha), got {epsilon}")


def solve_params(alpha, epsilon, n_eff):
    """Solve for ``(epsilon0, epsilon1, beta)`` under the coupling ``eps0 = n_eff * eps1``.

    ``beta = (alpha - x) / (1 + x)`` and ``beta (1 - x) - x = alpha - epsilon``
    with ``x = eps1 (1 + eps0)``; the root in ``eps1`` is bracketed on
    ``(0, eps1_hi]`` where ``x(eps1_hi) = alpha``.
    """
    _check_alpha_epsilon(alpha, epsilon)
    if n_eff < 1:
        raise ParameterError(f"n_eff must be >= 1, got {n_eff}")

    def g(e1):
        return _slack_residual(alpha, epsilon, e1 * (1.0 + n_eff * e1))

    hi = (-1.0 + math.sqrt(1.0 + 4.0 * n_eff * alpha)) / (2.0 * n_eff)
    if not (g(0.0) > 0.0 > g(hi)):
        raise ParameterError("no parameter root in (0, eps1_hi]")
    e1 = brentq(g, 0.0, hi, xtol=1e-300, rtol=4 * 2.220446049250313e-16, maxiter=500)
    if abs(g(e1)) > RESIDUAL_TOL:
        raise ParameterError(f"parameter solve residual {g(e1):.3g} above tolerance")
    e0 = n_eff * e1
    return e0, e1, _beta(alpha, e1 * (1.0 + e0))


def solve_params_capped(alpha, epsilon, epsilon0):
    """Parameters with ``eps0`` fixed instead of coupled to ``n_eff``.

    ``x = eps1 (1 + eps0)`` is determined by (alpha, epsilon) alone, so any
    ``eps0`` in (0, 1) admits an ``eps1``; found by the same bracketing.
    """
    _check_alpha_epsilon(alpha, epsilon)

    def g(e1):
        return _slack_residual(alpha, epsilon, e1 * (1.0 + epsilon0))

    hi = alpha / (1.0 + epsilon0)
    e1 = brentq(g, 0.0, hi, xtol=1e-300, rtol=4 * 2.220446049250313e-16, maxiter=500)
    if abs(g(e1)) > RESIDUAL_TOL:
        raise ParameterError(f"parameter solve residual {g(e1):.3g} above tolerance")
    return float(epsilon0), e1, _beta(alpha, e1 * (1.0 + epsilon0))


def compute_l_star(epsilon0, epsilon1, n_big, n_eff, p_star):
    """Realizations needed so every F(B_l, I)/l is within ``eps1 * p*`` of f(I)."""
    if not epsilon0 < 1.0:
        raise ParameterError(f"epsilon0 must be < 1, got {epsilon0}")
    if not p_star > 0.0:
        raise ParameterError("p_star must be positive")
    num = (math.log(2) + math.log(n_big) + n_eff * math.log(2)) * (2.0 + epsilon1 * (1.0 - epsilon0))
    return max(1, math.ceil(num / (epsilon1**2 * (1.0 - epsilon0) ** 2 * p_star)))


@dataclass(frozen=True)
class RafConfig:
    alpha: float
    epsilon: float
    n_big: float
    epsilon0: float
    epsilon1: float
    beta: float
    n_eff: int
    l_star: int | None = None
    l_override: int | None = None
    coupled: bool = True

    @property
    def l(self):
        return self.l_override if self.l_override is not None else self.l_star


@dataclass
class RafOptions:
    """Knobs for :func:`raf`.

    ``full_n`` uses the node count instead of ``|V_max|`` in the sample-size
    bound.  When the coupled ``eps0`` would exceed ``epsilon0_max`` it is
    pinned at ``epsilon0_max`` (the coupling only balances running time).
    """

    full_n: bool = False
    vmax_mode: VmaxMode = VmaxMode.OVERAPPROX
    l_override: int | None = None
    epsilon0_max: float = 0.5
    exact_cap: int = DEFAULT_EXACT_CAP
    eval_samples: int = 10_000
    max_samples: int | None = None
    workers: int | None = None


@dataclass(frozen=True)
class RafSolution:
    invitation: frozenset
    l: int
    ones: int
    p: int
    covered: int
    exact: bool
    config: RafConfig
    pmax_estimate: PmaxEstimate
    f_check: FEstimate | None = field(default=None)
    batch: RealizationBatch | None = field(default=None, repr=False, compare=False)


def make_config(alpha, epsilon, n_big, n_eff, epsilon0_max=0.5, l_override=None):
    e0, e1, beta = solve_params(alpha, epsilon, n_eff)
    coupled = e0 <= epsilon0_max
    if not coupled:
        e0, e1, beta = solve_params_capped(alpha, epsilon, epsilon0_max)
    return RafConfig(alpha, epsilon, n_big, e0, e1, beta, int(n_eff),
                     l_override=l_override, coupled=coupled)


def prepare(instance, alpha, epsilon, n_big, options=None, seed=0):
    """Parameters and p_max estimate for :func:`raf`, before any batch is drawn."""
    opts = options or RafOptions()
    if n_big < 3:
        raise ParameterError(f"N must be >= 3, got {n_big}")
    _check_alpha_epsilon(alpha, epsilon)
    region = compute_vmax(instance, opts.vmax_mode)
    if not region:
        raise PMaxTooSmall(0.0, 0)
    n_eff = instance.graph.n if opts.full_n else len(region)
    cfg = make_config(alpha, epsilon, n_big, n_eff, opts.epsilon0_max, opts.l_override)
    est = stopping_rule_estimate(instance, cfg.epsilon0, n_big, opts.max_samples,
                                 seed=derive_seed(seed, 0))
    l_star = compute_l_star(cfg.epsilon0, cfg.epsilon1, n_big, n_eff, est.p_star)
    return dataclasses.replace(cfg, l_star=l_star), est


def raf(instance, alpha, epsilon, n_big, options=None, seed=0):
    """Find a small invitation set with f(I) >= (alpha - epsilon) p_max w.h.p.

    Raises :class:`PMaxTooSmall` when t is unreachable or p_max is
    indistinguishable from zero.
    """
    opts = options or RafOptions()
    cfg, est = prepare(instance, alpha, epsilon, n_big, opts, seed)
    return run_framework(instance, cfg, est, opts, seed)


def run_framework(instance, cfg, est, opts, seed):
    """Sample ``cfg.l`` traces and cover ``ceil(beta |B^1|)`` of the type-1 ones."""
    batch = sample_batch(instance, cfg.l, derive_seed(seed, 1), workers=opts.workers)
    ones = batch.ones
    if ones == 0:
        raise PMaxTooSmall(0.0, batch.l)
    p = math.ceil(cfg.beta * ones)
    ci = build_cover_instance(batch, instance.candidates, p)
    sol = solve(ci, opts.exact_cap)
    covered = batch.covered_count(sol.chosen)
    if covered < p:
        raise RuntimeError(f"cover solver returned an infeasible set ({covered} < {p})")
    f_check = None
    if opts.eval_samples:
        f_check = estimate_f_traces(instance, sol.chosen, opts.eval_samples, derive_seed(seed, 2),
                                    workers=opts.workers)
    return RafSolution(sol.chosen, batch.l, ones, p, covered, sol.exact, cfg, est, f_check, batch)


def solve_alpha_one(instance):
    """The unique minimum invitation set reaching p_max."""
    return compute_vmax(instance, VmaxMode.EXACT)
