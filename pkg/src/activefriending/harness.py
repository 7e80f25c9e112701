"""Experiment harness: pair sampling, the comparison experiments and reports.

Every random choice derives from ``(master seed, pair index, phase)``, rows
are assembled in pair order, and wall-clock timings only appear in the JSON
summary, so the CSV body of a run depends on its configuration alone.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import logging
import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from . import baselines
from .diffusion import estimate_f_traces
from .errors import ActiveFriendingError, InfeasibleCoverError, InvalidInstanceError, PMaxTooSmall
from .graph import Instance, VmaxMode, WeightScheme, compute_vmax, load_edge_list
from .pmax import PMAX_FLOOR, stopping_rule_estimate, upsilon
from .raf import RafOptions, prepare, raf, run_framework
from .rng import derive_seed

log = logging.getLogger(__name__)

SCREEN_EPSILON0 = 0.3
ATTEMPTS_PER_PAIR = 1000
RATIO_THRESHOLDS = (0.2, 0.4, 0.6, 0.8, 1.0)

# phase keys under a pair seed
_RAF, _EVAL, _SWEEP = 0, 1, 2
# streams under the master seed, far from any pair index
_PAIR_DRAWS = 1 << 40
_SCREEN = (1 << 40) + 1

PROTOCOL_NOTES = (
    "pairs are drawn uniformly over ordered node pairs and screened by a stopping-rule "
    f"p_max estimate (eps0 = {SCREEN_EPSILON0}) against pmax_floor",
    "baseline sets always contain t first",
    "all strategies of a pair are scored on the same sampled traces",
)


class Experiment(str, enum.Enum):
    FIXED_BUDGET = "fixed-budget"
    MATCH_HD = "match-hd"
    MATCH_SP = "match-sp"
    VMAX_RATIO = "vmax-ratio"
    REALIZATION_SWEEP = "realization-sweep"


@dataclass
class ExperimentConfig:
    """Everything that determines an experiment run.

    ``pairs`` fixes the (s, t) label pairs instead of sampling ``pair_count``.
    ``k_cap`` bounds the budget growth of the match experiments (``None``:
    all candidates).
    """

    dataset: str
    experiment: Experiment = Experiment.FIXED_BUDGET
    weight_scheme: WeightScheme = WeightScheme.DEGREE_RECIPROCAL
    pair_count: int = 10
    pmax_floor: float = PMAX_FLOOR
    alpha: float = 0.1
    epsilon: float = 0.01
    n_big: float = 100_000
    l_override: int | None = 100_000
    eval_samples: int = 10_000
    seed: int = 0
    out: str | None = None
    workers: int = 1
    pairs: tuple | None = None
    k_cap: int | None = None
    sweep_ls: tuple = (1_000, 10_000, 100_000)
    vmax_mode: VmaxMode = VmaxMode.OVERAPPROX

    def __post_init__(self):
        self.experiment = Experiment(self.experiment)
        self.weight_scheme = WeightScheme(self.weight_scheme)
        self.vmax_mode = VmaxMode(self.vmax_mode)
        if not 0.0 < self.pmax_floor <= 1.0:
            raise ValueError(f"pmax_floor must lie in (0, 1], got {self.pmax_floor}")
        if self.pairs is None and self.pair_count < 0:
            raise ValueError("pair_count must be >= 0")
        if self.eval_samples < 1:
            raise ValueError("eval_samples must be >= 1")
        if self.pairs is not None:
            self.pairs = tuple((s, t) for s, t in self.pairs)
        self.sweep_ls = tuple(int(x) for x in self.sweep_ls)

    def echo(self):
        d = dataclasses.asdict(self)
        for k, v in d.items():
            if isinstance(v, enum.Enum):
                d[k] = v.value
        d["pairs"] = None if self.pairs is None else [list(p) for p in self.pairs]
        d["sweep_ls"] = list(self.sweep_ls)
        return d


@dataclass
class PairResult:
    """One row of an experiment report.

    Ratios are ``None`` when the denominator is zero or the quantity was not
    measured by the experiment.  ``extra`` holds experiment-specific columns.
    """

    pair_index: int
    s: object
    t: object
    status: str = "ok"
    message: str = ""
    p_star: float | None = None
    l: int | None = None
    ones: int | None = None
    size_raf: int | None = None
    size_hd: int | None = None
    size_sp: int | None = None
    size_vmax: int | None = None
    f_raf: float | None = None
    hw_raf: float | None = None
    f_hd: float | None = None
    hw_hd: float | None = None
    f_sp: float | None = None
    hw_sp: float | None = None
    f_vmax: float | None = None
    hw_vmax: float | None = None
    ratio_hd: float | None = None
    ratio_sp: float | None = None
    ratio_vmax: float | None = None
    extra: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.status == "ok"

    def row(self):
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)
             if f.name not in ("extra", "timings")}
        d.update(self.extra)
        return d


BASE_COLUMNS = tuple(f.name for f in dataclasses.fields(PairResult) if f.name not in ("extra", "timings"))


def _ratio(num, den):
    return None if num is None or not den else num / den


# ---------------------------------------------------------------- pairs


def screen_pair(instance, pmax_floor, n_big=100_000, seed=0):
    """Whether a coarse stopping-rule estimate of p_max clears ``pmax_floor``.

    The estimate uses ``eps0 = 0.3`` and gives up (rejecting the pair) after
    ``1.5 * upsilon / pmax_floor`` traces.
    """
    if not compute_vmax(instance, VmaxMode.OVERAPPROX):
        return False
    budget = math.ceil(1.5 * upsilon(SCREEN_EPSILON0, n_big) / pmax_floor)
    try:
        est = stopping_rule_estimate(instance, SCREEN_EPSILON0, n_big, budget, seed=seed)
    except PMaxTooSmall:
        return False
    return est.p_star >= pmax_floor


def sample_pairs(graph, pair_count, pmax_floor, seed, n_big=100_000, attempt_cap=None):
    """Uniformly drawn (s, t) node ids that pass :func:`screen_pair`.

    Pairs with ``s == t``, ``t`` adjacent to ``s``, or already accepted are
    skipped.  Returns
    fewer pairs (with a warning) when ``attempt_cap`` draws do not yield
    enough.
    """
    if pair_count <= 0:
        return []
    if graph.n < 2:
        raise ValueError("graph needs at least two nodes")
    attempt_cap = ATTEMPTS_PER_PAIR * pair_count if attempt_cap is None else attempt_cap
    rng = np.random.default_rng(derive_seed(seed, _PAIR_DRAWS))
    accepted = []
    for attempt in range(attempt_cap):
        s, t = (int(x) for x in rng.integers(0, graph.n, 2))
        if (s, t) in accepted:
            continue
        try:
            inst = Instance(graph, s, t)
        except InvalidInstanceError:
            continue
        if screen_pair(inst, pmax_floor, n_big, derive_seed(seed, _SCREEN, attempt)):
            accepted.append((s, t))
            if len(accepted) == pair_count:
                return accepted
    log.warning("pair sampling accepted %d of %d pairs within %d attempts",
                len(accepted), pair_count, attempt_cap)
    return accepted


# ---------------------------------------------------------------- experiments


def _run_raf(inst, cfg, pair_seed, res):
    t0 = time.perf_counter()
    opts = RafOptions(vmax_mode=cfg.vmax_mode, l_override=cfg.l_override, eval_samples=0)
    sol = raf(inst, cfg.alpha, cfg.epsilon, cfg.n_big, opts, seed=derive_seed(pair_seed, _RAF))
    res.timings["raf"] = time.perf_counter() - t0
    res.p_star = sol.pmax_estimate.p_star
    res.l = sol.l
    res.ones = sol.ones
    res.size_raf = len(sol.invitation)
    return sol


def _score(inst, nodes, cfg, pair_seed, res, name):
    t0 = time.perf_counter()
    est = estimate_f_traces(inst, nodes, cfg.eval_samples, derive_seed(pair_seed, _EVAL))
    res.timings[f"eval_{name}"] = time.perf_counter() - t0
    setattr(res, f"f_{name}", est.mean)
    setattr(res, f"hw_{name}", est.half_width)
    return est


def _fixed_budget(inst, cfg, pair_seed, res):
    sol = _run_raf(inst, cfg, pair_seed, res)
    _score(inst, sol.invitation, cfg, pair_seed, res, "raf")
    k = len(sol.invitation)
    for name, fn in (("hd", baselines.hd), ("sp", baselines.sp)):
        sel = fn(inst, k)
        setattr(res, f"size_{name}", len(sel))
        res.extra[f"padded_{name}"] = int(sel.padded)
        setattr(res, f"ratio_{name}", _ratio(len(sel), k))
        _score(inst, sel.nodes, cfg, pair_seed, res, name)


def _match(inst, cfg, pair_seed, res, strategy):
    name = baselines.Strategy(strategy).value
    sol = _run_raf(inst, cfg, pair_seed, res)
    f_raf = _score(inst, sol.invitation, cfg, pair_seed, res, "raf")
    k_cap = len(inst.candidates) if cfg.k_cap is None else cfg.k_cap
    t0 = time.perf_counter()
    grown = baselines.grow_until(inst, strategy, f_raf.mean, cfg.eval_samples, k_cap,
                                 derive_seed(pair_seed, _EVAL))
    res.timings[f"grow_{name}"] = time.perf_counter() - t0
    setattr(res, f"size_{name}", grown.k)
    setattr(res, f"f_{name}", grown.estimate.mean)
    setattr(res, f"hw_{name}", grown.estimate.half_width)
    setattr(res, f"ratio_{name}", _ratio(grown.k, res.size_raf))
    res.extra["reached"] = int(grown.reached)
    # smallest budget reaching each fraction of f(I_RAF)
    for thr in RATIO_THRESHOLDS:
        hit = np.flatnonzero(grown.curve >= thr * f_raf.mean - 1e-12)
        size = int(hit[0]) + 1 if len(hit) else None
        res.extra[f"size_ratio_at_{thr:.1f}"] = _ratio(size, res.size_raf)


def _vmax_ratio(inst, cfg, pair_seed, res):
    sol = _run_raf(inst, cfg, pair_seed, res)
    _score(inst, sol.invitation, cfg, pair_seed, res, "raf")
    t0 = time.perf_counter()
    vmax = compute_vmax(inst, VmaxMode.EXACT)
    res.timings["vmax"] = time.perf_counter() - t0
    res.size_vmax = len(vmax)
    _score(inst, vmax, cfg, pair_seed, res, "vmax")
    res.ratio_vmax = _ratio(res.size_vmax, res.size_raf)


def _sweep(inst, cfg, pair_seed, res):
    # beta and p* stay fixed; only the batch size changes
    t0 = time.perf_counter()
    conf, pmax_est = prepare(inst, cfg.alpha, cfg.epsilon, cfg.n_big,
                             RafOptions(vmax_mode=cfg.vmax_mode), derive_seed(pair_seed, _RAF))
    res.timings["prepare"] = time.perf_counter() - t0
    res.p_star = pmax_est.p_star
    for i, l in enumerate(cfg.sweep_ls):
        t0 = time.perf_counter()
        try:
            part = run_framework(inst, dataclasses.replace(conf, l_override=l), pmax_est,
                                 RafOptions(eval_samples=0), derive_seed(pair_seed, _SWEEP, i))
        except (PMaxTooSmall, InfeasibleCoverError):
            res.extra[f"size_at_{l}"] = None
            res.extra[f"f_at_{l}"] = 0.0
            res.extra[f"hw_at_{l}"] = None
            continue
        res.timings[f"sweep_{l}"] = time.perf_counter() - t0
        est = estimate_f_traces(inst, part.invitation, cfg.eval_samples, derive_seed(pair_seed, _EVAL))
        res.extra[f"size_at_{l}"] = len(part.invitation)
        res.extra[f"f_at_{l}"] = est.mean
        res.extra[f"hw_at_{l}"] = est.half_width


_RUNNERS = {
    Experiment.FIXED_BUDGET: _fixed_budget,
    Experiment.MATCH_HD: lambda i, c, p, r: _match(i, c, p, r, "hd"),
    Experiment.MATCH_SP: lambda i, c, p, r: _match(i, c, p, r, "sp"),
    Experiment.VMAX_RATIO: _vmax_ratio,
    Experiment.REALIZATION_SWEEP: _sweep,
}


def extra_columns(cfg):
    if cfg.experiment is Experiment.FIXED_BUDGET:
        return ("padded_hd", "padded_sp")
    if cfg.experiment in (Experiment.MATCH_HD, Experiment.MATCH_SP):
        return ("reached", *(f"size_ratio_at_{thr:.1f}" for thr in RATIO_THRESHOLDS))
    if cfg.experiment is Experiment.REALIZATION_SWEEP:
        return tuple(f"{k}_at_{l}" for l in cfg.sweep_ls for k in ("size", "f", "hw"))
    return ()


def run_pair(graph, cfg, index, s_label, t_label):
    """Run the configured experiment on one labelled pair; failures become a status."""
    res = PairResult(index, s_label, t_label)
    pair_seed = derive_seed(cfg.seed, index)
    try:
        inst = Instance.from_labels(graph, s_label, t_label)
        _RUNNERS[cfg.experiment](inst, cfg, pair_seed, res)
    except PMaxTooSmall as e:
        res.status, res.message = "pmax_too_small", str(e)
    except (InvalidInstanceError, InfeasibleCoverError) as e:
        res.status, res.message = "infeasible", str(e)
    except ActiveFriendingError as e:
        res.status, res.message = "error", str(e)
    return res


def _run_pair_star(args):
    return run_pair(*args)


# ---------------------------------------------------------------- reports


def _mean(values):
    values = [v for v in values if v is not None]
    return math.fsum(values) / len(values) if values else None


def aggregate(results, cfg):
    """Averages over the pairs with status ``ok``."""
    ok = [r for r in results if r.ok]
    agg = {"pairs": len(results), "pairs_ok": len(ok)}
    for name in ("raf", "hd", "sp", "vmax"):
        fs = [getattr(r, f"f_{name}") for r in ok]
        if any(v is not None for v in fs):
            agg[f"mean_f_{name}"] = _mean(fs)
            agg[f"mean_hw_{name}"] = _mean(getattr(r, f"hw_{name}") for r in ok)
            agg[f"mean_size_{name}"] = _mean(getattr(r, f"size_{name}") for r in ok)
    for name in ("hd", "sp", "vmax"):
        vals = [getattr(r, f"ratio_{name}") for r in ok]
        if any(v is not None for v in vals):
            agg[f"mean_ratio_{name}"] = _mean(vals)
    if cfg.experiment in (Experiment.MATCH_HD, Experiment.MATCH_SP):
        agg["size_ratio_by_f_ratio"] = {
            f"{thr:.1f}": _mean(r.extra[f"size_ratio_at_{thr:.1f}"] for r in ok)
            for thr in RATIO_THRESHOLDS}
        agg["reached_fraction"] = _mean(r.extra["reached"] for r in ok)
    if cfg.experiment is Experiment.REALIZATION_SWEEP:
        agg["mean_f_by_l"] = {str(l): _mean(r.extra[f"f_at_{l}"] for r in ok) for l in cfg.sweep_ls}
    return agg


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(results, cfg, fh):
    cols = (*BASE_COLUMNS, *extra_columns(cfg))
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(cols)
    for r in results:
        row = r.row()
        w.writerow([_cell(row.get(c)) for c in cols])


def csv_text(results, cfg):
    buf = io.StringIO()
    write_csv(results, cfg, buf)
    return buf.getvalue()


def versions():
    out = {"python": platform.python_version()}
    for pkg in ("numpy", "scipy", "networkx", "numba"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = None
    try:
        out["activefriending"] = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        out["activefriending"] = None
    return out


def summary(results, cfg, pairs):
    per_pair = []
    for r in results:
        d = r.row()
        d["timings"] = r.timings
        per_pair.append(d)
    return {
        "config": cfg.echo(),
        "seeds": {
            "master": cfg.seed,
            "pairs": [derive_seed(cfg.seed, i) for i in range(len(pairs))],
        },
        "per_pair": per_pair,
        "aggregates": aggregate(results, cfg),
        "versions": versions(),
        "protocol_notes": list(PROTOCOL_NOTES),
    }


def summary_path(out):
    out = Path(out)
    return out.with_name(out.stem + ".summary.json") if out.suffix == ".json" else out.with_suffix(".json")


@dataclass
class ExperimentReport:
    results: list
    summary: dict
    csv: str


def run_experiment(cfg, graph=None):
    """Run ``cfg``; when ``cfg.out`` is set, write the CSV there and the summary beside it.

    ``graph`` skips loading ``cfg.dataset``.  Raises ``OSError`` or
    :class:`GraphFormatError` when the dataset cannot be read.
    """
    if graph is None:
        graph = load_edge_list(cfg.dataset, cfg.weight_scheme)
    if cfg.pairs is not None:
        pairs = list(cfg.pairs)
    else:
        pairs = [(graph.label(s), graph.label(t))
                 for s, t in sample_pairs(graph, cfg.pair_count, cfg.pmax_floor, cfg.seed, cfg.n_big)]
    jobs = [(graph, cfg, i, s, t) for i, (s, t) in enumerate(pairs)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_pair_star, jobs))
    else:
        results = [_run_pair_star(j) for j in jobs]
    report = ExperimentReport(results, summary(results, cfg, pairs), csv_text(results, cfg))
    if cfg.out:
        out = Path(cfg.out)
        out.write_text(report.csv)
        summary_path(out).write_text(json.dumps(report.summary, indent=2, default=str) + "\n")
    return report
