"""Command-line front end.

Exit codes: 0 success, 1 infeasible instance, 2 I/O or parse error,
3 invalid parameters.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

from . import baselines, harness
from .diffusion import estimate_f_thresholds, estimate_f_traces, exact_f
from .errors import (ContractViolation, EnumerationTooLarge, GraphFormatError, InfeasibleCoverError,
                     InvalidInstanceError, NormalizationError, ParameterError, PMaxTooSmall)
from .graph import Instance, VmaxMode, WeightScheme, compute_vmax, load_edge_list
from .pmax import stopping_rule_estimate
from .raf import RafOptions, raf

EXIT_OK, EXIT_INFEASIBLE, EXIT_IO, EXIT_PARAMS = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAMS, f"{self.prog}: error: {message}\n")


def _labels(text):
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated node labels, got {text!r}") from None


def _common(p, pair=True):
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--weights", choices=[w.value for w in WeightScheme], default="recip",
                   help="recip: w(u,v) = 1/deg(v); file: 'u v w(u,v) w(v,u)' per line")
    if pair:
        p.add_argument("--s", type=int, required=True, help="initiator label")
        p.add_argument("--t", type=int, required=True, help="target label")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--workers", type=int, default=1)


def _raf_params(p, alpha=0.1, epsilon=0.01):
    p.add_argument("--alpha", type=float, default=alpha)
    p.add_argument("--epsilon", type=float, default=epsilon)
    p.add_argument("--big-n", type=float, default=100_000, help="failure probability is 1/N")
    p.add_argument("--realizations", type=int, default=None,
                   help="batch size l used instead of the worst-case bound")


def build_parser():
    parser = _Parser(prog="activefriending", description="Minimum active friending toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("estimate-pmax", help="stopping-rule estimate of p_max")
    _common(p)
    p.add_argument("--epsilon0", type=float, default=0.3, help="relative error")
    p.add_argument("--big-n", type=float, default=100_000)
    p.add_argument("--max-samples", type=int, default=None)

    p = sub.add_parser("solve", help="run RAF")
    _common(p)
    _raf_params(p)
    p.add_argument("--samples", type=int, default=10_000, help="traces used to score the answer (0: skip)")
    p.add_argument("--full-n", action="store_true", help="size the batch with n instead of |V_max|")
    p.add_argument("--vmax-mode", choices=[m.value for m in VmaxMode], default="overapprox")

    p = sub.add_parser("baseline", help="HD or SP invitation set")
    _common(p)
    p.add_argument("--strategy", choices=[s.value for s in baselines.Strategy], required=True)
    p.add_argument("--k", type=int, required=True, help="budget")
    p.add_argument("--samples", type=int, default=10_000, help="traces used to score the set (0: skip)")

    p = sub.add_parser("vmax", help="candidates on some simple path from N_s to t")
    _common(p)
    p.add_argument("--mode", choices=[m.value for m in VmaxMode], default="exact")

    p = sub.add_parser("exact-f", help="acceptance probability of an invitation set")
    _common(p)
    p.add_argument("--invite", type=_labels, required=True, help="comma-separated labels")
    p.add_argument("--method", choices=["exact", "thresholds", "traces"], default="exact")
    p.add_argument("--samples", type=int, default=10_000, help="Monte Carlo samples")

    p = sub.add_parser("experiment", help="run a comparison experiment over many pairs")
    _common(p, pair=False)
    p.add_argument("--experiment", choices=[e.value for e in harness.Experiment], default="fixed-budget")
    _raf_params(p)
    p.set_defaults(realizations=100_000)
    p.add_argument("--pairs", type=int, default=10, help="number of sampled pairs")
    p.add_argument("--pair", nargs=2, type=int, action="append", metavar=("S", "T"),
                   help="explicit pair (repeatable); disables sampling")
    p.add_argument("--pmax-floor", type=float, default=0.01)
    p.add_argument("--samples", type=int, default=10_000, help="traces per f estimate")
    p.add_argument("--k-cap", type=int, default=None)
    p.add_argument("--sweep", type=_labels, default=[1_000, 10_000, 100_000],
                   help="batch sizes for realization-sweep")
    return parser


def _emit(args, rows, payload=None):
    """Write rows as CSV, or ``payload`` (default: the rows) as JSON."""
    if args.format == "json":
        text = json.dumps(payload if payload is not None else rows, indent=2, default=str) + "\n"
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows({k: _cell(v) for k, v in r.items()} for r in rows)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple, frozenset, set)):
        return " ".join(str(x) for x in v)
    return v


def _instance(args):
    graph = load_edge_list(args.graph, args.weights)
    return Instance.from_labels(graph, args.s, args.t)


def _label_set(graph, nodes):
    return sorted(graph.label(v) for v in nodes)


def cmd_estimate_pmax(args):
    inst = _instance(args)
    est = stopping_rule_estimate(inst, args.epsilon0, args.big_n, args.max_samples, seed=args.seed)
    _emit(args, [{"s": args.s, "t": args.t, "p_star": est.p_star, "upsilon": est.upsilon,
                  "samples": est.total_samples, "epsilon0": est.epsilon0}])


def cmd_solve(args):
    inst = _instance(args)
    opts = RafOptions(full_n=args.full_n, vmax_mode=VmaxMode(args.vmax_mode),
                      l_override=args.realizations, eval_samples=args.samples, workers=args.workers)
    sol = raf(inst, args.alpha, args.epsilon, args.big_n, opts, seed=args.seed)
    cfg = sol.config
    row = {"s": args.s, "t": args.t, "size": len(sol.invitation),
           "invitation": _label_set(inst.graph, sol.invitation),
           "l": sol.l, "ones": sol.ones, "p": sol.p, "covered": sol.covered, "exact_cover": int(sol.exact),
           "p_star": sol.pmax_estimate.p_star, "epsilon0": cfg.epsilon0, "epsilon1": cfg.epsilon1,
           "beta": cfg.beta, "l_star": cfg.l_star,
           "f": sol.f_check.mean if sol.f_check else None,
           "half_width": sol.f_check.half_width if sol.f_check else None}
    _emit(args, [row])


def cmd_baseline(args):
    inst = _instance(args)
    sel = baselines.strategy_selection(inst, args.strategy, args.k)
    row = {"s": args.s, "t": args.t, "strategy": args.strategy, "k": args.k, "size": len(sel),
           "invitation": [inst.graph.label(v) for v in sel.order],
           "clipped": int(sel.clipped), "padded": int(sel.padded), "f": None, "half_width": None}
    if args.samples:
        est = estimate_f_traces(inst, sel.nodes, args.samples, args.seed, workers=args.workers)
        row["f"], row["half_width"] = est.mean, est.half_width
    _emit(args, [row])


def cmd_vmax(args):
    inst = _instance(args)
    nodes = compute_vmax(inst, VmaxMode(args.mode))
    _emit(args, [{"s": args.s, "t": args.t, "mode": args.mode, "size": len(nodes),
                  "nodes": _label_set(inst.graph, nodes)}])


def cmd_exact_f(args):
    inst = _instance(args)
    try:
        invited = [inst.graph.node_id(v) for v in args.invite]
    except KeyError as e:
        raise ContractViolation(str(e.args[0])) from None
    if args.method == "exact":
        est = exact_f(inst, invited)
    elif args.method == "thresholds":
        est = estimate_f_thresholds(inst, invited, args.samples, args.seed)
    else:
        est = estimate_f_traces(inst, invited, args.samples, args.seed, workers=args.workers)
    _emit(args, [{"s": args.s, "t": args.t, "invitation": sorted(args.invite), "method": args.method,
                  "f": est.mean, "half_width": est.half_width, "samples": est.samples}])


def cmd_experiment(args):
    cfg = harness.ExperimentConfig(
        dataset=args.graph, experiment=args.experiment, weight_scheme=args.weights,
        pair_count=args.pairs, pmax_floor=args.pmax_floor, alpha=args.alpha, epsilon=args.epsilon,
        n_big=args.big_n, l_override=args.realizations, eval_samples=args.samples, seed=args.seed,
        out=None, workers=args.workers, pairs=tuple(map(tuple, args.pair)) if args.pair else None,
        k_cap=args.k_cap, sweep_ls=tuple(args.sweep))
    report = harness.run_experiment(cfg)
    text = json.dumps(report.summary, indent=2, default=str) + "\n" if args.format == "json" else report.csv
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        if args.format == "csv":
            with open(harness.summary_path(args.out), "w", encoding="utf-8") as fh:
                json.dump(report.summary, fh, indent=2, default=str)
                fh.write("\n")
    else:
        sys.stdout.write(text)


COMMANDS = {
    "estimate-pmax": cmd_estimate_pmax,
    "solve": cmd_solve,
    "baseline": cmd_baseline,
    "vmax": cmd_vmax,
    "exact-f": cmd_exact_f,
    "experiment": cmd_experiment,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (InvalidInstanceError, PMaxTooSmall, InfeasibleCoverError) as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (OSError, GraphFormatError, NormalizationError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_IO
    except (ParameterError, ContractViolation, EnumerationTooLarge, ValueError) as e:
        print(f"invalid parameters: {e}", file=sys.stderr)
        return EXIT_PARAMS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
