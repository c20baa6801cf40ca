"""Command handlers for the dhtoolkit command line."""
import argparse
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from core.asymptotics import capacity_rows, eps_capacity_rows, stein_table
from core.coding import EXPERIMENT_COLUMNS, hayashi_nagaoka_suite, random_coding_experiment
from core.cq_channel import (
    AchievabilityGrid,
    InputDistribution,
    InputSearchConfig,
    achievable_rate,
    one_shot_bounds,
)
from core.exceptions import ParameterError
from core.hypothesis_testing import optimal_test
from .files import load_channel, load_state

logger = logging.getLogger(__name__)


@dataclass
class CommandOutput:
    """CSV table of one command plus the certificates to archive."""
    columns: Sequence[str]
    rows: List[Dict[str, Any]]
    certificates: List[Dict[str, Any]] = field(default_factory=list)
    exit_code: int = 0
    seed: Optional[int] = None


def _input_dist(text: Optional[str], labels) -> InputDistribution:
    """Comma-separated weights in channel label order; uniform when absent."""
    if not text:
        return InputDistribution.uniform(labels)
    try:
        weights = [float(w) for w in text.split(",")]
    except ValueError:
        raise ParameterError(f"--input-dist must be comma-separated numbers, got {text!r}") from None
    if len(weights) != len(labels):
        raise ParameterError(f"--input-dist has {len(weights)} weights for {len(labels)} labels")
    return InputDistribution.from_array(labels, weights)


def _search(args: argparse.Namespace) -> InputSearchConfig:
    return InputSearchConfig(grid_step=args.grid_step)


# ---------------------------------------------------------------------------
# Handlers
# ---------------------------------------------------------------------------

def dh_handler(args: argparse.Namespace) -> CommandOutput:
    """Optimal test between two state files."""
    rho, sigma = load_state(args.rho), load_state(args.sigma)
    res = optimal_test(rho, sigma, args.epsilon)
    row = {
        "epsilon": args.epsilon,
        "beta": res.beta,
        "dh": res.dh,
        "threshold": res.threshold,
        "mixing": res.mixing,
        "dual_value": res.dual_value,
        "gap": res.gap,
    }
    cert = dict(row, label="dh", certified=res.certified)
    return CommandOutput(list(row), [row], [cert])


def bounds_handler(args: argparse.Namespace) -> CommandOutput:
    """One-shot converse and achievability bounds of a channel file."""
    ch = load_channel(args.channel)
    b = one_shot_bounds(ch, args.epsilon, _search(args), AchievabilityGrid())
    row = {
        "epsilon": args.epsilon,
        "converse_R": b.converse_R,
        "achievable_R": b.achievable_R,
        "best_eps_prime": b.best_eps_prime,
        "best_c": b.best_c,
        "converse_gap": b.converse_gap,
        "input_dist": str(b.input_dist),
    }
    if args.epsilon_prime is not None and args.c is not None:
        row["fixed_achievable_R"] = achievable_rate(ch, args.epsilon, args.epsilon_prime, args.c, b.input_dist)
    cert = {"label": "converse", "dh": b.converse_R, "gap": b.converse_gap, "certified": True}
    return CommandOutput(list(row), [row], [cert])


def simulate_handler(args: argparse.Namespace) -> CommandOutput:
    """Random-coding Monte Carlo with the square-root decoder."""
    ch = load_channel(args.channel)
    P = _input_dist(args.input_dist, ch.labels)
    report = random_coding_experiment(ch, P, args.rate, args.epsilon_prime, args.trials, args.seed)
    return CommandOutput(EXPERIMENT_COLUMNS, report.to_rows(), seed=args.seed)


def stein_handler(args: argparse.Namespace) -> CommandOutput:
    """(1/n) D_H^eps of tensor powers against the relative entropy."""
    rho, sigma = load_state(args.rho), load_state(args.sigma)
    rows = stein_table(rho, sigma, args.epsilon, args.n_max)
    columns = ("n", "dh_rate", "rel_ent", "gap", "duality_gap")
    out = [{c: getattr(r, c) for c in columns} for r in rows]
    certs = [{"label": f"n={r.n}", "dh": r.dh_rate * r.n, "gap": r.duality_gap} for r in rows]
    return CommandOutput(columns, out, certs)


def capacity_handler(args: argparse.Namespace) -> CommandOutput:
    """Finite-n capacity (or eps-capacity) rows of a channel file."""
    ch = load_channel(args.channel)
    if args.eps_levels:
        rows = eps_capacity_rows(ch, args.epsilon, args.n_max, args.mode, args.eps_levels, _search(args))
        columns = ("n", "eps", "eps_prime", "rate_eps_prime", "rate_upper", "input_mode")
    else:
        rows = capacity_rows(ch, args.epsilon, args.n_max, args.mode, _search(args))
        columns = ("n", "eps", "rate_upper", "rate_lower", "holevo", "input_mode")
    out = [{c: getattr(r, c) for c in columns} for r in rows]
    return CommandOutput(columns, out)


def check_hn_handler(args: argparse.Namespace) -> CommandOutput:
    """Randomized Hayashi-Nagaoka inequality suite."""
    summary = hayashi_nagaoka_suite((args.dim_min, args.dim_max), args.count, args.seed)
    row = {
        "count": summary.count,
        "min_slack": summary.min_slack,
        "worst_dim": summary.worst.dim,
        "worst_c": summary.worst.c,
        "failures": summary.failures,
        "passed": summary.passed,
    }
    return CommandOutput(list(row), [row], exit_code=0 if summary.passed else 1, seed=args.seed)


# ---------------------------------------------------------------------------
# Registration
# ---------------------------------------------------------------------------

def _add_epsilon(p: argparse.ArgumentParser, default: float) -> None:
    p.add_argument("--epsilon", "--eps", type=float, default=default, help="type-I error / code error")


def setup_handlers(subparsers, parents: Sequence[argparse.ArgumentParser] = ()) -> None:
    """Register one subcommand per handler; `parents` carry the shared flags."""
    parents = list(parents)
    p = subparsers.add_parser("dh", parents=parents, help="hypothesis testing relative entropy of two states")
    p.add_argument("rho", help="state file of the null hypothesis")
    p.add_argument("sigma", help="state file of the alternative")
    _add_epsilon(p, 0.0)
    p.set_defaults(handler=dh_handler)

    p = subparsers.add_parser("bounds", parents=parents, help="one-shot converse and achievability bounds")
    p.add_argument("channel", help="channel file")
    _add_epsilon(p, 0.1)
    p.add_argument("--epsilon-prime", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--grid-step", type=float, default=0.05)
    p.set_defaults(handler=bounds_handler)

    p = subparsers.add_parser("simulate", parents=parents, help="random-coding experiment")
    p.add_argument("channel", help="channel file")
    p.add_argument("--rate", type=float, required=True, help="R in bits; m = 2^R")
    p.add_argument("--epsilon-prime", type=float, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--input-dist", default=None, help="comma-separated input weights")
    p.set_defaults(handler=simulate_handler)

    p = subparsers.add_parser("stein", parents=parents, help="Stein table for tensor powers of two states")
    p.add_argument("rho")
    p.add_argument("sigma")
    _add_epsilon(p, 0.05)
    p.add_argument("--n-max", "--n", dest="n_max", type=int, default=4)
    p.set_defaults(handler=stein_handler)

    p = subparsers.add_parser("capacity", parents=parents, help="finite-n capacity rows of a channel")
    p.add_argument("channel")
    _add_epsilon(p, 0.05)
    p.add_argument("--n-max", "--n", dest="n_max", type=int, default=3)
    p.add_argument("--mode", choices=("iid", "full"), default="iid")
    p.add_argument("--eps-levels", type=int, default=0, help="emit eps-capacity rows with this many eps' levels")
    p.add_argument("--grid-step", type=float, default=0.05)
    p.set_defaults(handler=capacity_handler)

    p = subparsers.add_parser("check-hn", parents=parents, help="randomized Hayashi-Nagaoka inequality suite")
    p.add_argument("--dim-min", type=int, default=2)
    p.add_argument("--dim-max", type=int, default=16)
    p.add_argument("--count", type=int, default=1000)
    p.set_defaults(handler=check_hn_handler)
