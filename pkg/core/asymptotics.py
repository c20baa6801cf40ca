"""Asymptotics Module

Finite-n tensor-power experiments:

- Stein tables: (1/n) D_H^eps(rho^(x)n || sigma^(x)n) against D(rho||sigma).
- Capacity rows for the n-fold memoryless extension of a cq channel: the
  converse rate, the achievability rate at the same inputs and the
  single-letter Holevo quantity.
- Epsilon-capacity rows: the lower expression evaluated at eps' below eps.

Only finite n is computed. The pessimistic and optimistic capacity variants
differ in lim inf versus lim sup and therefore coincide on every finite table.
"""
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Tuple
import logging
import math

import numpy as np

from config import FULL_SEARCH_CAP, MAX_COMPOSITE_DIM
from . import units
from .cq_channel import (
    AchievabilityGrid,
    CQChannel,
    InputDistribution,
    InputSearchConfig,
    Label,
    converse_bound,
    dh_cq,
    holevo_capacity,
    joint_state,
    optimize_achievability,
    search_simplex,
)
from .exceptions import CapExceededError, ParameterError
from .hypothesis_testing import NeymanPearsonSolver, default_solver, relative_entropy
from .operators import DensityOperator, tensor

logger = logging.getLogger(__name__)

INPUT_MODES = ("iid", "full")


# ---------------------------------------------------------------------------
# Tensor powers
# ---------------------------------------------------------------------------

def _check_power(what: str, base: int, n: int, cap: int) -> None:
    if n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    size = base ** n
    if size > cap:
        raise CapExceededError(what, size, cap)


def tensor_power(rho: DensityOperator, n: int, cap: Optional[int] = None) -> DensityOperator:
    """rho (x) rho (x) ... (x) rho, folded from the left."""
    cap = MAX_COMPOSITE_DIM if cap is None else cap
    _check_power("tensor power", rho.dim, n, cap)
    out = rho
    for _ in range(n - 1):
        out = tensor(out, rho, cap)
    return out


def product_channel(ch: CQChannel, n: int, cap: Optional[int] = None) -> CQChannel:
    """n uses of ch: labels are n-tuples, outputs the matching tensor products."""
    cap = MAX_COMPOSITE_DIM if cap is None else cap
    _check_power("product channel output", ch.dim_b, n, cap)
    _check_power("product channel alphabet", ch.size, n, cap)
    if n == 1:
        return ch

    level: Dict[Tuple[Label, ...], DensityOperator] = {(x,): ch.output(x) for x in ch.labels}
    for _ in range(n - 1):
        level = {
            prefix + (x,): tensor(state, ch.output(x), cap)
            for prefix, state in level.items()
            for x in ch.labels
        }
    labels = tuple(product(ch.labels, repeat=n))
    return CQChannel(labels, level)


def iid_power(P: InputDistribution, n: int) -> InputDistribution:
    """P^n on n-tuples, in the label order of product_channel."""
    if n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    if n == 1:
        return P
    labels = tuple(product(P.labels, repeat=n))
    probs = [math.prod(t) for t in product(P.probs, repeat=n)]
    return InputDistribution.from_array(labels, probs)


# ---------------------------------------------------------------------------
# Stein tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SteinRow:
    n: int
    dh_rate: float         # (1/n) D_H^eps(rho^n || sigma^n)
    rel_ent: float         # D(rho || sigma)
    gap: float             # dh_rate - rel_ent
    duality_gap: float     # certificate of the n-fold solve


def stein_table(
    rho: DensityOperator,
    sigma: DensityOperator,
    eps: float,
    n_max: int,
    solver: Optional[NeymanPearsonSolver] = None,
) -> List[SteinRow]:
    """Certified rows n = 1..n_max on the full n-fold operators."""
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {eps!r}")
    _check_power("stein table", rho.dim, n_max, MAX_COMPOSITE_DIM)
    solver = solver or default_solver()
    rel_ent = relative_entropy(rho, sigma)

    rows = []
    r_n, s_n = rho, sigma
    for n in range(1, n_max + 1):
        if n > 1:
            r_n, s_n = tensor(r_n, rho), tensor(s_n, sigma)
        res = solver.optimal_test(r_n, s_n, eps)
        rate = res.dh / n
        rows.append(SteinRow(n=n, dh_rate=rate, rel_ent=rel_ent, gap=rate - rel_ent, duality_gap=res.gap))
        logger.debug(f"stein n={n}: rate {rate:.9g}, D {rel_ent:.9g}")
    logger.info(f"stein table: {n_max} rows at eps={eps}, D = {rel_ent:.6g} {units.unit_name()}")
    return rows


# ---------------------------------------------------------------------------
# Capacity rows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CapacityRow:
    n: int
    eps: float
    rate_upper: float      # (1/n) best found sup_P D_H^eps on the n-fold channel
    rate_lower: float      # (1/n) max(0, achievability rate at the same P)
    holevo: float          # single-letter maximized Holevo quantity
    input_mode: str


@dataclass(frozen=True)
class EpsCapacityRow:
    n: int
    eps: float
    eps_prime: float
    rate_eps_prime: float  # (1/n) best found sup_P D_H^eps'
    rate_upper: float      # (1/n) best found sup_P D_H^eps
    input_mode: str


def _check_mode(ch: CQChannel, n: int, input_mode: str) -> None:
    if input_mode not in INPUT_MODES:
        raise ParameterError(f"input mode must be one of {INPUT_MODES}, got {input_mode!r}")
    if input_mode == "full":
        _check_power("full input search", ch.size, n, FULL_SEARCH_CAP)


def _best_inputs(
    ch: CQChannel,
    chn: CQChannel,
    n: int,
    eps: float,
    input_mode: str,
    search: Optional[InputSearchConfig],
    solver: NeymanPearsonSolver,
) -> InputDistribution:
    """Maximizer of D_H^eps on the n-fold channel over i.i.d. or all inputs."""
    if input_mode == "full":
        return converse_bound(chn, eps, search, solver).input_dist

    def objective(p: np.ndarray) -> float:
        Pn = iid_power(InputDistribution.from_array(ch.labels, p), n)
        return dh_cq(joint_state(chn, Pn), eps, solver, certify=False).value

    _, p = search_simplex(objective, ch.size, search)
    return iid_power(InputDistribution.from_array(ch.labels, p), n)


def capacity_rows(
    ch: CQChannel,
    eps: float,
    n_max: int,
    input_mode: str = "iid",
    search: Optional[InputSearchConfig] = None,
    grid: Optional[AchievabilityGrid] = None,
    solver: Optional[NeymanPearsonSolver] = None,
) -> List[CapacityRow]:
    """
    Converse and achievability rates of the n-fold channel for n = 1..n_max.

    In "iid" mode the input search is restricted to product distributions,
    so rate_upper is a lower bound on the n-fold supremum. At eps = 0 the
    achievability bound is undefined and rate_lower is 0 (one message).
    """
    if not 0.0 <= eps < 1.0:
        raise ParameterError(f"epsilon must lie in [0, 1), got {eps!r}")
    for n in range(1, n_max + 1):
        _check_mode(ch, n, input_mode)
    solver = solver or default_solver()
    chi, _ = holevo_capacity(ch, search)

    rows = []
    for n in range(1, n_max + 1):
        chn = product_channel(ch, n)
        Pn = _best_inputs(ch, chn, n, eps, input_mode, search, solver)
        upper = dh_cq(joint_state(chn, Pn), eps, solver).value / n
        if eps > 0:
            lower = max(0.0, optimize_achievability(chn, eps, Pn, grid, solver).rate) / n
        else:
            lower = 0.0
        rows.append(CapacityRow(n=n, eps=eps, rate_upper=upper, rate_lower=lower, holevo=chi, input_mode=input_mode))
        logger.info(f"capacity n={n}: {lower:.6g} <= rate <= {upper:.6g} (chi = {chi:.6g}, {input_mode})")
    return rows


def eps_capacity_rows(
    ch: CQChannel,
    eps: float,
    n_max: int,
    input_mode: str = "iid",
    k_max: int = 4,
    search: Optional[InputSearchConfig] = None,
    solver: Optional[NeymanPearsonSolver] = None,
) -> List[EpsCapacityRow]:
    """
    Lower epsilon-capacity expression at eps' = eps (1 - 2^-k), k = 1..k_max,
    next to the upper expression at eps itself, for every n.
    """
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {eps!r}")
    if k_max < 1:
        raise ParameterError("k_max must be positive")
    for n in range(1, n_max + 1):
        _check_mode(ch, n, input_mode)
    solver = solver or default_solver()

    rows = []
    for n in range(1, n_max + 1):
        chn = product_channel(ch, n)
        Pn = _best_inputs(ch, chn, n, eps, input_mode, search, solver)
        upper = dh_cq(joint_state(chn, Pn), eps, solver).value / n
        for k in range(1, k_max + 1):
            ep = eps * (1.0 - 2.0 ** -k)
            Pk = _best_inputs(ch, chn, n, ep, input_mode, search, solver)
            lower = dh_cq(joint_state(chn, Pk), ep, solver).value / n
            rows.append(EpsCapacityRow(n=n, eps=eps, eps_prime=ep, rate_eps_prime=lower,
                                       rate_upper=upper, input_mode=input_mode))
    logger.info(f"eps-capacity table: {len(rows)} rows at eps={eps} ({input_mode})")
    return rows
