"""Classical-Quantum Channel Module

Finite cq channels x -> rho_x, the joint states

    pi^AB = sum_x p_x |x><x| (x) rho_x,   pi^A = diag(p),   pi^B = sum_x p_x rho_x,

and the one-shot converse / achievability bounds on the size of a code:

    log m  <= sup_P D_H^eps(pi^AB || pi^A (x) pi^B)
    log m  >= D_H^eps'(pi^AB || pi^A (x) pi^B) - log((2 + c + 1/c) / (eps - (1 + c) eps'))

Both hypothesis-test arguments commute with the classical register, so every
D_H evaluation runs blockwise on the pencil {(p_x rho_x, p_x pi^B)}; pi^AB is
only materialized for cross-checks.
"""
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from scipy.optimize import minimize_scalar

from . import units
from .exceptions import ParameterError, ValidationError
from .hypothesis_testing import BlockPencil, NeymanPearsonSolver, PencilSolution, default_solver
from .operators import (
    DensityOperator,
    KrausChannel,
    TestOperator,
    apply_channel,
    embed_blocks,
    pure_state,
    tensor,
    von_neumann_entropy,
)

logger = logging.getLogger(__name__)

Label = Hashable

PROB_SUM_TOL = 1e-12
AVG_TOL = 1e-10


# ---------------------------------------------------------------------------
# Channel and distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CQChannel:
    """Finite map from classical labels to output states on one space B."""
    labels: Tuple[Label, ...]
    outputs: Dict[Label, DensityOperator]

    def __post_init__(self):
        labels = tuple(self.labels)
        if not labels:
            raise ValidationError("channel needs at least one input label")
        if len(set(labels)) != len(labels):
            raise ValidationError(f"duplicate channel labels in {labels!r}")
        missing = [x for x in labels if x not in self.outputs]
        if missing:
            raise ValidationError(f"no output state for label(s) {missing!r}")
        dims = {self.outputs[x].dim for x in labels}
        if len(dims) != 1:
            raise ValidationError(f"output states have differing dimensions {sorted(dims)}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "outputs", {x: self.outputs[x] for x in labels})

    @classmethod
    def from_states(cls, labels: Sequence[Label], states: Sequence[DensityOperator]) -> "CQChannel":
        if len(labels) != len(states):
            raise ValidationError(f"{len(labels)} labels but {len(states)} states")
        return cls(tuple(labels), dict(zip(labels, states)))

    @classmethod
    def from_kraus(cls, channel: KrausChannel, labels: Optional[Sequence[Label]] = None) -> "CQChannel":
        """Feed the computational basis states |x><x| through a CPTP map."""
        labels = tuple(labels) if labels is not None else tuple(str(x) for x in range(channel.dim_in))
        if len(labels) != channel.dim_in:
            raise ValidationError(f"{len(labels)} labels for a {channel.dim_in}-dimensional input")
        states = [apply_channel(channel, pure_state(np.eye(channel.dim_in)[x])) for x in range(channel.dim_in)]
        return cls.from_states(labels, states)

    @property
    def dim_b(self) -> int:
        return self.outputs[self.labels[0]].dim

    @property
    def size(self) -> int:
        return len(self.labels)

    def output(self, label: Label) -> DensityOperator:
        try:
            return self.outputs[label]
        except KeyError:
            raise ValidationError(f"unknown channel label {label!r}") from None

    def __repr__(self):
        return f"<CQChannel |X|={self.size} dim_b={self.dim_b}>"


@dataclass(frozen=True)
class InputDistribution:
    """Probability mass function on the channel labels."""
    labels: Tuple[Label, ...]
    probs: Tuple[float, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        probs = tuple(float(p) for p in self.probs)
        if len(labels) != len(probs):
            raise ValidationError(f"{len(labels)} labels but {len(probs)} probabilities")
        if any(not math.isfinite(p) or p < 0 for p in probs):
            raise ValidationError(f"probabilities must be finite and nonnegative: {probs!r}")
        total = math.fsum(probs)
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValidationError(f"probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, labels: Sequence[Label]) -> "InputDistribution":
        labels = tuple(labels)
        return cls(labels, (1.0 / len(labels),) * len(labels))

    @classmethod
    def point_mass(cls, labels: Sequence[Label], label: Label) -> "InputDistribution":
        labels = tuple(labels)
        if label not in labels:
            raise ValidationError(f"unknown label {label!r}")
        return cls(labels, tuple(1.0 if x == label else 0.0 for x in labels))

    @classmethod
    def from_array(cls, labels: Sequence[Label], weights: Sequence[float]) -> "InputDistribution":
        """Clip tiny negatives and renormalize."""
        w = np.clip(np.asarray(weights, dtype=float), 0.0, None)
        total = w.sum()
        if total <= 0:
            raise ValidationError("weights have no positive mass")
        return cls(tuple(labels), tuple(w / total))

    def as_array(self) -> np.ndarray:
        return np.array(self.probs)

    def prob(self, label: Label) -> float:
        return self.probs[self.labels.index(label)]

    def __str__(self):
        return " ".join(f"{x}:{p:.6g}" for x, p in zip(self.labels, self.probs))


# ---------------------------------------------------------------------------
# Joint state
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class JointState:
    """
    Block form of pi^AB: blocks (p_x, rho_x) in channel label order and the
    output average pi^B. Zero-probability labels are kept as empty blocks.
    """
    labels: Tuple[Label, ...]
    probs: np.ndarray
    states: Tuple[DensityOperator, ...]
    avg: DensityOperator
    _pencil: Optional[BlockPencil] = field(default=None, repr=False)

    def __post_init__(self):
        weighted = sum(p * s.matrix for p, s in zip(self.probs, self.states))
        err = float(np.abs(weighted - self.avg.matrix).max())
        if err > AVG_TOL:
            raise ValidationError(f"average state differs from sum p_x rho_x by {err:.3e}")

    @property
    def blocks(self) -> List[Tuple[float, DensityOperator]]:
        return list(zip((float(p) for p in self.probs), self.states))

    @property
    def dim_a(self) -> int:
        return len(self.labels)

    @property
    def dim_b(self) -> int:
        return self.avg.dim

    def marginal_a(self) -> DensityOperator:
        return DensityOperator(np.diag(self.probs).astype(complex))

    def materialize(self) -> Tuple[DensityOperator, DensityOperator]:
        """(pi^AB, pi^A (x) pi^B) as full operators on A (x) B."""
        pi_ab = DensityOperator(embed_blocks([p * s.matrix for p, s in zip(self.probs, self.states)]))
        return pi_ab, tensor(self.marginal_a(), self.avg)

    def pencil(self) -> BlockPencil:
        if self._pencil is None:
            pencil = BlockPencil([(p * s.matrix, p * self.avg.matrix) for p, s in zip(self.probs, self.states)])
            object.__setattr__(self, "_pencil", pencil)
        return self._pencil


def joint_state(ch: CQChannel, P: InputDistribution) -> JointState:
    """Block description of pi^AB for input distribution P."""
    if tuple(P.labels) != ch.labels:
        raise ValidationError(f"distribution labels {P.labels!r} do not match channel labels {ch.labels!r}")
    probs = P.as_array()
    states = tuple(ch.output(x) for x in ch.labels)
    avg = DensityOperator(sum(p * s.matrix for p, s in zip(probs, states)))
    return JointState(ch.labels, probs, states, avg)


# ---------------------------------------------------------------------------
# Blockwise hypothesis testing
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CQTestResult:
    """D_H^eps(pi^AB || pi^A (x) pi^B) with the per-label blocks Q_x of an optimal test."""
    value: float
    tests: Dict[Label, TestOperator]
    beta: float
    threshold: float
    mixing: float
    dual_value: float
    gap: float
    certified: bool


def dh_cq(
    js: JointState,
    eps: float,
    solver: Optional[NeymanPearsonSolver] = None,
    certify: bool = True,
) -> CQTestResult:
    """Blockwise D_H^eps on the joint state; one (t, lam) shared by all blocks."""
    sol: PencilSolution = (solver or default_solver()).solve(js.pencil(), eps, certify=certify)
    tests = {x: TestOperator(q) for x, q in zip(js.labels, sol.block_tests)}
    return CQTestResult(
        value=sol.value,
        tests=tests,
        beta=sol.beta,
        threshold=sol.threshold,
        mixing=sol.mixing,
        dual_value=sol.dual_value,
        gap=sol.gap,
        certified=sol.certified,
    )


# ---------------------------------------------------------------------------
# Input-distribution search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InputSearchConfig:
    """Simplex grid followed by coordinate ascent with step halving."""
    grid_step: float = 0.05
    grid_max_labels: int = 3
    iterations: int = 200
    initial_step: float = 0.25
    min_step: float = 1e-4

    def __post_init__(self):
        if not 0 < self.grid_step <= 1:
            raise ParameterError(f"grid_step must lie in (0, 1], got {self.grid_step!r}")
        if not 0 < self.min_step <= self.initial_step < 1:
            raise ParameterError("need 0 < min_step <= initial_step < 1")
        if self.iterations < 0:
            raise ParameterError("iterations must be nonnegative")


def _simplex_grid(k: int, step: float) -> List[np.ndarray]:
    """All points of the simplex with coordinates on multiples of 1/round(1/step)."""
    n = max(1, int(round(1.0 / step)))
    points = []
    # stars and bars: k - 1 bar positions among n + k - 1 slots
    for bars in combinations(range(n + k - 1), k - 1):
        edges = (-1,) + bars + (n + k - 1,)
        counts = [edges[i + 1] - edges[i] - 1 for i in range(k)]
        points.append(np.array(counts, dtype=float) / n)
    return points


def _normalized(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def search_simplex(
    objective: Callable[[np.ndarray], float],
    k: int,
    config: Optional[InputSearchConfig] = None,
) -> Tuple[float, np.ndarray]:
    """
    Maximize an objective over the probability simplex on k points.

    Candidates are the uniform point, then either the full grid (k at most
    grid_max_labels) or the vertices. The best candidate seeds a coordinate
    ascent moving mass towards (P' = (1-s)P + s e_i) or away from
    (P' = (P - s e_i) / (1 - s)) each label; s halves whenever a sweep fails
    to improve.

    Returns:
        (best value found, maximizing distribution). Ties keep the earlier
        candidate, so the uniform point wins ties.
    """
    config = config or InputSearchConfig()
    if k < 1:
        raise ParameterError("simplex needs at least one point")
    uniform = np.full(k, 1.0 / k)
    if k == 1:
        return objective(uniform), uniform

    candidates = [uniform]
    if k <= config.grid_max_labels:
        candidates += _simplex_grid(k, config.grid_step)
    else:
        candidates += list(np.eye(k))

    best_p = uniform
    best = -math.inf
    for p in candidates:
        v = objective(p)
        if v > best:
            best, best_p = v, p

    if math.isinf(best) and best > 0:
        return best, best_p

    step = config.initial_step
    sweeps = 0
    while sweeps < config.iterations and step >= config.min_step:
        sweeps += 1
        improved = False
        for i in range(k):
            e_i = np.zeros(k)
            e_i[i] = 1.0
            moves = [(1.0 - step) * best_p + step * e_i]
            if best_p[i] >= step:
                moves.append((best_p - step * e_i) / (1.0 - step))
            for cand in moves:
                cand = _normalized(cand)
                v = objective(cand)
                if v > best + 1e-15:
                    best, best_p, improved = v, cand, True
        if not improved:
            step *= 0.5
    logger.debug(f"simplex search: best {best!r} after {sweeps} sweeps (k={k})")
    return best, best_p


# ---------------------------------------------------------------------------
# One-shot bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConverseBound:
    """Best found sup_P D_H^eps(pi^AB || pi^A (x) pi^B) and its maximizer."""
    value: float
    input_dist: InputDistribution
    dual_value: float
    gap: float


@dataclass(frozen=True)
class AchievabilityGrid:
    """Grids of the (eps', c) optimization of the achievability bound."""
    eps_prime_points: int = 64
    c_points: int = 64
    c_min: float = 1e-3
    c_max: float = 1e3
    refine: bool = True
    refine_maxiter: int = 40

    def __post_init__(self):
        if self.eps_prime_points < 1 or self.c_points < 1:
            raise ParameterError("grids need at least one point")
        if not 0 < self.c_min < self.c_max:
            raise ParameterError("need 0 < c_min < c_max")


@dataclass(frozen=True)
class AchievabilityResult:
    rate: float
    eps_prime: float
    c: float


@dataclass(frozen=True)
class OneShotBounds:
    """Converse and achievability bounds on log m at one epsilon."""
    converse_R: float
    achievable_R: float
    best_eps_prime: float
    best_c: float
    input_dist: InputDistribution
    epsilon: float
    converse_gap: float


def converse_bound(
    ch: CQChannel,
    eps: float,
    search: Optional[InputSearchConfig] = None,
    solver: Optional[NeymanPearsonSolver] = None,
) -> ConverseBound:
    """
    Best found value of sup_P D_H^eps over input distributions.

    Every evaluation is exact, so the value is a certified lower bound on the
    supremum; global optimality over P is not claimed.
    """
    solver = solver or default_solver()

    def objective(p: np.ndarray) -> float:
        js = joint_state(ch, InputDistribution.from_array(ch.labels, p))
        return dh_cq(js, eps, solver, certify=False).value

    _, best_p = search_simplex(objective, ch.size, search)
    P = InputDistribution.from_array(ch.labels, best_p)
    res = dh_cq(joint_state(ch, P), eps, solver, certify=True)
    logger.info(f"converse bound at eps={eps}: {res.value:.9g} {units.unit_name()} (P = {P})")
    return ConverseBound(res.value, P, res.dual_value, res.gap)


def achievability_penalty(eps: float, eps_prime: float, c: float) -> float:
    """log((2 + c + 1/c) / (eps - (1 + c) eps'))."""
    if not 0.0 < eps_prime < eps < 1.0:
        raise ParameterError(f"need 0 < eps' < eps < 1, got eps={eps!r}, eps'={eps_prime!r}")
    if not c > 0:
        raise ParameterError(f"c must be positive, got {c!r}")
    slack = eps - (1.0 + c) * eps_prime
    if slack <= 0:
        raise ParameterError(f"eps - (1 + c) eps' = {slack!r} must be positive")
    return float(units.log((2.0 + c + 1.0 / c) / slack))


def achievable_rate(
    ch: CQChannel,
    eps: float,
    eps_prime: float,
    c: float,
    P: InputDistribution,
    solver: Optional[NeymanPearsonSolver] = None,
) -> float:
    """
    Achievability bound at fixed (eps', c, P). Negative values mean the bound
    is vacuous at these parameters.
    """
    penalty = achievability_penalty(eps, eps_prime, c)
    value = dh_cq(joint_state(ch, P), eps_prime, solver, certify=False).value
    return value - penalty


def _best_c(eps: float, eps_prime: float, grid: AchievabilityGrid) -> Tuple[float, float]:
    """(c, penalty) minimizing the penalty at fixed eps'."""
    c_hi = min(grid.c_max, (eps / eps_prime - 1.0) * (1.0 - 1e-9))
    if c_hi <= grid.c_min:
        c = 0.5 * (eps / eps_prime - 1.0)
        return c, achievability_penalty(eps, eps_prime, c)
    res = minimize_scalar(
        lambda s: achievability_penalty(eps, eps_prime, math.exp(s)),
        bounds=(math.log(grid.c_min), math.log(c_hi)),
        method="bounded",
        options={"xatol": 1e-10, "maxiter": 200},
    )
    c = math.exp(res.x)
    return c, achievability_penalty(eps, eps_prime, c)


def optimize_achievability(
    ch: CQChannel,
    eps: float,
    P: InputDistribution,
    grid: Optional[AchievabilityGrid] = None,
    solver: Optional[NeymanPearsonSolver] = None,
) -> AchievabilityResult:
    """
    Maximize the achievability bound over the (eps', c) grid, then refine
    once in c at the best eps' and once in eps' with c re-optimized inside.
    Deterministic for fixed grids.
    """
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {eps!r}")
    grid = grid or AchievabilityGrid()
    solver = solver or default_solver()
    js = joint_state(ch, P)
    cache: Dict[float, float] = {}

    def dh_at(ep: float) -> float:
        if ep not in cache:
            cache[ep] = dh_cq(js, ep, solver, certify=False).value
        return cache[ep]

    n = grid.eps_prime_points
    eps_primes = sorted({eps * k / (n + 1) for k in range(1, n + 1)} | {eps / 4.0})
    cs = sorted(set(np.logspace(math.log10(grid.c_min), math.log10(grid.c_max), grid.c_points).tolist()) | {1.0})

    best = AchievabilityResult(-math.inf, eps / 4.0, 1.0)
    for ep in eps_primes:
        d = dh_at(ep)
        for c in cs:
            if eps - (1.0 + c) * ep <= 0:
                continue
            r = d - achievability_penalty(eps, ep, c)
            if r > best.rate:
                best = AchievabilityResult(r, ep, c)

    if math.isinf(best.rate) or not grid.refine:
        return best

    c, pen = _best_c(eps, best.eps_prime, grid)
    r = dh_at(best.eps_prime) - pen
    if r > best.rate:
        best = AchievabilityResult(r, best.eps_prime, c)

    i = eps_primes.index(best.eps_prime)
    lo = eps_primes[i - 1] if i > 0 else 0.5 * eps_primes[0]
    hi = eps_primes[i + 1] if i + 1 < len(eps_primes) else 0.5 * (eps_primes[-1] + eps)

    def negative_rate(ep: float) -> float:
        return -(dh_at(ep) - _best_c(eps, ep, grid)[1])

    res = minimize_scalar(
        negative_rate,
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-9 * eps, "maxiter": grid.refine_maxiter},
    )
    if -res.fun > best.rate:
        ep = float(res.x)
        c, _ = _best_c(eps, ep, grid)
        best = AchievabilityResult(float(-res.fun), ep, c)
    logger.debug(f"achievability: R={best.rate!r} at eps'={best.eps_prime!r}, c={best.c!r}")
    return best


def one_shot_bounds(
    ch: CQChannel,
    eps: float,
    search: Optional[InputSearchConfig] = None,
    grid: Optional[AchievabilityGrid] = None,
    solver: Optional[NeymanPearsonSolver] = None,
) -> OneShotBounds:
    """
    Converse searched over P, achievability optimized at the converse maximizer.

    At eps = 0 the achievability bound is undefined and reported as nan.
    """
    conv = converse_bound(ch, eps, search, solver)
    if eps > 0:
        ach = optimize_achievability(ch, eps, conv.input_dist, grid, solver)
    else:
        ach = AchievabilityResult(math.nan, math.nan, math.nan)
    logger.info(
        f"one-shot bounds at eps={eps}: {ach.rate:.6g} <= log m <= {conv.value:.6g} {units.unit_name()}"
    )
    return OneShotBounds(
        converse_R=conv.value,
        achievable_R=ach.rate,
        best_eps_prime=ach.eps_prime,
        best_c=ach.c,
        input_dist=conv.input_dist,
        epsilon=eps,
        converse_gap=conv.gap,
    )


# ---------------------------------------------------------------------------
# Holevo quantity
# ---------------------------------------------------------------------------

def holevo_information(ch: CQChannel, P: InputDistribution) -> float:
    """I(A;B) = S(pi^B) - sum_x p_x S(rho_x)."""
    js = joint_state(ch, P)
    inner = sum(p * von_neumann_entropy(s) for p, s in js.blocks if p > 0)
    return max(von_neumann_entropy(js.avg) - inner, 0.0)


def holevo_capacity(
    ch: CQChannel,
    search: Optional[InputSearchConfig] = None,
) -> Tuple[float, InputDistribution]:
    """Best found max_P I(A;B) and its maximizer."""
    value, p = search_simplex(
        lambda q: holevo_information(ch, InputDistribution.from_array(ch.labels, q)),
        ch.size,
        search,
    )
    return value, InputDistribution.from_array(ch.labels, p)
