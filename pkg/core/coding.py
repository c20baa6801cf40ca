"""Coding Module

Random codebooks, the square-root (pretty good) measurement built from the
conditional operators A_x of an optimal hypothesis test, exact error
evaluation, and the checks that tie explicit codes back to the one-shot
bounds:

- the Hayashi-Nagaoka operator inequality behind the achievability proof;
- exact ensemble averages against the random-coding bound;
- constructive converse tests built from an explicit code;
- the classical confusion matrix of a code and its data-processing check;
- expurgation from average to maximal error.
"""
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple
import logging
import math

import numpy as np

from config import ENUMERATION_CAP, PINV_TOL
from . import units
from .cq_channel import (
    CQChannel,
    InputDistribution,
    Label,
    dh_cq,
    joint_state,
)
from .exceptions import (
    CapExceededError,
    DecoderError,
    DimensionMismatchError,
    ParameterError,
    ValidationError,
)
from .hypothesis_testing import NeymanPearsonSolver, classical_neyman_pearson
from .operators import (
    HermitianOperator,
    TestOperator,
    _eigvalsh,
    operator_sqrt_pinv,
    random_psd,
    random_test,
)

logger = logging.getLogger(__name__)

POVM_PSD_TOL = 1e-9
POVM_COMPLETENESS_TOL = 1e-8
HN_SLACK_TOL = 1e-9
DEFAULT_C_GRID: Tuple[float, ...] = tuple(np.logspace(-2, 2, 16).tolist())

EXPERIMENT_COLUMNS = ("trial", "m", "eps_prime", "c_star", "empirical_error", "bound_value", "seed")


# ---------------------------------------------------------------------------
# Code types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Codebook:
    """Ordered list of input labels; message i is sent as entries[i]."""
    entries: Tuple[Label, ...]

    def __post_init__(self):
        entries = tuple(self.entries)
        if not entries:
            raise ValidationError("codebook needs at least one codeword")
        object.__setattr__(self, "entries", entries)

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def is_distinct(self) -> bool:
        return len(set(self.entries)) == len(self.entries)

    def check_labels(self, ch: CQChannel) -> None:
        unknown = [x for x in self.entries if x not in ch.outputs]
        if unknown:
            raise ValidationError(f"codebook uses unknown label(s) {unknown!r}")


@dataclass(frozen=True, eq=False)
class DecodingPOVM:
    """Elements E_1..E_m plus the remainder E_0 = I - sum E_i (an abort outcome)."""
    elements: Tuple[HermitianOperator, ...]
    remainder: HermitianOperator

    def __post_init__(self):
        elements = tuple(self.elements)
        if not elements:
            raise ValidationError("POVM needs at least one element")
        dim = self.remainder.dim
        for i, e in enumerate(elements):
            if e.dim != dim:
                raise DimensionMismatchError(f"POVM element {i} has dim {e.dim}, expected {dim}")
            if not e.is_psd(POVM_PSD_TOL):
                raise ValidationError(f"POVM element {i} has eigenvalue {e.eigenvalues()[0]:.3e} < 0")
        if not self.remainder.is_psd(POVM_PSD_TOL):
            raise ValidationError(f"POVM remainder has eigenvalue {self.remainder.eigenvalues()[0]:.3e} < 0")
        total = sum(e.matrix for e in elements) + self.remainder.matrix
        residual = float(np.abs(total - np.eye(dim)).max())
        if residual > POVM_COMPLETENESS_TOL:
            raise ValidationError(f"POVM does not sum to the identity (residual {residual:.3e})")
        object.__setattr__(self, "elements", elements)

    @property
    def m(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return self.remainder.dim


@dataclass(frozen=True)
class CodeEvaluation:
    """Exact error probabilities of a code under a uniform message prior."""
    per_word_error: Tuple[float, ...]
    avg_error: float
    max_error: float

    def __post_init__(self):
        errs = self.per_word_error
        if any(not -1e-12 <= e <= 1.0 + 1e-9 for e in errs):
            raise ValidationError(f"per-word errors leave [0, 1]: {errs!r}")
        if abs(self.avg_error - float(np.mean(errs))) > 1e-12:
            raise ValidationError("avg_error is not the mean of the per-word errors")

    @classmethod
    def from_errors(cls, errors: Sequence[float]) -> "CodeEvaluation":
        errs = tuple(float(e) for e in errors)
        return cls(errs, float(np.mean(errs)), max(errs))


# ---------------------------------------------------------------------------
# Decoder
# ---------------------------------------------------------------------------

def conditional_operators(q_blocks: Mapping[Label, HermitianOperator]) -> Dict[Label, TestOperator]:
    """
    A_x = tr_A((|x><x| (x) I) Q) for a test Q that is block diagonal in the
    classical register; with Q = (+)_x Q_x this is just Q_x, validated as
    0 <= A_x <= I.
    """
    out = {}
    for x, q in q_blocks.items():
        try:
            out[x] = q if isinstance(q, TestOperator) else TestOperator(q.matrix)
        except ValidationError as e:
            raise ValidationError(f"conditional operator for label {x!r}: {e}") from e
    return out


def square_root_decoder(
    cb: Codebook,
    conditional: Mapping[Label, HermitianOperator],
    pinv_tol: float = PINV_TOL,
) -> DecodingPOVM:
    """
    E_i = S^{-1/2} A_{x_i} S^{-1/2} with S = sum_j A_{x_j}.

    S^{-1/2} is the pseudo-inverse square root on the support of S
    (eigenvalues <= pinv_tol * lambda_max are kernel); the complement of the
    support becomes the remainder and is always decoded as an error.

    Raises:
        DecoderError: sum of the selected A_x is zero.
    """
    try:
        ops = [conditional[x] for x in cb.entries]
    except KeyError as e:
        raise ValidationError(f"no conditional operator for codeword {e.args[0]!r}") from None
    dims = {a.dim for a in ops}
    if len(dims) != 1:
        raise DimensionMismatchError(f"conditional operators have differing dimensions {sorted(dims)}")

    total = HermitianOperator(sum(a.matrix for a in ops))
    inv_sqrt, support = operator_sqrt_pinv(total, pinv_tol)
    if not np.any(support):
        raise DecoderError("sum of conditional operators is zero; square-root decoder undefined")

    elements = tuple(HermitianOperator(inv_sqrt @ a.matrix @ inv_sqrt) for a in ops)
    remainder = HermitianOperator(np.eye(total.dim) - support)
    return DecodingPOVM(elements, remainder)


def evaluate_code(ch: CQChannel, cb: Codebook, povm: DecodingPOVM) -> CodeEvaluation:
    """Pr(error | i) = 1 - trace(E_i rho_{x_i}) for every message i."""
    if povm.m != cb.m:
        raise DimensionMismatchError(f"POVM has {povm.m} elements for a codebook of size {cb.m}")
    if povm.dim != ch.dim_b:
        raise DimensionMismatchError(f"POVM acts on dim {povm.dim}, channel outputs have dim {ch.dim_b}")
    cb.check_labels(ch)
    errors = [
        min(1.0, max(0.0, 1.0 - e.expectation(ch.output(x))))
        for x, e in zip(cb.entries, povm.elements)
    ]
    return CodeEvaluation.from_errors(errors)


def _decode_or_abort(
    ch: CQChannel,
    cb: Codebook,
    conditional: Mapping[Label, HermitianOperator],
) -> CodeEvaluation:
    """Evaluate the square-root code; an undefined decoder aborts on every message."""
    try:
        return evaluate_code(ch, cb, square_root_decoder(cb, conditional))
    except DecoderError:
        return CodeEvaluation.from_errors([1.0] * cb.m)


def codebook_size(rate: float) -> int:
    """m = 2^R for a rate in bits; must be an integer >= 2."""
    m = int(round(2.0 ** rate))
    if m < 2 or abs(2.0 ** rate - m) > 1e-9 * m:
        raise ParameterError(f"2^R must be an integer >= 2, got R={rate!r}")
    return m


def random_coding_bound(
    eps_prime: float,
    c: float,
    m: int,
    collision: float,
    type_one: Optional[float] = None,
) -> float:
    """
    (1 + c) e1 + (2 + c + 1/c)(m - 1) * collision, where e1 is the type-I
    error of the test (eps' when not given) and collision = trace(Q (pi^A (x) pi^B)).
    """
    e1 = eps_prime if type_one is None else type_one
    return (1.0 + c) * e1 + (2.0 + c + 1.0 / c) * (m - 1) * collision


def _collision(ch: CQChannel, P: InputDistribution, conditional: Mapping[Label, HermitianOperator]) -> float:
    """trace((sum_x p_x A_x)(sum_x p_x rho_x))."""
    a_avg = sum(p * conditional[x].matrix for x, p in zip(P.labels, P.probs))
    r_avg = sum(p * ch.output(x).matrix for x, p in zip(P.labels, P.probs))
    return float(np.real(np.sum(a_avg * r_avg.T)))


def _type_one(ch: CQChannel, P: InputDistribution, conditional: Mapping[Label, HermitianOperator]) -> float:
    """1 - sum_x p_x trace(A_x rho_x)."""
    accepted = sum(p * conditional[x].expectation(ch.output(x)) for x, p in zip(P.labels, P.probs))
    return max(0.0, 1.0 - accepted)


# ---------------------------------------------------------------------------
# Random coding
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentReport:
    """Monte-Carlo random-coding run with its per-c bound values."""
    m: int
    eps_prime: float
    seed: int
    trial_errors: Tuple[float, ...]
    mean_error: float
    std_error: float
    collision: float
    c_grid: Tuple[float, ...]
    bound_values: Tuple[float, ...]
    c_star: float
    best_bound: float

    def to_rows(self) -> List[dict]:
        """One row per trial in EXPERIMENT_COLUMNS order."""
        return [
            {
                "trial": t,
                "m": self.m,
                "eps_prime": self.eps_prime,
                "c_star": self.c_star,
                "empirical_error": err,
                "bound_value": self.best_bound,
                "seed": self.seed,
            }
            for t, err in enumerate(self.trial_errors)
        ]


class RandomCodingSimulator:
    """
    Random-coding experiment for one (channel, P, eps') triple.

    The optimal test of pi^AB against pi^A (x) pi^B at eps' is computed once;
    every trial draws a codebook i.i.d. from P with its own generator seeded by
    (seed, trial), so trials are reproducible in any order.
    """

    def __init__(
        self,
        ch: CQChannel,
        P: InputDistribution,
        eps_prime: float,
        c_grid: Sequence[float] = DEFAULT_C_GRID,
        solver: Optional[NeymanPearsonSolver] = None,
    ):
        if not 0.0 < eps_prime < 1.0:
            raise ParameterError(f"eps' must lie in (0, 1), got {eps_prime!r}")
        if any(c <= 0 for c in c_grid):
            raise ParameterError("every c in the grid must be positive")
        self.ch = ch
        self.P = P
        self.eps_prime = eps_prime
        self.c_grid = tuple(float(c) for c in c_grid)
        self.logger = logger

        res = dh_cq(joint_state(ch, P), eps_prime, solver)
        self.dh_value = res.value
        self.conditional = conditional_operators(res.tests)
        self.collision = _collision(ch, P, self.conditional)
        self.logger.debug(
            f"simulator ready: D_H^{eps_prime} = {res.value:.9g} {units.unit_name()}, "
            f"collision = {self.collision:.6g}"
        )

    # -----------------------------------------------------------------------
    # Trials
    # -----------------------------------------------------------------------

    def draw_codebook(self, m: int, seed: int, trial: int) -> Codebook:
        rng = np.random.default_rng([seed, trial])
        idx = rng.choice(len(self.P.labels), size=m, p=self.P.as_array())
        return Codebook(tuple(self.P.labels[i] for i in idx))

    def run_trial(self, m: int, seed: int, trial: int) -> CodeEvaluation:
        cb = self.draw_codebook(m, seed, trial)
        return _decode_or_abort(self.ch, cb, self.conditional)

    def run(self, m: int, trials: int, seed: int) -> ExperimentReport:
        if m < 2:
            raise ParameterError(f"codebook size must be at least 2, got {m}")
        if trials < 1:
            raise ParameterError(f"need at least one trial, got {trials}")
        errors = tuple(self.run_trial(m, seed, t).avg_error for t in range(trials))
        mean = float(np.mean(errors))
        std = float(np.std(errors, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0

        bounds = tuple(random_coding_bound(self.eps_prime, c, m, self.collision) for c in self.c_grid)
        k = int(np.argmin(bounds))
        self.logger.info(
            f"random coding: m={m}, trials={trials}, mean error {mean:.6g} +- {std:.2g}, "
            f"best bound {bounds[k]:.6g} at c={self.c_grid[k]:.4g}"
        )
        return ExperimentReport(
            m=m,
            eps_prime=self.eps_prime,
            seed=seed,
            trial_errors=errors,
            mean_error=mean,
            std_error=std,
            collision=self.collision,
            c_grid=self.c_grid,
            bound_values=bounds,
            c_star=self.c_grid[k],
            best_bound=bounds[k],
        )


def random_coding_experiment(
    ch: CQChannel,
    P: InputDistribution,
    rate: float,
    eps_prime: float,
    trials: int,
    seed: int,
    c_grid: Sequence[float] = DEFAULT_C_GRID,
) -> ExperimentReport:
    """Draw `trials` codebooks of size 2^rate and decode each with the square-root measurement."""
    return RandomCodingSimulator(ch, P, eps_prime, c_grid).run(codebook_size(rate), trials, seed)


# ---------------------------------------------------------------------------
# Exact ensemble
# ---------------------------------------------------------------------------

def ensemble_average_error(
    ch: CQChannel,
    P: InputDistribution,
    m: int,
    conditional: Mapping[Label, HermitianOperator],
    cap: int = ENUMERATION_CAP,
) -> float:
    """Exact expectation of the average error over all |X|^m i.i.d. codebooks."""
    if m < 1:
        raise ParameterError(f"codebook size must be positive, got {m}")
    size = len(P.labels) ** m
    if size > cap:
        raise CapExceededError("codebook enumeration", size, cap)

    support = [(x, p) for x, p in zip(P.labels, P.probs) if p > 0]
    total = 0.0
    for words in product(support, repeat=m):
        weight = math.prod(p for _, p in words)
        cb = Codebook(tuple(x for x, _ in words))
        total += weight * _decode_or_abort(ch, cb, conditional).avg_error
    return total


@dataclass(frozen=True)
class EnsembleReport:
    """Exact ensemble error against both forms of the random-coding bound."""
    m: int
    eps_prime: float
    ensemble_error: float
    type_one: float
    collision: float
    dh_value: float
    c_grid: Tuple[float, ...]
    averaged_bounds: Tuple[float, ...]     # uses the test's own type-I error and collision
    eps_prime_bounds: Tuple[float, ...]    # uses eps' and 2^{-D_H}
    min_slack: float

    @property
    def passed(self) -> bool:
        return self.min_slack >= -HN_SLACK_TOL


def ensemble_bound_check(
    ch: CQChannel,
    P: InputDistribution,
    m: int,
    eps_prime: float,
    c_grid: Sequence[float] = DEFAULT_C_GRID,
    solver: Optional[NeymanPearsonSolver] = None,
) -> EnsembleReport:
    """Compare the exact ensemble error with both bound forms on every grid c."""
    res = dh_cq(joint_state(ch, P), eps_prime, solver)
    conditional = conditional_operators(res.tests)
    ensemble = ensemble_average_error(ch, P, m, conditional)
    type_one = _type_one(ch, P, conditional)
    collision = _collision(ch, P, conditional)
    beta = float(units.power(-res.value)) if math.isfinite(res.value) else 0.0

    averaged = tuple(random_coding_bound(eps_prime, c, m, collision, type_one) for c in c_grid)
    eps_form = tuple(random_coding_bound(eps_prime, c, m, beta) for c in c_grid)
    slack = min(min(averaged), min(eps_form)) - ensemble
    logger.info(f"ensemble check: m={m}, eps'={eps_prime}, error {ensemble:.6g}, min slack {slack:.3g}")
    return EnsembleReport(
        m=m,
        eps_prime=eps_prime,
        ensemble_error=ensemble,
        type_one=type_one,
        collision=collision,
        dh_value=res.value,
        c_grid=tuple(float(c) for c in c_grid),
        averaged_bounds=averaged,
        eps_prime_bounds=eps_form,
        min_slack=slack,
    )


# ---------------------------------------------------------------------------
# Hayashi-Nagaoka inequality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HNCheck:
    """Smallest eigenvalue of RHS - LHS for one (S, T, c)."""
    c: float
    min_eig_slack: float
    dim: int = 0

    @property
    def passed(self) -> bool:
        return self.min_eig_slack >= -HN_SLACK_TOL


@dataclass(frozen=True)
class HNSuiteSummary:
    count: int
    min_slack: float
    worst: HNCheck
    failures: int
    seed: int

    @property
    def passed(self) -> bool:
        return self.failures == 0


def check_hayashi_nagaoka(
    S: HermitianOperator,
    T: HermitianOperator,
    c: float,
    pinv_tol: float = PINV_TOL,
) -> HNCheck:
    """
    Spectral check of

        I - (S+T)^{-1/2} S (S+T)^{-1/2}  <=  (1 + c)(I - S) + (2 + c + 1/c) T

    for 0 <= S <= I, T >= 0 and c > 0. Off the support of S + T the left-hand
    side acts as the identity.
    """
    if not c > 0:
        raise ParameterError(f"c must be positive, got {c!r}")
    if S.dim != T.dim:
        raise DimensionMismatchError(f"S has dim {S.dim}, T has dim {T.dim}")
    S = S if isinstance(S, TestOperator) else TestOperator(S.matrix)
    if not T.is_psd(POVM_PSD_TOL):
        raise ValidationError(f"T has eigenvalue {T.eigenvalues()[0]:.3e} < 0")

    eye = np.eye(S.dim)
    inv_sqrt, _ = operator_sqrt_pinv(HermitianOperator(S.matrix + T.matrix), pinv_tol)
    lhs = eye - inv_sqrt @ S.matrix @ inv_sqrt
    rhs = (1.0 + c) * (eye - S.matrix) + (2.0 + c + 1.0 / c) * T.matrix
    diff = rhs - lhs
    slack = float(_eigvalsh(0.5 * (diff + diff.conj().T))[0])
    return HNCheck(c=float(c), min_eig_slack=slack, dim=S.dim)


def hayashi_nagaoka_suite(
    dims: Tuple[int, int] = (2, 16),
    count: int = 1000,
    seed: int = 42,
    c_range: Tuple[float, float] = (1e-2, 1e2),
) -> HNSuiteSummary:
    """
    Randomized verification: S a random test, T a random PSD operator with
    random rank and trace, c log-uniform in c_range, dimension uniform in dims.
    """
    d_lo, d_hi = dims
    if not 1 <= d_lo <= d_hi:
        raise ParameterError(f"invalid dimension range {dims!r}")
    if count < 1:
        raise ParameterError("count must be positive")
    log_c = (math.log10(c_range[0]), math.log10(c_range[1]))

    worst: Optional[HNCheck] = None
    failures = 0
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        d = int(rng.integers(d_lo, d_hi + 1))
        S = random_test(d, seed=int(rng.integers(2 ** 32)))
        rank = int(rng.integers(1, d + 1))
        scale = float(10.0 ** rng.uniform(-2.0, 1.0))
        T = random_psd(d, rank, seed=int(rng.integers(2 ** 32)), scale=scale)
        c = float(10.0 ** rng.uniform(*log_c))
        check = check_hayashi_nagaoka(S, T, c)
        if not check.passed:
            failures += 1
            logger.warning(f"Hayashi-Nagaoka slack {check.min_eig_slack:.3e} at dim={d}, c={c:.4g}")
        if worst is None or check.min_eig_slack < worst.min_eig_slack:
            worst = check

    logger.info(f"Hayashi-Nagaoka suite: {count} instances, min slack {worst.min_eig_slack:.3e}, {failures} failure(s)")
    return HNSuiteSummary(count=count, min_slack=worst.min_eig_slack, worst=worst, failures=failures, seed=seed)


# ---------------------------------------------------------------------------
# Expurgation
# ---------------------------------------------------------------------------

def expurgate_to_max_error(
    ch: CQChannel,
    cb: Codebook,
    povm: DecodingPOVM,
    allow_floor: bool = False,
) -> Tuple[Codebook, DecodingPOVM, CodeEvaluation]:
    """
    Keep the half of the messages with the smallest error (ties by index).

    The dropped POVM elements are merged into the remainder. The kept code
    has maximal error at most twice the original average error.

    Args:
        allow_floor: Accept odd m and keep floor(m/2) messages.
    """
    m = cb.m
    if m < 2:
        raise ParameterError("expurgation needs at least two codewords")
    if m % 2 and not allow_floor:
        raise ParameterError(f"codebook size {m} is odd; pass allow_floor=True to keep floor(m/2)")
    if m % 2:
        logger.warning(f"expurgating odd codebook of size {m}: keeping {m // 2} messages")

    ev = evaluate_code(ch, cb, povm)
    order = sorted(range(m), key=lambda i: (ev.per_word_error[i], i))
    kept = sorted(order[: m // 2])
    dropped = sorted(order[m // 2:])

    new_cb = Codebook(tuple(cb.entries[i] for i in kept))
    remainder = povm.remainder.matrix + sum(povm.elements[i].matrix for i in dropped)
    new_povm = DecodingPOVM(tuple(povm.elements[i] for i in kept), HermitianOperator(remainder))
    return new_cb, new_povm, evaluate_code(ch, new_cb, new_povm)


# ---------------------------------------------------------------------------
# Converse checks on explicit codes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConverseCertificate:
    """Test Q = sum_i |x_i><x_i| (x) E_i built from a code with distinct codewords."""
    input_dist: InputDistribution
    acceptance: float        # trace(Q pi^AB) = 1 - avg_error
    type_two: float          # trace(Q (pi^A (x) pi^B)) <= 1/m
    avg_error: float
    log_m: float
    dh_value: float          # D_H^{avg_error} at the code's input distribution

    @property
    def holds(self) -> bool:
        return self.log_m <= self.dh_value + 1e-6


def converse_test_from_code(
    ch: CQChannel,
    cb: Codebook,
    povm: DecodingPOVM,
    solver: Optional[NeymanPearsonSolver] = None,
) -> ConverseCertificate:
    """
    Turn an explicit code into a feasible test for pi^AB against pi^A (x) pi^B
    under the codebook's empirical input distribution.
    """
    if not cb.is_distinct:
        raise ValidationError("constructive converse needs pairwise distinct codewords")
    ev = evaluate_code(ch, cb, povm)
    m = cb.m
    probs = [1.0 / m if x in cb.entries else 0.0 for x in ch.labels]
    P = InputDistribution.from_array(ch.labels, probs)
    js = joint_state(ch, P)

    acceptance = sum(e.expectation(ch.output(x)) for x, e in zip(cb.entries, povm.elements)) / m
    type_two = sum(e.expectation(js.avg) for e in povm.elements) / m
    eps_hat = min(ev.avg_error, 1.0 - 1e-12)
    dh_value = dh_cq(js, eps_hat, solver).value
    return ConverseCertificate(
        input_dist=P,
        acceptance=acceptance,
        type_two=type_two,
        avg_error=ev.avg_error,
        log_m=float(units.log(m)),
        dh_value=dh_value,
    )


def confusion_matrix(ch: CQChannel, cb: Codebook, povm: DecodingPOVM) -> np.ndarray:
    """
    Joint distribution of (sent, decoded): entry [i, j] = trace(E_j rho_{x_i}) / m
    for j = 1..m, with column 0 the remainder (abort) outcome.
    """
    if povm.m != cb.m:
        raise DimensionMismatchError(f"POVM has {povm.m} elements for a codebook of size {cb.m}")
    m = cb.m
    outcomes = (povm.remainder,) + povm.elements
    joint = np.array([[e.expectation(ch.output(x)) for e in outcomes] for x in cb.entries]) / m
    return np.clip(joint, 0.0, None)


@dataclass(frozen=True)
class ProcessingCheck:
    """Classical D_H^eps of (M, M') against its marginals versus the quantum value."""
    classical: float
    quantum: float
    epsilon: float

    @property
    def holds(self) -> bool:
        return self.classical <= self.quantum + 1e-7


def message_channel(ch: CQChannel, cb: Codebook) -> CQChannel:
    """The cq channel i -> rho_{x_i} indexed by message."""
    return CQChannel.from_states(tuple(range(cb.m)), [ch.output(x) for x in cb.entries])


def code_classical_dh(
    ch: CQChannel,
    cb: Codebook,
    povm: DecodingPOVM,
    eps: float,
    solver: Optional[NeymanPearsonSolver] = None,
) -> ProcessingCheck:
    """
    Decoding maps the message-indexed joint state onto the (M, M') distribution,
    so its D_H^eps cannot exceed the quantum one.
    """
    joint = confusion_matrix(ch, cb, povm)
    joint = joint / joint.sum()
    prod = np.outer(joint.sum(axis=1), joint.sum(axis=0))
    _, classical = classical_neyman_pearson(joint.ravel(), prod.ravel(), eps)

    msg = message_channel(ch, cb)
    quantum = dh_cq(joint_state(msg, InputDistribution.uniform(msg.labels)), eps, solver).value
    return ProcessingCheck(classical=classical, quantum=quantum, epsilon=eps)
