"""Hypothesis Testing Module

Computes the minimal type-II error beta* of a test between rho and sigma whose
type-I error is at most epsilon, and the hypothesis testing relative entropy
D_H^eps(rho||sigma) = -log beta*.

The optimizer is the quantum Neyman-Pearson family

    Q(t, lam) = P+(t) + lam * P0(t),

P+(t) / P0(t) projecting onto the positive / (numerically) zero eigenspace of
rho - t*sigma. The threshold t is bisected on the type-I constraint and lam
fills the jump of trace(P+(t) rho) where an eigenvalue crosses zero.

Every certified solve is checked against the conic dual

    g(mu) = mu (1 - eps) - trace((mu rho - sigma)+) <= beta*,   mu >= 0,

maximized by a log-spaced grid scan followed by a bounded scalar search.

The solver works on a BlockPencil: a direct sum of (A_k, B_k) blocks. A single
block is the general case; diagonal blocks are the classical (commuting) case;
one block per input label is the classical-quantum case used by cq_channel.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from scipy.optimize import minimize_scalar

from config import BISECTION_TOL, DUALITY_GAP_TOL, RANK_TOL
from . import units
from .exceptions import (
    CertificationError,
    DimensionMismatchError,
    NumericalError,
    ParameterError,
)
from .operators import (
    DensityOperator,
    TestOperator,
    _eigh,
    _eigvalsh,
    _is_diagonal,
    support_projector,
)

logger = logging.getLogger(__name__)

# Feasibility slack for the type-I constraint of a reported test
ACCEPTANCE_SLACK = 1e-8
# Weak-duality noise allowed before a negative gap is treated as a defect
NEGATIVE_GAP_SLACK = 1e-9
# Allowed drift between beta and trace(Q sigma) of the reported test
TYPE_TWO_SLACK = 1e-9
MAX_BISECTION_STEPS = 500
MAX_BRACKET_DOUBLINGS = 200
T_BRACKET_REL_TOL = 1e-14
# Relative t-bracket below which a settled type-I error ends the bisection
T_BRACKET_SETTLED = 1e-6
# Zero band of the threshold family during bisection, relative to max(1, t)
ZERO_BAND_REL_TOL = 1e-13


# ---------------------------------------------------------------------------
# Configuration types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances of the Neyman-Pearson solver."""
    duality_gap_tol: float = DUALITY_GAP_TOL
    bisection_tol: float = BISECTION_TOL
    rank_tol: float = RANK_TOL

    def __post_init__(self):
        for name in ("duality_gap_tol", "bisection_tol", "rank_tol"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class DualScanConfig:
    """Grid and refinement settings of the dual scan over mu."""
    points: int = 64
    xatol: float = 1e-12
    maxiter: int = 500
    max_extensions: int = 60


# ---------------------------------------------------------------------------
# Block pencil
# ---------------------------------------------------------------------------

@dataclass
class _Block:
    a: np.ndarray
    b: np.ndarray
    diagonal: bool
    dim: int = field(init=False)

    def __post_init__(self):
        self.dim = self.a.shape[0]


@dataclass
class _BlockSpectrum:
    w: np.ndarray                    # eigenvalues of A - tB
    v: Optional[np.ndarray]          # eigenvectors, None for diagonal blocks
    a: np.ndarray                    # <v|A|v>
    b: np.ndarray                    # <v|B|v>


class BlockPencil:
    """
    Hypothesis pair rho = (+)_k A_k, sigma = (+)_k B_k.

    Diagonal blocks are stored as vectors, so commuting inputs never touch a
    dense eigensolver.
    """

    def __init__(self, blocks: Sequence[Tuple[np.ndarray, np.ndarray]]):
        self.blocks: List[_Block] = []
        for a, b in blocks:
            a = np.asarray(a)
            b = np.asarray(b)
            if a.shape != b.shape:
                raise DimensionMismatchError(f"block shapes {a.shape} and {b.shape} differ")
            if a.ndim == 1:
                self.blocks.append(_Block(a.real.astype(float), b.real.astype(float), True))
            elif _is_diagonal(a) and _is_diagonal(b):
                self.blocks.append(_Block(np.real(np.diagonal(a)).copy(), np.real(np.diagonal(b)).copy(), True))
            else:
                self.blocks.append(_Block(a.astype(complex), b.astype(complex), False))
        if not self.blocks:
            raise DimensionMismatchError("pencil needs at least one block")
        self._sigma_kernel: Optional[Tuple[float, List[np.ndarray]]] = None

    @classmethod
    def from_pair(cls, rho: DensityOperator, sigma: DensityOperator) -> "BlockPencil":
        if rho.dim != sigma.dim:
            raise DimensionMismatchError(f"rho has dim {rho.dim}, sigma has dim {sigma.dim}")
        return cls([(rho.matrix, sigma.matrix)])

    @classmethod
    def from_distributions(cls, p: Sequence[float], q: Sequence[float]) -> "BlockPencil":
        return cls([(np.asarray(p, dtype=float), np.asarray(q, dtype=float))])

    # -----------------------------------------------------------------------
    # Spectral data
    # -----------------------------------------------------------------------

    def threshold_spectrum(self, t: float) -> List[_BlockSpectrum]:
        out = []
        for blk in self.blocks:
            if blk.diagonal:
                out.append(_BlockSpectrum(blk.a - t * blk.b, None, blk.a, blk.b))
                continue
            w, v = _eigh(blk.a - t * blk.b)
            a = np.real(np.einsum("ij,ik,kj->j", v.conj(), blk.a, v))
            b = np.real(np.einsum("ij,ik,kj->j", v.conj(), blk.b, v))
            out.append(_BlockSpectrum(w, v, a, b))
        return out

    def _eigs(self, which: str) -> List[np.ndarray]:
        res = []
        for blk in self.blocks:
            m = getattr(blk, which)
            res.append(np.sort(m) if blk.diagonal else _eigvalsh(m))
        return res

    def max_eig_a(self) -> float:
        return max(float(w[-1]) for w in self._eigs("a"))

    def max_eig_b(self) -> float:
        return max(float(w[-1]) for w in self._eigs("b"))

    def min_nonzero_eig_b(self, rank_tol: float) -> float:
        vals = [float(w[w > rank_tol].min()) for w in self._eigs("b") if np.any(w > rank_tol)]
        if not vals:
            raise NumericalError("sigma has no support above rank_tol")
        return min(vals)

    def sigma_kernel(self, rank_tol: float) -> Tuple[float, List[np.ndarray]]:
        """(trace(P_ker(sigma) rho), per-block kernel projectors)."""
        if self._sigma_kernel is not None:
            return self._sigma_kernel
        weight = 0.0
        projectors = []
        for blk in self.blocks:
            if blk.diagonal:
                mask = blk.b <= rank_tol
                weight += float(blk.a[mask].sum())
                projectors.append(mask.astype(float))
                continue
            w, v = _eigh(blk.b)
            vk = v[:, w <= rank_tol]
            proj = vk @ vk.conj().T
            weight += float(np.real(np.sum(proj * blk.a.T)))
            projectors.append(proj)
        self._sigma_kernel = (weight, projectors)
        return self._sigma_kernel

    def support_overlap(self, rank_tol: float) -> float:
        """trace(Pi_rho sigma): the mu -> infinity limit of the eps = 0 dual."""
        total = 0.0
        for blk in self.blocks:
            if blk.diagonal:
                total += float(blk.b[blk.a > rank_tol].sum())
                continue
            w, v = _eigh(blk.a)
            vk = v[:, w > rank_tol]
            total += float(np.real(np.einsum("ij,ik,kj->", vk.conj(), blk.b, vk)))
        return total

    def positive_trace(self, mu: float) -> float:
        """trace((mu*rho - sigma)+) summed over blocks."""
        total = 0.0
        for blk in self.blocks:
            m = mu * blk.a - blk.b
            w = m if blk.diagonal else _eigvalsh(m)
            total += float(w[w > 0].sum())
        return total

    # -----------------------------------------------------------------------
    # Test assembly
    # -----------------------------------------------------------------------

    @staticmethod
    def assemble(spectra: List[_BlockSpectrum], weights: List[np.ndarray]) -> List[np.ndarray]:
        """Per-block test matrices V diag(q) V^dagger."""
        tests = []
        for sp, q in zip(spectra, weights):
            if sp.v is None:
                tests.append(np.diag(q).astype(complex))
            else:
                tests.append((sp.v * q) @ sp.v.conj().T)
        return tests

    @property
    def total_dim(self) -> int:
        return sum(blk.dim for blk in self.blocks)


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PencilSolution:
    """Optimal Neyman-Pearson test on a block pencil."""
    beta: float
    value: float                 # -log beta in the configured unit
    block_tests: Tuple[np.ndarray, ...]
    threshold: float
    mixing: float
    acceptance: float            # trace(Q rho)
    epsilon: float
    dual_value: float = math.nan
    gap: float = math.nan
    certified: bool = False


@dataclass(frozen=True, eq=False)
class HypothesisTestResult:
    """
    Optimal test between two states.

    Fields:
        beta:       minimal type-II error p*(rho, sigma, eps).
        dh:         D_H^eps(rho||sigma) = -log beta (may be +inf).
        test:       an optimal Q.
        threshold:  t of the Neyman-Pearson family (inf when beta = 0).
        mixing:     lam, the randomization weight on the crossing eigenspace.
        dual_value: -log of the best dual lower bound on beta (>= dh).
        gap:        dual_value - dh.
        type_two:   trace(test sigma); equals beta except when beta = 0, where
                    the test is the kernel projector of sigma up to rank_tol.
        gap_tol:    duality gap a certified result may carry.
    """
    beta: float
    dh: float
    test: TestOperator
    threshold: float
    mixing: float
    dual_value: float
    gap: float
    epsilon: float
    acceptance: float
    certified: bool = True
    type_two: float = math.nan
    gap_tol: float = DUALITY_GAP_TOL

    def __post_init__(self):
        if self.beta > 0.0 and abs(self.type_two - self.beta) > TYPE_TWO_SLACK:
            raise NumericalError(
                f"beta = {self.beta!r} disagrees with trace(Q sigma) = {self.type_two!r}"
            )
        if self.acceptance < 1.0 - self.epsilon - ACCEPTANCE_SLACK:
            raise NumericalError(
                f"test violates the type-I constraint: trace(Q rho) = {self.acceptance!r} "
                f"< 1 - eps = {1.0 - self.epsilon!r}"
            )
        if self.certified and self.gap < -NEGATIVE_GAP_SLACK:
            raise NumericalError(f"negative duality gap {self.gap:.3e}")
        if self.certified and self.gap > self.gap_tol:
            raise CertificationError(self.dh, self.dual_value, self.gap_tol)


def _value_of(beta: float) -> float:
    return math.inf if beta <= 0.0 else float(-units.log(beta))


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------

class NeymanPearsonSolver:
    """
    Exact Neyman-Pearson solver with dual certification.

    One instance holds the tolerances and dual-scan settings; it is stateless
    across calls and safe to share between threads.
    """

    def __init__(
        self,
        tolerances: Optional[Tolerances] = None,
        scan: Optional[DualScanConfig] = None,
    ):
        self.tol = tolerances or Tolerances()
        self.scan = scan or DualScanConfig()
        self.logger = logger

    # -----------------------------------------------------------------------
    # Primal
    # -----------------------------------------------------------------------

    def solve(self, pencil: BlockPencil, eps: float, certify: bool = True) -> PencilSolution:
        """
        Optimal test on a pencil.

        Args:
            pencil:  The hypothesis pair.
            eps:     Type-I error budget in [0, 1).
            certify: Run the dual scan and raise CertificationError when the
                     gap exceeds duality_gap_tol.
        """
        _check_epsilon(eps)
        target = 1.0 - eps
        ker_weight, ker_projectors = pencil.sigma_kernel(self.tol.rank_tol)

        if ker_weight >= target - self.tol.rank_tol:
            # rho can be accepted inside ker(sigma): beta = 0
            tests = tuple(
                np.diag(p).astype(complex) if p.ndim == 1 else p for p in ker_projectors
            )
            self.logger.debug(f"solve: kernel weight {ker_weight:.6g} >= 1 - eps; D_H = inf")
            return PencilSolution(
                beta=0.0, value=math.inf, block_tests=tests, threshold=math.inf,
                mixing=0.0, acceptance=ker_weight, epsilon=eps,
                dual_value=math.inf, gap=0.0, certified=certify,
            )

        if eps == 0.0:
            solution = self._finalize(pencil, 0.0, self._delta(0.0), target, eps)
        else:
            solution = self._bisect(pencil, target, eps)

        if certify:
            solution = self._certify(pencil, solution)
        return solution

    def _delta(self, t: float) -> float:
        return self.tol.rank_tol * max(1.0, t)

    def _band(self, t: float) -> float:
        # eigenvalues inside the band are weighted by lam, so it must stay near machine noise
        return ZERO_BAND_REL_TOL * max(1.0, t)

    def _type_one(self, pencil: BlockPencil, t: float, delta: float) -> Tuple[float, float]:
        """(trace(P+ rho), trace((P+ + P0) rho)) at threshold t."""
        f_plus = 0.0
        f_zero = 0.0
        for sp in pencil.threshold_spectrum(t):
            f_plus += float(sp.a[sp.w > delta].sum())
            f_zero += float(sp.a[np.abs(sp.w) <= delta].sum())
        return f_plus, f_plus + f_zero

    def _bisect(self, pencil: BlockPencil, target: float, eps: float) -> PencilSolution:
        t_hi = pencil.max_eig_a() / pencil.min_nonzero_eig_b(self.tol.rank_tol) + 1.0
        fp_hi, f0p_hi = self._type_one(pencil, t_hi, self._band(t_hi))
        doublings = 0
        while f0p_hi >= target:
            if fp_hi <= target:
                return self._finalize(pencil, t_hi, self._band(t_hi), target, eps)
            doublings += 1
            if doublings > MAX_BRACKET_DOUBLINGS:
                raise NumericalError(
                    f"could not bracket the threshold: trace((P+ + P0) rho) = {f0p_hi!r} "
                    f">= {target!r} at t = {t_hi:.3e}"
                )
            t_hi *= 2.0
            fp_hi, f0p_hi = self._type_one(pencil, t_hi, self._band(t_hi))
        if doublings:
            self.logger.warning(f"bisect: threshold bracket expanded {doublings} time(s) to t = {t_hi:.3e}")

        lo = 0.0
        fp_lo, f0p_lo = self._type_one(pencil, lo, self._delta(lo))
        if fp_lo <= target <= f0p_lo:
            return self._finalize(pencil, lo, self._delta(lo), target, eps)

        t_init = hi = t_hi
        steps = 0
        while steps < MAX_BISECTION_STEPS:
            if hi - lo <= T_BRACKET_REL_TOL * t_init:
                break
            if fp_lo - f0p_hi <= self.tol.bisection_tol and hi - lo <= T_BRACKET_SETTLED * hi:
                break
            steps += 1
            mid = 0.5 * (lo + hi)
            fp, f0p = self._type_one(pencil, mid, self._band(mid))
            if fp <= target <= f0p:
                self.logger.debug(f"bisect: exact bracket at t = {mid:.12g} after {steps} steps")
                return self._finalize(pencil, mid, self._band(mid), target, eps)
            if f0p < target:
                hi, f0p_hi = mid, f0p
            else:
                lo, fp_lo = mid, fp

        self.logger.debug(f"bisect: stopped after {steps} steps with t in [{lo:.12g}, {hi:.12g}]")
        return self._finalize_chord(pencil, lo, hi, target, eps)

    def _finalize(
        self,
        pencil: BlockPencil,
        t: float,
        delta: float,
        target: float,
        eps: float,
    ) -> PencilSolution:
        spectra = pencil.threshold_spectrum(t)
        f_plus = sum(float(sp.a[sp.w > delta].sum()) for sp in spectra)
        f_zero = sum(float(sp.a[np.abs(sp.w) <= delta].sum()) for sp in spectra)
        deficit = target - f_plus
        if deficit <= self.tol.bisection_tol or f_zero <= self.tol.rank_tol:
            lam = 0.0
        else:
            lam = min(1.0, deficit / f_zero)

        weights = [
            (sp.w > delta).astype(float) + lam * (np.abs(sp.w) <= delta).astype(float)
            for sp in spectra
        ]
        beta = sum(float(np.dot(q, sp.b)) for q, sp in zip(weights, spectra))
        beta = max(beta, 0.0)
        acceptance = sum(float(np.dot(q, sp.a)) for q, sp in zip(weights, spectra))
        return PencilSolution(
            beta=beta,
            value=_value_of(beta),
            block_tests=tuple(pencil.assemble(spectra, weights)),
            threshold=t,
            mixing=lam,
            acceptance=acceptance,
            epsilon=eps,
        )

    def _finalize_chord(
        self,
        pencil: BlockPencil,
        lo: float,
        hi: float,
        target: float,
        eps: float,
    ) -> PencilSolution:
        """
        Q = lam * P+(lo) + (1 - lam) * P+(hi) with trace(Q rho) = 1 - eps.

        Both projectors are optimal at their own type-I level and beta* is
        convex in that level, so the chord overshoots beta* only by
        O((hi - lo) * (f+(lo) - f+(hi))). As hi - lo -> 0 the difference
        P+(lo) - P+(hi) is the crossing eigenspace P0 of the threshold family.
        """
        sp_lo = pencil.threshold_spectrum(lo)
        sp_hi = pencil.threshold_spectrum(hi)
        d_lo, d_hi = self._band(lo), self._band(hi)
        q_lo = [(sp.w > d_lo).astype(float) for sp in sp_lo]
        q_hi = [(sp.w > d_hi).astype(float) for sp in sp_hi]
        fp_lo = sum(float(np.dot(q, sp.a)) for q, sp in zip(q_lo, sp_lo))
        fp_hi = sum(float(np.dot(q, sp.a)) for q, sp in zip(q_hi, sp_hi))
        beta_lo = sum(float(np.dot(q, sp.b)) for q, sp in zip(q_lo, sp_lo))
        beta_hi = sum(float(np.dot(q, sp.b)) for q, sp in zip(q_hi, sp_hi))

        spread = fp_lo - fp_hi
        lam = 1.0 if spread <= 0 else min(1.0, max(0.0, (target - fp_hi) / spread))
        tests = [
            lam * t_lo + (1.0 - lam) * t_hi
            for t_lo, t_hi in zip(pencil.assemble(sp_lo, q_lo), pencil.assemble(sp_hi, q_hi))
        ]
        beta = max(lam * beta_lo + (1.0 - lam) * beta_hi, 0.0)
        return PencilSolution(
            beta=beta,
            value=_value_of(beta),
            block_tests=tuple(tests),
            threshold=0.5 * (lo + hi),
            mixing=lam,
            acceptance=lam * fp_lo + (1.0 - lam) * fp_hi,
            epsilon=eps,
        )

    # -----------------------------------------------------------------------
    # Dual
    # -----------------------------------------------------------------------

    def dual_value(self, pencil: BlockPencil, eps: float, hint: Optional[float] = None) -> float:
        """
        -log of max_{mu >= 0} g(mu); an upper bound on D_H^eps.

        hint is an extra candidate mu, usually 1/t at the primal threshold t.
        Every g(mu) is a lower bound on beta, so a candidate never loosens
        the certificate. Returns +inf when g is nonpositive everywhere
        scanned (beta may be 0).
        """
        _check_epsilon(eps)
        target = 1.0 - eps
        ker_weight, _ = pencil.sigma_kernel(self.tol.rank_tol)
        if ker_weight >= target - self.tol.rank_tol:
            return math.inf

        def g(mu: float) -> float:
            return mu * target - pencil.positive_trace(mu)

        if eps == 0.0:
            # g increases towards trace(Pi_rho sigma) as mu -> infinity
            best = pencil.support_overlap(self.tol.rank_tol)
        else:
            best = self._scan(g, pencil, eps)
            if hint is not None and 0.0 < hint < math.inf:
                best = max(best, g(hint))
        return _value_of(best)

    def _scan(self, g, pencil: BlockPencil, eps: float) -> float:
        t_max = pencil.max_eig_a() / pencil.min_nonzero_eig_b(self.tol.rank_tol) + 1.0
        mu_lo = 1.0 / (4.0 * t_max)
        mu_hi = 1.0 / eps
        if mu_hi <= mu_lo:
            mu_hi = 4.0 * mu_lo

        grid = np.geomspace(mu_lo, mu_hi, self.scan.points)
        vals = np.array([g(mu) for mu in grid])
        extensions = 0
        while int(np.argmax(vals)) == 0 and extensions < self.scan.max_extensions:
            # optimum at the low edge: prepend a decade and keep the scanned points
            extensions += 1
            lower = np.geomspace(grid[0] / 10.0, grid[0], self.scan.points)[:-1]
            grid = np.concatenate([lower, grid])
            vals = np.concatenate([[g(mu) for mu in lower], vals])
        k = int(np.argmax(vals))

        # g is concave, so its maximizer lies between the neighbours of the best grid point
        lo = math.log(grid[max(k - 1, 0)])
        hi = math.log(grid[min(k + 1, len(grid) - 1)])
        best = float(vals[k])
        if hi > lo:
            res = minimize_scalar(
                lambda s: -g(math.exp(s)),
                bounds=(lo, hi),
                method="bounded",
                options={"xatol": self.scan.xatol, "maxiter": self.scan.maxiter},
            )
            best = max(best, float(-res.fun))
        self.logger.debug(f"dual scan: best g = {best!r} near mu = {grid[k]:.6g} ({extensions} extension(s))")
        return best

    def _certify(self, pencil: BlockPencil, solution: PencilSolution) -> PencilSolution:
        hint = 1.0 / solution.threshold if 0.0 < solution.threshold < math.inf else None
        dual = self.dual_value(pencil, solution.epsilon, hint)
        if math.isinf(dual) and math.isinf(solution.value):
            gap = 0.0
        else:
            gap = dual - solution.value
        if not (-NEGATIVE_GAP_SLACK <= gap <= self.tol.duality_gap_tol):
            raise CertificationError(solution.value, dual, self.tol.duality_gap_tol)
        return PencilSolution(
            beta=solution.beta,
            value=solution.value,
            block_tests=solution.block_tests,
            threshold=solution.threshold,
            mixing=solution.mixing,
            acceptance=solution.acceptance,
            epsilon=solution.epsilon,
            dual_value=dual,
            gap=gap,
            certified=True,
        )

    # -----------------------------------------------------------------------
    # State-pair interface
    # -----------------------------------------------------------------------

    def optimal_test(
        self,
        rho: DensityOperator,
        sigma: DensityOperator,
        eps: float,
        certify: bool = True,
    ) -> HypothesisTestResult:
        sol = self.solve(BlockPencil.from_pair(rho, sigma), eps, certify=certify)
        test = TestOperator(sol.block_tests[0])
        return HypothesisTestResult(
            beta=sol.beta,
            dh=sol.value,
            test=test,
            threshold=sol.threshold,
            mixing=sol.mixing,
            dual_value=sol.dual_value,
            gap=sol.gap,
            epsilon=eps,
            acceptance=sol.acceptance,
            certified=sol.certified,
            type_two=test.expectation(sigma),
            gap_tol=self.tol.duality_gap_tol,
        )


def _check_epsilon(eps: float) -> None:
    if not (0.0 <= eps < 1.0):
        raise ParameterError(f"epsilon must lie in [0, 1), got {eps!r}")


# ---------------------------------------------------------------------------
# Module-level interface
# ---------------------------------------------------------------------------

_default_solver = NeymanPearsonSolver()


def default_solver() -> NeymanPearsonSolver:
    """Solver used whenever a caller passes no explicit one."""
    return _default_solver


def configure_default_solver(
    tolerances: Optional[Tolerances] = None,
    scan: Optional[DualScanConfig] = None,
) -> NeymanPearsonSolver:
    """Replace the process-wide default solver (CLI tolerance overrides)."""
    global _default_solver
    _default_solver = NeymanPearsonSolver(tolerances, scan)
    logger.debug(f"default solver reconfigured: {_default_solver.tol}")
    return _default_solver


def _solver(tolerances: Optional[Tolerances]) -> NeymanPearsonSolver:
    return default_solver() if tolerances is None else NeymanPearsonSolver(tolerances)


def optimal_test(
    rho: DensityOperator,
    sigma: DensityOperator,
    eps: float,
    tolerances: Optional[Tolerances] = None,
    certify: bool = True,
) -> HypothesisTestResult:
    """Optimal Neyman-Pearson test and D_H^eps(rho||sigma), dual-certified."""
    return _solver(tolerances).optimal_test(rho, sigma, eps, certify=certify)


def dh(
    rho: DensityOperator,
    sigma: DensityOperator,
    eps: float,
    tolerances: Optional[Tolerances] = None,
    certify: bool = True,
) -> float:
    """D_H^eps(rho||sigma) in the configured log unit."""
    return optimal_test(rho, sigma, eps, tolerances, certify).dh


def dh_dual_oracle(
    rho: DensityOperator,
    sigma: DensityOperator,
    eps: float,
    scan: Optional[DualScanConfig] = None,
    tolerances: Optional[Tolerances] = None,
) -> float:
    """Dual value -log max_mu g(mu); never below the primal D_H^eps."""
    solver = NeymanPearsonSolver(tolerances, scan) if (scan or tolerances) else default_solver()
    return solver.dual_value(BlockPencil.from_pair(rho, sigma), eps)


def classical_neyman_pearson(
    p: Sequence[float],
    q: Sequence[float],
    eps: float,
) -> Tuple[float, float]:
    """
    Randomized classical Neyman-Pearson test by likelihood-ratio ordering.

    Outcomes are accepted in decreasing order of p/q until the accepted
    p-mass reaches 1 - eps; the last outcome is accepted fractionally.

    Returns:
        (beta, D_H^eps) for the distributions p (null) and q (alternative).
    """
    _check_epsilon(eps)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DimensionMismatchError(f"distributions have shapes {p.shape} and {q.shape}")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(q > 0, p / np.where(q > 0, q, 1.0), np.inf)
    ratio = np.where(p > 0, ratio, -1.0)
    order = np.argsort(-ratio, kind="stable")

    remaining = 1.0 - eps
    beta = 0.0
    for i in order:
        if remaining <= 1e-15 or p[i] <= 0:
            break
        take = min(1.0, remaining / p[i])
        beta += take * q[i]
        remaining -= take * p[i]
    return beta, _value_of(beta)


def relative_entropy(
    rho: DensityOperator,
    sigma: DensityOperator,
    rank_tol: float = RANK_TOL,
) -> float:
    """
    Umegaki relative entropy trace(rho (log rho - log sigma)).

    +inf when supp(rho) is not contained in supp(sigma), i.e. when
    trace((I - Pi_sigma) rho) > rank_tol.
    """
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(f"rho has dim {rho.dim}, sigma has dim {sigma.dim}")
    r, vr = rho.spectrum
    s, vs = sigma.spectrum
    outside = 1.0 - support_projector(sigma, rank_tol).expectation(rho)
    if outside > rank_tol:
        return math.inf

    r = np.clip(r, 0.0, None)
    overlap = np.abs(vr.conj().T @ vs) ** 2         # |<r_i|s_j>|^2
    support = s > rank_tol
    log_s = np.zeros_like(s)
    log_s[support] = units.log(s[support])
    with np.errstate(divide="ignore", invalid="ignore"):
        log_r = np.where(r > 0, units.log(np.where(r > 0, r, 1.0)), 0.0)
    self_term = float(np.dot(r, log_r))
    cross_term = float(r @ (overlap[:, support] @ log_s[support]))
    return max(self_term - cross_term, 0.0)


def renyi0(
    rho: DensityOperator,
    sigma: DensityOperator,
    rank_tol: float = RANK_TOL,
) -> float:
    """D_0(rho||sigma) = -log trace(Pi_rho sigma)."""
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(f"rho has dim {rho.dim}, sigma has dim {sigma.dim}")
    overlap = support_projector(rho, rank_tol).expectation(sigma)
    if overlap <= rank_tol:
        return math.inf
    return float(-units.log(overlap))
