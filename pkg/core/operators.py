"""Operator Substrate for the Hypothesis-Testing Toolkit

Dense complex Hermitian linear algebra shared by every other module:
validated operator types, eigendecompositions, tensor products, partial
traces, positivity handling, channels in Kraus form, and seeded random
generation of states, tests and channels.

Conventions:
- Composite index of A (x) B is row-major: index = i * dim(B) + k
  (this is exactly numpy.kron).
- PSD types clamp eigenvalues in [-1e-10, 0) to zero; anything more negative
  is a validation error, not noise.
- All operator values are immutable after construction.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np
import scipy.linalg
from scipy.special import entr, expit

from config import MAX_COMPOSITE_DIM, RANK_TOL
from . import units
from .exceptions import (
    CapExceededError,
    DimensionMismatchError,
    NumericalError,
    ParameterError,
    ValidationError,
)

logger = logging.getLogger(__name__)

# ---------------------------------------------------------------------------
# Tolerances for type invariants
# ---------------------------------------------------------------------------
HERMITICITY_TOL = 1e-8      # relative asymmetry tolerated before symmetrizing
PSD_CLAMP = 1e-10           # eigenvalues in [-PSD_CLAMP, 0) are clamped to 0
TRACE_TOL = 1e-9            # density operators: |tr - 1|
TEST_CLAMP = 1e-9           # test operators: spectrum within [-1e-9, 1 + 1e-9]
TRACE_PRESERVING_TOL = 1e-9
RECONSTRUCTION_TOL = 1e-8


def _is_diagonal(m: np.ndarray) -> bool:
    return not np.any(m - np.diag(np.diagonal(m)))


def _eigh(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Ascending eigendecomposition with a diagonal fast path."""
    if _is_diagonal(m):
        w = np.real(np.diagonal(m)).copy()
        order = np.argsort(w, kind="stable")
        vecs = np.eye(m.shape[0], dtype=complex)[:, order]
        return w[order], vecs
    try:
        return np.linalg.eigh(m)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"eigensolver failed on {m.shape[0]}x{m.shape[0]} matrix: {e}") from e


def _eigvalsh(m: np.ndarray) -> np.ndarray:
    if _is_diagonal(m):
        return np.sort(np.real(np.diagonal(m)))
    try:
        return np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"eigensolver failed on {m.shape[0]}x{m.shape[0]} matrix: {e}") from e


def _from_spectrum(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    return (v * w) @ v.conj().T


def _check_cap(what: str, dim: int, cap: Optional[int]) -> None:
    limit = MAX_COMPOSITE_DIM if cap is None else cap
    if dim > limit:
        raise CapExceededError(what, dim, limit)


# ---------------------------------------------------------------------------
# Operator types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Square complex matrix, symmetrized to exact Hermiticity on construction."""
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValidationError(f"expected a non-empty square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValidationError("matrix has non-finite entries")
        scale = max(1.0, float(np.abs(m).max()))
        asym = float(np.abs(m - m.conj().T).max())
        if asym > HERMITICITY_TOL * scale:
            raise ValidationError(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        self._validate()

    def _validate(self) -> None:
        """Subclass hook for type invariants."""

    def _replace_matrix(self, w: np.ndarray, v: np.ndarray) -> None:
        """Rebuild the matrix from a clamped spectrum and keep that spectrum cached."""
        m = _from_spectrum(w, v)
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        self.__dict__["spectrum"] = (w, v)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self) -> Tuple[np.ndarray, np.ndarray]:
        """Ascending eigenvalues and matching eigenvector columns."""
        return _eigh(self.matrix)

    def eigenvalues(self) -> np.ndarray:
        return self.spectrum[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def expectation(self, other: "HermitianOperator") -> float:
        """Real part of trace(self @ other)."""
        if other.dim != self.dim:
            raise DimensionMismatchError(f"dimensions {self.dim} and {other.dim} differ")
        # trace(AB) = sum_ij A_ij B_ji
        return float(np.real(np.sum(self.matrix * other.matrix.T)))

    def is_psd(self, tol: float = PSD_CLAMP) -> bool:
        return bool(self.eigenvalues()[0] >= -tol)

    def __repr__(self):
        return f"<{type(self).__name__} dim={self.dim} trace={self.trace():.6g}>"


class DensityOperator(HermitianOperator):
    """PSD, unit-trace operator (a quantum state)."""

    def _validate(self) -> None:
        w, v = self.spectrum
        if w[0] < -PSD_CLAMP:
            raise ValidationError(f"state has negative eigenvalue {w[0]:.3e}")
        if w[0] < 0:
            self._replace_matrix(np.clip(w, 0.0, None), v)
        tr = self.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"state has trace {tr!r}, expected 1")


class TestOperator(HermitianOperator):
    """Two-outcome POVM element Q with 0 <= Q <= I."""

    __test__ = False  # keep pytest from collecting the class

    def _validate(self) -> None:
        w, v = self.spectrum
        if w[0] < -TEST_CLAMP or w[-1] > 1.0 + TEST_CLAMP:
            raise ValidationError(
                f"test spectrum [{w[0]:.3e}, {w[-1]:.3e}] leaves [0, 1]"
            )
        if w[0] < 0 or w[-1] > 1.0:
            self._replace_matrix(np.clip(w, 0.0, 1.0), v)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Completely positive trace-preserving map given by Kraus operators."""
    dim_in: int
    dim_out: int
    kraus: Tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __post_init__(self):
        ops = []
        for k, K in enumerate(self.kraus):
            K = np.array(K, dtype=complex)
            if K.shape != (self.dim_out, self.dim_in):
                raise ValidationError(
                    f"Kraus operator {k} has shape {K.shape}, "
                    f"expected {(self.dim_out, self.dim_in)}"
                )
            K.setflags(write=False)
            ops.append(K)
        if not ops:
            raise ValidationError("channel needs at least one Kraus operator")
        completeness = sum(K.conj().T @ K for K in ops)
        residual = float(np.abs(completeness - np.eye(self.dim_in)).max())
        if residual > TRACE_PRESERVING_TOL:
            raise ValidationError(f"Kraus operators are not trace preserving (residual {residual:.3e})")
        object.__setattr__(self, "kraus", tuple(ops))

    def __repr__(self):
        return f"<KrausChannel {self.dim_in}->{self.dim_out} kraus={len(self.kraus)}>"


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------

def eig_hermitian(h: HermitianOperator) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition with descending eigenvalues.

    Returns:
        (eigenvalues, eigenvectors) with eigenvectors as orthonormal columns.

    Raises:
        NumericalError: solver failure or reconstruction residual above
            1e-8 * max(1, ||H||_F).
    """
    w, v = _eigh(h.matrix)
    w, v = w[::-1].copy(), v[:, ::-1].copy()
    norm = float(np.linalg.norm(h.matrix))
    residual = float(np.linalg.norm(h.matrix - _from_spectrum(w, v)))
    unitarity = float(np.linalg.norm(v.conj().T @ v - np.eye(h.dim)))
    if residual > RECONSTRUCTION_TOL * max(1.0, norm) or unitarity > RECONSTRUCTION_TOL:
        raise NumericalError(
            f"eigendecomposition inaccurate: residual={residual:.3e}, "
            f"unitarity={unitarity:.3e}, norm={norm:.3e}, dim={h.dim}"
        )
    return w, v


def _same_kind(*ops: HermitianOperator) -> type:
    kinds = {type(op) for op in ops}
    return kinds.pop() if len(kinds) == 1 else HermitianOperator


def tensor(a: HermitianOperator, b: HermitianOperator, cap: Optional[int] = None) -> HermitianOperator:
    """A (x) B with row-major composite indexing. Preserves the operand kind."""
    _check_cap("tensor product", a.dim * b.dim, cap)
    return _same_kind(a, b)(np.kron(a.matrix, b.matrix))


def partial_trace(
    m: HermitianOperator,
    dims: Tuple[int, int],
    keep: str = "A",
) -> HermitianOperator:
    """
    Trace out one factor of a bipartite operator.

    Args:
        m:    Operator on A (x) B.
        dims: (dA, dB).
        keep: "A" or "B" - the factor that survives.
    """
    d_a, d_b = dims
    if d_a * d_b != m.dim:
        raise DimensionMismatchError(f"dims {dims} do not factor dimension {m.dim}")
    t = m.matrix.reshape(d_a, d_b, d_a, d_b)
    if keep == "A":
        reduced = np.einsum("ijkj->ik", t)
    elif keep == "B":
        reduced = np.einsum("ijil->jl", t)
    else:
        raise ParameterError(f"keep must be 'A' or 'B', got {keep!r}")
    kind = type(m) if type(m) is DensityOperator else HermitianOperator
    return kind(reduced)


def positive_part(h: HermitianOperator) -> HermitianOperator:
    """V max(L, 0) V^dagger, so that H = positive_part(H) - positive_part(-H)."""
    w, v = h.spectrum
    return HermitianOperator(_from_spectrum(np.clip(w, 0.0, None), v))


def support_projector(rho: HermitianOperator, rank_tol: float = RANK_TOL) -> TestOperator:
    """Projector onto the eigenspaces of rho with eigenvalue > rank_tol."""
    w, v = rho.spectrum
    keep = v[:, w > rank_tol]
    return TestOperator(keep @ keep.conj().T)


def apply_channel(ch: KrausChannel, rho: DensityOperator) -> DensityOperator:
    """sum_k K rho K^dagger."""
    if rho.dim != ch.dim_in:
        raise DimensionMismatchError(f"channel input dim {ch.dim_in} != state dim {rho.dim}")
    out = sum(K @ rho.matrix @ K.conj().T for K in ch.kraus)
    return DensityOperator(out)


def operator_sqrt_pinv(
    h: HermitianOperator,
    rel_tol: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Pseudo-inverse square root on the support of a PSD operator.

    Eigenvalues <= rel_tol * lambda_max are treated as kernel.

    Returns:
        (H^{-1/2} on the support, projector onto the support) as arrays.
    """
    w, v = h.spectrum
    top = float(w[-1]) if w.size else 0.0
    if top <= 0.0:
        return np.zeros_like(h.matrix), np.zeros_like(h.matrix)
    keep = w > rel_tol * top
    vk = v[:, keep]
    inv_sqrt = (vk / np.sqrt(w[keep])) @ vk.conj().T
    return inv_sqrt, vk @ vk.conj().T


def von_neumann_entropy(rho: DensityOperator) -> float:
    """S(rho) in the configured log unit."""
    w = np.clip(rho.eigenvalues(), 0.0, None)
    return float(np.sum(entr(w)) / np.log(units.log_base()))


# ---------------------------------------------------------------------------
# Standard operators and channels
# ---------------------------------------------------------------------------

def identity(dim: int) -> TestOperator:
    return TestOperator(np.eye(dim, dtype=complex))


def maximally_mixed(dim: int) -> DensityOperator:
    return DensityOperator(np.eye(dim, dtype=complex) / dim)


def basis_projector(dim: int, index: int) -> TestOperator:
    """|index><index| on C^dim."""
    if not 0 <= index < dim:
        raise ParameterError(f"basis index {index} outside [0, {dim})")
    m = np.zeros((dim, dim), dtype=complex)
    m[index, index] = 1.0
    return TestOperator(m)


def pure_state(vector: Sequence[complex]) -> DensityOperator:
    psi = np.asarray(vector, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValidationError("zero vector has no pure state")
    psi = psi / norm
    return DensityOperator(np.outer(psi, psi.conj()))


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel(dim, dim, (np.eye(dim),))


def dephasing_channel(dim: int) -> KrausChannel:
    """Complete dephasing in the computational basis (a measurement channel)."""
    kraus = []
    for k in range(dim):
        K = np.zeros((dim, dim))
        K[k, k] = 1.0
        kraus.append(K)
    return KrausChannel(dim, dim, tuple(kraus))


def partial_trace_channel(d_a: int, d_b: int, keep: str = "A") -> KrausChannel:
    """Partial trace over one factor of A (x) B written in Kraus form."""
    if keep == "A":
        kraus = tuple(np.kron(np.eye(d_a), np.eye(d_b)[j:j + 1, :]) for j in range(d_b))
        return KrausChannel(d_a * d_b, d_a, kraus)
    if keep == "B":
        kraus = tuple(np.kron(np.eye(d_a)[i:i + 1, :], np.eye(d_b)) for i in range(d_a))
        return KrausChannel(d_a * d_b, d_b, kraus)
    raise ParameterError(f"keep must be 'A' or 'B', got {keep!r}")


# ---------------------------------------------------------------------------
# Seeded random generation
# ---------------------------------------------------------------------------

def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_hermitian(dim: int, seed: int) -> HermitianOperator:
    g = _ginibre(np.random.default_rng(seed), dim, dim)
    return HermitianOperator(0.5 * (g + g.conj().T))


def random_density(dim: int, rank: Optional[int] = None, seed: int = 0) -> DensityOperator:
    """G G^dagger / trace with G a dim x rank Gaussian matrix."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ParameterError(f"rank {rank} must lie in [1, {dim}]")
    g = _ginibre(np.random.default_rng(seed), dim, rank)
    m = g @ g.conj().T
    return DensityOperator(m / np.real(np.trace(m)))


def random_psd(dim: int, rank: Optional[int] = None, seed: int = 0, scale: float = 1.0) -> HermitianOperator:
    """PSD operator with trace ``scale`` and the requested rank."""
    rho = random_density(dim, rank, seed)
    return HermitianOperator(scale * rho.matrix)


def random_test(dim: int, seed: int) -> TestOperator:
    """Random eigenbasis with eigenvalues squashed into [0, 1] by a logistic map."""
    rng = np.random.default_rng(seed)
    g = _ginibre(rng, dim, dim)
    w, v = _eigh(0.5 * (g + g.conj().T))
    return TestOperator(_from_spectrum(expit(2.0 * w), v))


def random_channel(dim_in: int, dim_out: int, n_kraus: int, seed: int) -> KrausChannel:
    """
    Random CPTP map from an isometry.

    A stacked (n_kraus * dim_out) x dim_in Gaussian block is orthonormalized
    into an isometry V and sliced row-wise into Kraus operators, so that
    sum_k K_k^dagger K_k = V^dagger V = I.
    """
    if n_kraus * dim_out < dim_in:
        raise ParameterError(
            f"n_kraus * dim_out = {n_kraus * dim_out} < dim_in = {dim_in}: no isometry exists"
        )
    g = _ginibre(np.random.default_rng(seed), n_kraus * dim_out, dim_in)
    v, _ = scipy.linalg.qr(g, mode="economic")
    kraus = tuple(v[k * dim_out:(k + 1) * dim_out, :] for k in range(n_kraus))
    return KrausChannel(dim_in, dim_out, kraus)


def embed_blocks(blocks: List[np.ndarray]) -> np.ndarray:
    """Block-diagonal matrix sum_x |x><x| (x) block_x."""
    return scipy.linalg.block_diag(*blocks).astype(complex)
