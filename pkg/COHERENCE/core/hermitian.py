import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from ..utils.settings import get_settings
from .errors import (
    AlphaOutOfRange,
    ConvergenceFailure,
    DimensionTooSmall,
    NotFinite,
    NotHermitian,
    NotPositive,
    NotSquare,
    TraceNotOne,
)

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]
RealVector = npt.NDArray[np.float64]

HERMITIAN_TOL = 1e-12
SIMPLEX_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order with orthonormal eigenvector columns."""

    eigenvalues: RealVector
    eigenvectors: ComplexMatrix

    def apply(self, values: RealVector) -> ComplexMatrix:
        """Return V diag(values) V† for values aligned with the eigenvalues."""
        v = self.eigenvectors
        return (v * values) @ v.conj().T

    def map(self, fn: Callable[[RealVector], RealVector]) -> ComplexMatrix:
        return self.apply(fn(self.eigenvalues))

    def reconstruct(self) -> ComplexMatrix:
        return self.apply(self.eigenvalues)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    A validated quantum state.

    Instances come from validate_density, incoherent_state or the other
    constructors in this module; the spectrum is computed once at
    construction and the entries array is read-only.
    """

    entries: ComplexMatrix
    spectrum: Spectrum

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @property
    def diagonal(self) -> RealVector:
        return np.real(np.diag(self.entries)).copy()

    def offdiagonal_mass(self) -> float:
        """Frobenius norm of the off-diagonal part."""
        off = self.entries - np.diag(np.diag(self.entries))
        return float(np.linalg.norm(off))

    def is_incoherent(self, tol: float = 1e-9) -> bool:
        return self.offdiagonal_mass() <= tol


def as_complex_matrix(m) -> ComplexMatrix:
    """
    Coerce array-like input to a square complex matrix.

    Parameters
    ----------
    m : array_like
        Nested sequence or array

    Returns
    -------
    ComplexMatrix
        A fresh complex128 array

    Raises
    ------
    NotSquare
        If the input is not a non-empty d×d array
    NotFinite
        If an entry is NaN or infinite
    """
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise NotSquare(f"expected a non-empty d×d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotFinite(f"{int(np.count_nonzero(~np.isfinite(a)))} non-finite entries")
    return a


def _offdiagonal_norm(a: ComplexMatrix) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _rotate(a: ComplexMatrix, v: ComplexMatrix, p: int, q: int) -> None:
    """Annihilate a[p, q] with a unitary rotation in the (p, q) plane."""
    apq = a[p, q]
    magnitude = abs(apq)
    if magnitude == 0.0:
        return

    conj_phase = np.conj(apq) / magnitude
    theta = (a[q, q].real - a[p, p].real) / (2.0 * magnitude)
    if abs(theta) > 1e150:
        t = 1.0 / (2.0 * theta)
    else:
        sign = 1.0 if theta >= 0.0 else -1.0
        t = sign / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c

    rotation = np.array([[c, s], [-s * conj_phase, c * conj_phase]])
    idx = [p, q]
    a[:, idx] = a[:, idx] @ rotation
    a[idx, :] = rotation.conj().T @ a[idx, :]
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    v[:, idx] = v[:, idx] @ rotation


def jacobi_eigh(
    matrix, threshold: float = 1e-12, max_sweeps: int = 100
) -> Spectrum:
    """
    Diagonalize a Hermitian matrix with cyclic complex Jacobi rotations.

    Parameters
    ----------
    matrix : array_like
        Hermitian d×d matrix (left unmodified)
    threshold : float
        Off-diagonal Frobenius norm at which the sweeps stop, relative to
        max(1, ||matrix||_F)
    max_sweeps : int
        Sweep budget

    Returns
    -------
    Spectrum
        Eigenvalues in descending order and the matching eigenvectors

    Raises
    ------
    ConvergenceFailure
        If the off-diagonal norm is still above threshold after max_sweeps
    """
    a = as_complex_matrix(matrix)
    d = a.shape[0]
    v = np.eye(d, dtype=np.complex128)
    target = threshold * max(1.0, float(np.linalg.norm(a)))

    sweeps = 0
    off = _offdiagonal_norm(a)
    while off > target:
        if sweeps >= max_sweeps:
            raise ConvergenceFailure(
                f"off-diagonal norm {off:.3e} above {target:.3e} after {sweeps} sweeps"
            )
        for p in range(d - 1):
            for q in range(p + 1, d):
                _rotate(a, v, p, q)
        sweeps += 1
        off = _offdiagonal_norm(a)

    logger.debug(f"Jacobi converged in {sweeps} sweeps for d={d}")
    eigenvalues = np.real(np.diag(a)).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return Spectrum(eigenvalues[order], v[:, order])


def _lapack_eigh(matrix) -> Spectrum:
    eigenvalues, eigenvectors = np.linalg.eigh(as_complex_matrix(matrix))
    order = np.argsort(-eigenvalues, kind="stable")
    return Spectrum(eigenvalues[order].copy(), eigenvectors[:, order].copy())


def hermitian_eigh(matrix) -> Spectrum:
    """Diagonalize with the configured eigen solver."""
    settings = get_settings()
    if settings.eigen_solver == "lapack":
        return _lapack_eigh(matrix)
    return jacobi_eigh(
        matrix,
        threshold=settings.jacobi_threshold,
        max_sweeps=settings.jacobi_max_sweeps,
    )


def _freeze(a: ComplexMatrix) -> ComplexMatrix:
    a.setflags(write=False)
    return a


def validate_density(m, tol: Optional[float] = None) -> DensityMatrix:
    """
    Validate a candidate density matrix.

    Parameters
    ----------
    m : array_like
        Square complex matrix
    tol : float, optional
        Tolerance for the trace and for negative eigenvalues (default:
        the configured validation tolerance)

    Returns
    -------
    DensityMatrix
        The state, renormalized to unit trace, with eigenvalues in
        [-tol, cutoff] set to zero

    Raises
    ------
    NotSquare, NotFinite, NotHermitian, TraceNotOne, NotPositive
        If the corresponding invariant fails
    """
    settings = get_settings()
    tol = settings.validation_tol if tol is None else tol
    a = as_complex_matrix(m)

    hermitian_error = float(np.max(np.abs(a - a.conj().T)))
    if hermitian_error > HERMITIAN_TOL:
        raise NotHermitian(f"max |m - m†| = {hermitian_error:.3e}")
    a = 0.5 * (a + a.conj().T)

    trace = complex(np.trace(a))
    if abs(trace.imag) > HERMITIAN_TOL or abs(trace.real - 1.0) > tol:
        raise TraceNotOne(f"trace = {trace.real:.12g}{trace.imag:+.3e}j")

    spectrum = hermitian_eigh(a)
    eigenvalues = spectrum.eigenvalues
    smallest = float(eigenvalues[-1])
    if smallest < -tol:
        raise NotPositive(f"eigenvalue {smallest:.3e} below -{tol:.1e}")

    clamped = np.where(eigenvalues <= settings.zero_eigenvalue_cutoff, 0.0, eigenvalues)
    if np.any(clamped != eigenvalues):
        clamped = clamped / clamped.sum()
        spectrum = Spectrum(clamped, spectrum.eigenvectors)
        rebuilt = spectrum.reconstruct()
        a = 0.5 * (rebuilt + rebuilt.conj().T)
    elif trace.real != 1.0:
        a = a / trace.real
        spectrum = Spectrum(eigenvalues / trace.real, spectrum.eigenvectors)

    spectrum.eigenvalues.setflags(write=False)
    spectrum.eigenvectors.setflags(write=False)
    return DensityMatrix(_freeze(a), spectrum)


def incoherent_state(weights: Sequence[float]) -> DensityMatrix:
    """
    Build the diagonal state Σ q_i |i⟩⟨i| without an eigensolve.

    Raises
    ------
    NotFinite
        If a weight is NaN or infinite
    NotPositive
        If a weight is negative
    TraceNotOne
        If the weights do not sum to 1 within 1e-10
    """
    q = np.asarray(weights, dtype=np.float64).copy()
    if q.ndim != 1 or q.size < 1:
        raise NotSquare(f"expected a non-empty weight vector, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise NotFinite("weights must be finite")
    if np.any(q < 0.0):
        raise NotPositive(f"negative weight {float(q.min()):.3e}")
    total = float(q.sum())
    if abs(total - 1.0) > SIMPLEX_TOL:
        raise TraceNotOne(f"weights sum to {total:.12g}")

    order = np.argsort(-q, kind="stable")
    eigenvectors = np.eye(q.size, dtype=np.complex128)[:, order]
    spectrum = Spectrum(q[order], eigenvectors)
    spectrum.eigenvalues.setflags(write=False)
    spectrum.eigenvectors.setflags(write=False)
    return DensityMatrix(_freeze(np.diag(q).astype(np.complex128)), spectrum)


def pure_state(vector: Sequence[complex]) -> DensityMatrix:
    """|ψ⟩⟨ψ| for the normalized vector."""
    psi = np.asarray(vector, dtype=np.complex128)
    psi = psi / np.linalg.norm(psi)
    return validate_density(np.outer(psi, psi.conj()))


def maximally_coherent_state(dim: int) -> DensityMatrix:
    return pure_state(np.ones(dim))


def block_diagonal(blocks: Sequence[Tuple[float, DensityMatrix]]) -> DensityMatrix:
    """
    Direct sum p_1 ρ_1 ⊕ p_2 ρ_2 ⊕ ... in the incoherent basis.

    Parameters
    ----------
    blocks : sequence of (float, DensityMatrix)
        Weights on the simplex and the states on each subspace

    Returns
    -------
    DensityMatrix
        The block-diagonal state
    """
    size = sum(state.dim for _, state in blocks)
    out = np.zeros((size, size), dtype=np.complex128)
    offset = 0
    for weight, state in blocks:
        end = offset + state.dim
        out[offset:end, offset:end] = weight * state.entries
        offset = end
    return validate_density(out)


def eigh(rho: DensityMatrix) -> Spectrum:
    """Eigendecomposition of a validated state (computed at construction)."""
    return rho.spectrum


def matrix_power(rho: DensityMatrix, alpha: float) -> ComplexMatrix:
    """
    ρ^α through the spectrum, with 0^α = 0.

    Raises
    ------
    AlphaOutOfRange
        If alpha is not positive
    """
    if not alpha > 0.0:
        raise AlphaOutOfRange(f"matrix power needs alpha > 0, got {alpha}")
    return rho.spectrum.map(lambda lam: np.power(lam, alpha))


def purity(rho: DensityMatrix) -> float:
    """Tr(ρ²)."""
    return float(np.sum(np.abs(rho.entries) ** 2))


def mixedness(rho: DensityMatrix) -> float:
    """
    Normalized linear entropy (d/(d-1))(1 - Tr ρ²).

    Raises
    ------
    DimensionTooSmall
        For d = 1
    """
    d = rho.dim
    if d < 2:
        raise DimensionTooSmall("mixedness needs d >= 2")
    return d / (d - 1) * (1.0 - purity(rho))
