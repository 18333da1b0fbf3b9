import logging
from dataclasses import dataclass, field
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from ..utils.settings import get_settings
from .errors import DimensionMismatch, IncompleteChannel, NotSquare
from .hermitian import ComplexMatrix, DensityMatrix, as_complex_matrix, validate_density

logger = logging.getLogger(__name__)

NONZERO_TOL = 1e-12
BRANCH_ROUNDING = 1e-13


@dataclass(frozen=True)
class KrausChannel:
    """
    A validated channel ρ ↦ Σ_n K_n ρ K_n†.

    `incoherent` is set by validate_channel from the structural criterion:
    every operator has at most one entry above 1e-12 in each column.
    """

    dim: int
    operators: Tuple[ComplexMatrix, ...]
    incoherent: bool

    def __len__(self) -> int:
        return len(self.operators)


def _is_structurally_incoherent(k: ComplexMatrix) -> bool:
    nonzero = np.abs(k) > NONZERO_TOL
    return bool(np.all(nonzero.sum(axis=0) <= 1))


def validate_channel(ops: Sequence, tol: float = 1e-8) -> KrausChannel:
    """
    Validate Kraus operators and classify the channel.

    Parameters
    ----------
    ops : sequence of array_like
        Non-empty list of equal-dimension square matrices
    tol : float
        Largest accepted entry of |Σ K_n†K_n - I|

    Returns
    -------
    KrausChannel
        The channel, with the incoherent flag set

    Raises
    ------
    IncompleteChannel
        If the completeness residual exceeds tol or the list is empty
    DimensionMismatch
        If the operators differ in dimension
    """
    if len(ops) == 0:
        raise IncompleteChannel("a channel needs at least one Kraus operator")

    operators = [as_complex_matrix(k) for k in ops]
    dim = operators[0].shape[0]
    for n, k in enumerate(operators):
        if k.shape[0] != dim:
            raise DimensionMismatch(
                f"operator {n} is {k.shape[0]}×{k.shape[0]}, expected {dim}×{dim}"
            )

    completeness = sum(k.conj().T @ k for k in operators)
    residual = float(np.max(np.abs(completeness - np.eye(dim))))
    if residual > tol:
        raise IncompleteChannel(f"max |Σ K†K - I| = {residual:.3e} exceeds {tol:.1e}")

    incoherent = all(_is_structurally_incoherent(k) for k in operators)
    if not incoherent:
        logger.warning(
            "Channel has an operator with more than one nonzero entry in a column; "
            "flagged coherent"
        )

    for k in operators:
        k.setflags(write=False)
    return KrausChannel(dim, tuple(operators), incoherent)


def _check_dims(channel: KrausChannel, rho: DensityMatrix) -> None:
    if channel.dim != rho.dim:
        raise DimensionMismatch(
            f"channel acts on d={channel.dim}, state has d={rho.dim}"
        )


def apply_channel(channel: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """Σ_n K_n ρ K_n†, revalidated as a state."""
    _check_dims(channel, rho)
    out = sum(k @ rho.entries @ k.conj().T for k in channel.operators)
    return validate_density(out)


@dataclass(frozen=True)
class SelectiveOutcome:
    index: int
    probability: float
    state: DensityMatrix


@dataclass(frozen=True)
class SelectiveOutcomes:
    """
    The retained outcomes of a selective measurement.

    Behaves as a sequence of SelectiveOutcome; `omitted` lists the
    (index, probability) pairs that fell below the probability floor.
    """

    outcomes: Tuple[SelectiveOutcome, ...]
    omitted: Tuple[Tuple[int, float], ...] = field(default=())

    def __iter__(self) -> Iterator[SelectiveOutcome]:
        return iter(self.outcomes)

    def __len__(self) -> int:
        return len(self.outcomes)

    def __getitem__(self, i: int) -> SelectiveOutcome:
        return self.outcomes[i]

    @property
    def probabilities(self) -> List[float]:
        return [o.probability for o in self.outcomes]

    def diagnostics(self) -> dict:
        return {f"omitted_p{index}": p for index, p in self.omitted}


def selective_outcomes(
    channel: KrausChannel, rho: DensityMatrix, p_floor: float = 1e-12
) -> SelectiveOutcomes:
    """
    Post-measurement states ρ_n = K_n ρ K_n† / p_n with p_n = Tr(K_n ρ K_n†).

    Parameters
    ----------
    channel : KrausChannel
        Channel whose operators label the outcomes
    rho : DensityMatrix
        Input state
    p_floor : float
        Outcomes with p_n below this are omitted

    Returns
    -------
    SelectiveOutcomes
        Retained outcomes in operator order
    """
    _check_dims(channel, rho)
    validation_tol = get_settings().validation_tol
    kept: List[SelectiveOutcome] = []
    omitted: List[Tuple[int, float]] = []
    for n, k in enumerate(channel.operators):
        branch = k @ rho.entries @ k.conj().T
        branch = 0.5 * (branch + branch.conj().T)
        p = float(np.trace(branch).real)
        if p < p_floor:
            omitted.append((n, max(p, 0.0)))
            continue
        # branch rounding is absolute; the state tolerance scales with 1/p
        tol = max(validation_tol, BRANCH_ROUNDING / p)
        kept.append(SelectiveOutcome(n, p, validate_density(branch / p, tol=tol)))

    if omitted:
        logger.debug(f"Omitted {len(omitted)} outcomes below p={p_floor:.1e}")
    return SelectiveOutcomes(tuple(kept), tuple(omitted))


def identity_channel(dim: int) -> KrausChannel:
    return validate_channel([np.eye(dim)])


def dephasing_channel(dim: int) -> KrausChannel:
    """The complete dephasing channel with operators |i⟩⟨i|."""
    operators = []
    for i in range(dim):
        k = np.zeros((dim, dim), dtype=np.complex128)
        k[i, i] = 1.0
        operators.append(k)
    return validate_channel(operators)


def permutation_channel(perm: Sequence[int]) -> KrausChannel:
    """
    Relabel basis states: |j⟩ ↦ |perm[j]⟩.

    Raises
    ------
    NotSquare
        If perm is not a permutation of 0..d-1
    """
    perm = [int(p) for p in perm]
    dim = len(perm)
    if sorted(perm) != list(range(dim)):
        raise NotSquare(f"{perm} is not a permutation of 0..{dim - 1}")
    k = np.zeros((dim, dim), dtype=np.complex128)
    k[perm, list(range(dim))] = 1.0
    return validate_channel([k])
