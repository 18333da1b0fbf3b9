import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

import numpy as np

from ..utils.settings import get_settings
from .errors import (
    AlphaOutOfRange,
    BudgetExhausted,
    DegenerateState,
    DimensionMismatch,
    DimensionTooLarge,
)
from .hermitian import (
    DensityMatrix,
    RealVector,
    incoherent_state,
    matrix_power,
    purity,
)
from .sampling import make_generator
from .simplex import MomentObjective, minimize_on_simplex

logger = logging.getLogger(__name__)

ALPHA_MAX = 2.0
BRUTEFORCE_MAX_DIM = 8
SUPPORT_LEAK_TOL = 1e-12
MOMENT_SUPPORT = 1e-24


class Method(str, Enum):
    CLOSED_FORM = "closed_form"
    BRUTE_FORCE = "brute_force"
    LIMIT_ALPHA_1 = "limit_alpha_1"


@dataclass(frozen=True)
class SimplexPoint:
    """The weights q_i of an incoherent state Σ q_i |i⟩⟨i|."""

    weights: RealVector

    def as_state(self) -> DensityMatrix:
        return incoherent_state(self.weights)


@dataclass(frozen=True)
class CoherenceReport:
    value: float
    alpha: float
    optimizer: DensityMatrix
    method: Method
    diagnostics: Dict[str, float] = field(default_factory=dict)

    @property
    def optimizer_weights(self) -> RealVector:
        return self.optimizer.diagonal

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "alpha": self.alpha,
            "method": self.method.value,
            "optimizer_weights": [float(w) for w in self.optimizer_weights],
            "diagnostics": dict(self.diagnostics),
        }


def check_alpha(alpha: float) -> float:
    """
    Accept α in (0, 1) ∪ (1, 2].

    Raises
    ------
    AlphaOutOfRange
        For α ≤ 0, α = 1, α > 2 or a non-finite α
    """
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 0.0 or alpha > ALPHA_MAX:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1) ∪ (1, 2], got {alpha}")
    if alpha == 1.0:
        raise AlphaOutOfRange(
            "alpha = 1 is excluded; use the relative entropy of coherence instead"
        )
    return alpha


def _check_same_dim(rho: DensityMatrix, delta: DensityMatrix) -> None:
    if rho.dim != delta.dim:
        raise DimensionMismatch(f"states have d={rho.dim} and d={delta.dim}")


def renyi_relative_entropy(
    rho: DensityMatrix, delta: DensityMatrix, alpha: float
) -> float:
    """
    S_α(ρ‖δ) = log2 Tr(ρ^α δ^{1-α}) / (α - 1).

    For α > 1, δ^{1-α} is taken on the support of δ; the result is +inf
    when ρ has weight outside that support.

    Parameters
    ----------
    rho : DensityMatrix
        First argument
    delta : DensityMatrix
        Second argument
    alpha : float
        Order in (0, 1) ∪ (1, 2]

    Returns
    -------
    float
        The divergence in bits, possibly math.inf
    """
    alpha = check_alpha(alpha)
    _check_same_dim(rho, delta)

    lam = delta.spectrum.eigenvalues
    support = lam > 0.0
    if alpha > 1.0:
        kernel = delta.spectrum.eigenvectors[:, ~support]
        if kernel.shape[1] > 0:
            leak = float(np.real(np.trace(kernel.conj().T @ rho.entries @ kernel)))
            if leak > SUPPORT_LEAK_TOL:
                return math.inf

    safe = np.where(support, lam, 1.0)
    delta_power = delta.spectrum.apply(np.where(support, safe ** (1.0 - alpha), 0.0))
    trace = float(np.real(np.trace(matrix_power(rho, alpha) @ delta_power)))
    if trace <= 0.0:
        return math.inf
    return math.log2(trace) / (alpha - 1.0)


def diagonal_moments(rho: DensityMatrix, alpha: float) -> RealVector:
    """m_i = ⟨i|ρ^α|i⟩, clipped at zero."""
    moments = np.real(np.diag(matrix_power(rho, alpha)))
    return np.maximum(moments, 0.0)


def _optimal_weights(moments: RealVector, alpha: float) -> RealVector:
    roots = np.power(moments, 1.0 / alpha)
    total = float(roots.sum())
    if not total > 0.0:
        raise DegenerateState("all diagonal moments vanish")
    return roots / total


def optimal_incoherent_state(rho: DensityMatrix, alpha: float) -> SimplexPoint:
    """
    The minimizing δ of S_α(ρ‖δ): q_i ∝ m_i^{1/α}.

    Raises
    ------
    AlphaOutOfRange
        If alpha is outside (0, 1) ∪ (1, 2]
    DegenerateState
        If every moment is zero
    """
    alpha = check_alpha(alpha)
    return SimplexPoint(_optimal_weights(diagonal_moments(rho, alpha), alpha))


def _renyi_from_moments(moments: RealVector, alpha: float) -> float:
    total = float(np.sum(np.power(moments, 1.0 / alpha)))
    return alpha / (alpha - 1.0) * math.log2(total)


def _tsallis_from_moments(moments: RealVector, alpha: float) -> float:
    total = float(np.sum(np.power(moments, 1.0 / alpha)))
    return (total**alpha - 1.0) / (alpha - 1.0)


def _closed_form_report(rho: DensityMatrix, alpha: float, kind: str) -> CoherenceReport:
    alpha = check_alpha(alpha)
    moments = diagonal_moments(rho, alpha)
    weights = _optimal_weights(moments, alpha)
    if kind == "tsallis":
        value = _tsallis_from_moments(moments, alpha)
    else:
        value = _renyi_from_moments(moments, alpha)
    # the closed form is exactly zero on incoherent states
    if rho.is_incoherent(tol=0.0):
        value = 0.0
    return CoherenceReport(
        value=value,
        alpha=alpha,
        optimizer=incoherent_state(weights),
        method=Method.CLOSED_FORM,
        diagnostics={"moment_sum": float(moments.sum())},
    )


def renyi_coherence(rho: DensityMatrix, alpha: float) -> CoherenceReport:
    """
    Closed-form Rényi α-relative entropy of coherence.

    Parameters
    ----------
    rho : DensityMatrix
        The state
    alpha : float
        Order in (0, 1) ∪ (1, 2]

    Returns
    -------
    CoherenceReport
        (α/(α-1)) log2 Σ_i m_i^{1/α} in bits with the optimal incoherent state
    """
    return _closed_form_report(rho, alpha, "renyi")


def tsallis_coherence(rho: DensityMatrix, alpha: float) -> CoherenceReport:
    """((Σ_i m_i^{1/α})^α - 1) / (α - 1), sharing the Rényi optimizer."""
    return _closed_form_report(rho, alpha, "tsallis")


def _bruteforce(
    rho: DensityMatrix,
    alpha: float,
    kind: str,
    budget: Optional[int],
    restarts: Optional[int],
    seed: int,
) -> CoherenceReport:
    alpha = check_alpha(alpha)
    if rho.dim > BRUTEFORCE_MAX_DIM:
        raise DimensionTooLarge(
            f"brute force is limited to d <= {BRUTEFORCE_MAX_DIM}, got {rho.dim}"
        )
    settings = get_settings()
    budget = settings.bruteforce_budget if budget is None else budget
    restarts = settings.bruteforce_restarts if restarts is None else restarts

    moments = diagonal_moments(rho, alpha)
    peak = float(moments.max())
    if not peak > 0.0:
        raise DegenerateState("all diagonal moments vanish")
    support = moments > MOMENT_SUPPORT * peak
    reduced = moments[support]
    size = int(support.sum())

    objective = MomentObjective(reduced, alpha, kind)
    if size == 1:
        return CoherenceReport(
            value=objective.value(np.ones(1)),
            alpha=alpha,
            optimizer=incoherent_state(support.astype(np.float64)),
            method=Method.BRUTE_FORCE,
            diagnostics={"restarts": 0.0, "iterations": 0.0, "step_norm": 0.0},
        )

    rng = make_generator(seed, 3, rho.dim)
    starts = [np.full(size, 1.0 / size)]
    starts += [rng.dirichlet(np.ones(size)) for _ in range(restarts)]

    best = None
    converged = 0
    iterations = 0
    for start in starts:
        run = minimize_on_simplex(objective, np.maximum(start, 1e-12), budget)
        iterations += run.iterations
        if not run.converged:
            continue
        converged += 1
        if best is None or run.value < best.value:
            best = run

    if best is None:
        raise BudgetExhausted(
            f"no restart converged within {budget} iterations (d={rho.dim}, alpha={alpha})"
        )
    logger.debug(
        f"Brute force: {converged}/{len(starts)} restarts converged, "
        f"{iterations} iterations, value {best.value:.12g}"
    )

    weights = np.zeros(rho.dim)
    weights[support] = best.weights
    return CoherenceReport(
        value=best.value,
        alpha=alpha,
        optimizer=incoherent_state(weights / weights.sum()),
        method=Method.BRUTE_FORCE,
        diagnostics={
            "restarts": float(converged),
            "iterations": float(iterations),
            "step_norm": best.step_norm,
        },
    )


def renyi_coherence_bruteforce(
    rho: DensityMatrix,
    alpha: float,
    budget: Optional[int] = None,
    restarts: Optional[int] = None,
    seed: int = 0,
) -> CoherenceReport:
    """
    Minimize log2(Σ_i q_i^{1-α} m_i)/(α - 1) over the simplex directly.

    Runs the projected-gradient search from the uniform point and from
    `restarts` Dirichlet(1) points and keeps the best converged run.

    Parameters
    ----------
    rho : DensityMatrix
        State with d <= 8
    alpha : float
        Order in (0, 1) ∪ (1, 2]
    budget : int, optional
        Iteration budget per run (default: configured, 10⁵)
    restarts : int, optional
        Number of random restarts (default: configured, 20)
    seed : int
        Seed of the restart points

    Returns
    -------
    CoherenceReport
        method = brute_force

    Raises
    ------
    DimensionTooLarge
        If d > 8
    BudgetExhausted
        If no run reaches a scaled step below 1e-10
    """
    return _bruteforce(rho, alpha, "renyi", budget, restarts, seed)


def tsallis_coherence_bruteforce(
    rho: DensityMatrix,
    alpha: float,
    budget: Optional[int] = None,
    restarts: Optional[int] = None,
    seed: int = 0,
) -> CoherenceReport:
    """Simplex search for the Tsallis objective (Σ_i q_i^{1-α} m_i - 1)/(α - 1)."""
    return _bruteforce(rho, alpha, "tsallis", budget, restarts, seed)


def shannon_entropy(p: RealVector) -> float:
    """Entropy in bits with 0·log 0 = 0."""
    p = np.asarray(p, dtype=np.float64)
    p = p[p > 0.0]
    return float(-np.sum(p * np.log2(p)))


def relative_entropy_coherence(rho: DensityMatrix) -> CoherenceReport:
    """H(diag ρ) - H(λ(ρ)) in bits; the optimizer is diag ρ."""
    diagonal = np.maximum(rho.diagonal, 0.0)
    diagonal = diagonal / diagonal.sum()
    value = shannon_entropy(diagonal) - shannon_entropy(rho.spectrum.eigenvalues)
    if rho.is_incoherent(tol=0.0):
        value = 0.0
    return CoherenceReport(
        value=value,
        alpha=1.0,
        optimizer=incoherent_state(diagonal),
        method=Method.LIMIT_ALPHA_1,
    )


def coherence_upper_bound(rho: DensityMatrix) -> float:
    """log2 d + log2 Tr(ρ²)."""
    return math.log2(rho.dim) + math.log2(purity(rho))
