import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..utils.settings import get_settings
from .channels import KrausChannel, apply_channel, selective_outcomes
from .counterexample import counterexample_channel, counterexample_state
from .errors import DimensionMismatch, DimensionTooLarge, DimensionTooSmall, NotIncoherent
from .hermitian import DensityMatrix, block_diagonal, mixedness, validate_density
from .measures import (
    check_alpha,
    coherence_upper_bound,
    optimal_incoherent_state,
    renyi_coherence,
)
from .progress_reporter import ProgressReporter
from .sampling import (
    RNG_ALGORITHM,
    SamplerConfig,
    make_generator,
    random_density,
    random_ensemble,
    random_incoherent_channel,
)

logger = logging.getLogger(__name__)

INCOHERENT_MASS_TOL = 1e-9
AUDIT_MAX_DIM = 8
FAMILIES = ("random", "counterexample")

DEFAULT_AUDIT_ALPHA_GRID: Tuple[float, ...] = tuple(
    float(a)
    for a in np.concatenate([np.geomspace(0.05, 0.95, 20), np.geomspace(1.05, 2.0, 20)])
)


class Condition(str, Enum):
    C1 = "C1"
    C2a = "C2a"
    C2b = "C2b"
    C3 = "C3"
    B3 = "B3"
    ExtC2b = "ExtC2b"
    PurityBound = "PurityBound"
    MixednessTradeoff = "MixednessTradeoff"

    @classmethod
    def parse(cls, name: str) -> "Condition":
        for condition in cls:
            if condition.value.lower() == name.strip().lower():
                return condition
        raise ValueError(
            f"Unknown condition {name!r}. Supported: {', '.join(c.value for c in cls)}"
        )


@dataclass(frozen=True)
class ConditionVerdict:
    """
    Outcome of one axiom check.

    margin is rhs - lhs for inequality conditions (lhs ≤ rhs holds), -|lhs - rhs|
    for the B3 equality; violated iff margin < -tolerance.
    """

    condition: Condition
    alpha: float
    lhs: float
    rhs: float
    margin: float
    violated: bool
    witness: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "condition": self.condition.value,
            "alpha": self.alpha,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "violated": self.violated,
            "witness": self.witness,
        }


def _verdict(
    condition: Condition,
    alpha: float,
    lhs: float,
    rhs: float,
    margin: float,
    witness: Dict[str, Any],
    tol: Optional[float],
) -> ConditionVerdict:
    tol = get_settings().violation_tol if tol is None else tol
    return ConditionVerdict(
        condition=condition,
        alpha=alpha,
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        violated=margin < -tol,
        witness=witness,
    )


def _require_incoherent(channel: KrausChannel, condition: Condition) -> None:
    if not channel.incoherent:
        raise NotIncoherent(f"{condition.value} needs an incoherent channel")


def check_c1(
    rho: DensityMatrix, alpha: float, tol: Optional[float] = None
) -> ConditionVerdict:
    """
    Nonnegativity and faithfulness.

    margin = -|C| when ρ is incoherent (C must vanish), C otherwise
    (C must not be negative).
    """
    value = renyi_coherence(rho, alpha).value
    mass = rho.offdiagonal_mass()
    incoherent = mass <= INCOHERENT_MASS_TOL
    margin = -abs(value) if incoherent else value
    witness = {"offdiagonal_mass": mass, "incoherent": incoherent}
    return _verdict(Condition.C1, alpha, value, 0.0, margin, witness, tol)


def check_c2a(
    rho: DensityMatrix,
    channel: KrausChannel,
    alpha: float,
    tol: Optional[float] = None,
) -> ConditionVerdict:
    """C(Φ(ρ)) ≤ C(ρ) for an incoherent channel Φ."""
    _require_incoherent(channel, Condition.C2a)
    alpha = check_alpha(alpha)
    lhs = renyi_coherence(apply_channel(channel, rho), alpha).value
    rhs = renyi_coherence(rho, alpha).value
    return _verdict(Condition.C2a, alpha, lhs, rhs, rhs - lhs, {}, tol)


def check_c2b(
    rho: DensityMatrix,
    channel: KrausChannel,
    alpha: float,
    tol: Optional[float] = None,
) -> ConditionVerdict:
    """
    Subselection monotonicity Σ_n p_n C(ρ_n) ≤ C(ρ).

    Parameters
    ----------
    rho : DensityMatrix
        Input state
    channel : KrausChannel
        Incoherent channel whose operators label the outcomes
    alpha : float
        Order in (0, 1) ∪ (1, 2]
    tol : float, optional
        Violation tolerance (default: configured)

    Returns
    -------
    ConditionVerdict
        witness holds p_n and C(ρ_n) for every retained outcome

    Raises
    ------
    NotIncoherent
        If the channel is flagged coherent
    """
    _require_incoherent(channel, Condition.C2b)
    alpha = check_alpha(alpha)
    outcomes = selective_outcomes(channel, rho)
    values = [renyi_coherence(o.state, alpha).value for o in outcomes]
    lhs = float(sum(o.probability * c for o, c in zip(outcomes, values)))
    rhs = renyi_coherence(rho, alpha).value
    witness = {
        "outcomes": [o.index for o in outcomes],
        "p": outcomes.probabilities,
        "coherence": values,
        **outcomes.diagnostics(),
    }
    return _verdict(Condition.C2b, alpha, lhs, rhs, rhs - lhs, witness, tol)


def check_c3(
    ensemble: Sequence[Tuple[float, DensityMatrix]],
    alpha: float,
    tol: Optional[float] = None,
) -> ConditionVerdict:
    """
    Convexity C(Σ p_i ρ_i) ≤ Σ p_i C(ρ_i).

    A violation for α < 1 is logged as an error, for α > 1 as a finding.
    """
    alpha = check_alpha(alpha)
    dims = {state.dim for _, state in ensemble}
    if len(dims) != 1:
        raise DimensionMismatch(f"ensemble mixes dimensions {sorted(dims)}")

    mixture = validate_density(sum(p * state.entries for p, state in ensemble))
    lhs = renyi_coherence(mixture, alpha).value
    rhs = float(sum(p * renyi_coherence(state, alpha).value for p, state in ensemble))
    witness = {"weights": [float(p) for p, _ in ensemble]}
    verdict = _verdict(Condition.C3, alpha, lhs, rhs, rhs - lhs, witness, tol)
    if verdict.violated:
        if alpha < 1.0:
            logger.error(f"Convexity violated at alpha={alpha}: margin {verdict.margin:.3e}")
        else:
            logger.info(f"Convexity finding at alpha={alpha}: margin {verdict.margin:.3e}")
    return verdict


def check_b3(
    rho1: DensityMatrix,
    rho2: DensityMatrix,
    p1: float,
    alpha: float,
    tol: Optional[float] = None,
) -> ConditionVerdict:
    """Additivity C(p₁ρ₁ ⊕ p₂ρ₂) = p₁C(ρ₁) + p₂C(ρ₂) on block-diagonal states."""
    alpha = check_alpha(alpha)
    if not 0.0 <= p1 <= 1.0:
        raise ValueError(f"p1 must lie in [0, 1], got {p1}")
    p2 = 1.0 - p1
    joined = block_diagonal([(p1, rho1), (p2, rho2)])
    lhs = renyi_coherence(joined, alpha).value
    rhs = p1 * renyi_coherence(rho1, alpha).value + p2 * renyi_coherence(rho2, alpha).value
    witness = {"p1": p1, "d1": rho1.dim, "d2": rho2.dim}
    return _verdict(Condition.B3, alpha, lhs, rhs, -abs(lhs - rhs), witness, tol)


def _weighted_term(p: float, q: float, alpha: float, value: float) -> float:
    if value == 0.0:
        return 0.0
    if q <= 0.0:
        return math.inf if alpha > 1.0 else 0.0
    return p**alpha * q ** (1.0 - alpha) * value


def check_extended_c2b(
    rho: DensityMatrix,
    channel: KrausChannel,
    alpha: float,
    sigma: Optional[DensityMatrix] = None,
    tol: Optional[float] = None,
) -> ConditionVerdict:
    """
    Σ_n p_n^α q_n^{1-α} C(ρ_n) ≤ C(ρ) with q_n = Tr(K_n σ K_n†).

    Parameters
    ----------
    rho : DensityMatrix
        Input state
    channel : KrausChannel
        Incoherent channel
    alpha : float
        Order in (0, 1) ∪ (1, 2]
    sigma : DensityMatrix, optional
        Reference incoherent state (default: the optimal one for ρ at α)
    tol : float, optional
        Violation tolerance (default: configured)

    Returns
    -------
    ConditionVerdict
        witness holds (p_n, q_n) per outcome
    """
    _require_incoherent(channel, Condition.ExtC2b)
    alpha = check_alpha(alpha)
    if sigma is None:
        sigma = optimal_incoherent_state(rho, alpha).as_state()
    elif sigma.dim != rho.dim:
        raise DimensionMismatch(f"sigma has d={sigma.dim}, state has d={rho.dim}")

    outcomes = selective_outcomes(channel, rho)
    q = [
        float(np.trace(k @ sigma.entries @ k.conj().T).real)
        for k in (channel.operators[o.index] for o in outcomes)
    ]
    values = [renyi_coherence(o.state, alpha).value for o in outcomes]
    lhs = float(
        sum(
            _weighted_term(o.probability, qn, alpha, c)
            for o, qn, c in zip(outcomes, q, values)
        )
    )
    rhs = renyi_coherence(rho, alpha).value
    witness = {
        "outcomes": [o.index for o in outcomes],
        "p": outcomes.probabilities,
        "q": q,
        "sigma": [float(w) for w in sigma.diagonal],
    }
    return _verdict(Condition.ExtC2b, alpha, lhs, rhs, rhs - lhs, witness, tol)


def check_purity_bound(
    rho: DensityMatrix, alpha: float, tol: Optional[float] = None
) -> ConditionVerdict:
    """C(ρ) ≤ log2 d + log2 Tr(ρ²)."""
    lhs = renyi_coherence(rho, alpha).value
    rhs = coherence_upper_bound(rho)
    return _verdict(Condition.PurityBound, alpha, lhs, rhs, rhs - lhs, {}, tol)


def check_mixedness_tradeoff(
    rho: DensityMatrix, alpha: float, tol: Optional[float] = None
) -> ConditionVerdict:
    """(ln 2/(d-1))·C(ρ) + M(ρ) ≤ 1."""
    if rho.dim < 2:
        raise DimensionTooSmall("the mixedness trade-off needs d >= 2")
    value = renyi_coherence(rho, alpha).value
    m = mixedness(rho)
    lhs = math.log(2.0) / (rho.dim - 1) * value + m
    witness = {"coherence": value, "mixedness": m}
    return _verdict(Condition.MixednessTradeoff, alpha, lhs, 1.0, 1.0 - lhs, witness, tol)


@dataclass(frozen=True)
class AuditTrial:
    """Everything one audit trial checks, drawn from (seed, trial)."""

    trial: int
    rho: DensityMatrix
    channel: KrausChannel
    ensemble: List[Tuple[float, DensityMatrix]]
    block: Tuple[DensityMatrix, DensityMatrix, float]
    params: Dict[str, Any]


def draw_trial(dimension: int, seed: int, trial: int, family: str = "random") -> AuditTrial:
    """
    Rebuild the inputs of one audit trial.

    The random family pairs a Ginibre state with a weighted partial
    permutation channel of 2..d operators. The counterexample family uses
    the three-level two-operator channel on its fixed state, with b = 1 at
    trial 0 and a random complex b afterwards.
    """
    rng = make_generator(seed, 4, trial)
    cfg = SamplerConfig(dim=dimension, seed=seed)
    params: Dict[str, Any] = {"trial": trial, "seed": seed, "family": family}

    if family == "counterexample":
        if trial == 0:
            b = 1.0 + 0.0j
        else:
            b = complex(np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()))
        a = math.sqrt(max(0.0, 1.0 - abs(b) ** 2))
        rho = counterexample_state()
        channel = counterexample_channel(a, b)
        params.update({"a": a, "b_re": b.real, "b_im": b.imag})
    else:
        rho = random_density(cfg, index=trial)
        n_ops = int(rng.integers(2, dimension + 1))
        channel_seed = int(rng.integers(0, 2**63))
        channel = random_incoherent_channel(dimension, n_ops, channel_seed)
        params.update({"n_ops": n_ops, "channel_seed": channel_seed})

    ensemble_seed = int(rng.integers(0, 2**63))
    ensemble = random_ensemble(rho.dim, 2, ensemble_seed)
    block = (
        random_density(cfg, index=2 * trial + 1_000_001),
        random_density(cfg, index=2 * trial + 1_000_002),
        float(rng.uniform()),
    )
    params["ensemble_seed"] = ensemble_seed
    return AuditTrial(trial, rho, channel, ensemble, block, params)


def _run_condition(
    condition: Condition, draw: AuditTrial, alpha: float
) -> ConditionVerdict:
    if condition == Condition.C1:
        return check_c1(draw.rho, alpha)
    if condition == Condition.C2a:
        return check_c2a(draw.rho, draw.channel, alpha)
    if condition == Condition.C2b:
        return check_c2b(draw.rho, draw.channel, alpha)
    if condition == Condition.C3:
        return check_c3(draw.ensemble, alpha)
    if condition == Condition.B3:
        rho1, rho2, p1 = draw.block
        return check_b3(rho1, rho2, p1, alpha)
    if condition == Condition.ExtC2b:
        return check_extended_c2b(draw.rho, draw.channel, alpha)
    if condition == Condition.PurityBound:
        return check_purity_bound(draw.rho, alpha)
    return check_mixedness_tradeoff(draw.rho, alpha)


def _audit_trial(
    dimension: int,
    seed: int,
    trial: int,
    family: str,
    alpha_grid: Sequence[float],
    conditions: Sequence[Condition],
) -> List[ConditionVerdict]:
    draw = draw_trial(dimension, seed, trial, family)
    verdicts = []
    for alpha in alpha_grid:
        for condition in conditions:
            verdict = _run_condition(condition, draw, alpha)
            witness = {**draw.params, "alpha": alpha, **verdict.witness}
            verdicts.append(
                ConditionVerdict(
                    condition=verdict.condition,
                    alpha=verdict.alpha,
                    lhs=verdict.lhs,
                    rhs=verdict.rhs,
                    margin=verdict.margin,
                    violated=verdict.violated,
                    witness=witness,
                )
            )
    return verdicts


def _order_key(verdict: ConditionVerdict) -> Tuple[bool, float]:
    if verdict.violated:
        return (False, -abs(verdict.margin))
    return (True, verdict.margin)


def audit_random(
    dimension: int,
    n_trials: int,
    alpha_grid: Optional[Sequence[float]] = None,
    seed: int = 0,
    family: str = "random",
    conditions: Optional[Sequence[Condition]] = None,
    workers: Optional[int] = None,
    progress_reporter: Optional[ProgressReporter] = None,
) -> List[ConditionVerdict]:
    """
    Check every condition on seeded random trials.

    Parameters
    ----------
    dimension : int
        Hilbert-space dimension in [2, 8] (3 for the counterexample family)
    n_trials : int
        Number of trials
    alpha_grid : sequence of float, optional
        Orders to check (default: 40 log-spaced points avoiding α = 1)
    seed : int
        Seed; the output is a deterministic function of it
    family : str
        "random" or "counterexample"
    conditions : sequence of Condition, optional
        Conditions to check (default: all)
    workers : int, optional
        Thread count (default: configured)
    progress_reporter : ProgressReporter, optional
        Receives per-trial progress

    Returns
    -------
    list of ConditionVerdict
        Violations first, largest |margin| first; then the rest, tightest
        margin first. Ties keep (trial, α, condition) order.
    """
    if dimension < 2:
        raise DimensionTooSmall(f"audit needs d >= 2, got {dimension}")
    if dimension > AUDIT_MAX_DIM:
        raise DimensionTooLarge(f"audit supports d <= {AUDIT_MAX_DIM}, got {dimension}")
    if family not in FAMILIES:
        raise ValueError(f"Unknown family {family!r}. Supported: {', '.join(FAMILIES)}")
    if family == "counterexample" and dimension != 3:
        raise DimensionMismatch("the counterexample family acts on d = 3")
    if n_trials < 0:
        raise ValueError(f"n_trials must be non-negative, got {n_trials}")

    grid = [check_alpha(a) for a in (DEFAULT_AUDIT_ALPHA_GRID if alpha_grid is None else alpha_grid)]
    chosen = list(Condition) if conditions is None else list(conditions)
    workers = get_settings().workers if workers is None else workers
    logger.info(
        f"Audit d={dimension} trials={n_trials} seed={seed} family={family} "
        f"alphas={len(grid)} workers={workers} rng={RNG_ALGORITHM}"
    )

    def report(done: int):
        if progress_reporter and n_trials:
            progress_reporter.send_progress_update(
                "running", f"trial {done}/{n_trials}", int(100 * done / n_trials)
            )

    results: List[List[ConditionVerdict]] = []
    if workers > 1 and n_trials > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [
                executor.submit(
                    _audit_trial, dimension, seed, t, family, grid, chosen
                )
                for t in range(n_trials)
            ]
            for t, future in enumerate(futures):
                results.append(future.result())
                report(t + 1)
    else:
        for t in range(n_trials):
            results.append(_audit_trial(dimension, seed, t, family, grid, chosen))
            report(t + 1)

    verdicts = [v for trial in results for v in trial]
    verdicts.sort(key=_order_key)
    violations = sum(v.violated for v in verdicts)
    logger.info(f"Audit finished: {len(verdicts)} verdicts, {violations} violations")
    if progress_reporter:
        progress_reporter.send_progress_update("completed", f"{violations} violations", 100)
    return verdicts


def summarize(verdicts: Sequence[ConditionVerdict]) -> dict:
    """Counts per condition and the worst margin."""
    counts: Dict[str, Dict[str, int]] = {}
    for verdict in verdicts:
        entry = counts.setdefault(verdict.condition.value, {"checked": 0, "violated": 0})
        entry["checked"] += 1
        entry["violated"] += int(verdict.violated)
    worst = min((v.margin for v in verdicts), default=None)
    return {
        "type": "summary",
        "verdicts": len(verdicts),
        "violations": sum(v.violated for v in verdicts),
        "conditions": counts,
        "worst_margin": worst,
        "rng": RNG_ALGORITHM,
    }
