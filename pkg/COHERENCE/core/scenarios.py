import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .audit import check_extended_c2b
from .channels import SelectiveOutcome, selective_outcomes
from .counterexample import (
    counterexample_channel,
    counterexample_reference_sigma,
    counterexample_state,
)
from .errors import AlphaOutOfRange, ScenarioMismatch
from .hermitian import block_diagonal, maximally_coherent_state, mixedness
from .measures import check_alpha, renyi_coherence
from .progress_reporter import ProgressReporter
from .qubit import QubitParams, qubit_state, qubit_tradeoff

logger = logging.getLogger(__name__)

CROSS_CHECK_TOL = 1e-9
SCENARIOS = ("fig1", "fig2", "fig3", "extc2b")

DEFAULT_ALPHA_GRID: Tuple[float, ...] = tuple(
    [round(0.005 * k, 3) for k in range(1, 200)]
    + [round(1.0 + 0.005 * k, 3) for k in range(1, 201)]
)
DEFAULT_A_GRID: Tuple[float, ...] = tuple(round(0.005 * k, 3) for k in range(201))
SUBUNIT_ALPHA_GRID: Tuple[float, ...] = tuple(a for a in DEFAULT_ALPHA_GRID if a < 1.0)

Column = Tuple[str, str]


@dataclass(frozen=True)
class SweepTable:
    """
    A parameter grid and the quantities computed on it.

    The first column is the grid and must be strictly increasing.
    """

    scenario: str
    columns: Tuple[Column, ...]
    rows: Tuple[Tuple[float, ...], ...]
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(
                    f"{self.scenario}: row {i} has {len(row)} entries, expected {width}"
                )
        grid = [row[0] for row in self.rows]
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError(f"{self.scenario}: grid column is not strictly increasing")

    @property
    def names(self) -> List[str]:
        return [name for name, _ in self.columns]

    def column(self, name: str) -> np.ndarray:
        index = self.names.index(name)
        return np.array([row[index] for row in self.rows])

    def row_at(self, grid_value: float, tol: float = 1e-12) -> Tuple[float, ...]:
        for row in self.rows:
            if abs(row[0] - grid_value) <= tol:
                return row
        raise KeyError(f"{self.scenario}: no row at {grid_value}")


def _cross_check(scenario: str, label: str, computed: float, analytic: float) -> None:
    if abs(computed - analytic) > CROSS_CHECK_TOL:
        raise ScenarioMismatch(
            f"{scenario} {label}: pipeline {computed:.17g} vs analytic {analytic:.17g}"
        )


def _renyi_log_sum(alpha: float, terms: Sequence[Tuple[float, float]]) -> float:
    """(α/(α-1)) log2 Σ c·x^{1/α} over (c, x) pairs."""
    total = sum(c * x ** (1.0 / alpha) for c, x in terms)
    return alpha / (alpha - 1.0) * math.log2(total)


def counterexample_coherence(alpha: float) -> float:
    """Closed form of C(ρ) for the counterexample state."""
    return _renyi_log_sum(alpha, [(1.0, 0.5 ** alpha), (1.0, 0.5)])


def second_outcome(b: complex, alpha: float) -> Tuple[float, float]:
    """Closed-form (p₂, C(ρ₂)) of the counterexample channel."""
    b2 = abs(b) ** 2
    value = _renyi_log_sum(alpha, [(1.0, 1.0 / (1.0 + b2)), (1.0, b2 / (1.0 + b2))])
    return (1.0 + b2) / 4.0, value


def subselection_weight(alpha: float) -> float:
    """(1/2)^α (2/(2+√2))^{1-α}, equal to 1/2 only at α = 1."""
    return 0.5**alpha * (2.0 / (2.0 + math.sqrt(2.0))) ** (1.0 - alpha)


def _counterexample_outcome(b: complex) -> SelectiveOutcome:
    b = complex(b)
    channel = counterexample_channel(math.sqrt(max(0.0, 1.0 - abs(b) ** 2)), b)
    outcomes = {o.index: o for o in selective_outcomes(channel, counterexample_state())}
    return outcomes[1]


def _sweep(
    grid: Sequence[float],
    row: Callable[[float], Tuple[float, ...]],
    progress_reporter: Optional[ProgressReporter],
) -> Tuple[Tuple[float, ...], ...]:
    rows = []
    for i, x in enumerate(grid):
        rows.append(row(x))
        if progress_reporter and (i + 1) % 50 == 0:
            progress_reporter.send_progress_update(
                "running", f"row {i + 1}/{len(grid)}", int(100 * (i + 1) / len(grid))
            )
    return tuple(rows)


def _alpha_grid(alpha_grid: Optional[Sequence[float]]) -> List[float]:
    return [check_alpha(a) for a in (DEFAULT_ALPHA_GRID if alpha_grid is None else alpha_grid)]


def reproduce_fig1(
    alpha_grid: Optional[Sequence[float]] = None,
    b: complex = 1.0 / math.sqrt(2.0),
    progress_reporter: Optional[ProgressReporter] = None,
) -> SweepTable:
    """
    C(ρ) against p₂C(ρ₂) for the counterexample channel.

    Parameters
    ----------
    alpha_grid : sequence of float, optional
        Orders in (0, 1) ∪ (1, 2] (default: step 0.005 without α = 1)
    b : complex
        Channel amplitude; |b|² = 1/2 gives p₂ = 3/8
    progress_reporter : ProgressReporter, optional
        Receives row progress

    Returns
    -------
    SweepTable
        Columns alpha, coherence, p2_coherence

    Raises
    ------
    ScenarioMismatch
        If a pipeline value departs from its closed form by more than 1e-9
    """
    grid = _alpha_grid(alpha_grid)
    b = complex(b)
    rho = counterexample_state()
    second = _counterexample_outcome(b)

    def row(alpha: float) -> Tuple[float, ...]:
        value = renyi_coherence(rho, alpha).value
        weighted = second.probability * renyi_coherence(second.state, alpha).value
        p2, c2 = second_outcome(b, alpha)
        _cross_check("fig1", f"C at alpha={alpha}", value, counterexample_coherence(alpha))
        _cross_check("fig1", f"p2*C2 at alpha={alpha}", weighted, p2 * c2)
        return (alpha, value, weighted)

    return SweepTable(
        scenario="fig1",
        columns=(("alpha", ""), ("coherence", "bits"), ("p2_coherence", "bits")),
        rows=_sweep(grid, row, progress_reporter),
        params={"b_re": b.real, "b_im": b.imag, "points": len(grid)},
    )


def reproduce_fig2(
    alpha_grid: Optional[Sequence[float]] = None,
    progress_reporter: Optional[ProgressReporter] = None,
) -> SweepTable:
    """
    Block-diagonal coherence against the additive prediction.

    The state is (1/2)ρ₁ ⊕ (1/2)ρ₂ with ρ₁, ρ₂ the maximally coherent
    qubit and qutrit; the direct 5×5 value is checked against
    (α/(α-1)) log2[(1/2)^{1/α} + (3/2)(1/3)^{1/α}].
    """
    grid = _alpha_grid(alpha_grid)
    rho1 = maximally_coherent_state(2)
    rho2 = maximally_coherent_state(3)
    joined = block_diagonal([(0.5, rho1), (0.5, rho2)])
    additive_exact = (1.0 + math.log2(3.0)) / 2.0

    def row(alpha: float) -> Tuple[float, ...]:
        value = renyi_coherence(joined, alpha).value
        additive = 0.5 * (
            renyi_coherence(rho1, alpha).value + renyi_coherence(rho2, alpha).value
        )
        analytic = _renyi_log_sum(alpha, [(1.0, 0.5), (1.5, 1.0 / 3.0)])
        _cross_check("fig2", f"C at alpha={alpha}", value, analytic)
        _cross_check("fig2", f"additive at alpha={alpha}", additive, additive_exact)
        return (alpha, value, additive)

    return SweepTable(
        scenario="fig2",
        columns=(("alpha", ""), ("coherence", "bits"), ("additive", "bits")),
        rows=_sweep(grid, row, progress_reporter),
        params={"p1": 0.5, "d1": 2, "d2": 3, "points": len(grid)},
    )


def reproduce_fig3(
    a_grid: Optional[Sequence[float]] = None,
    progress_reporter: Optional[ProgressReporter] = None,
) -> SweepTable:
    """
    ln2·C₂ + M against 2√(a(1-a)) on pure qubits with |b|² = a(1 - a).

    Raises
    ------
    ValueError
        If a grid value lies outside [0, 1]
    """
    grid = [float(a) for a in (DEFAULT_A_GRID if a_grid is None else a_grid)]
    for a in grid:
        if not 0.0 <= a <= 1.0:
            raise ValueError(f"fig3 grid value {a} outside [0, 1]")

    def row(a: float) -> Tuple[float, ...]:
        params = QubitParams(a=a, b=math.sqrt(a * (1.0 - a)))
        rho = qubit_state(params)
        lhs = math.log(2.0) * renyi_coherence(rho, 2.0).value + mixedness(rho)
        analytic_lhs, rhs = qubit_tradeoff(params)
        _cross_check("fig3", f"lhs at a={a}", lhs, analytic_lhs)
        return (a, lhs, rhs)

    return SweepTable(
        scenario="fig3",
        columns=(("a", ""), ("ln2_c2_plus_mixedness", "nats"), ("bound", "")),
        rows=_sweep(grid, row, progress_reporter),
        params={"alpha": 2.0, "b2": "a(1-a)", "points": len(grid)},
    )


def reproduce_extended_c2b(
    alpha_grid: Optional[Sequence[float]] = None,
    b: complex = 1.0,
    progress_reporter: Optional[ProgressReporter] = None,
) -> SweepTable:
    """
    The subselection chain C(ρ) < p₂C(ρ₂) < p₂^α q₂^{1-α} C(ρ₂).

    q₂ comes from the fixed reference state diag(1, √2, 1)/(2 + √2). A
    fifth column repeats the weighted term with the α-optimal reference
    state of ρ.

    Parameters
    ----------
    alpha_grid : sequence of float, optional
        Orders in (0, 1) (default: step 0.005)
    b : complex
        Channel amplitude
    progress_reporter : ProgressReporter, optional
        Receives row progress

    Returns
    -------
    SweepTable
        Columns alpha, coherence, p2_coherence, weighted, weighted_optimal

    Raises
    ------
    AlphaOutOfRange
        If a grid value is not in (0, 1)
    """
    grid = [check_alpha(a) for a in (SUBUNIT_ALPHA_GRID if alpha_grid is None else alpha_grid)]
    for alpha in grid:
        if alpha >= 1.0:
            raise AlphaOutOfRange(f"extended subselection sweep needs alpha < 1, got {alpha}")

    b = complex(b)
    b2 = abs(b) ** 2
    rho = counterexample_state()
    channel = counterexample_channel(math.sqrt(max(0.0, 1.0 - b2)), b)
    second = _counterexample_outcome(b)
    sigma = counterexample_reference_sigma()
    root = math.sqrt(2.0)

    def row(alpha: float) -> Tuple[float, ...]:
        value = renyi_coherence(rho, alpha).value
        weighted_plain = second.probability * renyi_coherence(second.state, alpha).value
        weighted = check_extended_c2b(rho, channel, alpha, sigma=sigma).lhs
        weighted_optimal = check_extended_c2b(rho, channel, alpha).lhs

        p2, c2 = second_outcome(b, alpha)
        q2 = (1.0 + b2) / (2.0 + root)
        edge = 0.5 ** (1.0 / alpha)
        q2_optimal = (1.0 + b2) * edge / (1.0 + 2.0 * edge)
        _cross_check("extc2b", f"C at alpha={alpha}", value, counterexample_coherence(alpha))
        _cross_check("extc2b", f"p2*C2 at alpha={alpha}", weighted_plain, p2 * c2)
        _cross_check(
            "extc2b",
            f"weighted at alpha={alpha}",
            weighted,
            p2**alpha * q2 ** (1.0 - alpha) * c2,
        )
        _cross_check(
            "extc2b",
            f"optimal weighted at alpha={alpha}",
            weighted_optimal,
            p2**alpha * q2_optimal ** (1.0 - alpha) * c2,
        )
        return (alpha, value, weighted_plain, weighted, weighted_optimal)

    return SweepTable(
        scenario="extc2b",
        columns=(
            ("alpha", ""),
            ("coherence", "bits"),
            ("p2_coherence", "bits"),
            ("weighted", "bits"),
            ("weighted_optimal", "bits"),
        ),
        rows=_sweep(grid, row, progress_reporter),
        params={"b_re": b.real, "b_im": b.imag, "points": len(grid)},
    )


def reproduce(
    scenario: str, progress_reporter: Optional[ProgressReporter] = None, **kwargs
) -> SweepTable:
    """Run a scenario by name."""
    runners: Dict[str, Callable[..., SweepTable]] = {
        "fig1": reproduce_fig1,
        "fig2": reproduce_fig2,
        "fig3": reproduce_fig3,
        "extc2b": reproduce_extended_c2b,
    }
    if scenario not in runners:
        raise ValueError(
            f"Unknown scenario {scenario!r}. Supported: {', '.join(SCENARIOS)}"
        )
    logger.info(f"Reproducing {scenario}")
    return runners[scenario](progress_reporter=progress_reporter, **kwargs)
