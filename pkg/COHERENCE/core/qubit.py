import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import DimensionMismatch, PositivityViolation
from .hermitian import DensityMatrix, validate_density

POSITIVITY_TOL = 1e-12


@dataclass(frozen=True)
class QubitParams:
    """
    ρ = [[a, b*], [b, 1 - a]].

    Only |b| enters any closed form; the phase of b is kept for qubit_state.
    """

    a: float
    b: complex = 0.0

    @property
    def b2(self) -> float:
        return abs(self.b) ** 2

    def check(self) -> "QubitParams":
        """
        Raises
        ------
        PositivityViolation
            If a is outside [0, 1] or |b|² > a(1 - a) + 1e-12
        """
        if not -POSITIVITY_TOL <= self.a <= 1.0 + POSITIVITY_TOL:
            raise PositivityViolation(f"a = {self.a} outside [0, 1]")
        limit = self.a * (1.0 - self.a)
        if not self.b2 <= limit + POSITIVITY_TOL:
            raise PositivityViolation(f"|b|² = {self.b2:.12g} exceeds a(1-a) = {limit:.12g}")
        return self


def qubit_state(p: QubitParams) -> DensityMatrix:
    p.check()
    b = complex(p.b)
    return validate_density(np.array([[p.a, b.conjugate()], [b, 1.0 - p.a]]))


def qubit_eigenvalues(p: QubitParams) -> Tuple[float, float]:
    """1/2 ± (1/2)√(1 + 4|b|² + 4a² - 4a), larger first."""
    p.check()
    root = math.sqrt(max(0.0, 1.0 + 4.0 * p.b2 + 4.0 * p.a**2 - 4.0 * p.a))
    return 0.5 + 0.5 * root, 0.5 - 0.5 * root


def _moment_roots(p: QubitParams) -> Tuple[float, float]:
    return math.sqrt(p.a**2 + p.b2), math.sqrt(p.b2 + (1.0 - p.a) ** 2)


def qubit_c2(p: QubitParams) -> float:
    """C₂ = 2 log2(√(a² + |b|²) + √(|b|² + (1 - a)²))."""
    p.check()
    return 2.0 * math.log2(sum(_moment_roots(p)))


def qubit_c2_max(a: float) -> float:
    """2 log2(√a + √(1 - a)), the largest C₂ at fixed a."""
    if not 0.0 <= a <= 1.0:
        raise PositivityViolation(f"a = {a} outside [0, 1]")
    return 2.0 * math.log2(math.sqrt(a) + math.sqrt(1.0 - a))


def qubit_gap_bound(p: QubitParams) -> float:
    """1 - (√(a² + |b|²) - √(|b|² + (1 - a)²))², nondecreasing in |b|²."""
    p.check()
    first, second = _moment_roots(p)
    return 1.0 - (first - second) ** 2


def qubit_tradeoff(p: QubitParams) -> Tuple[float, float]:
    """
    Both sides of ln2·C₂(ρ) + M(ρ) < 2√(a(1 - a)).

    Returns
    -------
    tuple of float
        (ln2·C₂ + M, 2√(a(1 - a))); the two sides meet at a = 1/2, b = 0
        and at a ∈ {0, 1}
    """
    p.check()
    a = min(max(p.a, 0.0), 1.0)
    purity = a**2 + (1.0 - a) ** 2 + 2.0 * p.b2
    lhs = math.log(2.0) * qubit_c2(p) + 2.0 * (1.0 - purity)
    return lhs, 2.0 * math.sqrt(a * (1.0 - a))


def qubit_params_from_state(rho: DensityMatrix) -> QubitParams:
    if rho.dim != 2:
        raise DimensionMismatch(f"expected a qubit state, got d={rho.dim}")
    return QubitParams(a=float(rho.entries[0, 0].real), b=complex(rho.entries[1, 0]))
