import logging
import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .hermitian import RealVector

logger = logging.getLogger(__name__)

ARMIJO = 1e-4
FRACTION_TO_BOUNDARY = 0.99
CURVATURE_FLOOR = 1e-300
CURVATURE_CEILING = 1e300
MIN_STEP = 1e-30


class SimplexObjective(Protocol):
    def value(self, q: RealVector) -> float: ...

    def gradient(self, q: RealVector) -> RealVector: ...

    def curvature(self, q: RealVector) -> RealVector: ...


@dataclass(frozen=True)
class MomentObjective:
    """
    f(q) = g(Σ_i q_i^{1-α} m_i) over the probability simplex.

    kind "renyi" uses g(F) = log2(F)/(α-1), kind "tsallis" uses
    g(F) = (F-1)/(α-1). Both are minimized by q_i ∝ m_i^{1/α}.
    Entries of q must stay positive.
    """

    moments: RealVector
    alpha: float
    kind: str = "renyi"

    def power_sum(self, q: RealVector) -> float:
        with np.errstate(divide="ignore", over="ignore"):
            return float(np.sum(np.power(q, 1.0 - self.alpha) * self.moments))

    def value(self, q: RealVector) -> float:
        total = self.power_sum(q)
        if not math.isfinite(total) or total <= 0.0:
            return math.inf
        if self.kind == "tsallis":
            return (total - 1.0) / (self.alpha - 1.0)
        return math.log2(total) / (self.alpha - 1.0)

    def gradient(self, q: RealVector) -> RealVector:
        a, m = self.alpha, self.moments
        slope = -np.power(q, -a) * m
        if self.kind == "tsallis":
            return slope
        return slope / (self.power_sum(q) * math.log(2.0))

    def curvature(self, q: RealVector) -> RealVector:
        """
        Diagonal of g'(F)·∇²F, positive for α in (0, 1) ∪ (1, 2].

        The rank-one remainder g''(F)∇F∇Fᵀ of the Hessian is left out: at
        the minimizer ∇F is parallel to (1, ..., 1), normal to the simplex.
        """
        a, m = self.alpha, self.moments
        own = a * np.power(q, -a - 1.0) * m
        if self.kind == "tsallis":
            return own
        return own / (self.power_sum(q) * math.log(2.0))


@dataclass(frozen=True)
class SimplexRun:
    weights: RealVector
    value: float
    iterations: int
    step_norm: float
    converged: bool


def project_weighted_simplex(y: RealVector, w: RealVector) -> RealVector:
    """
    Project y onto the probability simplex in the metric Σ (x_i - y_i)² / w_i.

    The solution is x_i = max(0, y_i - ν w_i); the active set is the
    longest prefix of indices sorted by y_i / w_i whose threshold stays
    below its own breakpoint.
    """
    ratios = y / w
    order = np.argsort(-ratios, kind="stable")
    thresholds = (np.cumsum(y[order]) - 1.0) / np.cumsum(w[order])
    active = np.nonzero(ratios[order] > thresholds)[0]
    nu = thresholds[active[-1]] if active.size else thresholds[0]
    return np.maximum(y - nu * w, 0.0)


def minimize_on_simplex(
    objective: SimplexObjective,
    start: RealVector,
    budget: int,
    tol: float = 1e-10,
) -> SimplexRun:
    """
    Projected gradient descent with a diagonal curvature metric.

    Parameters
    ----------
    objective : SimplexObjective
        Smooth objective on the open simplex
    start : RealVector
        Strictly positive starting weights
    budget : int
        Maximum number of iterations
    tol : float
        Sup-norm of the scaled projected-gradient step that counts as converged

    Returns
    -------
    SimplexRun
        Last iterate, its objective value and the convergence flag
    """
    q = np.asarray(start, dtype=np.float64)
    q = q / q.sum()
    f = objective.value(q)
    step = math.inf

    for iteration in range(budget):
        g = objective.gradient(q)
        h = np.clip(objective.curvature(q), CURVATURE_FLOOR, CURVATURE_CEILING)
        w = 1.0 / h
        direction = project_weighted_simplex(q - w * g, w) - q
        step = float(np.max(np.abs(direction)))
        if step < tol:
            return SimplexRun(q, f, iteration, step, True)

        slope = float(g @ direction)
        shrinking = direction < 0.0
        t = 1.0
        if np.any(shrinking):
            limit = FRACTION_TO_BOUNDARY * q[shrinking] / -direction[shrinking]
            t = min(1.0, float(np.min(limit)))

        # rounding slack lets Newton-size steps through once f stops moving
        slack = 1e-13 * (1.0 + abs(f))
        while True:
            candidate = q + t * direction
            candidate_value = objective.value(candidate)
            if (
                math.isfinite(candidate_value)
                and candidate_value <= f + ARMIJO * t * slope + slack
            ):
                break
            t *= 0.5
            if t < MIN_STEP:
                logger.debug(f"Line search stalled at iteration {iteration}")
                return SimplexRun(q, f, iteration, step, False)

        q = candidate / candidate.sum()
        f = objective.value(q)

    return SimplexRun(q, f, budget, step, False)
