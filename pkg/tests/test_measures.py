import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from COHERENCE.core.errors import (
    AlphaOutOfRange,
    BudgetExhausted,
    DimensionMismatch,
    DimensionTooLarge,
)
from COHERENCE.core.hermitian import (
    incoherent_state,
    maximally_coherent_state,
    pure_state,
    validate_density,
)
from COHERENCE.core.measures import (
    Method,
    coherence_upper_bound,
    diagonal_moments,
    optimal_incoherent_state,
    relative_entropy_coherence,
    renyi_coherence,
    renyi_coherence_bruteforce,
    renyi_relative_entropy,
    shannon_entropy,
    tsallis_coherence,
    tsallis_coherence_bruteforce,
)
from COHERENCE.core.sampling import SamplerConfig, random_density

SQRT2 = math.sqrt(2.0)
ALPHAS = [0.1, 0.3, 0.5, 0.7, 0.99, 1.01, 1.5, 2.0]


def counterexample_value(alpha):
    return alpha / (alpha - 1) * math.log2(0.5 + 2 ** (-1 / alpha))


@pytest.mark.parametrize("alpha", ALPHAS)
def test_pure_plus_state_has_one_bit(plus_state, alpha):
    assert abs(renyi_coherence(plus_state, alpha).value - 1.0) < 1e-12


@pytest.mark.parametrize("d", [2, 3, 5])
@pytest.mark.parametrize("alpha", [0.5, 2.0])
def test_maximally_coherent_state(d, alpha):
    report = renyi_coherence(maximally_coherent_state(d), alpha)
    assert abs(report.value - math.log2(d)) < 1e-12
    assert_allclose(report.optimizer_weights, np.full(d, 1 / d), atol=1e-12)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_incoherent_state_has_zero_coherence(alpha):
    rho = incoherent_state([0.5, 0.3, 0.2])
    assert renyi_coherence(rho, alpha).value == 0.0
    assert tsallis_coherence(rho, alpha).value == 0.0
    assert relative_entropy_coherence(rho).value == 0.0


def test_counterexample_state_values(three_level_state):
    report = renyi_coherence(three_level_state, 2.0)
    assert report.method is Method.CLOSED_FORM
    assert abs(report.value - 2 * math.log2(0.5 + 1 / SQRT2)) < 1e-12
    assert abs(report.value - 0.54311) < 1e-5
    assert_allclose(report.optimizer_weights, np.array([1, SQRT2, 1]) / (2 + SQRT2), atol=1e-12)

    assert abs(tsallis_coherence(three_level_state, 2.0).value - ((0.5 + 1 / SQRT2) ** 2 - 1)) < 1e-12
    assert abs(relative_entropy_coherence(three_level_state).value - 0.5) < 1e-12
    assert abs(coherence_upper_bound(three_level_state) - (math.log2(3) - 1)) < 1e-12


@pytest.mark.parametrize("alpha", ALPHAS)
def test_counterexample_state_closed_form(three_level_state, alpha):
    assert abs(renyi_coherence(three_level_state, alpha).value - counterexample_value(alpha)) < 1e-10


def test_optimizer_depends_on_alpha(three_level_state):
    half = optimal_incoherent_state(three_level_state, 0.5).weights
    assert_allclose(half, [1 / 6, 2 / 3, 1 / 6], atol=1e-12)
    two = optimal_incoherent_state(three_level_state, 2.0).weights
    assert not np.allclose(half, two)


def test_diagonal_moments(three_level_state):
    assert_allclose(diagonal_moments(three_level_state, 2.0), [1 / 8, 1 / 4, 1 / 8], atol=1e-12)


@pytest.mark.parametrize("alpha", [0.0, -0.5, 1.0, 2.5, math.nan, math.inf])
def test_alpha_out_of_range(three_level_state, alpha):
    with pytest.raises(AlphaOutOfRange):
        renyi_coherence(three_level_state, alpha)
    with pytest.raises(AlphaOutOfRange):
        renyi_relative_entropy(three_level_state, three_level_state, alpha)


def test_alpha_one_points_at_relative_entropy(three_level_state):
    with pytest.raises(AlphaOutOfRange, match="relative entropy"):
        tsallis_coherence(three_level_state, 1.0)


def test_renyi_relative_entropy_examples(plus_state):
    mixed = validate_density(np.eye(2) / 2)
    assert abs(renyi_relative_entropy(plus_state, mixed, 2.0) - 1.0) < 1e-12
    assert abs(renyi_relative_entropy(plus_state, plus_state, 0.5)) < 1e-12
    assert renyi_relative_entropy(plus_state, incoherent_state([1.0, 0.0]), 2.0) == math.inf
    assert math.isfinite(renyi_relative_entropy(plus_state, incoherent_state([1.0, 0.0]), 0.5))

    with pytest.raises(DimensionMismatch):
        renyi_relative_entropy(plus_state, maximally_coherent_state(3), 0.5)


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("alpha", [0.4, 1.7])
def test_optimizer_attains_the_value(seed, alpha):
    rho = random_density(SamplerConfig(dim=3, seed=seed))
    report = renyi_coherence(rho, alpha)
    assert abs(renyi_relative_entropy(rho, report.optimizer, alpha) - report.value) < 1e-9
    # any other incoherent state does no better
    other = incoherent_state([0.2, 0.3, 0.5])
    assert renyi_relative_entropy(rho, other, alpha) >= report.value - 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_coherence_is_basis_relabeling_invariant(seed):
    rho = random_density(SamplerConfig(dim=3, seed=seed))
    perm = np.eye(3)[[2, 0, 1]]
    phases = np.diag(np.exp(1j * np.array([0.3, -1.1, 2.0])))
    u = phases @ perm
    moved = validate_density(u @ rho.entries @ u.conj().T)
    for alpha in (0.5, 2.0):
        assert abs(renyi_coherence(moved, alpha).value - renyi_coherence(rho, alpha).value) < 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_monotone_in_alpha(seed):
    rho = random_density(SamplerConfig(dim=4, seed=seed))
    grid = [a for a in np.linspace(0.05, 2.0, 40) if abs(a - 1.0) > 1e-9]
    values = [renyi_coherence(rho, a).value for a in grid]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("seed", range(5))
def test_continuity_at_alpha_one(seed):
    rho = random_density(SamplerConfig(dim=3, seed=seed))
    limit = relative_entropy_coherence(rho).value
    for alpha in (1 - 1e-4, 1 + 1e-4):
        assert abs(renyi_coherence(rho, alpha).value - limit) < 1e-2
        assert abs(tsallis_coherence(rho, alpha).value - limit * math.log(2)) < 1e-2


@pytest.mark.parametrize("seed", range(10))
def test_upper_bound_holds(seed):
    rho = random_density(SamplerConfig(dim=4, seed=seed))
    bound = coherence_upper_bound(rho)
    for alpha in (0.1, 0.5, 1.5, 2.0):
        assert renyi_coherence(rho, alpha).value <= bound + 1e-10


def test_relative_entropy_coherence_report(plus_state):
    report = relative_entropy_coherence(plus_state)
    assert report.method is Method.LIMIT_ALPHA_1
    assert report.alpha == 1.0
    assert abs(report.value - 1.0) < 1e-12
    assert_allclose(report.optimizer_weights, [0.5, 0.5])


def test_shannon_entropy():
    assert shannon_entropy([0.5, 0.5]) == 1.0
    assert shannon_entropy([1.0, 0.0]) == 0.0


def test_report_to_dict(three_level_state):
    record = renyi_coherence(three_level_state, 2.0).to_dict()
    assert record["method"] == "closed_form"
    assert record["alpha"] == 2.0
    assert len(record["optimizer_weights"]) == 3
    assert "moment_sum" in record["diagnostics"]


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("alpha", [0.3, 0.7, 1.5, 2.0])
def test_bruteforce_matches_closed_form(d, alpha, seed):
    rho = random_density(SamplerConfig(dim=d, seed=seed))
    closed = renyi_coherence(rho, alpha)
    brute = renyi_coherence_bruteforce(rho, alpha, seed=seed)
    assert brute.method is Method.BRUTE_FORCE
    assert abs(brute.value - closed.value) < 1e-9
    assert_allclose(brute.optimizer_weights, closed.optimizer_weights, atol=1e-6)


@pytest.mark.parametrize("alpha", [0.5, 2.0])
def test_tsallis_bruteforce_matches_closed_form(three_level_state, alpha):
    brute = tsallis_coherence_bruteforce(three_level_state, alpha)
    assert abs(brute.value - tsallis_coherence(three_level_state, alpha).value) < 1e-9


def test_bruteforce_counterexample(three_level_state):
    assert abs(renyi_coherence_bruteforce(three_level_state, 2.0).value - 0.54311) < 1e-5


def test_bruteforce_on_diagonal_state():
    assert abs(renyi_coherence_bruteforce(incoherent_state([0.5, 0.3, 0.2]), 0.5).value) < 1e-9


def test_bruteforce_on_basis_state():
    report = renyi_coherence_bruteforce(pure_state([0.0, 1.0, 0.0]), 2.0)
    assert report.value == 0.0
    assert_allclose(report.optimizer_weights, [0.0, 1.0, 0.0])


def test_bruteforce_limits(three_level_state):
    with pytest.raises(DimensionTooLarge):
        renyi_coherence_bruteforce(maximally_coherent_state(9), 0.5)
    with pytest.raises(BudgetExhausted):
        renyi_coherence_bruteforce(three_level_state, 0.5, budget=1, restarts=2)


@pytest.mark.slow
def test_bruteforce_matches_closed_form_on_many_states():
    for seed in range(200):
        d = 2 + seed % 4
        alpha = [0.2, 0.5, 0.8, 1.2, 1.6, 2.0][seed % 6]
        rho = random_density(SamplerConfig(dim=d, seed=1000 + seed))
        closed = renyi_coherence(rho, alpha).value
        assert abs(renyi_coherence_bruteforce(rho, alpha, seed=seed).value - closed) < 1e-9
