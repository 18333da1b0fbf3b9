import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from COHERENCE.core.audit import (
    Condition,
    audit_random,
    check_b3,
    check_c1,
    check_c2a,
    check_c2b,
    check_c3,
    check_extended_c2b,
    check_mixedness_tradeoff,
    check_purity_bound,
    draw_trial,
    summarize,
)
from COHERENCE.core.channels import dephasing_channel, permutation_channel, validate_channel
from COHERENCE.core.counterexample import counterexample_channel, counterexample_reference_sigma
from COHERENCE.core.errors import (
    AlphaOutOfRange,
    DimensionMismatch,
    DimensionTooLarge,
    DimensionTooSmall,
    NotIncoherent,
)
from COHERENCE.core.hermitian import incoherent_state, maximally_coherent_state, pure_state
from COHERENCE.core.progress_reporter import ProgressReporter
from COHERENCE.core.sampling import RNG_ALGORITHM, SamplerConfig, random_density

SQRT2 = math.sqrt(2.0)


def test_condition_parse():
    assert Condition.parse("c2b") is Condition.C2b
    assert Condition.parse(" ExtC2b ") is Condition.ExtC2b
    with pytest.raises(ValueError, match="Unknown condition"):
        Condition.parse("C4")


def test_c1(three_level_state):
    coherent = check_c1(three_level_state, 0.5)
    assert not coherent.violated
    assert coherent.margin > 0.0
    assert not coherent.witness["incoherent"]

    diagonal = check_c1(incoherent_state([0.6, 0.4]), 2.0)
    assert not diagonal.violated
    assert diagonal.lhs == 0.0
    assert diagonal.witness["incoherent"]


def test_c2a_examples(three_level_state):
    dephased = check_c2a(three_level_state, dephasing_channel(3), 0.5)
    assert dephased.lhs == 0.0
    assert not dephased.violated

    assert not check_c2a(three_level_state, counterexample_channel(0.0, 1.0), 0.5).violated

    relabeled = check_c2a(three_level_state, permutation_channel([2, 0, 1]), 2.0)
    assert abs(relabeled.margin) < 1e-12


def test_c2b_counterexample_violation(three_level_state):
    verdict = check_c2b(three_level_state, counterexample_channel(0.0, 1.0), 0.5)
    assert abs(verdict.rhs - math.log2(4 / 3)) < 1e-9
    assert abs(verdict.lhs - 0.5) < 1e-9
    assert abs(verdict.margin - (math.log2(4 / 3) - 0.5)) < 1e-9
    assert verdict.violated
    assert verdict.witness["outcomes"] == [0, 1]
    assert_allclose(verdict.witness["p"], [0.5, 0.5], atol=1e-12)
    assert_allclose(verdict.witness["coherence"], [0.0, 1.0], atol=1e-12)


def test_c2b_small_alpha_with_half_weight(three_level_state):
    b = 1 / SQRT2
    verdict = check_c2b(three_level_state, counterexample_channel(b, b), 0.1)
    scale = 0.1 / (0.1 - 1)
    assert abs(verdict.rhs - scale * math.log2(0.5 + 2**-10)) < 1e-9
    assert abs(verdict.lhs - 3 / 8 * scale * math.log2(1025 / 3**10)) < 1e-9
    assert abs(verdict.rhs - 0.1108) < 1e-4
    assert abs(verdict.lhs - 0.2437) < 1e-4
    assert verdict.violated


def test_c2b_dephasing_is_not_violated(three_level_state):
    verdict = check_c2b(three_level_state, dephasing_channel(3), 0.5)
    assert verdict.lhs == 0.0
    assert not verdict.violated


@pytest.mark.parametrize("eps", [1e-10, 1e-8, 1e-6])
def test_subselection_with_small_branch_probability(phase_measurement, nearly_pure_qubit, eps):
    rho = nearly_pure_qubit(eps)
    for verdict in (
        check_c2b(rho, phase_measurement, 0.5),
        check_extended_c2b(rho, phase_measurement, 0.5),
    ):
        assert abs(verdict.lhs) < 1e-12
        assert verdict.rhs > 0.9
        assert not verdict.violated


def test_c2b_holds_at_alpha_two(three_level_state):
    assert not check_c2b(three_level_state, counterexample_channel(0.0, 1.0), 2.0).violated


def test_coherent_channel_is_refused(plus_state, hadamard_ops):
    channel = validate_channel(hadamard_ops)
    for check in (check_c2a, check_c2b, check_extended_c2b):
        with pytest.raises(NotIncoherent):
            check(plus_state, channel, 0.5)


def test_c3_examples():
    single = check_c3([(1.0, maximally_coherent_state(2))], 0.5)
    assert abs(single.margin) < 1e-12

    mixed = check_c3([(0.5, pure_state([1, 1])), (0.5, pure_state([1, -1]))], 0.5)
    assert abs(mixed.lhs) < 1e-12
    assert abs(mixed.rhs - 1.0) < 1e-12
    assert not mixed.violated

    with pytest.raises(DimensionMismatch):
        check_c3([(0.5, maximally_coherent_state(2)), (0.5, maximally_coherent_state(3))], 0.5)


def test_c3_holds_below_one():
    for seed in range(100):
        ensemble = [
            (w, random_density(SamplerConfig(dim=2, seed=seed), index=i))
            for i, w in enumerate((0.3, 0.7))
        ]
        assert not check_c3(ensemble, 0.5).violated


def test_b3_block_examples():
    qubit, qutrit = maximally_coherent_state(2), maximally_coherent_state(3)
    at_two = check_b3(qubit, qutrit, 0.5, 2.0)
    assert abs(at_two.lhs - 2 * math.log2(1 / SQRT2 + 1.5 / math.sqrt(3))) < 1e-9
    assert abs(at_two.rhs - (1 + math.log2(3)) / 2) < 1e-9
    assert at_two.violated

    at_half = check_b3(qubit, qutrit, 0.5, 0.5)
    assert abs(at_half.lhs - (-math.log2(0.25 + 1.5 / 9))) < 1e-9
    assert at_half.violated


def test_b3_near_alpha_one():
    qubit, qutrit = maximally_coherent_state(2), maximally_coherent_state(3)
    for alpha in (1 - 1e-4, 1 + 1e-4):
        verdict = check_b3(qubit, qutrit, 0.5, alpha)
        assert abs(verdict.lhs - verdict.rhs) < 1e-3


def test_b3_trivial_weight():
    rho1 = random_density(SamplerConfig(dim=3, seed=1))
    rho2 = random_density(SamplerConfig(dim=2, seed=2))
    assert not check_b3(rho1, rho2, 1.0, 0.5).violated
    with pytest.raises(ValueError):
        check_b3(rho1, rho2, 1.5, 0.5)


def test_extended_c2b_with_reference_sigma(three_level_state):
    channel = counterexample_channel(0.0, 1.0)
    verdict = check_extended_c2b(three_level_state, channel, 0.5, sigma=counterexample_reference_sigma())
    assert abs(verdict.rhs - math.log2(4 / 3)) < 1e-9
    assert abs(verdict.lhs - math.sqrt(0.5) * math.sqrt(2 / (2 + SQRT2))) < 1e-9
    assert verdict.violated
    assert_allclose(verdict.witness["q"], [SQRT2 / (2 + SQRT2), 2 / (2 + SQRT2)], atol=1e-12)
    assert_allclose(verdict.witness["p"], [0.5, 0.5], atol=1e-12)


def test_extended_c2b_with_optimal_sigma(three_level_state):
    verdict = check_extended_c2b(three_level_state, counterexample_channel(0.0, 1.0), 0.5)
    assert abs(verdict.lhs - math.sqrt(1 / 6)) < 1e-9
    assert not verdict.violated
    assert_allclose(verdict.witness["sigma"], [1 / 6, 2 / 3, 1 / 6], atol=1e-12)


def test_extended_c2b_diagonal_input():
    verdict = check_extended_c2b(incoherent_state([0.2, 0.3, 0.5]), dephasing_channel(3), 0.5)
    assert verdict.lhs == 0.0
    assert verdict.rhs == 0.0


def test_extended_c2b_checks_sigma_dimension(three_level_state):
    with pytest.raises(DimensionMismatch):
        check_extended_c2b(
            three_level_state, counterexample_channel(0.0, 1.0), 0.5, sigma=incoherent_state([0.5, 0.5])
        )


def test_purity_bound_and_tradeoff(three_level_state):
    bound = check_purity_bound(three_level_state, 2.0)
    assert abs(bound.rhs - (math.log2(3) - 1)) < 1e-12
    assert not bound.violated

    tradeoff = check_mixedness_tradeoff(three_level_state, 2.0)
    expected = math.log(2) / 2 * 2 * math.log2(0.5 + 1 / SQRT2) + 0.75
    assert abs(tradeoff.lhs - expected) < 1e-12
    assert not tradeoff.violated


@pytest.mark.slow
@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_purity_bound_and_tradeoff_on_random_states(d):
    alphas = list(np.linspace(0.1, 0.95, 10)) + list(np.linspace(1.1, 2.0, 10))
    verdicts = audit_random(
        d,
        1000,
        alpha_grid=alphas,
        seed=40 + d,
        conditions=[Condition.PurityBound, Condition.MixednessTradeoff],
    )
    assert len(verdicts) == 1000 * 20 * 2
    assert not any(v.violated for v in verdicts)
    assert min(v.margin for v in verdicts) >= -1e-9


def test_verdict_to_dict(three_level_state):
    record = check_c2b(three_level_state, counterexample_channel(0.0, 1.0), 0.5).to_dict()
    assert record["condition"] == "C2b"
    assert record["violated"] is True
    assert set(record) == {"condition", "alpha", "lhs", "rhs", "margin", "violated", "witness"}


def test_draw_trial_is_deterministic():
    first = draw_trial(3, seed=5, trial=2)
    second = draw_trial(3, seed=5, trial=2)
    assert first.params == second.params
    assert_allclose(first.rho.entries, second.rho.entries)
    assert 2 <= first.params["n_ops"] <= 3
    assert first.channel.incoherent


def test_counterexample_family_starts_at_unit_b():
    draw = draw_trial(3, seed=0, trial=0, family="counterexample")
    assert draw.params["b_re"] == 1.0
    assert draw.params["a"] == 0.0


def test_audit_finds_counterexample_violation():
    verdicts = audit_random(
        3, 1, alpha_grid=[0.5], family="counterexample", conditions=[Condition.C2b]
    )
    assert len(verdicts) == 1
    (verdict,) = verdicts
    assert verdict.violated
    assert verdict.witness["b_re"] == 1.0
    assert verdict.witness["trial"] == 0
    assert verdict.witness["alpha"] == 0.5


def test_audit_empty():
    assert audit_random(2, 0) == []
    assert audit_random(2, 3, alpha_grid=[]) == []
    assert audit_random(2, 3, alpha_grid=[0.5], conditions=[]) == []
    summary = summarize([])
    assert summary["verdicts"] == 0
    assert summary["violations"] == 0
    assert summary["worst_margin"] is None
    assert summary["rng"] == RNG_ALGORITHM


def test_audit_orders_violations_first():
    verdicts = audit_random(
        3,
        4,
        alpha_grid=[0.3, 0.5, 2.0],
        family="counterexample",
        conditions=[Condition.C2b, Condition.C2a],
    )
    flags = [v.violated for v in verdicts]
    assert any(flags)
    first_clean = flags.index(False)
    assert all(flags[:first_clean])
    assert not any(flags[first_clean:])
    violated = [abs(v.margin) for v in verdicts[:first_clean]]
    assert violated == sorted(violated, reverse=True)
    clean = [v.margin for v in verdicts[first_clean:]]
    assert clean == sorted(clean)


def test_audit_is_deterministic_across_workers():
    kwargs = dict(alpha_grid=[0.4, 1.6], seed=17, conditions=[Condition.C2a, Condition.C3])
    serial = [v.to_dict() for v in audit_random(3, 6, workers=1, **kwargs)]
    again = [v.to_dict() for v in audit_random(3, 6, workers=1, **kwargs)]
    threaded = [v.to_dict() for v in audit_random(3, 6, workers=3, **kwargs)]
    assert serial == again
    assert serial == threaded


def test_audit_c2a_holds_on_qubits():
    verdicts = audit_random(2, 200, alpha_grid=[0.5], seed=3, conditions=[Condition.C2a])
    assert len(verdicts) == 200
    assert not any(v.violated for v in verdicts)


def test_audit_reports_progress():
    updates = []
    audit_random(
        2, 3, alpha_grid=[0.5], conditions=[Condition.C1],
        progress_reporter=ProgressReporter(updates.append),
    )
    assert [u["progress"] for u in updates] == [33, 66, 100, 100]
    assert updates[-1]["status"] == "completed"


def test_summarize_counts(three_level_state):
    verdicts = [
        check_c2b(three_level_state, counterexample_channel(0.0, 1.0), 0.5),
        check_c2b(three_level_state, counterexample_channel(0.0, 1.0), 2.0),
        check_c1(three_level_state, 0.5),
    ]
    summary = summarize(verdicts)
    assert summary["verdicts"] == 3
    assert summary["violations"] == 1
    assert summary["conditions"]["C2b"] == {"checked": 2, "violated": 1}
    assert summary["worst_margin"] == verdicts[0].margin


@pytest.mark.parametrize(
    "kwargs, error",
    [
        (dict(dimension=1, n_trials=1), DimensionTooSmall),
        (dict(dimension=9, n_trials=1), DimensionTooLarge),
        (dict(dimension=2, n_trials=1, family="counterexample"), DimensionMismatch),
        (dict(dimension=2, n_trials=1, family="ghz"), ValueError),
        (dict(dimension=2, n_trials=1, alpha_grid=[1.0]), AlphaOutOfRange),
        (dict(dimension=2, n_trials=-1), ValueError),
    ],
)
def test_audit_rejects(kwargs, error):
    with pytest.raises(error):
        audit_random(**kwargs)


@pytest.mark.slow
def test_subunit_audit_finds_no_violations():
    verdicts = audit_random(
        3,
        500,
        alpha_grid=list(np.geomspace(0.05, 0.95, 5)),
        seed=2024,
        conditions=[Condition.C1, Condition.C2a, Condition.C3],
    )
    assert len(verdicts) == 500 * 5 * 3
    assert not any(v.violated for v in verdicts)
