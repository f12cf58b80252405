"""Monte Carlo verifiers: coverage, replayed safety, solver minimality."""

import numpy as np
import pytest

from pacmcts.confidence import ConfidenceConfig, u_stat
from pacmcts.engine import Proportion
from pacmcts.oracle import (
    CoverageReport,
    MinimalityReport,
    SafetyReport,
    random_complexity_inputs,
    verify_complexity_minimality,
    verify_concentration,
    verify_safe_pruning_exhaustive,
)
from pacmcts.seeding import make_stream


def cfg(sigma=0.3, delta=0.05, bias=0.0, factor=1.0):
    return ConfidenceConfig(
        sigma=sigma,
        delta=delta,
        epsilon=0.0,
        bias_bound=bias,
        radius_factor=factor,
    )


def test_coverage_report_arithmetic():
    rep = CoverageReport(
        trials=10_000, violations=120, delta=0.05, m_count=10, horizon=1000
    )
    assert rep.rate == pytest.approx(0.012)
    assert rep.allowance == pytest.approx(
        0.05 + 3 * np.sqrt(0.05 * 0.95 / 10_000)
    )
    assert rep.passed
    bad = CoverageReport(
        trials=100, violations=30, delta=0.05, m_count=10, horizon=1000
    )
    assert not bad.passed
    assert set(rep.to_dict()) >= {"trials", "violations", "rate", "allowance", "passed"}


def test_concentration_zero_noise_never_violates():
    report = verify_concentration(
        cfg(sigma=0.0, bias=0.1), m_count=4, horizon=50, trials=1000, seed=3
    )
    assert report.violations == 0
    assert report.passed


def test_concentration_holds_at_the_declared_radius():
    report = verify_concentration(
        cfg(sigma=0.4, delta=0.1, bias=0.05),
        m_count=5,
        horizon=200,
        trials=2000,
        seed=11,
    )
    assert report.rate <= report.allowance


def test_concentration_fails_when_the_radius_is_halved():
    full = verify_concentration(
        cfg(sigma=0.4, delta=0.1), m_count=5, horizon=200, trials=2000, seed=11
    )
    half = verify_concentration(
        cfg(sigma=0.4, delta=0.1, factor=0.5),
        m_count=5,
        horizon=200,
        trials=2000,
        seed=11,
    )
    # same noise tape, smaller envelope: strictly more escapes
    assert half.violations > full.violations
    assert half.rate > 0.1


def test_concentration_argument_validation():
    with pytest.raises(ValueError):
        verify_concentration(cfg(), m_count=3, horizon=0, trials=10, seed=0)
    with pytest.raises(ValueError):
        verify_concentration(cfg(), m_count=3, horizon=10, trials=0, seed=0)


def test_safety_replay_small_grid():
    report = verify_safe_pruning_exhaustive(
        [1.0, 0.0, 0.0, 0.0],
        cfg(sigma=0.2, delta=0.05, bias=0.1),
        budget=60,
        n_seeds=300,
    )
    assert report.passed
    assert report.strict_violations == []
    assert report.proportion_violations == []
    assert report.seeds == 300
    assert report.strict_safe <= report.strict_event_held <= 300
    assert report.strict_event_held > 250


def test_safety_replay_counts_uncovered_eliminations():
    # fraction 0.9 cuts three of four arms at two pulls, far beyond what
    # the provably-bad audit can cover, so audits fail without violating
    report = verify_safe_pruning_exhaustive(
        [1.0, 0.0, 0.0, 0.0],
        cfg(sigma=0.2, delta=0.05, bias=0.1),
        budget=60,
        n_seeds=100,
        proportion=Proportion(fraction=0.9, min_pulls=2),
    )
    assert report.audit_failures > 0
    assert report.proportion_covered < 100
    assert report.strict_violations == []


def test_safety_report_failure_flag():
    rep = SafetyReport(
        seeds=10, strict_event_held=10, strict_safe=9, strict_violations=[4]
    )
    assert not rep.passed
    assert rep.to_dict()["passed"] is False


def test_random_complexity_inputs_always_feasible():
    rng = make_stream(99)
    for _ in range(100):
        inputs = random_complexity_inputs(rng)
        c = inputs.config
        assert inputs.effective_gap > c.epsilon
        c1 = np.pi * np.pi * inputs.frontier_size / (3.0 * c.delta)
        slack = inputs.effective_gap - c.epsilon
        c2 = 32.0 * (c.sigma * c.radius_factor) ** 2 / slack**2
        assert 2.0 * c2 * np.sqrt(c1) > np.e


def test_minimality_verifier_small_batch():
    report = verify_complexity_minimality(200, seed=7)
    assert report.passed
    assert report.checked == 200
    assert report.minimality_failures == 0
    assert report.solver_disagreements == 0


def test_minimality_agrees_with_the_radius_inequality():
    # independent restatement: at n* four radii fit in the slack gap, at
    # n* - 1 they do not (checked on the monotone tail only)
    from pacmcts.confidence import sample_complexity_upper

    rng = make_stream(123)
    for _ in range(50):
        inputs = random_complexity_inputs(rng)
        n_star = sample_complexity_upper(inputs)
        c = inputs.config
        slack = inputs.effective_gap - c.epsilon
        assert 4.0 * u_stat(n_star, inputs.frontier_size, c) < slack
        c1 = np.pi * np.pi * inputs.frontier_size / (3.0 * c.delta)
        monotone_start = max(1, int(np.ceil(np.e / np.sqrt(c1))))
        if n_star - 1 >= monotone_start:
            assert 4.0 * u_stat(n_star - 1, inputs.frontier_size, c) >= slack


def test_minimality_report_flag():
    rep = MinimalityReport(
        checked=5, infeasible=0, minimality_failures=1, solver_disagreements=0
    )
    assert not rep.passed
