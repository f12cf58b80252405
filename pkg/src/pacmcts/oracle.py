"""Ground-truth verification of the probabilistic guarantees.

The oracle is allowed to cheat: it reads true means and frozen offsets
directly and replays engine traces against them.  Nothing here feeds back
into decisions; these routines exist so the coverage, safety, and
minimality claims can be checked empirically rather than trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bandit import StaticAdversarial, make_flat_instance
from .confidence import (
    ComplexityInputs,
    ConfidenceConfig,
    is_infeasible,
    sample_complexity_lambert,
    sample_complexity_upper,
    u_dist_array,
)
from .engine import EngineConfig, Proportion, StrictPAC, run_pac_mcts, run_proportion_pruning
from .seeding import make_stream, stable_seed

_CHUNK = 250


@dataclass
class CoverageReport:
    """Outcome of a time-uniform coverage experiment."""

    trials: int
    violations: int
    delta: float
    m_count: int
    horizon: int

    @property
    def rate(self) -> float:
        return self.violations / self.trials

    @property
    def allowance(self) -> float:
        """Three binomial standard errors above the nominal level."""
        d = self.delta
        return d + 3.0 * math.sqrt(d * (1.0 - d) / self.trials)

    @property
    def passed(self) -> bool:
        return self.rate <= self.allowance

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "violations": self.violations,
            "rate": self.rate,
            "delta": self.delta,
            "allowance": self.allowance,
            "m_count": self.m_count,
            "horizon": self.horizon,
            "passed": self.passed,
        }


def verify_concentration(
    config: ConfidenceConfig,
    m_count: int,
    horizon: int,
    trials: int,
    seed: int,
) -> CoverageReport:
    """Fraction of trajectories where any arm's running mean ever escapes
    the shifted radius.

    Every arm carries the worst frozen bias magnitude L.  A trajectory
    violates coverage if |mean_n - mu| > u_dist(n) for any arm at any
    n <= horizon; the rate must stay within delta plus binomial allowance.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    ns = np.arange(1, horizon + 1, dtype=np.float64)
    radius = u_dist_array(ns, m_count, config)
    rng = make_stream(seed)
    violations = 0
    done = 0
    while done < trials:
        t = min(_CHUNK, trials - done)
        z = rng.standard_normal((t, m_count, horizon))
        # deviation of the running mean from the true mean:
        # frozen offset L plus sigma * (partial sum) / n
        dev = config.bias_bound + config.sigma * np.cumsum(z, axis=2) / ns
        bad = np.abs(dev) > radius
        violations += int(np.any(bad, axis=(1, 2)).sum())
        done += t
    return CoverageReport(
        trials=trials,
        violations=violations,
        delta=config.delta,
        m_count=m_count,
        horizon=horizon,
    )


def _event_held(trace: list[dict], mus: np.ndarray) -> bool:
    """True when every traced (arm, epoch) satisfied |mean - mu| <= radius."""
    for snap in trace:
        for arm, n, mean, r in zip(
            snap["arms"], snap["pulls"], snap["means"], snap["radius"]
        ):
            if n == 0:
                continue
            if abs(mean - mus[arm]) > r:
                return False
    return True


@dataclass
class SafetyReport:
    """Replay outcome over a seed grid for strict and proportion policies."""

    seeds: int
    strict_event_held: int
    strict_safe: int
    strict_violations: list[int] = field(default_factory=list)
    proportion_covered: int = 0
    proportion_safe: int = 0
    proportion_violations: list[int] = field(default_factory=list)
    audit_failures: int = 0

    @property
    def passed(self) -> bool:
        return not self.strict_violations and not self.proportion_violations

    def to_dict(self) -> dict:
        return {
            "seeds": self.seeds,
            "strict_event_held": self.strict_event_held,
            "strict_safe": self.strict_safe,
            "strict_violations": self.strict_violations,
            "proportion_covered": self.proportion_covered,
            "proportion_safe": self.proportion_safe,
            "proportion_violations": self.proportion_violations,
            "audit_failures": self.audit_failures,
            "passed": self.passed,
        }


def verify_safe_pruning_exhaustive(
    mus,
    config: ConfidenceConfig,
    budget: int,
    n_seeds: int,
    base_seed: int = 0,
    proportion: Proportion = Proportion(fraction=0.3, min_pulls=10),
    bias_model=None,
) -> SafetyReport:
    """Replay a small instance across a seed grid and assert conditional
    safety claims arm by arm.

    StrictPAC: on every replay where the concentration event held at each
    epoch, the true optimal arm must never have been pruned.

    Proportion: on every replay where the event held *and* each elimination
    was audited as covered by provably-bad arms, the optimal arm must have
    survived.  Uncovered eliminations are counted, not asserted.
    """
    mus = np.asarray(mus, dtype=np.float64)
    report = SafetyReport(seeds=n_seeds, strict_event_held=0, strict_safe=0)
    optimal = int(np.argmax(mus))
    for i in range(n_seeds):
        seed = stable_seed(base_seed, "safety", i)
        model = (
            StaticAdversarial(config.bias_bound) if bias_model is None else bias_model
        )
        inst = make_flat_instance(len(mus), 1.0, model, config, seed, mus=mus)
        econf = EngineConfig(
            config=config,
            policy=StrictPAC(),
            budget=budget,
            allocation="round-robin",
            record_trace=True,
        )
        rec = run_pac_mcts(inst, econf)
        if _event_held(rec.trace, mus):
            report.strict_event_held += 1
            pruned = {e["arm"] for e in rec.pruning_events}
            if optimal in pruned:
                report.strict_violations.append(seed)
            else:
                report.strict_safe += 1

        inst2 = make_flat_instance(len(mus), 1.0, model, config, seed, mus=mus)
        pconf = EngineConfig(
            config=config,
            policy=proportion,
            budget=budget,
            record_trace=True,
        )
        rec2 = run_proportion_pruning(inst2, pconf)
        audits = [e["audit_ok"] for e in rec2.pruning_events]
        if audits and not all(audits):
            report.audit_failures += 1
        if audits and all(audits) and _event_held(rec2.trace or [], mus):
            report.proportion_covered += 1
            pruned = {e["arm"] for e in rec2.pruning_events}
            if optimal in pruned:
                report.proportion_violations.append(seed)
            else:
                report.proportion_safe += 1
    return report


@dataclass
class MinimalityReport:
    checked: int
    infeasible: int
    minimality_failures: int
    solver_disagreements: int

    @property
    def passed(self) -> bool:
        return self.minimality_failures == 0 and self.solver_disagreements == 0

    def to_dict(self) -> dict:
        return {
            "checked": self.checked,
            "infeasible": self.infeasible,
            "minimality_failures": self.minimality_failures,
            "solver_disagreements": self.solver_disagreements,
            "passed": self.passed,
        }


def random_complexity_inputs(rng: np.random.Generator) -> ComplexityInputs:
    """Feasible random query with the Lambert argument inside its domain."""
    while True:
        gap = float(rng.uniform(0.05, 2.0))
        bias = float(rng.uniform(0.0, gap / 8.0))
        epsilon = float(rng.uniform(0.0, gap / 8.0))
        sigma = float(rng.uniform(0.05, 2.0))
        factor = float(rng.uniform(0.2, 1.5))
        delta = float(rng.uniform(0.001, 0.2))
        m = int(rng.integers(2, 400))
        if gap - 4.0 * bias <= epsilon:
            continue
        cfg = ConfidenceConfig(
            sigma=sigma,
            delta=delta,
            epsilon=epsilon,
            bias_bound=bias,
            radius_factor=factor,
        )
        inputs = ComplexityInputs(gap=gap, frontier_size=m, config=cfg)
        c1 = np.pi * np.pi * m / (3.0 * delta)
        slack = inputs.effective_gap - epsilon
        c2 = 32.0 * (sigma * factor) ** 2 / slack**2
        if 2.0 * c2 * np.sqrt(c1) <= np.e:
            continue
        return inputs


def verify_complexity_minimality(
    n_inputs: int, seed: int = 0
) -> MinimalityReport:
    """Check, on randomized feasible queries, that the root-finding solver
    returns a true minimum and that the Lambert route lands within one
    sample of it.

    Minimality is asserted on the monotone tail only: the crossing at n*
    must hold while n* - 1 fails, skipping the pre-monotone prefix of the
    curve when the mixture constant is below e^2.
    """
    rng = make_stream(stable_seed(seed, "minimality"))
    failures = 0
    disagreements = 0
    infeasible = 0
    for _ in range(n_inputs):
        inputs = random_complexity_inputs(rng)
        n_star = sample_complexity_upper(inputs)
        if is_infeasible(n_star):
            infeasible += 1
            continue
        cfg = inputs.config
        c1 = np.pi * np.pi * inputs.frontier_size / (3.0 * cfg.delta)
        slack = inputs.effective_gap - cfg.epsilon
        c2 = 32.0 * (cfg.sigma * cfg.radius_factor) ** 2 / slack**2

        def crossing(n: int) -> bool:
            return n / np.log(c1 * n * n) > c2

        if not crossing(n_star):
            failures += 1
            continue
        monotone_start = max(1, int(np.ceil(np.e / np.sqrt(c1))))
        if n_star - 1 >= monotone_start and crossing(n_star - 1):
            failures += 1
            continue
        n_lambert = sample_complexity_lambert(inputs)
        if abs(n_lambert - n_star) > 1:
            disagreements += 1
    return MinimalityReport(
        checked=n_inputs,
        infeasible=infeasible,
        minimality_failures=failures,
        solver_disagreements=disagreements,
    )
