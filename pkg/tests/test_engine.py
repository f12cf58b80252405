"""Engine behavior: allocation, pruning, termination, and the baselines.

The preset surface pinned at the bottom is fully deterministic (seeded
Philox streams), so observed counts are asserted exactly.
"""

import numpy as np
import pytest

from pacmcts.bandit import (
    FlatInstance,
    StaticAdversarial,
    TreeInstance,
    TreeSpec,
    Unbiased,
    make_flat_instance,
)
from pacmcts.confidence import ConfidenceConfig
from pacmcts.engine import (
    EngineConfig,
    FrontierSnapshot,
    Naive,
    NoPruning,
    Proportion,
    StrictPAC,
    estimate_dynamic_bias,
    run_baseline_uct,
    run_naive_pruning,
    run_pac_mcts,
    run_proportion_pruning,
)
from pacmcts.harness import ExperimentConfig, run_sweep, two_proportion_z
from pacmcts.presets import preset
from pacmcts.seeding import stable_seed


def cfg(sigma=0.3, delta=0.05, epsilon=0.0, bias=0.0, factor=1.0):
    return ConfidenceConfig(
        sigma=sigma,
        delta=delta,
        epsilon=epsilon,
        bias_bound=bias,
        radius_factor=factor,
    )


def flat(mus, seed, config, bias_model=None):
    return FlatInstance(
        mus=np.asarray(mus, dtype=np.float64),
        bias_model=bias_model or Unbiased(),
        config=config,
        seed=seed,
    )


def test_two_arms_near_noiseless_collapse():
    c = cfg(sigma=0.01, delta=0.05)
    hits = 0
    for rep in range(1000):
        inst = make_flat_instance(2, 1.0, Unbiased(), c, seed=stable_seed("m2", rep))
        rec = run_pac_mcts(inst, EngineConfig(config=c, budget=200))
        hits += rec.selected_arm == 0
        assert rec.terminated_by == "collapse"
        assert rec.total_samples == 2
    assert hits / 1000 >= 0.99


def test_noiseless_unbiased_is_exact():
    c = cfg(sigma=0.0)
    for seed in range(20):
        inst = flat([0.3, 0.7, -0.1], seed, c)
        rec = run_pac_mcts(inst, EngineConfig(config=c, budget=50))
        assert rec.selected_arm == 1
        assert rec.terminated_by == "collapse"
        assert rec.total_samples == 3
        assert rec.arms_pruned == 2


def test_naive_equals_strict_when_bias_bound_is_zero():
    c = cfg(sigma=0.4, delta=0.05)
    same = 0
    for rep in range(100):
        seed = stable_seed("nz", rep)
        ec = EngineConfig(config=c, budget=120, allocation="ucb-greedy")
        a = run_pac_mcts(flat([0.5, 0.2, 0.0, 0.0, -0.2], seed, c), ec)
        b = run_naive_pruning(flat([0.5, 0.2, 0.0, 0.0, -0.2], seed, c), ec)
        assert a.selected_arm == b.selected_arm
        assert a.total_samples == b.total_samples
        # identical decisions; only the policy label on events differs
        assert [dict(e, reason=None) for e in a.pruning_events] == [
            dict(e, reason=None) for e in b.pruning_events
        ]
        same += a.selected_arm == b.selected_arm
    assert two_proportion_z(same, same, 100) == 0.0


def test_budget_and_bookkeeping_invariants():
    c = cfg(sigma=0.6, delta=0.1, bias=0.05)
    rng = np.random.Generator(np.random.Philox(key=77))
    for rep in range(40):
        m = int(rng.integers(2, 9))
        mus = np.sort(rng.uniform(-1, 1, m))[::-1].copy()
        budget = int(rng.integers(m, 160))
        alloc = "ucb-greedy" if rep % 2 else "round-robin"
        inst = flat(mus, stable_seed("bk", rep), c, StaticAdversarial(0.05))
        rec = run_pac_mcts(
            inst,
            EngineConfig(config=c, budget=budget, allocation=alloc),
        )
        assert rec.total_samples <= budget
        assert sum(rec.final_pulls.values()) == rec.total_samples
        assert rec.terminated_by in ("collapse", "budget")
        pruned = [e["arm"] for e in rec.pruning_events]
        # no arm is ever pruned twice, and the answer is never a pruned arm
        assert len(pruned) == len(set(pruned))
        assert rec.selected_arm not in pruned
        assert 0 <= rec.pruning_rate(m) <= 1.0


def test_decisions_are_invariant_under_exact_scaling():
    # doubling is exact in binary floating point, so every compared
    # quantity doubles and the decision sequence must be identical
    k = 2.0
    mus = [0.9, 0.55, 0.3, 0.0, -0.4]
    for rep in range(25):
        seed = stable_seed("scale", rep)
        c1 = cfg(sigma=0.5, delta=0.05, epsilon=0.02, bias=0.05)
        c2 = cfg(
            sigma=0.5 * k, delta=0.05, epsilon=0.02 * k, bias=0.05 * k
        )
        a = run_pac_mcts(
            flat(mus, seed, c1, StaticAdversarial(0.05)),
            EngineConfig(config=c1, budget=140, allocation="ucb-greedy"),
        )
        b = run_pac_mcts(
            flat([k * m for m in mus], seed, c2, StaticAdversarial(0.05 * k)),
            EngineConfig(config=c2, budget=140, allocation="ucb-greedy"),
        )
        assert a.selected_arm == b.selected_arm
        assert a.total_samples == b.total_samples
        assert [e["arm"] for e in a.pruning_events] == [
            e["arm"] for e in b.pruning_events
        ]
        assert [e["epoch"] for e in a.pruning_events] == [
            e["epoch"] for e in b.pruning_events
        ]
        assert a.final_pulls == b.final_pulls


def test_selection_shortfall_capped_on_collapse():
    # when the run ends by collapse the survivor's true mean may lag the
    # optimum by at most 4L + epsilon, up to the delta failure allowance
    c = cfg(sigma=0.2, delta=0.05, bias=0.1)
    cap = 4 * 0.1 + 0.0
    reps = 200
    collapses = 0
    violations = 0
    for rep in range(reps):
        inst = flat(
            [1.0, 0.2, 0.0],
            stable_seed("cap", rep),
            c,
            StaticAdversarial(0.1),
        )
        rec = run_pac_mcts(
            inst, EngineConfig(config=c, budget=400, allocation="round-robin")
        )
        if rec.terminated_by == "collapse":
            collapses += 1
            if 1.0 - rec.selected_true_mu > cap + 1e-12:
                violations += 1
    assert collapses > reps // 2
    allowance = 0.05 + 3 * np.sqrt(0.05 * 0.95 / reps)
    assert violations / reps <= allowance


def test_n_min0_gates_every_elimination():
    c = cfg(sigma=0.2, delta=0.05)
    for alloc in ("round-robin", "ucb-greedy"):
        inst = flat([1.0, 0.0, 0.0, 0.0], 3, c)
        rec = run_pac_mcts(
            inst,
            EngineConfig(config=c, budget=100, allocation=alloc, n_min0=50),
        )
        # 4 x 50 pulls cannot fit in 100, so nothing is ever eligible
        assert rec.pruning_events == []
        assert rec.terminated_by == "budget"
        assert rec.total_samples == 100


def test_engine_config_validation():
    c = cfg()
    with pytest.raises(ValueError):
        EngineConfig(config=c, budget=0)
    with pytest.raises(ValueError):
        EngineConfig(config=c, allocation="greedy")
    with pytest.raises(ValueError):
        EngineConfig(config=c, dynamic_bias=0.0)
    with pytest.raises(ValueError):
        EngineConfig(config=c, depth_discount=0.0)
    with pytest.raises(ValueError):
        EngineConfig(config=c, n_min0=0)
    with pytest.raises(ValueError):
        Proportion(fraction=1.0)
    with pytest.raises(ValueError):
        Proportion(fraction=0.3, min_pulls=0)


def test_estimate_dynamic_bias():
    snap = FrontierSnapshot(
        epoch=3, arms=(0, 1), pulls=(5, 5), means=(0.0, 1.0)
    )
    assert estimate_dynamic_bias(snap, 0.5) == pytest.approx(0.25)
    flat_snap = FrontierSnapshot(
        epoch=3, arms=(0, 1, 2), pulls=(4, 4, 4), means=(0.7, 0.7, 0.7)
    )
    assert estimate_dynamic_bias(flat_snap, 2.0) == pytest.approx(0.0, abs=1e-12)
    lonely = FrontierSnapshot(epoch=1, arms=(0, 1), pulls=(3, 0), means=(0.7, 0.0))
    with pytest.raises(ValueError):
        estimate_dynamic_bias(lonely, 0.5)


def test_dynamic_shield_never_prunes_less_than_static():
    # the estimate is clipped at the assumed bound, so radii only shrink
    c = cfg(sigma=0.3, delta=0.05, bias=0.2)
    static_events = 0
    dynamic_events = 0
    for rep in range(60):
        seed = stable_seed("dyn", rep)
        mus = [0.5, 0.0, 0.0, 0.0, 0.0, 0.0]
        base = EngineConfig(config=c, budget=600, allocation="ucb-greedy")
        static_events += run_pac_mcts(flat(mus, seed, c), base).arms_pruned
        dyn = EngineConfig(
            config=c, budget=600, allocation="ucb-greedy", dynamic_bias=0.5
        )
        dynamic_events += run_pac_mcts(flat(mus, seed, c), dyn).arms_pruned
    assert dynamic_events >= static_events


def test_uct_baseline_exact_when_noiseless():
    c = cfg(sigma=0.0)
    for seed in range(10):
        inst = flat([0.2, 0.9, 0.5], seed, c)
        rec = run_baseline_uct(inst, budget=30, seed=seed)
        assert rec.selected_arm == 1
        assert rec.policy == "uct"
        assert rec.pruning_events == []
        assert rec.total_samples == 30


def test_uct_baseline_budget_smaller_than_frontier():
    c = cfg(sigma=0.5)
    inst = flat([1.0, 0.5, 0.0, -0.5], 9, c)
    rec = run_baseline_uct(inst, budget=2, seed=9)
    assert rec.total_samples == 2
    assert rec.selected_arm in (0, 1)


def test_tree_search_reaches_the_optimal_leaf():
    c = cfg(sigma=0.05, delta=0.05)
    spec = TreeSpec(
        branching=3, depth=2, gap=0.2, optimal_path=(1, 2), depth_discount=1.0
    )
    for rep in range(30):
        inst = TreeInstance(
            spec=spec,
            bias_model=Unbiased(),
            config=c,
            seed=stable_seed("tree", rep),
        )
        rec = run_pac_mcts(
            inst, EngineConfig(config=c, budget=250, allocation="ucb-greedy")
        )
        assert rec.max_depth == 2
        assert inst.depth(rec.selected_arm) == 2
        assert inst.is_on_optimal_path(rec.selected_arm)
        assert rec.selected_true_mu == pytest.approx(spec.optimal_value)


def test_proportion_fraction_zero_never_eliminates():
    c = cfg(sigma=0.3)
    inst = flat([0.4, 0.1, 0.0], 5, c)
    rec = run_proportion_pruning(
        inst,
        EngineConfig(
            config=c, policy=Proportion(fraction=0.0, min_pulls=1), budget=90
        ),
    )
    assert rec.pruning_events == []
    assert rec.terminated_by == "budget"
    assert rec.total_samples == 90


def test_proportion_requires_proportion_policy_and_flat_frontier():
    c = cfg(sigma=0.3)
    with pytest.raises(ValueError):
        run_proportion_pruning(
            flat([0.4, 0.0], 1, c), EngineConfig(config=c, policy=StrictPAC())
        )
    spec = TreeSpec(
        branching=2, depth=2, gap=0.1, optimal_path=(0, 0), depth_discount=1.0
    )
    tree = TreeInstance(spec=spec, bias_model=Unbiased(), config=c, seed=0)
    with pytest.raises(ValueError):
        run_proportion_pruning(
            tree,
            EngineConfig(config=c, policy=Proportion(fraction=0.3, min_pulls=2)),
        )


# ladder frontier for the fraction study: 77 arms sit far below everything
# else and are provably bad almost immediately, so a 30% cut only ever
# touches them, while a 50% cut eventually reaches into the close pack
_LADDER = np.array([0.1, 0.0, 0.0] + [-2.0] * 77)


def _proportion_stats(fraction, reps=150):
    c = cfg(sigma=0.3, delta=0.05, bias=0.05)
    correct = 0
    audit_flags = []
    optimal_pruned = 0
    for rep in range(reps):
        inst = FlatInstance(
            mus=_LADDER.copy(),
            bias_model=Unbiased(),
            config=c,
            seed=stable_seed("ladder", fraction, rep),
        )
        rec = run_proportion_pruning(
            inst,
            EngineConfig(
                config=c,
                policy=Proportion(fraction=fraction, min_pulls=10),
                budget=2000,
            ),
        )
        correct += rec.selected_arm == 0
        audit_flags.extend(e["audit_ok"] for e in rec.pruning_events)
        optimal_pruned += any(e["arm"] == 0 for e in rec.pruning_events)
    return correct, np.mean(audit_flags), optimal_pruned


def test_proportion_audited_fraction_keeps_the_optimal_arm():
    correct, audit_frac, optimal_pruned = _proportion_stats(0.3)
    assert audit_frac >= 0.99
    assert optimal_pruned == 0
    assert correct / 150 >= 0.99


def test_proportion_half_cuts_collapse_identification():
    correct_03, _, _ = _proportion_stats(0.3)
    correct_05, audit_frac, optimal_pruned = _proportion_stats(0.5)
    # the 50% rule outruns its audit and starts hitting the close pack
    assert audit_frac < 0.99
    assert optimal_pruned > 0
    assert correct_05 / 150 <= correct_03 / 150 - 0.15
    assert two_proportion_z(correct_03, correct_05, 150) >= 3.0


# ---------------------------------------------------------------------------
# shield robustness surface (drifting per-step bias, L swept 0 to 0.5)


@pytest.fixture(scope="module")
def robustness_rows():
    config = ExperimentConfig(preset("robustness"))
    result = run_sweep(config, workers=1, keep_records=False)
    return result.rows


def _series(rows, policy):
    mine = sorted(
        (r for r in rows if r["policy"] == policy), key=lambda r: r["L"]
    )
    return mine


def test_robustness_surface_pcs_counts(robustness_rows):
    # deterministic seeded runs at R = 200, pinned as exact hit counts
    naive = [round(r["pcs"] * 200) for r in _series(robustness_rows, "naive")]
    strict = [
        round(r["pcs"] * 200) for r in _series(robustness_rows, "strict-pac")
    ]
    uct = [round(r["pcs"] * 200) for r in _series(robustness_rows, "uct")]
    assert naive == [177, 176, 170, 140, 105, 101]
    assert strict == [179, 184, 171, 170, 150, 121]
    assert uct == [192, 193, 188, 171, 169, 142]


def test_naive_pcs_decays_as_bias_grows(robustness_rows):
    naive = _series(robustness_rows, "naive")
    pcs = [r["pcs"] for r in naive]
    assert all(b <= a for a, b in zip(pcs, pcs[1:]))
    assert pcs[0] - pcs[-1] >= 0.3
    # it keeps pruning hard the whole way up, which is exactly the failure
    rates = [r["pruning_rate"] for r in naive]
    assert rates[-1] > 0.8
    assert rates[-1] > rates[0]


def test_shielded_pruning_survives_what_naive_does_not(robustness_rows):
    strict = {r["L"]: r["pcs"] for r in _series(robustness_rows, "strict-pac")}
    naive = {r["L"]: r["pcs"] for r in _series(robustness_rows, "naive")}
    assert strict[0.1] > naive[0.1]
    assert strict[0.2] >= naive[0.2]
    assert strict[0.5] >= naive[0.5] + 0.05
    # the shield buys safety by giving up pruning once 4L dwarfs the gap
    strict_rates = [r["pruning_rate"] for r in _series(robustness_rows, "strict-pac")]
    assert strict_rates[-1] <= 0.001
    assert strict_rates[0] > 0.4
