"""Frontier search with confidence-gated pruning.

Each epoch runs four phases: allocate observations to the active frontier,
recompute radii with the *current* frontier size in the mixture bound, prune
arms whose upper bound falls below the empirical leader's lower bound, and
(on trees) expand the most promising node in place of itself.  The run ends
when the budget is spent or a single non-expandable candidate remains; the
arm with the highest empirical mean among survivors is returned.

Policies differ only in the pruning rule:

  StrictPAC   radius = c_stat * u_stat + L, the bias-shielded test
  Naive       radius = c_stat * u_stat, ignores the bias envelope
  Proportion  eliminates a fixed fraction of the frontier per pass,
              recording a ground-truth audit flag per elimination
  NoPruning   keeps the whole frontier (allocation still adaptive)

The engine never reads ground truth to make decisions; truth enters run
records only for post-hoc verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .confidence import ConfidenceConfig, u_stat_array


@dataclass(frozen=True)
class StrictPAC:
    name = "strict-pac"


@dataclass(frozen=True)
class Naive:
    name = "naive"


@dataclass(frozen=True)
class NoPruning:
    name = "none"


@dataclass(frozen=True)
class Proportion:
    """Eliminate floor(fraction * |frontier|) weakest arms per full pass."""

    fraction: float
    min_pulls: int = 1
    name = "proportion"

    def __post_init__(self) -> None:
        if not 0.0 <= self.fraction < 1.0:
            raise ValueError(
                f"fraction must be in [0, 1), got {self.fraction}"
            )
        if self.min_pulls < 1:
            raise ValueError(f"min_pulls must be >= 1, got {self.min_pulls}")


PruningPolicy = StrictPAC | Naive | NoPruning | Proportion

_ALLOCATIONS = ("round-robin", "ucb-greedy")


@dataclass(frozen=True)
class EngineConfig:
    """Run-level knobs around a ConfidenceConfig.

    allocation     'round-robin' samples every active arm once per epoch;
                   'ucb-greedy' samples the single arm with the highest
                   optimistic index (new arms are always sampled first)
    dynamic_bias   None for the static shield L, else the scale factor
                   c_bias for the frontier-spread estimate; the engine
                   shields with min(L, c_bias * spread)
    depth_discount extra per-level factor applied to tree observations at
                   search time; 1.0 leaves values as the environment emits
    n_min0         pulls an arm must have before it can be pruned
    """

    config: ConfidenceConfig
    policy: PruningPolicy = StrictPAC()
    budget: int = 1000
    allocation: str = "round-robin"
    dynamic_bias: float | None = None
    depth_discount: float = 1.0
    n_min0: int = 1
    record_trace: bool = False

    def __post_init__(self) -> None:
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if self.allocation not in _ALLOCATIONS:
            raise ValueError(
                f"allocation must be one of {_ALLOCATIONS}, "
                f"got {self.allocation!r}"
            )
        if self.dynamic_bias is not None and self.dynamic_bias <= 0:
            raise ValueError(
                f"dynamic_bias scale must be > 0, got {self.dynamic_bias}"
            )
        if not 0.0 < self.depth_discount <= 1.0:
            raise ValueError(
                f"depth_discount must be in (0, 1], got {self.depth_discount}"
            )
        if self.n_min0 < 1:
            raise ValueError(f"n_min0 must be >= 1, got {self.n_min0}")


@dataclass(frozen=True)
class FrontierSnapshot:
    """Observable state of the active frontier at one epoch."""

    epoch: int
    arms: tuple[int, ...]
    pulls: tuple[int, ...]
    means: tuple[float, ...]

    @property
    def m_count(self) -> int:
        return len(self.arms)


@dataclass
class RunRecord:
    """Everything a single replication produced."""

    policy: str
    selected_arm: int
    selected_true_mu: float
    total_samples: int
    pruning_events: list[dict]
    final_pulls: dict[int, int]
    terminated_by: str
    max_depth: int = 0
    trace: list[dict] | None = None

    @property
    def arms_pruned(self) -> int:
        return len(self.pruning_events)

    def pruning_rate(self, m_count: int) -> float:
        """Fraction of the removable frontier actually pruned."""
        if m_count < 2:
            raise ValueError("pruning rate needs at least 2 arms")
        return self.arms_pruned / (m_count - 1)

    def to_dict(self) -> dict:
        out = {
            "policy": self.policy,
            "selected_arm": self.selected_arm,
            "selected_true_mu": self.selected_true_mu,
            "total_samples": self.total_samples,
            "pruning_events": self.pruning_events,
            "final_pulls": {str(k): v for k, v in sorted(self.final_pulls.items())},
            "terminated_by": self.terminated_by,
            "max_depth": self.max_depth,
        }
        if self.trace is not None:
            out["trace"] = self.trace
        return out


def estimate_dynamic_bias(snapshot: FrontierSnapshot, c_bias: float) -> float:
    """Frontier-spread bias estimate: c_bias * std of the active means.

    Needs at least two arms with pulls; a flat frontier (identical means)
    estimates zero bias.
    """
    if c_bias <= 0:
        raise ValueError(f"c_bias must be > 0, got {c_bias}")
    means = [m for m, n in zip(snapshot.means, snapshot.pulls) if n > 0]
    if len(means) < 2:
        raise ValueError(
            "dynamic bias estimate needs at least two arms with pulls"
        )
    return c_bias * float(np.std(np.asarray(means)))


class _Frontier:
    """Mutable per-run state over a growable id space."""

    def __init__(self, instance, capacity: int):
        self.instance = instance
        self.pulls = np.zeros(capacity, dtype=np.int64)
        self.sums = np.zeros(capacity, dtype=np.float64)
        self.means = np.full(capacity, -np.inf, dtype=np.float64)
        self.active = np.zeros(capacity, dtype=bool)
        self.depth_w = np.ones(capacity, dtype=np.float64)

    def grow(self, capacity: int) -> None:
        extra = capacity - len(self.pulls)
        if extra <= 0:
            return
        self.pulls = np.concatenate([self.pulls, np.zeros(extra, np.int64)])
        self.sums = np.concatenate([self.sums, np.zeros(extra, np.float64)])
        self.means = np.concatenate(
            [self.means, np.full(extra, -np.inf, np.float64)]
        )
        self.active = np.concatenate([self.active, np.zeros(extra, bool)])
        self.depth_w = np.concatenate([self.depth_w, np.ones(extra, np.float64)])

    def record(self, arms: np.ndarray, values: np.ndarray) -> None:
        np.add.at(self.pulls, arms, 1)
        np.add.at(self.sums, arms, values * self.depth_w[arms])
        self.means[arms] = self.sums[arms] / self.pulls[arms]


def _resolve_shield(econfig: EngineConfig, frontier, active_ids, epoch) -> float:
    cfg = econfig.config
    if isinstance(econfig.policy, Naive):
        return 0.0
    if econfig.dynamic_bias is None:
        return cfg.bias_bound
    pulled = frontier.pulls[active_ids] > 0
    if pulled.sum() < 2:
        return cfg.bias_bound
    snap = FrontierSnapshot(
        epoch=epoch,
        arms=tuple(int(a) for a in active_ids[pulled]),
        pulls=tuple(int(n) for n in frontier.pulls[active_ids[pulled]]),
        means=tuple(float(m) for m in frontier.means[active_ids[pulled]]),
    )
    return min(cfg.bias_bound, estimate_dynamic_bias(snap, econfig.dynamic_bias))


def run_pac_mcts(instance, econfig: EngineConfig) -> RunRecord:
    """One replication of the confidence-gated search loop."""
    if isinstance(econfig.policy, Proportion):
        return run_proportion_pruning(instance, econfig)

    cfg = econfig.config
    prune_on = isinstance(econfig.policy, (StrictPAC, Naive))
    is_tree = hasattr(instance, "expand")
    frontier = _Frontier(instance, instance.m_count)
    if is_tree:
        frontier.active[0] = True
        frontier.depth_w[0] = 1.0
    else:
        frontier.active[: instance.m_count] = True
    budget = econfig.budget
    total = 0
    epoch = 0
    events: list[dict] = []
    trace: list[dict] | None = [] if econfig.record_trace else None
    max_depth = 0
    log_mix_base = math.log(math.pi * math.pi / (3.0 * cfg.delta))
    two_sig2 = 2.0 * cfg.sigma * cfg.sigma

    def radii(active_ids: np.ndarray) -> np.ndarray:
        ns = frontier.pulls[active_ids].astype(np.float64)
        ns = np.maximum(ns, 1.0)
        log_term = log_mix_base + math.log(len(active_ids)) + 2.0 * np.log(ns)
        return cfg.radius_factor * np.sqrt(two_sig2 * log_term / ns)

    while True:
        active_ids = np.flatnonzero(frontier.active)
        can_expand = is_tree and any(
            instance.expandable(int(a)) for a in active_ids
        )
        if len(active_ids) <= 1 and not can_expand:
            terminated = "collapse"
            break
        if total >= budget:
            terminated = "budget"
            break
        epoch += 1

        # Phase 1: allocation.  Unpulled arms always go first so every
        # pruning decision sees at least n_min0 observations per arm.
        need = active_ids[frontier.pulls[active_ids] < econfig.n_min0]
        if len(need) > 0:
            batch = need[: budget - total]
        elif econfig.allocation == "round-robin":
            batch = active_ids[: budget - total]
        else:
            u = radii(active_ids)
            shield = _resolve_shield(econfig, frontier, active_ids, epoch)
            q = frontier.means[active_ids] + u + shield
            pick = int(np.argmax(q))
            batch = active_ids[pick : pick + 1]
        if len(batch) > 0:
            values = instance.sample_batch(batch)
            frontier.record(batch, values)
            total += len(batch)

        # Phase 2: radii under the current frontier size.
        u = radii(active_ids)
        shield = _resolve_shield(econfig, frontier, active_ids, epoch)
        dist = u + shield
        means = frontier.means[active_ids]
        eligible = frontier.pulls[active_ids] >= econfig.n_min0

        if trace is not None:
            trace.append(
                {
                    "epoch": epoch,
                    "arms": [int(a) for a in active_ids],
                    "pulls": [int(n) for n in frontier.pulls[active_ids]],
                    "means": [float(m) for m in means],
                    "radius": [float(r) for r in dist],
                }
            )

        # Phase 3: strict elimination against the empirical leader.
        if prune_on and eligible.any():
            leader_pos = int(np.argmax(np.where(eligible, means, -np.inf)))
            threshold = means[leader_pos] - dist[leader_pos] - cfg.epsilon
            doomed = (means + dist < threshold) & eligible
            doomed[leader_pos] = False
            if doomed.any():
                for pos in np.flatnonzero(doomed):
                    arm = int(active_ids[pos])
                    events.append(
                        {"epoch": epoch, "arm": arm, "reason": econfig.policy.name}
                    )
                    frontier.active[arm] = False
                active_ids = np.flatnonzero(frontier.active)

        # Phase 4: tree expansion of the most promising node.
        if is_tree and len(active_ids) > 0:
            u = radii(active_ids)
            q = frontier.means[active_ids] + u + shield
            pulled = frontier.pulls[active_ids] > 0
            if pulled.any():
                q = np.where(pulled, q, -np.inf)
                node = int(active_ids[int(np.argmax(q))])
                if instance.expandable(node):
                    children = instance.expand(node)
                    frontier.grow(instance.m_count)
                    frontier.active[node] = False
                    for c in children:
                        frontier.active[c] = True
                        d = instance.depth(c)
                        frontier.depth_w[c] = econfig.depth_discount**d
                        max_depth = max(max_depth, d)

    active_ids = np.flatnonzero(frontier.active)
    pulled = active_ids[frontier.pulls[active_ids] > 0]
    pool = pulled if len(pulled) > 0 else active_ids
    selected = int(pool[int(np.argmax(frontier.means[pool]))])
    touched = np.flatnonzero(frontier.pulls > 0)
    return RunRecord(
        policy=econfig.policy.name,
        selected_arm=selected,
        selected_true_mu=float(instance.true_value(selected)),
        total_samples=total,
        pruning_events=events,
        final_pulls={int(a): int(frontier.pulls[a]) for a in touched},
        terminated_by=terminated,
        max_depth=max_depth,
        trace=trace,
    )


def run_naive_pruning(instance, econfig: EngineConfig) -> RunRecord:
    """Strict loop with the bias shield removed from the pruning radius."""
    econfig = EngineConfig(
        config=econfig.config,
        policy=Naive(),
        budget=econfig.budget,
        allocation=econfig.allocation,
        dynamic_bias=None,
        depth_discount=econfig.depth_discount,
        n_min0=econfig.n_min0,
        record_trace=econfig.record_trace,
    )
    return run_pac_mcts(instance, econfig)


def run_proportion_pruning(instance, econfig: EngineConfig) -> RunRecord:
    """Round-robin passes with fixed-fraction elimination between passes.

    Each elimination event carries an audit flag computed from ground truth:
    whether the number of arms removed was covered by the provably-bad set
    at that epoch.  The flag never influences the run itself.
    """
    policy = econfig.policy
    if not isinstance(policy, Proportion):
        raise ValueError(f"expected a Proportion policy, got {policy!r}")
    if instance.expandable(0):
        raise ValueError("proportion pruning runs on fixed flat frontiers")
    cfg = econfig.config
    m = instance.m_count
    pulls = np.zeros(m, dtype=np.int64)
    sums = np.zeros(m, dtype=np.float64)
    active = np.ones(m, dtype=bool)
    budget = econfig.budget
    total = 0
    epoch = 0
    events: list[dict] = []
    trace: list[dict] | None = [] if econfig.record_trace else None
    m_star = instance.optimal_arm
    gaps = instance.mus[m_star] - instance.mus

    while total < budget and active.sum() > 1:
        epoch += 1
        ids = np.flatnonzero(active)
        batch = ids[: budget - total]
        values = instance.sample_batch(batch)
        np.add.at(pulls, batch, 1)
        np.add.at(sums, batch, values)
        total += len(batch)

        ids = np.flatnonzero(active)
        if trace is not None:
            seen = ids[pulls[ids] > 0]
            dist = u_stat_array(pulls[seen], len(ids), cfg) + cfg.bias_bound
            trace.append(
                {
                    "epoch": epoch,
                    "arms": [int(a) for a in seen],
                    "pulls": [int(n) for n in pulls[seen]],
                    "means": [float(v) for v in sums[seen] / pulls[seen]],
                    "radius": [float(r) for r in dist],
                }
            )
        if pulls[ids].min() < policy.min_pulls or len(ids) <= 1:
            continue
        k = int(policy.fraction * len(ids))
        if k < 1:
            continue
        means = sums[ids] / pulls[ids]
        order = np.argsort(means, kind="stable")
        victims = ids[order[:k]]

        u = u_stat_array(pulls[ids], len(ids), cfg)
        by_id = dict(zip(ids.tolist(), u.tolist()))
        if active[m_star]:
            u_star = by_id[m_star]
            provably_bad = sum(
                1
                for j in ids
                if j != m_star
                and gaps[j] > 2.0 * cfg.bias_bound + u_star + by_id[j]
            )
        else:
            provably_bad = 0
        audit_ok = bool(active[m_star]) and k <= provably_bad
        events.append(
            {
                "epoch": epoch,
                "arms": [int(v) for v in victims],
                "reason": policy.name,
                "k": k,
                "provably_bad": provably_bad,
                "audit_ok": audit_ok,
            }
        )
        active[victims] = False

    ids = np.flatnonzero(active)
    pool = ids[pulls[ids] > 0] if (pulls[ids] > 0).any() else ids
    means = np.where(pulls > 0, sums / np.maximum(pulls, 1), -np.inf)
    selected = int(pool[int(np.argmax(means[pool]))])
    flat_events = [
        {"epoch": e["epoch"], "arm": a, "reason": e["reason"], "audit_ok": e["audit_ok"]}
        for e in events
        for a in e["arms"]
    ]
    return RunRecord(
        policy=policy.name,
        selected_arm=selected,
        selected_true_mu=float(instance.true_value(selected)),
        total_samples=total,
        pruning_events=flat_events,
        final_pulls={int(a): int(pulls[a]) for a in np.flatnonzero(pulls)},
        terminated_by="collapse" if active.sum() == 1 else "budget",
        trace=trace,
    )


def run_baseline_uct(
    instance,
    budget: int,
    exploration_const: float | None = None,
    seed: int | None = None,
) -> RunRecord:
    """Classical UCB1 allocation, no pruning: pull argmax of
    mean + c * sqrt(2 ln t / n) after one initial pass.

    ``exploration_const`` defaults to the instance noise scale so the bonus
    lives on the same units as the rewards.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    if instance.expandable(0):
        raise ValueError("the baseline runs on fixed flat frontiers")
    c = instance.sigma if exploration_const is None else exploration_const
    m = instance.m_count
    pulls = np.zeros(m, dtype=np.int64)
    sums = np.zeros(m, dtype=np.float64)
    init = np.arange(m)[:budget]
    values = instance.sample_batch(init)
    pulls[init] += 1
    sums[init] += values
    total = len(init)
    means = np.where(pulls > 0, sums / np.maximum(pulls, 1), -np.inf)
    while total < budget:
        bonus = c * np.sqrt(2.0 * math.log(total) / np.maximum(pulls, 1))
        arm = int(np.argmax(means + bonus))
        value = instance.sample_batch(np.asarray([arm]))[0]
        pulls[arm] += 1
        sums[arm] += value
        means[arm] = sums[arm] / pulls[arm]
        total += 1
    pool = np.flatnonzero(pulls > 0)
    selected = int(pool[int(np.argmax(means[pool]))])
    return RunRecord(
        policy="uct",
        selected_arm=selected,
        selected_true_mu=float(instance.true_value(selected)),
        total_samples=total,
        pruning_events=[],
        final_pulls={int(a): int(pulls[a]) for a in pool},
        terminated_by="budget",
    )
