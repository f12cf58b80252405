"""Lockstep vectorization of flat-frontier cells across replications.

The engine samples each replication's noise from a counter-based stream in
consumption order: the opening full-frontier batches take len(batch) draws,
then the single-pull epochs take one draw each.  That makes the whole noise
tape per replication a prefix of ``standard_normal(budget)``, so R
replications can run in lockstep as (R, M) matrix updates while consuming
identical values to R sequential engine runs.

Only the cases the hot sweeps need are covered (flat instance, frozen
offsets, single-pull optimistic allocation or the UCB baseline, static
shield); everything else falls back to the sequential engine.  Equality
with the engine is exact and covered by tests, not approximate.
"""

from __future__ import annotations

import math

import numpy as np

from .confidence import ConfidenceConfig
from .engine import RunRecord
from .seeding import make_stream


def _noise_tape(seeds: list[int], budget: int) -> np.ndarray:
    z = np.empty((len(seeds), budget), dtype=np.float64)
    for i, seed in enumerate(seeds):
        z[i] = make_stream(seed).standard_normal(budget)
    return z


def supports_greedy_cell(
    policy_kind: str,
    allocation: str,
    has_dither: bool,
    is_flat: bool,
    budget: int,
    m_count: int,
    n_min0: int,
    dynamic: bool,
) -> bool:
    return (
        policy_kind in ("strict-pac", "naive", "none")
        and allocation == "ucb-greedy"
        and not has_dither
        and is_flat
        and not dynamic
        and budget >= n_min0 * m_count
    )


def run_greedy_cell(
    mus: np.ndarray,
    offsets: np.ndarray,
    config: ConfidenceConfig,
    policy_name: str,
    budget: int,
    seeds: list[int],
    n_min0: int = 1,
) -> list[RunRecord]:
    """All replications of one single-pull optimistic cell, engine-exact."""
    mus = np.asarray(mus, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.float64)
    m = len(mus)
    r = len(seeds)
    if budget < n_min0 * m:
        raise ValueError(f"budget {budget} cannot initialize {m} arms")
    prune_on = policy_name in ("strict-pac", "naive")
    shield = 0.0 if policy_name == "naive" else config.bias_bound
    biased = mus + offsets
    tape = _noise_tape(seeds, budget)

    pulls = np.zeros((r, m), dtype=np.int64)
    sums = np.zeros((r, m), dtype=np.float64)
    active = np.ones((r, m), dtype=bool)
    consumed = np.zeros(r, dtype=np.int64)
    total = np.zeros(r, dtype=np.int64)
    done = np.zeros(r, dtype=bool)
    terminated = np.array(["budget"] * r, dtype=object)
    events: list[list[dict]] = [[] for _ in range(r)]

    log_mix_base = math.log(math.pi * math.pi / (3.0 * config.delta))
    two_sig2 = 2.0 * config.sigma * config.sigma
    factor = config.radius_factor
    # The engine folds ln(frontier size) into the radius via scalar math.log;
    # tabulating those sums keeps this path bit-identical to it.
    base_by_count = np.array(
        [0.0] + [log_mix_base + math.log(k) for k in range(1, m + 1)]
    )

    # Opening full-frontier passes: every arm sampled once per epoch until
    # each has n_min0 pulls.  No pruning can fire here (nothing eligible).
    epoch = 0
    for _ in range(n_min0):
        epoch += 1
        cols = slice(int(consumed[0]), int(consumed[0]) + m)
        values = biased[None, :] + config.sigma * tape[:, cols]
        pulls += 1
        sums += values
        consumed += m
        total += m

    def radii() -> np.ndarray:
        ns = pulls.astype(np.float64)
        counts = active.sum(axis=1)
        log_term = base_by_count[counts][:, None] + 2.0 * np.log(ns)
        return factor * np.sqrt(two_sig2 * log_term / ns)

    def prune(alive: np.ndarray) -> None:
        means = sums / pulls
        dist = radii() + shield
        scored = np.where(active, means, -np.inf)
        leader = np.argmax(scored, axis=1)
        rows = np.arange(r)
        threshold = (
            means[rows, leader] - dist[rows, leader] - config.epsilon
        )
        doomed = active & (means + dist < threshold[:, None])
        doomed[rows, leader] = False
        doomed &= alive[:, None]
        if doomed.any():
            for rep, arm in np.argwhere(doomed):
                events[int(rep)].append(
                    {"epoch": epoch, "arm": int(arm), "reason": policy_name}
                )
            active[doomed] = False

    if prune_on:
        prune(~done)

    while True:
        collapsed = ~done & (active.sum(axis=1) <= 1)
        terminated[collapsed] = "collapse"
        done |= collapsed
        exhausted = ~done & (total >= budget)
        done |= exhausted
        if done.all():
            break
        epoch += 1
        alive = ~done

        means = sums / pulls
        q = means + radii() + shield
        q[~active] = -np.inf
        pick = np.argmax(q, axis=1)
        rows = np.flatnonzero(alive)
        arms = pick[rows]
        z = tape[rows, consumed[rows]]
        values = biased[arms] + config.sigma * z
        pulls[rows, arms] += 1
        sums[rows, arms] += values
        consumed[rows] += 1
        total[rows] += 1

        if prune_on:
            prune(alive)

    out = []
    for i in range(r):
        means = np.where(pulls[i] > 0, sums[i] / np.maximum(pulls[i], 1), -np.inf)
        pool = np.flatnonzero(active[i] & (pulls[i] > 0))
        if len(pool) == 0:
            pool = np.flatnonzero(active[i])
        selected = int(pool[int(np.argmax(means[pool]))])
        touched = np.flatnonzero(pulls[i] > 0)
        out.append(
            RunRecord(
                policy=policy_name,
                selected_arm=selected,
                selected_true_mu=float(mus[selected]),
                total_samples=int(total[i]),
                pruning_events=events[i],
                final_pulls={int(a): int(pulls[i, a]) for a in touched},
                terminated_by=str(terminated[i]),
            )
        )
    return out


def run_uct_cell(
    mus: np.ndarray,
    offsets: np.ndarray,
    sigma: float,
    budget: int,
    seeds: list[int],
    exploration_const: float | None = None,
) -> list[RunRecord]:
    """All replications of one UCB-baseline cell, engine-exact."""
    mus = np.asarray(mus, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.float64)
    m = len(mus)
    r = len(seeds)
    if budget < m:
        raise ValueError(f"budget {budget} cannot initialize {m} arms")
    c = sigma if exploration_const is None else exploration_const
    biased = mus + offsets
    tape = _noise_tape(seeds, budget)

    sums = biased[None, :] + sigma * tape[:, :m]
    pulls = np.ones((r, m), dtype=np.int64)
    rows = np.arange(r)
    for step in range(m, budget):
        means = sums / pulls
        bonus = c * np.sqrt(2.0 * math.log(step) / pulls)
        arms = np.argmax(means + bonus, axis=1)
        values = biased[arms] + sigma * tape[:, step]
        pulls[rows, arms] += 1
        sums[rows, arms] += values

    means = sums / pulls
    out = []
    for i in range(r):
        selected = int(np.argmax(means[i]))
        out.append(
            RunRecord(
                policy="uct",
                selected_arm=selected,
                selected_true_mu=float(mus[selected]),
                total_samples=budget,
                pruning_events=[],
                final_pulls={a: int(pulls[i, a]) for a in range(m)},
                terminated_by="budget",
            )
        )
    return out
