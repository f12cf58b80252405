"""Canned experiment configs for the shipped benchmarks.

Each builder returns a plain dict in the JSON config schema, so the same
definitions back both the Python API and the files under configs/.  Numeric
choices the benchmark family leaves open (arm landscapes, noise scales,
replication counts, exploration constants) are fixed here so results are
reproducible; see the README for what each benchmark measures.

Seeds are derived per (cell, replication), never from grid position, so
extending a grid or dropping a policy column leaves every other cell's
numbers bit-identical.
"""

from __future__ import annotations

import copy

# Ablation sweep on a 50-arm frontier: one best arm at 0.25, three
# competitive decoys at 0.0, and a forty-six-arm floor at -0.05 that safe
# pruning can clear cheaply.  The ranked adversary docks the best arm and
# boosts the three decoys, so the observable contest tightens as L grows.
# The eligibility floor of 14 pulls per arm keeps small radius factors from
# pruning on init-phase noise; 1.5 is the exploration constant the UCT
# column is most competitive with on this landscape.
ABLATION_MUS = [0.25, 0.0, 0.0, 0.0] + [-0.05] * 46

TABLE_GRID = {
    "name": "safety-ablation",
    "replications": 500,
    "base_seed": 2024_0817,
    "instance": {"kind": "flat", "m_count": 50, "mus": ABLATION_MUS},
    "bias": {"model": "top-k", "k": 3},
    "grids": {
        "policy": ["strict-pac", "naive", "uct"],
        "L": [0.0125, 0.0375, 0.0625, 0.1],
        "sigma": [0.3],
        "N": [1500],
        "c_stat": [0.2, 0.3, 0.45, 0.6, 1.0],
    },
    "delta": 0.05,
    "epsilon": 0.01,
    "allocation": "ucb-greedy",
    "n_min0": 14,
    "uct_exploration": 1.5,
}

# Single cell at the theoretical radius with the gap exactly four times the
# bias bound.  The pruning margin never closes there, so the pruning rate is
# exactly zero; the cell reproduces the corresponding safety-ablation cell
# bit for bit because seeds are cell-keyed.
CONSERVATIVE = {
    "name": "conservative-boundary",
    "replications": 500,
    "base_seed": 2024_0817,
    "instance": {"kind": "flat", "m_count": 50, "mus": ABLATION_MUS},
    "bias": {"model": "top-k", "k": 3},
    "grids": {
        "policy": ["strict-pac"],
        "L": [0.0625],
        "sigma": [0.3],
        "N": [1500],
        "c_stat": [1.0],
    },
    "delta": 0.05,
    "epsilon": 0.01,
    "allocation": "ucb-greedy",
    "n_min0": 14,
}

# Bias-sensitivity curves: zero-mean per-observation dither grows along the
# L axis while the statistical radius stays sized for sigma alone.  The
# naive policy's unsafe pruning rate climbs with the dither; the shielded
# policy stops pruning instead and holds its accuracy.
ROBUSTNESS = {
    "name": "robustness",
    "replications": 200,
    "base_seed": 2024_0817,
    "instance": {"kind": "flat", "m_count": 30, "mus": [0.1] + [0.0] * 29},
    "bias": {"model": "per-step-uniform"},
    "grids": {
        "policy": ["strict-pac", "naive", "uct"],
        "L": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
        "sigma": [0.2],
        "N": [1000],
        "c_stat": [0.3],
    },
    "delta": 0.05,
    "epsilon": 0.01,
    "allocation": "ucb-greedy",
    "n_min0": 5,
}

# Static shield versus the frontier-spread estimate on the same 30-arm
# landscape.  The assumed bound stays at 0.1 on both cells while the true
# injected bias is 0 or 0.01, so the static shield is deliberately
# conservative; the estimate recovers pruning on the benign cell without
# moving accuracy on the biased one.
DYNAMIC_BIAS = {
    "name": "dynamic-bias",
    "replications": 300,
    "base_seed": 2024_0817,
    "instance": {"kind": "flat", "m_count": 30, "mus": [0.1] + [0.0] * 29},
    "bias": {"model": "static-adversarial"},
    "grids": {
        "policy": ["strict-pac", "strict-pac-dynamic"],
        "L": [0.0, 0.01],
        "sigma": [0.3],
        "N": [2000],
        "c_stat": [0.3],
    },
    "delta": 0.05,
    "epsilon": 0.01,
    "allocation": "ucb-greedy",
    "n_min0": 2,
    "assumed_bias_bound": 0.1,
    "dynamic_c_bias": 0.5,
}

# Budget scaling under a frozen ranked adversary the pruning condition
# cannot clear (4L > gap): selection quality is pure concentration, so
# accuracy surges as the budget grows through the three points.
SCALING = {
    "name": "scaling",
    "replications": 1000,
    "base_seed": 2024_0817,
    "instance": {"kind": "flat", "m_count": 20, "mus": [3.5] + [0.0] * 19},
    "bias": {"model": "top-k", "k": 5},
    "grids": {
        "policy": ["strict-pac"],
        "L": [1.2],
        "sigma": [2.0],
        "N": [50, 150, 250],
        "c_stat": [0.45],
    },
    "delta": 0.05,
    "epsilon": 0.01,
    "allocation": "ucb-greedy",
    "n_min0": 2,
}

# Evaluator-quality degradation: a 4.0 gap over a tail of mediocre arms.
# The ranked adversary docks the best arm and boosts the two runners-up, so
# at L=3.0 the reversal is total and the selected value settles between the
# second and third best.
DEGRADATION = {
    "name": "degradation",
    "replications": 1000,
    "base_seed": 2024_0817,
    "instance": {"kind": "flat", "mus": [10.0, 6.0, 5.5, 5.0, 4.5]},
    "bias": {"model": "top-k", "k": 2},
    "grids": {
        "policy": ["strict-pac"],
        "L": [0.5, 1.5, 3.0],
        "sigma": [2.0],
        "N": [80],
        "c_stat": [0.45],
    },
    "delta": 0.05,
    "epsilon": 0.01,
    "allocation": "ucb-greedy",
    "n_min0": 2,
}

# Tour-quality landscape, expressed as the negative length gap to the best
# tour: a narrow 2.91 contest at the top, three plausible decoys the ranked
# adversary can boost into the contest, and a tail of clearly worse tours.
# The budget of 120 pulls over twelve arms forces starvation; 7.0 is the
# exploration constant that keeps the UCT baseline honest on the benign
# cell while paying full price for the boosted decoys.
TOUR_MUS = [0.0, -2.91, -4.0, -4.0, -4.0] + [-9.0] * 7

ADVERSARIAL_TOURS = {
    "name": "adversarial-tours",
    "replications": 1000,
    "base_seed": 2024_0817,
    "instance": {"kind": "flat", "mus": TOUR_MUS},
    "bias": {"model": "top-k", "k": 5},
    "grids": {
        "policy": ["strict-pac", "naive", "uct"],
        "L": [0.0, 0.83, 1.17, 1.5],
        "sigma": [3.5],
        "N": [120],
        "c_stat": [0.45],
    },
    "delta": 0.05,
    "epsilon": 0.01,
    "allocation": "ucb-greedy",
    "n_min0": 2,
    "uct_exploration": 7.0,
}

# The contested cell of the tours landscape at doubled replications, for
# two-proportion comparisons between the three policies.
TOURS_ADVANTAGE = {
    "name": "tours-advantage",
    "replications": 2000,
    "base_seed": 2024_0817,
    "instance": {"kind": "flat", "mus": TOUR_MUS},
    "bias": {"model": "top-k", "k": 5},
    "grids": {
        "policy": ["strict-pac", "naive", "uct"],
        "L": [1.17],
        "sigma": [3.5],
        "N": [120],
        "c_stat": [0.45],
    },
    "delta": 0.05,
    "epsilon": 0.01,
    "allocation": "ucb-greedy",
    "n_min0": 2,
    "uct_exploration": 7.0,
}

# Budget-to-target comparison against the UCB baseline on a wide frontier,
# one cell per config.  Benign: unbiased observations where pruning's only
# edge is retiring dead arms early.  Adversarial: a shielded radius at a
# large factor pays for its conservatism and needs more budget than the
# baseline.
EFFICIENCY_BENIGN = {
    "name": "efficiency-benign",
    "replications": 300,
    "base_seed": 2024_0817,
    "instance": {"kind": "flat", "m_count": 200, "mus": [0.4] + [0.0] * 199},
    "bias": {"model": "top-k", "k": 3},
    "grids": {
        "policy": ["strict-pac"],
        "L": [0.0],
        "sigma": [0.4],
        "N": [400],
        "c_stat": [0.3],
    },
    "delta": 0.05,
    "epsilon": 0.01,
    "allocation": "ucb-greedy",
    "n_min0": 5,
    "efficiency": {
        "pcs_target": 0.90,
        "base_budget": 400,
        "max_factor": 16,
        "baseline": "uct",
    },
}

EFFICIENCY_ADVERSARIAL = {
    "name": "efficiency-adversarial",
    "replications": 300,
    "base_seed": 2024_0817,
    "instance": {"kind": "flat", "m_count": 200, "mus": [0.4] + [0.0] * 199},
    "bias": {"model": "top-k", "k": 3},
    "grids": {
        "policy": ["strict-pac"],
        "L": [0.1],
        "sigma": [0.45],
        "N": [400],
        "c_stat": [0.8],
    },
    "delta": 0.05,
    "epsilon": 0.01,
    "allocation": "ucb-greedy",
    "n_min0": 3,
    "efficiency": {
        "pcs_target": 0.90,
        "base_budget": 400,
        "max_factor": 16,
        "baseline": "uct",
    },
}

PRESETS = {
    "safety-ablation": TABLE_GRID,
    "conservative-boundary": CONSERVATIVE,
    "robustness": ROBUSTNESS,
    "dynamic-bias": DYNAMIC_BIAS,
    "scaling": SCALING,
    "degradation": DEGRADATION,
    "adversarial-tours": ADVERSARIAL_TOURS,
    "tours-advantage": TOURS_ADVANTAGE,
    "efficiency-benign": EFFICIENCY_BENIGN,
    "efficiency-adversarial": EFFICIENCY_ADVERSARIAL,
}


def preset(name: str) -> dict:
    """Deep copy of a named preset config dict."""
    if name not in PRESETS:
        raise KeyError(
            f"unknown preset {name!r}; available: {sorted(PRESETS)}"
        )
    return copy.deepcopy(PRESETS[name])
