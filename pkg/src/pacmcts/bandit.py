"""Synthetic arm environments with controlled bias injection.

An instance owns the ground truth (true means, frozen bias offsets, noise
scale) and a private counter-based noise stream.  Observations are
``mu + offset + dither + sigma * z``: the frozen offset models a systematic
evaluator error, the optional per-step dither models bias that fluctuates
within the same envelope, and z is standard normal.

Offsets are frozen at construction, so the conditional mean of every arm is
deterministic for the whole replication.  All models keep |bias| within the
configured bound L.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .confidence import ConfidenceConfig
from .seeding import make_stream

_ABS_TOL = 1e-12


@dataclass(frozen=True)
class ArmTruth:
    """Ground truth for one arm: identity, true mean, frozen bias offset."""

    arm_id: int
    mu: float
    offset: float


@dataclass
class ArmStats:
    """Running pull count and sum for one arm."""

    pulls: int = 0
    total: float = 0.0

    @property
    def mean(self) -> float:
        if self.pulls == 0:
            raise ValueError("empirical mean undefined with zero pulls")
        return self.total / self.pulls

    def add(self, value: float) -> None:
        self.pulls += 1
        self.total += value


@dataclass(frozen=True)
class Observation:
    arm: int
    value: float
    epoch: int


class Unbiased:
    """No systematic error: every offset is zero."""

    magnitude = 0.0
    per_step_amplitude = 0.0
    needs_unique_optimum = False

    def offsets(self, mus: np.ndarray, optimal_arm: int) -> np.ndarray:
        return np.zeros_like(mus)


class StaticAdversarial:
    """Worst frozen adversary: -L on the optimal arm, +L on every other."""

    needs_unique_optimum = True
    per_step_amplitude = 0.0

    def __init__(self, magnitude: float):
        if magnitude < 0:
            raise ValueError(f"magnitude must be >= 0, got {magnitude}")
        self.magnitude = magnitude

    def offsets(self, mus: np.ndarray, optimal_arm: int) -> np.ndarray:
        out = np.full(mus.shape, self.magnitude, dtype=np.float64)
        out[optimal_arm] = -self.magnitude
        return out


class TopKAdversarial:
    """-L on the optimal arm, +L on the k strongest suboptimal arms.

    Models an evaluator that punishes the true best action while inflating
    its closest competitors; the remaining arms are scored faithfully.
    """

    needs_unique_optimum = True
    per_step_amplitude = 0.0

    def __init__(self, magnitude: float, k: int):
        if magnitude < 0:
            raise ValueError(f"magnitude must be >= 0, got {magnitude}")
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        self.magnitude = magnitude
        self.k = k

    def offsets(self, mus: np.ndarray, optimal_arm: int) -> np.ndarray:
        if self.k > len(mus) - 1:
            raise ValueError(
                f"k={self.k} exceeds the {len(mus) - 1} suboptimal arms"
            )
        out = np.zeros_like(mus)
        out[optimal_arm] = -self.magnitude
        order = np.argsort(-mus, kind="stable")
        boosted = [a for a in order if a != optimal_arm][: self.k]
        out[boosted] = self.magnitude
        return out


class PerArmVector:
    """User-supplied frozen offsets, one per arm."""

    needs_unique_optimum = False
    per_step_amplitude = 0.0

    def __init__(self, offsets):
        self._offsets = np.asarray(offsets, dtype=np.float64)
        if self._offsets.ndim != 1:
            raise ValueError("offsets must be a flat vector")
        self.magnitude = float(np.max(np.abs(self._offsets))) if len(
            self._offsets
        ) else 0.0

    def offsets(self, mus: np.ndarray, optimal_arm: int) -> np.ndarray:
        if len(self._offsets) != len(mus):
            raise ValueError(
                f"offset vector has {len(self._offsets)} entries "
                f"for {len(mus)} arms"
            )
        return self._offsets.copy()


class PerStepUniform:
    """Zero-mean per-observation bias, uniform on [-amplitude, +amplitude].

    The frozen offsets are zero; each observation instead carries an
    independent draw from the dither.  Still admissible under the bias
    envelope since every conditional mean stays within L of the truth.
    """

    needs_unique_optimum = False

    def __init__(self, amplitude: float):
        if amplitude < 0:
            raise ValueError(f"amplitude must be >= 0, got {amplitude}")
        self.magnitude = amplitude
        self.per_step_amplitude = amplitude

    def offsets(self, mus: np.ndarray, optimal_arm: int) -> np.ndarray:
        return np.zeros_like(mus)


BiasModel = (
    Unbiased | StaticAdversarial | TopKAdversarial | PerArmVector | PerStepUniform
)


def _resolve_optimal(mus: np.ndarray, bias_model) -> int:
    """Lowest-index argmax; duplicate maxima are rejected for models that
    must single out the optimal arm."""
    optimal = int(np.argmax(mus))
    dup = np.sum(mus == mus[optimal])
    if dup > 1 and bias_model.needs_unique_optimum:
        raise ValueError(
            "bias model requires a unique optimal arm but "
            f"{dup} arms attain the maximum mean"
        )
    return optimal


class FlatInstance:
    """Fixed frontier of m_count arms sampled i.i.d. with frozen bias."""

    def __init__(
        self,
        mus: np.ndarray,
        bias_model,
        config: ConfidenceConfig,
        seed: int,
    ):
        self.mus = np.asarray(mus, dtype=np.float64)
        self.m_count = len(self.mus)
        if self.m_count < 2:
            raise ValueError(f"need at least 2 arms, got {self.m_count}")
        self.config = config
        self.sigma = config.sigma
        self.optimal_arm = _resolve_optimal(self.mus, bias_model)
        self.offsets = bias_model.offsets(self.mus, self.optimal_arm)
        self.dither = bias_model.per_step_amplitude
        worst = max(float(np.max(np.abs(self.offsets))), self.dither)
        if worst > config.bias_bound + _ABS_TOL:
            raise ValueError(
                f"bias offset {worst} exceeds the configured bound "
                f"{config.bias_bound}"
            )
        self.seed = seed
        self.rng = make_stream(seed)
        self.epoch = 0
        self._biased_means = self.mus + self.offsets

    @property
    def gap(self) -> float:
        """Smallest true suboptimality gap."""
        rest = np.delete(self.mus, self.optimal_arm)
        return float(self.mus[self.optimal_arm] - np.max(rest))

    def truth(self) -> list[ArmTruth]:
        return [
            ArmTruth(m, float(self.mus[m]), float(self.offsets[m]))
            for m in range(self.m_count)
        ]

    def true_value(self, arm: int) -> float:
        return float(self.mus[arm])

    def expandable(self, arm: int) -> bool:
        return False

    def sample(self, arm: int) -> Observation:
        value = self.sample_batch(np.asarray([arm]))[0]
        return Observation(arm, float(value), self.epoch)

    def sample_batch(self, arms: np.ndarray) -> np.ndarray:
        """One observation per listed arm, drawn in list order."""
        self.epoch += 1
        values = self._biased_means[arms] + self.sigma * self.rng.standard_normal(
            len(arms)
        )
        if self.dither > 0.0:
            values += self.rng.uniform(-self.dither, self.dither, len(arms))
        return values


def make_flat_instance(
    m_count: int,
    gap: float,
    bias_model,
    config: ConfidenceConfig,
    seed: int,
    mus=None,
    baseline: float = 0.0,
) -> FlatInstance:
    """Single-gap frontier by default: arm 0 at baseline + gap, the rest at
    baseline.  Pass ``mus`` to override the landscape entirely."""
    if mus is None:
        if m_count < 2:
            raise ValueError(f"m_count must be >= 2, got {m_count}")
        if gap <= 0:
            raise ValueError(f"gap must be > 0, got {gap}")
        mus = np.full(m_count, baseline, dtype=np.float64)
        mus[0] = baseline + gap
    else:
        mus = np.asarray(mus, dtype=np.float64)
        if len(mus) != m_count:
            raise ValueError(
                f"mus has {len(mus)} entries but m_count={m_count}"
            )
    return FlatInstance(mus, bias_model, config, seed)


@dataclass(frozen=True)
class TreeSpec:
    """Shape of a synthetic expansion tree.

    Every sibling set has exactly one preferred child (the index named by
    optimal_path at that depth) worth discount * parent value; all other
    children sit exactly gap below before discounting.  The unique maximal
    leaf therefore follows optimal_path from the root, whatever the noise
    scale or bias model.
    """

    branching: int
    depth: int
    gap: float
    optimal_path: tuple[int, ...]
    depth_discount: float = 1.0
    root_value: float = 1.0

    def __post_init__(self) -> None:
        if self.branching < 2:
            raise ValueError(f"branching must be >= 2, got {self.branching}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if self.gap <= 0:
            raise ValueError(f"gap must be > 0, got {self.gap}")
        if not 0.0 < self.depth_discount <= 1.0:
            raise ValueError(
                f"depth_discount must be in (0, 1], got {self.depth_discount}"
            )
        if len(self.optimal_path) != self.depth:
            raise ValueError(
                f"optimal_path length {len(self.optimal_path)} != depth "
                f"{self.depth}"
            )
        if any(not 0 <= c < self.branching for c in self.optimal_path):
            raise ValueError("optimal_path indices must lie in [0, branching)")

    @property
    def optimal_value(self) -> float:
        return self.root_value * self.depth_discount**self.depth


class TreeInstance:
    """Incrementally expanded tree; node ids are allocation order.

    Supports the frozen adversary (on-path nodes penalized by -L, off-path
    boosted by +L), the unbiased model, and per-step dither.  Ranked-boost
    models need a fixed frontier and are rejected here.
    """

    def __init__(
        self,
        spec: TreeSpec,
        bias_model,
        config: ConfidenceConfig,
        seed: int,
    ):
        if isinstance(bias_model, (TopKAdversarial, PerArmVector)):
            raise ValueError(
                f"{type(bias_model).__name__} is only defined on a fixed "
                "flat frontier"
            )
        if bias_model.magnitude > config.bias_bound + _ABS_TOL:
            raise ValueError(
                f"bias magnitude {bias_model.magnitude} exceeds the "
                f"configured bound {config.bias_bound}"
            )
        self.spec = spec
        self.config = config
        self.sigma = config.sigma
        self.dither = bias_model.per_step_amplitude
        self._adversarial = isinstance(bias_model, StaticAdversarial)
        self._magnitude = bias_model.magnitude
        self.seed = seed
        self.rng = make_stream(seed)
        self.epoch = 0
        self.values = [spec.root_value]
        self.depths = [0]
        self.parents = [-1]
        self.on_path = [True]
        self.children: list[list[int] | None] = [None]
        self.offsets = [self._offset_for(True)]

    def _offset_for(self, on_path: bool) -> float:
        if not self._adversarial:
            return 0.0
        return -self._magnitude if on_path else self._magnitude

    @property
    def m_count(self) -> int:
        return len(self.values)

    @property
    def optimal_value(self) -> float:
        return self.spec.optimal_value

    def true_value(self, node: int) -> float:
        return self.values[node]

    def depth(self, node: int) -> int:
        return self.depths[node]

    def is_on_optimal_path(self, node: int) -> bool:
        return self.on_path[node]

    def expandable(self, node: int) -> bool:
        return self.depths[node] < self.spec.depth

    def expand(self, node: int) -> list[int]:
        """Materialize the children of ``node``; idempotent per node."""
        if not self.expandable(node):
            raise ValueError(f"node {node} is a leaf at depth {self.depths[node]}")
        if self.children[node] is not None:
            return list(self.children[node])
        level = self.depths[node]
        best_child = self.spec.optimal_path[level]
        parent_value = self.values[node]
        ids = []
        for c in range(self.spec.branching):
            value = self.spec.depth_discount * parent_value
            if c != best_child:
                value -= self.spec.gap
            child_on_path = self.on_path[node] and c == best_child
            ids.append(len(self.values))
            self.values.append(value)
            self.depths.append(level + 1)
            self.parents.append(node)
            self.on_path.append(child_on_path)
            self.children.append(None)
            self.offsets.append(self._offset_for(child_on_path))
        self.children[node] = ids
        return list(ids)

    def sample(self, node: int) -> Observation:
        value = self.sample_batch(np.asarray([node]))[0]
        return Observation(node, float(value), self.epoch)

    def sample_batch(self, nodes: np.ndarray) -> np.ndarray:
        self.epoch += 1
        base = np.asarray(
            [self.values[n] + self.offsets[n] for n in nodes], dtype=np.float64
        )
        values = base + self.sigma * self.rng.standard_normal(len(nodes))
        if self.dither > 0.0:
            values += self.rng.uniform(-self.dither, self.dither, len(nodes))
        return values


def make_tree_instance(
    spec: TreeSpec,
    bias_model,
    config: ConfidenceConfig,
    seed: int,
) -> TreeInstance:
    return TreeInstance(spec, bias_model, config, seed)


def enumerate_leaves(spec: TreeSpec) -> list[tuple[tuple[int, ...], float]]:
    """Exhaustive (path, value) list of every leaf; brute-force ground truth
    for tree construction checks."""
    leaves = []

    def walk(level: int, value: float, path: tuple[int, ...]) -> None:
        if level == spec.depth:
            leaves.append((path, value))
            return
        for c in range(spec.branching):
            child = spec.depth_discount * value
            if c != spec.optimal_path[level]:
                child -= spec.gap
            walk(level + 1, child, path + (c,))

    walk(0, spec.root_value, ())
    return leaves
