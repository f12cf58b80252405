"""Distribution-shift-aware confidence radii and sample-complexity bounds.

All radii are time-uniform over a frontier of M arms: the failure budget
delta is split across arms and sample counts with the summable mixture
pi^2 n^2 / 3, so coverage holds simultaneously for every arm at every n.

Separation feasibility is a first-class concept here.  When the suboptimality
gap cannot be resolved under the bias budget, the solvers return the
``INFEASIBLE`` marker instead of raising: callers are expected to branch on
it, not to catch exceptions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special


class _InfeasibleType:
    """Singleton marker: the requested guarantee has no finite sample size."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFEASIBLE"

    def __reduce__(self):
        return (_InfeasibleType, ())


INFEASIBLE = _InfeasibleType()


def is_infeasible(value: object) -> bool:
    return isinstance(value, _InfeasibleType)


@dataclass(frozen=True)
class ConfidenceConfig:
    """Parameters shared by every radius and bound.

    sigma         sub-Gaussian noise scale of observations, >= 0
    delta         total failure probability, in (0, 1)
    epsilon       selection slack, >= 0
    bias_bound    L, uniform bound on |E[observation] - true mean|, >= 0
    radius_factor c_stat, multiplies the statistical radius only; the bias
                  shield L is never scaled
    """

    sigma: float
    delta: float
    epsilon: float = 0.0
    bias_bound: float = 0.0
    radius_factor: float = 1.0

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.bias_bound < 0:
            raise ValueError(f"bias_bound must be >= 0, got {self.bias_bound}")
        if self.radius_factor <= 0:
            raise ValueError(
                f"radius_factor must be > 0, got {self.radius_factor}"
            )


@dataclass(frozen=True)
class ComplexityInputs:
    """One sample-complexity query: a gap, a frontier size, and a config."""

    gap: float
    frontier_size: int
    config: ConfidenceConfig

    def __post_init__(self) -> None:
        if self.gap <= 0:
            raise ValueError(f"gap must be > 0, got {self.gap}")
        if self.frontier_size < 1:
            raise ValueError(
                f"frontier_size must be >= 1, got {self.frontier_size}"
            )

    @property
    def effective_gap(self) -> float:
        """Gap remaining after the worst-case bias envelope: gap - 4L."""
        return self.gap - 4.0 * self.config.bias_bound


def _log_mixture(n: float, m_count: int, delta: float) -> float:
    # ln(pi^2 n^2 M / (3 delta)); positive for every n >= 1, M >= 1, delta < 1
    return math.log(math.pi * math.pi * n * n * m_count / (3.0 * delta))


def u_stat(n: int, m_count: int, config: ConfidenceConfig) -> float:
    """Statistical confidence radius after n pulls.

    u_stat(n) = c_stat * sqrt(2 sigma^2 ln(pi^2 n^2 M / (3 delta)) / n)

    Strictly decreasing in n whenever pi^2 M / (3 delta) >= e^2; for smaller
    mixtures the radius can grow over the first few pulls before the 1/n
    factor takes over.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if m_count < 1:
        raise ValueError(f"m_count must be >= 1, got {m_count}")
    log_term = _log_mixture(n, m_count, config.delta)
    return config.radius_factor * math.sqrt(
        2.0 * config.sigma * config.sigma * log_term / n
    )


def u_stat_array(
    ns: np.ndarray, m_count: int, config: ConfidenceConfig
) -> np.ndarray:
    """Vectorized ``u_stat`` over an array of pull counts (all >= 1)."""
    ns = np.asarray(ns, dtype=np.float64)
    log_term = np.log(
        (math.pi * math.pi / (3.0 * config.delta)) * m_count * ns * ns
    )
    return config.radius_factor * np.sqrt(
        2.0 * config.sigma * config.sigma * log_term / ns
    )


def u_dist(n: int, m_count: int, config: ConfidenceConfig) -> float:
    """Shifted radius: statistical radius plus the unscaled bias shield L."""
    return u_stat(n, m_count, config) + config.bias_bound


def u_dist_array(
    ns: np.ndarray, m_count: int, config: ConfidenceConfig
) -> np.ndarray:
    return u_stat_array(ns, m_count, config) + config.bias_bound


def _complexity_constants(inputs: ComplexityInputs) -> tuple[float, float]:
    """(C1, C2) for the pruning-threshold crossing n / ln(C1 n^2) > C2.

    C1 = pi^2 M / (3 delta)
    C2 = 32 sigma^2 c_stat^2 / (gap - 4L - epsilon)^2

    C2 carries radius_factor^2 so the crossing matches the radii actually
    used for pruning; at c_stat = 1 it is the theoretical constant.
    """
    cfg = inputs.config
    c1 = math.pi * math.pi * inputs.frontier_size / (3.0 * cfg.delta)
    if c1 <= 1.0:
        raise ValueError(f"mixture constant C1 must exceed 1, got {c1}")
    slack = inputs.effective_gap - cfg.epsilon
    scale = cfg.sigma * cfg.radius_factor
    c2 = 32.0 * scale * scale / (slack * slack)
    return c1, c2


def _crossing_condition(n: int, c1: float, c2: float) -> bool:
    return n / math.log(c1 * n * n) > c2


def sample_complexity_upper(inputs: ComplexityInputs):
    """Smallest n such that four stacked radii fit inside the slack gap.

    Feasible only when gap - 4L > epsilon; returns INFEASIBLE otherwise.
    The crossing of n / ln(C1 n^2) > C2 is located by exponential doubling
    followed by binary search on the monotone tail.  If the condition holds
    at the curve's minimum it holds everywhere and n = 1 is returned.
    """
    cfg = inputs.config
    if inputs.effective_gap <= cfg.epsilon:
        return INFEASIBLE
    c1, c2 = _complexity_constants(inputs)
    if c2 == 0.0:
        return 1
    # integer minimum of n / ln(C1 n^2) sits next to e / sqrt(C1)
    n_min_c = math.e / math.sqrt(c1)
    lo_cand = max(1, math.floor(n_min_c))
    hi_cand = max(1, math.ceil(n_min_c))
    if _crossing_condition(lo_cand, c1, c2) and _crossing_condition(
        hi_cand, c1, c2
    ):
        return 1
    # double along the increasing tail until the condition holds
    lo = hi_cand
    hi = max(2 * hi_cand, 2)
    while not _crossing_condition(hi, c1, c2):
        lo = hi
        hi *= 2
        if hi > 2**62:
            raise OverflowError("sample complexity exceeds 2**62")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _crossing_condition(mid, c1, c2):
            hi = mid
        else:
            lo = mid
    return hi


def sample_complexity_lambert(inputs: ComplexityInputs):
    """Closed-form crossing via the secondary real branch of Lambert W.

    n = ceil(-2 C2 W_{-1}(-1 / (2 C2 sqrt(C1))))

    The transformed argument must lie in [-1/e, 0); at exactly -1/e both
    branches coincide at W = -1.  Arguments below -1/e mean the condition
    already holds for every n >= 1 and no crossing exists; that is reported
    as a domain error rather than silently returning 1.
    """
    cfg = inputs.config
    if inputs.effective_gap <= cfg.epsilon:
        return INFEASIBLE
    c1, c2 = _complexity_constants(inputs)
    if c2 == 0.0:
        raise ValueError("Lambert route undefined for sigma = 0")
    arg = -1.0 / (2.0 * c2 * math.sqrt(c1))
    if arg < -1.0 / math.e:
        raise ValueError(
            f"Lambert W argument {arg} outside [-1/e, 0): no crossing exists"
        )
    w = special.lambertw(arg, k=-1)
    if abs(w.imag) > 1e-9:
        raise ValueError(f"Lambert W returned non-real branch value {w}")
    return max(1, math.ceil(-2.0 * c2 * w.real))


def lower_bound_samples(gap: float, config: ConfidenceConfig):
    """Information-theoretic floor on expected pulls of a suboptimal arm.

    E[N] >= 2 sigma^2 ln(1 / (4 delta)) / (gap + epsilon - 2L)^2

    Returns INFEASIBLE when gap + epsilon - 2L <= 0 (the adversary can
    reverse the empirical ordering, so no sample size suffices) and 0.0
    when delta >= 1/4 (the bound is vacuous).
    """
    if gap <= 0:
        raise ValueError(f"gap must be > 0, got {gap}")
    denom = gap + config.epsilon - 2.0 * config.bias_bound
    if denom <= 0:
        return INFEASIBLE
    if config.delta >= 0.25:
        return 0.0
    return (
        2.0
        * config.sigma
        * config.sigma
        * math.log(1.0 / (4.0 * config.delta))
        / (denom * denom)
    )


def graceful_degradation_cap(config: ConfidenceConfig) -> float:
    """Worst-case suboptimality of the returned arm: 4L + epsilon."""
    return 4.0 * config.bias_bound + config.epsilon
