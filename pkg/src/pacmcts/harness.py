"""Replicated experiments over (policy, L, sigma, N, c_stat) grids.

A sweep enumerates grid cells in a canonical order, runs R replications per
cell, and aggregates selection accuracy and pruning statistics.  Every
replication's seed is a stable hash of (base_seed, cell values, index), so
results never depend on grid ordering, worker count, or scheduling; rerunning
the same config yields byte-identical output files.

Two output artifacts per sweep: a CSV with one aggregate row per cell
(fixed column order, schema comment in row 1) and a JSON-lines file with one
raw run record per replication.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bandit import (
    PerArmVector,
    PerStepUniform,
    StaticAdversarial,
    TopKAdversarial,
    TreeSpec,
    Unbiased,
    make_flat_instance,
    make_tree_instance,
)
from .confidence import ConfidenceConfig
from .engine import (
    EngineConfig,
    Naive,
    NoPruning,
    Proportion,
    StrictPAC,
    run_baseline_uct,
    run_pac_mcts,
    run_proportion_pruning,
)
from .fastpath import run_greedy_cell, run_uct_cell
from .seeding import stable_seed

SCHEMA_VERSION = 1
CSV_COLUMNS = (
    "policy",
    "L",
    "sigma",
    "N",
    "c_stat",
    "pcs",
    "pcs_stderr",
    "pruning_rate",
    "mean_selected_mu",
    "mean_samples",
    "efficiency_multiplier",
)
CENSORED = "censored"

_BIAS_MODELS = (
    "unbiased",
    "static-adversarial",
    "top-k",
    "per-arm",
    "per-step-uniform",
    "pessimize-optimal",
)
_DEFAULT_MAX_CELLS = 4096
_CHUNK_REPS = 64


class ConfigError(ValueError):
    """Invalid experiment config; message names the offending field."""

    def __init__(self, field_name: str, message: str):
        self.field_name = field_name
        super().__init__(f"{field_name}: {message}")


def _require(cond: bool, field_name: str, message: str) -> None:
    if not cond:
        raise ConfigError(field_name, message)


@dataclass(frozen=True)
class CellKey:
    """One grid cell; c_stat is None for policies that do not use a radius."""

    policy: str
    L: float
    sigma: float
    N: int
    c_stat: float | None

    def seed_parts(self) -> tuple:
        return (self.policy, self.L, self.sigma, self.N, self.c_stat)


class ExperimentConfig:
    """Validated sweep description, loadable from a JSON dict.

    Required keys: name, replications, base_seed, instance, bias, grids.
    Optional: delta, epsilon, allocation, n_min0, dynamic_c_bias,
    assumed_bias_bound, uct_exploration, proportion_min_pulls, max_cells,
    efficiency.
    """

    def __init__(self, raw: dict):
        _require(isinstance(raw, dict), "config", "must be a JSON object")
        self.raw = raw
        self.name = raw.get("name")
        _require(
            isinstance(self.name, str) and self.name != "",
            "name",
            "must be a non-empty string",
        )
        self.replications = raw.get("replications")
        _require(
            isinstance(self.replications, int) and self.replications >= 1,
            "replications",
            "must be an integer >= 1",
        )
        self.base_seed = raw.get("base_seed")
        _require(
            isinstance(self.base_seed, int), "base_seed", "must be an integer"
        )

        inst = raw.get("instance")
        _require(isinstance(inst, dict), "instance", "must be an object")
        self.kind = inst.get("kind", "flat")
        _require(
            self.kind in ("flat", "tree"), "instance.kind", "must be flat or tree"
        )
        if self.kind == "flat":
            self.mus = inst.get("mus")
            if self.mus is not None:
                _require(
                    isinstance(self.mus, list) and len(self.mus) >= 2,
                    "instance.mus",
                    "must be a list of at least 2 numbers",
                )
                self.m_count = len(self.mus)
                self.gap = None
            else:
                self.m_count = inst.get("m_count")
                _require(
                    isinstance(self.m_count, int) and self.m_count >= 2,
                    "instance.m_count",
                    "must be an integer >= 2",
                )
                self.gap = inst.get("gap")
                _require(
                    isinstance(self.gap, (int, float)) and self.gap > 0,
                    "instance.gap",
                    "must be a number > 0",
                )
            self.baseline = float(inst.get("baseline", 0.0))
            self.tree_spec = None
        else:
            try:
                self.tree_spec = TreeSpec(
                    branching=inst["branching"],
                    depth=inst["depth"],
                    gap=inst["gap"],
                    optimal_path=tuple(inst["optimal_path"]),
                    depth_discount=inst.get("depth_discount", 1.0),
                    root_value=inst.get("root_value", 1.0),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError("instance", str(exc)) from exc
            self.mus = None
            self.m_count = 1
            self.gap = self.tree_spec.gap

        bias = raw.get("bias")
        _require(isinstance(bias, dict), "bias", "must be an object")
        self.bias_model = bias.get("model")
        _require(
            self.bias_model in _BIAS_MODELS,
            "bias.model",
            f"must be one of {_BIAS_MODELS}",
        )
        self.bias_k = bias.get("k")
        if self.bias_model == "top-k":
            _require(
                isinstance(self.bias_k, int) and self.bias_k >= 1,
                "bias.k",
                "must be an integer >= 1",
            )
        self.bias_offsets = bias.get("offsets")
        if self.bias_model == "per-arm":
            _require(
                isinstance(self.bias_offsets, list),
                "bias.offsets",
                "must be a list of per-arm offsets",
            )

        grids = raw.get("grids")
        _require(isinstance(grids, dict), "grids", "must be an object")
        self.policies = grids.get("policy")
        self.l_grid = grids.get("L")
        self.sigma_grid = grids.get("sigma")
        self.n_grid = grids.get("N")
        self.c_stat_grid = grids.get("c_stat")
        for key, grid in (
            ("policy", self.policies),
            ("L", self.l_grid),
            ("sigma", self.sigma_grid),
            ("N", self.n_grid),
            ("c_stat", self.c_stat_grid),
        ):
            _require(
                isinstance(grid, list) and len(grid) >= 1,
                f"grids.{key}",
                "must be a non-empty list",
            )
        for p in self.policies:
            _parse_policy(p)
        for v in self.l_grid:
            _require(
                isinstance(v, (int, float)) and v >= 0, "grids.L", "entries must be >= 0"
            )
        for v in self.sigma_grid:
            _require(
                isinstance(v, (int, float)) and v > 0,
                "grids.sigma",
                "entries must be > 0",
            )
        for v in self.n_grid:
            _require(
                isinstance(v, int) and v >= 1, "grids.N", "entries must be integers >= 1"
            )
        for v in self.c_stat_grid:
            _require(
                isinstance(v, (int, float)) and v > 0,
                "grids.c_stat",
                "entries must be > 0",
            )

        self.delta = float(raw.get("delta", 0.05))
        _require(0.0 < self.delta < 1.0, "delta", "must lie in (0, 1)")
        self.epsilon = float(raw.get("epsilon", 0.0))
        _require(self.epsilon >= 0.0, "epsilon", "must be >= 0")
        self.allocation = raw.get("allocation", "round-robin")
        _require(
            self.allocation in ("round-robin", "ucb-greedy"),
            "allocation",
            "must be round-robin or ucb-greedy",
        )
        self.n_min0 = raw.get("n_min0", 1)
        _require(
            isinstance(self.n_min0, int) and self.n_min0 >= 1,
            "n_min0",
            "must be an integer >= 1",
        )
        self.dynamic_c_bias = raw.get("dynamic_c_bias", 1.0)
        _require(
            isinstance(self.dynamic_c_bias, (int, float)) and self.dynamic_c_bias > 0,
            "dynamic_c_bias",
            "must be a number > 0",
        )
        self.assumed_bias_bound = raw.get("assumed_bias_bound")
        if self.assumed_bias_bound is not None:
            _require(
                isinstance(self.assumed_bias_bound, (int, float))
                and self.assumed_bias_bound >= 0,
                "assumed_bias_bound",
                "must be a number >= 0",
            )
        self.uct_exploration = raw.get("uct_exploration")
        if self.uct_exploration is not None:
            _require(
                isinstance(self.uct_exploration, (int, float))
                and self.uct_exploration > 0,
                "uct_exploration",
                "must be a number > 0",
            )
        self.proportion_min_pulls = raw.get("proportion_min_pulls", 1)
        _require(
            isinstance(self.proportion_min_pulls, int)
            and self.proportion_min_pulls >= 1,
            "proportion_min_pulls",
            "must be an integer >= 1",
        )
        self.max_cells = raw.get("max_cells", _DEFAULT_MAX_CELLS)
        _require(
            isinstance(self.max_cells, int) and self.max_cells >= 1,
            "max_cells",
            "must be an integer >= 1",
        )

        self.efficiency = raw.get("efficiency")
        if self.efficiency is not None:
            _require(
                isinstance(self.efficiency, dict), "efficiency", "must be an object"
            )
            target = self.efficiency.get("pcs_target", 0.90)
            _require(
                isinstance(target, (int, float)) and 0 < target < 1,
                "efficiency.pcs_target",
                "must lie in (0, 1)",
            )
            base = self.efficiency.get("base_budget")
            _require(
                isinstance(base, int) and base >= 1,
                "efficiency.base_budget",
                "must be an integer >= 1",
            )
            factor = self.efficiency.get("max_factor", 64)
            _require(
                isinstance(factor, int) and factor >= 2,
                "efficiency.max_factor",
                "must be an integer >= 2",
            )
            baseline = self.efficiency.get("baseline", "uct")
            _parse_policy(baseline)
            self.efficiency = {
                "pcs_target": float(target),
                "base_budget": base,
                "max_factor": factor,
                "baseline": baseline,
            }

        if self.kind == "tree":
            for p in self.policies:
                _require(
                    not p.startswith(("uct", "proportion")),
                    "grids.policy",
                    f"{p} runs only on flat frontiers",
                )
        if self.bias_model == "per-arm":
            _require(
                self.kind == "flat" and len(self.bias_offsets) == self.m_count,
                "bias.offsets",
                "must match the flat arm count",
            )

        n_cells = len(self.cells())
        _require(
            n_cells <= self.max_cells,
            "grids",
            f"{n_cells} cells exceed the ceiling of {self.max_cells}",
        )

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("config", f"invalid JSON ({exc})") from exc
        return cls(raw)

    def cells(self) -> list[CellKey]:
        """Canonical cell enumeration.

        Policies that ignore the statistical radius (the UCT baseline)
        collapse the c_stat axis to a single cell per (L, sigma, N).
        """
        out = []
        for policy in self.policies:
            uses_radius = not policy.startswith("uct")
            c_values = self.c_stat_grid if uses_radius else [None]
            for L in self.l_grid:
                for sigma in self.sigma_grid:
                    for n in self.n_grid:
                        for c in c_values:
                            out.append(
                                CellKey(
                                    policy=policy,
                                    L=float(L),
                                    sigma=float(sigma),
                                    N=int(n),
                                    c_stat=None if c is None else float(c),
                                )
                            )
        return out


def _parse_policy(label: str):
    """Policy label -> (kind, parameter). Raises ConfigError on junk."""
    _require(isinstance(label, str), "grids.policy", "entries must be strings")
    if label in ("strict-pac", "strict-pac-dynamic", "naive", "none"):
        return label, None
    if label == "uct":
        return "uct", None
    if label.startswith("uct:"):
        try:
            c = float(label.split(":", 1)[1])
        except ValueError:
            raise ConfigError("grids.policy", f"bad exploration constant in {label!r}")
        _require(c > 0, "grids.policy", f"exploration constant must be > 0 in {label!r}")
        return "uct", c
    if label.startswith("proportion:"):
        try:
            frac = float(label.split(":", 1)[1])
        except ValueError:
            raise ConfigError("grids.policy", f"bad fraction in {label!r}")
        _require(
            0.0 <= frac < 1.0, "grids.policy", f"fraction must lie in [0,1) in {label!r}"
        )
        return "proportion", frac
    raise ConfigError("grids.policy", f"unknown policy {label!r}")


def _build_bias(config: ExperimentConfig, L: float, mus: np.ndarray | None):
    model = config.bias_model
    if model == "unbiased" or L == 0.0:
        return Unbiased()
    if model == "static-adversarial":
        return StaticAdversarial(L)
    if model == "top-k":
        return TopKAdversarial(L, config.bias_k)
    if model == "per-step-uniform":
        return PerStepUniform(L)
    if model == "pessimize-optimal":
        offsets = np.zeros(len(mus))
        offsets[int(np.argmax(mus))] = -L
        return PerArmVector(offsets)
    if model == "per-arm":
        offsets = np.asarray(config.bias_offsets, dtype=np.float64)
        worst = float(np.max(np.abs(offsets))) if len(offsets) else 0.0
        _require(
            abs(worst - L) < 1e-9,
            "grids.L",
            f"per-arm offsets have magnitude {worst}, cell L is {L}",
        )
        return PerArmVector(offsets)
    raise ConfigError("bias.model", f"unsupported model {model!r}")


def _flat_mus(config: ExperimentConfig) -> np.ndarray:
    if config.mus is not None:
        return np.asarray(config.mus, dtype=np.float64)
    mus = np.full(config.m_count, config.baseline, dtype=np.float64)
    mus[0] = config.baseline + config.gap
    return mus


def run_one(config: ExperimentConfig, cell: CellKey, rep: int) -> dict:
    """One replication of one cell; returns a flat summary dict."""
    seed = stable_seed(config.base_seed, *cell.seed_parts(), rep)
    bound = config.assumed_bias_bound
    conf = ConfidenceConfig(
        sigma=cell.sigma,
        delta=config.delta,
        epsilon=config.epsilon,
        bias_bound=cell.L if bound is None else bound,
        radius_factor=1.0 if cell.c_stat is None else cell.c_stat,
    )

    kind, param = _parse_policy(cell.policy)
    if config.kind == "flat":
        mus = _flat_mus(config)
        bias = _build_bias(config, cell.L, mus)
        instance = make_flat_instance(
            len(mus), config.gap or 1.0, bias, conf, seed, mus=mus
        )
        optimal_mu = float(mus[instance.optimal_arm])
    else:
        bias = _build_bias(config, cell.L, None)
        instance = make_tree_instance(config.tree_spec, bias, conf, seed)
        optimal_mu = config.tree_spec.optimal_value

    if kind == "uct":
        c = param if param is not None else config.uct_exploration
        record = run_baseline_uct(instance, cell.N, exploration_const=c)
    elif kind == "proportion":
        econf = EngineConfig(
            config=conf,
            policy=Proportion(param, min_pulls=config.proportion_min_pulls),
            budget=cell.N,
        )
        record = run_proportion_pruning(instance, econf)
    else:
        policy = {
            "strict-pac": StrictPAC(),
            "strict-pac-dynamic": StrictPAC(),
            "naive": Naive(),
            "none": NoPruning(),
        }[kind]
        econf = EngineConfig(
            config=conf,
            policy=policy,
            budget=cell.N,
            allocation=config.allocation,
            dynamic_bias=config.dynamic_c_bias if kind.endswith("dynamic") else None,
            depth_discount=(
                config.tree_spec.depth_discount if config.kind == "tree" else 1.0
            ),
            n_min0=config.n_min0,
        )
        record = run_pac_mcts(instance, econf)

    if config.kind == "flat":
        correct = record.selected_arm == instance.optimal_arm
    else:
        correct = instance.is_on_optimal_path(
            record.selected_arm
        ) and instance.depth(record.selected_arm) == config.tree_spec.depth
    removable = max(instance.m_count - 1, 1)
    return {
        "rep": rep,
        "seed": seed,
        "correct": bool(correct),
        "selected_mu": record.selected_true_mu,
        "optimal_mu": optimal_mu,
        "samples": record.total_samples,
        "arms_pruned": record.arms_pruned,
        "pruning_rate": record.arms_pruned / removable,
        "record": record.to_dict(),
    }


def _fast_cell(
    config: ExperimentConfig, cell: CellKey, reps: list[int]
) -> list[dict] | None:
    """Whole-cell vectorized execution when the cell qualifies, else None.

    Output is identical to looping run_one; the fastpath tests pin that.
    """
    if config.kind != "flat":
        return None
    kind, param = _parse_policy(cell.policy)
    bound = config.assumed_bias_bound
    conf = ConfidenceConfig(
        sigma=cell.sigma,
        delta=config.delta,
        epsilon=config.epsilon,
        bias_bound=cell.L if bound is None else bound,
        radius_factor=1.0 if cell.c_stat is None else cell.c_stat,
    )
    mus = _flat_mus(config)
    bias = _build_bias(config, cell.L, mus)
    if bias.per_step_amplitude > 0.0:
        return None
    seeds = [stable_seed(config.base_seed, *cell.seed_parts(), rep) for rep in reps]
    # Builds one probe instance so validation, optimal-arm resolution, and
    # offsets come from the same code the sequential path runs.
    probe = make_flat_instance(
        len(mus), config.gap or 1.0, bias, conf, seeds[0], mus=mus
    )
    if kind == "uct":
        if cell.N < probe.m_count:
            return None
        c = param if param is not None else config.uct_exploration
        records = run_uct_cell(
            mus, probe.offsets, cell.sigma, cell.N, seeds, exploration_const=c
        )
    elif kind in ("strict-pac", "naive", "none") and config.allocation == "ucb-greedy":
        if cell.N < config.n_min0 * probe.m_count:
            return None
        records = run_greedy_cell(
            mus, probe.offsets, conf, kind, cell.N, seeds, n_min0=config.n_min0
        )
    else:
        return None
    removable = max(probe.m_count - 1, 1)
    optimal_mu = float(mus[probe.optimal_arm])
    return [
        {
            "rep": rep,
            "seed": seed,
            "correct": bool(record.selected_arm == probe.optimal_arm),
            "selected_mu": record.selected_true_mu,
            "optimal_mu": optimal_mu,
            "samples": record.total_samples,
            "arms_pruned": record.arms_pruned,
            "pruning_rate": record.arms_pruned / removable,
            "record": record.to_dict(),
        }
        for rep, seed, record in zip(reps, seeds, records)
    ]


def _run_chunk(raw_config: dict, cell: CellKey, reps: list[int]) -> list[dict]:
    config = ExperimentConfig(raw_config)
    fast = _fast_cell(config, cell, reps)
    if fast is not None:
        return fast
    return [run_one(config, cell, rep) for rep in reps]


@dataclass
class SweepResult:
    """Aggregated rows plus raw per-replication records, both in canonical
    cell order."""

    rows: list[dict]
    records: list[dict] = field(default_factory=list)

    def row_for(self, **match) -> dict:
        hits = [
            r for r in self.rows if all(r[k] == v for k, v in match.items())
        ]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} rows match {match}")
        return hits[0]

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(f"# schema={SCHEMA_VERSION}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in self.rows:
                writer.writerow([_format_field(row[c]) for c in CSV_COLUMNS])

    def to_jsonl(self, path: str) -> None:
        with open(path, "w") as fh:
            for rec in self.records:
                fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")))
                fh.write("\n")


def _format_field(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def read_result_csv(path: str) -> list[dict]:
    """Parse a sweep CSV back into typed row dicts (inverse of to_csv)."""
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("# schema="):
            raise ValueError(f"{path} is missing the schema comment row")
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(
                f"{path} columns {reader.fieldnames} != expected {list(CSV_COLUMNS)}"
            )
        rows = []
        for raw in reader:
            row: dict = dict(raw)
            for key in ("L", "sigma", "pcs", "pcs_stderr", "pruning_rate",
                        "mean_selected_mu", "mean_samples"):
                row[key] = float(raw[key])
            row["N"] = int(raw["N"])
            row["c_stat"] = float(raw["c_stat"]) if raw["c_stat"] else None
            eff = raw["efficiency_multiplier"]
            if eff == "":
                row["efficiency_multiplier"] = None
            elif eff == CENSORED:
                row["efficiency_multiplier"] = CENSORED
            else:
                row["efficiency_multiplier"] = float(eff)
            rows.append(row)
        return rows


def _aggregate(cell: CellKey, outcomes: list[dict], replications: int) -> dict:
    pcs = sum(o["correct"] for o in outcomes) / replications
    return {
        "policy": cell.policy,
        "L": cell.L,
        "sigma": cell.sigma,
        "N": cell.N,
        "c_stat": cell.c_stat,
        "pcs": pcs,
        "pcs_stderr": math.sqrt(pcs * (1.0 - pcs) / replications),
        "pruning_rate": sum(o["pruning_rate"] for o in outcomes) / replications,
        "mean_selected_mu": sum(o["selected_mu"] for o in outcomes) / replications,
        "mean_samples": sum(o["samples"] for o in outcomes) / replications,
        "efficiency_multiplier": None,
    }


def _record_entry(cell: CellKey, outcome: dict) -> dict:
    return {
        "cell": {
            "policy": cell.policy,
            "L": cell.L,
            "sigma": cell.sigma,
            "N": cell.N,
            "c_stat": cell.c_stat,
        },
        "rep": outcome["rep"],
        "seed": outcome["seed"],
        "correct": outcome["correct"],
        "optimal_mu": outcome["optimal_mu"],
        "record": outcome["record"],
    }


def run_sweep(
    config: ExperimentConfig,
    workers: int | None = None,
    progress=None,
    keep_records: bool = True,
) -> SweepResult:
    """Run every cell for R replications and aggregate.

    ``workers`` = 1 executes inline; otherwise cells are chunked across a
    process pool.  Output ordering and content are identical either way.
    """
    if config.efficiency is not None:
        return run_efficiency(config, workers=workers, progress=progress)
    cells = config.cells()
    tasks = []
    for ci, cell in enumerate(cells):
        reps = list(range(config.replications))
        for i in range(0, len(reps), _CHUNK_REPS):
            tasks.append((ci, cell, reps[i : i + _CHUNK_REPS]))

    per_cell: dict[int, list[dict]] = {ci: [] for ci in range(len(cells))}
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(tasks) == 1:
        for ci, cell, reps in tasks:
            per_cell[ci].extend(_run_chunk(config.raw, cell, reps))
            if progress is not None:
                progress(len([1 for v in per_cell.values() if v]), len(cells))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                (ci, pool.submit(_run_chunk, config.raw, cell, reps))
                for ci, cell, reps in tasks
            ]
            done = 0
            for ci, fut in futures:
                per_cell[ci].extend(fut.result())
                done += 1
                if progress is not None:
                    progress(done, len(tasks))

    rows = []
    records = []
    for ci, cell in enumerate(cells):
        outcomes = sorted(per_cell[ci], key=lambda o: o["rep"])
        rows.append(_aggregate(cell, outcomes, config.replications))
        if keep_records:
            records.extend(_record_entry(cell, o) for o in outcomes)
    return SweepResult(rows=rows, records=records)


def _pcs_probe(
    config: ExperimentConfig,
    policy: str,
    L: float,
    sigma: float,
    c_stat: float | None,
    budget: int,
    workers: int,
) -> float:
    cell = CellKey(policy=policy, L=L, sigma=sigma, N=budget, c_stat=c_stat)
    reps = list(range(config.replications))
    if workers <= 1:
        outcomes = _run_chunk(config.raw, cell, reps)
    else:
        chunks = [reps[i : i + _CHUNK_REPS] for i in range(0, len(reps), _CHUNK_REPS)]
        outcomes = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(
                _run_chunk, [config.raw] * len(chunks), [cell] * len(chunks), chunks
            ):
                outcomes.extend(part)
    return sum(o["correct"] for o in outcomes) / config.replications


def budget_to_target(
    config: ExperimentConfig,
    policy: str,
    L: float,
    sigma: float,
    c_stat: float | None,
    workers: int = 1,
) -> int | None:
    """Smallest budget reaching the target PCS on a doubling-plus-bisection
    schedule, or None when censored at max_factor * base_budget.

    The bisection stops at a resolution of base_budget / 16, so the returned
    budget is schedule-minimal rather than integer-minimal.
    """
    eff = config.efficiency
    target = eff["pcs_target"]
    base = eff["base_budget"]
    cap = base * eff["max_factor"]

    def probe(n: int) -> float:
        return _pcs_probe(config, policy, L, sigma, c_stat, n, workers)

    lo, hi = None, None
    n = base
    while n <= cap:
        if probe(n) >= target:
            hi = n
            break
        lo = n
        n *= 2
    if hi is None:
        return None
    if lo is None:
        return hi
    resolution = max(1, base // 16)
    while hi - lo > resolution:
        mid = (lo + hi) // 2
        if probe(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def run_efficiency(
    config: ExperimentConfig,
    workers: int | None = None,
    progress=None,
) -> SweepResult:
    """Budget-search sweep: for each (L, sigma, c_stat) cell find the budget
    at which each policy reaches the target PCS, then report the baseline-to-
    policy budget ratio on the policy's row.

    Censored searches report the cap budget, the PCS achieved there, and the
    literal marker in the multiplier column.
    """
    eff = config.efficiency
    if eff is None:
        raise ConfigError("efficiency", "missing efficiency block")
    if workers is None:
        workers = os.cpu_count() or 1
    baseline = eff["baseline"]
    cap = eff["base_budget"] * eff["max_factor"]
    rows = []
    total = len(config.policies) * len(config.l_grid) * len(config.sigma_grid)
    done = 0
    for policy in config.policies:
        uses_radius = not policy.startswith("uct")
        c_values = config.c_stat_grid if uses_radius else [None]
        for L in config.l_grid:
            for sigma in config.sigma_grid:
                for c_stat in c_values:
                    n_policy = budget_to_target(
                        config, policy, float(L), float(sigma), c_stat, workers
                    )
                    base_c = None if baseline.startswith("uct") else c_stat
                    n_base = budget_to_target(
                        config, baseline, float(L), float(sigma), base_c, workers
                    )
                    censored = n_policy is None or n_base is None
                    n_report = cap if n_policy is None else n_policy
                    cell = CellKey(
                        policy=policy,
                        L=float(L),
                        sigma=float(sigma),
                        N=n_report,
                        c_stat=c_stat,
                    )
                    pcs = _pcs_probe(
                        config, policy, cell.L, cell.sigma, c_stat, n_report, workers
                    )
                    row = {
                        "policy": policy,
                        "L": cell.L,
                        "sigma": cell.sigma,
                        "N": n_report,
                        "c_stat": c_stat,
                        "pcs": pcs,
                        "pcs_stderr": math.sqrt(
                            pcs * (1.0 - pcs) / config.replications
                        ),
                        "pruning_rate": float("nan"),
                        "mean_selected_mu": float("nan"),
                        "mean_samples": float(n_report),
                        "efficiency_multiplier": (
                            CENSORED if censored else n_base / n_policy
                        ),
                    }
                    rows.append(row)
                done += 1
                if progress is not None:
                    progress(done, total)
    return SweepResult(rows=rows, records=[])


def two_proportion_z(successes_a: int, successes_b: int, trials: int) -> float:
    """One-sided z statistic for PCS(a) > PCS(b) with equal trial counts."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    pa = successes_a / trials
    pb = successes_b / trials
    pooled = (successes_a + successes_b) / (2 * trials)
    if pooled in (0.0, 1.0):
        return 0.0
    se = math.sqrt(pooled * (1.0 - pooled) * 2.0 / trials)
    return (pa - pb) / se


def scaling_curve(config: ExperimentConfig, workers: int | None = None):
    """(N, pcs, stderr) series for a single-policy budget sweep, plus a flag
    for whether each step increases by more than the pooled two-sigma noise."""
    if len(config.policies) != 1:
        raise ConfigError("grids.policy", "scaling curve wants exactly one policy")
    result = run_sweep(config, workers=workers, keep_records=False)
    series = sorted(
        ((r["N"], r["pcs"], r["pcs_stderr"]) for r in result.rows),
        key=lambda t: t[0],
    )
    steps_ok = all(
        b_pcs - a_pcs > 2.0 * math.hypot(a_se, b_se)
        for (_, a_pcs, a_se), (_, b_pcs, b_se) in zip(series, series[1:])
    )
    return series, steps_ok


def degradation_study(
    config: ExperimentConfig, workers: int | None = None
) -> list[dict]:
    """Per-L rows of (L, pcs, mean selected value, cap-exceedance frequency).

    The cap is 4L + epsilon; exceedance counts replications whose selected
    arm's true value fell further than that below the optimum.
    """
    result = run_sweep(config, workers=workers, keep_records=True)
    per_cell: dict[tuple, dict] = {}
    for rec in result.records:
        cell = rec["cell"]
        key = (cell["policy"], cell["L"], cell["sigma"], cell["N"], cell["c_stat"])
        agg = per_cell.setdefault(key, {"n": 0, "exceed": 0})
        agg["n"] += 1
        shortfall = rec["optimal_mu"] - rec["record"]["selected_true_mu"]
        cap = 4.0 * cell["L"] + config.epsilon
        if shortfall > cap + 1e-12:
            agg["exceed"] += 1
    rows = []
    for row in result.rows:
        key = (row["policy"], row["L"], row["sigma"], row["N"], row["c_stat"])
        agg = per_cell[key]
        rows.append(
            {
                **row,
                "cap": 4.0 * row["L"] + config.epsilon,
                "cap_exceedance": agg["exceed"] / agg["n"],
            }
        )
    return rows
