"""Command-line entry point.

Subcommands:

  run     one replication of a single-cell config, record to JSON
  sweep   full replicated grid, CSV + JSON-lines outputs
  theory  closed-form bound calculators for one parameter point
  verify  ground-truth oracle suite, JSON report, exit 1 on failure

Exit codes: 0 success, 1 verification/assertion failure, 2 usage or config
error.  Output files never embed timestamps, so identical config + seed
reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .confidence import (
    ComplexityInputs,
    ConfidenceConfig,
    graceful_degradation_cap,
    is_infeasible,
    lower_bound_samples,
    sample_complexity_lambert,
    sample_complexity_upper,
    u_dist,
    u_stat,
)
from .harness import ConfigError, ExperimentConfig, run_one, run_sweep
from .oracle import (
    verify_complexity_minimality,
    verify_concentration,
    verify_safe_pruning_exhaustive,
)

OUT_ENV = "PACMCTS_OUT"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _out_dir(args) -> str:
    out = args.out or os.environ.get(OUT_ENV) or "results"
    os.makedirs(out, exist_ok=True)
    return out


def _guard_overwrite(paths: list[str], force: bool) -> None:
    existing = [p for p in paths if os.path.exists(p)]
    if existing and not force:
        raise ConfigError(
            "out", f"refusing to overwrite {existing}; pass --force to allow"
        )


def _load_config(path: str, seed_override: int | None) -> ExperimentConfig:
    config = ExperimentConfig.from_file(path)
    if seed_override is not None:
        raw = dict(config.raw)
        raw["base_seed"] = seed_override
        config = ExperimentConfig(raw)
    return config


def cmd_run(args) -> int:
    config = _load_config(args.config, args.seed)
    cells = config.cells()
    if len(cells) != 1:
        raise ConfigError(
            "grids", f"run wants exactly one cell, config has {len(cells)}"
        )
    outcome = run_one(config, cells[0], rep=0)
    out = _out_dir(args)
    path = os.path.join(out, f"{config.name}-run.json")
    _guard_overwrite([path], args.force)
    payload = {
        "name": config.name,
        "cell": cells[0].__dict__,
        "seed": outcome["seed"],
        "correct": outcome["correct"],
        "record": outcome["record"],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    rec = outcome["record"]
    print(f"policy           {rec['policy']}")
    print(f"selected arm     {rec['selected_arm']}")
    print(f"selected value   {rec['selected_true_mu']:.6g}")
    print(f"correct          {outcome['correct']}")
    print(f"samples used     {rec['total_samples']}")
    print(f"arms pruned      {len(rec['pruning_events'])}")
    print(f"terminated by    {rec['terminated_by']}")
    print(f"record           {path}")
    return EXIT_OK


def _progress(done: int, total: int) -> None:
    print(f"\rprogress {done}/{total}", end="", file=sys.stderr, flush=True)
    if done == total:
        print(file=sys.stderr)


def cmd_sweep(args) -> int:
    config = _load_config(args.config, args.seed)
    out = _out_dir(args)
    csv_path = os.path.join(out, f"{config.name}.csv")
    jsonl_path = os.path.join(out, f"{config.name}.jsonl")
    _guard_overwrite([csv_path, jsonl_path], args.force)
    result = run_sweep(config, workers=args.workers, progress=_progress)
    result.to_csv(csv_path)
    result.to_jsonl(jsonl_path)
    print(f"rows    {len(result.rows)}")
    print(f"csv     {csv_path}")
    print(f"records {jsonl_path}")
    return EXIT_OK


def cmd_theory(args) -> int:
    config = ConfidenceConfig(
        sigma=args.sigma,
        delta=args.delta,
        epsilon=args.epsilon,
        bias_bound=args.bias,
        radius_factor=args.c_stat,
    )
    inputs = ComplexityInputs(
        gap=args.gap, frontier_size=args.m_count, config=config
    )

    def fmt(value) -> str:
        if is_infeasible(value):
            return "INFEASIBLE"
        return f"{value:.6g}"

    upper = sample_complexity_upper(inputs)
    try:
        lam = sample_complexity_lambert(inputs)
    except ValueError as exc:
        lam = f"unavailable ({exc})"
    lower = lower_bound_samples(args.gap, config)

    print(f"gap              {args.gap:.6g}")
    print(f"bias bound       {args.bias:.6g}")
    print(f"u_stat(n={args.n})      {u_stat(args.n, args.m_count, config):.6g}")
    print(f"u_dist(n={args.n})      {u_dist(args.n, args.m_count, config):.6g}")
    print(f"upper complexity {fmt(upper)}  (root finding)")
    if isinstance(lam, str):
        print(f"closed form      {lam}")
    else:
        print(f"closed form      {fmt(lam)}")
    print(f"lower bound      {fmt(lower)}")
    print(f"degradation cap  {graceful_degradation_cap(config):.6g}")
    if inputs.effective_gap <= config.epsilon:
        print("separation       infeasible separation (gap - 4L <= epsilon)")
    else:
        print("separation       feasible")
    if args.gap + config.epsilon - 2.0 * args.bias <= 0:
        print("identifiability  gap structurally reversed (gap <= 2L - epsilon)")
    else:
        print("identifiability  feasible")
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = {}
    if args.config:
        with open(args.config) as fh:
            try:
                spec = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("config", f"invalid JSON ({exc})") from exc
        if not isinstance(spec, dict):
            raise ConfigError("config", "must be a JSON object")

    report = {}
    c_spec = spec.get("concentration", {})
    config = ConfidenceConfig(
        sigma=c_spec.get("sigma", 0.3),
        delta=c_spec.get("delta", 0.05),
        epsilon=0.0,
        bias_bound=c_spec.get("bias_bound", 0.1),
    )
    coverage = verify_concentration(
        config,
        m_count=c_spec.get("m_count", 10),
        horizon=c_spec.get("horizon", 1000),
        trials=c_spec.get("trials", 10_000),
        seed=c_spec.get("seed", 0),
    )
    report["concentration"] = coverage.to_dict()

    s_spec = spec.get("safety", {})
    s_config = ConfidenceConfig(
        sigma=s_spec.get("sigma", 0.2),
        delta=s_spec.get("delta", 0.05),
        epsilon=0.0,
        bias_bound=s_spec.get("bias_bound", 0.1),
    )
    safety = verify_safe_pruning_exhaustive(
        mus=s_spec.get("mus", [1.0, 0.0, 0.0, 0.0]),
        config=s_config,
        budget=s_spec.get("budget", 60),
        n_seeds=s_spec.get("n_seeds", 10_000),
        base_seed=s_spec.get("base_seed", 0),
    )
    report["safety"] = safety.to_dict()

    m_spec = spec.get("minimality", {})
    minimality = verify_complexity_minimality(
        n_inputs=m_spec.get("n_inputs", 1000), seed=m_spec.get("seed", 0)
    )
    report["minimality"] = minimality.to_dict()

    passed = all(section["passed"] for section in report.values())
    report["passed"] = passed
    text = json.dumps(report, sort_keys=True, indent=2)
    print(text)
    if args.out:
        out = _out_dir(args)
        path = os.path.join(out, "verify-report.json")
        _guard_overwrite([path], args.force)
        with open(path, "w") as fh:
            fh.write(text)
            fh.write("\n")
    return EXIT_OK if passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pacmcts",
        description="Bias-aware confidence-gated frontier search: "
        "simulation, sweeps, bound calculators, verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="single replication of a one-cell config")
    run_p.add_argument("--config", required=True)
    run_p.add_argument("--out", default=None)
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--force", action="store_true")
    run_p.set_defaults(func=cmd_run)

    sweep_p = sub.add_parser("sweep", help="replicated grid sweep to CSV/JSONL")
    sweep_p.add_argument("--config", required=True)
    sweep_p.add_argument("--out", default=None)
    sweep_p.add_argument("--seed", type=int, default=None)
    sweep_p.add_argument("--workers", type=int, default=None)
    sweep_p.add_argument("--force", action="store_true")
    sweep_p.set_defaults(func=cmd_sweep)

    theory_p = sub.add_parser("theory", help="closed-form bounds for one point")
    theory_p.add_argument("--gap", type=float, required=True)
    theory_p.add_argument("--bias", type=float, default=0.0)
    theory_p.add_argument("--sigma", type=float, required=True)
    theory_p.add_argument("--delta", type=float, default=0.05)
    theory_p.add_argument("--epsilon", type=float, default=0.0)
    theory_p.add_argument("--m-count", type=int, required=True)
    theory_p.add_argument("--c-stat", type=float, default=1.0)
    theory_p.add_argument("--n", type=int, default=1)
    theory_p.set_defaults(func=cmd_theory)

    verify_p = sub.add_parser("verify", help="ground-truth oracle suite")
    verify_p.add_argument("--config", default=None)
    verify_p.add_argument("--out", default=None)
    verify_p.add_argument("--force", action="store_true")
    verify_p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
