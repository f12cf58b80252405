"""Render figures from sweep CSV files.

This package is deliberately decoupled from the simulation library: the
only contract is the CSV schema (a ``# schema=1`` comment line, then a
header with the eleven sweep columns).  Nothing here imports or executes
the simulator.

Each figure kind declares the columns it needs; a missing column or an
empty row selection aborts before any figure object is created, so a
failed render never leaves a file behind.  Series are keyed on the
``policy`` column and drawn in CSV row order, which for sweep output is
the canonical cell order.  ``info['series']`` counts:

    robustness        one line per policy
    ablation          one bar series per L value (same in every facet)
    efficiency-grid   one bubble set per policy
    scaling           one line per policy
    degradation       two lines per policy (PCS and mean selected value)
"""

from dataclasses import dataclass

import matplotlib
import pandas as pd

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  backend must be pinned first

CENSORED = "censored"
DPI = 130

KIND_COLUMNS = {
    "robustness": ("policy", "L", "pcs", "pcs_stderr"),
    "ablation": ("policy", "L", "c_stat", "pcs", "pruning_rate"),
    "efficiency-grid": ("policy", "L", "c_stat", "N", "efficiency_multiplier"),
    "scaling": ("policy", "N", "pcs", "pcs_stderr"),
    "degradation": ("policy", "L", "pcs", "mean_selected_mu"),
}


class FigureError(ValueError):
    """The CSV cannot support the requested figure; nothing was rendered."""


@dataclass(frozen=True)
class FigureSpec:
    """One render request: a kind, an input CSV, and an output image path.

    ``policy`` optionally restricts the rows to a single policy before
    the kind's own column bindings apply.
    """

    kind: str
    csv: str
    out: str
    policy: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KIND_COLUMNS:
            known = ", ".join(sorted(KIND_COLUMNS))
            raise FigureError(f"unknown kind {self.kind!r} (choose from {known})")


def _load(spec: FigureSpec) -> pd.DataFrame:
    try:
        df = pd.read_csv(spec.csv, comment="#")
    except (OSError, UnicodeDecodeError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise FigureError(f"cannot read {spec.csv}: {exc}") from exc
    missing = [c for c in KIND_COLUMNS[spec.kind] if c not in df.columns]
    if missing:
        raise FigureError(
            f"{spec.csv} lacks columns required by {spec.kind}: {', '.join(missing)}"
        )
    if spec.policy is not None:
        df = df[df["policy"] == spec.policy]
    if df.empty:
        raise FigureError(f"empty selection for kind {spec.kind} in {spec.csv}")
    return df.reset_index(drop=True)


def _policies(df: pd.DataFrame) -> list[str]:
    return list(dict.fromkeys(df["policy"]))


def _unique_rows(df: pd.DataFrame, keys: list[str], kind: str) -> None:
    if df.duplicated(subset=keys).any():
        raise FigureError(
            f"{kind} needs one row per ({', '.join(keys)}); "
            "filter with policy= or pick another kind"
        )


def _robustness(df: pd.DataFrame, fig) -> dict:
    _unique_rows(df, ["policy", "L"], "robustness")
    ax = fig.subplots()
    for policy in _policies(df):
        sub = df[df["policy"] == policy].sort_values("L")
        ax.errorbar(
            sub["L"], sub["pcs"], yerr=2.0 * sub["pcs_stderr"],
            marker="o", capsize=3, label=policy,
        )
    ax.set_xlabel("bias bound L")
    ax.set_ylabel("probability of correct selection")
    ax.set_ylim(0.0, 1.05)
    ax.grid(alpha=0.3)
    ax.legend()
    return {"series": len(_policies(df))}


def _ablation(df: pd.DataFrame, fig) -> dict:
    # the c_stat axis only exists for radius-based policies; rows with an
    # empty c_stat (UCT) cannot appear on this chart
    df = df[df["c_stat"].notna()]
    if df.empty:
        raise FigureError("ablation: no rows with a c_stat value")
    policies = _policies(df)
    l_values = sorted(df["L"].unique())
    c_values = sorted(df["c_stat"].unique())
    axes = fig.subplots(1, len(policies), sharey=True, squeeze=False)[0]
    width = 0.8 / len(l_values)
    for ax, policy in zip(axes, policies):
        sub = df[df["policy"] == policy]
        _unique_rows(sub, ["L", "c_stat"], "ablation")
        cell = {(r.L, r.c_stat): r for r in sub.itertuples()}
        for i, l_value in enumerate(l_values):
            offset = (i - (len(l_values) - 1) / 2.0) * width
            xs, bars, dots = [], [], []
            for j, c in enumerate(c_values):
                row = cell.get((l_value, c))
                if row is None:
                    continue
                xs.append(j + offset)
                bars.append(row.pruning_rate)
                dots.append(row.pcs)
            ax.bar(xs, bars, width=width, label=f"L={l_value:g}")
            ax.plot(xs, dots, linestyle="none", marker="x", color="black")
        ax.set_xticks(range(len(c_values)))
        ax.set_xticklabels([f"{c:g}" for c in c_values])
        ax.set_xlabel("c_stat")
        ax.set_title(policy)
        ax.set_ylim(0.0, 1.05)
        ax.grid(alpha=0.3, axis="y")
    axes[0].set_ylabel("pruning rate (bars), PCS (x)")
    axes[-1].legend(fontsize="small")
    return {"series": len(l_values), "facets": len(policies)}


def _efficiency_grid(df: pd.DataFrame, fig) -> dict:
    raw = df["efficiency_multiplier"]
    censored_mask = raw.astype(str).str.strip().eq(CENSORED)
    multiplier = pd.to_numeric(raw.mask(censored_mask), errors="coerce")
    if not censored_mask.any() and multiplier.isna().all():
        raise FigureError("efficiency-grid: no efficiency_multiplier data")
    ax = fig.subplots()
    censored_total = 0
    for policy in _policies(df):
        mine = df["policy"] == policy
        solid = mine & multiplier.notna()
        # bubble area tracks the baseline-to-policy budget ratio; the
        # reference circle at multiplier 1.0 has area 300
        ax.scatter(
            df.loc[solid, "L"], df.loc[solid, "c_stat"],
            s=300.0 * multiplier[solid], label=policy, alpha=0.75,
        )
        hollow = mine & censored_mask
        if hollow.any():
            censored_total += int(hollow.sum())
            ax.scatter(
                df.loc[hollow, "L"], df.loc[hollow, "c_stat"],
                s=300.0, facecolors="none", edgecolors="black",
                linestyles="dashed",
            )
    for row, mult, cens in zip(df.itertuples(), multiplier, censored_mask):
        text = CENSORED if cens else f"{mult:.2f}"
        ax.annotate(
            f"N={row.N}\n{text}", (row.L, row.c_stat),
            textcoords="offset points", xytext=(10, 4), fontsize="x-small",
        )
    ax.set_xlabel("bias bound L")
    ax.set_ylabel("c_stat")
    ax.grid(alpha=0.3)
    ax.legend()
    ax.margins(0.25)
    return {"series": len(_policies(df)), "censored": censored_total}


def _scaling(df: pd.DataFrame, fig) -> dict:
    _unique_rows(df, ["policy", "N"], "scaling")
    ax = fig.subplots()
    for policy in _policies(df):
        sub = df[df["policy"] == policy].sort_values("N")
        ax.errorbar(
            sub["N"], sub["pcs"], yerr=2.0 * sub["pcs_stderr"],
            marker="o", capsize=3, label=policy,
        )
    ax.set_xlabel("budget N")
    ax.set_ylabel("probability of correct selection")
    ax.set_ylim(0.0, 1.05)
    ax.grid(alpha=0.3)
    ax.legend()
    return {"series": len(_policies(df))}


def _degradation(df: pd.DataFrame, fig) -> dict:
    _unique_rows(df, ["policy", "L"], "degradation")
    ax = fig.subplots()
    twin = ax.twinx()
    for policy in _policies(df):
        sub = df[df["policy"] == policy].sort_values("L")
        ax.plot(sub["L"], sub["pcs"], marker="o", label=f"{policy} PCS")
        twin.plot(
            sub["L"], sub["mean_selected_mu"],
            marker="s", linestyle="--", label=f"{policy} selected value",
        )
    ax.set_xlabel("bias bound L")
    ax.set_ylabel("probability of correct selection")
    ax.set_ylim(0.0, 1.05)
    twin.set_ylabel("mean selected true value")
    ax.grid(alpha=0.3)
    lines = list(ax.get_lines()) + list(twin.get_lines())
    ax.legend(lines, [line.get_label() for line in lines], fontsize="small")
    return {"series": 2 * len(_policies(df))}


_BUILDERS = {
    "robustness": _robustness,
    "ablation": _ablation,
    "efficiency-grid": _efficiency_grid,
    "scaling": _scaling,
    "degradation": _degradation,
}


def _figsize(kind: str, df: pd.DataFrame) -> tuple[float, float]:
    if kind == "ablation":
        facets = df.loc[df["c_stat"].notna(), "policy"].nunique()
        return (4.0 * max(facets, 1), 3.8)
    return (6.4, 4.2)


def build_figure(spec: FigureSpec):
    """Validate, then build the matplotlib figure without saving it.

    Returns (figure, info).  Exposed separately from render so tests can
    inspect the drawn artists.
    """
    df = _load(spec)
    fig = plt.figure(figsize=_figsize(spec.kind, df), dpi=DPI)
    try:
        info = _BUILDERS[spec.kind](df, fig)
    except Exception:
        plt.close(fig)
        raise
    fig.suptitle(spec.kind)
    info.update(
        kind=spec.kind,
        out=spec.out,
        rows=len(df),
        width_px=round(fig.get_figwidth() * DPI),
        height_px=round(fig.get_figheight() * DPI),
    )
    return fig, info


def render(spec: FigureSpec) -> dict:
    """Render one figure to spec.out and return its summary info."""
    fig, info = build_figure(spec)
    try:
        fig.savefig(spec.out, dpi=DPI, bbox_inches=None)
    finally:
        plt.close(fig)
    return info
