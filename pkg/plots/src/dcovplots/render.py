"""Render experiment result CSVs into figure images.

Two figure kinds are supported:

* ``boxplot_grid``: one facet per group value (Hurst exponent, tail index,
  process tag), boxplots of the statistic over the x column inside each facet.
* ``histogram_overlay``: Monte Carlo values of the normalized statistic
  (blue) overlaid with their bootstrap reference sample (pink), faceted by
  group and sample size.

Rendering is a pure function of the CSV: axis ranges and facet layout are
recomputed from the data, never hard-coded, and are returned as a PlotSpec so
reruns can be compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd

REQUIRED_COLUMNS = ("experiment", "replicate", "n", "p", "family", "rho",
                    "statistic", "value")

MONTE_CARLO_COLOR = "blue"
BOOTSTRAP_COLOR = "pink"

KINDS = ("boxplot_grid", "histogram_overlay")


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class PlotJob:
    input_csv: str
    kind: str
    output: str
    facet_by: tuple[str, ...] = ("family",)
    x_column: str = "n"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")


@dataclass(frozen=True)
class PlotSpec:
    """Deterministic description of a rendered figure."""

    kind: str
    facets: tuple
    group_counts: tuple[int, ...]
    y_limits: tuple[float, float]
    colors: tuple[str, ...] = ()


def _load(job: PlotJob) -> pd.DataFrame:
    df = pd.read_csv(job.input_csv)
    missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
    if missing:
        raise SchemaError(f"{job.input_csv}: missing column {missing[0]!r}")
    for col in job.facet_by + (job.x_column,):
        if col not in df.columns:
            raise SchemaError(f"{job.input_csv}: missing column {col!r}")
    if df.empty:
        raise SchemaError(f"{job.input_csv}: no data rows")
    return df


def _padded_limits(values) -> tuple[float, float]:
    lo, hi = float(values.min()), float(values.max())
    pad = 0.05 * (hi - lo) if hi > lo else 0.05 * max(abs(hi), 1.0)
    return lo - pad, hi + pad


def _facet_key(df: pd.DataFrame, columns: tuple[str, ...]):
    if len(columns) == 1:
        return df[columns[0]]
    return list(zip(*(df[c] for c in columns)))


def _render_boxplot_grid(job: PlotJob, df: pd.DataFrame) -> PlotSpec:
    df = df.copy()
    df["_facet"] = _facet_key(df, job.facet_by)
    facets = sorted(df["_facet"].unique(), key=str)
    ylim = _padded_limits(df["value"])
    fig, axes = plt.subplots(1, len(facets),
                             figsize=(4 * len(facets), 4.2),
                             sharey=True, squeeze=False)
    group_counts = []
    for ax, facet in zip(axes[0], facets):
        sub = df[df["_facet"] == facet]
        xs = sorted(sub[job.x_column].unique())
        group_counts.append(len(xs))
        data = [sub.loc[sub[job.x_column] == x, "value"].to_numpy() for x in xs]
        ax.boxplot(data, tick_labels=[str(x) for x in xs])
        ax.set_title(str(facet))
        ax.set_xlabel(job.x_column)
        ax.set_ylim(*ylim)
    axes[0][0].set_ylabel("value")
    fig.tight_layout()
    fig.savefig(job.output)
    plt.close(fig)
    return PlotSpec(kind=job.kind, facets=tuple(str(f) for f in facets),
                    group_counts=tuple(group_counts), y_limits=ylim)


def _render_histogram_overlay(job: PlotJob, df: pd.DataFrame) -> PlotSpec:
    mc = df[df["statistic"] == "nR_n"]
    boot = df[df["statistic"] == "bootstrap_ref"]
    if mc.empty or boot.empty:
        raise SchemaError(
            f"{job.input_csv}: histogram overlay needs both 'nR_n' and "
            f"'bootstrap_ref' rows")
    facet_cols = tuple(dict.fromkeys(job.facet_by + ("n",)))
    df = df.copy()
    keys = sorted({tuple(row) for row in df[list(facet_cols)].itertuples(index=False)},
                  key=str)
    xlim = _padded_limits(df["value"])
    fig, axes = plt.subplots(1, len(keys), figsize=(4 * len(keys), 4.2),
                             squeeze=False)
    counts = []
    for ax, key in zip(axes[0], keys):
        mask = pd.Series(True, index=df.index)
        for col, val in zip(facet_cols, key):
            mask &= df[col] == val
        sub_mc = df[mask & (df["statistic"] == "nR_n")]["value"]
        sub_boot = df[mask & (df["statistic"] == "bootstrap_ref")]["value"]
        counts.append(len(sub_mc) + len(sub_boot))
        ax.hist(sub_mc, bins=25, range=xlim, density=True, alpha=0.55,
                color=MONTE_CARLO_COLOR, label="Monte Carlo")
        ax.hist(sub_boot, bins=25, range=xlim, density=True, alpha=0.55,
                color=BOOTSTRAP_COLOR, label="bootstrap")
        ax.set_title(", ".join(f"{c}={v}" for c, v in zip(facet_cols, key)))
        ax.set_xlim(*xlim)
        ax.legend()
    fig.tight_layout()
    fig.savefig(job.output)
    plt.close(fig)
    return PlotSpec(kind=job.kind, facets=tuple(str(k) for k in keys),
                    group_counts=tuple(counts), y_limits=xlim,
                    colors=(MONTE_CARLO_COLOR, BOOTSTRAP_COLOR))


def render(job: PlotJob) -> PlotSpec:
    """Render one job to its output path and return the figure description."""
    df = _load(job)
    Path(job.output).parent.mkdir(parents=True, exist_ok=True)
    if job.kind == "boxplot_grid":
        return _render_boxplot_grid(job, df)
    return _render_histogram_overlay(job, df)
