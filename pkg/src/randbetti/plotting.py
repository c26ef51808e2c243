"""Matplotlib figures for the CLI reports.

Figures are built on :class:`matplotlib.figure.Figure` directly (no pyplot
state), and SVG output is made deterministic: fixed hash salt, no date
stamp, glyphs embedded as paths so the file needs no external fonts.
"""

from __future__ import annotations

import io
import json
import math
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

STYLE = {
    "svg.hashsalt": "randbetti",
    "svg.fonttype": "path",
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def new_figure(ncols: int = 1, width: float = 6.0, height: float = 3.8):
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(width * ncols if ncols > 1 else width, height))
        axes = fig.subplots(1, ncols)
    return fig, (list(axes) if ncols > 1 else [axes])


def profile(ax, ps: Sequence[int], values: Sequence[float], label: str | None = None,
            ylabel: str = "$k_{p,q}$", marker: str = "o"):
    ax.scatter(ps, values, s=10, marker=marker, label=label)
    ax.set_xlabel("$p$")
    ax.set_ylabel(ylabel)


def table_rows(table, rows: Sequence[int] | None = None, title: str = ""):
    """Scatter of ``k_{p,q}`` against ``p`` for each requested row."""
    fig, (ax,) = new_figure()
    ps = list(range(table.width))
    for q in rows or range(1, table.n + 1):
        vals = [float(v) for v in table.row(q)]
        profile(ax, ps, vals, label=f"q = {q}")
    if (rows and len(rows) > 1) or (not rows and table.n > 1):
        ax.legend(frameon=False)
    ax.set_title(title)
    return fig


def convergence(reports, title: str = "", ylabel: str = "$F(r)\\,k_{p_r,q}$"):
    """Normalized value against ``r`` per report, with the Gaussian target dashed."""
    fig, (ax,) = new_figure()
    for rep in reports:
        rs = [row["r"] for row in rep.per_r]
        line, = ax.plot(rs, rep.values(), marker="o", ms=3, label=f"a = {rep.spec['a']:g}")
        ax.axhline(rep.per_r[0]["target"], ls="--", lw=0.8, color=line.get_color())
    ax.set_xlabel("$r$")
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False)
    ax.set_title(title)
    return fig


def deviation(estimates, title: str = ""):
    fig, (ax,) = new_figure()
    rs = [e.r for e in estimates]
    ax.errorbar(rs, [e.hit_fraction for e in estimates], yerr=[e.standard_error for e in estimates],
                marker="o", ms=3, capsize=2)
    ax.set_xlabel("$r$")
    ax.set_ylabel("P(|ratio - 1| > eps)")
    ax.set_title(title)
    return fig


def weighted_panels(coefficients: Sequence[float], row: Sequence[float], title: str = ""):
    """Coefficients ``x_i`` on the left, ``k_{p,1}`` on the right."""
    fig, (left, right) = new_figure(ncols=2, width=4.5)
    left.scatter(range(1, len(coefficients) + 1), coefficients, s=4)
    left.set_xlabel("$i$")
    left.set_ylabel("$x_i$")
    profile(right, range(len(row)), row, ylabel="$k_{p,1}$")
    fig.suptitle(title)
    return fig


def bars(values: Sequence[float], xlabel: str, ylabel: str, title: str = ""):
    fig, (ax,) = new_figure()
    ax.bar(range(1, len(values) + 1), values)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    return fig


def render(fig, fmt: str = "svg", description: dict | None = None) -> bytes:
    """Serialize ``fig``; ``description`` is embedded as JSON metadata where supported."""
    meta = {}
    if fmt == "svg":
        meta = {"Date": None, "Creator": "randbetti"}
        if description is not None:
            meta["Description"] = json.dumps(description, sort_keys=True, default=str)
    elif fmt == "png" and description is not None:
        meta = {"Description": json.dumps(description, sort_keys=True, default=str)}
    elif fmt == "pdf":
        meta = {"CreationDate": None, "ModDate": None}
    buf = io.BytesIO()
    with matplotlib.rc_context(STYLE):
        fig.savefig(buf, format=fmt, metadata=meta, bbox_inches="tight")
    return buf.getvalue()


def finite(values: Sequence[float]) -> list[float]:
    return [v if math.isfinite(v) else math.nan for v in values]
