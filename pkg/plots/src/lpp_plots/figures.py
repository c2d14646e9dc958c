"""The five figure kinds.

covariance    second moments against tau, one line per CSV param, shaded
              plus/minus two stderr
localization  touch probability against cubed threshold distance on a log
              axis, with the least-squares line recomputed from the points
tails         empirical tail points beside their stated bound curves
kernel        distribution from quadrature as a line, extra inputs overlaid
              as point markers (a Monte Carlo table in the same dialect)
geodesic      path traces as distance-to-diagonal against anti-diagonal level

Rendering is deterministic for fixed inputs: one fixed style, no clock
reads, the SVG id salt pinned, and Date-like metadata stripped from SVG
and PDF output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from lpp_plots.tables import (
    ConsistencyError,
    Row,
    SchemaError,
    read_geodesic,
    read_kernel,
    read_sidecar,
    read_standard_many,
)

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 100,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.family": "DejaVu Sans",
    "svg.hashsalt": "halfspace-lpp-plots",
    "legend.fontsize": 9,
}

SLOPE_RTOL = 1e-9


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input CSV path(s), the kind, and the output image.

    dpi only affects raster formats; logy overrides the kind's default
    axis scale when set.
    """

    inputs: tuple[Path, ...]
    kind: str
    out: Path
    dpi: int = 150
    title: str | None = None
    logy: bool | None = None


def _fig_covariance(spec: FigureSpec):
    rows = read_standard_many(spec.inputs)
    series: dict[str, list[Row]] = {}
    for row in rows:
        if row.param.tag in ("var", "cov") and not row.censored:
            series.setdefault(row.label, []).append(row)
    if not series:
        raise SchemaError(
            f"{spec.inputs[0]}: no var[...] or cov[...] rows; is this a covariance CSV?"
        )
    fig, ax = plt.subplots()
    for label in sorted(series):
        pts = sorted(series[label], key=lambda r: r.tau)
        x = np.array([r.tau for r in pts])
        y = np.array([r.value for r in pts])
        (line,) = ax.plot(x, y, marker="o", ms=4, label=label)
        if all(r.stderr is not None for r in pts):
            se = np.array([r.stderr for r in pts])
            ax.fill_between(x, y - 2 * se, y + 2 * se, alpha=0.2, color=line.get_color())
    ax.set_xlabel("tau")
    ax.set_ylabel("rescaled second moment")
    ax.legend()
    return fig


def localization_fit(rows: list[Row], m1: float) -> tuple[float, float]:
    """Slope and intercept of ln p on (M - m1)^3 over the stationary points.

    Must agree with the producer to within SLOPE_RTOL, so the filtering and
    the solver match it exactly: censored and zero points dropped, plain
    least squares on a two-column design matrix.
    """
    pts = [
        r for r in rows
        if r.param.tag == "p_touch" and "stationary" in r.param.flags
        and not r.censored and r.value > 0.0
    ]
    if len(pts) < 2:
        raise SchemaError(f"log-linear overlay needs >= 2 uncensored stationary points, got {len(pts)}")
    xs = np.array([(r.param.field("M") - m1) ** 3 for r in pts])
    ys = np.array([math.log(r.value) for r in pts])
    a = np.vstack([xs, np.ones(len(xs))]).T
    (slope, intercept), *_ = np.linalg.lstsq(a, ys, rcond=None)
    return float(slope), float(intercept)


def _sidecar_m1(spec: FigureSpec) -> float:
    meta = read_sidecar(spec.inputs[0])
    tau = float(meta.get("tau", 1.0))
    conv = (1.0 - tau) ** (2.0 / 3.0) if tau < 1.0 else 0.0
    return conv * float(meta.get("m1_tilde", 0.0))


def _fig_localization(spec: FigureSpec):
    rows = read_standard_many(spec.inputs)
    m1 = _sidecar_m1(spec)
    touch = [r for r in rows if r.param.tag == "p_touch"]
    if not touch:
        raise SchemaError(f"{spec.inputs[0]}: no p_touch[...] rows; is this a localization CSV?")
    fig, ax = plt.subplots()
    for model in sorted({r.param.flags[0] for r in touch if r.param.flags}):
        pts = [r for r in touch if r.param.flags and r.param.flags[0] == model and not r.censored]
        if not pts:
            continue
        pts.sort(key=lambda r: r.param.field("M"))
        x = [(r.param.field("M") - m1) ** 3 for r in pts]
        y = [r.value for r in pts]
        se = [2 * r.stderr if r.stderr is not None else 0.0 for r in pts]
        ax.errorbar(x, y, yerr=se, fmt="o", ms=4, capsize=3, label=model)

    reported = next((r.value for r in rows if r.label == "decay_slope[stationary]"), None)
    try:
        slope, intercept = localization_fit(rows, m1)
    except SchemaError:
        if reported is not None:
            raise ConsistencyError(
                "CSV reports decay_slope[stationary] but lacks the points to recompute it"
            ) from None
        slope = None
    if slope is not None:
        if reported is not None and abs(slope - reported) > SLOPE_RTOL:
            raise ConsistencyError(
                f"recomputed slope {slope!r} != reported decay_slope[stationary] {reported!r}"
            )
        grid = np.linspace(0.0, max((r.param.field("M") - m1) ** 3 for r in touch), 64)
        ax.plot(grid, np.exp(intercept + slope * grid), "--", color="0.3",
                label=f"stationary fit, slope {slope:.4g}")
    ax.set_yscale("log")
    ax.set_xlabel("(M - m1)^3")
    ax.set_ylabel("P(max excursion >= M)")
    ax.legend()
    return fig


def _split_series(label: str) -> tuple[str, str]:
    """'p[a;x=2]' -> ('p[a]', 'x=2'); the last label piece carries the abscissa."""
    tag, inner = label[:-1].split("[", 1)
    pieces = inner.split(";")
    series = tag if len(pieces) == 1 else f"{tag}[{';'.join(pieces[:-1])}]"
    return series, pieces[-1]


def _piece_value(piece: str) -> float:
    text = piece.split("=", 1)[-1]
    try:
        return float(text)
    except ValueError:
        raise SchemaError(f"label piece {piece!r} has no numeric abscissa") from None


def _fig_tails(spec: FigureSpec):
    rows = read_standard_many(spec.inputs)
    bounds = {r.label: r for r in rows if r.param.tag.endswith("_bound")}
    paired: dict[str, list[tuple[float, Row, Row]]] = {}
    for row in rows:
        if row.param.tag.endswith("_bound") or "[" not in row.label:
            continue
        tag, inner = row.label[:-1].split("[", 1)
        mate = bounds.get(f"{tag}_bound[{inner}]")
        if mate is None:
            continue
        series, last = _split_series(row.label)
        paired.setdefault(series, []).append((_piece_value(last), row, mate))
    if not paired:
        raise SchemaError(
            f"{spec.inputs[0]}: no tag[...] rows with matching tag_bound[...] rows"
        )
    fig, ax = plt.subplots()
    for series in sorted(paired):
        triples = sorted(paired[series], key=lambda t: t[0])
        xs = [t[0] for t in triples]
        (line,) = ax.plot(xs, [t[2].value for t in triples], "--", label=f"{series} bound")
        live = [(x, r) for x, r, _ in triples if not r.censored]
        if live:
            ax.errorbar(
                [x for x, _ in live],
                [r.value for _, r in live],
                yerr=[2 * r.stderr if r.stderr is not None else 0.0 for _, r in live],
                fmt="o", ms=4, capsize=3, color=line.get_color(), label=series,
            )
    c_row = next((r for r in rows if r.param.tag == "diag_lower_C"), None)
    if c_row is not None and not c_row.censored:
        ax.text(0.02, 0.04, f"fitted C = {c_row.value:.4g}", transform=ax.transAxes)
    ax.set_yscale("log")
    ax.set_xlabel("deviation level")
    ax.set_ylabel("probability")
    ax.legend()
    return fig


def _fig_kernel(spec: FigureSpec):
    first = sorted(read_kernel(spec.inputs[0]), key=lambda r: r.S)
    fig, ax = plt.subplots()
    s = np.array([r.S for r in first])
    cdf = np.array([r.cdf for r in first])
    ax.plot(s, cdf, marker=".", label=spec.inputs[0].stem)
    if any(r.truncation_bound is not None for r in first):
        band = np.array([r.truncation_bound or 0.0 for r in first])
        ax.fill_between(s, cdf - band, cdf + band, alpha=0.25, color="0.5",
                        label="series truncation bound")
    for extra in spec.inputs[1:]:
        pts = sorted(read_kernel(extra), key=lambda r: r.S)
        err = [2 * (r.stderr or 0.0) for r in pts]
        ax.errorbar([r.S for r in pts], [r.cdf for r in pts], yerr=err,
                    fmt="s", ms=4, capsize=3, label=extra.stem)
    quads = sorted({r.quad_points for r in first if r.quad_points is not None})
    if quads:
        ax.text(0.98, 0.04, f"quadrature points: {', '.join(map(str, quads))}",
                transform=ax.transAxes, ha="right")
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel("S")
    ax.set_ylabel("P(value <= S)")
    ax.legend()
    return fig


def _fig_geodesic(spec: FigureSpec):
    fig, ax = plt.subplots()
    for path in spec.inputs:
        pts = read_geodesic(path)
        ax.plot([i + j for _, i, j in pts], [i - j for _, i, j in pts],
                lw=1.0, label=path.stem)
    ax.axhline(0.0, color="0.4", lw=0.8)
    ax.set_xlabel("anti-diagonal level i + j")
    ax.set_ylabel("distance above diagonal i - j")
    ax.legend()
    return fig


KINDS = {
    "covariance": _fig_covariance,
    "localization": _fig_localization,
    "tails": _fig_tails,
    "kernel": _fig_kernel,
    "geodesic": _fig_geodesic,
}

# Date-like metadata keys per format; everything else matplotlib writes is
# already input-determined.
_STRIP = {"svg": {"Date": None}, "pdf": {"CreationDate": None}}


def render(spec: FigureSpec) -> Path:
    if spec.kind not in KINDS:
        raise SchemaError(f"unknown figure kind '{spec.kind}'; expected one of {sorted(KINDS)}")
    if not spec.inputs:
        raise SchemaError("at least one input CSV is required")
    for path in spec.inputs:
        if not path.exists():
            raise SchemaError(f"input {path} does not exist")
    with plt.rc_context(_STYLE):
        fig = KINDS[spec.kind](spec)
        try:
            ax = fig.axes[0]
            if spec.title:
                ax.set_title(spec.title)
            if spec.logy is not None:
                ax.set_yscale("log" if spec.logy else "linear")
            spec.out.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(spec.out, dpi=spec.dpi,
                        metadata=_STRIP.get(spec.out.suffix.lower().lstrip(".")))
        finally:
            plt.close(fig)
    return spec.out
