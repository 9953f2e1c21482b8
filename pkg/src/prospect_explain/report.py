"""Human- and machine-readable rendering of explanations and statistics.

Tables are tab-separated with 6-significant-digit decimals; charts are
standalone SVG documents built from plain strings so identical inputs
produce byte-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import FEATURE_NAMES, HIST_BINS, ClassStats
from .explain import Explanation


class ReportError(ValueError):
    """Raised for unrenderable inputs (e.g. degenerate chart sizes)."""


def _fmt(value: float) -> str:
    return format(value, ".6g")


@dataclass(frozen=True)
class ExplanationView:
    """Explanation rows ordered by descending |weight|.

    Ties keep schema order. This is the ordering every renderer uses, so
    tables and charts always agree.
    """

    instance_id: int
    predicted_probability: float
    fidelity: float
    rows: tuple[tuple[str, float, float], ...]


def explanation_view(explanation: Explanation) -> ExplanationView:
    indexed = list(enumerate(explanation.triples))
    indexed.sort(key=lambda item: (-abs(item[1][2]), item[0]))
    return ExplanationView(
        instance_id=explanation.instance_id,
        predicted_probability=explanation.predicted_probability,
        fidelity=explanation.fidelity,
        rows=tuple(row for _, row in indexed),
    )


def render_explanation_text(explanation: Explanation) -> str:
    """TSV table: header line, then name / raw value / weight per feature."""
    view = explanation_view(explanation)
    lines = [
        f"instance {view.instance_id} p={_fmt(view.predicted_probability)}"
        f" fidelity={_fmt(view.fidelity)}"
    ]
    for name, raw, weight in view.rows:
        lines.append(f"{name}\t{_fmt(raw)}\t{_fmt(weight)}")
    return "\n".join(lines) + "\n"


def render_explanation_svg(
    explanation: Explanation, width_px: int = 640, height_px: int = 320
) -> str:
    """Horizontal bar chart of the explanation weights.

    One bar per feature, ordered as in the text table. Positive weights
    extend right of the zero axis with class="pos"; negative weights
    extend left with class="neg". Feature names with their raw values sit
    in the left gutter.
    """
    if width_px < 100 or height_px < 100:
        raise ReportError(
            f"chart must be at least 100x100 px, got {width_px}x{height_px}"
        )
    view = explanation_view(explanation)
    margin = 8.0
    gutter = 0.34 * width_px
    plot_left = gutter + margin
    plot_right = width_px - margin
    axis_x = 0.5 * (plot_left + plot_right)
    max_extent = 0.5 * (plot_right - plot_left)
    scale = max(abs(row[2]) for row in view.rows)

    row_height = (height_px - 2.0 * margin) / len(view.rows)
    bar_height = 0.6 * row_height

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width_px}" height="{height_px}"'
        f' viewBox="0 0 {width_px} {height_px}">',
        "<style>.pos{fill:#2166ac;}.neg{fill:#b2182b;}.axis{stroke:#333;stroke-width:1;}"
        "text{font-family:monospace;font-size:12px;fill:#111;}</style>",
        f'<line class="axis" x1="{axis_x:.2f}" y1="{margin:.2f}"'
        f' x2="{axis_x:.2f}" y2="{height_px - margin:.2f}"/>',
    ]
    for i, (name, raw, weight) in enumerate(view.rows):
        top = margin + i * row_height + 0.5 * (row_height - bar_height)
        extent = max_extent * (abs(weight) / scale) if scale > 0.0 else 0.0
        x = axis_x if weight >= 0.0 else axis_x - extent
        css = "pos" if weight >= 0.0 else "neg"
        parts.append(
            f'<rect class="{css}" x="{x:.2f}" y="{top:.2f}"'
            f' width="{extent:.2f}" height="{bar_height:.2f}"/>'
        )
        label_y = top + 0.5 * bar_height + 4.0
        parts.append(
            f'<text x="{margin:.2f}" y="{label_y:.2f}">{name} ({_fmt(raw)})</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_distribution_report(stats: ClassStats) -> str:
    """Per (feature, class) moments and histogram: 12 TSV rows.

    Columns: feature, class, mean, std, count, then the 10 bin counts.
    Undefined moments (empty or single-record classes) render as empty
    cells.
    """
    lines = []
    for name in FEATURE_NAMES:
        for label in (0, 1):
            fs = stats.stats_for(label, name)
            mean = _fmt(fs.mean) if fs.mean is not None else ""
            std = _fmt(fs.std) if fs.std is not None else ""
            cells = [name, str(label), mean, std, str(fs.count)]
            cells.extend(str(c) for c in fs.histogram)
            if len(cells) != 5 + HIST_BINS:
                raise ReportError("malformed distribution row")
            lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"
