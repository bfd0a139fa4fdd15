"""Deterministic SVG charts: affect arcs, emotion shares, word clouds.

Everything is rendered from plain data with fixed coordinate formatting, so
identical inputs produce byte-identical files.
"""

from __future__ import annotations

from .affect import AffectArc, EMOTION_LABELS
from .lexstats import WordCloudSpec

EMOTION_COLORS = {
    "sadness": "#4878a8",
    "joy": "#e8b923",
    "love": "#d46a9f",
    "anger": "#c23b22",
    "fear": "#6b4f9e",
    "surprise": "#3fa86b",
}

VALENCE_COLOR = "#222222"
AXIS_COLOR = "#888888"
FONT_FAMILY = "Helvetica, Arial, sans-serif"


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def render_arc_svg(arc: AffectArc) -> str:
    """Line chart: segment index ("stage minute") on x, scores in [0,1] on y.

    Draws one polyline for valence plus one per emotion label present.
    """
    width, height = 860, 360
    left, right, top, bottom = 50, 20, 20, 40
    plot_w = width - left - right
    plot_h = height - top - bottom
    n = len(arc.points)

    def x_at(i: int) -> float:
        if n <= 1:
            return left + plot_w / 2.0
        return left + plot_w * i / (n - 1)

    def y_at(score: float) -> float:
        return top + plot_h * (1.0 - score)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" '
        f'stroke="{AXIS_COLOR}" stroke-width="1"/>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" '
        f'stroke="{AXIS_COLOR}" stroke-width="1"/>',
    ]
    for tick in (0.0, 0.5, 1.0):
        y = y_at(tick)
        parts.append(
            f'<text x="{left - 8}" y="{_fmt(y + 4)}" text-anchor="end" font-size="11" '
            f'font-family="{FONT_FAMILY}" fill="{AXIS_COLOR}">{tick:.1f}</text>'
        )
    parts.append(
        f'<text x="{left + plot_w // 2}" y="{height - 8}" text-anchor="middle" '
        f'font-size="12" font-family="{FONT_FAMILY}" fill="{AXIS_COLOR}">stage minute</text>'
    )

    series: list[tuple[str, str, list[tuple[int, float]]]] = []
    valence_points = [
        (p.segment_index, p.valence.value) for p in arc.points if p.valence is not None
    ]
    if valence_points:
        series.append(("valence", VALENCE_COLOR, valence_points))
    for label in EMOTION_LABELS:
        pts = [
            (p.segment_index, p.emotions.scores[label])
            for p in arc.points
            if p.emotions is not None
        ]
        if pts:
            series.append((label, EMOTION_COLORS[label], pts))

    for name, color, pts in series:
        coords = " ".join(f"{_fmt(x_at(i))},{_fmt(y_at(v))}" for i, v in pts)
        parts.append(
            f'<polyline class="series-{name}" fill="none" stroke="{color}" '
            f'stroke-width="1.5" points="{coords}"/>'
        )
    legend_x = left + 6
    for offset, (name, color, _) in enumerate(series):
        y = top + 12 + 14 * offset
        parts.append(
            f'<rect x="{legend_x}" y="{y - 8}" width="10" height="10" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{legend_x + 14}" y="{y}" font-size="11" '
            f'font-family="{FONT_FAMILY}" fill="#333333">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_percentages_svg(percentages: dict[str, float], title: str = "") -> str:
    """One horizontal bar stacked by emotion share, labelled with percents."""
    width, height = 720, 160
    bar_x, bar_y, bar_w, bar_h = 20, 50, width - 40, 40
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if title:
        parts.append(
            f'<text x="{bar_x}" y="28" font-size="13" font-family="{FONT_FAMILY}" '
            f'fill="#333333">{_escape(title)}</text>'
        )
    cursor = float(bar_x)
    for label in EMOTION_LABELS:
        share = percentages.get(label, 0.0)
        seg_w = bar_w * share / 100.0
        parts.append(
            f'<rect x="{_fmt(cursor)}" y="{bar_y}" width="{_fmt(seg_w)}" '
            f'height="{bar_h}" fill="{EMOTION_COLORS[label]}"/>'
        )
        cursor += seg_w
    legend_y = bar_y + bar_h + 28
    cursor = float(bar_x)
    for label in EMOTION_LABELS:
        share = percentages.get(label, 0.0)
        parts.append(
            f'<rect x="{_fmt(cursor)}" y="{legend_y - 10}" width="10" height="10" '
            f'fill="{EMOTION_COLORS[label]}"/>'
        )
        parts.append(
            f'<text x="{_fmt(cursor + 14)}" y="{legend_y}" font-size="11" '
            f'font-family="{FONT_FAMILY}" fill="#333333">{label} {share:.1f}%</text>'
        )
        cursor += 118.0
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_wordcloud_svg(spec: WordCloudSpec) -> str:
    width, height = spec.canvas
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    palette = ("#1f3a60", "#2d6a8a", "#b0413e", "#53687e", "#6b4f9e", "#3fa86b")
    for i, item in enumerate(spec.items):
        color = palette[i % len(palette)]
        parts.append(
            f'<text x="{_fmt(item.x)}" y="{_fmt(item.y + item.font_size * 0.35)}" '
            f'text-anchor="middle" font-size="{_fmt(item.font_size)}" '
            f'font-family="{FONT_FAMILY}" fill="{color}">{_escape(item.term)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )
