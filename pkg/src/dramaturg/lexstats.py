"""Vocabulary-richness metrics, ranked word frequencies, word-cloud layouts.

All statistics operate on case-folded surface forms of alphabetic word
tokens; no lemmatization. The word-cloud layout is a deterministic greedy
spiral: same table, canvas, and seed always give the same geometry.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field

from .corpus import Token, normalize_apostrophes
from .errors import CanvasExhaustedError, ConfigError, EmptyScopeError

COUNTING_POLICIES = ("alpha_all", "alpha_nonstop")

MIN_FONT_SIZE = 10.0
MAX_FONT_SIZE = 64.0
CHAR_WIDTH_RATIO = 0.6  # estimated glyph advance as a fraction of font size
BOX_PADDING = 1.0

_SPIRAL_ANGLE_STEP = 0.35
_SPIRAL_RADIUS_PER_TURN = 6.0


@dataclass(frozen=True)
class LexicalSummary:
    token_count: int
    type_count: int
    ttr: float
    scope: str

    def __post_init__(self) -> None:
        if self.type_count > self.token_count:
            raise ValueError("type_count cannot exceed token_count")


@dataclass(frozen=True)
class FrequencyTable:
    entries: tuple[tuple[str, int], ...]
    total: int


@dataclass(frozen=True)
class CloudItem:
    term: str
    weight: float
    font_size: float
    x: float
    y: float
    bounding_box: tuple[float, float, float, float]


@dataclass(frozen=True)
class WordCloudSpec:
    items: tuple[CloudItem, ...]
    canvas: tuple[int, int]
    seed: int
    omitted: tuple[str, ...] = field(default=())


def type_token_ratio(
    tokens,
    counting_policy: str = "alpha_all",
    stoplist: frozenset[str] = frozenset(),
    scope: str = "",
) -> LexicalSummary:
    """Distinct lower forms over total admitted tokens.

    alpha_all admits every alphabetic word token; alpha_nonstop additionally
    drops stopwords. An empty admissible set is an error, never a ratio of 0.
    """
    if counting_policy not in COUNTING_POLICIES:
        raise ConfigError(f"unknown counting policy {counting_policy!r}")
    admitted = [t.lower for t in tokens if _admitted(t, counting_policy, stoplist)]
    if not admitted:
        raise EmptyScopeError(f"no admissible tokens in scope {scope!r}")
    token_count = len(admitted)
    type_count = len(set(admitted))
    return LexicalSummary(
        token_count=token_count,
        type_count=type_count,
        ttr=type_count / token_count,
        scope=scope,
    )


def _admitted(token: Token, policy: str, stoplist: frozenset[str]) -> bool:
    if not token.is_alpha:
        return False
    if policy == "alpha_nonstop" and (
        token.is_stopword or normalize_apostrophes(token.lower) in stoplist
    ):
        return False
    return True


def word_frequencies(tokens, stoplist: frozenset[str], top_n: int) -> FrequencyTable:
    """Top-n counts of alphabetic non-stopword lower forms.

    Sorted by count descending, ties broken term-ascending; total is the sum
    of the retained entries.
    """
    if top_n < 1:
        raise ConfigError(f"top_n must be >= 1, got {top_n}")
    counts: Counter[str] = Counter(
        t.lower
        for t in tokens
        if t.is_alpha and normalize_apostrophes(t.lower) not in stoplist
    )
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:top_n]
    return FrequencyTable(entries=tuple(ranked), total=sum(c for _, c in ranked))


def wordcloud_layout(
    table: FrequencyTable,
    canvas: tuple[int, int] = (800, 500),
    seed: int = 0,
    min_font_size: float = MIN_FONT_SIZE,
    max_font_size: float = MAX_FONT_SIZE,
) -> WordCloudSpec:
    """Greedy spiral placement of terms, heaviest first, no box overlaps.

    weight = count / max count; font size is linear in weight between the
    configured bounds. Each term walks an archimedean spiral from the canvas
    center (start angle drawn from the seeded generator) until its box fits
    inside the canvas without touching a placed box. Terms that never fit are
    omitted and reported; the heaviest term failing outright is an error.
    """
    if not table.entries:
        raise EmptyScopeError("cannot lay out an empty frequency table")
    width, height = canvas
    if width <= 0 or height <= 0:
        raise ConfigError(f"canvas must be positive, got {canvas}")
    max_count = table.entries[0][1]
    rng = random.Random(seed)
    placed: list[CloudItem] = []
    boxes: list[tuple[float, float, float, float]] = []
    omitted: list[str] = []
    for term, count in table.entries:
        weight = count / max_count
        font_size = min_font_size + (max_font_size - min_font_size) * weight
        box_w = CHAR_WIDTH_RATIO * font_size * len(term)
        box_h = font_size
        start_angle = rng.uniform(0.0, 2.0 * math.pi)
        position = _spiral_place(box_w, box_h, width, height, boxes, start_angle)
        if position is None:
            if not placed:
                raise CanvasExhaustedError(
                    f"canvas {width}x{height} cannot fit the heaviest term {term!r}"
                )
            omitted.append(term)
            continue
        cx, cy = position
        box = (cx - box_w / 2.0, cy - box_h / 2.0, cx + box_w / 2.0, cy + box_h / 2.0)
        placed.append(
            CloudItem(term=term, weight=weight, font_size=font_size, x=cx, y=cy,
                      bounding_box=box)
        )
        boxes.append(box)
    return WordCloudSpec(
        items=tuple(placed), canvas=(width, height), seed=seed, omitted=tuple(omitted)
    )


def _spiral_place(
    box_w: float,
    box_h: float,
    width: int,
    height: int,
    boxes: list[tuple[float, float, float, float]],
    start_angle: float,
) -> tuple[float, float] | None:
    if box_w > width or box_h > height:
        return None
    center_x = width / 2.0
    center_y = height / 2.0
    max_radius = math.hypot(width, height) / 2.0
    step = 0
    while True:
        theta = step * _SPIRAL_ANGLE_STEP
        radius = _SPIRAL_RADIUS_PER_TURN * theta / (2.0 * math.pi)
        if radius > max_radius:
            return None
        angle = start_angle + theta
        cx = center_x + radius * math.cos(angle)
        cy = center_y + radius * math.sin(angle)
        candidate = (cx - box_w / 2.0, cy - box_h / 2.0, cx + box_w / 2.0, cy + box_h / 2.0)
        if _inside(candidate, width, height) and not any(
            _intersects(candidate, other) for other in boxes
        ):
            return (cx, cy)
        step += 1


def _inside(box: tuple[float, float, float, float], width: int, height: int) -> bool:
    return box[0] >= 0.0 and box[1] >= 0.0 and box[2] <= width and box[3] <= height


def _intersects(
    a: tuple[float, float, float, float], b: tuple[float, float, float, float]
) -> bool:
    return (
        a[0] < b[2] + BOX_PADDING
        and b[0] < a[2] + BOX_PADDING
        and a[1] < b[3] + BOX_PADDING
        and b[1] < a[3] + BOX_PADDING
    )
