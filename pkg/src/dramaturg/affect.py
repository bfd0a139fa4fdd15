"""Sentiment valence and emotion profiles per stage minute, and derived arcs.

Scoring is pluggable: deterministic lexicon scorers ship with the toolkit,
external model processes plug in over the line protocol (scorer_bridge).
Valence is the positive-class probability in [0, 1]; emotion profiles are
normalized distributions over a fixed six-label vocabulary. Per-segment
values are unweighted means over the segment's sentence units.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass

from . import corpus
from .corpus import Segment, TokenizedPlay, normalize_apostrophes
from .errors import ConfigError, DecodeError, DramaturgError, EmptyScopeError, \
    ArcTooShortError, NoSignalError, ProtocolError, ScorerError

EMOTION_LABELS = ("sadness", "joy", "love", "anger", "fear", "surprise")

PROFILE_SUM_TOLERANCE = 1e-9

NEUTRAL_VALENCE = 0.5


@dataclass(frozen=True)
class Valence:
    value: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"valence must lie in [0, 1], got {self.value}")


@dataclass(frozen=True)
class EmotionProfile:
    scores: dict[str, float]
    no_signal: bool = False

    def __post_init__(self) -> None:
        missing = [label for label in EMOTION_LABELS if label not in self.scores]
        if missing:
            raise ValueError(f"profile missing labels: {missing}")
        extra = set(self.scores) - set(EMOTION_LABELS)
        if extra:
            raise ValueError(f"profile has unknown labels: {sorted(extra)}")
        total = sum(self.scores.values())
        if not self.no_signal and abs(total - 1.0) > PROFILE_SUM_TOLERANCE:
            raise ValueError(f"profile scores sum to {total}, expected 1")

    @classmethod
    def uniform_no_signal(cls) -> "EmotionProfile":
        return cls(scores={label: 1.0 / 6.0 for label in EMOTION_LABELS}, no_signal=True)


@dataclass(frozen=True)
class ArcPoint:
    segment_index: int
    valence: Valence | None = None
    emotions: EmotionProfile | None = None

    def __post_init__(self) -> None:
        if self.valence is None and self.emotions is None:
            raise ValueError("arc point needs a valence or an emotion profile")


@dataclass(frozen=True)
class AffectArc:
    play: str
    points: tuple[ArcPoint, ...]
    window: int

    def __post_init__(self) -> None:
        for expected, point in enumerate(self.points):
            if point.segment_index != expected:
                raise ValueError("arc points must cover segment indices 0..n-1 in order")


@dataclass(frozen=True)
class TensionMetrics:
    final_third_delta: float
    peak_negativity_index: int
    mean_valence: float


@dataclass(frozen=True)
class ScorerDescriptor:
    kind: str  # lexicon_sentiment | lexicon_emotion | external
    resource: str
    granularity: str = "sentence"

    def __post_init__(self) -> None:
        if self.kind not in ("lexicon_sentiment", "lexicon_emotion", "external"):
            raise ConfigError(f"unknown scorer kind {self.kind!r}")
        if self.granularity not in ("sentence", "segment"):
            raise ConfigError(f"unknown granularity {self.granularity!r}")


class LexiconSentimentScorer:
    """Mean polarity of matched lexicon terms, mapped to [0, 1] valence.

    Matching is over lowercased alphabetic word tokens; each occurrence
    counts. A unit with no matches scores the neutral 0.5.
    """

    granularity = "sentence"

    def __init__(self, polarity: dict[str, float], identity: str = "lexicon_sentiment"):
        self.polarity = {normalize_apostrophes(k.casefold()): v for k, v in polarity.items()}
        for term, value in self.polarity.items():
            if not -1.0 <= value <= 1.0:
                raise ConfigError(f"polarity of {term!r} outside [-1, 1]: {value}")
        self.identity = identity

    @classmethod
    def from_csv(cls, path: str) -> "LexiconSentimentScorer":
        return cls(_read_polarity_csv(path), identity=f"lexicon_sentiment:{path}")

    def score_sentiment(self, text: str) -> float:
        hits = [
            self.polarity[w] for w in _match_words(text) if w in self.polarity
        ]
        if not hits:
            return NEUTRAL_VALENCE
        mean_polarity = sum(hits) / len(hits)
        return (mean_polarity + 1.0) / 2.0

    def score_sentiment_batch(self, texts: list[str]) -> list[float]:
        return [self.score_sentiment(t) for t in texts]


class LexiconEmotionScorer:
    """Counts word-association hits per emotion label (NRC-style lexicon)."""

    granularity = "sentence"

    def __init__(self, associations: dict[str, str], identity: str = "lexicon_emotion"):
        self.associations = {
            normalize_apostrophes(k.casefold()): v for k, v in associations.items()
        }
        for term, emotion in self.associations.items():
            if emotion not in EMOTION_LABELS:
                raise ConfigError(f"unknown emotion {emotion!r} for term {term!r}")
        self.identity = identity

    @classmethod
    def from_csv(cls, path: str) -> "LexiconEmotionScorer":
        return cls(_read_emotion_csv(path), identity=f"lexicon_emotion:{path}")

    def emotion_hits(self, text: str) -> Counter:
        hits: Counter[str] = Counter()
        for word in _match_words(text):
            emotion = self.associations.get(word)
            if emotion is not None:
                hits[emotion] += 1
        return hits


def _match_words(text: str) -> list[str]:
    return [
        normalize_apostrophes(t.lower) for t in corpus.tokenize(text) if t.is_alpha
    ]


def _read_polarity_csv(path: str) -> dict[str, float]:
    polarity: dict[str, float] = {}
    for row in _read_csv_rows(path, expected=("term", "polarity")):
        term, raw = row
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"{path}: polarity for {term!r} is not a number: {raw!r}") from None
        polarity[term] = value
    return polarity


def _read_emotion_csv(path: str) -> dict[str, str]:
    return {term: emotion for term, emotion in _read_csv_rows(path, expected=("term", "emotion"))}


def _read_csv_rows(path: str, expected: tuple[str, str]):
    with open(path, "rb") as handle:
        data = handle.read()
    try:
        content = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DecodeError(path, exc.start, exc.reason) from None
    rows = []
    for i, row in enumerate(csv.reader(io.StringIO(content))):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if i == 0 and [cell.strip().lower() for cell in row] == list(expected):
            continue  # optional header
        if len(row) != 2:
            raise ConfigError(f"{path}: expected 2 columns ({expected[0]},{expected[1]}), "
                              f"got {row!r}")
        rows.append((row[0].strip(), row[1].strip()))
    return rows


def score_segment_sentiment(units: list[str], scorer) -> Valence:
    """One valence for a segment: its units scored and averaged unweighted."""
    scorer = _ensure_scorer(scorer)
    texts = [u for u in units if u and u.strip()]
    if not texts:
        raise EmptyScopeError("no non-empty text units to score")
    if hasattr(scorer, "score_sentiment_batch"):
        values = scorer.score_sentiment_batch(texts)
    else:
        values = [scorer.score_sentiment(t) for t in texts]
    return Valence(sum(values) / len(values))


def score_segment_emotions(units: list[str], scorer) -> EmotionProfile:
    """One emotion profile for a segment.

    Lexicon scorers pool hit counts over all units and normalize; zero hits
    means no_signal with uniform scores. External scorers return a full
    distribution per unit; unit distributions are averaged and renormalized.
    """
    scorer = _ensure_scorer(scorer)
    texts = [u for u in units if u and u.strip()]
    if not texts:
        raise EmptyScopeError("no non-empty text units to score")
    if isinstance(scorer, LexiconEmotionScorer):
        hits: Counter[str] = Counter()
        for text in texts:
            hits.update(scorer.emotion_hits(text))
        total = sum(hits.values())
        if total == 0:
            return EmotionProfile.uniform_no_signal()
        return EmotionProfile(
            scores={label: hits.get(label, 0) / total for label in EMOTION_LABELS}
        )
    distributions = [_validated_distribution(scorer.score_emotions(t)) for t in texts]
    mean = {
        label: sum(d[label] for d in distributions) / len(distributions)
        for label in EMOTION_LABELS
    }
    mass = sum(mean.values())
    return EmotionProfile(scores={label: mean[label] / mass for label in EMOTION_LABELS})


def _validated_distribution(scores: dict[str, float]) -> dict[str, float]:
    for label in EMOTION_LABELS:
        if label not in scores:
            raise ProtocolError(f"emotion response missing label {label!r}")
    values = {label: float(scores[label]) for label in EMOTION_LABELS}
    if any(v < 0.0 for v in values.values()):
        raise ProtocolError("emotion response contains negative scores")
    mass = sum(values.values())
    if mass <= 0.0:
        raise ProtocolError("emotion response has no positive mass")
    return {label: v / mass for label, v in values.items()}


def _ensure_scorer(scorer):
    if isinstance(scorer, ScorerDescriptor):
        return resolve_scorer(scorer)
    return scorer


def resolve_scorer(descriptor: ScorerDescriptor):
    """Turn a descriptor into a live scorer; external kinds handshake now."""
    if descriptor.kind == "lexicon_sentiment":
        scorer = LexiconSentimentScorer.from_csv(descriptor.resource)
    elif descriptor.kind == "lexicon_emotion":
        scorer = LexiconEmotionScorer.from_csv(descriptor.resource)
    else:
        from .scorer_bridge import open_scorer, BridgeScorer

        scorer = BridgeScorer(open_scorer(descriptor.resource))
    scorer.granularity = descriptor.granularity
    return scorer


def sentence_units(play: TokenizedPlay, segment: Segment) -> list[str]:
    """Sentences owned by the segment: those whose first token falls inside
    its token range. A sentence spanning a boundary stays with the segment
    that contains its first token."""
    seg_start, seg_end = segment.token_range
    units = []
    for first, last in play.sentences:
        if seg_start <= first < seg_end:
            units.append(
                play.cleaned_text[play.tokens[first].start : play.tokens[last - 1].end]
            )
    return units


def segment_text(play: TokenizedPlay, segment: Segment) -> str:
    start, end = segment.token_range
    return play.cleaned_text[play.tokens[start].start : play.tokens[end - 1].end]


def build_arc(
    play: TokenizedPlay,
    segments,
    sentiment_scorer=None,
    emotion_scorer=None,
    window: int | None = None,
) -> AffectArc:
    """Score every segment, in order, into an arc. Never emits partial arcs:
    any scorer failure aborts, annotated with the segment index."""
    if sentiment_scorer is None and emotion_scorer is None:
        raise ConfigError("build_arc needs at least one scorer")
    sentiment_scorer = _ensure_scorer(sentiment_scorer) if sentiment_scorer else None
    emotion_scorer = _ensure_scorer(emotion_scorer) if emotion_scorer else None
    if window is None:
        # infer from the full segments; a lone partial segment keeps its count
        window = max(
            (s.word_count for s in segments if not s.is_partial),
            default=segments[0].word_count if segments else 0,
        )
    points = []
    for segment in segments:
        sentences = sentence_units(play, segment)
        valence = None
        emotions = None
        try:
            if sentiment_scorer is not None:
                units = _units_for(sentiment_scorer, play, segment, sentences)
                valence = score_segment_sentiment(units, sentiment_scorer)
            if emotion_scorer is not None:
                units = _units_for(emotion_scorer, play, segment, sentences)
                emotions = score_segment_emotions(units, emotion_scorer)
        except DramaturgError as exc:
            raise ScorerError(str(exc), segment_index=segment.index) from exc
        points.append(
            ArcPoint(segment_index=segment.index, valence=valence, emotions=emotions)
        )
    return AffectArc(play=play.title, points=tuple(points), window=window)


def _units_for(scorer, play: TokenizedPlay, segment: Segment, sentences: list[str]) -> list[str]:
    if getattr(scorer, "granularity", "sentence") == "segment":
        return [segment_text(play, segment)]
    return sentences


def emotion_percentages(arc: AffectArc) -> dict[str, float]:
    """Mass-normalized share of each emotion across the arc, in percent.

    no_signal points contribute nothing; the six percentages sum to 100.
    """
    profiles = [
        p.emotions for p in arc.points if p.emotions is not None and not p.emotions.no_signal
    ]
    if not profiles:
        raise NoSignalError(f"arc for {arc.play!r} carries no emotional signal")
    mass = sum(sum(profile.scores.values()) for profile in profiles)
    return {
        label: 100.0 * sum(profile.scores[label] for profile in profiles) / mass
        for label in EMOTION_LABELS
    }


def tension_metrics(arc: AffectArc) -> TensionMetrics:
    """Negativity lift of the final third against the rest of the arc.

    final_third_delta = mean(1 - valence) over the last ceil(n/3) sentiment
    points minus the same mean over the earlier points; positive values mean
    the close is darker than what led up to it.
    """
    pts = [p for p in arc.points if p.valence is not None]
    if len(pts) < 3:
        raise ArcTooShortError(
            f"tension metrics need >= 3 sentiment points, got {len(pts)}"
        )
    values = [p.valence.value for p in pts]
    n = len(values)
    tail = (n + 2) // 3  # ceil(n / 3)
    final = values[n - tail :]
    rest = values[: n - tail]
    delta = sum(1.0 - v for v in final) / len(final) - sum(1.0 - v for v in rest) / len(rest)
    peak_idx = min(range(n), key=lambda i: (values[i], i))
    return TensionMetrics(
        final_third_delta=delta,
        peak_negativity_index=pts[peak_idx].segment_index,
        mean_valence=sum(values) / n,
    )
