"""End-to-end per-play analysis, comparative reports, and output rendering.

analyze_play runs clean -> tokenize -> segment -> score -> report and caches
the result on disk keyed by a fingerprint of everything that can change the
numbers: input text, cleaning rules, stoplist, window, scorer identities.
All serialized output is canonical (sorted keys, floats at six decimals) so
repeated runs are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass, replace
from importlib import resources

from . import affect, corpus, lexstats, svg
from .affect import (
    AffectArc,
    ArcPoint,
    EMOTION_LABELS,
    EmotionProfile,
    ScorerDescriptor,
    TensionMetrics,
    Valence,
)
from .corpus import CleaningRules, SegmentationConfig
from .errors import (
    AnalysisError,
    ConfigError,
    DramaturgError,
    IncompatibleReportsError,
    ScorerError,
)
from .lexstats import FrequencyTable, LexicalSummary

CACHE_DIR_NAME = ".dramaturg-cache"
FLOAT_DECIMALS = 6

_CONFIG_KEYS = {
    "dehyphenate_linebreaks",
    "strip_control_chars",
    "collapse_whitespace",
    "drop_patterns",
    "speaker_label_policy",
    "stoplist_path",
    "window",
    "include_partial_tail",
    "counting_policy",
    "top_n",
    "sentiment_lexicon_path",
    "emotion_lexicon_path",
    "wordcloud",
}


@dataclass(frozen=True)
class AnalysisConfig:
    cleaning: CleaningRules = CleaningRules()
    stoplist_path: str | None = None  # None -> bundled French list
    window: int = corpus.DEFAULT_WINDOW
    include_partial_tail: bool = True
    counting_policy: str = "alpha_all"
    top_n: int = 10
    cloud_canvas: tuple[int, int] = (800, 500)
    cloud_seed: int = 42
    sentiment: ScorerDescriptor | None = None  # None -> bundled lexicon
    emotion: ScorerDescriptor | None = None

    def __post_init__(self) -> None:
        SegmentationConfig(window=self.window)  # validates window >= 1
        if self.counting_policy not in lexstats.COUNTING_POLICIES:
            raise ConfigError(f"unknown counting policy {self.counting_policy!r}")
        if self.top_n < 1:
            raise ConfigError(f"top_n must be >= 1, got {self.top_n}")


def bundled_lexicon_path(name: str) -> str:
    return str(resources.files("dramaturg").joinpath(f"data/{name}"))


def load_config(path: str | None = None, **overrides) -> AnalysisConfig:
    """Build an AnalysisConfig from the documented JSON schema plus overrides.

    Recognized keys: dehyphenate_linebreaks, strip_control_chars,
    collapse_whitespace, drop_patterns, speaker_label_policy, stoplist_path,
    window, include_partial_tail, counting_policy, top_n,
    sentiment_lexicon_path, emotion_lexicon_path,
    wordcloud {width, height, seed}.
    """
    raw: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                raw = json.load(handle)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        unknown = set(raw) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    raw.update({k: v for k, v in overrides.items() if v is not None})

    cleaning = CleaningRules(
        dehyphenate_linebreaks=bool(raw.get("dehyphenate_linebreaks", True)),
        strip_control_chars=bool(raw.get("strip_control_chars", True)),
        collapse_whitespace=bool(raw.get("collapse_whitespace", True)),
        drop_patterns=tuple(raw.get("drop_patterns", ())),
        speaker_label_policy=raw.get("speaker_label_policy", "drop"),
    )
    cloud = raw.get("wordcloud", {})
    if not isinstance(cloud, dict):
        raise ConfigError("wordcloud config must be an object")

    sentiment = raw.get("sentiment")
    if sentiment is None:
        sentiment = ScorerDescriptor(
            kind="lexicon_sentiment",
            resource=raw.get("sentiment_lexicon_path") or bundled_lexicon_path("sentiment_fr.csv"),
        )
    emotion = raw.get("emotion")
    if emotion is None:
        emotion = ScorerDescriptor(
            kind="lexicon_emotion",
            resource=raw.get("emotion_lexicon_path") or bundled_lexicon_path("emotions_fr.csv"),
        )
    return AnalysisConfig(
        cleaning=cleaning,
        stoplist_path=raw.get("stoplist_path"),
        window=int(raw.get("window", corpus.DEFAULT_WINDOW)),
        include_partial_tail=bool(raw.get("include_partial_tail", True)),
        counting_policy=raw.get("counting_policy", "alpha_all"),
        top_n=int(raw.get("top_n", 10)),
        cloud_canvas=(int(cloud.get("width", 800)), int(cloud.get("height", 500))),
        cloud_seed=int(cloud.get("seed", 42)),
        sentiment=sentiment,
        emotion=emotion,
    )


def with_external_scorer(config: AnalysisConfig, endpoint: str) -> AnalysisConfig:
    descriptor = ScorerDescriptor(kind="external", resource=endpoint)
    return replace(config, sentiment=descriptor, emotion=descriptor)


@dataclass(frozen=True)
class PlayReport:
    title: str
    lexical: LexicalSummary
    frequencies: FrequencyTable
    arc: AffectArc
    percentages: dict[str, float]
    tension: TensionMetrics
    scorer_identity: dict[str, object]
    config_fingerprint: str
    top_n: int
    cloud_canvas: tuple[int, int]
    cloud_seed: int


@dataclass(frozen=True)
class ComparativeReport:
    plays: tuple[str, ...]
    ttr_ranking: tuple[str, ...]
    dominant_emotion: dict[str, str]
    shared_top_terms: tuple[str, ...]
    tension_ranking: tuple[str, ...]


def canonical_json(payload) -> str:
    """Sorted keys, floats fixed at six decimals, UTF-8 kept readable."""
    return _render_json(payload) + "\n"


def _render_json(value, indent: int = 0) -> str:
    pad = "  " * indent
    child_pad = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        keys = sorted(value)
        inner = ",\n".join(
            f'{child_pad}{json.dumps(str(k), ensure_ascii=False)}: '
            f"{_render_json(value[k], indent + 1)}"
            for k in keys
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        inner = ",\n".join(f"{child_pad}{_render_json(v, indent + 1)}" for v in value)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(value, bool) or value is None or isinstance(value, int):
        return json.dumps(value)
    if isinstance(value, float):
        return f"{value:.{FLOAT_DECIMALS}f}"
    return json.dumps(value, ensure_ascii=False)


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _file_sha(path: str) -> str:
    with open(path, "rb") as handle:
        return _sha256(handle.read())


def _scorer_identity(descriptor: ScorerDescriptor, resolved) -> dict[str, object]:
    if descriptor.kind == "external":
        return {
            "kind": "external",
            "model": getattr(resolved, "identity", descriptor.resource),
            "granularity": descriptor.granularity,
        }
    return {
        "kind": descriptor.kind,
        "lexicon_sha256": _file_sha(descriptor.resource),
        "granularity": descriptor.granularity,
    }


def config_fingerprint(
    config: AnalysisConfig, raw_text: str, title: str, scorer_identity: dict
) -> str:
    payload = {
        "title": title,
        "text_sha256": _sha256(raw_text.encode("utf-8")),
        "cleaning": {
            "dehyphenate_linebreaks": config.cleaning.dehyphenate_linebreaks,
            "strip_control_chars": config.cleaning.strip_control_chars,
            "collapse_whitespace": config.cleaning.collapse_whitespace,
            "drop_patterns": list(config.cleaning.drop_patterns),
            "speaker_label_policy": config.cleaning.speaker_label_policy,
        },
        "stoplist_sha256": (
            _file_sha(config.stoplist_path)
            if config.stoplist_path
            else _sha256(b"bundled:" + "".join(sorted(corpus.bundled_stoplist())).encode())
        ),
        "window": config.window,
        "include_partial_tail": config.include_partial_tail,
        "counting_policy": config.counting_policy,
        "top_n": config.top_n,
        "wordcloud": [config.cloud_canvas[0], config.cloud_canvas[1], config.cloud_seed],
        "scorers": scorer_identity,
    }
    return _sha256(json.dumps(payload, sort_keys=True).encode("utf-8"))


def _stage(name: str):
    class _StageGuard:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, DramaturgError) and not isinstance(
                exc, AnalysisError
            ):
                raise AnalysisError(name, exc) from exc
            return False

    return _StageGuard()


def analyze_play(
    input_path: str,
    config: AnalysisConfig,
    out_dir: str | None = None,
    use_cache: bool = True,
    title: str | None = None,
) -> PlayReport:
    """Full pipeline for one play file; deterministic for lexicon scorers.

    With an out_dir, results are cached under <out_dir>/.dramaturg-cache/
    keyed by the config fingerprint; a hit skips recomputation entirely.
    """
    with _stage("clean"):
        document = corpus.load_document(input_path, title=title)
        stoplist = (
            corpus.load_stoplist(config.stoplist_path)
            if config.stoplist_path
            else corpus.bundled_stoplist()
        )

    with _stage("score"):
        sentiment_scorer = affect.resolve_scorer(config.sentiment)
        emotion_scorer = affect.resolve_scorer(config.emotion)
        scorer_identity = {
            "sentiment": _scorer_identity(config.sentiment, sentiment_scorer),
            "emotion": _scorer_identity(config.emotion, emotion_scorer),
            "window": config.window,
        }
        _require_capabilities(sentiment_scorer, emotion_scorer)

    fingerprint = config_fingerprint(config, document.raw_text, document.title, scorer_identity)
    cache_path = None
    if use_cache and out_dir is not None:
        cache_path = os.path.join(out_dir, CACHE_DIR_NAME, f"{fingerprint}.json")
        if os.path.exists(cache_path):
            with open(cache_path, "r", encoding="utf-8") as handle:
                _close_scorers(sentiment_scorer, emotion_scorer)
                return report_from_dict(json.load(handle))

    report = _compute_report(
        document, config, stoplist, sentiment_scorer, emotion_scorer,
        scorer_identity, fingerprint,
    )
    _close_scorers(sentiment_scorer, emotion_scorer)

    if cache_path is not None:
        os.makedirs(os.path.dirname(cache_path), exist_ok=True)
        tmp_path = cache_path + ".tmp"
        with open(tmp_path, "w", encoding="utf-8") as handle:
            handle.write(canonical_json(report_to_dict(report)))
        os.replace(tmp_path, cache_path)
    return report


def _close_scorers(*scorers) -> None:
    for scorer in scorers:
        close = getattr(scorer, "close", None)
        if close is not None:
            close()


def _require_capabilities(sentiment_scorer, emotion_scorer) -> None:
    for scorer, task in ((sentiment_scorer, "sentiment"), (emotion_scorer, "emotion")):
        capabilities = getattr(getattr(scorer, "handle", None), "capabilities", None)
        if capabilities is not None and task not in capabilities:
            raise ScorerError(
                f"external scorer does not advertise the {task!r} capability"
            )


def _compute_report(
    document, config, stoplist, sentiment_scorer, emotion_scorer,
    scorer_identity, fingerprint,
) -> PlayReport:
    with _stage("clean"):
        cleaned = corpus.clean_text(document, config.cleaning)
    with _stage("tokenize"):
        tokens = corpus.tokenize(cleaned, stoplist)
        sentences = corpus.split_sentences(tokens)
        play = corpus.TokenizedPlay(
            document=document, cleaned_text=cleaned, tokens=tokens, sentences=sentences
        )
    with _stage("segment"):
        segments = corpus.segment_tokens(
            play,
            SegmentationConfig(
                window=config.window, include_partial_tail=config.include_partial_tail
            ),
        )
        if not segments:
            raise AnalysisError("segment", DramaturgError("empty scope: play has no tokens"))
    with _stage("report"):
        lexical = lexstats.type_token_ratio(
            tokens, config.counting_policy, stoplist, scope=document.title
        )
        frequencies = lexstats.word_frequencies(tokens, stoplist, config.top_n)
    with _stage("score"):
        arc = affect.build_arc(
            play, segments, sentiment_scorer, emotion_scorer, window=config.window
        )
    with _stage("report"):
        percentages = affect.emotion_percentages(arc)
        tension = affect.tension_metrics(arc)
    return PlayReport(
        title=document.title,
        lexical=lexical,
        frequencies=frequencies,
        arc=arc,
        percentages=percentages,
        tension=tension,
        scorer_identity=scorer_identity,
        config_fingerprint=fingerprint,
        top_n=config.top_n,
        cloud_canvas=config.cloud_canvas,
        cloud_seed=config.cloud_seed,
    )


def compare_plays(reports: list[PlayReport]) -> ComparativeReport:
    """Cross-play rankings from already-built reports; never recomputes.

    Requires identical window and scorer configuration; rankings break ties
    by title ascending. Dominant emotion ties resolve in fixed label order.
    """
    if len(reports) < 2:
        raise ConfigError("compare_plays needs at least two reports")
    reference = reports[0].scorer_identity
    differing = sorted(
        {
            key
            for report in reports[1:]
            for key in set(reference) | set(report.scorer_identity)
            if reference.get(key) != report.scorer_identity.get(key)
        }
    )
    if differing:
        raise IncompatibleReportsError(differing)

    ttr_ranking = tuple(
        r.title for r in sorted(reports, key=lambda r: (-r.lexical.ttr, r.title))
    )
    tension_ranking = tuple(
        r.title
        for r in sorted(reports, key=lambda r: (-r.tension.final_third_delta, r.title))
    )
    dominant = {r.title: _dominant_emotion(r.percentages) for r in reports}
    term_sets = [set(term for term, _ in r.frequencies.entries) for r in reports]
    shared = set.intersection(*term_sets) if term_sets else set()
    return ComparativeReport(
        plays=tuple(r.title for r in reports),
        ttr_ranking=ttr_ranking,
        dominant_emotion=dominant,
        shared_top_terms=tuple(sorted(shared)),
        tension_ranking=tension_ranking,
    )


def _dominant_emotion(percentages: dict[str, float]) -> str:
    best = max(percentages[label] for label in EMOTION_LABELS)
    for label in EMOTION_LABELS:  # fixed-order tie-break
        if percentages[label] == best:
            return label
    raise AssertionError("unreachable")


def report_to_dict(report: PlayReport) -> dict:
    points = []
    for point in report.arc.points:
        row: dict[str, object] = {"segment": point.segment_index}
        if point.valence is not None:
            row["valence"] = point.valence.value
        if point.emotions is not None:
            row["emotions"] = dict(point.emotions.scores)
            row["no_signal"] = point.emotions.no_signal
        points.append(row)
    return {
        "title": report.title,
        "config_fingerprint": report.config_fingerprint,
        "scorer_identity": report.scorer_identity,
        "lexical": {
            "token_count": report.lexical.token_count,
            "type_count": report.lexical.type_count,
            "ttr": report.lexical.ttr,
            "scope": report.lexical.scope,
        },
        "frequencies": {
            "entries": [[term, count] for term, count in report.frequencies.entries],
            "total": report.frequencies.total,
        },
        "arc": {"window": report.arc.window, "points": points},
        "percentages": dict(report.percentages),
        "tension": {
            "final_third_delta": report.tension.final_third_delta,
            "peak_negativity_index": report.tension.peak_negativity_index,
            "mean_valence": report.tension.mean_valence,
        },
        "render": {
            "top_n": report.top_n,
            "wordcloud": {
                "width": report.cloud_canvas[0],
                "height": report.cloud_canvas[1],
                "seed": report.cloud_seed,
            },
        },
    }


def report_from_dict(payload: dict) -> PlayReport:
    lexical = LexicalSummary(
        token_count=payload["lexical"]["token_count"],
        type_count=payload["lexical"]["type_count"],
        ttr=payload["lexical"]["ttr"],
        scope=payload["lexical"]["scope"],
    )
    frequencies = FrequencyTable(
        entries=tuple((term, count) for term, count in payload["frequencies"]["entries"]),
        total=payload["frequencies"]["total"],
    )
    points = []
    for row in payload["arc"]["points"]:
        valence = Valence(row["valence"]) if "valence" in row else None
        emotions = (
            _profile_from_serialized(dict(row["emotions"]), row.get("no_signal", False))
            if "emotions" in row
            else None
        )
        points.append(
            ArcPoint(segment_index=row["segment"], valence=valence, emotions=emotions)
        )
    arc = AffectArc(
        play=payload["title"], points=tuple(points), window=payload["arc"]["window"]
    )
    tension = TensionMetrics(
        final_third_delta=payload["tension"]["final_third_delta"],
        peak_negativity_index=payload["tension"]["peak_negativity_index"],
        mean_valence=payload["tension"]["mean_valence"],
    )
    render_cfg = payload.get("render", {})
    cloud = render_cfg.get("wordcloud", {})
    return PlayReport(
        title=payload["title"],
        lexical=lexical,
        frequencies=frequencies,
        arc=arc,
        percentages=dict(payload["percentages"]),
        tension=tension,
        scorer_identity=dict(payload["scorer_identity"]),
        config_fingerprint=payload["config_fingerprint"],
        top_n=render_cfg.get("top_n", len(frequencies.entries) or 10),
        cloud_canvas=(cloud.get("width", 800), cloud.get("height", 500)),
        cloud_seed=cloud.get("seed", 42),
    )


def _profile_from_serialized(scores: dict[str, float], no_signal: bool) -> EmotionProfile:
    # Serialized scores are rounded to six decimals, so the strict sum
    # invariant cannot be rechecked; keep the bytes verbatim instead of
    # renormalizing, which would break byte-identical re-rendering.
    profile = EmotionProfile.__new__(EmotionProfile)
    object.__setattr__(profile, "scores", scores)
    object.__setattr__(profile, "no_signal", no_signal)
    return profile


def comparative_to_dict(report: ComparativeReport) -> dict:
    return {
        "plays": list(report.plays),
        "ttr_ranking": list(report.ttr_ranking),
        "dominant_emotion": dict(report.dominant_emotion),
        "shared_top_terms": list(report.shared_top_terms),
        "tension_ranking": list(report.tension_ranking),
    }


def arc_csv(arc: AffectArc) -> str:
    """CSV schema: segment,valence,sadness,joy,love,anger,fear,surprise,no_signal."""
    lines = ["segment,valence," + ",".join(EMOTION_LABELS) + ",no_signal"]
    for point in arc.points:
        valence = f"{point.valence.value:.6f}" if point.valence is not None else ""
        if point.emotions is not None:
            scores = ",".join(f"{point.emotions.scores[l]:.6f}" for l in EMOTION_LABELS)
            no_signal = "true" if point.emotions.no_signal else "false"
        else:
            scores = ",".join([""] * len(EMOTION_LABELS))
            no_signal = ""
        lines.append(f"{point.segment_index},{valence},{scores},{no_signal}")
    return "\n".join(lines) + "\n"


def frequencies_csv(table: FrequencyTable) -> str:
    lines = ["term,count"]
    for term, count in table.entries:
        quoted = f'"{term}"' if ("," in term or '"' in term) else term
        lines.append(f"{quoted},{count}")
    return "\n".join(lines) + "\n"


def _safe_dirname(title: str) -> str:
    cleaned = re.sub(r"[\x00-\x1f/\\]+", "_", title).strip()
    return cleaned or "untitled"


def render(report: PlayReport, formats: list[str], out_dir: str) -> list[str]:
    """Write the report's output tree; returns the paths written.

    <out>/<title>/report.json, arc.csv, frequencies.csv, arc.svg,
    emotions.svg, wordcloud.svg. All outputs are deterministic.
    """
    for fmt in formats:
        if fmt not in ("json", "csv", "svg"):
            raise ConfigError(f"unknown output format {fmt!r}")
    target = os.path.join(out_dir, _safe_dirname(report.title))
    try:
        os.makedirs(target, exist_ok=True)
    except OSError as exc:
        raise AnalysisError("report", DramaturgError(f"unwritable output path: {exc}")) from None
    written = []

    def _write(name: str, content: str) -> None:
        path = os.path.join(target, name)
        try:
            with open(path, "w", encoding="utf-8", newline="") as handle:
                handle.write(content)
        except OSError as exc:
            raise AnalysisError(
                "report", DramaturgError(f"unwritable output path {path}: {exc}")
            ) from None
        written.append(path)

    if "json" in formats:
        _write("report.json", canonical_json(report_to_dict(report)))
    if "csv" in formats:
        _write("arc.csv", arc_csv(report.arc))
        _write("frequencies.csv", frequencies_csv(report.frequencies))
    if "svg" in formats:
        _write("arc.svg", svg.render_arc_svg(report.arc))
        _write("emotions.svg", svg.render_percentages_svg(report.percentages, report.title))
        cloud = lexstats.wordcloud_layout(
            report.frequencies, canvas=report.cloud_canvas, seed=report.cloud_seed
        )
        _write("wordcloud.svg", svg.render_wordcloud_svg(cloud))
    return written
