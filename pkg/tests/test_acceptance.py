"""Acceptance suite: one test per release criterion, at the stated tolerance
and time budget. Each test prints a `[acceptance] <name>: PASS|FAIL` line.

The golden-pipeline test does not only byte-compare against the frozen files,
it also recomputes every number independently (tests/oracles.py), so a stale
or hand-edited golden cannot pass.
"""

from __future__ import annotations

import functools
import json
import os
import random
import shutil
import sys
import time
from pathlib import Path

import pytest

import oracles
from conftest import fixture_config
from dramaturg import corpus
from dramaturg.affect import (
    EMOTION_LABELS,
    EmotionProfile,
    LexiconEmotionScorer,
    LexiconSentimentScorer,
    Valence,
    ArcPoint,
    AffectArc,
    build_arc,
    emotion_percentages,
    score_segment_sentiment,
    tension_metrics,
)
from dramaturg.corpus import (
    RawDocument,
    SegmentationConfig,
    Token,
    TokenizedPlay,
    segment_tokens,
    split_sentences,
    tokenize,
)
from dramaturg.errors import ConnectionDroppedError
from dramaturg.lexstats import (
    FrequencyTable,
    type_token_ratio,
    word_frequencies,
    wordcloud_layout,
)
from dramaturg.report import (
    PlayReport,
    analyze_play,
    compare_plays,
    render,
)
from dramaturg.scorer_bridge import open_scorer, score_batch
from dramaturg.lexstats import LexicalSummary
from dramaturg.affect import TensionMetrics

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"
MOCK = str(Path(__file__).parent / "mock_scorer.py")
SIDECAR_DIST = Path(__file__).parent.parent / "sidecar" / "dist" / "main.js"

VOCAB = [
    "nuit", "jour", "homme", "femme", "désir", "froid", "temps", "main",
    "regard", "heure", "ombre", "rue", "monde", "corps", "tête", "chien",
    "mur", "porte", "ciel", "eau",
]


def criterion(name: str, budget: float):
    """Wraps a test: enforce the runtime budget and print the PASS/FAIL line."""

    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            started = time.perf_counter()
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[acceptance] {name}: FAIL")
                raise
            elapsed = time.perf_counter() - started
            assert elapsed < budget, f"{name} took {elapsed:.2f}s, budget {budget}s"
            print(f"[acceptance] {name}: PASS ({elapsed:.2f}s)")

        return wrapper

    return decorate


def _random_tokens(rng: random.Random, size: int) -> tuple[Token, ...]:
    tokens = []
    offset = 0
    for _ in range(size):
        if rng.random() < 0.15:
            surface = rng.choice([".", ",", "!", "12"])
            alpha = False
        else:
            surface = rng.choice(VOCAB)
            alpha = True
        tokens.append(
            Token(
                surface=surface,
                lower=surface.casefold(),
                is_alpha=alpha,
                is_stopword=False,
                start=offset,
                end=offset + len(surface),
            )
        )
        offset += len(surface) + 1
    return tuple(tokens)


@criterion("oracle-equivalence (ttr + frequencies)", budget=10.0)
def test_ttr_and_frequencies_match_naive_oracles_exactly():
    rng = random.Random(1201)
    for trial in range(100):
        size = rng.randint(1, 10_000)
        tokens = _random_tokens(rng, size)
        lowers = [t.lower for t in tokens if t.is_alpha]
        if not lowers:
            continue
        summary = type_token_ratio(tokens)
        assert summary.ttr == oracles.naive_ttr(lowers)
        assert summary.token_count == len(lowers)
        assert summary.type_count == len(set(lowers))

        stoplist = frozenset(rng.sample(VOCAB, rng.randint(0, 4)))
        top_n = rng.randint(1, 12)
        table = word_frequencies(tokens, stoplist, top_n)
        assert list(table.entries) == oracles.naive_frequencies(
            lowers, set(stoplist), top_n
        )


@criterion("segmentation invariants", budget=5.0)
def test_segmentation_partitions_random_token_lists():
    rng = random.Random(77)
    doc = RawDocument(title="fuzz", raw_text="x")
    sizes = [0, 1, 149, 150, 151, 10_000] + [rng.randint(2, 10_000) for _ in range(30)]
    for size in sizes:
        tokens = _random_tokens(rng, size)
        play = TokenizedPlay(
            document=doc, cleaned_text="", tokens=tokens, sentences=((0, size),) if size else ()
        )
        segments = segment_tokens(play, SegmentationConfig(window=150))
        covered = [
            i for seg in segments for i in range(seg.token_range[0], seg.token_range[1])
        ]
        assert covered == list(range(size))
        partials = [seg for seg in segments if seg.is_partial]
        assert len(partials) <= 1
        if partials:
            assert partials[0] is segments[-1]
        for seg in segments:
            alpha = sum(1 for i in range(*seg.token_range) if tokens[i].is_alpha)
            assert alpha == seg.word_count
            if not seg.is_partial:
                assert seg.word_count == 150


@criterion("golden pipeline (byte-identical + oracle cross-check)", budget=5.0)
def test_golden_pipeline_outputs(tmp_path):
    report = analyze_play(
        str(FIXTURES / "play_synthetic.txt"), fixture_config(),
        out_dir=str(tmp_path), use_cache=False,
    )
    render(report, ["json", "csv", "svg"], str(tmp_path))
    produced = tmp_path / "play_synthetic"
    for name in (
        "report.json", "arc.csv", "frequencies.csv",
        "arc.svg", "emotions.svg", "wordcloud.svg",
    ):
        assert (produced / name).read_bytes() == (GOLDEN / name).read_bytes(), (
            f"{name} differs from frozen golden"
        )

    # independent recomputation of the frozen numbers
    assert len(report.arc.points) == 10
    text = (FIXTURES / "play_synthetic.txt").read_text(encoding="utf-8")
    lines = [l for l in text.splitlines() if l.strip()]
    polarity = {"clair": 1.0, "vif": 0.5, "morne": -0.5, "sombre": -1.0}
    assoc = {
        "chagrin": "sadness", "joie": "joy", "tendresse": "love",
        "colère": "anger", "peur": "fear", "étrange": "surprise",
    }
    oracle_valences = []
    profiles = []
    for seg_index in range(10):
        units = [oracles.simple_words(s) for s in lines[seg_index * 15:(seg_index + 1) * 15]]
        oracle_valences.append(oracles.naive_segment_valence(units, polarity))
        prof, no_signal = oracles.naive_emotion_profile(units, assoc)
        if not no_signal:
            profiles.append(prof)
        point = report.arc.points[seg_index]
        assert point.valence.value == pytest.approx(oracle_valences[-1], abs=1e-9)
        assert point.emotions.no_signal == no_signal
        for label in EMOTION_LABELS:
            assert point.emotions.scores[label] == pytest.approx(
                prof[label], abs=1e-9
            )
    expected_pct = oracles.naive_percentages(profiles)
    for label in EMOTION_LABELS:
        assert report.percentages[label] == pytest.approx(expected_pct[label], abs=1e-6)
    delta, peak, mean = oracles.naive_tension(oracle_valences)
    assert report.tension.final_third_delta == pytest.approx(delta, abs=1e-9)
    assert report.tension.peak_negativity_index == peak
    assert report.tension.mean_valence == pytest.approx(mean, abs=1e-9)

    words = oracles.simple_words(text)
    assert report.lexical.ttr == oracles.naive_ttr(words)
    stop_text = (
        Path(corpus.__file__).parent / "data" / "stopwords_fr.txt"
    ).read_text(encoding="utf-8")
    stoplist = {
        line.strip() for line in stop_text.splitlines()
        if line.strip() and not line.startswith("#")
    }
    assert list(report.frequencies.entries) == oracles.naive_frequencies(
        words, stoplist, 10
    )

    # the hand-computed lexicon valence example: p = 1/3 -> (p+1)/2
    scorer = LexiconSentimentScorer({"bon": 1.0, "mauvais": -1.0})
    valence = score_segment_sentiment(["bon bon mauvais"], scorer)
    assert valence.value == pytest.approx(2 / 3, abs=1e-9)


@criterion("injected-tension detection", budget=2.0)
def test_injected_tension_detected_and_uniform_is_flat():
    scorer = LexiconSentimentScorer({"sombre": -1.0, "clair": 1.0})

    def play_from(sentences: list[str]) -> tuple[TokenizedPlay, tuple]:
        text = " ".join(sentences)
        tokens = tokenize(text)
        play = TokenizedPlay(
            document=RawDocument(title="t", raw_text=text),
            cleaned_text=text,
            tokens=tokens,
            sentences=split_sentences(tokens),
        )
        return play, segment_tokens(play, SegmentationConfig(window=10))

    # ten words per sentence so each window owns exactly one sentence;
    # both variants match "clair", the dense one doubles the "sombre" hits
    base = "le jour est clair mais la ville devient sombre ici."
    dense = "le jour est clair mais la ville sombre devient sombre."
    play, segments = play_from([base] * 6 + [dense] * 3)
    arc = build_arc(play, segments, scorer, None)
    assert len(arc.points) == 9
    metrics = tension_metrics(arc)
    assert metrics.final_third_delta > 0

    uniform_play, uniform_segments = play_from([base] * 9)
    uniform_arc = build_arc(uniform_play, uniform_segments, scorer, None)
    uniform_metrics = tension_metrics(uniform_arc)
    assert abs(uniform_metrics.final_third_delta) < 1e-9


@criterion("affect invariants", budget=5.0)
def test_affect_profile_and_percentage_invariants():
    rng = random.Random(4242)
    emotion_terms = {
        "chagrin": "sadness", "joie": "joy", "tendresse": "love",
        "colère": "anger", "peur": "fear", "étrange": "surprise",
    }
    scorer = LexiconEmotionScorer(emotion_terms)
    pool = list(emotion_terms) + VOCAB
    from dramaturg.affect import score_segment_emotions

    for _ in range(200):
        units = [
            " ".join(rng.choice(pool) for _ in range(rng.randint(1, 12)))
            for _ in range(rng.randint(1, 6))
        ]
        profile = score_segment_emotions(units, scorer)
        if profile.no_signal:
            assert all(v == pytest.approx(1 / 6) for v in profile.scores.values())
        else:
            assert sum(profile.scores.values()) == pytest.approx(1.0, abs=1e-9)

    for _ in range(30):
        n = rng.randint(1, 40)
        profiles = []
        for _ in range(n):
            raw = [rng.random() + 1e-12 for _ in range(6)]
            total = sum(raw)
            profiles.append(
                EmotionProfile(
                    scores={l: raw[i] / total for i, l in enumerate(EMOTION_LABELS)}
                )
            )
        points = tuple(
            ArcPoint(segment_index=i, valence=Valence(0.5), emotions=profiles[i])
            for i in range(n)
        )
        arc = AffectArc(play="fuzz", points=points, window=150)
        shares = emotion_percentages(arc)
        assert sum(shares.values()) == pytest.approx(100.0, abs=1e-6)

        shuffled_profiles = profiles[:]
        rng.shuffle(shuffled_profiles)
        shuffled_points = tuple(
            ArcPoint(segment_index=i, valence=Valence(0.5), emotions=shuffled_profiles[i])
            for i in range(n)
        )
        shuffled = emotion_percentages(
            AffectArc(play="fuzz", points=shuffled_points, window=150)
        )
        for label in EMOTION_LABELS:
            assert shuffled[label] == pytest.approx(shares[label], abs=1e-9)


@criterion("word-cloud safety", budget=5.0)
def test_wordcloud_overlap_free_and_seed_deterministic():
    rng = random.Random(31337)
    for trial in range(50):
        n_terms = rng.randint(1, 20)
        entries = sorted(
            (
                ("mot" + chr(97 + i // 26) + chr(97 + i % 26) * rng.randint(1, 3),
                 rng.randint(1, 90))
                for i in range(n_terms)
            ),
            key=lambda kv: (-kv[1], kv[0]),
        )
        table = FrequencyTable(
            entries=tuple(entries), total=sum(c for _, c in entries)
        )
        first = wordcloud_layout(table, canvas=(640, 420), seed=trial)
        second = wordcloud_layout(table, canvas=(640, 420), seed=trial)
        assert first == second, "same seed must give a bit-identical layout"
        boxes = [item.bounding_box for item in first.items]
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                assert not oracles.boxes_overlap(boxes[i], boxes[j])


@criterion("protocol conformance under faults", budget=5.0)
def test_protocol_conformance_with_fault_injection():
    def cmd(*flags: str) -> list[str]:
        return [sys.executable, MOCK, *flags]

    # out-of-order replies come back in request order, resolved exactly once
    with open_scorer(cmd("--buffer", "4")) as handle:
        requests = [handle.make_request("sentiment", f"unit {i}") for i in range(12)]
        responses = score_batch(handle, requests)
    assert [r.id for r in responses] == [r.id for r in requests]
    assert len({r.id for r in responses}) == len(requests)

    # per-item errors surface without failing the batch
    with open_scorer(cmd("--fail-ids", "2,4")) as handle:
        requests = [handle.make_request("sentiment", f"unit {i}") for i in range(6)]
        responses = score_batch(handle, requests)
    errored = [r.id for r in responses if r.error is not None]
    assert errored == [2, 4]
    assert all(r.valence is not None for r in responses if r.error is None)

    # dropped connection reports the last acknowledged id
    with open_scorer(cmd("--die-after", "5")) as handle:
        requests = [handle.make_request("sentiment", f"unit {i}") for i in range(9)]
        with pytest.raises(ConnectionDroppedError) as err:
            score_batch(handle, requests)
    assert err.value.last_acked_id == 4


@criterion("comparative correctness", budget=2.0)
def test_comparative_rankings(tmp_path):
    config = fixture_config(window=50)
    reports = {}
    for name, expected_ttr in (("high", 0.8), ("mid", 0.5), ("low", 0.3)):
        path = FIXTURES / f"play_ttr_{name}.txt"
        words = oracles.simple_words(path.read_text(encoding="utf-8"))
        assert oracles.naive_ttr(words) == pytest.approx(expected_ttr, abs=1e-12)
        reports[name] = analyze_play(str(path), config, out_dir=str(tmp_path))
        assert reports[name].lexical.ttr == pytest.approx(expected_ttr, abs=1e-12)
    comparative = compare_plays([reports["mid"], reports["low"], reports["high"]])
    assert comparative.ttr_ranking == (
        "play_ttr_high", "play_ttr_mid", "play_ttr_low"
    )

    # dominant_emotion agrees with argmax over randomized percentage tables
    rng = random.Random(99)
    for _ in range(50):
        raw = [rng.random() + 1e-9 for _ in range(6)]
        total = sum(raw)
        percentages = {
            label: 100.0 * raw[i] / total for i, label in enumerate(EMOTION_LABELS)
        }
        stub = _stub_report("fuzz", percentages)
        comparative = compare_plays([stub, _stub_report("other", percentages)])
        got = comparative.dominant_emotion["fuzz"]
        assert percentages[got] == max(percentages.values())


def _stub_report(title: str, percentages: dict[str, float]) -> PlayReport:
    profile = EmotionProfile(
        scores={l: percentages[l] / 100.0 for l in EMOTION_LABELS}
    )
    arc = AffectArc(
        play=title,
        points=(
            ArcPoint(segment_index=0, valence=Valence(0.5), emotions=profile),
            ArcPoint(segment_index=1, valence=Valence(0.4), emotions=profile),
            ArcPoint(segment_index=2, valence=Valence(0.3), emotions=profile),
        ),
        window=150,
    )
    return PlayReport(
        title=title,
        lexical=LexicalSummary(token_count=10, type_count=5, ttr=0.5, scope=title),
        frequencies=FrequencyTable(entries=(("nuit", 3),), total=3),
        arc=arc,
        percentages=percentages,
        tension=TensionMetrics(
            final_third_delta=0.1, peak_negativity_index=2, mean_valence=0.4
        ),
        scorer_identity={"sentiment": "stub", "emotion": "stub", "window": 150},
        config_fingerprint="stub",
        top_n=10,
        cloud_canvas=(800, 500),
        cloud_seed=42,
    )


# --- secondary component -----------------------------------------------------

node_available = shutil.which("node") is not None


@pytest.mark.skipif(
    not node_available or not SIDECAR_DIST.exists(),
    reason="sidecar not built (cd sidecar && npm install && npm run build)",
)
@criterion("sidecar stub conformance", budget=5.0)
def test_sidecar_stub_round_trip(tmp_path):
    import hashlib

    texts = [f"réplique {i}" for i in range(10)]
    script = {
        "default": {"valence": 0.5},
        "by_hash": {
            hashlib.sha256(t.encode("utf-8")).hexdigest(): {"valence": round(0.05 * (i + 1), 2)}
            for i, t in enumerate(texts)
        },
    }
    script_path = tmp_path / "script.json"
    script_path.write_text(json.dumps(script), encoding="utf-8")
    endpoint = ["node", str(SIDECAR_DIST), "--mode", "stub",
                "--stub-script", str(script_path)]
    with open_scorer(endpoint) as handle:
        assert set(handle.capabilities) == {"sentiment", "emotion"}
        requests = [handle.make_request("sentiment", t) for t in texts]
        responses = score_batch(handle, requests)
    assert [r.id for r in responses] == [r.id for r in requests]
    assert [r.valence for r in responses] == [
        pytest.approx(0.05 * (i + 1)) for i in range(10)
    ]


@pytest.mark.skipif(
    not os.environ.get("DRAMATURG_REAL_SIDECAR"),
    reason="manual, network-dependent: set DRAMATURG_REAL_SIDECAR=1 to run",
)
@criterion("sidecar real-mode sanity (manual)", budget=600.0)
def test_sidecar_real_mode_sanity():
    endpoint = ["node", str(SIDECAR_DIST), "--mode", "real"]
    with open_scorer(endpoint, timeout=300.0) as handle:
        sentence = "La nuit tombe et la peur grandit dans la solitude."
        results = []
        if "sentiment" in handle.capabilities:
            (response,) = score_batch(handle, [handle.make_request("sentiment", sentence)])
            assert response.valence is not None and 0.0 <= response.valence <= 1.0
            results.append(("valence", response.valence))
        if "emotion" in handle.capabilities:
            (response,) = score_batch(handle, [handle.make_request("emotion", sentence)])
            assert sum(response.scores.values()) == pytest.approx(1.0, abs=1e-6)
            results.append(("emotions", response.scores))
        assert results, "sidecar advertised no usable capability"
