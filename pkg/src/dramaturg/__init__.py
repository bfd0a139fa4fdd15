"""dramaturg: stage-minute analytics for dramatic texts.

Ingests cleaned play texts, splits them into fixed-size word windows
("stage minutes"), computes lexical statistics (TTR, frequencies, word
clouds) and sentiment/emotion arcs via pluggable scorers, and renders
per-play and comparative reports as JSON, CSV, and SVG.
"""

from .affect import (
    AffectArc,
    ArcPoint,
    EMOTION_LABELS,
    EmotionProfile,
    LexiconEmotionScorer,
    LexiconSentimentScorer,
    ScorerDescriptor,
    TensionMetrics,
    Valence,
    build_arc,
    emotion_percentages,
    score_segment_emotions,
    score_segment_sentiment,
    tension_metrics,
)
from .corpus import (
    CleaningRules,
    RawDocument,
    Segment,
    SegmentationConfig,
    Token,
    TokenizedPlay,
    clean_text,
    load_document,
    load_stoplist,
    bundled_stoplist,
    segment_tokens,
    split_sentences,
    tokenize,
    tokenize_play,
)
from .errors import DramaturgError
from .lexstats import (
    FrequencyTable,
    LexicalSummary,
    WordCloudSpec,
    type_token_ratio,
    word_frequencies,
    wordcloud_layout,
)
from .report import (
    AnalysisConfig,
    ComparativeReport,
    PlayReport,
    analyze_play,
    compare_plays,
    load_config,
    render,
)
from .scorer_bridge import ScoreRequest, ScoreResponse, open_scorer, score_batch

__version__ = "0.1.0"

__all__ = [
    "AffectArc",
    "AnalysisConfig",
    "ArcPoint",
    "CleaningRules",
    "ComparativeReport",
    "DramaturgError",
    "EMOTION_LABELS",
    "EmotionProfile",
    "FrequencyTable",
    "LexicalSummary",
    "LexiconEmotionScorer",
    "LexiconSentimentScorer",
    "PlayReport",
    "RawDocument",
    "ScoreRequest",
    "ScoreResponse",
    "ScorerDescriptor",
    "Segment",
    "SegmentationConfig",
    "TensionMetrics",
    "Token",
    "TokenizedPlay",
    "Valence",
    "WordCloudSpec",
    "analyze_play",
    "build_arc",
    "bundled_stoplist",
    "clean_text",
    "compare_plays",
    "emotion_percentages",
    "load_config",
    "load_document",
    "load_stoplist",
    "open_scorer",
    "render",
    "score_batch",
    "score_segment_emotions",
    "score_segment_sentiment",
    "segment_tokens",
    "split_sentences",
    "tension_metrics",
    "tokenize",
    "tokenize_play",
    "type_token_ratio",
    "word_frequencies",
    "wordcloud_layout",
]
