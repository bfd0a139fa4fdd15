"""Ingestion of play texts: cleaning, tokenization, sentences, stage-minute windows.

The pipeline is deterministic and dependency-free. Cleaning normalizes raw
extracted text (OCR artifacts, running heads, speaker labels); tokenization
uses Unicode word boundaries with explicit handling of French elided clitics
(l'homme -> l' + homme); segmentation slices the token stream into fixed-size
word windows, the "stage minutes" all downstream statistics are computed over.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources

from .errors import ConfigError, DecodeError

DEFAULT_WINDOW = 150

# Elided clitic prefixes, longest first so qu' never shadows jusqu'.
ELISION_PREFIXES = (
    "jusqu'",
    "lorsqu'",
    "puisqu'",
    "qu'",
    "l'",
    "d'",
    "j'",
    "n'",
    "s'",
    "t'",
    "c'",
    "m'",
)

_APOSTROPHES = ("'", "’")

# Letters and digits, joined by internal apostrophes or hyphens only.
_WORD_RE = re.compile(r"[^\W_]+(?:['’\-][^\W_]+)*")

# Hyphen at end of line between two word characters: OCR line-break hyphenation.
_HYPHEN_BREAK_RE = re.compile(r"(?<=[^\W\d_])-[ \t]*\n[ \t]*(?=[^\W\d_])")

# C0/C1 control characters except newline; replaced by a space.
_CTRL_RE = re.compile(r"[\x00-\x09\x0b-\x1f\x7f-\x9f]")

_WS_RUN_RE = re.compile(r"\s+")

# All-caps speaker label at line start, e.g. "LE DEALER." or "LE CLIENT : ",
# optionally followed by a dialogue dash. Requires two leading capitals so
# abbreviations like "M." survive.
_UPPER = "A-ZÀ-ÖØ-ÞŒÆ"
_SPEAKER_RE = re.compile(
    rf"^[ \t]*[{_UPPER}][{_UPPER}](?:['’ \t\-{_UPPER}])*[.:][ \t]*(?:[—–-][ \t]*)?",
    re.MULTILINE,
)

_TERMINALS = frozenset({".", "!", "?", "…"})
_CLOSING_QUOTES = frozenset({"»", "”", "’", '"', "'"})

# Period after these (adjacent) word forms does not end a sentence.
SENTENCE_ABBREVIATIONS = frozenset(
    {"m", "mm", "mme", "mmes", "mlle", "mlles", "dr", "st", "ste", "etc", "cf", "p", "pp"}
)


@dataclass(frozen=True)
class RawDocument:
    """A play as extracted text, before any cleaning."""

    title: str
    raw_text: str
    source_path: str = ""
    language_tag: str = "fr"

    def __post_init__(self) -> None:
        if not self.title:
            raise ConfigError("document title must be non-empty")


@dataclass(frozen=True)
class CleaningRules:
    dehyphenate_linebreaks: bool = True
    strip_control_chars: bool = True
    collapse_whitespace: bool = True
    drop_patterns: tuple[str, ...] = ()
    speaker_label_policy: str = "drop"

    def __post_init__(self) -> None:
        if self.speaker_label_policy not in ("keep", "drop"):
            raise ConfigError(
                f"speaker_label_policy must be 'keep' or 'drop', "
                f"got {self.speaker_label_policy!r}"
            )
        object.__setattr__(self, "drop_patterns", tuple(self.drop_patterns))


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    lower: str
    is_alpha: bool
    is_stopword: bool
    start: int
    end: int

    @property
    def char_span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class TokenizedPlay:
    document: RawDocument
    cleaned_text: str
    tokens: tuple[Token, ...]
    sentences: tuple[tuple[int, int], ...]

    @property
    def title(self) -> str:
        return self.document.title


@dataclass(frozen=True)
class Segment:
    """A stage minute: a window of ``word_count`` alphabetic word tokens."""

    index: int
    token_range: tuple[int, int]
    word_count: int
    is_partial: bool


@dataclass(frozen=True)
class SegmentationConfig:
    window: int = DEFAULT_WINDOW
    include_partial_tail: bool = True

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ConfigError(f"segmentation window must be >= 1, got {self.window}")


def load_document(path: str, title: str | None = None) -> RawDocument:
    """Read a UTF-8 play file; decode failures report the byte offset."""
    with open(path, "rb") as handle:
        data = handle.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DecodeError(path, exc.start, exc.reason) from None
    stem = re.sub(r"\.[^.]*$", "", path.replace("\\", "/").rsplit("/", 1)[-1])
    return RawDocument(title=title or stem or path, raw_text=text, source_path=path)


def normalize_apostrophes(text: str) -> str:
    return text.replace("’", "'")


def clean_text(doc: RawDocument, rules: CleaningRules) -> str:
    """Apply cleaning rules until a fixed point; the result is idempotent.

    Running to a fixed point keeps the idempotence guarantee even when one
    removal exposes new matches (stacked speaker labels, overlapping drop
    patterns). Every rewrite strictly shrinks the text, so this terminates.
    """
    compiled = []
    for pattern in rules.drop_patterns:
        try:
            compiled.append(re.compile(pattern, re.MULTILINE))
        except re.error as exc:
            raise ConfigError(f"invalid drop pattern {pattern!r}: {exc}") from None

    text = doc.raw_text
    previous = None
    while text != previous:
        previous = text
        text = _clean_pass(text, rules, compiled)
    return text


def _clean_pass(text: str, rules: CleaningRules, compiled: list[re.Pattern[str]]) -> str:
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    if rules.dehyphenate_linebreaks:
        text = _HYPHEN_BREAK_RE.sub("", text)
    for pattern in compiled:
        text = pattern.sub("", text)
    if rules.speaker_label_policy == "drop":
        text = _SPEAKER_RE.sub("", text)
    if rules.strip_control_chars:
        text = _CTRL_RE.sub(" ", text)
    if rules.collapse_whitespace:
        text = _collapse_whitespace(text)
    return text


def _collapse_whitespace(text: str) -> str:
    def repl(match: re.Match[str]) -> str:
        return "\n" if "\n" in match.group(0) else " "

    return _WS_RUN_RE.sub(repl, text).strip()


def load_stoplist(path: str) -> frozenset[str]:
    """One lowercased entry per line; '#' lines are comments.

    Entries are stored with both apostrophe variants so curly and straight
    forms match identically.
    """
    with open(path, "rb") as handle:
        data = handle.read()
    try:
        content = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DecodeError(path, exc.start, exc.reason) from None
    return _expand_stoplist(
        line.strip().casefold()
        for line in content.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    )


def bundled_stoplist() -> frozenset[str]:
    content = resources.files("dramaturg").joinpath("data/stopwords_fr.txt").read_text("utf-8")
    return _expand_stoplist(
        line.strip().casefold()
        for line in content.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    )


def _expand_stoplist(entries) -> frozenset[str]:
    expanded: set[str] = set()
    for entry in entries:
        expanded.add(entry.replace("’", "'"))
        expanded.add(entry.replace("'", "’"))
    return frozenset(expanded)


def tokenize(cleaned: str, stoplist: frozenset[str] = frozenset()) -> tuple[Token, ...]:
    """Segment cleaned text into word and punctuation tokens.

    Every non-whitespace character lands in exactly one token, so the
    concatenated char spans reconstruct the non-whitespace content exactly.
    Elided clitics are split off as their own (non-alpha) tokens; straight
    and curly apostrophes behave identically.
    """
    stoplist = _expand_stoplist(stoplist) if stoplist else frozenset()
    tokens: list[Token] = []
    pos = 0
    length = len(cleaned)
    while pos < length:
        char = cleaned[pos]
        if char.isspace():
            pos += 1
            continue
        match = _WORD_RE.match(cleaned, pos)
        if match:
            for start, end in _split_elisions(cleaned, match.start(), match.end()):
                tokens.append(_make_token(cleaned, start, end, stoplist))
            pos = match.end()
        else:
            tokens.append(_make_token(cleaned, pos, pos + 1, stoplist))
            pos += 1
    return tuple(tokens)


def _split_elisions(text: str, start: int, end: int) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    cursor = start
    while True:
        prefix_len = _elision_prefix_len(text, cursor, end)
        if prefix_len and cursor + prefix_len < end:
            spans.append((cursor, cursor + prefix_len))
            cursor += prefix_len
        else:
            break
    spans.append((cursor, end))
    return spans


def _elision_prefix_len(text: str, start: int, end: int) -> int:
    for prefix in ELISION_PREFIXES:
        plen = len(prefix)
        if end - start <= plen:
            continue
        if all(_norm_char(text[start + i]) == prefix[i] for i in range(plen)):
            return plen
    return 0


def _norm_char(char: str) -> str:
    if char in _APOSTROPHES:
        return "'"
    low = char.lower()
    return low if len(low) == 1 else char


def _make_token(text: str, start: int, end: int, stoplist: frozenset[str]) -> Token:
    surface = text[start:end]
    lower = surface.casefold()
    return Token(
        surface=surface,
        lower=lower,
        is_alpha=_is_alpha(surface),
        is_stopword=lower in stoplist,
        start=start,
        end=end,
    )


def _is_alpha(surface: str) -> bool:
    if surface[-1] in _APOSTROPHES:
        return False  # clitic tokens (l', qu') do not count as words
    return all(
        char.isalpha() or char in _APOSTROPHES or char == "-" for char in surface
    ) and any(char.isalpha() for char in surface)


def split_sentences(tokens: tuple[Token, ...]) -> tuple[tuple[int, int], ...]:
    """Token-index ranges that partition ``tokens`` into sentences.

    A range closes after a run of terminal punctuation (. ! ? ...) plus any
    closing quotes; a period adjacent to a known abbreviation does not close.
    A trailing range without a terminator is still emitted.
    """
    ranges: list[tuple[int, int]] = []
    start = 0
    i = 0
    count = len(tokens)
    while i < count:
        token = tokens[i]
        if token.surface in _TERMINALS and not _abbreviation_period(tokens, i):
            j = i + 1
            while j < count and (
                tokens[j].surface in _TERMINALS or tokens[j].surface in _CLOSING_QUOTES
            ):
                j += 1
            ranges.append((start, j))
            start = j
            i = j
        else:
            i += 1
    if start < count:
        ranges.append((start, count))
    return tuple(ranges)


def _abbreviation_period(tokens: tuple[Token, ...], i: int) -> bool:
    if tokens[i].surface != "." or i == 0:
        return False
    prev = tokens[i - 1]
    return (
        prev.end == tokens[i].start
        and prev.is_alpha
        and normalize_apostrophes(prev.lower) in SENTENCE_ABBREVIATIONS
    )


def tokenize_play(doc: RawDocument, rules: CleaningRules,
                  stoplist: frozenset[str] = frozenset()) -> TokenizedPlay:
    cleaned = clean_text(doc, rules)
    tokens = tokenize(cleaned, stoplist)
    sentences = split_sentences(tokens)
    return TokenizedPlay(document=doc, cleaned_text=cleaned, tokens=tokens, sentences=sentences)


def segment_tokens(play: TokenizedPlay, cfg: SegmentationConfig) -> tuple[Segment, ...]:
    """Slice the token stream into consecutive windows of cfg.window words.

    Only alphabetic word tokens count toward the window; punctuation and
    clitics travel with the preceding word (leading ones join the first
    window). The final short window is kept, flagged partial, when
    include_partial_tail is set.
    """
    tokens = play.tokens
    total = len(tokens)
    if total == 0:
        return ()
    segments: list[Segment] = []
    start = 0
    words = 0
    index = 0
    i = 0
    while i < total:
        if tokens[i].is_alpha:
            words += 1
            if words == cfg.window:
                j = i + 1
                while j < total and not tokens[j].is_alpha:
                    j += 1
                segments.append(
                    Segment(index=index, token_range=(start, j), word_count=words,
                            is_partial=False)
                )
                index += 1
                start = j
                words = 0
                i = j
                continue
        i += 1
    if start < total and cfg.include_partial_tail:
        segments.append(
            Segment(index=index, token_range=(start, total), word_count=words,
                    is_partial=True)
        )
    return tuple(segments)


def play_to_json(play: TokenizedPlay) -> str:
    """Cache form: tokens as [surface, start, end, flags]; flags bit 1 = alpha,
    bit 2 = stopword. The lower form is recomputed on load."""
    payload = {
        "title": play.document.title,
        "source_path": play.document.source_path,
        "language_tag": play.document.language_tag,
        "cleaned_text": play.cleaned_text,
        "tokens": [
            [t.surface, t.start, t.end, (1 if t.is_alpha else 0) | (2 if t.is_stopword else 0)]
            for t in play.tokens
        ],
        "sentences": [list(r) for r in play.sentences],
    }
    return json.dumps(payload, ensure_ascii=False)


def play_from_json(serialized: str) -> TokenizedPlay:
    payload = json.loads(serialized)
    doc = RawDocument(
        title=payload["title"],
        raw_text="",
        source_path=payload.get("source_path", ""),
        language_tag=payload.get("language_tag", "fr"),
    )
    tokens = tuple(
        Token(
            surface=surface,
            lower=surface.casefold(),
            is_alpha=bool(flags & 1),
            is_stopword=bool(flags & 2),
            start=start,
            end=end,
        )
        for surface, start, end, flags in payload["tokens"]
    )
    sentences = tuple((a, b) for a, b in payload["sentences"])
    return TokenizedPlay(
        document=doc,
        cleaned_text=payload["cleaned_text"],
        tokens=tokens,
        sentences=sentences,
    )
