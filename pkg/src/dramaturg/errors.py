"""Exception hierarchy shared across the toolkit.

Exit-code mapping used by the CLI: configuration and usage problems exit 1,
analysis failures exit 2, scorer and protocol failures exit 3.
"""

from __future__ import annotations


class DramaturgError(Exception):
    """Base class for all toolkit errors."""


class DecodeError(DramaturgError):
    """Input bytes are not valid UTF-8; carries the offending byte offset."""

    def __init__(self, source: str, byte_offset: int, reason: str) -> None:
        super().__init__(f"{source}: invalid UTF-8 at byte {byte_offset}: {reason}")
        self.source = source
        self.byte_offset = byte_offset


class ConfigError(DramaturgError):
    """Invalid configuration value (bad pattern, zero window, unknown key)."""


class EmptyScopeError(DramaturgError):
    """An operation was asked to summarize an empty token or text scope."""


class CanvasExhaustedError(DramaturgError):
    """The heaviest word-cloud term cannot be placed on the given canvas."""


class ArcTooShortError(DramaturgError):
    """Tension metrics need at least three sentiment points."""


class NoSignalError(DramaturgError):
    """Every arc point carries no emotional signal."""


class IncompatibleReportsError(DramaturgError):
    """Reports being compared were produced under differing configurations."""

    def __init__(self, differing_keys: list[str]) -> None:
        super().__init__(
            "reports are not comparable; differing keys: " + ", ".join(differing_keys)
        )
        self.differing_keys = differing_keys


class ScorerError(DramaturgError):
    """A scorer failed; optionally annotated with the segment being scored."""

    def __init__(self, message: str, segment_index: int | None = None) -> None:
        if segment_index is not None:
            message = f"segment {segment_index}: {message}"
        super().__init__(message)
        self.segment_index = segment_index


class ScorerLaunchError(ScorerError):
    """External scorer could not be launched or reached."""


class HandshakeTimeoutError(ScorerError):
    """External scorer did not complete the handshake in time."""


class VersionMismatchError(ScorerError):
    """External scorer speaks an unsupported protocol version."""

    def __init__(self, server_version: object) -> None:
        super().__init__(f"unsupported protocol version from server: {server_version!r}")
        self.server_version = server_version


class ProtocolError(ScorerError):
    """External scorer sent a malformed or contract-violating message."""


class ConnectionDroppedError(ScorerError):
    """Connection to the external scorer dropped mid-batch.

    ``last_acked_id`` is the id of the last response received before the
    drop, or None when nothing was acknowledged.
    """

    def __init__(self, last_acked_id: int | None) -> None:
        acked = "none" if last_acked_id is None else str(last_acked_id)
        super().__init__(f"connection dropped; last acknowledged id: {acked}")
        self.last_acked_id = last_acked_id


class ScorerTimeoutError(ScorerError):
    """No response from the external scorer within the per-request timeout."""

    def __init__(self, last_acked_id: int | None, timeout: float) -> None:
        acked = "none" if last_acked_id is None else str(last_acked_id)
        super().__init__(
            f"timed out after {timeout:g}s waiting for a response; "
            f"last acknowledged id: {acked}"
        )
        self.last_acked_id = last_acked_id


class AnalysisError(DramaturgError):
    """Pipeline failure wrapped with the stage that produced it."""

    STAGES = ("clean", "tokenize", "segment", "score", "report")

    def __init__(self, stage: str, cause: Exception) -> None:
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
