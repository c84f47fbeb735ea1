"""Exception hierarchy shared by all framepick modules.

Each error class carries the process exit code the CLI maps it to:
0 success, 1 validation, 2 adapter/protocol, 3 I/O.
"""

from __future__ import annotations


class FramepickError(Exception):
    exit_code = 1


class ValidationError(FramepickError):
    """Bad input data or configuration."""

    exit_code = 1


class ManifestError(ValidationError):
    """Malformed selection-manifest document."""


class FembFormatError(ValidationError):
    """Malformed FEMB embedding/score file."""


class DatasetError(ValidationError):
    """Malformed QA dataset file."""


class DegenerateInputError(FramepickError):
    """Numerically degenerate matrix (all-zero or rank-deficient).

    Callers that own a fallback policy (the MaxInfo sampler) catch this.
    """

    exit_code = 1


class AdapterError(FramepickError):
    """Adapter process failed to start or died unexpectedly."""

    exit_code = 2


class ProtocolError(AdapterError):
    """Adapter violated the line-delimited JSON wire protocol."""

    exit_code = 2


class AdapterTimeout(AdapterError):
    """No response for a request within the deadline.

    Recorded per item as an unparsed answer with cause "timeout"; only
    escapes to the CLI if raised outside a harness run.
    """

    exit_code = 2


class DecodeError(FramepickError):
    """External frame decoder failed or produced no output."""

    exit_code = 3


class IoError(FramepickError):
    """Filesystem failure on a CLI input or output path."""

    exit_code = 3
