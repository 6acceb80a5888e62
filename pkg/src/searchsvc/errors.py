"""Exception hierarchy. Every domain error carries a stable machine-readable code
so the API and CLI can surface the same error names."""

from __future__ import annotations


class SearchServiceError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.code)
        self.details = details


class SelectorParseError(SearchServiceError):
    code = "selector-parse-error"


class PathResolutionError(SearchServiceError):
    code = "unresolvable-path"


class SpecParseError(SearchServiceError):
    """Malformed spec text; carries line/column when known."""

    code = "parse-error"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class VersionMismatchError(SearchServiceError):
    code = "version-mismatch"


class InputNotFoundError(SearchServiceError):
    code = "input-not-found"


class InputHasNoNameError(SearchServiceError):
    code = "input-has-no-name"


class AmbiguousInputError(SearchServiceError):
    code = "ambiguous-input"


class FetchFailedError(SearchServiceError):
    code = "fetch-failed"


class StrategyUnconfiguredError(SearchServiceError):
    code = "strategy-unconfigured"


class NoApplicableStrategyError(SearchServiceError):
    code = "no-applicable-strategy"


class NoSuchPageError(SearchServiceError):
    code = "no-such-page"


class DuplicateProviderError(SearchServiceError):
    code = "duplicate-provider"


class QueryInvalidError(SearchServiceError):
    code = "query-invalid"


class SpecInvalidError(SearchServiceError):
    code = "spec-invalid"


class UnknownVisualizerError(SearchServiceError):
    code = "unknown-visualizer"


class InvalidOptionError(SearchServiceError):
    code = "invalid-option"


class DuplicateVisualizerError(SearchServiceError):
    code = "duplicate-id"


class UnknownOperatorError(SearchServiceError):
    code = "unknown-operator"


class NotFoundError(SearchServiceError):
    code = "not-found"


class StoreIOError(SearchServiceError):
    code = "io-error"


class PortInUseError(SearchServiceError):
    code = "port-in-use"
