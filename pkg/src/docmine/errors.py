"""Exception types shared across the toolkit."""


class DocmineError(Exception):
    """Base class for all toolkit errors."""


class ParseError(DocmineError):
    """A source file could not be parsed into a syntax tree."""

    def __init__(self, path, line, message="syntax error"):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class ScaleMismatch(DocmineError):
    """Score values are inconsistent with their declared scale."""


class ScorerUnavailable(DocmineError):
    """The remote scorer endpoint stayed unreachable after all retries."""


class MalformedResponse(DocmineError):
    """A remote reply violated the documented wire schema."""


class EmptyInput(DocmineError):
    """A metric was asked to score an empty token sequence."""


class ProviderError(DocmineError):
    """An embedding provider failed to produce vectors."""


class DegenerateInput(DocmineError):
    """Rank agreement is undefined (fewer than two examples, or every
    comparable pair was dropped)."""


class JoinError(DocmineError):
    """Metric reports and human ratings share no (example, system) keys."""

    def __init__(self, unmatched_metric_keys, unmatched_human_keys):
        self.unmatched_metric_keys = sorted(unmatched_metric_keys)
        self.unmatched_human_keys = sorted(unmatched_human_keys)
        super().__init__(
            "empty join: %d metric rows and %d human rows left unmatched"
            % (len(self.unmatched_metric_keys), len(self.unmatched_human_keys))
        )


class SchemaError(DocmineError):
    """A JSON-lines record does not match the published schema."""

    def __init__(self, path, line_number, message):
        self.path = path
        self.line_number = line_number
        super().__init__(f"{path}:{line_number}: {message}")


class ValidationError(DocmineError):
    """A submitted record violates its type invariants."""

    def __init__(self, field_errors):
        # field_errors: mapping of field name -> human readable message
        self.field_errors = dict(field_errors)
        detail = "; ".join(f"{k}: {v}" for k, v in sorted(self.field_errors.items()))
        super().__init__(detail or "invalid record")


class NotAssigned(DocmineError):
    """The item was not assigned to the submitting annotator."""


class UnknownAnnotator(DocmineError):
    """The annotator id is not registered with the service."""


class ConfigError(DocmineError):
    """A pipeline or CLI configuration value is invalid."""
