"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A model or spec parameter violates its declared range."""


class DomainError(ValueError):
    """An operation was evaluated outside its mathematical domain."""


class SchemaError(ValueError):
    """A file (CSV header, JSON config, serialized model) does not match its schema."""


class ZeroVarianceError(ValueError):
    """A feature column has zero variance and cannot be standardized."""

    def __init__(self, feature: str):
        self.feature = feature
        super().__init__(f"feature {feature!r} has zero variance on the training split")


class LearningError(ValueError):
    """Training or prediction received input it cannot learn from."""


class SelectionError(LearningError):
    """An importance threshold left no features to retrain on."""
