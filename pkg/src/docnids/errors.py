"""Exception types shared across the toolkit.

The CLI maps these onto its exit-code contract: DataError -> 3,
ModelFormatError / SchemaMismatchError -> 4.
"""


class DataError(ValueError):
    """Malformed or unusable input data (CSV parse failures, bad labels)."""


class ModelFormatError(ValueError):
    """Model file is corrupt, truncated, or of an unsupported version."""


class SchemaMismatchError(ModelFormatError):
    """Model was trained on a different feature schema than supplied."""


class TrainingDivergedError(RuntimeError):
    """Loss went non-finite during training."""
