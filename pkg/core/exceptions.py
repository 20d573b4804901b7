class BfsBiasError(ValueError):
    """Base class for every error raised by the bfsbias apps."""
