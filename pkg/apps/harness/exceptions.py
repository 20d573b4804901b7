from core.exceptions import BfsBiasError


class HarnessError(BfsBiasError):
    pass


class ConfigError(HarnessError):
    """Config document violations, one ``"field.path: message"`` per entry."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
