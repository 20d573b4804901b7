from core.exceptions import BfsBiasError


class SamplingError(BfsBiasError):
    pass
