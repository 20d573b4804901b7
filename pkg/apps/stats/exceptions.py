from core.exceptions import BfsBiasError


class StatsError(BfsBiasError):
    pass


class FitError(StatsError):
    pass


class BoundsError(StatsError):
    pass
