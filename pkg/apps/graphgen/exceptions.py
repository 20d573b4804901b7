from core.exceptions import BfsBiasError


class DistributionError(BfsBiasError):
    pass


class GraphError(BfsBiasError):
    pass


class EdgeListError(GraphError):
    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
