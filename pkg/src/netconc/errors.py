"""Exception types raised by netconc."""


class NetConcError(ValueError):
    """Base class for all netconc errors."""


class InvalidWeights(NetConcError):
    pass


class InvalidGraph(NetConcError):
    pass


class DegenerateBenchmark(NetConcError):
    """The benchmark quadratic form is (numerically) zero."""


class EmptyGraph(NetConcError):
    pass


class InvalidProbability(NetConcError):
    pass


class LayerMismatch(NetConcError):
    pass


class NonGraphicalSequence(NetConcError):
    pass


class TooLarge(NetConcError):
    pass


class UnsupportedSize(NetConcError):
    pass


class NonSquare(NetConcError):
    pass


class NonPositivePrice(NetConcError):
    pass


class ZeroVariance(NetConcError):
    pass


class OutOfRange(NetConcError):
    pass


class NonFinite(NetConcError):
    pass


class InsufficientData(NetConcError):
    pass


class ParseError(NetConcError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class LabelMismatch(NetConcError):
    def __init__(self, missing, extra=()):
        self.missing = sorted(missing)
        self.extra = sorted(extra)
        parts = []
        if self.missing:
            parts.append("labels without weights: " + ", ".join(self.missing))
        if self.extra:
            parts.append("weighted labels absent from network: " + ", ".join(self.extra))
        super().__init__("; ".join(parts) or "label mismatch")
