"""Exception hierarchy shared by every module of the package."""


class FrameGeoError(Exception):
    """Base class; the CLI maps any subclass to exit code 2."""


# jet kernel
class DivisionByZeroAtPoint(FrameGeoError, ZeroDivisionError):
    pass


class MixedJetShapes(FrameGeoError, ValueError):
    pass


class OrderExhausted(FrameGeoError):
    """A derivative was requested beyond the trustworthy order of a jet."""


class DomainError(FrameGeoError, ValueError):
    pass


# expressions
class ExprSyntaxError(FrameGeoError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UnknownIdentifier(ExprSyntaxError):
    pass


class NonIntegerExponent(ExprSyntaxError):
    pass


class PointOutsideDomain(FrameGeoError, ValueError):
    pass


class TranscendentalInRationalMode(FrameGeoError):
    pass


# geometry
class SingularFrame(FrameGeoError):
    pass


class DimensionMismatch(FrameGeoError, ValueError):
    pass


class RankDeficientFit(FrameGeoError):
    pass


class SolitonPrereqFailed(FrameGeoError):
    pass


# spec files / workbench
class SpecParseError(FrameGeoError):
    def __init__(self, message, line, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(FrameGeoError):
    def __init__(self, rule, message):
        super().__init__(f"[{rule}] {message}")
        self.rule = rule


class UnknownBuiltin(FrameGeoError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class SamplingExhausted(FrameGeoError):
    pass


class MetricNotPositiveDefinite(FrameGeoError):
    pass
