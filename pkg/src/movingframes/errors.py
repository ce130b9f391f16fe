"""Exception hierarchy shared by all modules."""


class MovingFrameError(Exception):
    """Base class for errors raised by movingframes."""


class ExprSyntaxError(MovingFrameError, SyntaxError):
    """Malformed expression source.

    ``offset`` is the byte offset (0-based) of the offending token.
    """

    def __init__(self, message, source="", offset=0):
        super().__init__(message)
        self.msg = message
        self.text = source
        self.offset = offset

    def __str__(self):
        return f"{self.msg} (at offset {self.offset})"

    def caret(self):
        """Two-line rendering of the source with a caret under the error."""
        prefix = self.text.encode("utf-8")[: self.offset].decode("utf-8", "replace")
        return f"{self.text}\n{' ' * len(prefix)}^"


class DomainError(MovingFrameError, ValueError):
    """Function evaluated outside its domain (pole, log of negative, ...)."""


class ShapeError(MovingFrameError, ValueError):
    """Matrix dimensions do not match the geometry tag."""


class ValidationError(MovingFrameError, ValueError):
    """A group element failed validation."""


class DegenerateRay(MovingFrameError, ValueError):
    """Null ray whose normalization component vanishes."""


class PoleError(MovingFrameError, ValueError):
    """Stereographic projection requested at the projection pole."""


class SingularMatrix(MovingFrameError, ValueError):
    pass


class OrderUnavailable(MovingFrameError, ValueError):
    """Requested derivative order exceeds what the provider can supply."""


class OutOfDomain(MovingFrameError, ValueError):
    pass


class DensityVanishes(MovingFrameError, ValueError):
    """Reparametrization density vanishes; ``interval`` gives the offending t-range."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class GenericityError(MovingFrameError, ValueError):
    """A curve or surface violates a genericity assumption.

    ``parameters`` lists the offending parameter values (possibly empty).
    """

    def __init__(self, message, parameters=()):
        super().__init__(message)
        self.parameters = list(parameters)


class IrregularPoint(GenericityError):
    pass


class InflectionPoint(GenericityError):
    pass


class CircleDegeneracy(GenericityError):
    pass


class UmbilicPoint(GenericityError):
    pass


class ToleranceFailure(MovingFrameError, RuntimeError):
    pass


class IncompatibleTags(MovingFrameError, ValueError):
    pass


class InsufficientOverlap(MovingFrameError, ValueError):
    pass


class ConditioningWarning(UserWarning):
    """A linear solve was poorly conditioned."""
