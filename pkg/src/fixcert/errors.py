"""Exception hierarchy shared by all fixcert modules."""


class FixcertError(Exception):
    """Base class for every error raised by fixcert."""


class DomainError(FixcertError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class FormatError(FixcertError, ValueError):
    """Malformed input data (non-square matrix, negative entries, bad JSON)."""


class InvariantError(FixcertError):
    """A tracked object no longer satisfies its construction invariant."""


class ControlError(FixcertError, ValueError):
    """A control function returned a value outside [0, 1)."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class DegenerateStepError(FixcertError, ZeroDivisionError):
    """An observed ratio was requested across a zero step distance."""


class WindowError(FixcertError, IndexError):
    """Not enough ratio history to form the requested window."""


class HypothesisError(FixcertError):
    """A declared hypothesis failed a sampled check."""


class RectangularTailUnsupported(HypothesisError):
    """Tail bounds need the triangle inequality; rectangular metrics lack it."""

    code = "rectangular-tail-unsupported"

    def __init__(self, message="rectangular-tail-unsupported: tail bounds "
                               "require the ordinary triangle inequality"):
        super().__init__(message)


class StateError(FixcertError):
    """Operation invoked on a monitor in the wrong phase."""


class NonInjectiveError(HypothesisError):
    """The auxiliary map collapsed two distinct points."""

    def __init__(self, message, collisions=()):
        super().__init__(message)
        self.collisions = list(collisions)
