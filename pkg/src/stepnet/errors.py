"""Exception hierarchy shared by every stepnet module."""


class StepnetError(Exception):
    """Base class for all errors raised by stepnet."""


class NetError(StepnetError):
    """Structurally invalid net, or a reference to an unknown node."""


class InvalidStep(StepnetError):
    """A step that would drive a place negative or ignore an inhibitor arc."""


class UnboundedStep(StepnetError):
    """A finite firing count was demanded from a transition with unbounded multiplicity."""


class ModeError(StepnetError):
    """The semantics mode is inconsistent, or does not fit the net."""


class ParseError(StepnetError):
    """Malformed input text. Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DecrementOfZero(StepnetError):
    """Register machine executed Q(i) while register i held zero."""

    def __init__(self, pc, register):
        self.pc = pc
        self.register = register
        super().__init__(f"Q({register}) at instruction {pc} with register {register} = 0")


class EncodingViolation(StepnetError):
    """A register place holds fewer tokens than its encoding offset."""
