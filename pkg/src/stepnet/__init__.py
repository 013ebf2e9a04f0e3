"""Place-transition nets under Petri, Salwicki, Sleptsov and Salwicki-Sleptsov firing rules."""

from .errors import (
    DecrementOfZero,
    EncodingViolation,
    InvalidStep,
    ModeError,
    NetError,
    ParseError,
    StepnetError,
    UnboundedStep,
)
from .net import (
    UNBOUNDED,
    Marking,
    NetStructure,
    Step,
    apply_step,
    arc_multiplicity,
    is_firable,
    transition_multiplicity,
)
from .semantics import (
    ExecutionTrace,
    Extension,
    FirstLexicographic,
    NetClass,
    SeededRandom,
    SemanticsMode,
    Strength,
    Termination,
    choose_step,
    enumerate_steps,
    run,
)

__version__ = "0.1.0"
