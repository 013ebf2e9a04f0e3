"""Firing rules: which steps a marking permits, and tact-by-tact execution.

Four net classes (Petri, Salwicki, Sleptsov, Salwicki-Sleptsov) combine with
three strengths (weak, general, strong). Petri nets only have the general
strength. Inhibitor arcs are honoured by Petri and Sleptsov classes, transition
priorities by the Petri class only.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import ModeError, UnboundedStep
from .net import UNBOUNDED, Marking, NetStructure, Step, apply_step


class NetClass(enum.Enum):
    PETRI = "petri"
    SALWICKI = "salwicki"
    SLEPTSOV = "sleptsov"
    SALWICKI_SLEPTSOV = "salwicki-sleptsov"


class Strength(enum.Enum):
    WEAK = "weak"
    GENERAL = "general"
    STRONG = "strong"


class Extension(enum.Enum):
    INHIBITOR = "inhibitor"
    PRIORITY = "priority"


@dataclass(frozen=True)
class SemanticsMode:
    net_class: NetClass
    strength: Strength = Strength.GENERAL
    extensions: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "extensions", frozenset(self.extensions))
        if self.net_class is NetClass.PETRI and self.strength is not Strength.GENERAL:
            raise ModeError("Petri nets have no weak or strong variant")
        if Extension.PRIORITY in self.extensions and self.net_class is not NetClass.PETRI:
            raise ModeError("priorities are only defined for single-transition (Petri) firing")
        if Extension.INHIBITOR in self.extensions and self.net_class in (
                NetClass.SALWICKI, NetClass.SALWICKI_SLEPTSOV):
            raise ModeError("inhibitor arcs are not defined for joint (Salwicki-class) steps")

    @classmethod
    def parse(cls, text: str) -> "SemanticsMode":
        """Parse ``[weak-|strong-]<class>[+inhibitor][+priority]``, e.g. ``strong-sleptsov``."""
        head, *exts = text.strip().lower().split("+")
        strength = Strength.GENERAL
        for s in (Strength.WEAK, Strength.STRONG, Strength.GENERAL):
            if head.startswith(s.value + "-"):
                strength, head = s, head[len(s.value) + 1:]
                break
        try:
            net_class = NetClass(head)
            extensions = frozenset(Extension(e) for e in exts)
        except ValueError:
            raise ModeError(f"unknown semantics mode {text!r}") from None
        return cls(net_class, strength, extensions)

    def __str__(self):
        head = self.net_class.value
        if self.strength is not Strength.GENERAL:
            head = f"{self.strength.value}-{head}"
        for ext in Extension:
            if ext in self.extensions:
                head += "+" + ext.value
        return head

    def check_net(self, net: NetStructure) -> None:
        """Reject nets whose structure this mode would silently ignore."""
        if net.inhibitors and Extension.INHIBITOR not in self.extensions:
            raise ModeError(f"net has inhibitor arcs but mode {self} does not enable them")
        if net.has_priorities() and Extension.PRIORITY not in self.extensions:
            raise ModeError(f"net has transition priorities but mode {self} does not enable them")


@dataclass(frozen=True)
class FirstLexicographic:
    """Pick the first step in (transition index, count) order."""


@dataclass(frozen=True)
class SeededRandom:
    """Pick uniformly among the permitted steps with a seeded generator."""

    seed: int = 0


StepChoicePolicy = Union[FirstLexicographic, SeededRandom]


def _firable(net, tokens):
    out = []
    for ti in range(len(net.transitions)):
        c = net.multiplicity_at(tokens, ti)
        if c is UNBOUNDED or c > 0:
            out.append((ti, c))
    return out


def _finite(net, ti, c):
    if c is UNBOUNDED:
        raise UnboundedStep(
            f"transition {net.transitions[ti]} has unbounded firing multiplicity")
    return c


def _affordable(net, remaining, ti):
    """Copies of transition ``ti`` that ``remaining`` tokens still pay for (None if unbounded)."""
    best = None
    for pi, w in net._inputs[ti]:
        c = remaining[pi] // w
        if best is None or c < best:
            best = c
    return best


def _consume(net, remaining, ti, k):
    out = list(remaining)
    for pi, w in net._inputs[ti]:
        out[pi] -= k * w
    return out


def _petri(net, mode, firable):
    if Extension.PRIORITY in mode.extensions and firable:
        top = max(net.priorities[net.transitions[ti]] for ti, _ in firable)
        firable = [(ti, c) for ti, c in firable
                   if net.priorities[net.transitions[ti]] == top]
    return [((ti, 1),) for ti, _ in firable]


def _sleptsov(net, mode, firable):
    counted = [(ti, _finite(net, ti, c)) for ti, c in firable]
    if mode.strength is Strength.WEAK:
        return [((ti, k),) for ti, c in counted for k in range(1, c + 1)]
    if mode.strength is Strength.STRONG and counted:
        top = max(c for _, c in counted)
        counted = [(ti, c) for ti, c in counted if c == top]
    return [((ti, c),) for ti, c in counted]


def _joint(net, mode, tokens, firable, unit):
    """Valid non-empty multisets over ``firable``; sets only when ``unit``.

    Depth-first over transitions in index order, choosing a count for each
    one within what the remaining tokens pay for. General strength keeps the
    leaves that admit no further copy of any transition; strong keeps the
    largest total among those.
    """
    order = [ti for ti, _ in firable]
    if not unit:
        for ti, c in firable:
            _finite(net, ti, c)
    found = []

    def can_grow(remaining, chosen):
        for ti in order:
            if unit and chosen.get(ti):
                continue
            room = _affordable(net, remaining, ti)
            if room is None or room >= 1:
                return True
        return False

    def walk(i, remaining, chosen):
        if i == len(order):
            if not chosen:
                return
            if mode.strength is not Strength.WEAK and can_grow(remaining, chosen):
                return
            found.append(tuple(chosen.items()))
            return
        ti = order[i]
        room = _affordable(net, remaining, ti)
        top = 1 if unit or room is None else room
        if room is not None:
            top = min(top, room)
        for k in range(top, -1, -1):
            if k:
                chosen[ti] = k
                walk(i + 1, _consume(net, remaining, ti, k), chosen)
                del chosen[ti]
            else:
                walk(i + 1, remaining, chosen)

    walk(0, list(tokens), {})
    if mode.strength is Strength.STRONG and found:
        top = max(sum(c for _, c in f) for f in found)
        found = [f for f in found if sum(c for _, c in f) == top]
    return found


def _raw_steps(marking: Marking, net: NetStructure, mode: SemanticsMode):
    if marking.places != net.places:
        raise ModeError("marking does not belong to this net")
    mode.check_net(net)
    tokens = marking.tokens
    firable = _firable(net, tokens)
    cls = mode.net_class
    if cls is NetClass.PETRI:
        raw = _petri(net, mode, firable)
    elif cls is NetClass.SLEPTSOV:
        raw = _sleptsov(net, mode, firable)
    else:
        raw = _joint(net, mode, tokens, firable, unit=cls is NetClass.SALWICKI)
    raw.sort()
    return raw


def _to_step(net, raw):
    return Step(tuple((net.transitions[ti], c) for ti, c in raw))


def ordered_steps(marking: Marking, net: NetStructure, mode: SemanticsMode) -> list[Step]:
    """Permitted steps sorted by (transition index, count) pairs."""
    return [_to_step(net, r) for r in _raw_steps(marking, net, mode)]


def enumerate_steps(marking: Marking, net: NetStructure, mode: SemanticsMode) -> frozenset[Step]:
    """Every step ``mode`` permits at ``marking``; empty iff the marking is dead."""
    return frozenset(ordered_steps(marking, net, mode))


def choose_step(
    marking: Marking,
    net: NetStructure,
    mode: SemanticsMode,
    policy: StepChoicePolicy,
    rng: Optional[random.Random] = None,
) -> Optional[Step]:
    """Resolve the nondeterministic choice among permitted steps.

    With ``SeededRandom`` and no ``rng`` a fresh generator seeded from the
    policy is used, so equal inputs always give the same step. ``run`` passes
    one generator through the whole execution instead.
    """
    steps = ordered_steps(marking, net, mode)
    if not steps:
        return None
    if isinstance(policy, FirstLexicographic):
        return steps[0]
    if isinstance(policy, SeededRandom):
        if rng is None:
            rng = random.Random(policy.seed)
        return steps[rng.randrange(len(steps))]
    raise ModeError(f"unknown step choice policy {policy!r}")


class Termination(enum.Enum):
    DEAD = "dead"
    BUDGET = "budget"


@dataclass
class ExecutionTrace:
    initial: Marking
    entries: list[tuple[Step, Marking]]
    reason: Termination

    @property
    def final(self) -> Marking:
        return self.entries[-1][1] if self.entries else self.initial

    def markings(self) -> list[Marking]:
        return [self.initial] + [m for _, m in self.entries]

    def __len__(self):
        return len(self.entries)


def run(
    marking: Marking,
    net: NetStructure,
    mode: SemanticsMode,
    policy: StepChoicePolicy = FirstLexicographic(),
    max_steps: int = 10_000,
) -> ExecutionTrace:
    """Fire steps until the marking is dead or ``max_steps`` tacts have elapsed."""
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    mode.check_net(net)
    rng = random.Random(policy.seed) if isinstance(policy, SeededRandom) else None
    entries = []
    current = marking
    while len(entries) < max_steps:
        step = choose_step(current, net, mode, policy, rng)
        if step is None:
            return ExecutionTrace(marking, entries, Termination.DEAD)
        current = apply_step(current, step, net)
        entries.append((step, current))
    return ExecutionTrace(marking, entries, Termination.BUDGET)
