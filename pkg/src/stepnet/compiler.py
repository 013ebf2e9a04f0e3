"""Compile register-machine programs into place-transition nets.

Every instruction becomes a small gadget with a start place and a finish
place; consecutive gadgets share places so that a single control token walks
``q1 -> q2 -> ... -> q{m+1}``. Zero checks come in three flavours:

* ``INHIBITOR``: the jump transition is guarded by an inhibitor arc from the
  register, the fall-through transition tests the register with a self-loop.
* ``PRIORITY``: same two transitions without the inhibitor arc; the
  fall-through transition has the higher priority.
* ``STRONG_SLEPTSOV``: an eight-place, six-transition gadget that needs no
  extension at all, run under the strong Sleptsov rule. Registers hold
  value + 1 tokens there, so an empty register place means "no value".
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .errors import EncodingViolation, NetError
from .net import Marking, NetStructure
from .rm import RmProgram
from .semantics import (ExecutionTrace, Extension, FirstLexicographic, NetClass,
                        SemanticsMode, StepChoicePolicy, Strength, run)


class Backend(enum.Enum):
    INHIBITOR = "inhibitor"
    PRIORITY = "priority"
    STRONG_SLEPTSOV = "strong-sleptsov"

    @property
    def mode(self) -> SemanticsMode:
        if self is Backend.INHIBITOR:
            return SemanticsMode(NetClass.PETRI, extensions={Extension.INHIBITOR})
        if self is Backend.PRIORITY:
            return SemanticsMode(NetClass.PETRI, extensions={Extension.PRIORITY})
        return SemanticsMode(NetClass.SLEPTSOV, Strength.STRONG)

    @property
    def offset(self) -> int:
        return 1 if self is Backend.STRONG_SLEPTSOV else 0


@dataclass(frozen=True)
class Gadget:
    """A net fragment with named ports.

    ``ports`` maps roles (``start``, ``finish``, ``jump``, ``register``) to
    local place names; every other place is internal. ``persistent`` gives
    internal places that start with tokens and keep them between runs.
    """

    net: NetStructure
    ports: Mapping[str, str]
    persistent: Mapping[str, int] = field(default_factory=dict)

    @property
    def internal(self) -> tuple[str, ...]:
        used = set(self.ports.values())
        return tuple(p for p in self.net.places if p not in used)

    def marking(self, **tokens: int) -> Marking:
        """Fragment marking; keyword names may be roles or local place names."""
        values = dict(self.persistent)
        for key, v in tokens.items():
            values[self.ports.get(key, key)] = v
        return Marking.of(self.net, values)


def gadget_increment() -> Gadget:
    """One transition moving the control token on and adding a register token."""
    net = NetStructure(
        ["p1", "p2", "p3"], ["t1"],
        pre={("p1", "t1"): 1},
        post={("t1", "p2"): 1, ("t1", "p3"): 1},
    )
    return Gadget(net, {"start": "p1", "finish": "p2", "register": "p3"})


def gadget_decrement() -> Gadget:
    """One transition moving the control token on and taking a register token."""
    net = NetStructure(
        ["p1", "p2", "p3"], ["t1"],
        pre={("p1", "t1"): 1, ("p3", "t1"): 1},
        post={("t1", "p2"): 1},
    )
    return Gadget(net, {"start": "p1", "finish": "p2", "register": "p3"})


def gadget_zero_check(backend: Backend) -> Gadget:
    """Route the control token to ``jump`` (p3) if the register (p4) is zero, else to ``finish`` (p2).

    In the inhibitor and priority variants t1 jumps and t2 falls through.
    The strong Sleptsov variant splits the start token into two tokens on p5
    and lets the maximal-multiplicity rule decide: with at least two register
    tokens (value >= 1) t2 fires twice and t4 finishes; with exactly one
    (value 0) t2 or t3 fires once and t5 or t6 jumps. p8 holds one token
    forever and caps t3 at a single copy. t1 tests p4 through a self-loop, so
    an empty register place (no value) blocks the gadget.
    """
    ports = {"start": "p1", "finish": "p2", "jump": "p3", "register": "p4"}
    if backend in (Backend.INHIBITOR, Backend.PRIORITY):
        net = NetStructure(
            ["p1", "p2", "p3", "p4"], ["t1", "t2"],
            pre={("p1", "t1"): 1, ("p1", "t2"): 1, ("p4", "t2"): 1},
            post={("t1", "p3"): 1, ("t2", "p4"): 1, ("t2", "p2"): 1},
            inhibitors=[("p4", "t1")] if backend is Backend.INHIBITOR else [],
            priorities={"t2": 1} if backend is Backend.PRIORITY else None,
        )
        return Gadget(net, ports)
    net = NetStructure(
        [f"p{i}" for i in range(1, 9)], [f"t{i}" for i in range(1, 7)],
        pre={
            ("p1", "t1"): 1, ("p4", "t1"): 1,
            ("p4", "t2"): 1, ("p5", "t2"): 1,
            ("p4", "t3"): 1, ("p5", "t3"): 1, ("p8", "t3"): 1,
            ("p6", "t4"): 2,
            ("p5", "t5"): 1, ("p6", "t5"): 1,
            ("p5", "t6"): 1, ("p7", "t6"): 1,
        },
        post={
            ("t1", "p4"): 1, ("t1", "p5"): 2,
            ("t2", "p6"): 1,
            ("t3", "p7"): 1, ("t3", "p8"): 1,
            ("t4", "p2"): 1, ("t4", "p4"): 2,
            ("t5", "p3"): 1, ("t5", "p4"): 1,
            ("t6", "p3"): 1, ("t6", "p4"): 1,
        },
    )
    return Gadget(net, ports, persistent={"p8": 1})


@dataclass(frozen=True)
class InstructionLayout:
    index: int
    instruction: str
    places: Mapping[str, str]  # gadget local place -> net place
    transitions: Mapping[str, str]  # gadget local transition -> net transition


@dataclass(frozen=True)
class CompiledNet:
    net: NetStructure
    initial: Marking
    backend: Backend
    program: RmProgram
    control_places: tuple[str, ...]  # q1 .. q{m+1}
    register_places: tuple[str, ...]  # r1 .. rn
    layout: tuple[InstructionLayout, ...]

    @property
    def mode(self) -> SemanticsMode:
        return self.backend.mode

    @property
    def offset(self) -> int:
        return self.backend.offset

    @property
    def halt_place(self) -> str:
        return self.control_places[-1]

    def manifest(self) -> dict:
        return {
            "backend": self.backend.value,
            "mode": str(self.mode),
            "offset": self.offset,
            "control_places": list(self.control_places),
            "register_places": list(self.register_places),
            "halt_place": self.halt_place,
            "instructions": [
                {"index": lay.index, "instruction": lay.instruction,
                 "places": dict(lay.places), "transitions": dict(lay.transitions)}
                for lay in self.layout
            ],
        }

    def manifest_json(self) -> str:
        return json.dumps(self.manifest(), indent=2) + "\n"


def _gadget_for(ins, backend):
    if ins.op == "P":
        return gadget_increment()
    if ins.op == "Q":
        return gadget_decrement()
    return gadget_zero_check(backend)


def compile_program(program: RmProgram, backend: Backend,
                    inputs: Mapping[int, int] | None = None) -> CompiledNet:
    """Build the net simulating ``program``; ``inputs`` override its initial registers.

    Control places are ``q1..q{m+1}``, register places ``r1..rn``. Internal
    gadget places continue the q numbering from ``q{m+2}`` in instruction
    order and transitions are numbered ``t1, t2, ...`` in the same order.
    """
    m = program.m
    control = [f"q{j}" for j in range(1, m + 2)]
    registers = [f"r{i}" for i in range(1, program.n + 1)]
    places = control + registers
    transitions = []
    pre, post, inhibitors, priorities = {}, {}, [], {}
    tokens = {"q1": 1}
    for r, v in zip(registers, program.registers(inputs)):
        tokens[r] = v + backend.offset
    layout = []
    next_place = m + 2

    for j, ins in enumerate(program.instructions, start=1):
        gadget = _gadget_for(ins, backend)
        rename = {}
        for role, local in gadget.ports.items():
            if role == "start":
                rename[local] = f"q{j}"
            elif role == "finish":
                rename[local] = f"q{j + 1}"
            elif role == "jump":
                rename[local] = f"q{ins.target}"
            else:
                rename[local] = f"r{ins.register}"
        for local in gadget.internal:
            rename[local] = f"q{next_place}"
            places.append(rename[local])
            next_place += 1
        for local, v in gadget.persistent.items():
            tokens[rename[local]] = v
        trename = {}
        for local in gadget.net.transitions:
            trename[local] = f"t{len(transitions) + 1}"
            transitions.append(trename[local])
        for (p, t), w in gadget.net.pre.items():
            key = (rename[p], trename[t])
            pre[key] = pre.get(key, 0) + w
        for (t, p), w in gadget.net.post.items():
            key = (trename[t], rename[p])
            post[key] = post.get(key, 0) + w
        inhibitors += [(rename[p], trename[t]) for p, t in gadget.net.inhibitors]
        for t, v in gadget.net.priorities.items():
            if v:
                priorities[trename[t]] = v
        layout.append(InstructionLayout(j, str(ins), rename, trename))

    net = NetStructure(places, transitions, pre, post, inhibitors, priorities)
    return CompiledNet(net, Marking.of(net, tokens), backend, program,
                       tuple(control), tuple(registers), tuple(layout))


def decode_registers(compiled: CompiledNet, marking: Marking) -> tuple[int, ...]:
    """Register values held by ``marking``, with the backend's offset removed."""
    values = []
    for i, place in enumerate(compiled.register_places, start=1):
        v = marking[place] - compiled.offset
        if v < 0:
            raise EncodingViolation(
                f"register place {place} holds {marking[place]} tokens, "
                f"below the encoding offset {compiled.offset}")
        values.append(v)
    return tuple(values)


def control_position(compiled: CompiledNet, marking: Marking) -> Optional[int]:
    """Instruction index j when the control token sits on q_j, else None (mid-gadget)."""
    marked = [(j, marking[q]) for j, q in enumerate(compiled.control_places, start=1) if marking[q]]
    if not marked:
        return None
    if len(marked) > 1 or marked[0][1] != 1:
        raise NetError(f"control places hold more than one token: {marked}")
    return marked[0][0]


def run_compiled(compiled: CompiledNet, policy: StepChoicePolicy = FirstLexicographic(),
                 max_steps: int = 1_000_000) -> ExecutionTrace:
    return run(compiled.initial, compiled.net, compiled.mode, policy, max_steps)


def boundary_trace(compiled: CompiledNet, trace: ExecutionTrace) -> list[tuple[int, tuple[int, ...]]]:
    """(instruction index, registers) at every marking where a control place is marked."""
    out = []
    for marking in trace.markings():
        j = control_position(compiled, marking)
        if j is not None:
            out.append((j, decode_registers(compiled, marking)))
    return out
