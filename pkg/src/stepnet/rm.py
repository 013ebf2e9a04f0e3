"""Register machines: increment P(i), guarded decrement Q(i), jump-if-zero J(i)[k].

Text format, one item per line, ``#`` starts a comment::

    registers <n>
    init r<i> = <value>          (zero or more)
    <idx>: P <i>
    <idx>: Q <i>
    <idx>: J <i> <k>

Instruction numbers run 1..m without gaps. Jumping to m+1 halts.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Optional

from .errors import DecrementOfZero, ParseError


@dataclass(frozen=True)
class Instruction:
    op: str  # "P", "Q" or "J"
    register: int
    target: Optional[int] = None

    def __post_init__(self):
        if self.op not in ("P", "Q", "J"):
            raise ValueError(f"unknown opcode {self.op!r}")
        if (self.op == "J") != (self.target is not None):
            raise ValueError("only J instructions carry a jump target")

    def __str__(self):
        if self.op == "J":
            return f"J({self.register})[{self.target}]"
        return f"{self.op}({self.register})"


def P(i: int) -> Instruction:
    return Instruction("P", i)


def Q(i: int) -> Instruction:
    return Instruction("Q", i)


def J(i: int, k: int) -> Instruction:
    return Instruction("J", i, k)


@dataclass(frozen=True)
class RmProgram:
    n: int
    instructions: tuple[Instruction, ...]
    initial: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        object.__setattr__(self, "initial", dict(self.initial))
        m = len(self.instructions)
        for idx, ins in enumerate(self.instructions, start=1):
            if not 1 <= ins.register <= self.n:
                raise ValueError(f"instruction {idx}: register {ins.register} outside 1..{self.n}")
            if ins.op == "J" and not 1 <= ins.target <= m + 1:
                raise ValueError(f"instruction {idx}: jump target {ins.target} outside 1..{m + 1}")
        for r, v in self.initial.items():
            if not 1 <= r <= self.n:
                raise ValueError(f"initial value for unknown register r{r}")
            if v < 0:
                raise ValueError(f"register r{r} cannot start negative")

    @property
    def m(self) -> int:
        return len(self.instructions)

    @property
    def halt(self) -> int:
        return self.m + 1

    def __getitem__(self, pc: int) -> Instruction:
        return self.instructions[pc - 1]

    def registers(self, inputs: Mapping[int, int] | None = None) -> tuple[int, ...]:
        """Initial register vector: program defaults overridden by ``inputs``."""
        values = dict(self.initial)
        values.update(inputs or {})
        for r, v in values.items():
            if not 1 <= r <= self.n:
                raise ValueError(f"no register r{r} in a {self.n}-register program")
            if v < 0:
                raise ValueError(f"register r{r} cannot start negative")
        return tuple(values.get(r, 0) for r in range(1, self.n + 1))


@dataclass(frozen=True)
class RmState:
    pc: int
    registers: tuple[int, ...]

    def halted(self, program: RmProgram) -> bool:
        return self.pc == program.halt

    def __getitem__(self, register: int) -> int:
        return self.registers[register - 1]


_HEADER = re.compile(r"registers\s+(\d+)$")
_INIT = re.compile(r"init\s+r(\d+)\s*=\s*(\d+)$")
_INSTR = re.compile(r"(\d+)\s*:\s*([PQJ])\s+(\d+)(?:\s+(\d+))?$")


def parse_rm(text: str) -> RmProgram:
    n = None
    initial = {}
    numbered = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if (mt := _HEADER.match(line)):
            if n is not None:
                raise ParseError("duplicate 'registers' header", lineno)
            n = int(mt.group(1))
            continue
        if n is None:
            raise ParseError("expected 'registers <n>' before anything else", lineno)
        if (mt := _INIT.match(line)):
            r, v = int(mt.group(1)), int(mt.group(2))
            if not 1 <= r <= n:
                raise ParseError(f"register r{r} outside 1..{n}", lineno)
            if r in initial:
                raise ParseError(f"register r{r} initialised twice", lineno)
            initial[r] = v
            continue
        mt = _INSTR.match(line)
        if not mt:
            raise ParseError(f"cannot parse {line!r}", lineno)
        idx, op, reg, target = mt.groups()
        idx, reg = int(idx), int(reg)
        if (op == "J") != (target is not None):
            raise ParseError(f"{op} takes {'two operands' if op == 'J' else 'one operand'}", lineno)
        if idx in numbered:
            raise ParseError(f"duplicate instruction number {idx}", lineno)
        if not 1 <= reg <= n:
            raise ParseError(f"register {reg} outside 1..{n}", lineno)
        numbered[idx] = (Instruction(op, reg, int(target) if target else None), lineno)
    if n is None:
        raise ParseError("missing 'registers <n>' header")
    m = len(numbered)
    if sorted(numbered) != list(range(1, m + 1)):
        raise ParseError(f"instruction numbers must run 1..{m} without gaps")
    for idx, (ins, lineno) in numbered.items():
        if ins.op == "J" and not 1 <= ins.target <= m + 1:
            raise ParseError(f"jump target {ins.target} outside 1..{m + 1}", lineno)
    return RmProgram(n, tuple(numbered[i][0] for i in range(1, m + 1)), initial)


def format_rm(program: RmProgram) -> str:
    lines = [f"registers {program.n}"]
    lines += [f"init r{r} = {v}" for r, v in sorted(program.initial.items())]
    for idx, ins in enumerate(program.instructions, start=1):
        tail = f" {ins.target}" if ins.op == "J" else ""
        lines.append(f"{idx}: {ins.op} {ins.register}{tail}")
    return "\n".join(lines) + "\n"


def rm_step(state: RmState, program: RmProgram) -> RmState:
    if state.halted(program):
        raise ValueError("program has halted")
    ins = program[state.pc]
    regs = list(state.registers)
    i = ins.register - 1
    if ins.op == "P":
        regs[i] += 1
        return RmState(state.pc + 1, tuple(regs))
    if ins.op == "Q":
        if regs[i] == 0:
            raise DecrementOfZero(state.pc, ins.register)
        regs[i] -= 1
        return RmState(state.pc + 1, tuple(regs))
    return RmState(ins.target if regs[i] == 0 else state.pc + 1, state.registers)


class RmStop(enum.Enum):
    HALT = "halt"
    BUDGET = "budget"


@dataclass
class RmRun:
    final: RmState
    trace: list[RmState]  # initial state first, one entry per executed instruction after it
    reason: RmStop


def rm_run(program: RmProgram, inputs: Mapping[int, int] | None = None,
           max_steps: int = 1_000_000) -> RmRun:
    state = RmState(1, program.registers(inputs))
    trace = [state]
    while not state.halted(program):
        if len(trace) > max_steps:
            return RmRun(state, trace, RmStop.BUDGET)
        state = rm_step(state, program)
        trace.append(state)
    return RmRun(state, trace, RmStop.HALT)


def apsum_program() -> RmProgram:
    """Register program summing 0..n; n goes in r2, the sum comes out in r1."""
    return parse_rm(resources.files("stepnet.data").joinpath("apsum.rm").read_text())
