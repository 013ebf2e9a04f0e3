"""Fixture checks run by ``stepnet selftest``."""

from __future__ import annotations

from importlib import resources

from .compiler import Backend, boundary_trace, compile_program, control_position, \
    decode_registers, run_compiled
from .netfmt import parse_net
from .reachability import build_rg, verify_zero_check
from .rm import apsum_program, rm_run
from .semantics import SemanticsMode, enumerate_steps

# (mode, nodes, edges) from (2,3,0)
ADDITION_SHAPES = [
    ("petri", 12, 17),
    ("salwicki", 4, 3),
    ("sleptsov", 4, 4),
    ("strong-sleptsov", 3, 2),
]


def addition_net():
    return parse_net(resources.files("stepnet.data").joinpath("addition.net").read_text())


def checks():
    """Yield ``(name, passed, detail)`` for every fixture check."""
    report = verify_zero_check(50)
    yield "zero-check gadget x=0..50", report.passed, \
        "; ".join(f"x={c.x}: {c.problems}" for c in report.failures())

    net, m0 = addition_net()
    for mode, nodes, edges in ADDITION_SHAPES:
        rg = build_rg(net, m0, SemanticsMode.parse(mode))
        got = (len(rg.nodes), len(rg.edges))
        yield f"addition RG {mode}", got == (nodes, edges), f"nodes/edges {got}"
    weak = enumerate_steps(m0, net, SemanticsMode.parse("weak-sleptsov"))
    yield "addition weak-sleptsov out-degree", len(weak) == 5, f"{len(weak)} steps"

    program = apsum_program()
    for backend in Backend:
        for n in range(11):
            compiled = compile_program(program, backend, {2: n})
            trace = run_compiled(compiled)
            expected = rm_run(program, {2: n})
            regs = decode_registers(compiled, trace.final)
            ok = (control_position(compiled, trace.final) == program.halt
                  and regs[0] == n * (n + 1) // 2
                  and boundary_trace(compiled, trace)
                  == [(s.pc, s.registers) for s in expected.trace])
            yield f"apsum n={n} {backend.value}", ok, f"r1={regs[0]}"


def run_selftest(echo=print) -> bool:
    ok = True
    for name, passed, detail in checks():
        ok &= passed
        echo(f"{'PASS' if passed else 'FAIL'}  {name}" + ("" if passed else f"  ({detail})"))
    return ok
