import json

import pytest

from stepnet import (EncodingViolation, Marking, SeededRandom, SemanticsMode, Step, apply_step,
                     enumerate_steps, is_firable)
from stepnet.compiler import (Backend, boundary_trace, compile_program, control_position,
                              decode_registers, gadget_decrement, gadget_increment,
                              gadget_zero_check, run_compiled)
from stepnet.reachability import build_rg
from stepnet.rm import apsum_program, parse_rm, rm_run
from stepnet.semantics import run

BACKENDS = list(Backend)


@pytest.fixture(scope="module")
def apsum():
    return apsum_program()


def fire_only(gadget, marking, mode):
    (step,) = enumerate_steps(marking, gadget.net, mode)
    return apply_step(marking, step, gadget.net)


class TestIncrementDecrement:
    PETRI = SemanticsMode.parse("petri")

    def test_increment_shape(self):
        g = gadget_increment()
        assert g.net.transitions == ("t1",)
        assert dict(g.net.pre) == {("p1", "t1"): 1}
        assert dict(g.net.post) == {("t1", "p2"): 1, ("t1", "p3"): 1}

    @pytest.mark.parametrize("r", [0, 3])
    def test_increment_fires(self, r):
        g = gadget_increment()
        after = fire_only(g, g.marking(start=1, register=r), self.PETRI)
        assert after == g.marking(finish=1, register=r + 1)

    def test_increment_needs_start(self):
        g = gadget_increment()
        assert not is_firable(g.marking(register=2), "t1", g.net)

    def test_decrement_fires(self):
        g = gadget_decrement()
        after = fire_only(g, g.marking(start=1, register=3), self.PETRI)
        assert after == g.marking(finish=1, register=2)

    def test_decrement_dead_on_empty_register(self):
        g = gadget_decrement()
        assert not enumerate_steps(g.marking(start=1, register=0), g.net, self.PETRI)

    def test_decrement_needs_start(self):
        g = gadget_decrement()
        assert not enumerate_steps(g.marking(register=2), g.net, self.PETRI)


class TestZeroCheckGadgets:
    @pytest.mark.parametrize("backend", [Backend.INHIBITOR, Backend.PRIORITY])
    @pytest.mark.parametrize("r, port", [(0, "jump"), (1, "finish"), (4, "finish")])
    def test_classic(self, backend, r, port):
        g = gadget_zero_check(backend)
        after = fire_only(g, g.marking(start=1, register=r), backend.mode)
        assert after == g.marking(**{port: 1}, register=r)

    def test_inhibitor_arcs(self):
        g = gadget_zero_check(Backend.INHIBITOR)
        assert g.net.inhibitors == {("p4", "t1")}
        assert g.net.pre["p4", "t2"] == g.net.post["t2", "p4"] == 1

    def test_priority_order(self):
        g = gadget_zero_check(Backend.PRIORITY)
        assert g.net.priorities["t2"] > g.net.priorities["t1"]
        assert not g.net.inhibitors

    def test_strong_sleptsov_x_one_both_branches(self):
        g = gadget_zero_check(Backend.STRONG_SLEPTSOV)
        mode = Backend.STRONG_SLEPTSOV.mode
        m = apply_step(g.marking(start=1, register=1), Step({"t1": 1}), g.net)
        assert m == g.marking(register=1, p5=2)
        left = apply_step(m, Step({"t2": 1}), g.net)
        right = apply_step(m, Step({"t3": 1}), g.net)
        assert left == g.marking(p5=1, p6=1) and right == g.marking(p5=1, p7=1)
        assert enumerate_steps(left, g.net, mode) == {Step({"t5": 1})}
        assert enumerate_steps(right, g.net, mode) == {Step({"t6": 1})}
        end = g.marking(jump=1, register=1)
        assert fire_only(g, left, mode) == end == fire_only(g, right, mode)

    def test_strong_sleptsov_x_five(self):
        g = gadget_zero_check(Backend.STRONG_SLEPTSOV)
        trace = run(g.marking(start=1, register=5), g.net, Backend.STRONG_SLEPTSOV.mode)
        assert [str(s) for s, _ in trace.entries] == ["t1", "2·t2", "t4"]
        assert trace.final == g.marking(finish=1, register=5)

    def test_strong_sleptsov_no_value_blocks(self):
        g = gadget_zero_check(Backend.STRONG_SLEPTSOV)
        assert not enumerate_steps(g.marking(start=1, register=0), g.net,
                                   Backend.STRONG_SLEPTSOV.mode)


class TestCompile:
    def test_single_increment(self):
        compiled = compile_program(parse_rm("registers 1\n1: P 1\n"), Backend.INHIBITOR)
        assert compiled.net.places == ("q1", "q2", "r1")
        assert compiled.net.transitions == ("t1",)
        trace = run_compiled(compiled)
        assert trace.final.support() == {"q2": 1, "r1": 1}

    def test_layout_numbering(self, apsum):
        compiled = compile_program(apsum, Backend.STRONG_SLEPTSOV)
        assert compiled.control_places == tuple(f"q{j}" for j in range(1, 14))
        assert compiled.register_places == ("r1", "r2", "r3", "r4")
        first = compiled.layout[0]
        assert first.places["p1"] == "q1" and first.places["p2"] == "q2"
        assert first.places["p3"] == "q13" and first.places["p4"] == "r2"
        assert [first.places[f"p{i}"] for i in range(5, 9)] == ["q14", "q15", "q16", "q17"]
        assert compiled.layout[1].places["p5"] == "q18"
        assert list(first.transitions.values()) == [f"t{i}" for i in range(1, 7)]
        assert compiled.net.transitions[-1] == f"t{len(compiled.net.transitions)}"

    def test_initial_marking(self, apsum):
        compiled = compile_program(apsum, Backend.STRONG_SLEPTSOV, {2: 4})
        support = compiled.initial.support()
        assert support["q1"] == 1 and support["r1"] == 1 and support["r2"] == 5
        persistent = [lay.places["p8"] for lay in compiled.layout if lay.instruction[0] == "J"]
        assert all(support[p] == 1 for p in persistent)

    def test_reproducible(self, apsum):
        a = compile_program(apsum, Backend.PRIORITY, {2: 3})
        b = compile_program(apsum, Backend.PRIORITY, {2: 3})
        assert a.net == b.net and a.manifest_json() == b.manifest_json()

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_apsum_four(self, apsum, backend):
        compiled = compile_program(apsum, backend, {2: 4})
        trace = run_compiled(compiled)
        assert control_position(compiled, trace.final) == 13
        assert decode_registers(compiled, trace.final)[0] == 10

    def test_strong_sleptsov_encoded(self, apsum):
        compiled = compile_program(apsum, Backend.STRONG_SLEPTSOV, {2: 4})
        assert run_compiled(compiled).final["r1"] == 11

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_jump_to_next(self, backend):
        prog = parse_rm("registers 1\ninit r1 = 2\n1: J 1 2\n2: Q 1\n")
        compiled = compile_program(prog, backend)
        lay = compiled.layout[0]
        assert lay.places["p2"] == lay.places["p3"] == "q2"
        trace = run_compiled(compiled)
        assert boundary_trace(compiled, trace) == [(s.pc, s.registers)
                                                   for s in rm_run(prog).trace]

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_self_jump_loops(self, backend):
        prog = parse_rm("registers 1\n1: J 1 1\n")
        trace = run_compiled(compile_program(prog, backend), max_steps=30)
        assert trace.reason.value == "budget"

    def test_manifest(self, apsum):
        doc = json.loads(compile_program(apsum, Backend.STRONG_SLEPTSOV).manifest_json())
        assert doc["offset"] == 1 and doc["mode"] == "strong-sleptsov"
        assert doc["halt_place"] == "q13" and len(doc["instructions"]) == 12

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_modes(self, backend):
        assert Backend(backend.value).mode == backend.mode
        assert str(backend.mode) == {"inhibitor": "petri+inhibitor",
                                     "priority": "petri+priority",
                                     "strong-sleptsov": "strong-sleptsov"}[backend.value]


class TestDecode:
    def test_strong_offset(self, apsum):
        compiled = compile_program(apsum, Backend.STRONG_SLEPTSOV)
        m = Marking.of(compiled.net, {"r1": 1, "r2": 1, "r3": 1, "r4": 1})
        assert decode_registers(compiled, m) == (0, 0, 0, 0)

    def test_inhibitor_zero(self, apsum):
        compiled = compile_program(apsum, Backend.INHIBITOR)
        assert decode_registers(compiled, Marking.zeros(compiled.net)) == (0, 0, 0, 0)

    def test_no_value_is_violation(self, apsum):
        compiled = compile_program(apsum, Backend.STRONG_SLEPTSOV)
        with pytest.raises(EncodingViolation):
            decode_registers(compiled, Marking.of(compiled.net, {"r2": 1, "r3": 1, "r4": 1}))


def internal_places(compiled):
    groups = []
    for lay in compiled.layout:
        gadget_ports = {"p1", "p2", "p3"} if lay.instruction[0] != "J" else {"p1", "p2", "p3", "p4"}
        groups.append({net for local, net in lay.places.items()
                       if local not in gadget_ports and local != "p8"})
    return groups


class TestInvariants:
    @pytest.mark.parametrize("backend", BACKENDS)
    @pytest.mark.parametrize("n", [0, 1, 3])
    def test_single_control_token(self, apsum, backend, n):
        compiled = compile_program(apsum, backend, {2: n})
        groups = internal_places(compiled)
        for m in run_compiled(compiled, SeededRandom(n)).markings():
            on_control = sum(m[q] for q in compiled.control_places)
            assert on_control <= 1
            busy = [g for g in groups if any(m[p] for p in g)]
            assert len(busy) == (0 if on_control else 1)

    @pytest.mark.parametrize("n", range(11))
    def test_decrement_keeps_value_token(self, apsum, n):
        compiled = compile_program(apsum, Backend.STRONG_SLEPTSOV, {2: n})
        q_transitions = {lay.transitions["t1"] for lay in compiled.layout
                         if lay.instruction[0] == "Q"}
        trace = run_compiled(compiled)
        before = compiled.initial
        for step, m in trace.entries:
            if set(step) & q_transitions:
                assert all(m[r] >= 1 for r in compiled.register_places), (before, step)
            if control_position(compiled, m) is not None:
                assert all(m[r] >= 1 for r in compiled.register_places)
            before = m

    @pytest.mark.parametrize("n", [0, 2, 3])
    def test_ties_converge_in_two_steps(self, apsum, n):
        compiled = compile_program(apsum, Backend.STRONG_SLEPTSOV, {2: n})
        graph = build_rg(compiled.net, compiled.initial, compiled.mode)
        assert not graph.truncated
        ties = [m for m in graph.nodes if graph.out_degree(m) > 1]
        assert ties
        for m in ties:
            succ = graph.successors(m)
            assert len(succ) == 2
            ends = set()
            for _, mid in succ:
                (only,) = graph.successors(mid)
                ends.add(only[1])
            assert len(ends) == 1
            assert control_position(compiled, ends.pop()) is not None

    @pytest.mark.parametrize("seed", range(6))
    def test_seed_does_not_change_boundaries(self, apsum, seed):
        compiled = compile_program(apsum, Backend.STRONG_SLEPTSOV, {2: 3})
        expected = [(s.pc, s.registers) for s in rm_run(apsum, {2: 3}).trace]
        trace = run_compiled(compiled, SeededRandom(seed))
        assert boundary_trace(compiled, trace) == expected
