import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stepnet import Marking, NetStructure, SemanticsMode, Step, apply_step, enumerate_steps
from stepnet.reachability import (build_rg, check_zero_case, export_dot, rg_to_dict,
                                  verify_zero_check)

from oracle import brute_rg
from randnets import as_plain, nets


def rg(addition, mode, budget=10_000):
    net, m0 = addition
    return build_rg(net, m0, SemanticsMode.parse(mode), budget)


def as_sets(graph):
    nodes = {m.tokens for m in graph.nodes}
    edges = {(s.tokens, frozenset(step.items()), d.tokens) for s, step, d in graph.edges}
    return nodes, edges


class TestAdditionGraphs:
    def test_petri_grid(self, addition):
        graph = rg(addition, "petri")
        expected = {(i, j, 5 - i - j) for i in range(3) for j in range(4)}
        assert {m.tokens for m in graph.nodes} == expected
        assert [m.tokens for m in graph.dead] == [(0, 0, 5)]

    def test_strong_sleptsov_path(self, addition):
        graph = rg(addition, "strong-sleptsov")
        assert [m.tokens for m in graph.nodes] == [(2, 3, 0), (2, 0, 3), (0, 0, 5)]
        assert [str(s) for p in graph.paths_to_dead() for s in p] == ["3·t2", "2·t1"]

    def test_salwicki_path(self, addition):
        graph = rg(addition, "salwicki")
        assert [m.tokens for m in graph.nodes] == [(2, 3, 0), (1, 2, 2), (0, 1, 4), (0, 0, 5)]
        assert len(graph.edges) == 3

    def test_sleptsov_diamond(self, addition):
        graph = rg(addition, "sleptsov")
        assert len(graph.nodes) == 4 and len(graph.edges) == 4
        assert sorted(len(p) for p in graph.paths_to_dead()) == [2, 2]

    @pytest.mark.parametrize("mode", ["petri", "weak-salwicki", "salwicki", "strong-salwicki",
                                      "weak-sleptsov", "sleptsov", "strong-sleptsov",
                                      "weak-salwicki-sleptsov", "salwicki-sleptsov",
                                      "strong-salwicki-sleptsov"])
    def test_matches_oracle(self, addition, mode):
        parsed = SemanticsMode.parse(mode)
        want = brute_rg(*as_plain(*addition), parsed.net_class.value, parsed.strength.value)
        assert as_sets(rg(addition, mode)) == want

    def test_strong_is_condensation_of_petri(self, addition):
        petri = rg(addition, "petri")
        strong = rg(addition, "strong-sleptsov")
        unit = {(s, next(iter(step)), d) for s, step, d in petri.edges}
        for src, step, dst in strong.edges:
            ((t, k),) = step.items()
            cur = src
            for _ in range(k):
                nxt = next(d for s, u, d in unit if s == cur and u == t)
                cur = nxt
            assert cur == dst


class TestGraphInvariants:
    @settings(max_examples=150, deadline=None)
    @given(nets(conservative=True, max_tokens=3),
           st.sampled_from(["petri", "salwicki", "strong-sleptsov", "sleptsov",
                            "weak-salwicki", "strong-salwicki-sleptsov"]))
    def test_sound_and_complete(self, nm, mode):
        net, m = nm
        mode = SemanticsMode.parse(mode)
        graph = build_rg(net, m, mode, 200)
        for src, step, dst in graph.edges:
            assert step in enumerate_steps(src, net, mode)
            assert apply_step(src, step, net) == dst
        assert sum(1 for n in graph.nodes if n == graph.initial) == 1
        expanded = set(graph.nodes) - graph.frontier
        if graph.truncated:
            assert graph.frontier
        else:
            expanded = set(graph.nodes)
        for node in graph.dead:
            assert not enumerate_steps(node, net, mode)
        if not graph.truncated:
            for node in expanded:
                assert graph.out_degree(node) == len(enumerate_steps(node, net, mode))
                assert (node in graph.dead) == (not enumerate_steps(node, net, mode))

    @settings(max_examples=60, deadline=None)
    @given(nets(conservative=True, max_places=3, max_transitions=3, max_tokens=2),
           st.sampled_from(["petri", "salwicki", "sleptsov"]))
    def test_matches_brute_force(self, nm, mode):
        net, m = nm
        parsed = SemanticsMode.parse(mode)
        graph = build_rg(net, m, parsed, 5000)
        if graph.truncated:
            return
        want = brute_rg(*as_plain(net, m), parsed.net_class.value, parsed.strength.value)
        assert as_sets(graph) == want


class TestBudget:
    def test_unbounded_net_truncates(self):
        net = NetStructure(["p"], ["t"], pre={("p", "t"): 1}, post={("t", "p"): 2})
        graph = build_rg(net, Marking(net.places, (1,)), SemanticsMode.parse("petri"), 10)
        assert graph.truncated and len(graph.nodes) == 10 and graph.frontier

    def test_budget_one(self, addition):
        graph = rg(addition, "petri", budget=1)
        assert len(graph.nodes) == 1 and graph.truncated and not graph.edges

    def test_budget_exact_fit_is_not_truncated(self, addition):
        graph = rg(addition, "strong-sleptsov", budget=3)
        assert not graph.truncated

    def test_zero_budget_rejected(self, addition):
        with pytest.raises(ValueError):
            rg(addition, "petri", budget=0)

    def test_order_independent(self, addition):
        net, m0 = addition
        mode = SemanticsMode.parse("petri")
        swapped = NetStructure(["p1", "p2", "p3"], ["t2", "t1"], net.pre, net.post)
        a = build_rg(net, m0, mode)
        b = build_rg(swapped, Marking(swapped.places, m0.tokens), mode)
        assert as_sets(a) == as_sets(b)


class TestZeroCheck:
    def test_x_zero_dead(self):
        case = check_zero_case(0)
        assert case.passed and case.nodes == 1 and case.edges == 0

    def test_x_one(self):
        case = check_zero_case(1)
        assert case.passed and case.nodes == 5
        assert [str(m) for m in case.terminals] == ["{p3, p4, p8}"]
        assert sorted(case.paths) == [["t1", "t2", "t5"], ["t1", "t3", "t6"]]

    def test_x_seven(self):
        case = check_zero_case(7)
        assert case.passed and case.nodes == 4
        assert [str(m) for m in case.terminals] == ["{p2, 7·p4, p8}"]
        assert case.paths == [["t1", "2·t2", "t4"]]

    def test_report(self):
        report = verify_zero_check(12)
        assert report.passed and len(report.cases) == 13
        assert "FAIL" not in report.summary()

    def test_rejects_bad_x_max(self):
        with pytest.raises(ValueError):
            verify_zero_check(0)


class TestExport:
    def test_single_node(self):
        net = NetStructure(["p"], ["t"], pre={("p", "t"): 1})
        graph = build_rg(net, Marking.zeros(net), SemanticsMode.parse("petri"))
        dot = export_dot(graph)
        assert dot.count("->") == 0 and dot.count("label=") == 1

    def test_strong_addition_labels(self, addition):
        dot = export_dot(rg(addition, "strong-sleptsov"))
        assert dot.startswith("digraph")
        assert dot.count(" -> ") == 2
        assert 'label="3·t2"' in dot and 'label="2·t1"' in dot
        assert 'label="{2·p1, 3·p2}"' in dot

    def test_deterministic(self, addition):
        assert export_dot(rg(addition, "petri")) == export_dot(rg(addition, "petri"))

    def test_json_shape(self, addition):
        doc = rg_to_dict(rg(addition, "sleptsov"))
        assert len(doc["nodes"]) == 4 and len(doc["edges"]) == 4
        assert sum(n["initial"] for n in doc["nodes"]) == 1
        assert {tuple(e["step"].items()) for e in doc["edges"]} == {(("t1", 2),), (("t2", 3),)}
        assert all(set(n["marking"]) == {"p1", "p2", "p3"} for n in doc["nodes"])

    def test_step_label_multi(self):
        net = NetStructure(["p", "q"], ["a", "b"], pre={("p", "a"): 1, ("q", "b"): 1})
        graph = build_rg(net, Marking(net.places, (1, 2)), SemanticsMode.parse("salwicki-sleptsov"))
        assert 'label="a, 2·b"' in export_dot(graph)
        assert graph.edges[0][1] == Step({"a": 1, "b": 2})
