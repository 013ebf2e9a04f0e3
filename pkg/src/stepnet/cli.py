"""Command-line interface.

Exit status: 0 on success, 1 when a verification fails, 2 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .compiler import Backend, compile_program
from .errors import StepnetError
from .net import Marking
from .netfmt import format_net, parse_net
from .reachability import build_rg, export_dot, rg_to_dict, verify_zero_check
from .rm import parse_rm, rm_run
from .selftest import run_selftest
from .semantics import FirstLexicographic, SeededRandom, SemanticsMode, run
from .traces import trace_to_dict

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _assignments(pairs, prefix):
    """Parse ``--set r2=4`` style options into {2: 4} (registers) or {"p": 4} (places)."""
    out = {}
    for item in pairs or ():
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or not value.strip().isdigit():
            raise UsageError(f"expected NAME=VALUE, got {item!r}")
        if prefix:
            if not (key.startswith(prefix) and key[len(prefix):].isdigit()):
                raise UsageError(f"expected {prefix}<index>=VALUE, got {item!r}")
            key = int(key[len(prefix):])
        out[key] = int(value)
    return out


def _policy(args):
    if args.policy == "first":
        return FirstLexicographic()
    return SeededRandom(args.seed)


def cmd_run(args):
    net, m0 = parse_net(_read(args.net))
    manifest = json.loads(_read(args.manifest)) if args.manifest else None
    mode_text = args.mode or (manifest["mode"] if manifest else "petri")
    mode = SemanticsMode.parse(mode_text)
    if args.set:
        m0 = Marking.of(net, {**m0.as_dict(), **_assignments(args.set, None)})
    policy = _policy(args)
    trace = run(m0, net, mode, policy, args.max_steps)
    print(f"mode: {mode}")
    print(f"steps: {len(trace)}")
    print(f"reason: {trace.reason.value}")
    print(f"final: {trace.final}")
    if manifest:
        offset = manifest["offset"]
        for i, place in enumerate(manifest["register_places"], start=1):
            print(f"r{i} = {trace.final[place] - offset}")
        halted = trace.final[manifest["halt_place"]] == 1
        print(f"halted: {'yes' if halted else 'no'}")
    if args.trace:
        _write(args.trace, json.dumps(trace_to_dict(trace, mode, policy), indent=1) + "\n")
    return EXIT_OK


def cmd_rg(args):
    net, m0 = parse_net(_read(args.net))
    mode = SemanticsMode.parse(args.mode)
    graph = build_rg(net, m0, mode, args.budget)
    print(f"mode: {mode}")
    print(f"nodes: {len(graph.nodes)}")
    print(f"edges: {len(graph.edges)}")
    print(f"dead: {' '.join(str(m) for m in graph.terminal_markings()) or '-'}")
    print(f"truncated: {'yes' if graph.truncated else 'no'}")
    if args.dot:
        _write(args.dot, export_dot(graph))
    if args.json:
        _write(args.json, json.dumps(rg_to_dict(graph), indent=1) + "\n")
    return EXIT_OK


def cmd_compile(args):
    program = parse_rm(_read(args.program))
    backend = Backend(args.backend)
    compiled = compile_program(program, backend, _assignments(args.set, "r"))
    _write(args.output, format_net(compiled.net, compiled.initial))
    if args.manifest:
        _write(args.manifest, compiled.manifest_json())
    return EXIT_OK


def cmd_rm_run(args):
    program = parse_rm(_read(args.program))
    result = rm_run(program, _assignments(args.set, "r"), args.max_steps)
    print(f"reason: {result.reason.value}")
    print(f"instructions: {len(result.trace) - 1}")
    for i, v in enumerate(result.final.registers, start=1):
        print(f"r{i} = {v}")
    return EXIT_OK


def cmd_verify(args):
    report = verify_zero_check(args.x_max)
    print(report.summary())
    print("PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_selftest(args):
    return EXIT_OK if run_selftest() else EXIT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(prog="stepnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a net tact by tact")
    p.add_argument("net")
    p.add_argument("--mode", help="e.g. petri, petri+inhibitor, strong-sleptsov")
    p.add_argument("--policy", choices=["random", "first"], default="random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=100_000)
    p.add_argument("--set", action="append", metavar="PLACE=N", help="override an initial marking")
    p.add_argument("--trace", metavar="OUT", help="write the JSON trace here ('-' for stdout)")
    p.add_argument("--manifest", help="compiler manifest; prints decoded registers")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("rg", help="build the reachability graph")
    p.add_argument("net")
    p.add_argument("--mode", default="petri")
    p.add_argument("--budget", type=int, default=10_000, help="maximum number of markings")
    p.add_argument("--dot", metavar="OUT")
    p.add_argument("--json", metavar="OUT")
    p.set_defaults(func=cmd_rg)

    p = sub.add_parser("compile", help="compile a register-machine program into a net")
    p.add_argument("program")
    p.add_argument("--backend", choices=[b.value for b in Backend], default="inhibitor")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--manifest", metavar="OUT")
    p.add_argument("--set", action="append", metavar="rI=N", help="initial register value")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("rm-run", help="interpret a register-machine program")
    p.add_argument("program")
    p.add_argument("--set", action="append", metavar="rI=N")
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.set_defaults(func=cmd_rm_run)

    p = sub.add_parser("verify-zerocheck", help="check the strong Sleptsov zero-check gadget")
    p.add_argument("--x-max", type=int, default=50)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("selftest", help="run the built-in fixture checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, StepnetError, ValueError, KeyError) as exc:
        print(f"stepnet {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
