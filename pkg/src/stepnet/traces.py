"""JSON documents for execution traces, and their replay."""

from __future__ import annotations

from .errors import StepnetError
from .net import Marking, NetStructure, Step, apply_step
from .semantics import (ExecutionTrace, FirstLexicographic, SeededRandom, SemanticsMode,
                        StepChoicePolicy, Termination)

TRACE_FORMAT = "stepnet-trace/1"


def policy_to_dict(policy: StepChoicePolicy) -> dict:
    if isinstance(policy, SeededRandom):
        return {"kind": "seeded-random", "seed": policy.seed}
    return {"kind": "first-lexicographic"}


def policy_from_dict(doc: dict) -> StepChoicePolicy:
    if doc.get("kind") == "seeded-random":
        return SeededRandom(int(doc["seed"]))
    if doc.get("kind") == "first-lexicographic":
        return FirstLexicographic()
    raise StepnetError(f"unknown policy {doc!r}")


def trace_to_dict(trace: ExecutionTrace, mode: SemanticsMode, policy: StepChoicePolicy) -> dict:
    return {
        "format": TRACE_FORMAT,
        "mode": str(mode),
        "policy": policy_to_dict(policy),
        "initial": trace.initial.as_dict(),
        "steps": [{"step": step.as_dict(), "marking": m.as_dict()} for step, m in trace.entries],
        "reason": trace.reason.value,
    }


def trace_from_dict(doc: dict, net: NetStructure) -> ExecutionTrace:
    if doc.get("format") != TRACE_FORMAT:
        raise StepnetError(f"not a {TRACE_FORMAT} document")
    entries = [(Step(e["step"]), Marking.of(net, e["marking"])) for e in doc["steps"]]
    return ExecutionTrace(Marking.of(net, doc["initial"]), entries, Termination(doc["reason"]))


def replay(doc: dict, net: NetStructure) -> Marking:
    """Re-fire every recorded step and check it lands on the recorded marking.

    Returns the final marking; raises ``StepnetError`` at the first mismatch.
    """
    current = Marking.of(net, doc["initial"])
    for i, entry in enumerate(doc["steps"], start=1):
        current = apply_step(current, Step(entry["step"]), net)
        recorded = Marking.of(net, entry["marking"])
        if current != recorded:
            raise StepnetError(f"step {i}: replay gives {current}, trace records {recorded}")
    return current
