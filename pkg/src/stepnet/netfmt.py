"""Plain-text net format.

One declaration per line, ``#`` starts a comment::

    place <name> [init <n>]
    trans <name> [pri <n>]
    arc <src> -> <dst> [* <w>]
    inhib <place> -o <trans>
    prio <t> > <u>

``prio`` gives the priority relation as pairs (``t`` wins over ``u`` when
both are firable); it is turned into integer priorities by ranking and may
not be mixed with ``pri``. Names must be declared before arcs use them.
"""

from __future__ import annotations

import graphlib
import re

from .errors import NetError, ParseError
from .net import Marking, NetStructure

_NAME = r"[A-Za-z_][\w.']*"
_PLACE = re.compile(rf"place\s+({_NAME})(?:\s+init\s+(\d+))?$")
_TRANS = re.compile(rf"trans\s+({_NAME})(?:\s+pri\s+(\d+))?$")
_ARC = re.compile(rf"arc\s+({_NAME})\s*->\s*({_NAME})(?:\s*\*\s*(\d+))?$")
_INHIB = re.compile(rf"inhib\s+({_NAME})\s*-o\s*({_NAME})$")
_PRIO = re.compile(rf"prio\s+({_NAME})\s*>\s*({_NAME})$")


def rank_priorities(transitions, relation) -> dict[str, int]:
    """Integer priorities consistent with ``relation`` (pairs ``(winner, loser)``).

    A transition's value is the length of the longest chain of transitions
    it beats. Raises ``ValueError`` on a cycle.
    """
    beats = {t: set() for t in transitions}
    for hi, lo in relation:
        beats[hi].add(lo)
    try:
        order = list(graphlib.TopologicalSorter(beats).static_order())
    except graphlib.CycleError as exc:
        raise ValueError(f"cyclic priority relation: {exc.args[1]}") from None
    rank = {}
    for t in order:
        rank[t] = max((rank[u] + 1 for u in beats[t]), default=0)
    return {t: rank[t] for t in transitions}


def parse_net(text: str) -> tuple[NetStructure, Marking]:
    places, transitions = [], []
    init, prio = {}, {}
    pre, post = {}, {}
    inhibitors = set()
    relation = []
    kinds = {}

    def need(name, kind, lineno):
        if kinds.get(name) != kind:
            what = "undeclared" if name not in kinds else f"not a {kind}"
            raise ParseError(f"{name} is {what}", lineno)

    def declare(name, kind, lineno):
        if name in kinds:
            raise ParseError(f"{name} declared twice", lineno)
        kinds[name] = kind

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if (mt := _PLACE.match(line)):
            name, n = mt.groups()
            declare(name, "place", lineno)
            places.append(name)
            init[name] = int(n or 0)
        elif (mt := _TRANS.match(line)):
            name, n = mt.groups()
            declare(name, "transition", lineno)
            transitions.append(name)
            if n is not None:
                prio[name] = int(n)
        elif (mt := _ARC.match(line)):
            src, dst, w = mt.groups()
            w = int(w) if w is not None else 1
            if w < 1:
                raise ParseError("arc weight must be positive", lineno)
            if kinds.get(src) == "place":
                need(dst, "transition", lineno)
                table, key = pre, (src, dst)
                if key in inhibitors:
                    raise ParseError(f"{src} is already an inhibitor place of {dst}", lineno)
            elif kinds.get(src) == "transition":
                need(dst, "place", lineno)
                table, key = post, (src, dst)
            else:
                raise ParseError(f"{src} is undeclared", lineno)
            if key in table:
                raise ParseError(f"duplicate arc {src} -> {dst}", lineno)
            table[key] = w
        elif (mt := _INHIB.match(line)):
            p, t = mt.groups()
            need(p, "place", lineno)
            need(t, "transition", lineno)
            if (p, t) in pre:
                raise ParseError(f"{p} is already an input place of {t}", lineno)
            if (p, t) in inhibitors:
                raise ParseError(f"duplicate inhibitor arc {p} -o {t}", lineno)
            inhibitors.add((p, t))
        elif (mt := _PRIO.match(line)):
            hi, lo = mt.groups()
            need(hi, "transition", lineno)
            need(lo, "transition", lineno)
            relation.append((hi, lo))
        else:
            raise ParseError(f"cannot parse {line!r}", lineno)

    if relation:
        if prio:
            raise ParseError("use either 'pri' values or 'prio' pairs, not both")
        try:
            prio = rank_priorities(transitions, relation)
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    try:
        net = NetStructure(places, transitions, pre, post, inhibitors, prio)
    except NetError as exc:
        raise ParseError(str(exc)) from None
    return net, Marking.of(net, init)


def format_net(net: NetStructure, marking: Marking | None = None) -> str:
    """Canonical text for ``net``; ``parse_net`` of the result gives the same net back."""
    tokens = marking.as_dict() if marking is not None else {}
    lines = [f"place {p} init {tokens.get(p, 0)}" for p in net.places]
    for t in net.transitions:
        pri = net.priorities[t]
        lines.append(f"trans {t}" + (f" pri {pri}" if pri else ""))

    def arc(src, dst, w):
        return f"arc {src} -> {dst}" + (f" * {w}" if w != 1 else "")

    pidx = net.place_index
    for t in net.transitions:
        ins = sorted((pidx[p], p, w) for (p, u), w in net.pre.items() if u == t)
        outs = sorted((pidx[p], p, w) for (u, p), w in net.post.items() if u == t)
        lines += [arc(p, t, w) for _, p, w in ins]
        lines += [arc(t, p, w) for _, p, w in outs]
    tidx = net.transition_index
    for p, t in sorted(net.inhibitors, key=lambda pt: (tidx[pt[1]], pidx[pt[0]])):
        lines.append(f"inhib {p} -o {t}")
    return "\n".join(lines) + "\n"
