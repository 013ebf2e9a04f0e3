"""Place-transition net data model, markings, steps and firability multiplicity."""

from __future__ import annotations

from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Union

from .errors import InvalidStep, NetError


class _Unbounded:
    """Multiplicity of an enabled inhibitor arc: larger than every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED"

    def __reduce__(self):
        return (_Unbounded, ())

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("stepnet.UNBOUNDED")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


UNBOUNDED = _Unbounded()

Multiplicity = Union[int, _Unbounded]


class NetStructure:
    """Immutable place-transition net with weighted arcs, inhibitor arcs and priorities.

    ``pre`` maps ``(place, transition)`` to the weight of the input arc and
    ``post`` maps ``(transition, place)`` to the weight of the output arc.
    Absent pairs have weight zero. ``priorities`` maps transitions to
    non-negative integers; unlisted transitions get priority 0.
    """

    __slots__ = (
        "places", "transitions", "pre", "post", "inhibitors", "priorities",
        "place_index", "transition_index", "_inputs", "_outputs", "_inhibited",
    )

    def __init__(
        self,
        places: Iterable[str],
        transitions: Iterable[str],
        pre: Mapping[tuple[str, str], int] | None = None,
        post: Mapping[tuple[str, str], int] | None = None,
        inhibitors: Iterable[tuple[str, str]] = (),
        priorities: Mapping[str, int] | None = None,
    ):
        places = tuple(places)
        transitions = tuple(transitions)
        if len(set(places)) != len(places):
            raise NetError("duplicate place identifier")
        if len(set(transitions)) != len(transitions):
            raise NetError("duplicate transition identifier")
        clash = set(places) & set(transitions)
        if clash:
            raise NetError(f"identifiers used as both place and transition: {sorted(clash)}")
        place_index = {p: i for i, p in enumerate(places)}
        transition_index = {t: i for i, t in enumerate(transitions)}

        def check_weight(pair, w):
            if not isinstance(w, int) or isinstance(w, bool) or w < 1:
                raise NetError(f"arc {pair} must have a positive integer weight, got {w!r}")

        pre = dict(pre or {})
        post = dict(post or {})
        for (p, t), w in pre.items():
            if p not in place_index or t not in transition_index:
                raise NetError(f"input arc {p} -> {t} references an unknown node")
            check_weight((p, t), w)
        for (t, p), w in post.items():
            if p not in place_index or t not in transition_index:
                raise NetError(f"output arc {t} -> {p} references an unknown node")
            check_weight((t, p), w)
        inhibitors = frozenset(inhibitors)
        for p, t in inhibitors:
            if p not in place_index or t not in transition_index:
                raise NetError(f"inhibitor arc {p} -o {t} references an unknown node")
            if (p, t) in pre:
                raise NetError(f"{p} is both an input and an inhibitor place of {t}")
        prio = {t: 0 for t in transitions}
        for t, v in (priorities or {}).items():
            if t not in transition_index:
                raise NetError(f"priority given for unknown transition {t}")
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise NetError(f"priority of {t} must be a non-negative integer, got {v!r}")
            prio[t] = v

        setattr_ = object.__setattr__
        setattr_(self, "places", places)
        setattr_(self, "transitions", transitions)
        setattr_(self, "pre", MappingProxyType(pre))
        setattr_(self, "post", MappingProxyType(post))
        setattr_(self, "inhibitors", inhibitors)
        setattr_(self, "priorities", MappingProxyType(prio))
        setattr_(self, "place_index", MappingProxyType(place_index))
        setattr_(self, "transition_index", MappingProxyType(transition_index))

        inputs = [[] for _ in transitions]
        outputs = [[] for _ in transitions]
        inhibited = [[] for _ in transitions]
        for (p, t), w in pre.items():
            inputs[transition_index[t]].append((place_index[p], w))
        for (t, p), w in post.items():
            outputs[transition_index[t]].append((place_index[p], w))
        for p, t in inhibitors:
            inhibited[transition_index[t]].append(place_index[p])
        setattr_(self, "_inputs", tuple(tuple(sorted(x)) for x in inputs))
        setattr_(self, "_outputs", tuple(tuple(sorted(x)) for x in outputs))
        setattr_(self, "_inhibited", tuple(tuple(sorted(x)) for x in inhibited))

    def __setattr__(self, name, value):
        raise AttributeError("NetStructure is immutable")

    def __eq__(self, other):
        if not isinstance(other, NetStructure):
            return NotImplemented
        return (
            self.places == other.places
            and self.transitions == other.transitions
            and dict(self.pre) == dict(other.pre)
            and dict(self.post) == dict(other.post)
            and self.inhibitors == other.inhibitors
            and dict(self.priorities) == dict(other.priorities)
        )

    def __hash__(self):
        return hash((self.places, self.transitions, frozenset(self.pre.items()),
                     frozenset(self.post.items()), self.inhibitors))

    def __repr__(self):
        return (f"NetStructure({len(self.places)} places, {len(self.transitions)} transitions, "
                f"{len(self.pre) + len(self.post)} arcs, {len(self.inhibitors)} inhibitors)")

    def has_priorities(self) -> bool:
        return any(self.priorities.values())

    def is_source(self, transition: str) -> bool:
        """True when the transition has no regular input arcs."""
        return not self._inputs[self._tidx(transition)]

    def _pidx(self, place):
        try:
            return self.place_index[place]
        except KeyError:
            raise NetError(f"unknown place {place!r}") from None

    def _tidx(self, transition):
        try:
            return self.transition_index[transition]
        except KeyError:
            raise NetError(f"unknown transition {transition!r}") from None

    # Index-level helpers used by the semantics engine; ``tokens`` is the
    # place-ordered token vector of a marking.

    def multiplicity_at(self, tokens, ti: int) -> Multiplicity:
        for pi in self._inhibited[ti]:
            if tokens[pi]:
                return 0
        best = UNBOUNDED
        for pi, w in self._inputs[ti]:
            c = tokens[pi] // w
            if best is UNBOUNDED or c < best:
                best = c
                if c == 0:
                    return 0
        return best

    def fire_vector(self, tokens, counts) -> tuple[int, ...]:
        """Successor token vector for ``counts`` (pairs of transition index, count)."""
        out = list(tokens)
        for ti, c in counts:
            for pi in self._inhibited[ti]:
                if tokens[pi]:
                    raise InvalidStep(
                        f"{self.transitions[ti]} fired while inhibitor place "
                        f"{self.places[pi]} holds {tokens[pi]} tokens")
            for pi, w in self._inputs[ti]:
                out[pi] -= c * w
        for pi, v in enumerate(out):
            if v < 0:
                raise InvalidStep(f"place {self.places[pi]} would hold {v} tokens")
        for ti, c in counts:
            for pi, w in self._outputs[ti]:
                out[pi] += c * w
        return tuple(out)


class Marking:
    """Token counts for every place of a net, in the net's place order."""

    __slots__ = ("places", "tokens")

    def __init__(self, places: tuple[str, ...], tokens: Iterable[int]):
        tokens = tuple(tokens)
        if len(tokens) != len(places):
            raise NetError(f"marking has {len(tokens)} entries for {len(places)} places")
        for v in tokens:
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise NetError(f"token counts must be non-negative integers, got {v!r}")
        object.__setattr__(self, "places", places)
        object.__setattr__(self, "tokens", tokens)

    @classmethod
    def _trusted(cls, places, tokens):
        m = object.__new__(cls)
        object.__setattr__(m, "places", places)
        object.__setattr__(m, "tokens", tokens)
        return m

    @classmethod
    def of(cls, net: NetStructure, tokens: Mapping[str, int] | None = None) -> "Marking":
        """Marking from a (possibly partial) place -> tokens map; missing places are empty."""
        vec = [0] * len(net.places)
        for p, v in (tokens or {}).items():
            vec[net._pidx(p)] = v
        return cls(net.places, vec)

    @classmethod
    def zeros(cls, net: NetStructure) -> "Marking":
        return cls(net.places, (0,) * len(net.places))

    def __setattr__(self, name, value):
        raise AttributeError("Marking is immutable")

    def __getitem__(self, place: str) -> int:
        try:
            return self.tokens[self.places.index(place)]
        except ValueError:
            raise NetError(f"unknown place {place!r}") from None

    def __eq__(self, other):
        if not isinstance(other, Marking):
            return NotImplemented
        return self.tokens == other.tokens and self.places == other.places

    def __hash__(self):
        return hash(self.tokens)

    def __lt__(self, other):
        return self.tokens < other.tokens

    def __iter__(self):
        return iter(self.places)

    def __len__(self):
        return len(self.places)

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.places, self.tokens))

    def support(self) -> dict[str, int]:
        """Only the marked places."""
        return {p: v for p, v in zip(self.places, self.tokens) if v}

    def replace(self, **changes: int) -> "Marking":
        vec = list(self.tokens)
        for p, v in changes.items():
            vec[self.places.index(p)] = v
        return Marking(self.places, vec)

    def __str__(self):
        return "{" + ", ".join(_term(v, p) for p, v in self.support().items()) + "}"

    def __repr__(self):
        return f"Marking({self})"


def _term(count, name):
    return name if count == 1 else f"{count}·{name}"


class Step:
    """Multiset of transitions fired together in one tact.

    Counts are positive; the empty step cannot be built. Equality ignores the
    order in which transitions were listed.
    """

    __slots__ = ("_items", "_key")

    def __init__(self, counts: Mapping[str, int] | Iterable[tuple[str, int]]):
        items = tuple(counts.items()) if isinstance(counts, Mapping) else tuple(counts)
        if not items:
            raise InvalidStep("a step must fire at least one transition")
        seen = set()
        for t, c in items:
            if t in seen:
                raise InvalidStep(f"transition {t} listed twice in a step")
            seen.add(t)
            if not isinstance(c, int) or isinstance(c, bool) or c < 1:
                raise InvalidStep(f"firing count of {t} must be a positive integer, got {c!r}")
        object.__setattr__(self, "_items", items)
        object.__setattr__(self, "_key", frozenset(items))

    def __setattr__(self, name, value):
        raise AttributeError("Step is immutable")

    def __eq__(self, other):
        if not isinstance(other, Step):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __iter__(self) -> Iterator[str]:
        return (t for t, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __getitem__(self, transition):
        for t, c in self._items:
            if t == transition:
                return c
        return 0

    def __contains__(self, transition):
        return any(t == transition for t, _ in self._items)

    def items(self) -> tuple[tuple[str, int], ...]:
        return self._items

    def as_dict(self) -> dict[str, int]:
        return dict(self._items)

    @property
    def total(self) -> int:
        return sum(c for _, c in self._items)

    def sort_key(self, net: NetStructure):
        """Lexicographic key over (transition index, count) pairs."""
        return tuple(sorted((net._tidx(t), c) for t, c in self._items))

    def __str__(self):
        return ", ".join(_term(c, t) for t, c in self._items)

    def __repr__(self):
        return f"Step({{{self}}})"


def _check_same_net(marking, net):
    if marking.places != net.places:
        raise NetError("marking does not belong to this net")


def arc_multiplicity(marking: Marking, place: str, transition: str, net: NetStructure) -> Multiplicity:
    """How many copies of ``transition`` the single arc from ``place`` allows."""
    _check_same_net(marking, net)
    pi, ti = net._pidx(place), net._tidx(transition)
    tokens = marking.tokens[pi]
    if (place, transition) in net.pre:
        return tokens // net.pre[place, transition]
    if (place, transition) in net.inhibitors:
        return UNBOUNDED if tokens == 0 else 0
    raise NetError(f"no input or inhibitor arc from {place} to {transition}")


def transition_multiplicity(marking: Marking, transition: str, net: NetStructure) -> Multiplicity:
    """Minimum arc multiplicity over the transition's input and inhibitor arcs.

    A transition without any input arcs (or whose only inputs are enabled
    inhibitor arcs) yields ``UNBOUNDED``.
    """
    _check_same_net(marking, net)
    return net.multiplicity_at(marking.tokens, net._tidx(transition))


def is_firable(marking: Marking, transition: str, net: NetStructure) -> bool:
    c = transition_multiplicity(marking, transition, net)
    return c is UNBOUNDED or c > 0


def apply_step(marking: Marking, step: Step, net: NetStructure) -> Marking:
    """Fire every transition of ``step`` the given number of times, atomically.

    Raises ``InvalidStep`` when the step consumes more tokens than the marking
    holds or fires a transition whose inhibitor place is non-empty.
    """
    _check_same_net(marking, net)
    counts = [(net._tidx(t), c) for t, c in step.items()]
    return Marking._trusted(net.places, net.fire_vector(marking.tokens, counts))
