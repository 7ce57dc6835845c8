"""Intervals on a path, WLOG case classification and path decomposition"""
from __future__ import annotations
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from minkord.chains import Chain, is_chain
from minkord.order import OrderingError, SaturatedBetw
from minkord.structure import EventId, Path


class IntervalError(ValueError):
    """Raised for intervals off their path or pairs of intervals that cannot be compared"""


@dataclass(frozen=True, eq=False)
class Interval:
    """The interval |ab| = {x : [a x b]} + {a, b} on a path

    Two intervals are equal when they lie on the same path and hold the same
    events, so |ab| == |ba|.

    Attributes
    ----------
    path : str
        the path name
    a, b : EventId
        the endpoints, equal for the singleton interval |aa| = {a}
    events : FrozenSet[EventId]
        the events of the interval
    support : FrozenSet[EventId]
        the path members the events were computed from
    """

    path: str
    a: EventId
    b: EventId
    events: FrozenSet[EventId]
    support: FrozenSet[EventId] = field(default=frozenset(), repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Interval):
            return NotImplemented
        return self.path == other.path and self.events == other.events

    def __hash__(self) -> int:
        return hash((self.path, self.events))

    def __contains__(self, event: object) -> bool:
        return event in self.events

    @property
    def is_degenerate(self) -> bool:
        return self.a == self.b

    def __str__(self) -> str:
        return f"|{self.a},{self.b}| {{{','.join(sorted(self.events))}}}"


class WlogTag(Enum):
    Disjoint = "Disjoint"
    Overlapping = "Overlapping"
    Nested = "Nested"
    SharedEndpointNested = "SharedEndpointNested"
    SharedEndpointTouching = "SharedEndpointTouching"
    Identical = "Identical"


@dataclass(frozen=True)
class WlogCase:
    """The canonical case of a pair of intervals |ab|, |cd|

    Attributes
    ----------
    tag : WlogTag
        the case
    relabeling : Dict[str, str]
        input label ("a", "b", "c" or "d") -> canonical position it moves to
    canonical : Tuple[EventId, EventId, EventId, EventId]
        the endpoint events in canonical positions a, b, c, d
    """

    tag: WlogTag
    relabeling: Dict[str, str] = field(hash=False)
    canonical: Tuple[EventId, EventId, EventId, EventId]


LABELS = ("a", "b", "c", "d")

# generated by a<->b, c<->d and (a,b)<->(c,d); each entry lists the input label
# placed at canonical positions a, b, c, d
SYMMETRY_GROUP: Tuple[Tuple[str, str, str, str], ...] = (
    ("a", "b", "c", "d"),
    ("b", "a", "c", "d"),
    ("a", "b", "d", "c"),
    ("b", "a", "d", "c"),
    ("c", "d", "a", "b"),
    ("d", "c", "a", "b"),
    ("c", "d", "b", "a"),
    ("d", "c", "b", "a"),
)


def betw4(sb: SaturatedBetw, a: EventId, b: EventId, c: EventId, d: EventId) -> bool:
    """whether [a b c], [a b d], [a c d] and [b c d] all hold"""
    return (
        sb.between(a, b, c)
        and sb.between(a, b, d)
        and sb.between(a, c, d)
        and sb.between(b, c, d)
    )


def _scan(
    sb: SaturatedBetw, path: str, support: FrozenSet[EventId], a: EventId, b: EventId
) -> Interval:
    events = {x for x in support if sb.between(a, x, b)} | {a, b}
    return Interval(path, a, b, frozenset(events), support)


def mk_interval(sb: SaturatedBetw, path: Path, a: EventId, b: EventId) -> Interval:
    """Build the interval between two events of a path

    Parameters
    ----------
    sb : SaturatedBetw
        the betweenness relation
    path : Path
        the path carrying the interval
    a, b : EventId
        the endpoints, both on the path; a == b gives {a}

    Returns
    -------
    Interval
        the interval with its events scanned from the path members

    Raises
    ------
    IntervalError
        if an endpoint is off the path
    """
    for event in (a, b):
        if event not in path.members:
            raise IntervalError(f'endpoint "{event}" is not on path "{path.name}"')
    return _scan(sb, path.name, path.members, a, b)


def _relabel(
    labelled: Dict[str, EventId], perm: Tuple[str, str, str, str]
) -> Tuple[Dict[str, str], Tuple[EventId, EventId, EventId, EventId]]:
    relabeling = {source: target for target, source in zip(LABELS, perm)}
    canonical = tuple(labelled[source] for source in perm)
    return relabeling, canonical  # type: ignore[return-value]


def wlog_classify(sb: SaturatedBetw, I: Interval, J: Interval) -> WlogCase:
    """Reduce a pair of intervals to one canonical case

    With four distinct endpoints the three cases are
    Disjoint (betw4 a b c d), Overlapping (betw4 a c b d) and Nested
    (betw4 a c d b). With one shared endpoint, relabelled so that a == c, the
    cases are SharedEndpointNested ([a d b]) and SharedEndpointTouching
    ([b a d]). Equal endpoint pairs give Identical.

    Parameters
    ----------
    sb : SaturatedBetw
        the betweenness relation, total on the endpoints
    I, J : Interval
        nondegenerate intervals on the same path

    Returns
    -------
    WlogCase
        the case and the first relabeling of the symmetry group reaching it

    Raises
    ------
    IntervalError
        for intervals on different paths, degenerate intervals, or endpoints
        not totally ordered in sb
    """
    if I.path != J.path:
        raise IntervalError(f'intervals lie on different paths "{I.path}" and "{J.path}"')
    if I.is_degenerate or J.is_degenerate:
        raise IntervalError("wlog_classify needs nondegenerate intervals")
    labelled = dict(zip(LABELS, (I.a, I.b, J.a, J.b)))
    endpoints = set(labelled.values())

    try:
        if len(endpoints) == 4:
            patterns = (
                (WlogTag.Disjoint, (0, 1, 2, 3)),
                (WlogTag.Overlapping, (0, 2, 1, 3)),
                (WlogTag.Nested, (0, 2, 3, 1)),
            )
            for perm in SYMMETRY_GROUP:
                relabeling, canonical = _relabel(labelled, perm)
                for tag, order in patterns:
                    if betw4(sb, *(canonical[i] for i in order)):
                        return WlogCase(tag, relabeling, canonical)
            raise IntervalError(
                f"endpoints {', '.join(sorted(endpoints))} are not totally ordered"
            )

        if len(endpoints) == 2:
            for perm in SYMMETRY_GROUP:
                relabeling, (a, b, c, d) = _relabel(labelled, perm)
                if a == c and b == d:
                    return WlogCase(WlogTag.Identical, relabeling, (a, b, c, d))

        for perm in SYMMETRY_GROUP:
            relabeling, (a, b, c, d) = _relabel(labelled, perm)
            if a != c:
                continue
            middle = sb.middle(a, b, d)
            if middle == d:
                return WlogCase(WlogTag.SharedEndpointNested, relabeling, (a, b, c, d))
            if middle == a:
                return WlogCase(WlogTag.SharedEndpointTouching, relabeling, (a, b, c, d))
    except OrderingError as err:
        raise IntervalError(f"endpoints are not totally ordered: {err}") from None
    raise IntervalError(f"endpoints {', '.join(sorted(endpoints))} are not totally ordered")


def interval_intersect(sb: SaturatedBetw, I: Interval, J: Interval) -> Optional[Interval]:
    """Intersect two intervals of a path by case analysis on their endpoints

    Parameters
    ----------
    sb : SaturatedBetw
        the betweenness relation
    I, J : Interval
        intervals on the same path, degenerate ones allowed

    Returns
    -------
    Optional[Interval]
        the intersection as an interval (possibly a singleton), or None when empty

    Raises
    ------
    IntervalError
        as `wlog_classify`
    """
    if I.path != J.path:
        raise IntervalError(f'intervals lie on different paths "{I.path}" and "{J.path}"')
    support = I.support | J.support
    for single, other in ((I, J), (J, I)):
        if single.is_degenerate:
            return _scan(sb, I.path, support, single.a, single.a) if single.a in other else None

    case = wlog_classify(sb, I, J)
    a, b, c, d = case.canonical
    if case.tag is WlogTag.Disjoint:
        return None
    if case.tag is WlogTag.Overlapping:
        return _scan(sb, I.path, support, c, b)
    if case.tag in (WlogTag.Nested, WlogTag.SharedEndpointNested):
        return _scan(sb, I.path, support, c, d)
    if case.tag is WlogTag.SharedEndpointTouching:
        return _scan(sb, I.path, support, a, a)
    return _scan(sb, I.path, support, a, b)


def betw_set(sb: SaturatedBetw, y: EventId, S: Iterable[EventId], z: EventId) -> bool:
    """[y S z]: every event of S lies between y and z; true for empty S"""
    return all(sb.between(y, x, z) for x in S)


@dataclass(frozen=True)
class PathDecomposition:
    """A path cut by a chain into two rays, the segments and the chain events

    Attributes
    ----------
    ray_low : FrozenSet[EventId]
        events before the first chain event
    ray_high : FrozenSet[EventId]
        events after the last chain event
    segments : Tuple[FrozenSet[EventId], ...]
        interiors between consecutive chain events
    chain_events : FrozenSet[EventId]
        the events of the chain
    """

    ray_low: FrozenSet[EventId]
    ray_high: FrozenSet[EventId]
    segments: Tuple[FrozenSet[EventId], ...]
    chain_events: FrozenSet[EventId]

    @property
    def rays(self) -> Tuple[FrozenSet[EventId], FrozenSet[EventId]]:
        return self.ray_low, self.ray_high

    def pieces(self) -> List[FrozenSet[EventId]]:
        return [self.ray_low, *self.segments, self.ray_high, self.chain_events]


def decompose_path(sb: SaturatedBetw, path: Path, ch: Chain) -> PathDecomposition:
    """Split a path into two rays and the segments between chain events

    No claim is made about how many segments are non-empty; the result is a
    partition of the path members.

    Parameters
    ----------
    sb : SaturatedBetw
        the betweenness relation, total on the path
    path : Path
        the path to split
    ch : Chain
        a chain on the path

    Returns
    -------
    PathDecomposition
        the pieces, pairwise disjoint, covering the path

    Raises
    ------
    IntervalError
        if the chain is not on the path or fails the chain condition
    OrderingError
        if an event falls in no piece or in several (totality failure)
    """
    if ch.path != path.name or not ch.events <= path.members:
        raise IntervalError(f'chain {ch} is not on path "{path.name}"')
    if not is_chain(sb, ch):
        raise IntervalError(f"{ch} fails the chain condition")
    seq = ch.seq
    ray_low, ray_high = set(), set()
    segments: List[set] = [set() for _ in range(len(seq) - 1)]

    for x in sorted(path.members - ch.events):
        homes = []
        if sb.between(x, seq[0], seq[1]):
            homes.append(ray_low)
        if sb.between(seq[-2], seq[-1], x):
            homes.append(ray_high)
        for i in range(len(seq) - 1):
            if sb.between(seq[i], x, seq[i + 1]):
                homes.append(segments[i])
        if len(homes) != 1:
            raise OrderingError(
                f'event "{x}" lies in {len(homes)} pieces of path "{path.name}"',
                (x, *seq),
            )
        homes[0].add(x)

    return PathDecomposition(
        ray_low=frozenset(ray_low),
        ray_high=frozenset(ray_high),
        segments=tuple(frozenset(segment) for segment in segments),
        chain_events=ch.events,
    )
