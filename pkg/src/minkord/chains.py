"""Chains: finite sequences of path events ordered by betweenness

A chain keeps its indexing function explicitly, as the tuple `seq` with
`seq[i] = f(i)`.
"""
from __future__ import annotations
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, List, Sequence, Tuple

from minkord.order import OrderingError, SaturatedBetw
from minkord.structure import EventId, Path


# largest set for which count_chain_orderings enumerates all permutations
EXHAUSTIVE_BOUND = 7


class ChainError(ValueError):
    """Raised when a chain cannot be built or a chain precondition fails"""


@dataclass(frozen=True)
class Chain:
    """A chain on a path

    Attributes
    ----------
    path : str
        the name of the path carrying the chain
    seq : Tuple[EventId, ...]
        the indexing function as a sequence, at least two distinct events
    """

    path: str
    seq: Tuple[EventId, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "seq", tuple(self.seq))
        if len(self.seq) < 2:
            raise ChainError(f"a chain needs at least two events, got {len(self.seq)}")
        if len(set(self.seq)) != len(self.seq):
            raise ChainError(f"chain events must be distinct: {self.seq}")

    @classmethod
    def on_path(cls, path: Path, seq: Iterable[EventId]) -> Chain:
        """build a chain after checking that every event lies on the path"""
        seq = tuple(seq)
        for event in seq:
            if event not in path.members:
                raise ChainError(f'event "{event}" is not on path "{path.name}"')
        return cls(path.name, seq)

    @property
    def first(self) -> EventId:
        return self.seq[0]

    @property
    def last(self) -> EventId:
        return self.seq[-1]

    @property
    def events(self) -> frozenset:
        return frozenset(self.seq)

    def __len__(self) -> int:
        return len(self.seq)

    def __iter__(self):
        return iter(self.seq)

    def __str__(self) -> str:
        return "(" + ",".join(self.seq) + ")"


def is_chain(sb: SaturatedBetw, ch: Chain) -> bool:
    """Check the chain condition for every increasing index triple

    Two-event chains carry no betweenness obligation.

    Parameters
    ----------
    sb : SaturatedBetw
        the betweenness relation
    ch : Chain
        a structurally valid chain

    Returns
    -------
    bool
        whether [f(n) f(n') f(n'')] holds for all n < n' < n''
    """
    if len(ch.seq) == 2:
        return True
    return all(sb.between(x, y, z) for x, y, z in combinations(ch.seq, 3))


def is_consecutive_chain(sb: SaturatedBetw, seq: Sequence[EventId]) -> bool:
    """the consecutive-triple reading: [Q(i-2) Q(i-1) Q(i)] for all i >= 2"""
    if len(seq) < 2 or len(set(seq)) != len(seq):
        return False
    return all(sb.between(*seq[i - 2 : i + 1]) for i in range(2, len(seq)))


def chain_reverse(ch: Chain) -> Chain:
    """the chain indexed by n -> f(|X| - 1 - n)"""
    return Chain(ch.path, tuple(reversed(ch.seq)))


def chain_append_left(ch: Chain, b: EventId, sb: SaturatedBetw) -> Chain:
    """Prepend an event to a chain

    The new indexing is g(0) = b and g(j) = f(j - 1) for j >= 1.

    Parameters
    ----------
    ch : Chain
        a chain in sb
    b : EventId
        an event outside the chain with [b f(0) f(last)]
    sb : SaturatedBetw
        the betweenness relation

    Returns
    -------
    Chain
        the extended chain, re-verified against sb

    Raises
    ------
    ChainError
        if b is already in the chain, [b f(0) f(last)] is missing, or the result
        fails the chain condition
    """
    if b in ch.seq:
        raise ChainError(f'event "{b}" is already in chain {ch}')
    if not is_chain(sb, ch):
        raise ChainError(f"{ch} is not a chain")
    if not sb.between(b, ch.first, ch.last):
        raise ChainError(f"missing betweenness [{b} {ch.first} {ch.last}]")
    result = Chain(ch.path, (b,) + ch.seq)
    if not is_chain(sb, result):
        raise ChainError(f"{result} fails the chain condition")
    return result


def chain_append_right(ch: Chain, b: EventId, sb: SaturatedBetw) -> Chain:
    """Append an event to a chain, via reversal and a left append

    Computed as reverse(append_left(reverse(ch), b)); the result equals the
    direct construction g(|X|) = b, g(i) = f(i).

    Parameters
    ----------
    ch : Chain
        a chain in sb
    b : EventId
        an event outside the chain with [f(0) f(last) b]
    sb : SaturatedBetw
        the betweenness relation, closed under reversal

    Returns
    -------
    Chain
        the extended chain

    Raises
    ------
    ChainError
        as `chain_append_left`
    """
    if b in ch.seq:
        raise ChainError(f'event "{b}" is already in chain {ch}')
    if not sb.between(ch.first, ch.last, b):
        raise ChainError(f"missing betweenness [{ch.first} {ch.last} {b}]")
    return chain_reverse(chain_append_left(chain_reverse(ch), b, sb))


def _canonical(path: str, seq: List[EventId]) -> Chain:
    if seq[0] > seq[-1]:
        seq = seq[::-1]
    return Chain(path, tuple(seq))


def _check_orbits(sb: SaturatedBetw, ch: Chain) -> None:
    # the chain fixes a middle for every 3-subset; a fact with another middle
    # means the relation is inconsistent on X
    for x, y, z in combinations(ch.seq, 3):
        for triple in sb.orderings(x, y, z):
            if triple.b != y:
                raise OrderingError(
                    f"inconsistent ordering of {', '.join(sorted((x, y, z)))}",
                    sorted((x, y, z)),
                )


def sort_into_chain(sb: SaturatedBetw, path: Path, X: Iterable[EventId]) -> Chain:
    """Order a finite set of path events into a chain

    Events are inserted one at a time by betweenness queries. The orientation is
    canonical: the first event is lexicographically smaller than the last.

    Parameters
    ----------
    sb : SaturatedBetw
        the betweenness relation, total and consistent on X
    path : Path
        the path containing X
    X : Iterable[EventId]
        at least two events of the path

    Returns
    -------
    Chain
        a chain over exactly the events of X

    Raises
    ------
    ChainError
        if X has fewer than two events or leaves the path
    OrderingError
        if some three events of X are not ordered (O5) or ordered inconsistently
    """
    events = sorted(set(X))
    if len(events) < 2:
        raise ChainError(f"need at least two events to form a chain, got {len(events)}")
    for event in events:
        if event not in path.members:
            raise ChainError(f'event "{event}" is not on path "{path.name}"')
    if len(events) == 2:
        return Chain(path.name, tuple(events))

    seq = events[:2]
    for e in events[2:]:
        first, last = seq[0], seq[-1]
        middle = sb.middle(e, first, last)
        if middle == first:
            seq.insert(0, e)
        elif middle == last:
            seq.append(e)
        else:
            # interior: find the gap between consecutive events
            for i in range(len(seq) - 1):
                if sb.middle(seq[i], e, seq[i + 1]) == e:
                    seq.insert(i + 1, e)
                    break
            else:
                raise OrderingError(
                    f'no gap of {_canonical(path.name, seq)} holds "{e}"', (e, first, last)
                )

    result = _canonical(path.name, seq)
    _check_orbits(sb, result)
    if not is_chain(sb, result):
        raise OrderingError(f"{result} fails the chain condition", result.seq)
    return result


def chain_insert(sb: SaturatedBetw, path: Path, ch: Chain, b: EventId) -> Chain:
    """Add one event to a chain, keeping the chain's direction

    Edge cases use the append lemmas; an interior event re-sorts the enlarged
    set.

    Parameters
    ----------
    sb : SaturatedBetw
        the betweenness relation
    path : Path
        the path of the chain
    ch : Chain
        the chain to extend
    b : EventId
        a path event outside the chain

    Returns
    -------
    Chain
        a chain over ch's events and b whose first event precedes its last in
        ch's direction
    """
    if b not in path.members:
        raise ChainError(f'event "{b}" is not on path "{path.name}"')
    if sb.between(b, ch.first, ch.last):
        return chain_append_left(ch, b, sb)
    if sb.between(ch.first, ch.last, b):
        return chain_append_right(ch, b, sb)
    result = sort_into_chain(sb, path, ch.events | {b})
    if result.seq.index(ch.first) > result.seq.index(ch.last):
        result = chain_reverse(result)
    return result


def count_chain_orderings(
    sb: SaturatedBetw, X: Iterable[EventId], bound: int = EXHAUSTIVE_BOUND
) -> int:
    """Count the indexings of X that satisfy the chain condition

    For a well-ordered set the answer is 2: a chain and its reverse.

    Parameters
    ----------
    sb : SaturatedBetw
        the betweenness relation
    X : Iterable[EventId]
        between 3 and `bound` events
    bound : int, optional
        largest set enumerated, by default EXHAUSTIVE_BOUND

    Returns
    -------
    int
        the number of permutations of X passing `is_chain`

    Raises
    ------
    ChainError
        if X is smaller than 3 or larger than the bound
    """
    events = sorted(set(X))
    if len(events) < 3:
        raise ChainError(f"need at least three events to count orderings, got {len(events)}")
    if len(events) > bound:
        raise ChainError(f"{len(events)} events exceed the exhaustive bound {bound}")
    return sum(
        1
        for perm in permutations(events)
        if all(sb.between(x, y, z) for x, y, z in combinations(perm, 3))
    )
