"""Betweenness saturation under the order axioms and single-middle consistency"""
from __future__ import annotations
from collections import defaultdict, deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
import logging
from typing import DefaultDict, Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Set, Tuple

from minkord.structure import BetwTriple, EventId, Structure, StructureError


logger = logging.getLogger(__name__)


class Rule(Enum):
    """How a betweenness fact entered the relation"""

    asserted = "asserted"
    # [a b c] |- [c b a]
    O2 = "O2"
    # [a b c], [b c d], a b c d distinct |- [a b d]
    O4 = "O4"
    # [a b c], [a c d] |- [b c d]
    abc_acd_bcd = "L-abc-acd-bcd"


class OrderingError(ValueError):
    """Events cannot be ordered: a 3-set has no ordering (O5) or two different middles

    Attributes
    ----------
    events : Tuple[EventId, ...]
        the events witnessing the failure
    """

    def __init__(self, message: str, events: Iterable[EventId]) -> None:
        self.events = tuple(events)
        super().__init__(message)


@dataclass(frozen=True)
class SaturatedBetw:
    """A betweenness relation ready for queries

    Attributes
    ----------
    triples : FrozenSet[BetwTriple]
        the facts
    provenance : Dict[BetwTriple, Rule]
        the rule that first produced each fact
    events : FrozenSet[EventId]
        the universe the facts range over
    closed : bool
        True when the facts are the least fixpoint of the saturation rules,
        False for the literal relation of a structure
    """

    triples: FrozenSet[BetwTriple]
    provenance: Dict[BetwTriple, Rule] = field(compare=False, hash=False)
    events: FrozenSet[EventId] = frozenset()
    closed: bool = True

    def __contains__(self, triple: object) -> bool:
        return triple in self.triples

    def __len__(self) -> int:
        return len(self.triples)

    @cached_property
    def _by_set(self) -> Dict[FrozenSet[EventId], Tuple[BetwTriple, ...]]:
        index: DefaultDict[FrozenSet[EventId], List[BetwTriple]] = defaultdict(list)
        for triple in self.triples:
            index[frozenset(triple)].append(triple)
        return {key: tuple(sorted(value)) for key, value in index.items()}

    def between(self, a: EventId, b: EventId, c: EventId) -> bool:
        """membership of [a b c], without event validation"""
        return (a, b, c) in self.triples

    def derivation(self, triple: Iterable[EventId]) -> Optional[Rule]:
        return self.provenance.get(BetwTriple(*triple))

    def orderings(self, a: EventId, b: EventId, c: EventId) -> Tuple[BetwTriple, ...]:
        """every fact whose events are exactly {a, b, c}"""
        return self._by_set.get(frozenset((a, b, c)), ())

    def middle(self, a: EventId, b: EventId, c: EventId) -> EventId:
        """The event lying between the other two

        Parameters
        ----------
        a, b, c : EventId
            three distinct events

        Returns
        -------
        EventId
            the middle event of the unique O2-orbit present

        Raises
        ------
        OrderingError
            if no fact orders the three events, or facts from two orbits exist
        """
        middles = {triple.b for triple in self.orderings(a, b, c)}
        events = tuple(sorted((a, b, c)))
        if not middles:
            raise OrderingError(
                f"no ordering of {', '.join(events)} (O5 totality failure)", events
            )
        if len(middles) > 1:
            raise OrderingError(
                f"inconsistent ordering of {', '.join(events)}: middles "
                f"{', '.join(sorted(middles))}",
                events,
            )
        return middles.pop()


def literal_betweenness(s: Structure) -> SaturatedBetw:
    """the asserted relation of a structure, not closed under any rule"""
    return SaturatedBetw(
        triples=s.betw,
        provenance={triple: Rule.asserted for triple in s.betw},
        events=s.events,
        closed=False,
    )


def saturate(s: Structure) -> SaturatedBetw:
    """Close the betweenness relation of a structure under the order rules

    The rules are reversal (O2), the distinct-event transitivity of O4, and the
    lemma [a b c], [a c d] |- [b c d]. Saturation runs a worklist to the least
    fixpoint, which is independent of processing order.

    Parameters
    ----------
    s : Structure
        a valid structure

    Returns
    -------
    SaturatedBetw
        the closed relation with the rule that produced each fact
    """
    provenance: Dict[BetwTriple, Rule] = {}
    # (a, b) -> {c : [a b c]}
    by_prefix: DefaultDict[Tuple[EventId, EventId], Set[EventId]] = defaultdict(set)
    # (b, c) -> {a : [a b c]}
    by_suffix: DefaultDict[Tuple[EventId, EventId], Set[EventId]] = defaultdict(set)
    # (a, c) -> {b : [a b c]}
    by_outer: DefaultDict[Tuple[EventId, EventId], Set[EventId]] = defaultdict(set)
    worklist: deque = deque()

    def add(triple: BetwTriple, rule: Rule) -> None:
        if triple in provenance:
            return
        provenance[triple] = rule
        a, b, c = triple
        by_prefix[(a, b)].add(c)
        by_suffix[(b, c)].add(a)
        by_outer[(a, c)].add(b)
        worklist.append(triple)

    for triple in sorted(s.betw):
        add(triple, Rule.asserted)

    while worklist:
        x, y, z = worklist.popleft()
        add(BetwTriple(z, y, x), Rule.O2)

        # O4 with [x y z] as the first premise: [x y z], [y z d] |- [x y d]
        for d in list(by_prefix[(y, z)]):
            if len({x, y, z, d}) == 4:
                add(BetwTriple(x, y, d), Rule.O4)
        # O4 with [x y z] as the second premise: [a x y], [x y z] |- [a x z]
        for a in list(by_suffix[(x, y)]):
            if len({a, x, y, z}) == 4:
                add(BetwTriple(a, x, z), Rule.O4)

        # lemma with [x y z] as the first premise: [x y z], [x z d] |- [y z d]
        for d in list(by_prefix[(x, z)]):
            add(BetwTriple(y, z, d), Rule.abc_acd_bcd)
        # lemma with [x y z] as the second premise: [x b y], [x y z] |- [b y z]
        for b in list(by_outer[(x, y)]):
            add(BetwTriple(b, y, z), Rule.abc_acd_bcd)

    logger.debug(
        "saturated %d asserted triple(s) to %d", len(s.betw), len(provenance)
    )
    return SaturatedBetw(
        triples=frozenset(provenance),
        provenance=provenance,
        events=s.events,
        closed=True,
    )


class ConsistencyWitness(NamedTuple):
    """A violation found by `check_consistency`: the rule and offending triples"""

    rule: str
    triples: Tuple[BetwTriple, ...]


@dataclass(frozen=True)
class ConsistencyVerdict:
    consistent: bool
    witnesses: Tuple[ConsistencyWitness, ...] = ()


def check_consistency(sb: SaturatedBetw) -> ConsistencyVerdict:
    """Detect O3 and two-middle violations in a relation

    A relation is inconsistent if a triple repeats an event (O3) or if some
    3-set carries facts from two distinct O2-orbits, i.e. two different middle
    events.

    Parameters
    ----------
    sb : SaturatedBetw
        the relation, normally saturated

    Returns
    -------
    ConsistencyVerdict
        consistent exactly when no witness was found
    """
    witnesses: List[ConsistencyWitness] = []
    for triple in sorted(sb.triples):
        if not triple.is_distinct():
            witnesses.append(ConsistencyWitness("O3", (triple,)))

    for key in sorted(sb._by_set, key=sorted):
        if len(key) != 3:
            continue
        by_middle: Dict[EventId, BetwTriple] = {}
        for triple in sb._by_set[key]:
            by_middle.setdefault(triple.b, triple)
        if len(by_middle) > 1:
            first, second = sorted(by_middle.values())[:2]
            witnesses.append(ConsistencyWitness("Thm1", (first, second)))

    return ConsistencyVerdict(consistent=not witnesses, witnesses=tuple(witnesses))


def query_between(sb: SaturatedBetw, a: EventId, b: EventId, c: EventId) -> bool:
    """Whether [a b c] holds in the relation

    Raises
    ------
    StructureError
        if any of the events is unknown
    """
    for event in (a, b, c):
        if event not in sb.events:
            raise StructureError(f'unknown event "{event}"')
    return sb.between(a, b, c)
