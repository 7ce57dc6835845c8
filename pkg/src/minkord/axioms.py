"""Per-axiom verification of structures with witness-carrying reports

Universally quantified axioms (O2-O5, I3) are decided exactly by enumeration.
Axioms with an existential conclusion (O1, O6, I1, I2, I5, I6, I7) search for a
witness inside the structure; what a missing witness means depends on the mode.
"""
from __future__ import annotations
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from importlib.resources import files
from itertools import combinations, permutations
import json
import logging
import time
from typing import (
    Callable,
    DefaultDict,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Set,
    TextIO,
    Tuple,
    Union,
)

from minkord.chains import EXHAUSTIVE_BOUND, ChainError, is_consecutive_chain, sort_into_chain
from minkord.order import OrderingError, SaturatedBetw, literal_betweenness, saturate
from minkord.structure import (
    EventId,
    Path,
    Structure,
    StructureError,
    kinematic_triangles,
    parse_structure,
    shared_event_pairs,
)
from minkord.utils import iter_records, read_document


logger = logging.getLogger(__name__)

# nodes visited by the O6 search for a chain [a .. f .. b] before giving up
CHAIN_SEARCH_BUDGET = 10_000

Witness = Tuple[str, ...]
DesignatedPair = Tuple[str, EventId]


class AxiomId(Enum):
    O1 = "O1"
    O2 = "O2"
    O3 = "O3"
    O4 = "O4"
    O5 = "O5"
    O6 = "O6"
    I1 = "I1"
    I2 = "I2"
    I3 = "I3"
    I5 = "I5"
    I6 = "I6"
    I7 = "I7"

    @classmethod
    def parse(cls, text: str) -> AxiomId:
        try:
            return cls(text.strip())
        except ValueError:
            raise ValueError(f'unknown axiom "{text.strip()}"') from None


EXISTENTIAL = frozenset(
    {AxiomId.O1, AxiomId.O6, AxiomId.I1, AxiomId.I2, AxiomId.I5, AxiomId.I6, AxiomId.I7}
)
PAIR_AXIOMS = frozenset({AxiomId.I5, AxiomId.I6, AxiomId.I7})


class Verdict(Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


class Mode(Enum):
    # the structure is the whole model: a missing witness is a violation
    WHOLE_UNIVERSE = "whole-universe"
    # the structure is a finite window of an infinite model
    SAMPLED = "sampled"


class PairError(ValueError):
    """Raised for designated (path, event) pairs that are malformed or invalid"""


@dataclass(frozen=True)
class AxiomResult:
    """The verdict for one axiom

    Attributes
    ----------
    axiom : AxiomId
        the axiom checked
    verdict : Verdict
        PASS, FAIL or INCONCLUSIVE
    witnesses : Tuple[Witness, ...]
        violations for FAIL, unresolved instances for INCONCLUSIVE
    mode : Mode
        the checking mode
    """

    axiom: AxiomId
    verdict: Verdict
    witnesses: Tuple[Witness, ...] = ()
    mode: Mode = Mode.WHOLE_UNIVERSE

    def as_record(self) -> Dict[str, object]:
        return {
            "axiom": self.axiom.value,
            "verdict": self.verdict.value,
            "witnesses": [list(witness) for witness in self.witnesses],
            "mode": self.mode.value,
        }


@dataclass(frozen=True)
class CheckReport:
    """Per-axiom results of `check_all`, in AxiomId order"""

    mode: Mode
    results: Tuple[AxiomResult, ...]
    designated_pairs: Tuple[DesignatedPair, ...] = ()

    def __getitem__(self, axiom: AxiomId) -> AxiomResult:
        for result in self.results:
            if result.axiom is axiom:
                return result
        raise KeyError(axiom.value)

    def __iter__(self) -> Iterator[AxiomResult]:
        return iter(self.results)

    @property
    def failed(self) -> Tuple[AxiomId, ...]:
        return tuple(r.axiom for r in self.results if r.verdict is Verdict.FAIL)

    @property
    def exit_code(self) -> int:
        """0 when nothing failed, 1 otherwise"""
        return 1 if self.failed else 0

    def to_json(self) -> str:
        return json.dumps([result.as_record() for result in self.results], indent=2)


@dataclass(frozen=True)
class UnreachableSet:
    """The events of a path joined to an external event by no path

    Attributes
    ----------
    path : str
        the path name
    from_event : EventId
        the external event
    members : FrozenSet[EventId]
        the unreachable events of the path
    """

    path: str
    from_event: EventId
    members: FrozenSet[EventId] = field(default_factory=frozenset)

    def __contains__(self, event: object) -> bool:
        return event in self.members

    def __len__(self) -> int:
        return len(self.members)


def unreachable_from(s: Structure, Q: Path, b: EventId) -> UnreachableSet:
    """Compute the unreachable subset of a path from an external event

    Parameters
    ----------
    s : Structure
        the structure
    Q : Path
        the path
    b : EventId
        an event of s that is not on Q

    Returns
    -------
    UnreachableSet
        {x in Q : no path of s contains both b and x}

    Raises
    ------
    StructureError
        if b is unknown or lies on Q
    """
    s.require_event(b)
    if b in Q.members:
        raise StructureError(f'event "{b}" lies on path "{Q.name}"')
    members = frozenset(x for x in Q.members if not s.joinable(b, x))
    return UnreachableSet(Q.name, b, members)


def unreachable_via(
    s: Structure, Q: Path, Qa: EventId, R: Path, x: EventId, sb: SaturatedBetw
) -> FrozenSet[EventId]:
    """Compute the unreachable subset of Q from Qa via R

    Qy belongs to it when [x Qy Qa] holds and some event Rw of R (off Q) has both
    Qa and Qy in its unreachable subset of Q.

    Parameters
    ----------
    s : Structure
        the structure
    Q, R : Path
        distinct paths meeting at x
    Qa : EventId
        an event of Q
    x : EventId
        the meeting event of Q and R
    sb : SaturatedBetw
        the betweenness relation

    Returns
    -------
    FrozenSet[EventId]
        the events Qy of Q satisfying the condition

    Raises
    ------
    StructureError
        if Q equals R, x is not a meeting point or Qa is off Q
    """
    if Q.name == R.name:
        raise StructureError(f'unreachable_via needs two distinct paths, got "{Q.name}" twice')
    if x not in Q.members or x not in R.members:
        raise StructureError(f'event "{x}" is not a meeting point of "{Q.name}" and "{R.name}"')
    if Qa not in Q.members:
        raise StructureError(f'event "{Qa}" is not on path "{Q.name}"')

    unreachable = [unreachable_from(s, Q, w).members for w in sorted(R.members - Q.members)]
    unreachable = [members for members in unreachable if Qa in members]
    return frozenset(
        y
        for y in Q.members
        if sb.between(x, y, Qa) and any(y in members for members in unreachable)
    )


def parse_pairs(data: Union[str, TextIO], s: Structure) -> List[DesignatedPair]:
    """Parse a designated pairs document, lines `pair <path-name> <event-name>`

    Parameters
    ----------
    data : Union[str, TextIO]
        the document text or a text stream
    s : Structure
        the structure the pairs refer to

    Returns
    -------
    List[DesignatedPair]
        the (path name, event) pairs in file order

    Raises
    ------
    PairError
        for malformed lines, unknown paths or events, and events on their path
    """
    text = read_document(data)
    pairs: List[DesignatedPair] = []
    for line_no, tokens in iter_records(text):
        if tokens[0] != "pair" or len(tokens) != 3:
            raise PairError(f'line {line_no}: expected "pair <path> <event>"')
        try:
            pairs.append(validate_pair(s, (tokens[1], tokens[2])))
        except PairError as err:
            raise PairError(f"line {line_no}: {err}") from None
    return pairs


def validate_pair(s: Structure, pair: Sequence[str]) -> DesignatedPair:
    """check that a designated pair names a path and an event off that path"""
    if len(pair) != 2:
        raise PairError(f"malformed designated pair {tuple(pair)}")
    name, event = pair
    if name not in s.path_map:
        raise PairError(f'unknown path "{name}"')
    if event not in s.events:
        raise PairError(f'unknown event "{event}"')
    if event in s.path_map[name].members:
        raise PairError(f'event "{event}" lies on path "{name}"')
    return name, event


# universal axioms


def _check_o2(s: Structure, rel: SaturatedBetw) -> List[Witness]:
    return [tuple(t) for t in sorted(rel.triples) if t.reverse() not in rel]


def _check_o3(s: Structure, rel: SaturatedBetw) -> List[Witness]:
    return [tuple(t) for t in sorted(rel.triples) if not t.is_distinct()]


def _check_o4(s: Structure, rel: SaturatedBetw) -> List[Witness]:
    by_prefix: DefaultDict[Tuple[EventId, EventId], Set[EventId]] = defaultdict(set)
    for a, b, c in rel.triples:
        by_prefix[(a, b)].add(c)
    witnesses = []
    for a, b, c in sorted(rel.triples):
        for d in sorted(by_prefix[(b, c)]):
            if len({a, b, c, d}) == 4 and not rel.between(a, b, d):
                witnesses.append((a, b, c, d))
    return witnesses


def _check_o5(s: Structure, rel: SaturatedBetw) -> List[Witness]:
    witnesses: Set[Witness] = set()
    for path in s.paths:
        for trio in combinations(sorted(path.members), 3):
            if not rel.orderings(*trio):
                witnesses.add(trio)
    return sorted(witnesses)


def _check_i3(s: Structure, rel: SaturatedBetw) -> List[Witness]:
    return [
        (first.name, second.name, x, y)
        for first, second, common in shared_event_pairs(s)
        for x, y in combinations(sorted(common), 2)
    ]


# existential axioms


def _check_o1(s: Structure, rel: SaturatedBetw) -> List[Witness]:
    return [tuple(t) for t in sorted(rel.triples) if not s.paths_through(*set(t))]


def _check_i1(s: Structure, rel: SaturatedBetw) -> List[Witness]:
    return [] if s.events else [()]


def _check_i2(s: Structure, rel: SaturatedBetw) -> List[Witness]:
    # events whose paths meet some path through the event
    reach: Dict[EventId, Set[str]] = {}
    for event in s.events:
        names: Set[str] = set()
        for path in s.paths_through(event):
            names.update(
                other.name for other in s.paths if other.members & path.members
            )
        reach[event] = names
    witnesses = []
    for a, b in combinations(sorted(s.events), 2):
        through_b = {path.name for path in s.paths_through(b)}
        if not reach[a] & through_b:
            witnesses.append((a, b))
    return witnesses


def _find_chain(
    rel: SaturatedBetw, members: FrozenSet[EventId], a: EventId, f: EventId, b: EventId
) -> bool:
    # depth-first search for a consecutive-triple chain a .. f .. b on the path
    budget = CHAIN_SEARCH_BUDGET
    stack: List[Tuple[EventId, ...]] = [(a,)]
    while stack:
        seq = stack.pop()
        budget -= 1
        if budget < 0:
            logger.info("chain search for [%s .. %s .. %s] exhausted its budget", a, f, b)
            return False
        for x in sorted(members - set(seq)):
            if len(seq) >= 2 and not rel.between(seq[-2], seq[-1], x):
                continue
            if x == b:
                if f in seq[1:] and is_consecutive_chain(rel, seq + (b,)):
                    return True
                continue
            stack.append(seq + (x,))
    return False


def _check_o6(s: Structure, rel: SaturatedBetw) -> List[Witness]:
    witnesses = []
    for tri in kinematic_triangles(s):
        Q, R, S = s.path(tri.q), s.path(tri.r), s.path(tri.s)
        a, b, c = tri.a, tri.b, tri.c
        for d in sorted(S.members):
            if not rel.between(b, c, d):
                continue
            for e in sorted(R.members):
                if e == d or not rel.between(c, e, a):
                    continue
                for T in s.paths_through(d, e):
                    candidates = sorted(T.members & Q.members)
                    if not any(
                        rel.between(a, f, b) or _find_chain(rel, Q.members, a, f, b)
                        for f in candidates
                    ):
                        witnesses.append((Q.name, R.name, S.name, a, b, c, d, e, T.name))
    return witnesses


def _pair_instances(
    s: Structure, mode: Mode, designated_pairs: Sequence[DesignatedPair]
) -> List[DesignatedPair]:
    if mode is Mode.SAMPLED:
        return [validate_pair(s, pair) for pair in designated_pairs]
    return [
        (path.name, event)
        for path in sorted(s.paths, key=lambda p: p.name)
        for event in sorted(s.events - path.members)
    ]


def _i5_fails(s: Structure, rel: SaturatedBetw, pair: DesignatedPair) -> List[Witness]:
    Q = s.path(pair[0])
    return [pair] if len(unreachable_from(s, Q, pair[1])) < 2 else []


def _unreachable_gaps_closed(
    rel: SaturatedBetw, Q: Path, U: FrozenSet[EventId], seq: Sequence[EventId]
) -> bool:
    # condition (ii): every event between consecutive chain events is unreachable
    return all(
        y in U
        for left, right in zip(seq, seq[1:])
        for y in Q.members
        if rel.between(left, y, right)
    )


def _i6_fails(s: Structure, rel: SaturatedBetw, pair: DesignatedPair) -> List[Witness]:
    Q = s.path(pair[0])
    U = unreachable_from(s, Q, pair[1]).members
    witnesses = []
    for qx, qz in combinations(sorted(U), 2):
        if _unreachable_gaps_closed(rel, Q, U, (qx, qz)):
            continue
        inner = {y for y in U if rel.between(qx, y, qz)} | {qx, qz}
        try:
            seq = sort_into_chain(rel, Q, inner).seq
        except (OrderingError, ChainError):
            seq = ()
        if seq and seq[0] == qz:
            seq = seq[::-1]
        if seq and seq[0] == qx and seq[-1] == qz and _unreachable_gaps_closed(rel, Q, U, seq):
            continue
        witnesses.append((pair[0], pair[1], qx, qz))
    return witnesses


def _i7_fails(s: Structure, rel: SaturatedBetw, pair: DesignatedPair) -> List[Witness]:
    Q = s.path(pair[0])
    U = unreachable_from(s, Q, pair[1]).members
    reachable = sorted(Q.members - U)
    return [
        (pair[0], pair[1], qx, qy)
        for qx in reachable
        for qy in sorted(U)
        if not any(qn != qx and rel.between(qx, qy, qn) for qn in reachable)
    ]


CHECKS: Dict[AxiomId, Callable[[Structure, SaturatedBetw], List[Witness]]] = {
    AxiomId.O1: _check_o1,
    AxiomId.O2: _check_o2,
    AxiomId.O3: _check_o3,
    AxiomId.O4: _check_o4,
    AxiomId.O5: _check_o5,
    AxiomId.O6: _check_o6,
    AxiomId.I1: _check_i1,
    AxiomId.I2: _check_i2,
    AxiomId.I3: _check_i3,
}

PAIR_CHECKS = {AxiomId.I5: _i5_fails, AxiomId.I6: _i6_fails, AxiomId.I7: _i7_fails}


def check_axiom(
    s: Structure,
    sb: SaturatedBetw,
    ax: AxiomId,
    mode: Mode = Mode.WHOLE_UNIVERSE,
    designated_pairs: Sequence[DesignatedPair] = (),
) -> AxiomResult:
    """Check one axiom against a structure

    Parameters
    ----------
    s : Structure
        the structure under test
    sb : SaturatedBetw
        the betweenness relation the order axioms see, literal or saturated
    ax : AxiomId
        the axiom
    mode : Mode, optional
        whole-universe (default) or sampled
    designated_pairs : Sequence[DesignatedPair], optional
        (path name, event) pairs to which I5-I7 are restricted in sampled mode

    Returns
    -------
    AxiomResult
        the verdict with its witnesses

    Raises
    ------
    PairError
        for a malformed designated pair
    """
    if ax in PAIR_AXIOMS:
        if mode is Mode.SAMPLED and not designated_pairs:
            logger.warning("%s: sampled mode without designated pairs", ax.value)
            return AxiomResult(ax, Verdict.INCONCLUSIVE, (), mode)
        witnesses: List[Witness] = []
        for pair in _pair_instances(s, mode, designated_pairs):
            witnesses.extend(PAIR_CHECKS[ax](s, sb, pair))
        # a designated pair has been witnessed by construction, so failures count
        verdict = Verdict.FAIL if witnesses else Verdict.PASS
        return AxiomResult(ax, verdict, tuple(witnesses), mode)

    witnesses = CHECKS[ax](s, sb)
    if not witnesses:
        return AxiomResult(ax, Verdict.PASS, (), mode)
    if ax in EXISTENTIAL and mode is Mode.SAMPLED:
        return AxiomResult(ax, Verdict.INCONCLUSIVE, tuple(witnesses), mode)
    return AxiomResult(ax, Verdict.FAIL, tuple(witnesses), mode)


def check_all(
    s: Structure,
    mode: Mode = Mode.WHOLE_UNIVERSE,
    designated_pairs: Sequence[DesignatedPair] = (),
    saturate_relation: bool = False,
    axioms: Optional[Iterable[AxiomId]] = None,
) -> CheckReport:
    """Check every axiom (or a selection) and collect a report

    Parameters
    ----------
    s : Structure
        the structure under test
    mode : Mode, optional
        whole-universe (default) or sampled
    designated_pairs : Sequence[DesignatedPair], optional
        pairs for I5-I7 in sampled mode
    saturate_relation : bool, optional
        give the order axioms the saturated relation instead of the literal one,
        by default False
    axioms : Iterable[AxiomId], optional
        restrict the check to these axioms

    Returns
    -------
    CheckReport
        results in AxiomId order
    """
    pairs = tuple(validate_pair(s, pair) for pair in designated_pairs)
    rel = saturate(s) if saturate_relation else literal_betweenness(s)
    selected = set(axioms) if axioms is not None else set(AxiomId)
    results = []
    for ax in AxiomId:
        if ax not in selected:
            continue
        start = time.perf_counter()
        results.append(check_axiom(s, rel, ax, mode, pairs))
        logger.debug("%s checked in %.3fs", ax.value, time.perf_counter() - start)
    return CheckReport(mode=mode, results=tuple(results), designated_pairs=pairs)


def replay_witness(
    s: Structure, rel: SaturatedBetw, axiom: AxiomId, witness: Sequence[str]
) -> bool:
    """Confirm a FAIL witness against the axiom's definition by brute force

    The evaluator shares no search code with the checker: it re-reads the axiom
    instance named by the witness and enumerates everything the axiom quantifies
    over.

    Parameters
    ----------
    s : Structure
        the structure
    rel : SaturatedBetw
        the relation the witness was found in
    axiom : AxiomId
        the failed axiom
    witness : Sequence[str]
        the witness tuple, in the checker's layout

    Returns
    -------
    bool
        True when the witness is a genuine violation

    Raises
    ------
    ChainError
        if an I6 witness involves too many unreachable events to enumerate
    """
    w = tuple(witness)
    holds = rel.between

    def some_path(*events: str) -> bool:
        return any(all(e in path.members for e in events) for path in s.paths)

    def unreachable(path: Path, b: str) -> Set[str]:
        return {x for x in path.members if not some_path(b, x)}

    if axiom is AxiomId.O1:
        return holds(*w) and not some_path(*w)
    if axiom is AxiomId.O2:
        return holds(*w) and not holds(w[2], w[1], w[0])
    if axiom is AxiomId.O3:
        return holds(*w) and len(set(w)) < 3
    if axiom is AxiomId.O4:
        a, b, c, d = w
        return len(set(w)) == 4 and holds(a, b, c) and holds(b, c, d) and not holds(a, b, d)
    if axiom is AxiomId.O5:
        return (
            len(set(w)) == 3
            and some_path(*w)
            and not any(holds(*p) for p in permutations(w))
        )
    if axiom is AxiomId.I1:
        return w == () and not s.events
    if axiom is AxiomId.I2:
        a, b = w
        return a != b and not any(
            a in R.members and b in S.members and R.members & S.members
            for R in s.paths
            for S in s.paths
        )
    if axiom is AxiomId.I3:
        q, r, x, y = w
        Q, R = s.path(q), s.path(r)
        return q != r and x != y and {x, y} <= Q.members & R.members
    if axiom is AxiomId.O6:
        q, r, sp, a, b, c, d, e, t = w
        Q, R, S, T = s.path(q), s.path(r), s.path(sp), s.path(t)
        configured = (
            len({q, r, sp}) == 3
            and a in Q.members & R.members
            and b in Q.members & S.members
            and c in R.members & S.members
            and d in S.members
            and holds(b, c, d)
            and e in R.members
            and holds(c, e, a)
            and {d, e} <= T.members
        )
        if not configured:
            return False
        for f in T.members & Q.members:
            rest = sorted(Q.members - {a, f, b})
            if len(rest) > EXHAUSTIVE_BOUND:
                raise ChainError(f"{len(rest)} path events exceed the replay bound")
            for size in range(len(rest) + 1):
                for extra in permutations(rest, size):
                    for cut in range(size + 1):
                        seq = (a, *extra[:cut], f, *extra[cut:], b)
                        if f not in (a, b) and all(
                            holds(*seq[i - 2 : i + 1]) for i in range(2, len(seq))
                        ):
                            return False
        return True

    q, b = w[0], w[1]
    Q = s.path(q)
    if b in Q.members:
        return False
    U = unreachable(Q, b)
    if axiom is AxiomId.I5:
        return len(U) < 2
    if axiom is AxiomId.I6:
        qx, qz = w[2], w[3]
        if not {qx, qz} <= U or qx == qz:
            return False
        inner = sorted(U - {qx, qz})
        if len(inner) > EXHAUSTIVE_BOUND:
            raise ChainError(f"{len(inner)} unreachable events exceed the replay bound")
        for size in range(len(inner) + 1):
            for extra in permutations(inner, size):
                seq = (qx, *extra, qz)
                if len(seq) > 2 and not all(
                    holds(*seq[i - 2 : i + 1]) for i in range(2, len(seq))
                ):
                    continue
                if all(
                    y in U
                    for i in range(1, len(seq))
                    for y in Q.members
                    if holds(seq[i - 1], y, seq[i])
                ):
                    return False
        return True
    if axiom is AxiomId.I7:
        qx, qy = w[2], w[3]
        reachable = Q.members - U
        return (
            qx in reachable
            and qy in U
            and not any(holds(qx, qy, qn) for qn in reachable if qn != qx)
        )
    raise ValueError(f"no evaluator for axiom {axiom.value}")


# the axioms separated by the bundled independence corpus
DEMO_AXIOMS = (AxiomId.O1, AxiomId.O2, AxiomId.O3, AxiomId.O4, AxiomId.O5, AxiomId.I3)


@dataclass(frozen=True)
class DemoRow:
    """One corpus file: the axiom it is built to violate and what the checker found"""

    name: str
    expected: Optional[AxiomId]
    failed: Tuple[AxiomId, ...]
    witnesses_replayed: bool

    @property
    def matches(self) -> bool:
        expected = () if self.expected is None else (self.expected,)
        return self.failed == expected and self.witnesses_replayed


def _expected_axiom(name: str, text: str) -> Optional[AxiomId]:
    for line in text.splitlines():
        if line.startswith("# expect:"):
            value = line.split(":", 1)[1].strip()
            return None if value == "none" else AxiomId.parse(value)
    raise ValueError(f'corpus file "{name}" has no "# expect:" header')


def corpus_documents() -> List[Tuple[str, str]]:
    """the bundled independence corpus as (file stem, document text), sorted"""
    root = files("minkord") / "corpus"
    documents = [
        (entry.name[: -len(".struct")], entry.read_text(encoding="utf-8"))
        for entry in root.iterdir()
        if entry.name.endswith(".struct")
    ]
    return sorted(documents)


def run_independence_demo() -> List[DemoRow]:
    """Classify every bundled corpus structure against O1-O5 and I3

    Each structure is checked in whole-universe mode against its literal
    relation, and every FAIL witness is replayed.

    Returns
    -------
    List[DemoRow]
        one row per corpus file, sorted by name
    """
    rows = []
    for name, text in corpus_documents():
        s = parse_structure(text)
        report = check_all(s, Mode.WHOLE_UNIVERSE, axioms=DEMO_AXIOMS)
        rel = literal_betweenness(s)
        replayed = all(
            replay_witness(s, rel, result.axiom, witness)
            for result in report
            if result.verdict is Verdict.FAIL
            for witness in result.witnesses
        )
        rows.append(DemoRow(name, _expected_axiom(name, text), report.failed, replayed))
        logger.debug("%s: failed %s", name, [ax.value for ax in report.failed])
    return rows
