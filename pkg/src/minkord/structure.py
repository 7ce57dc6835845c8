"""Finite incidence/order structures: events, paths and literal betweenness"""
from __future__ import annotations
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path as FilePath
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    NamedTuple,
    Optional,
    Set,
    TextIO,
    Tuple,
    Union,
)

from minkord.utils import is_file_reference, is_token, iter_records, read_document


EventId = str


class StructureError(ValueError):
    """Raised for malformed structure documents and invalid structure lookups"""


class CollinearityError(StructureError):
    """Two distinct paths share two or more events (Axiom I3 fails)

    Attributes
    ----------
    paths : Tuple[str, str]
        names of the offending path pair, sorted
    """

    def __init__(self, first: str, second: str, events: Iterable[EventId]) -> None:
        self.paths = tuple(sorted((first, second)))
        self.events = tuple(sorted(events))
        super().__init__(
            f"I3-violation: paths {self.paths[0]} and {self.paths[1]} "
            f"share events {', '.join(self.events)}"
        )


class BetwTriple(NamedTuple):
    """An asserted betweenness fact [a b c], stored exactly as written"""

    a: EventId
    b: EventId
    c: EventId

    def reverse(self) -> BetwTriple:
        return BetwTriple(self.c, self.b, self.a)

    def is_distinct(self) -> bool:
        return len({self.a, self.b, self.c}) == 3


@dataclass(frozen=True)
class Path:
    """A path: a named, unordered set of at least two events

    Attributes
    ----------
    name : str
        the path name
    members : FrozenSet[EventId]
        the events on the path
    """

    name: str
    members: FrozenSet[EventId]

    def __post_init__(self) -> None:
        if not is_token(self.name):
            raise StructureError(f'malformed token "{self.name}"')
        object.__setattr__(self, "members", frozenset(self.members))
        if len(self.members) < 2:
            raise StructureError(
                f'path "{self.name}" has {len(self.members)} member(s), needs at least 2'
            )

    def __contains__(self, event: object) -> bool:
        return event in self.members

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Structure:
    """An immutable finite structure (events, paths, betweenness)

    Equality is set equality of the three components, so the order in which a
    document declared things never matters.

    Attributes
    ----------
    events : FrozenSet[EventId]
        all declared events
    paths : FrozenSet[Path]
        the paths, with unique names
    betw : FrozenSet[BetwTriple]
        the literal betweenness triples, not closed under any rule
    """

    events: FrozenSet[EventId] = frozenset()
    paths: FrozenSet[Path] = frozenset()
    betw: FrozenSet[BetwTriple] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", frozenset(self.events))
        object.__setattr__(self, "paths", frozenset(self.paths))
        object.__setattr__(
            self, "betw", frozenset(BetwTriple(*triple) for triple in self.betw)
        )
        for event in self.events:
            if not is_token(event):
                raise StructureError(f'malformed token "{event}"')
        names: Set[str] = set()
        for path in self.paths:
            if path.name in names:
                raise StructureError(f'duplicate path name "{path.name}"')
            names.add(path.name)
            for event in sorted(path.members):
                if event not in self.events:
                    raise StructureError(
                        f'undeclared event "{event}" on path "{path.name}"'
                    )
        for triple in self.betw:
            for event in triple:
                if event not in self.events:
                    raise StructureError(f'undeclared event "{event}" in betweenness')

    @cached_property
    def path_map(self) -> Dict[str, Path]:
        return {path.name: path for path in self.paths}

    @cached_property
    def _paths_of_event(self) -> Dict[EventId, Tuple[Path, ...]]:
        index: Dict[EventId, List[Path]] = {event: [] for event in self.events}
        for path in sorted(self.paths, key=lambda p: p.name):
            for event in path.members:
                index[event].append(path)
        return {event: tuple(paths) for event, paths in index.items()}

    def path(self, name: str) -> Path:
        """Look up a path by name

        Raises
        ------
        StructureError
            if no path has this name
        """
        try:
            return self.path_map[name]
        except KeyError:
            raise StructureError(f'unknown path "{name}"') from None

    def require_event(self, event: EventId) -> EventId:
        if event not in self.events:
            raise StructureError(f'unknown event "{event}"')
        return event

    def paths_through(self, *events: EventId) -> Tuple[Path, ...]:
        """All paths containing every given event, sorted by name"""
        if not events:
            return tuple(sorted(self.paths, key=lambda p: p.name))
        for event in events:
            self.require_event(event)
        first, *rest = events
        return tuple(
            path
            for path in self._paths_of_event[first]
            if all(event in path.members for event in rest)
        )

    def joinable(self, x: EventId, y: EventId) -> bool:
        """whether some path contains both x and y"""
        return bool(self.paths_through(x, y))

    def with_betweenness(self, betw: Iterable[Iterable[EventId]]) -> Structure:
        """the same events and paths, with a replaced betweenness relation"""
        return Structure(self.events, self.paths, frozenset(BetwTriple(*t) for t in betw))


def parse_structure(data: Union[str, TextIO]) -> Structure:
    """Parse a structure document

    The format is line-oriented: `# comment`, blank lines, `event <name>`,
    `path <name> <e1> <e2> [...]` and `betw <a> <b> <c>`. Events must be declared
    before they are referenced.

    Parameters
    ----------
    data : Union[str, TextIO]
        the document text or a text stream

    Returns
    -------
    Structure
        the validated structure

    Raises
    ------
    StructureError
        on malformed tokens, undeclared events, paths with fewer than two
        members, duplicate names or unknown directives
    """
    text = read_document(data)
    events: Set[EventId] = set()
    paths: Dict[str, Path] = {}
    betw: Set[BetwTriple] = set()

    for line_no, tokens in iter_records(text):
        directive, args = tokens[0], tokens[1:]
        for token in args:
            if not is_token(token):
                raise StructureError(f'line {line_no}: malformed token "{token}"')

        if directive == "event":
            if len(args) != 1:
                raise StructureError(
                    f"line {line_no}: event takes exactly one name, got {len(args)}"
                )
            if args[0] in events:
                raise StructureError(f'line {line_no}: duplicate event "{args[0]}"')
            events.add(args[0])
        elif directive == "path":
            if not args:
                raise StructureError(f"line {line_no}: path needs a name")
            name, members = args[0], args[1:]
            if name in paths:
                raise StructureError(f'line {line_no}: duplicate path name "{name}"')
            _require_declared(members, events, line_no)
            try:
                paths[name] = Path(name, frozenset(members))
            except StructureError as err:
                raise StructureError(f"line {line_no}: {err}") from None
        elif directive == "betw":
            if len(args) != 3:
                raise StructureError(
                    f"line {line_no}: betw takes exactly three events, got {len(args)}"
                )
            _require_declared(args, events, line_no)
            betw.add(BetwTriple(*args))
        else:
            raise StructureError(f'line {line_no}: unknown directive "{directive}"')

    return Structure(frozenset(events), frozenset(paths.values()), frozenset(betw))


def _require_declared(names: Iterable[str], events: Set[EventId], line_no: int) -> None:
    for name in names:
        if name not in events:
            raise StructureError(f'line {line_no}: undeclared event "{name}"')


def serialize_structure(s: Structure) -> str:
    """Write the canonical document for a structure

    Events are sorted, then paths by name with sorted members, then sorted
    triples. The empty structure gives the empty document.

    Parameters
    ----------
    s : Structure
        the structure to write

    Returns
    -------
    str
        the canonical document text, parseable by `parse_structure`
    """
    lines = [f"event {event}" for event in sorted(s.events)]
    for path in sorted(s.paths, key=lambda p: p.name):
        lines.append(" ".join(["path", path.name, *sorted(path.members)]))
    lines.extend(f"betw {a} {b} {c}" for a, b, c in sorted(s.betw))
    return "".join(f"{line}\n" for line in lines)


def load_structure(data: Any) -> Structure:
    """Load a structure from a file path, document text or an existing Structure

    Parameters
    ----------
    data : Any
        a `Structure`, a path to a structure file, or document text

    Returns
    -------
    Structure
        the loaded structure

    Raises
    ------
    ValueError
        if the parameter is not one of the accepted kinds
    """
    if isinstance(data, Structure):
        return data
    if is_file_reference(data):
        return parse_structure(FilePath(data).expanduser().read_text(encoding="utf-8"))
    if isinstance(data, str) or hasattr(data, "read"):
        return parse_structure(data)
    raise ValueError("Invalid input for structure argument")


def collinear(s: Structure, evs: Iterable[EventId]) -> Optional[Path]:
    """The unique path containing all of the given events

    Parameters
    ----------
    s : Structure
        the structure to search
    evs : Iterable[EventId]
        at least two declared events

    Returns
    -------
    Optional[Path]
        the path, or None when no path contains all of them

    Raises
    ------
    StructureError
        for unknown events or fewer than two events
    CollinearityError
        if two distinct paths both contain the events
    """
    events = sorted(set(evs))
    if len(events) < 2:
        raise StructureError("collinear needs at least two distinct events")
    candidates = s.paths_through(*events)
    if len(candidates) > 1:
        first, second = candidates[0], candidates[1]
        raise CollinearityError(
            first.name, second.name, first.members & second.members
        )
    return candidates[0] if candidates else None


class KinematicTriangle(NamedTuple):
    """Events a, b, c with a, b on path q; a, c on path r; b, c on path s"""

    a: EventId
    b: EventId
    c: EventId
    q: str
    r: str
    s: str


def kinematic_triangles(s: Structure) -> Iterator[KinematicTriangle]:
    """Enumerate kinematic triangles of a structure

    A kinematic triangle is a triple of distinct events such that each pair lies
    on one of three distinct paths (and the third event is not on that path).
    Every labelling is produced, so O6 can treat the roles of Q, R and S
    individually.

    Parameters
    ----------
    s : Structure
        the structure to search

    Returns
    -------
    Iterator[KinematicTriangle]
        the triangles, in a deterministic order
    """
    paths = sorted(s.paths, key=lambda p: p.name)
    for q in paths:
        for r in paths:
            if r.name == q.name:
                continue
            for a in sorted(q.members & r.members):
                for p_s in paths:
                    if p_s.name in (q.name, r.name):
                        continue
                    for b in sorted(q.members & p_s.members):
                        if b == a or b in r.members:
                            continue
                        for c in sorted(r.members & p_s.members):
                            if c in (a, b) or c in q.members:
                                continue
                            yield KinematicTriangle(a, b, c, q.name, r.name, p_s.name)


def shared_event_pairs(s: Structure) -> Iterator[Tuple[Path, Path, FrozenSet[EventId]]]:
    """Every pair of distinct paths sharing two or more events"""
    for first, second in combinations(sorted(s.paths, key=lambda p: p.name), 2):
        common = first.members & second.members
        if len(common) >= 2:
            yield first, second, common
