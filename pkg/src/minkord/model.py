"""The exact-rational 1+1 Minkowski model

Points are (t, x) pairs of `Fraction`s and paths are timelike lines. Two events
can share a path exactly when their separation is strictly timelike, so
lightlike separation counts as unreachable.
"""
from __future__ import annotations
from copy import deepcopy
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
import logging
import random
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

from minkord.structure import BetwTriple, EventId, Path, Structure
from minkord.utils import (
    format_rational,
    is_strictly_between,
    iter_records,
    parse_rational,
    read_document,
)


logger = logging.getLogger(__name__)

Coords = Tuple[Fraction, Fraction]

# resample budget for degenerate random configurations
RETRY_BUDGET = 1000


class ModelError(ValueError):
    """Raised for degenerate model configurations and malformed coordinate files"""


@dataclass(frozen=True)
class ModelPoint:
    """An event of the model with exact coordinates"""

    t: Fraction
    x: Fraction
    id: EventId

    @property
    def coords(self) -> Coords:
        return (self.t, self.x)


def interval_sq(p: ModelPoint, q: ModelPoint) -> Fraction:
    """the quadratic form (dt)^2 - (dx)^2; positive exactly when p, q share a path"""
    dt, dx = q.t - p.t, q.x - p.x
    return dt * dt - dx * dx


@dataclass(frozen=True)
class ModelLine:
    """A timelike line base + lambda * direction

    Attributes
    ----------
    name : str
        the path name the line is exported under
    base : Coords
        a point of the line
    direction : Coords
        (vt, vx) with vt > 0 and vt^2 > vx^2
    """

    name: str
    base: Coords
    direction: Coords

    def __post_init__(self) -> None:
        base = tuple(Fraction(v) for v in self.base)
        direction = tuple(Fraction(v) for v in self.direction)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "direction", direction)
        vt, vx = direction
        if vt <= 0 or vt * vt <= vx * vx:
            raise ModelError(
                f'line "{self.name}" has direction ({vt}, {vx}), which is not timelike'
            )

    @classmethod
    def through(cls, name: str, p: ModelPoint, q: ModelPoint) -> ModelLine:
        """the line through two timelike separated points"""
        dt, dx = q.t - p.t, q.x - p.x
        if dt < 0:
            dt, dx = -dt, -dx
        if dt * dt <= dx * dx:
            raise ModelError(f"{p.id} and {q.id} are not timelike separated")
        return cls(name, p.coords, (dt, dx))

    @property
    def slope(self) -> Fraction:
        """speed dx/dt, strictly inside (-1, 1)"""
        return self.direction[1] / self.direction[0]

    def at(self, lam: Fraction) -> Coords:
        (t0, x0), (vt, vx) = self.base, self.direction
        return (t0 + lam * vt, x0 + lam * vx)

    def contains(self, p: Union[ModelPoint, Coords]) -> bool:
        t, x = p.coords if isinstance(p, ModelPoint) else p
        (t0, x0), (vt, vx) = self.base, self.direction
        return (t - t0) * vx - (x - x0) * vt == 0

    def param(self, p: Union[ModelPoint, Coords]) -> Fraction:
        """the lambda of a point on the line"""
        t, _ = p.coords if isinstance(p, ModelPoint) else p
        return (t - self.base[0]) / self.direction[0]

    def intersect(self, other: ModelLine) -> Optional[Coords]:
        """The meeting point of two lines, by Cramer's rule

        Returns
        -------
        Optional[Coords]
            None for parallel (or identical) lines
        """
        (t1, x1), (at, ax) = self.base, self.direction
        (t2, x2), (bt, bx) = other.base, other.direction
        det = bt * ax - at * bx
        if det == 0:
            return None
        lam = (bt * (x2 - x1) - bx * (t2 - t1)) / det
        return self.at(lam)

    def same_line(self, other: ModelLine) -> bool:
        return self.intersect(other) is None and self.contains(other.base)


@dataclass
class ModelSample:
    """A finite window of the model: points, named lines and designated pairs

    Incidence is never stored: a point lies on a line exactly when the exact
    collinearity test says so.
    """

    bound: Fraction = Fraction(10)
    points: Dict[EventId, ModelPoint] = field(default_factory=dict)
    lines: Dict[str, ModelLine] = field(default_factory=dict)
    designated_pairs: List[Tuple[str, EventId]] = field(default_factory=list)
    _by_coords: Dict[Coords, EventId] = field(default_factory=dict, repr=False)
    _next_id: int = field(default=0, repr=False)

    def add_point(self, coords: Coords, id: Optional[EventId] = None) -> ModelPoint:
        """Add a point, or return the existing point at these coordinates

        Raises
        ------
        ModelError
            if the id is taken, or another id already sits at the coordinates
        """
        coords = (Fraction(coords[0]), Fraction(coords[1]))
        if coords in self._by_coords:
            existing = self._by_coords[coords]
            if id is not None and id != existing:
                raise ModelError(
                    f'events "{existing}" and "{id}" share coordinates '
                    f"({format_rational(coords[0])}, {format_rational(coords[1])})"
                )
            return self.points[existing]
        if id is None:
            while f"p{self._next_id}" in self.points:
                self._next_id += 1
            id = f"p{self._next_id}"
        if id in self.points:
            raise ModelError(f'duplicate point id "{id}"')
        point = ModelPoint(coords[0], coords[1], id)
        self.points[id] = point
        self._by_coords[coords] = id
        return point

    def add_line(self, line: ModelLine) -> ModelLine:
        if line.name in self.lines:
            raise ModelError(f'duplicate line name "{line.name}"')
        self.lines[line.name] = line
        return line

    def in_bounds(self, coords: Coords) -> bool:
        return all(abs(v) <= self.bound for v in coords)

    def points_on(self, line: Union[str, ModelLine]) -> List[ModelPoint]:
        """the points of a line, in increasing parameter order"""
        if isinstance(line, str):
            line = self.lines[line]
        on_line = [p for p in self.points.values() if line.contains(p)]
        return sorted(on_line, key=line.param)

    @property
    def incidence(self) -> Dict[str, Tuple[EventId, ...]]:
        return {
            name: tuple(p.id for p in self.points_on(line))
            for name, line in self.lines.items()
        }

    def lines_through(self, *points: ModelPoint) -> List[ModelLine]:
        return [
            line for line in self.lines.values() if all(line.contains(p) for p in points)
        ]

    def joinable(self, p: ModelPoint, q: ModelPoint) -> bool:
        return bool(self.lines_through(p, q))

    def close(self, groups: Optional[Dict[str, Any]] = None) -> int:
        """Add every pairwise line intersection within the bound

        Parameters
        ----------
        groups : Dict[str, Any], optional
            a group key per line name; two lines from different groups are not
            intersected. Lines without a key meet every line.

        Returns
        -------
        int
            the number of new points
        """
        groups = groups or {}
        before = len(self.points)
        for first, second in combinations(sorted(self.lines), 2):
            if first in groups and second in groups and groups[first] != groups[second]:
                continue
            meet = self.lines[first].intersect(self.lines[second])
            if meet is not None and self.in_bounds(meet):
                self.add_point(meet)
        return len(self.points) - before

    def copy(self) -> ModelSample:
        return deepcopy(self)

    def to_structure(self) -> Structure:
        """Export the sample as a structure

        Paths are the per-line point sets (lines with fewer than two points are
        left out) and betweenness is coordinate order along each line, in both
        orientations.
        """
        paths = []
        betw = set()
        for name, line in sorted(self.lines.items()):
            ordered = [p.id for p in self.points_on(line)]
            if len(ordered) < 2:
                continue
            paths.append(Path(name, frozenset(ordered)))
            for a, b, c in combinations(ordered, 3):
                betw.add(BetwTriple(a, b, c))
                betw.add(BetwTriple(c, b, a))
        return Structure(frozenset(self.points), frozenset(paths), frozenset(betw))


def coord_between(line: ModelLine, a: ModelPoint, b: ModelPoint, c: ModelPoint) -> bool:
    """[a b c] in coordinates: all three on the line and b's parameter strictly inside"""
    if not all(line.contains(p) for p in (a, b, c)):
        return False
    return is_strictly_between(line.param(a), line.param(b), line.param(c))


def null_crossings(Q: ModelLine, b: Union[ModelPoint, Coords]) -> Tuple[Fraction, Fraction]:
    """Parameters where Q crosses the two light lines through b

    The unreachable parameters of Q from b form the closed interval between
    them, since interval_sq along a timelike line is a convex quadratic.

    Parameters
    ----------
    Q : ModelLine
        a timelike line
    b : ModelPoint
        a point off Q

    Returns
    -------
    Tuple[Fraction, Fraction]
        the two parameters, lower first

    Raises
    ------
    ModelError
        if b lies on Q
    """
    tb, xb = b.coords if isinstance(b, ModelPoint) else b
    if Q.contains((tb, xb)):
        raise ModelError(f'point ({tb}, {xb}) lies on line "{Q.name}"')
    (t0, x0), (vt, vx) = Q.base, Q.direction
    dt, dx = t0 - tb, x0 - xb
    first = (dx - dt) / (vt - vx)
    second = (-dx - dt) / (vt + vx)
    return (min(first, second), max(first, second))


def oracle_unreachable(ms: ModelSample, Q: Union[str, ModelLine], b: ModelPoint) -> FrozenSet[EventId]:
    """the sampled points p of Q with interval_sq(p, b) <= 0"""
    line = ms.lines[Q] if isinstance(Q, str) else Q
    if line.contains(b):
        raise ModelError(f'point "{b.id}" lies on line "{line.name}"')
    return frozenset(p.id for p in ms.points_on(line) if interval_sq(p, b) <= 0)


def prolong(ms: ModelSample, a: ModelPoint, b: ModelPoint) -> ModelPoint:
    """Extend the segment from a through b by its own length

    Parameters
    ----------
    ms : ModelSample
        the sample, extended in place
    a, b : ModelPoint
        distinct points on a common sample line

    Returns
    -------
    ModelPoint
        c = b + (b - a), so that [a b c] holds

    Raises
    ------
    ModelError
        if a equals b or no sample line contains both
    """
    if a.coords == b.coords:
        raise ModelError(f"cannot prolong from {a.id} to itself")
    if not ms.lines_through(a, b):
        raise ModelError(f"{a.id} and {b.id} are not collinear")
    return ms.add_point((2 * b.t - a.t, 2 * b.x - a.x))


def prolong_n(ms: ModelSample, a: ModelPoint, b: ModelPoint, n: int) -> List[ModelPoint]:
    """prolong n times, each step from the last two points"""
    made = []
    for _ in range(n):
        c = prolong(ms, a, b)
        made.append(c)
        a, b = b, c
    return made


@dataclass(frozen=True)
class GeneratorConfig:
    """Settings for `generate_sample`

    Attributes
    ----------
    lines : int
        number of base lines, at least 2
    seed : int
        seed of the private random generator
    bound : Fraction
        coordinate window for intersection events
    witnesses_per_pair : int
        interior and exterior points added around each unreachable interval
    pairs : int
        number of designated (line, off-line event) pairs on the first line
    slopes : Tuple[Fraction, ...], optional
        explicit base line speeds, one per line
    """

    lines: int
    seed: int = 0
    bound: Fraction = Fraction(10)
    witnesses_per_pair: int = 2
    pairs: int = 1
    slopes: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "bound", Fraction(self.bound))
        if self.lines < 2:
            raise ModelError(f"need at least two lines, got {self.lines}")
        if self.bound <= 0:
            raise ModelError(f"bound must be positive, got {self.bound}")
        if self.witnesses_per_pair < 1:
            raise ModelError("witnesses_per_pair must be at least 1")
        if self.pairs < 0:
            raise ModelError("pairs must not be negative")
        if self.slopes is not None:
            slopes = tuple(Fraction(v) for v in self.slopes)
            object.__setattr__(self, "slopes", slopes)
            if len(slopes) != self.lines:
                raise ModelError(f"{len(slopes)} slopes given for {self.lines} lines")
            if len(set(slopes)) != len(slopes):
                raise ModelError("parallel slopes requested")
            for v in slopes:
                if abs(v) >= 1:
                    raise ModelError(f"slope {v} is not timelike")


def _random_slopes(rng: random.Random, count: int) -> Tuple[Fraction, ...]:
    denominator = 4 * count
    numerators = rng.sample(range(-denominator + 1, denominator), count)
    return tuple(Fraction(k, denominator) for k in numerators)


def _grid_value(rng: random.Random, extent: Fraction) -> Fraction:
    return extent * Fraction(rng.randint(-16, 16), 16)


def _add_pair_witnesses(ms: ModelSample, Q: ModelLine, b: ModelPoint, k: int) -> None:
    low, high = null_crossings(Q, b)
    step = (high - low) / (k + 1)
    params = [low, high]
    for i in range(1, k + 1):
        params.extend((low + i * step, low - i * step, high + i * step))
    for lam in params:
        ms.add_point(Q.at(lam))


def _add_connectors(ms: ModelSample, Q: ModelLine, b: ModelPoint) -> List[str]:
    names = []
    for p in ms.points_on(Q):
        if interval_sq(p, b) > 0 and not ms.joinable(p, b):
            name = f"C{sum(1 for n in ms.lines if n.startswith('C'))}"
            names.append(ms.add_line(ModelLine.through(name, b, p)).name)
    return names


def generate_sample(config: GeneratorConfig) -> Tuple[ModelSample, Structure]:
    """Generate a closed finite sample of the model and export it

    Base lines with pairwise distinct speeds pass through (0, x0), each with two
    anchor points. All in-bound intersections are added. The first line `L0` is
    the designated path: for each designated off-line event b, the endpoints of
    the unreachable interval plus `witnesses_per_pair` points inside and on each
    side of it are added, and every reachable point of L0 is joined to b by a
    connector line. Intersections are closed again at the end, except
    between connectors of different designated events.

    Parameters
    ----------
    config : GeneratorConfig
        the generator settings

    Returns
    -------
    Tuple[ModelSample, Structure]
        the sample and its exported structure

    Raises
    ------
    ModelError
        for degenerate configurations
    """
    rng = random.Random(config.seed)
    ms = ModelSample(bound=config.bound)
    slopes = config.slopes if config.slopes is not None else _random_slopes(rng, config.lines)
    quarter = config.bound / 4

    for i, v in enumerate(slopes):
        line = ms.add_line(ModelLine(f"L{i}", (0, _grid_value(rng, quarter)), (1, v)))
        ms.add_point(line.at(-quarter))
        ms.add_point(line.at(quarter))
    ms.close()

    Q = ms.lines["L0"]
    candidates = sorted(p.id for p in ms.points.values() if not Q.contains(p))
    if len(candidates) < config.pairs:
        raise ModelError(f"only {len(candidates)} off-line events for {config.pairs} pair(s)")
    chosen = rng.sample(candidates, config.pairs)
    for b_id in chosen:
        _add_pair_witnesses(ms, Q, ms.points[b_id], config.witnesses_per_pair)
    owners: Dict[str, EventId] = {}
    for b_id in chosen:
        for name in _add_connectors(ms, Q, ms.points[b_id]):
            owners[name] = b_id
        ms.designated_pairs.append((Q.name, b_id))
    # connectors of different pairs meet only off L0
    added = ms.close(groups=owners)

    structure = ms.to_structure()
    logger.debug(
        "generated %d lines, %d points (%d from the final closure), %d triples",
        len(ms.lines),
        len(ms.points),
        added,
        len(structure.betw),
    )
    return ms, structure


def coord_text(ms: ModelSample) -> str:
    """the coordinate sidecar: one `coord <event> <t> <x>` line per point, by id"""
    return "".join(
        f"coord {p.id} {format_rational(p.t)} {format_rational(p.x)}\n"
        for p in sorted(ms.points.values(), key=lambda p: _id_key(p.id))
    )


def _id_key(event: EventId) -> Tuple[str, int, str]:
    head = event.rstrip("0123456789")
    tail = event[len(head) :]
    return (head, int(tail) if tail else -1, event)


def parse_coords(data: Union[str, TextIO]) -> Dict[EventId, Coords]:
    """Read a coordinate sidecar

    Raises
    ------
    ModelError
        for malformed lines, malformed rationals or duplicate events
    """
    text = read_document(data)
    coords: Dict[EventId, Coords] = {}
    for line_no, tokens in iter_records(text):
        if tokens[0] != "coord" or len(tokens) != 4:
            raise ModelError(f'line {line_no}: expected "coord <event> <t> <x>"')
        event = tokens[1]
        if event in coords:
            raise ModelError(f'line {line_no}: duplicate event "{event}"')
        try:
            coords[event] = (parse_rational(tokens[2]), parse_rational(tokens[3]))
        except ValueError as err:
            raise ModelError(f"line {line_no}: {err}") from None
    return coords


def pairs_text(pairs: Iterable[Tuple[str, EventId]]) -> str:
    return "".join(f"pair {name} {event}\n" for name, event in pairs)


def sample_from_structure(
    s: Structure,
    coords: Dict[EventId, Coords],
    pairs: Sequence[Tuple[str, EventId]] = (),
    bound: Optional[Any] = None,
) -> ModelSample:
    """Rebuild a model sample from an exported structure and its coordinates

    Parameters
    ----------
    s : Structure
        the structure written by `gen`
    coords : Dict[EventId, Coords]
        coordinates of every event
    pairs : Sequence[Tuple[str, EventId]], optional
        designated pairs
    bound : optional
        coordinate window, by default the largest absolute coordinate

    Returns
    -------
    ModelSample
        the sample with one line per path

    Raises
    ------
    ModelError
        if an event has no coordinates, two events share coordinates, or a
        path is not a timelike line
    """
    missing = sorted(s.events - set(coords))
    if missing:
        raise ModelError(f'no coordinates for event "{missing[0]}"')
    if bound is None:
        bound = max((abs(v) for c in coords.values() for v in c), default=Fraction(1))
    ms = ModelSample(bound=Fraction(bound))
    for event in sorted(s.events, key=_id_key):
        ms.add_point(coords[event], id=event)
    for path in sorted(s.paths, key=lambda p: p.name):
        first, second = (ms.points[e] for e in sorted(path.members, key=_id_key)[:2])
        line = ms.add_line(ModelLine.through(path.name, first, second))
        for event in path.members:
            if not line.contains(ms.points[event]):
                raise ModelError(f'event "{event}" is off the line of path "{path.name}"')
    ms.designated_pairs.extend(tuple(pair) for pair in pairs)
    return ms
