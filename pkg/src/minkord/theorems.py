"""Model-level property checks for theorems about paths and unreachable sets

Each check runs on a private copy of the sample, so prolongations and
constructed events never leak into the caller's sample.
"""
from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import logging
import random
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from minkord.axioms import Verdict
from minkord.model import (
    RETRY_BUDGET,
    ModelLine,
    ModelPoint,
    ModelSample,
    coord_between,
    interval_sq,
    null_crossings,
    oracle_unreachable,
    prolong,
)
from minkord.utils import format_rational, is_strictly_between


logger = logging.getLogger(__name__)


class TheoremId(Enum):
    # an unreachable event is bounded by reachable ones
    T4 = "T4"
    # prolongation gives a new event beyond
    T6 = "T6"
    # no path crosses all three sides of a triangle internally
    T8 = "T8"
    # a transversal through one side and beyond another meets the third side
    T3_7 = "T3_7"
    # unreachable sets are connected
    T13 = "T13"
    # two unreachable sets are bounded by common events
    T14i = "T14i"

    @classmethod
    def parse(cls, text: str) -> TheoremId:
        try:
            return cls(text.strip())
        except ValueError:
            raise ValueError(f'unknown theorem "{text.strip()}"') from None


@dataclass(frozen=True)
class TheoremReport:
    """Outcome of one theorem check

    Attributes
    ----------
    thm : TheoremId
        the theorem
    verdict : Verdict
        FAIL with any violation, INCONCLUSIVE when nothing could be checked
    violations : Tuple[Tuple[str, ...], ...]
        one witness per violated instance
    skips : int
        trials given up after RETRY_BUDGET degenerate configurations
    checked : int
        instances actually checked
    """

    thm: TheoremId
    verdict: Verdict
    violations: Tuple[Tuple[str, ...], ...] = ()
    skips: int = 0
    checked: int = 0

    def as_record(self) -> Dict[str, object]:
        return {
            "theorem": self.thm.value,
            "verdict": self.verdict.value,
            "violations": [list(v) for v in self.violations],
            "skips": self.skips,
            "checked": self.checked,
        }


def _fmt(point: Tuple[Fraction, Fraction]) -> str:
    return f"({format_rational(point[0])},{format_rational(point[1])})"


def _pair_points(ms: ModelSample) -> List[Tuple[ModelLine, ModelPoint]]:
    return [(ms.lines[name], ms.points[event]) for name, event in ms.designated_pairs]


def _random_line(rng: random.Random, scale: Fraction, name: str) -> ModelLine:
    base = (scale * Fraction(rng.randint(-32, 32), 32), scale * Fraction(rng.randint(-32, 32), 32))
    return ModelLine(name, base, (1, Fraction(rng.randint(-63, 63), 64)))


def bounding_event(
    ms: ModelSample, Q: ModelLine, b: ModelPoint, a: ModelPoint, x: ModelPoint
) -> Optional[ModelPoint]:
    """Find a reachable event c with [a x c] on Q

    The nearest sampled candidate beyond x is preferred; otherwise the segment
    from a through x is prolonged until it reaches a reachable event.

    Parameters
    ----------
    ms : ModelSample
        the sample, extended in place by prolongation
    Q : ModelLine
        the line of a and x
    b : ModelPoint
        the external event
    a, x : ModelPoint
        a reachable and an unreachable event of Q

    Returns
    -------
    Optional[ModelPoint]
        c, or None if RETRY_BUDGET prolongations did not reach one
    """
    beyond = [
        c
        for c in ms.points_on(Q)
        if interval_sq(c, b) > 0 and coord_between(Q, a, x, c)
    ]
    if beyond:
        return min(beyond, key=lambda c: abs(Q.param(c) - Q.param(x)))
    prev, cur = a, x
    for _ in range(RETRY_BUDGET):
        c = prolong(ms, prev, cur)
        if interval_sq(c, b) > 0:
            return c
        prev, cur = cur, c
    return None


def _check_t4(ms: ModelSample, rng: random.Random, trials: int) -> Tuple[list, int, int]:
    violations, checked = [], 0
    for Q, b in _pair_points(ms):
        unreachable = oracle_unreachable(ms, Q, b)
        on_q = ms.points_on(Q)
        for a in [p for p in on_q if p.id not in unreachable]:
            for x in [p for p in on_q if p.id in unreachable]:
                checked += 1
                c = bounding_event(ms, Q, b, a, x)
                if c is None or not coord_between(Q, a, x, c) or interval_sq(c, b) <= 0:
                    violations.append((Q.name, b.id, a.id, x.id))
    return violations, 0, checked


def _check_t6(ms: ModelSample, rng: random.Random, trials: int) -> Tuple[list, int, int]:
    violations, checked = [], 0
    lines = [line for line in ms.lines.values() if len(ms.points_on(line)) >= 2]
    if not lines:
        return violations, 0, 0
    for _ in range(trials):
        line = rng.choice(sorted(lines, key=lambda l: l.name))
        a, b = rng.sample(ms.points_on(line), 2)
        c = prolong(ms, a, b)
        checked += 1
        if c.id in (a.id, b.id) or not coord_between(line, a, b, c):
            violations.append((line.name, a.id, b.id, c.id))
    return violations, 0, checked


def _retrying(
    attempt: Callable[[], Optional[Tuple[str, ...]]], trials: int, thm: str
) -> Tuple[list, int, int]:
    # attempt returns None for a degenerate configuration, () for a pass and a
    # witness tuple for a violation
    violations, skips, checked = [], 0, 0
    for trial in range(trials):
        for _ in range(RETRY_BUDGET):
            outcome = attempt()
            if outcome is not None:
                checked += 1
                if outcome:
                    violations.append(outcome)
                break
        else:
            skips += 1
            logger.info("%s trial %d skipped after %d degenerate draws", thm, trial, RETRY_BUDGET)
    return violations, skips, checked


def _check_t8(ms: ModelSample, rng: random.Random, trials: int) -> Tuple[list, int, int]:
    def attempt() -> Optional[Tuple[str, ...]]:
        sides = [_random_line(rng, ms.bound, name) for name in ("Q", "R", "S")]
        transversal = _random_line(rng, ms.bound, "T")
        corners = {}
        for i, j in ((0, 1), (0, 2), (1, 2)):
            corners[(i, j)] = sides[i].intersect(sides[j])
            if corners[(i, j)] is None:
                return None
        if len(set(corners.values())) < 3:
            return None
        crossed = 0
        for k, side in enumerate(sides):
            ends = [corner for pair, corner in corners.items() if k in pair]
            meet = transversal.intersect(side)
            if meet is None or meet in ends:
                return None
            lo, hi = sorted(side.param(end) for end in ends)
            if lo < side.param(meet) < hi:
                crossed += 1
        if crossed == 3:
            return tuple(_fmt(c) for c in corners.values()) + (
                _fmt(transversal.base),
                _fmt(transversal.direction),
            )
        return ()

    return _retrying(attempt, trials, "T8")


def _check_t3_7(ms: ModelSample, rng: random.Random, trials: int) -> Tuple[list, int, int]:
    window = 4 * ms.bound

    def attempt() -> Optional[Tuple[str, ...]]:
        Q, R, S = (_random_line(rng, ms.bound, name) for name in ("Q", "R", "S"))
        a, b, c = Q.intersect(R), Q.intersect(S), R.intersect(S)
        if a is None or b is None or c is None or len({a, b, c}) < 3:
            return None
        mu = Fraction(rng.randint(1, 15), 16)
        nu = Fraction(rng.randint(1, 16), 16)
        e = (a[0] + mu * (c[0] - a[0]), a[1] + mu * (c[1] - a[1]))
        d = (c[0] + nu * (c[0] - b[0]), c[1] + nu * (c[1] - b[1]))
        dt, dx = d[0] - e[0], d[1] - e[1]
        if dt == 0 or dt * dt <= dx * dx:
            return None
        T = ModelLine("T", e, (abs(dt), dx if dt > 0 else -dx))
        f = T.intersect(Q)
        if f is None or any(abs(v) > window for v in f):
            return None
        a_f_b = is_strictly_between(Q.param(a), Q.param(f), Q.param(b))
        d_e_f = is_strictly_between(T.param(d), T.param(e), T.param(f))
        if a_f_b and d_e_f:
            return ()
        return tuple(_fmt(p) for p in (a, b, c, d, e, f))

    return _retrying(attempt, trials, "T3_7")


def _check_t13(ms: ModelSample, rng: random.Random, trials: int) -> Tuple[list, int, int]:
    violations, checked = [], 0
    for Q, b in _pair_points(ms):
        unreachable = oracle_unreachable(ms, Q, b)
        on_q = ms.points_on(Q)
        checked += 1
        inside = [i for i, p in enumerate(on_q) if p.id in unreachable]
        if not inside:
            continue
        for p in on_q[inside[0] : inside[-1] + 1]:
            if p.id not in unreachable:
                violations.append(
                    (Q.name, b.id, on_q[inside[0]].id, p.id, on_q[inside[-1]].id)
                )
    return violations, 0, checked


def bounding_pair(
    ms: ModelSample, Q: ModelLine, externals: Sequence[ModelPoint]
) -> Tuple[ModelPoint, ModelPoint]:
    """Find y, z on Q with every event unreachable from any external between them

    Sampled events are preferred, nearest to the unreachable intervals; missing
    ones are constructed half a parameter unit outside.

    Parameters
    ----------
    ms : ModelSample
        the sample, extended in place when y or z is constructed
    Q : ModelLine
        the line
    externals : Sequence[ModelPoint]
        events off Q

    Returns
    -------
    Tuple[ModelPoint, ModelPoint]
        y before and z after every unreachable interval
    """
    crossings = [lam for b in externals for lam in null_crossings(Q, b)]
    lo, hi = min(crossings), max(crossings)
    params = [(Q.param(p), p) for p in ms.points_on(Q)]
    below = [item for item in params if item[0] < lo]
    above = [item for item in params if item[0] > hi]
    half = Fraction(1, 2)
    y = max(below, key=lambda item: item[0])[1] if below else ms.add_point(Q.at(lo - half))
    z = min(above, key=lambda item: item[0])[1] if above else ms.add_point(Q.at(hi + half))
    return y, z


def _check_t14i(ms: ModelSample, rng: random.Random, trials: int) -> Tuple[list, int, int]:
    violations, checked = [], 0
    for Q, a in _pair_points(ms):
        others = sorted(p.id for p in ms.points.values() if not Q.contains(p) and p.id != a.id)
        for b_id in rng.sample(others, min(trials, len(others))):
            b = ms.points[b_id]
            y, z = bounding_pair(ms, Q, (a, b))
            checked += 1
            unreachable = oracle_unreachable(ms, Q, a) | oracle_unreachable(ms, Q, b)
            bounded = all(
                coord_between(Q, y, ms.points[x], z) for x in unreachable
            ) and all(interval_sq(p, e) > 0 for p in (y, z) for e in (a, b))
            if not bounded:
                violations.append((Q.name, a.id, b.id, y.id, z.id))
    return violations, 0, checked


CHECKS: Dict[TheoremId, Callable[[ModelSample, random.Random, int], Tuple[list, int, int]]] = {
    TheoremId.T4: _check_t4,
    TheoremId.T6: _check_t6,
    TheoremId.T8: _check_t8,
    TheoremId.T3_7: _check_t3_7,
    TheoremId.T13: _check_t13,
    TheoremId.T14i: _check_t14i,
}


def check_theorem(
    ms: ModelSample, thm: TheoremId, trials: int = 100, seed: int = 0
) -> TheoremReport:
    """Check one theorem on a sample

    T4, T13 and T14i range over the designated pairs of the sample; T6 over
    `trials` random pairs of sampled events; T8 and T3_7 over `trials` random
    line configurations, each resampled up to RETRY_BUDGET times when degenerate
    and counted as a skip after that.

    Parameters
    ----------
    ms : ModelSample
        the sample, left unchanged
    thm : TheoremId
        the theorem
    trials : int, optional
        number of random trials, by default 100
    seed : int, optional
        seed of the private random generator, by default 0

    Returns
    -------
    TheoremReport
        the verdict, violations, skips and number of checked instances

    Raises
    ------
    ValueError
        if trials is smaller than 1
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    rng = random.Random(seed)
    violations, skips, checked = CHECKS[thm](ms.copy(), rng, trials)
    if violations:
        verdict = Verdict.FAIL
    elif checked == 0:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.PASS
    logger.debug("%s: %d checked, %d skipped, %d violations", thm.value, checked, skips, len(violations))
    return TheoremReport(thm, verdict, tuple(violations), skips, checked)


def check_theorems(
    ms: ModelSample, thms: Iterable[TheoremId], trials: int = 100, seed: int = 0
) -> List[TheoremReport]:
    """check several theorems, each with the same seed"""
    return [check_theorem(ms, thm, trials, seed) for thm in thms]
