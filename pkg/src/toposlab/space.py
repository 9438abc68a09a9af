"""Finite topological spaces: point analyses and the bridge to a presheaf site."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

from .cat import FinCategory, FinFunctor


class NotT0(Exception):
    """The space is not T0 and automatic quotienting was disabled."""


@dataclass(frozen=True, eq=False)
class FinSpace:
    points: Tuple[str, ...]
    opens: Tuple[FrozenSet[str], ...]

    def __repr__(self) -> str:
        return f"FinSpace(points={list(self.points)}, opens={len(self.opens)})"


@dataclass(frozen=True)
class PointClassification:
    closed_points: FrozenSet[str]
    locally_closed_points: FrozenSet[str]


def validate_space(s: FinSpace) -> List[str]:
    bad: List[str] = []
    pts = frozenset(s.points)
    if len(pts) != len(s.points):
        bad.append("duplicate point names")
    opens = set(s.opens)
    if len(opens) != len(s.opens):
        bad.append("duplicate open sets")
    for u in opens:
        if not u <= pts:
            bad.append(f"open set {sorted(u)} contains unknown points")
    if frozenset() not in opens:
        bad.append("empty set is not open")
    if pts not in opens:
        bad.append("full point set is not open")
    for u in opens:
        for v in opens:
            if u | v not in opens:
                bad.append(f"union of {sorted(u)} and {sorted(v)} not open")
            if u & v not in opens:
                bad.append(f"intersection of {sorted(u)} and {sorted(v)} not open")
    return bad


def closure(s: FinSpace, subset: FrozenSet[str]) -> FrozenSet[str]:
    pts = frozenset(s.points)
    closed_supersets = [pts - u for u in s.opens if subset <= pts - u]
    out = pts
    for z in closed_supersets:
        out &= z
    return out


def classify_points(s: FinSpace) -> PointClassification:
    pts = frozenset(s.points)
    closed = frozenset(
        x for x in s.points if pts - frozenset({x}) in set(s.opens)
    )
    closed_sets = [pts - u for u in s.opens]
    lc = frozenset(
        x
        for x in s.points
        if any(
            u & z == frozenset({x})
            for u in s.opens
            for z in closed_sets
        )
    )
    return PointClassification(closed, lc)


def _separating_pair(
    s: FinSpace, test_points: FrozenSet[str]
) -> Optional[Tuple[FrozenSet[str], FrozenSet[str]]]:
    opens = list(s.opens)
    for i, u in enumerate(opens):
        for v in opens[i + 1 :]:
            if u != v and u & test_points == v & test_points:
                return u, v
    return None


def is_jacobson(
    s: FinSpace,
) -> Tuple[bool, Optional[Tuple[FrozenSet[str], FrozenSet[str]]]]:
    """True iff opens agreeing on closed points are equal."""
    pair = _separating_pair(s, classify_points(s).closed_points)
    return (pair is None), pair


def is_weakly_jacobson_space(
    s: FinSpace,
) -> Tuple[bool, Optional[Tuple[FrozenSet[str], FrozenSet[str]]]]:
    """True iff opens agreeing on locally closed points are equal."""
    pair = _separating_pair(s, classify_points(s).locally_closed_points)
    return (pair is None), pair


def specialization_order(s: FinSpace) -> Dict[str, FrozenSet[str]]:
    """x <= y iff every open containing x contains y; returns the up-sets."""
    return {
        x: frozenset(
            y
            for y in s.points
            if all(y in u for u in s.opens if x in u)
        )
        for x in s.points
    }


def is_t0(s: FinSpace) -> bool:
    ups = specialization_order(s)
    return all(
        not (y in ups[x] and x in ups[y])
        for x in s.points
        for y in s.points
        if x != y
    )


def t0_quotient(s: FinSpace) -> Tuple[FinSpace, Dict[str, str]]:
    """Identify order-equivalent points; for finite spaces this is the
    sobrification. The class representative is the first point in order."""
    ups = specialization_order(s)
    cls: Dict[str, str] = {}
    for x in s.points:
        for y in s.points:
            if y in ups[x] and x in ups[y]:
                cls[x] = y
                break
    reps = tuple(dict.fromkeys(cls[x] for x in s.points))
    opens = tuple(
        dict.fromkeys(
            frozenset(cls[p] for p in u) for u in s.opens
        )
    )
    return FinSpace(reps, opens), cls


def to_presheaf_site(s: FinSpace, auto_quotient: bool = True) -> FinCategory:
    """The poset site whose presheaf topos is the sheaf topos of s.

    Objects are the (T0) points; there is a unique arrow x -> y exactly
    when y is in the closure of x (y below x in specialization order), so
    closed points become terminal-like targets.
    """
    if not is_t0(s):
        if not auto_quotient:
            raise NotT0("space is not T0; quotient first")
        s, _ = t0_quotient(s)
    ups = specialization_order(s)

    def leq(x: str, y: str) -> bool:
        return y in ups[x]

    objects = s.points

    def nm(x: str, y: str) -> str:
        return f"id_{x}" if x == y else f"{x}>{y}"

    arrows = [
        (nm(x, y), x, y) for x in objects for y in objects if leq(y, x)
    ]
    identity = {x: nm(x, x) for x in objects}
    comp = {}
    for (n2, d2, c2) in arrows:
        for (n1, d1, c1) in arrows:
            if d2 == c1:
                comp[(n2, n1)] = nm(d1, c2)
    return FinCategory(tuple(objects), tuple(arrows), identity, comp)
