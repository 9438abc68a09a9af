"""Small standard categories, spaces, and points used across tests and docs."""
from __future__ import annotations

from .cat import FinCategory, FinFunctor, from_generators
from .space import FinSpace


def terminal_category() -> FinCategory:
    return from_generators(["*"], [], {})


def sierpinski_category() -> FinCategory:
    """Two objects A, B and a single non-identity arrow f: A -> B."""
    return from_generators(["A", "B"], [("f", "A", "B")], {})


def graph_category() -> FinCategory:
    """The site for directed graphs: V, E with s, t : V -> E."""
    return from_generators(
        ["V", "E"], [("s", "V", "E"), ("t", "V", "E")], {}
    )


def retract_category() -> FinCategory:
    """X, Y with r: X -> Y, s: Y -> X, r.s = id_Y and s.r = e idempotent."""
    comp = {
        ("r", "s"): "id_Y",
        ("s", "r"): "e",
        ("e", "e"): "e",
        ("r", "e"): "r",
        ("e", "s"): "s",
    }
    return from_generators(
        ["X", "Y"],
        [("r", "X", "Y"), ("s", "Y", "X"), ("e", "X", "X")],
        comp,
    )


def cyclic_group_category(n: int) -> FinCategory:
    """The cyclic group of order n as a one-object groupoid."""
    if n < 2:
        return terminal_category()
    names = [f"g{i}" for i in range(1, n)]

    def nm(i: int) -> str:
        return "id_*" if i % n == 0 else f"g{i % n}"

    comp = {
        (nm(i), nm(j)): nm(i + j)
        for i in range(1, n)
        for j in range(1, n)
    }
    return from_generators(["*"], [(g, "*", "*") for g in names], comp)


def idempotent_monoid_category() -> FinCategory:
    """The two-element monoid {id, e} with e.e = e."""
    return from_generators(["*"], [("e", "*", "*")], {("e", "e"): "e"})


def discrete_category(names) -> FinCategory:
    return from_generators(list(names), [], {})


def point_functor(c: FinCategory, obj: str) -> FinFunctor:
    """The functor from the terminal category picking out obj."""
    t = terminal_category()
    return FinFunctor(t, c, {"*": obj}, {"id_*": c.id_of(obj)})


def sierpinski_space() -> FinSpace:
    """Points m, g with opens {}, {g}, {g, m}."""
    return FinSpace(
        ("m", "g"),
        (frozenset(), frozenset({"g"}), frozenset({"g", "m"})),
    )


def discrete_space(names) -> FinSpace:
    pts = tuple(names)
    opens = []
    for mask in range(1 << len(pts)):
        opens.append(frozenset(p for i, p in enumerate(pts) if mask >> i & 1))
    return FinSpace(pts, tuple(opens))


def indiscrete_space(names) -> FinSpace:
    pts = tuple(names)
    return FinSpace(pts, (frozenset(), frozenset(pts)))
