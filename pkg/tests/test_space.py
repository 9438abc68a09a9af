import itertools

import pytest

from toposlab.cat import find_isomorphism, terminal_object
from toposlab.space import (
    FinSpace,
    NotT0,
    classify_points,
    closure,
    is_jacobson,
    is_t0,
    is_weakly_jacobson_space,
    specialization_order,
    t0_quotient,
    to_presheaf_site,
    validate_space,
)
from toposlab.zoo import (
    discrete_space,
    indiscrete_space,
    sierpinski_category,
    sierpinski_space,
)


def all_topologies(points):
    """Every topology on the given points, by brute force."""
    subsets = [frozenset(s) for r in range(len(points) + 1)
               for s in itertools.combinations(points, r)]
    full = frozenset(points)
    for bits in itertools.product([0, 1], repeat=len(subsets)):
        fam = {s for s, b in zip(subsets, bits) if b}
        if frozenset() not in fam or full not in fam:
            continue
        if all(a | b in fam and a & b in fam for a in fam for b in fam):
            yield FinSpace(tuple(points), tuple(sorted(fam, key=sorted)))


def test_sierpinski_space_validates():
    assert validate_space(sierpinski_space()) == []


def test_validate_catches_missing_union():
    s = FinSpace(("a", "b"), (frozenset(), frozenset({"a"}), frozenset({"b"})))
    assert validate_space(s) != []


def test_classify_points_sierpinski():
    pc = classify_points(sierpinski_space())
    assert set(pc.closed_points) == {"m"}
    assert set(pc.locally_closed_points) == {"m", "g"}


def test_closure():
    s = sierpinski_space()
    assert closure(s, frozenset({"g"})) == frozenset({"g", "m"})
    assert closure(s, frozenset({"m"})) == frozenset({"m"})


def test_jacobson_examples():
    assert is_jacobson(discrete_space(("a", "b")))[0]
    jac, wit = is_jacobson(sierpinski_space())
    assert not jac
    u, v = wit
    assert u != v  # two distinct opens agreeing on closed points
    assert is_weakly_jacobson_space(sierpinski_space())[0]


def test_t0_and_quotient():
    ind = indiscrete_space(("a", "b"))
    assert not is_t0(ind)
    q, cls = t0_quotient(ind)
    assert is_t0(q)
    assert len(q.points) == 1
    assert cls["a"] == cls["b"]
    assert is_t0(sierpinski_space())


def test_specialization_order():
    order = specialization_order(sierpinski_space())
    # g is open-dense: every open containing m... m is closed, g generic
    assert order["g"] == {"g", "m"} or order["g"] == {"g"}
    # the order determines the topology: exactly one nontrivial relation
    rel = {(x, y) for x in order for y in order[x] if x != y}
    assert len(rel) == 1


def test_to_presheaf_site_matches_sierpinski_category():
    site = to_presheaf_site(sierpinski_space())
    assert find_isomorphism(site, sierpinski_category()) is not None
    # the closed point is the terminal object of the site
    assert terminal_object(site) == "m"


def test_to_presheaf_site_requires_t0_when_asked():
    ind = indiscrete_space(("a", "b"))
    with pytest.raises(NotT0):
        to_presheaf_site(ind, auto_quotient=False)
    site = to_presheaf_site(ind)  # auto-quotient
    assert len(site.objects) == 1


def test_jacobson_iff_t0_quotient_all_points_closed_small():
    # frozen oracle relation on all topologies over <= 3 points: Jacobson iff
    # the space already is its T0 quotient and that quotient has every point
    # closed (i.e. the specialization preorder is discrete)
    for n in (1, 2, 3):
        pts = tuple("pqr"[:n])
        for s in all_topologies(pts):
            q, _ = t0_quotient(s)
            all_closed = set(classify_points(q).closed_points) == set(q.points)
            discrete_order = all_closed and len(q.points) == len(s.points)
            assert is_jacobson(s)[0] == discrete_order


def test_jacobson_implies_weakly_jacobson_small():
    for s in all_topologies(("p", "q", "r")):
        if is_jacobson(s)[0]:
            assert is_weakly_jacobson_space(s)[0]


def test_topology_census_frozen():
    # numbers of topologies on n labelled points: 1, 4, 29 (frozen oracle)
    assert sum(1 for _ in all_topologies(("p",))) == 1
    assert sum(1 for _ in all_topologies(("p", "q"))) == 4
    assert sum(1 for _ in all_topologies(("p", "q", "r"))) == 29
