"""Presheaf machinery: Yoneda, (co)limits, exponentials, enumeration."""
import itertools

from toposlab.cat import find_isomorphism, slice_category
from toposlab.psh import (
    Presheaf,
    PresheafMap,
    category_of_elements,
    coequalizer,
    coproduct,
    element_map,
    enumerate_presheaves,
    enumerate_quotients,
    equalizer,
    evaluation_map,
    exponential,
    identity_map,
    initial_presheaf,
    is_epi,
    is_iso,
    is_mono,
    maps_equal,
    nat_transformations,
    pairing,
    presheaves_isomorphic,
    product,
    pullback,
    quotient_by_pairs,
    terminal_presheaf,
    unique_to_terminal,
    validate_map,
    validate_presheaf,
    yoneda,
)
from toposlab.zoo import (
    cyclic_group_category,
    retract_category,
    sierpinski_category,
    terminal_category,
)

S = sierpinski_category()
PT = terminal_category()
R = retract_category()
C2 = cyclic_group_category(2)


def test_yoneda_sierpinski_carriers():
    yB = yoneda(S, "B")
    assert set(yB.carrier["A"]) == {"f"}
    assert set(yB.carrier["B"]) == {"id_B"}
    yA = yoneda(S, "A")
    assert set(yA.carrier["A"]) == {"id_A"}
    assert yA.carrier["B"] == ()


def test_yoneda_terminal_site():
    assert presheaves_isomorphic(yoneda(PT, "*"), terminal_presheaf(PT))


def test_yoneda_lemma_counts():
    for c in (S, R, C2):
        qs = list(itertools.islice(enumerate_presheaves(c, 2), 12))
        for x in c.objects:
            yx = yoneda(c, x)
            for q in qs:
                assert len(nat_transformations(yx, q)) == len(q.carrier[x])


def test_nat_transformations_basics():
    t = terminal_presheaf(S)
    assert len(nat_transformations(t, t)) == 1
    assert len(nat_transformations(yoneda(S, "A"), yoneda(S, "B"))) == 1
    assert len(nat_transformations(yoneda(S, "B"), yoneda(S, "A"))) == 0


def test_product_with_terminal_is_identity():
    for p in itertools.islice(enumerate_presheaves(S, 2), 6):
        prod, pr1, _ = product(p, terminal_presheaf(S))
        assert presheaves_isomorphic(prod, p)
        assert is_iso(pr1)


def test_product_universal_property_by_counting():
    ps = list(itertools.islice(enumerate_presheaves(S, 2), 6))
    for p, q, r in itertools.islice(itertools.product(ps, repeat=3), 40):
        prod, _, _ = product(p, q)
        assert len(nat_transformations(r, prod)) == len(
            nat_transformations(r, p)
        ) * len(nat_transformations(r, q))


def test_pairing_commutes_with_projections():
    p, q = yoneda(S, "B"), terminal_presheaf(S)
    prod, pr1, pr2 = product(p, q)
    m1 = identity_map(p)
    m2 = unique_to_terminal(p, q)
    h = pairing(m1, m2, prod)
    assert not validate_map(h)
    from toposlab.psh import compose_maps

    assert maps_equal(compose_maps(pr1, h), m1)
    assert maps_equal(compose_maps(pr2, h), m2)


def test_coproduct_universal_property_by_counting():
    ps = list(itertools.islice(enumerate_presheaves(S, 2), 5))
    for p, q, r in itertools.islice(itertools.product(ps, repeat=3), 30):
        cop, _, _ = coproduct(p, q)
        assert len(nat_transformations(cop, r)) == len(
            nat_transformations(p, r)
        ) * len(nat_transformations(q, r))


def test_pullback_of_identities():
    yB = yoneda(S, "B")
    pb, pr1, _ = pullback(identity_map(yB), identity_map(yB))
    assert presheaves_isomorphic(pb, yB)
    assert is_iso(pr1)


def test_pullback_over_terminal_is_product():
    yA, yB, t = yoneda(S, "A"), yoneda(S, "B"), terminal_presheaf(S)
    pb, _, _ = pullback(unique_to_terminal(yA, t), unique_to_terminal(yB, t))
    assert len(pb.carrier["A"]) == 1
    assert pb.carrier["B"] == ()


def test_equalizer_of_equal_maps():
    yB = yoneda(S, "B")
    eq, incl = equalizer(identity_map(yB), identity_map(yB))
    assert presheaves_isomorphic(eq, yB)
    assert is_mono(incl)


def test_coequalizer_of_equal_maps():
    yB = yoneda(S, "B")
    cq, proj = coequalizer(identity_map(yB), identity_map(yB))
    assert presheaves_isomorphic(cq, yB)
    assert is_epi(proj)


def test_exponential_trivial_cases():
    t = terminal_presheaf(S)
    for p in itertools.islice(enumerate_presheaves(S, 2), 5):
        assert presheaves_isomorphic(exponential(p, t).presheaf, p)
        assert presheaves_isomorphic(exponential(t, p).presheaf, t)


def test_exponential_yb_yb_carrier():
    e = exponential(yoneda(S, "B"), yoneda(S, "B"))
    assert len(e.presheaf.carrier["B"]) == 1
    assert not validate_presheaf(e.presheaf)


def test_exponential_adjunction_counts():
    ps = list(itertools.islice(enumerate_presheaves(S, 2), 5))
    for p, q, r in itertools.islice(itertools.product(ps, repeat=3), 30):
        e = exponential(p, q)
        prod, _, _ = product(r, q)
        assert len(nat_transformations(prod, p)) == len(
            nat_transformations(r, e.presheaf)
        )


def test_evaluation_map_is_natural():
    e = exponential(yoneda(S, "B"), yoneda(S, "B"))
    _, _, _, ev = evaluation_map(e)
    assert not validate_map(ev)


def test_map_predicates():
    yB = yoneda(S, "B")
    i = identity_map(yB)
    assert is_mono(i) and is_epi(i) and is_iso(i)
    m = unique_to_terminal(initial_presheaf(S), terminal_presheaf(S))
    assert is_mono(m) and not is_epi(m)


def test_element_map_classifies():
    yB = yoneda(S, "B")
    m = element_map(yB, "B", "id_B")
    assert not validate_map(m)
    assert is_iso(m)
    m2 = element_map(yB, "A", "f")
    assert m2.source.carrier["A"] == ("id_A",)
    assert m2.components["A"]["id_A"] == "f"


def test_category_of_elements_terminal():
    el, proj = category_of_elements(terminal_presheaf(S))
    assert find_isomorphism(el, S) is not None
    assert len(proj.obj_map) == len(S.objects)


def test_category_of_elements_of_representable_is_slice():
    for c in (S, R):
        for x in c.objects:
            el, _ = category_of_elements(yoneda(c, x))
            sl, _ = slice_category(c, x)
            assert find_isomorphism(el, sl) is not None


def test_category_of_elements_constant_presheaf():
    p = Presheaf(PT, {"*": ("a", "b")}, {"id_*": {"a": "a", "b": "b"}})
    el, _ = category_of_elements(p)
    assert len(el.objects) == 2
    assert len(el.arrows) == 2  # identities only


def test_enumerate_presheaves_counts_frozen():
    assert sum(1 for _ in enumerate_presheaves(PT, 1)) == 2
    assert sum(1 for _ in enumerate_presheaves(S, 0)) == 1
    # frozen oracle: pairs of sets of size <= 1 with a map P(B) -> P(A), mod iso
    assert sum(1 for _ in enumerate_presheaves(S, 1)) == 3
    assert sum(1 for _ in enumerate_presheaves(S, 2)) == 8


def test_enumerated_presheaves_validate():
    for c in (S, R, C2):
        for p in enumerate_presheaves(c, 2):
            assert not validate_presheaf(p)


def _naive_congruence_count(p):
    """Independent oracle: filter every per-object partition family for
    action compatibility."""
    c = p.site

    def partitions(seq):
        if not seq:
            yield []
            return
        first, rest = seq[0], seq[1:]
        for part in partitions(rest):
            for i in range(len(part)):
                yield part[:i] + [[first] + part[i]] + part[i + 1 :]
            yield [[first]] + part

    families = [list(partitions(list(p.carrier[x]))) for x in c.objects]
    count = 0
    for combo in itertools.product(*families):
        cls = {}
        for x, part in zip(c.objects, combo):
            for grp in part:
                for e in grp:
                    cls[(x, e)] = (x, min(grp))
        ok = True
        for u in c.arrow_names():
            x, y = c.cod(u), c.dom(u)
            for e1 in p.carrier[x]:
                e2 = cls[(x, e1)][1]
                if cls[(y, p.act(u, e1))] != cls[(y, p.act(u, e2))]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            count += 1
    return count


def test_enumerate_quotients_vs_naive_oracle():
    for c in (S, C2):
        for p in itertools.islice(enumerate_presheaves(c, 2), 6):
            got = sum(1 for _ in enumerate_quotients(p))
            assert got == _naive_congruence_count(p)


def test_enumerate_quotients_extremes_and_fold():
    yB = yoneda(S, "B")
    cop, _, _ = coproduct(yB, yB)
    quots = list(enumerate_quotients(cop))
    assert any(presheaves_isomorphic(q, cop) for _, q, _ in quots)
    assert any(presheaves_isomorphic(q, yB) for _, q, _ in quots)
    assert len(quots) == 3
    for _, q, proj in quots:
        assert not validate_presheaf(q)
        assert is_epi(proj)


def test_quotient_by_pairs_collapses():
    yB = yoneda(S, "B")
    cop, _, _ = coproduct(yB, yB)
    q, proj = quotient_by_pairs(cop, {"B": [("inl(id_B)", "inr(id_B)")]})
    assert presheaves_isomorphic(q, yB)
    assert is_epi(proj) and not validate_map(proj)
