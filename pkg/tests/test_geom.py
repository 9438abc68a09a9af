"""Geometric morphisms: adjoints, Frobenius comparison, Beck-Chevalley."""
import itertools

from toposlab.cat import (
    FinFunctor,
    enumerate_functors,
    find_isomorphism,
    identity_functor,
    slice_category,
)
from toposlab.geom import (
    BCSquare,
    GeomMorphism,
    Verdict,
    bc_compare,
    bc_holds,
    etale_square,
    frobenius,
    inverse_image,
    inverse_image_map,
    is_cc_inverse_image,
    is_locally_connected,
    is_locally_connected_bounded,
    left_counit,
    left_unit,
    paste_squares,
    pushforward_left,
    pushforward_left_map,
    pushforward_right,
    pushforward_right_map,
    right_counit,
    right_unit,
    slice_morphism,
    validate_square,
    _theta_witness_representable,
    _two_generator_instances,
)
from toposlab.psh import (
    compose_maps,
    element_map,
    enumerate_presheaves,
    identity_map,
    is_iso,
    maps_equal,
    nat_transformations,
    presheaves_isomorphic,
    terminal_presheaf,
    validate_map,
    yoneda,
)
from toposlab.zoo import (
    cyclic_group_category,
    point_functor,
    retract_category,
    sierpinski_category,
    terminal_category,
)

S = sierpinski_category()
PT = terminal_category()
R = retract_category()
C2 = cyclic_group_category(2)

PB = GeomMorphism(point_functor(S, "B"))
PA = GeomMorphism(point_functor(S, "A"))
IDS = GeomMorphism(identity_functor(S))


def _sample_morphisms():
    out = [PB, PA, IDS, GeomMorphism(point_functor(R, "Y"))]
    out += [GeomMorphism(fn) for fn in itertools.islice(enumerate_functors(S, S), 4)]
    return out


def test_inverse_image_terminal_and_identity():
    t = terminal_presheaf(S)
    assert presheaves_isomorphic(inverse_image(IDS, t), t)
    for p in itertools.islice(enumerate_presheaves(S, 2), 5):
        assert presheaves_isomorphic(inverse_image(IDS, p), p)


def test_inverse_image_point_evaluates():
    yB = yoneda(S, "B")
    assert inverse_image(PB, yB).carrier == {"*": ("id_B",)}
    yA = yoneda(S, "A")
    assert inverse_image(PB, yA).carrier == {"*": ()}


def test_pushforward_left_preserves_representables():
    for f in _sample_morphisms():
        for c in f.site_dom.objects:
            ext = pushforward_left(f, yoneda(f.site_dom, c))
            target = yoneda(f.site_cod, f.functor.on_obj(c))
            assert presheaves_isomorphic(ext.presheaf, target)


def test_pushforward_left_point_singleton():
    ext = pushforward_left(PB, terminal_presheaf(PT))
    assert presheaves_isomorphic(ext.presheaf, yoneda(S, "B"))


def test_pushforward_left_identity():
    for p in itertools.islice(enumerate_presheaves(S, 2), 5):
        assert presheaves_isomorphic(pushforward_left(IDS, p).presheaf, p)


def test_pushforward_right_terminal_and_identity():
    t = terminal_presheaf(PT)
    assert presheaves_isomorphic(
        pushforward_right(PB, t).presheaf, terminal_presheaf(S)
    )
    for p in itertools.islice(enumerate_presheaves(S, 2), 5):
        assert presheaves_isomorphic(pushforward_right(IDS, p).presheaf, p)


def test_pushforward_right_point_hom_formula():
    # along the B-point, f_*(P)(d) = P(*)^{|Hom(B, d)|}; Hom(B,A) is empty
    # and Hom(B,B) is a singleton, cross-checked by the adjunction counts
    two = next(
        p for p in enumerate_presheaves(PT, 2) if len(p.carrier["*"]) == 2
    )
    ext = pushforward_right(PB, two)
    assert len(ext.presheaf.carrier["A"]) == 1
    assert len(ext.presheaf.carrier["B"]) == 2
    assert len(nat_transformations(yoneda(S, "A"), ext.presheaf)) == 1


def test_adjunction_hom_counts():
    for f in _sample_morphisms()[:4]:
        ps = list(itertools.islice(enumerate_presheaves(f.site_dom, 2), 4))
        qs = list(itertools.islice(enumerate_presheaves(f.site_cod, 2), 4))
        for p in ps:
            lext = pushforward_left(f, p)
            rext = pushforward_right(f, p)
            for q in qs:
                fq = inverse_image(f, q)
                assert len(nat_transformations(lext.presheaf, q)) == len(
                    nat_transformations(p, fq)
                )
                assert len(nat_transformations(fq, p)) == len(
                    nat_transformations(q, rext.presheaf)
                )


def test_triangle_identities():
    for f in _sample_morphisms()[:4]:
        ps = list(itertools.islice(enumerate_presheaves(f.site_dom, 2), 3))
        qs = list(itertools.islice(enumerate_presheaves(f.site_cod, 2), 3))
        for p in ps:
            # counit_{f_! p} . f_!(unit_p) = id
            ext_p = pushforward_left(f, p)
            fstar = inverse_image(f, ext_p.presheaf)
            eta = left_unit(f, p, ext_p)
            ext_fstar = pushforward_left(f, fstar)
            f_eta = pushforward_left_map(f, eta, ext_p, ext_fstar)
            eps = left_counit(f, ext_p.presheaf, ext_fstar)
            assert maps_equal(compose_maps(eps, f_eta), identity_map(ext_p.presheaf))
            # right adjoint: counit_p . f^*(unit at f_* p)... checked via q side
            rext_p = pushforward_right(f, p)
            src = inverse_image(f, rext_p.presheaf)
            eps_r = right_counit(f, p, rext_p)
            rext_src = pushforward_right(f, src)
            eta_r = right_unit(f, rext_p.presheaf, rext_src)
            f_eps = pushforward_right_map(f, eps_r, rext_src, rext_p)
            assert maps_equal(
                compose_maps(f_eps, eta_r), identity_map(rext_p.presheaf)
            )
        for q in qs:
            # f^*(counit_q) . unit_{f^* q} = id for f_! -| f^*
            fq = inverse_image(f, q)
            ext_fq = pushforward_left(f, fq)
            eta = left_unit(f, fq, ext_fq)
            eps = left_counit(f, q, ext_fq)
            fstar_eps = inverse_image_map(
                f, eps, inverse_image(f, ext_fq.presheaf), fq
            )
            assert maps_equal(compose_maps(fstar_eps, eta), identity_map(fq))
            # f^* -| f_*: counit_{f^* q} . f^*(unit_q) = id
            rext_fq = pushforward_right(f, fq)
            eta_r = right_unit(f, q, rext_fq)
            eps_r = right_counit(f, fq, rext_fq)
            fstar_eta = inverse_image_map(
                f, eta_r, fq, inverse_image(f, rext_fq.presheaf)
            )
            assert maps_equal(compose_maps(eps_r, fstar_eta), identity_map(fq))


def test_frobenius_terminal_is_iso():
    t_dom = terminal_presheaf(PB.site_dom)
    t_cod = terminal_presheaf(PB.site_cod)
    for f in (PB, PA, IDS):
        td, tc = terminal_presheaf(f.site_dom), terminal_presheaf(f.site_cod)
        inst = frobenius(
            f,
            identity_map(inverse_image(f, tc))
            if inverse_image(f, tc).carrier == td.carrier
            else element_map(inverse_image(f, tc), f.site_dom.objects[0], "*"),
            identity_map(tc),
        )
        assert not validate_map(inst.theta)
    # explicit: X = A = B = terminal along the B-point
    inst = frobenius(
        PB,
        identity_map(inverse_image(PB, t_cod)),
        identity_map(t_cod),
    )
    assert inst.is_iso()


def test_frobenius_point_b_fails_at_ya():
    t_cod = terminal_presheaf(S)
    yA = yoneda(S, "A")
    inst = frobenius(
        PB,
        identity_map(inverse_image(PB, t_cod)),
        nat_transformations(yA, t_cod)[0],
    )
    assert not inst.is_iso()
    assert inst.lhs.carrier["A"] == ()
    assert len(inst.rhs.carrier["A"]) == 1


def test_frobenius_point_a_always_iso():
    t_cod = terminal_presheaf(S)
    for a in itertools.islice(enumerate_presheaves(S, 2), 6):
        for m in nat_transformations(a, t_cod):
            inst = frobenius(
                PA, identity_map(inverse_image(PA, t_cod)), m
            )
            assert inst.is_iso()


def test_is_cc_inverse_image_examples():
    assert is_cc_inverse_image(IDS) == (True, None)
    ok, w = is_cc_inverse_image(PB)
    assert not ok
    assert w.eval_object == "A"
    assert w.source_card == 0 and w.target_card >= 1
    assert is_cc_inverse_image(PA)[0]


def test_is_locally_connected_examples():
    assert is_locally_connected(IDS) == (True, None)
    ok, w = is_locally_connected(PB)
    assert not ok and w is not None
    assert is_locally_connected(PA)[0]
    # functor into a groupoid
    for fn in enumerate_functors(PT, C2):
        assert is_locally_connected(GeomMorphism(fn))[0]


def test_lc_implies_cc():
    for f in _sample_morphisms():
        if is_locally_connected(f)[0]:
            assert is_cc_inverse_image(f)[0]


def test_is_locally_connected_bounded_examples():
    ts = is_locally_connected_bounded(PB, 1)
    assert ts.verdict is Verdict.FAILS
    assert ts.witness is not None
    ts2 = is_locally_connected_bounded(IDS, 2)
    assert ts2.verdict is Verdict.HOLDS_AT_BOUND
    assert ts2.bound == 2


def test_exact_vs_bounded_agreement_small():
    for c in (PT, S):
        for d in (PT, S, R):
            for fn in enumerate_functors(c, d):
                f = GeomMorphism(fn)
                exact = is_locally_connected(f)[0]
                bounded = is_locally_connected_bounded(f, 2)
                if bounded.verdict is Verdict.FAILS:
                    assert not exact
                else:
                    assert exact


def test_kernel_matches_generic_frobenius():
    checked = 0
    for f in (PB, PA, IDS, GeomMorphism(point_functor(R, "Y"))):
        fn = f.functor
        for c1 in f.site_dom.objects:
            fc1 = fn.on_obj(c1)
            for d1 in f.site_cod.objects:
                insts = _two_generator_instances(f.site_cod, d1, fc1)
                for b, b_a, b_x in itertools.islice(insts, 10):
                    w = _theta_witness_representable(f, c1, d1, b, b_a, b_x)
                    x_map = element_map(inverse_image(f, b), c1, b_x)
                    a_map = element_map(b, d1, b_a)
                    inst = frobenius(f, x_map, a_map)
                    assert (w is None) == inst.is_iso()
                    checked += 1
    assert checked >= 20


def test_witness_serializes():
    _, w = is_cc_inverse_image(PB)
    d = w.to_json_dict()
    assert d["kind"] == "frobenius-failure"
    assert set(d) == {"kind", "eval_object", "source_card", "target_card", "detail"}


def test_bc_identity_square():
    ids = identity_functor(S)
    sq = BCSquare(top=ids, left=ids, right=ids, bottom=ids)
    assert validate_square(sq) == []
    for r in itertools.islice(enumerate_presheaves(S, 2), 4):
        assert is_iso(bc_compare(sq, r))
    ts = bc_holds(sq, 2)
    assert ts.verdict is Verdict.HOLDS_AT_BOUND


def test_bc_etale_square_point_a_at_yb():
    sq = etale_square(PA, yoneda(S, "B"))
    assert validate_square(sq) == []
    assert bc_holds(sq, 2).verdict is Verdict.HOLDS_AT_BOUND


def test_bc_etale_square_point_b_at_ya_fails():
    sq = etale_square(PB, yoneda(S, "A"))
    assert validate_square(sq) == []
    ts = bc_holds(sq, 2)
    assert ts.verdict is Verdict.FAILS
    assert ts.witness is not None and ts.witness.kind == "bc-failure"


def test_bc_pasting_preserves_holds():
    ids = identity_functor(S)
    sq = BCSquare(top=ids, left=ids, right=ids, bottom=ids)
    pasted = paste_squares(sq, sq)
    assert validate_square(pasted) == []
    assert bc_holds(pasted, 2).verdict is Verdict.HOLDS_AT_BOUND
    inner = etale_square(PA, yoneda(S, "B"))
    ids_cp = identity_functor(inner.top.source)
    ids_dp = identity_functor(inner.bottom.source)
    trivial = BCSquare(
        top=ids_cp, left=inner.left, right=inner.left, bottom=ids_dp
    )
    pasted2 = paste_squares(inner, trivial)
    assert validate_square(pasted2) == []
    assert bc_holds(pasted2, 2).verdict is Verdict.HOLDS_AT_BOUND


def test_slice_morphism_shapes():
    g = slice_morphism(PB, terminal_presheaf(S))
    assert find_isomorphism(g.site_dom, PT) is not None
    assert find_isomorphism(g.site_cod, S) is not None
    g2 = slice_morphism(IDS, yoneda(S, "B"))
    assert find_isomorphism(g2.site_dom, g2.site_cod) is not None
    g3 = slice_morphism(PB, yoneda(S, "B"))
    assert len(g3.site_dom.objects) == 1
    sl, _ = slice_category(S, "B")
    assert find_isomorphism(g3.site_cod, sl) is not None
