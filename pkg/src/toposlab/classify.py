"""Topos-level classifiers and theorem-consistency sweeps.

The flags computed here live at the level of the presheaf topos of a
finite site: whether every essential point is locally connected (which
for presheaf toposes happens exactly when the site is a groupoid),
whether some Morita-equivalent site satisfies the right-inverse
criterion, whether the topos is local and its center closed, and so on.
Every negative answer carries a concrete witness.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from . import psh
from .cat import (
    FinCategory,
    FinFunctor,
    canonical_key,
    cauchy_completion,
    enumerate_functors,
    has_strict_terminal,
    is_groupoid,
    make_category,
    right_inv_implies_iso,
    terminal_object,
    validate,
)
from .geom import (
    BCSquare,
    GeomMorphism,
    TriState,
    Verdict,
    Witness,
    bc_holds,
    etale_square,
    is_cc_inverse_image,
    is_locally_connected,
    paste_squares,
)
from .space import FinSpace, to_presheaf_site
from .zoo import point_functor, terminal_category


def is_eilc_presheaf(c: FinCategory) -> bool:
    """Every essential point of PSh(c) is locally connected iff c is a
    groupoid."""
    return is_groupoid(c)


def counterexample_point(
    c: FinCategory,
) -> Optional[Tuple[GeomMorphism, Witness]]:
    """For a non-groupoid site, an essential point that is not locally
    connected, with its Frobenius witness.  Candidates are the points at
    objects with a non-invertible incoming arrow, in object order."""
    if is_groupoid(c):
        return None
    for obj in c.objects:
        if not any(
            c.cod(a) == obj and not c.is_iso(a) for a in c.arrow_names()
        ):
            continue
        f = GeomMorphism(point_functor(c, obj))
        ok, w = is_locally_connected(f)
        if not ok:
            return f, w
    # fall back to scanning every point
    for obj in c.objects:  # pragma: no cover
        f = GeomMorphism(point_functor(c, obj))
        ok, w = is_locally_connected(f)
        if not ok:
            return f, w
    return None  # pragma: no cover


def full_subcategory(c: FinCategory, objs: Tuple[str, ...]) -> FinCategory:
    keep = set(objs)
    arrows = [a for a in c.arrows if a[1] in keep and a[2] in keep]
    names = {a[0] for a in arrows}
    comp = {
        (g, f): v
        for (g, f), v in c.comp.items()
        if g in names and f in names
    }
    identity = {x: c.id_of(x) for x in objs}
    return make_category(tuple(objs), tuple(arrows), identity, comp)


def _is_retract(c: FinCategory, x: str, y: str) -> bool:
    """Whether x is a retract of y."""
    idx = c.id_of(x)
    return any(
        c.compose(b, a) == idx
        for a in c.hom(x, y)
        for b in c.hom(y, x)
    )


def is_weakly_jacobson_presheaf(
    c: FinCategory,
) -> Tuple[TriState, Optional[FinCategory]]:
    """Search for a Morita-equivalent site on which every arrow with a
    right inverse is an isomorphism.

    Any such site is, up to equivalence, a full subcategory of the
    skeletal Cauchy completion whose objects generate it under retracts,
    so the search over those subcategories is exhaustive.  Subcategories
    are tried by decreasing object count, ties lexicographic.
    """
    ok, _ = right_inv_implies_iso(c)
    if ok:
        return TriState(Verdict.HOLDS), c
    skel, _ = cauchy_completion(c)
    objs = skel.objects
    for size in range(len(objs), 0, -1):
        for subset in itertools.combinations(objs, size):
            chosen = set(subset)
            if not all(
                x in chosen or any(_is_retract(skel, x, y) for y in subset)
                for x in objs
            ):
                continue
            sub = full_subcategory(skel, subset)
            ok, _ = right_inv_implies_iso(sub)
            if ok:
                return TriState(Verdict.HOLDS), sub
    return TriState(Verdict.FAILS), None


@dataclass(frozen=True)
class LocalCenter:
    is_local: bool
    center_closed: bool


def check_local_center(c: FinCategory) -> LocalCenter:
    """PSh(c) is local iff c has a terminal object; the center of a local
    presheaf topos is a closed inclusion iff the terminal is strict."""
    return LocalCenter(
        is_local=terminal_object(c) is not None,
        center_closed=has_strict_terminal(c),
    )


@dataclass(frozen=True)
class ToposReport:
    site_description: str
    site: FinCategory
    is_groupoid_site: bool
    eilc: bool
    weakly_jacobson: TriState
    morita_representative: Optional[FinCategory]
    cilc_status: str  # Implied-by-EILC | Implied-by-WJ-over-Sets | Unknown
    boolean_topos: bool
    local_center: LocalCenter
    witnesses: Tuple[Witness, ...]

    def to_json_dict(self) -> Dict:
        return {
            "site": self.site_description,
            "is_groupoid_site": self.is_groupoid_site,
            "eilc": self.eilc,
            "weakly_jacobson": self.weakly_jacobson.to_json_dict(),
            "morita_representative_objects": (
                list(self.morita_representative.objects)
                if self.morita_representative is not None
                else None
            ),
            "cilc_status": self.cilc_status,
            "boolean_topos": self.boolean_topos,
            "is_local": self.local_center.is_local,
            "center_closed": self.local_center.center_closed,
            "witnesses": [w.to_json_dict() for w in self.witnesses],
        }


def classify_topos(origin) -> ToposReport:
    """Aggregate classifier; spaces are bridged to presheaf sites first."""
    if isinstance(origin, FinSpace):
        c = to_presheaf_site(origin)
        desc = f"space on {len(origin.points)} points (bridged)"
    elif isinstance(origin, FinCategory):
        c = origin
        desc = (
            f"category with {len(c.objects)} objects, {len(c.arrows)} arrows"
        )
    else:
        raise TypeError("origin must be a FinCategory or FinSpace")

    groupoid = is_groupoid(c)
    eilc = is_eilc_presheaf(c)
    witnesses: List[Witness] = []
    if not eilc:
        found = counterexample_point(c)
        if found is not None:
            witnesses.append(found[1])
    wj, rep = is_weakly_jacobson_presheaf(c)
    if eilc:
        cilc = "Implied-by-EILC"
    elif wj.verdict == Verdict.HOLDS:
        cilc = "Implied-by-WJ-over-Sets"
    else:
        cilc = "Unknown"
    return ToposReport(
        site_description=desc,
        site=c,
        is_groupoid_site=groupoid,
        eilc=eilc,
        weakly_jacobson=wj,
        morita_representative=rep,
        cilc_status=cilc,
        boolean_topos=groupoid,
        local_center=check_local_center(c),
        witnesses=tuple(witnesses),
    )


# -- enumeration of small categories ---------------------------------------------


def _enumerate_tables(
    n_obj: int, doms: Tuple[Tuple[str, str], ...]
) -> Iterator[FinCategory]:
    """All composition tables over objects o0..o{n-1} with the given
    (dom, cod) assignment for non-identity arrows a0, a1, ...; raw
    (labelled) enumeration by backtracking with associativity pruning."""
    objects = tuple(f"o{i}" for i in range(n_obj))
    ids = {x: f"id_{x}" for x in objects}
    nonid = [(f"a{i}", d, c) for i, (d, c) in enumerate(doms)]
    arrows = tuple((ids[x], x, x) for x in objects) + tuple(nonid)
    dom = {a[0]: a[1] for a in arrows}
    cod = {a[0]: a[2] for a in arrows}
    nonid_names = [a[0] for a in nonid]
    id_names = set(ids.values())

    slots = [
        (g, f)
        for g in nonid_names
        for f in nonid_names
        if dom[g] == cod[f]
    ]
    candidates = {
        (g, f): [
            a
            for a in (list(ids.values()) + nonid_names)
            if dom[a] == dom[f] and cod[a] == cod[g]
        ]
        for (g, f) in slots
    }
    triples = [
        (h, g, f)
        for h in nonid_names
        for g in nonid_names
        for f in nonid_names
        if dom[h] == cod[g] and dom[g] == cod[f]
    ]
    table: Dict[Tuple[str, str], str] = {}

    def look(g: str, f: str) -> Optional[str]:
        if g in id_names:
            return f
        if f in id_names:
            return g
        return table.get((g, f))

    def consistent() -> bool:
        for h, g, f in triples:
            gf = look(g, f)
            hg = look(h, g)
            if gf is None or hg is None:
                continue
            left = look(hg, f)
            right = look(h, gf)
            if left is not None and right is not None and left != right:
                return False
        return True

    def fill(i: int) -> Iterator[FinCategory]:
        if i == len(slots):
            comp = {
                (g, f): look(g, f)
                for g in dom
                for f in dom
                if dom[g] == cod[f]
            }
            yield make_category(objects, arrows, ids, comp)
            return
        slot = slots[i]
        for v in candidates[slot]:
            table[slot] = v
            if consistent():
                yield from fill(i + 1)
        del table[slot]

    yield from fill(0)


def enumerate_categories(
    max_objects: int, max_arrows: int
) -> Iterator[FinCategory]:
    """All categories within the bounds, up to isomorphism, in
    deterministic order (by object count, arrow count, canonical key)."""
    if max_objects < 1 or max_arrows < 1:
        raise ValueError("bounds must be >= 1")
    seen = set()
    for n_obj in range(1, max_objects + 1):
        if n_obj > max_arrows:
            break
        objects = tuple(f"o{i}" for i in range(n_obj))
        for n_extra in range(0, max_arrows - n_obj + 1):
            batch = []
            for doms in itertools.combinations_with_replacement(
                itertools.product(objects, objects), n_extra
            ):
                for cat in _enumerate_tables(n_obj, doms):
                    if validate(cat):  # pragma: no cover
                        continue
                    key = canonical_key(cat)
                    if key in seen:
                        continue
                    seen.add(key)
                    batch.append((key, cat))
            for _key, cat in sorted(batch, key=lambda kv: kv[0]):
                yield cat


def automorphisms(c: FinCategory) -> List[FinFunctor]:
    """All isomorphisms c -> c."""
    return [
        fn
        for fn in enumerate_functors(c, c)
        if len(set(fn.obj_map.values())) == len(c.objects)
        and len(set(fn.arr_map.values())) == len(c.arrows)
    ]


def functor_orbit_key(
    fn: FinFunctor,
    auts_src: List[FinFunctor],
    auts_dst: List[FinFunctor],
) -> Tuple:
    """Canonical form of fn under pre/post-composition with site
    automorphisms; functors with equal keys induce geometric morphisms
    that agree on every isomorphism-invariant property."""
    best = None
    objs = fn.source.objects
    arrs = fn.source.arrow_names()
    for a in auts_src:
        for b in auts_dst:
            key = (
                tuple(b.obj_map[fn.obj_map[a.obj_map[x]]] for x in objs),
                tuple(b.arr_map[fn.arr_map[a.arr_map[h]]] for h in arrs),
            )
            if best is None or key < best:
                best = key
    return best


def oracle_agreement_sweep(
    max_objects: int,
    max_arrows: int,
    bound: int = 2,
    dedup: bool = True,
) -> Dict:
    """Compare is_locally_connected against is_locally_connected_bounded
    on every functor between enumerated sites within the bounds.

    With dedup enabled, one representative per automorphism orbit is
    checked; both procedures are invariant under composing with site
    isomorphisms, so agreement on representatives covers the orbit.
    Returns a census with the (expected empty) list of disagreements.
    """
    from .geom import is_locally_connected, is_locally_connected_bounded

    cats = list(enumerate_categories(max_objects, max_arrows))
    auts = [automorphisms(c) for c in cats]
    total = 0
    checked = 0
    holds = 0
    disagreements: List[Dict] = []
    for di, d in enumerate(cats):
        for ci, c in enumerate(cats):
            seen = set()
            for fn in enumerate_functors(c, d):
                total += 1
                if dedup:
                    key = functor_orbit_key(fn, auts[ci], auts[di])
                    if key in seen:
                        continue
                    seen.add(key)
                checked += 1
                f = GeomMorphism(fn)
                exact, _ = is_locally_connected(f)
                bnd = is_locally_connected_bounded(f, bound)
                holds += exact
                if exact != (bnd.verdict == Verdict.HOLDS_AT_BOUND):
                    disagreements.append(
                        {
                            "dom_arrows": len(c.arrows),
                            "cod_arrows": len(d.arrows),
                            "obj_map": dict(fn.obj_map),
                            "arr_map": dict(fn.arr_map),
                            "exact": exact,
                            "bounded": bnd.verdict.value,
                        }
                    )
    return {
        "categories": len(cats),
        "functors_total": total,
        "functors_checked": checked,
        "lc_holds": holds,
        "disagreements": disagreements,
    }


# -- theorem-consistency sweep ----------------------------------------------------


class BudgetExceeded(Exception):
    def __init__(self, census: Dict):
        super().__init__(f"sweep budget exceeded: {census}")
        self.census = census


@dataclass
class SweepResult:
    census: Dict[str, int]
    verdicts: List[Dict]
    counterexamples: List[Dict]
    timings: List[float] = field(default_factory=list)

    def to_json_dict(self) -> Dict:
        return {
            "census": dict(sorted(self.census.items())),
            "verdicts": self.verdicts,
            "counterexamples": self.counterexamples,
            "total_seconds": round(sum(self.timings), 3),
        }


def sweep_theorems(
    bounds: Tuple[int, int],
    sample_budget: int,
    seed: int = 0,
    time_limit: Optional[float] = None,
) -> SweepResult:
    """Instance checks over enumerated sites and functors.

    For every codomain site D within bounds and sampled functors F: C -> D:
    (a) groupoid D: every induced morphism is locally connected;
    (b) weakly-Jacobson D: cartesian-closed inverse image implies locally
        connected;
    (c) non-groupoid D: counterexample_point yields a verified witness;
    (d) pasted holds-squares still hold (checked on a fixed slate).

    Sampling is deterministic: functors are enumerated in a fixed order
    and, when they exceed the budget, thinned to evenly spaced indices
    with a seed-dependent offset.  No randomness is used.
    """
    max_obj, max_arr = bounds
    cats = list(enumerate_categories(max_obj, max_arr))
    start = time.monotonic()
    verdicts: List[Dict] = []
    counterexamples: List[Dict] = []
    timings: List[float] = []
    census = {
        "categories": len(cats),
        "groupoids": sum(1 for c in cats if is_groupoid(c)),
        "functors_checked": 0,
        "bc_squares_checked": 0,
    }

    wj_cache = {id(c): is_weakly_jacobson_presheaf(c)[0].verdict for c in cats}

    def out_of_time() -> bool:
        return time_limit is not None and time.monotonic() - start > time_limit

    # (c): once per non-groupoid codomain
    for d in cats:
        if is_groupoid(d):
            continue
        t0 = time.monotonic()
        found = counterexample_point(d)
        timings.append(time.monotonic() - t0)
        rec = {
            "check": "counterexample-point",
            "objects": len(d.objects),
            "arrows": len(d.arrows),
            "ok": found is not None,
        }
        verdicts.append(rec)
        if found is None:  # pragma: no cover
            counterexamples.append(rec)
        if out_of_time():
            raise BudgetExceeded(census)

    # (a)+(b): sampled functors
    instances: List[Tuple[FinCategory, FinCategory, FinFunctor]] = []
    for d in cats:
        for c in cats:
            for fn in enumerate_functors(c, d):
                instances.append((c, d, fn))
    if len(instances) > sample_budget:
        stride = len(instances) / sample_budget
        offset = (seed % max(1, int(stride))) if stride >= 1 else 0
        instances = [
            instances[min(len(instances) - 1, int(i * stride) + offset)]
            for i in range(sample_budget)
        ]
    for c, d, fn in instances:
        t0 = time.monotonic()
        f = GeomMorphism(fn)
        cc, _ = is_cc_inverse_image(f)
        lc, w = is_locally_connected(f)
        timings.append(time.monotonic() - t0)
        census["functors_checked"] += 1
        rec = {
            "check": "functor",
            "dom_arrows": len(c.arrows),
            "cod_arrows": len(d.arrows),
            "cc": cc,
            "lc": lc,
        }
        verdicts.append(rec)
        if is_groupoid(d) and not lc:  # pragma: no cover
            counterexamples.append({**rec, "violated": "groupoid-implies-lc"})
        if wj_cache[id(d)] == Verdict.HOLDS and cc and not lc:
            counterexamples.append({**rec, "violated": "cc-implies-lc"})
        if lc and not cc:  # pragma: no cover
            counterexamples.append({**rec, "violated": "lc-implies-cc"})
        if out_of_time():
            raise BudgetExceeded(census)

    # (d): pasting on a fixed slate of holds-squares
    slate: List[BCSquare] = []
    from .cat import identity_functor

    for d in cats[: min(5, len(cats))]:
        i = identity_functor(d)
        slate.append(BCSquare(i, i, i, i))
    for sq1, sq2 in zip(slate, slate):
        t0 = time.monotonic()
        r1 = bc_holds(sq1, 1)
        pasted = bc_holds(paste_squares(sq1, sq2), 1)
        timings.append(time.monotonic() - t0)
        census["bc_squares_checked"] += 1
        ok = (
            r1.verdict != Verdict.FAILS
            and pasted.verdict != Verdict.FAILS
        )
        rec = {"check": "bc-pasting", "ok": ok}
        verdicts.append(rec)
        if not ok:  # pragma: no cover
            counterexamples.append(rec)

    return SweepResult(census, verdicts, counterexamples, timings)
