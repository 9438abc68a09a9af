"""Finite categories and functors, stored as explicit total composition tables.

Composition is written ``compose(g, f)`` for "g after f": it is defined
exactly when ``dom(g) == cod(f)``.  All values are immutable after
construction; equality is identity-based, use :func:`find_isomorphism` or
:func:`canonical_key` for structural comparison.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

Arrow = Tuple[str, str, str]  # (name, dom, cod)
Word = Tuple[str, str, Tuple[str, ...]]  # (dom, cod, generator names, g1.g2...gk)


class NotFinitelyClosed(Exception):
    """Raised when closing a presentation exceeds the arrow bound."""

    def __init__(self, max_arrows: int):
        super().__init__(
            f"presentation did not close within {max_arrows} arrows; "
            "it may present an infinite category"
        )
        self.max_arrows = max_arrows


@dataclass(frozen=True, eq=False)
class FinCategory:
    objects: Tuple[str, ...]
    arrows: Tuple[Arrow, ...]
    identity: Dict[str, str]  # object -> arrow name
    comp: Dict[Tuple[str, str], str]  # (g, f) -> name of g.f

    _dom: Dict[str, str] = field(init=False, repr=False, compare=False)
    _cod: Dict[str, str] = field(init=False, repr=False, compare=False)
    _hom: Dict[Tuple[str, str], Tuple[str, ...]] = field(
        init=False, repr=False, compare=False
    )
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        dom = {a[0]: a[1] for a in self.arrows}
        cod = {a[0]: a[2] for a in self.arrows}
        hom: Dict[Tuple[str, str], List[str]] = {
            (x, y): [] for x in self.objects for y in self.objects
        }
        for name, d, c in self.arrows:
            if (d, c) in hom:
                hom[(d, c)].append(name)
        object.__setattr__(self, "_dom", dom)
        object.__setattr__(self, "_cod", cod)
        object.__setattr__(
            self, "_hom", {k: tuple(v) for k, v in hom.items()}
        )
        object.__setattr__(
            self, "_index", {a[0]: i for i, a in enumerate(self.arrows)}
        )

    # -- lookups ----------------------------------------------------------

    def dom(self, a: str) -> str:
        return self._dom[a]

    def cod(self, a: str) -> str:
        return self._cod[a]

    def id_of(self, x: str) -> str:
        return self.identity[x]

    def compose(self, g: str, f: str) -> str:
        """g after f; defined when dom(g) == cod(f)."""
        return self.comp[(g, f)]

    def hom(self, x: str, y: str) -> Tuple[str, ...]:
        return self._hom.get((x, y), ())

    def arrow_names(self) -> Tuple[str, ...]:
        return tuple(a[0] for a in self.arrows)

    def arrow_index(self, a: str) -> int:
        return self._index[a]

    def is_identity(self, a: str) -> bool:
        return self.identity.get(self._dom[a]) == a and self._dom[a] == self._cod[a]

    def inverse(self, a: str) -> Optional[str]:
        """Two-sided inverse of a, if any."""
        x, y = self._dom[a], self._cod[a]
        for b in self.hom(y, x):
            if (
                self.comp.get((b, a)) == self.identity[x]
                and self.comp.get((a, b)) == self.identity[y]
            ):
                return b
        return None

    def is_iso(self, a: str) -> bool:
        return self.inverse(a) is not None

    def __repr__(self) -> str:
        return (
            f"FinCategory(objects={list(self.objects)}, "
            f"arrows={[a[0] for a in self.arrows]})"
        )


def make_category(
    objects,
    arrows,
    identity,
    comp,
) -> FinCategory:
    return FinCategory(tuple(objects), tuple(arrows), dict(identity), dict(comp))


def from_generators(
    objects,
    gen_arrows,
    comp_nonid,
) -> FinCategory:
    """Build a category from non-identity arrows plus their composition table.

    Identities are auto-named ``id_<obj>`` and identity compositions are
    filled in; ``comp_nonid`` maps composable non-identity pairs (g, f) to
    arrow names (the result may be an identity).
    """
    objects = tuple(objects)
    identity = {x: f"id_{x}" for x in objects}
    arrows: List[Arrow] = [(identity[x], x, x) for x in objects]
    arrows.extend(gen_arrows)
    dom = {a[0]: a[1] for a in arrows}
    cod = {a[0]: a[2] for a in arrows}
    comp: Dict[Tuple[str, str], str] = {}
    for g_name in dom:
        for f_name in dom:
            if dom[g_name] != cod[f_name]:
                continue
            if f_name in identity.values():
                comp[(g_name, f_name)] = g_name
            elif g_name in identity.values():
                comp[(g_name, f_name)] = f_name
            else:
                comp[(g_name, f_name)] = comp_nonid[(g_name, f_name)]
    return FinCategory(objects, tuple(arrows), identity, comp)


# -- validation ------------------------------------------------------------


def validate(c: FinCategory) -> List[str]:
    """All FinCategory law violations, as human-readable descriptions."""
    bad: List[str] = []
    names = [a[0] for a in c.arrows]
    if len(set(names)) != len(names):
        bad.append("duplicate arrow names")
        return bad
    if len(set(c.objects)) != len(c.objects):
        bad.append("duplicate object names")
        return bad
    for name, d, co in c.arrows:
        if d not in c.objects or co not in c.objects:
            bad.append(f"arrow {name} has unknown endpoint")
    if bad:
        return bad
    for x in c.objects:
        i = c.identity.get(x)
        if i is None or i not in names:
            bad.append(f"object {x} has no identity arrow")
        elif c.dom(i) != x or c.cod(i) != x:
            bad.append(f"identity of {x} is not an endomorphism of {x}")
    if bad:
        return bad
    # composition table: defined exactly on composable pairs, typed correctly
    for g in names:
        for f in names:
            composable = c.dom(g) == c.cod(f)
            present = (g, f) in c.comp
            if composable and not present:
                bad.append(f"missing composite {g}.{f}")
            elif present and not composable:
                bad.append(f"spurious composite {g}.{f} (not composable)")
            elif present:
                h = c.comp[(g, f)]
                if h not in c._dom:
                    bad.append(f"composite {g}.{f} = {h} is not an arrow")
                elif c.dom(h) != c.dom(f) or c.cod(h) != c.cod(g):
                    bad.append(f"composite {g}.{f} = {h} has wrong endpoints")
    if bad:
        return bad
    for f in names:
        if c.comp[(c.identity[c.cod(f)], f)] != f:
            bad.append(f"left identity law fails at {f}")
        if c.comp[(f, c.identity[c.dom(f)])] != f:
            bad.append(f"right identity law fails at {f}")
    for h in names:
        for g in names:
            if c.dom(h) != c.cod(g):
                continue
            for f in names:
                if c.dom(g) != c.cod(f):
                    continue
                if c.comp[(h, c.comp[(g, f)])] != c.comp[(c.comp[(h, g)], f)]:
                    bad.append(f"associativity fails at ({h}, {g}, {f})")
    return bad


# -- functors ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FinFunctor:
    source: FinCategory
    target: FinCategory
    obj_map: Dict[str, str]
    arr_map: Dict[str, str]

    def on_obj(self, x: str) -> str:
        return self.obj_map[x]

    def on_arr(self, a: str) -> str:
        return self.arr_map[a]

    def __repr__(self) -> str:
        return f"FinFunctor(obj={self.obj_map}, arr={self.arr_map})"


def validate_functor(fn: FinFunctor) -> List[str]:
    bad: List[str] = []
    c, d = fn.source, fn.target
    for x in c.objects:
        if fn.obj_map.get(x) not in d.objects:
            bad.append(f"object {x} not mapped into target")
    for a in c.arrow_names():
        b = fn.arr_map.get(a)
        if b is None or b not in d._dom:
            bad.append(f"arrow {a} not mapped into target")
            continue
        if d.dom(b) != fn.obj_map[c.dom(a)] or d.cod(b) != fn.obj_map[c.cod(a)]:
            bad.append(f"arrow {a} image has wrong endpoints")
    if bad:
        return bad
    for x in c.objects:
        if fn.arr_map[c.id_of(x)] != d.id_of(fn.obj_map[x]):
            bad.append(f"identity of {x} not preserved")
    for g in c.arrow_names():
        for f in c.arrow_names():
            if c.dom(g) != c.cod(f):
                continue
            if fn.arr_map[c.compose(g, f)] != d.compose(
                fn.arr_map[g], fn.arr_map[f]
            ):
                bad.append(f"composition not preserved at ({g}, {f})")
    return bad


def identity_functor(c: FinCategory) -> FinFunctor:
    return FinFunctor(
        c, c, {x: x for x in c.objects}, {a: a for a in c.arrow_names()}
    )


def compose_functors(g: FinFunctor, f: FinFunctor) -> FinFunctor:
    return FinFunctor(
        f.source,
        g.target,
        {x: g.obj_map[y] for x, y in f.obj_map.items()},
        {a: g.arr_map[b] for a, b in f.arr_map.items()},
    )


def enumerate_functors(c: FinCategory, d: FinCategory) -> Iterator[FinFunctor]:
    """All functors c -> d, in deterministic order, via backtracking."""
    c_arrows = [a for a in c.arrow_names() if not c.is_identity(a)]

    for obj_images in itertools.product(d.objects, repeat=len(c.objects)):
        obj_map = dict(zip(c.objects, obj_images))
        arr_map = {c.id_of(x): d.id_of(obj_map[x]) for x in c.objects}

        def assign(i: int) -> Iterator[Dict[str, str]]:
            if i == len(c_arrows):
                yield dict(arr_map)
                return
            a = c_arrows[i]
            for b in d.hom(obj_map[c.dom(a)], obj_map[c.cod(a)]):
                arr_map[a] = b
                ok = True
                for x in list(arr_map):
                    # check all composites among already-assigned arrows
                    if c.dom(a) == c.cod(x):
                        h = c.compose(a, x)
                        if h in arr_map and arr_map[h] != d.compose(b, arr_map[x]):
                            ok = False
                            break
                    if c.dom(x) == c.cod(a):
                        h = c.compose(x, a)
                        if h in arr_map and arr_map[h] != d.compose(arr_map[x], b):
                            ok = False
                            break
                if ok:
                    yield from assign(i + 1)
            arr_map.pop(a, None)

        for full in assign(0):
            fn = FinFunctor(c, d, dict(obj_map), full)
            # composites of assigned arrows may land on not-yet-checked arrows;
            # final exhaustive check keeps the generator simple
            if not validate_functor(fn):
                yield fn


# -- purely categorical predicates ------------------------------------------


def is_groupoid(c: FinCategory) -> bool:
    return all(c.is_iso(a) for a in c.arrow_names())


def right_inv_implies_iso(
    c: FinCategory,
) -> Tuple[bool, Optional[Tuple[str, str]]]:
    """True iff every a with a right inverse b (a.b = id) is an isomorphism.

    On failure, returns the offending pair (a, b).
    """
    for a in c.arrow_names():
        for b in c.hom(c.cod(a), c.dom(a)):
            if c.compose(a, b) != c.id_of(c.cod(a)):
                continue
            if not (c.is_iso(a) and c.is_iso(b)):
                return False, (a, b)
    return True, None


def terminal_object(c: FinCategory) -> Optional[str]:
    for t in c.objects:
        if all(len(c.hom(x, t)) == 1 for x in c.objects):
            return t
    return None


def has_strict_terminal(c: FinCategory) -> bool:
    t = terminal_object(c)
    if t is None:
        return False
    return all(c.is_iso(a) for a in c.arrow_names() if c.dom(a) == t)


# -- slice, opposite, Cauchy completion --------------------------------------


def opposite(c: FinCategory) -> FinCategory:
    arrows = tuple((n, co, d) for (n, d, co) in c.arrows)
    comp = {(g, f): c.comp[(f, g)] for (f, g) in c.comp}
    return FinCategory(c.objects, arrows, dict(c.identity), comp)


def slice_category(c: FinCategory, obj: str) -> Tuple[FinCategory, FinFunctor]:
    """The slice c/obj plus the projection functor to c.

    Objects are arrows into obj; a morphism f -> g is an arrow u with
    g.u = f, named ``u:f>g``.
    """
    if obj not in c.objects:
        raise ValueError(f"{obj} is not an object")
    objs = tuple(a for a in c.arrow_names() if c.cod(a) == obj)
    arrows: List[Arrow] = []
    proj_arr: Dict[str, str] = {}
    for f in objs:
        for g in objs:
            for u in c.hom(c.dom(f), c.dom(g)):
                if c.compose(g, u) == f:
                    name = f"{u}:{f}>{g}"
                    arrows.append((name, f, g))
                    proj_arr[name] = u
    identity = {f: f"{c.id_of(c.dom(f))}:{f}>{f}" for f in objs}
    comp: Dict[Tuple[str, str], str] = {}
    for (n2, f2, g2) in arrows:
        for (n1, f1, g1) in arrows:
            if f2 != g1:
                continue
            u = c.compose(proj_arr[n2], proj_arr[n1])
            comp[(n2, n1)] = f"{u}:{f1}>{g2}"
    sl = FinCategory(objs, tuple(arrows), identity, comp)
    proj = FinFunctor(sl, c, {f: c.dom(f) for f in objs}, proj_arr)
    return sl, proj


def cauchy_completion(c: FinCategory) -> Tuple[FinCategory, FinFunctor]:
    """Skeletal idempotent-splitting completion, plus the inclusion of c.

    Objects are idempotent arrows of c, merged along isomorphism with the
    least (in arrow order) idempotent as representative.
    """
    idems = [
        a
        for a in c.arrow_names()
        if c.dom(a) == c.cod(a) and c.compose(a, a) == a
    ]

    def hom_ee(e: str, e2: str) -> List[str]:
        return [
            a
            for a in c.hom(c.dom(e), c.dom(e2))
            if c.compose(e2, c.compose(a, e)) == a
        ]

    # merge isomorphic objects of the completion
    rep = {e: e for e in idems}

    def find(e: str) -> str:
        while rep[e] != e:
            e = rep[e]
        return e

    iso_pair: Dict[Tuple[str, str], Tuple[str, str]] = {}
    for i, e in enumerate(idems):
        for e2 in idems[i + 1 :]:
            for u in hom_ee(e, e2):
                done = False
                for v in hom_ee(e2, e):
                    if c.compose(v, u) == e and c.compose(u, v) == e2:
                        iso_pair[(e, e2)] = (u, v)
                        iso_pair[(e2, e)] = (v, u)
                        a, b = find(e), find(e2)
                        if a != b:
                            lo, hi = sorted(
                                (a, b), key=lambda n: c.arrow_index(n)
                            )
                            rep[hi] = lo
                        done = True
                        break
                if done:
                    break

    reps = sorted({find(e) for e in idems}, key=lambda n: c.arrow_index(n))

    def aname(a: str, e: str, e2: str) -> str:
        return f"{a}[{e}>{e2}]"

    arrows: List[Arrow] = []
    under: Dict[str, str] = {}
    for e in reps:
        for e2 in reps:
            for a in hom_ee(e, e2):
                arrows.append((aname(a, e, e2), e, e2))
                under[aname(a, e, e2)] = a
    identity = {e: aname(e, e, e) for e in reps}
    comp: Dict[Tuple[str, str], str] = {}
    for (n2, e2a, e2b) in arrows:
        for (n1, e1a, e1b) in arrows:
            if e2a != e1b:
                continue
            comp[(n2, n1)] = aname(c.compose(under[n2], under[n1]), e1a, e2b)
    skel = FinCategory(tuple(reps), tuple(arrows), identity, comp)

    # inclusion: conjugate along the chosen isos into the representatives
    def to_rep(e: str) -> Tuple[str, str]:
        """(u: e -> rep, v: rep -> e) with v.u = e, u.v = rep."""
        r = find(e)
        if r == e:
            return e, e
        # compress the merge chain into one iso pair
        u, v = e, e
        cur = e
        while cur != r:
            nxt = rep[cur]
            if cur == e:
                u, v = iso_pair[(cur, nxt)]
            else:
                u2, v2 = iso_pair[(cur, nxt)]
                u, v = c.compose(u2, u), c.compose(v, v2)
            cur = nxt
        return u, v

    obj_map = {x: find(c.id_of(x)) for x in c.objects}
    arr_map: Dict[str, str] = {}
    for a in c.arrow_names():
        x, y = c.dom(a), c.cod(a)
        ux, vx = to_rep(c.id_of(x))
        uy, vy = to_rep(c.id_of(y))
        conj = c.compose(uy, c.compose(a, vx))
        arr_map[a] = aname(conj, obj_map[x], obj_map[y])
    incl = FinFunctor(c, skel, obj_map, arr_map)
    return skel, incl


# -- isomorphism search -------------------------------------------------------


def _object_signature(c: FinCategory, x: str) -> Tuple:
    outs = tuple(sorted(len(c.hom(x, y)) for y in c.objects))
    ins = tuple(sorted(len(c.hom(y, x)) for y in c.objects))
    return (len(c.hom(x, x)), outs, ins)


def find_isomorphism(
    c1: FinCategory, c2: FinCategory
) -> Optional[Tuple[FinFunctor, FinFunctor]]:
    """An isomorphism of categories (a pair of mutually inverse functors)
    if one exists, found by backtracking pruned by degree invariants."""
    if len(c1.objects) != len(c2.objects) or len(c1.arrows) != len(c2.arrows):
        return None
    sig1 = {x: _object_signature(c1, x) for x in c1.objects}
    sig2 = {x: _object_signature(c2, x) for x in c2.objects}
    if sorted(sig1.values()) != sorted(sig2.values()):
        return None

    objs1 = list(c1.objects)

    def try_obj(i: int, omap: Dict[str, str], used: set) -> Optional[FinFunctor]:
        if i == len(objs1):
            return match_arrows(omap)
        x = objs1[i]
        for y in c2.objects:
            if y in used or sig1[x] != sig2[y]:
                continue
            if any(
                len(c1.hom(x, z)) != len(c2.hom(y, omap[z]))
                or len(c1.hom(z, x)) != len(c2.hom(omap[z], y))
                for z in omap
            ):
                continue
            omap[x] = y
            used.add(y)
            got = try_obj(i + 1, omap, used)
            if got is not None:
                return got
            del omap[x]
            used.discard(y)
        return None

    def match_arrows(omap: Dict[str, str]) -> Optional[FinFunctor]:
        arrows1 = [a for a in c1.arrow_names() if not c1.is_identity(a)]
        amap = {c1.id_of(x): c2.id_of(omap[x]) for x in c1.objects}

        def bt(i: int, used: set) -> bool:
            if i == len(arrows1):
                cand = FinFunctor(c1, c2, dict(omap), dict(amap))
                return not validate_functor(cand)
            a = arrows1[i]
            for b in c2.hom(omap[c1.dom(a)], omap[c1.cod(a)]):
                if b in used or c2.is_identity(b):
                    continue
                amap[a] = b
                ok = True
                for x, bx in list(amap.items()):
                    if c1.dom(a) == c1.cod(x):
                        h = c1.compose(a, x)
                        if h in amap and amap[h] != c2.compose(b, bx):
                            ok = False
                            break
                    if ok and c1.dom(x) == c1.cod(a):
                        h = c1.compose(x, a)
                        if h in amap and amap[h] != c2.compose(bx, b):
                            ok = False
                            break
                if ok:
                    used.add(b)
                    if bt(i + 1, used):
                        return True
                    used.discard(b)
            amap.pop(a, None)
            return False

        if not bt(0, set()):
            return None
        return FinFunctor(c1, c2, dict(omap), dict(amap))

    fwd = try_obj(0, {}, set())
    if fwd is None:
        return None
    inv_obj = {y: x for x, y in fwd.obj_map.items()}
    inv_arr = {b: a for a, b in fwd.arr_map.items()}
    bwd = FinFunctor(c2, c1, inv_obj, inv_arr)
    return fwd, bwd


def canonical_key(c: FinCategory) -> Tuple:
    """A relabelling-invariant certificate: equal keys iff isomorphic.

    Computed as the minimum table serialization over all object
    permutations and all permutations of non-identity arrows.  Intended
    for categories of desk scale only.
    """
    n = len(c.objects)
    nonid = [a for a in c.arrow_names() if not c.is_identity(a)]
    best = None
    for operm in itertools.permutations(range(n)):
        oidx = {x: operm[i] for i, x in enumerate(c.objects)}
        for aperm in itertools.permutations(range(len(nonid))):
            aidx = {a: n + aperm[i] for i, a in enumerate(nonid)}
            for x in c.objects:
                aidx[c.id_of(x)] = oidx[x]
            doms = tuple(
                d
                for _, d in sorted(
                    (aidx[a], oidx[c.dom(a)]) for a in c.arrow_names()
                )
            )
            cods = tuple(
                d
                for _, d in sorted(
                    (aidx[a], oidx[c.cod(a)]) for a in c.arrow_names()
                )
            )
            table = tuple(sorted(
                (aidx[g], aidx[f], aidx[h]) for (g, f), h in c.comp.items()
            ))
            key = (n, doms, cods, table)
            if best is None or key < best:
                best = key
    return best


# -- presentations ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CatPresentation:
    objects: Tuple[str, ...]
    generators: Tuple[Arrow, ...]
    relations: Tuple[Tuple[Word, Word], ...]


def empty_word(obj: str) -> Word:
    return (obj, obj, ())


def word_of(p: CatPresentation, names) -> Word:
    """Typed word g1.g2...gk (composition right-to-left); raises on
    non-composable sequences."""
    dom = {a[0]: a[1] for a in p.generators}
    cod = {a[0]: a[2] for a in p.generators}
    names = tuple(names)
    if not names:
        raise ValueError("empty word needs an object; use empty_word")
    for g in names:
        if g not in dom:
            raise ValueError(f"unknown generator {g}")
    for a, b in zip(names, names[1:]):
        if dom[a] != cod[b]:
            raise ValueError(f"non-composable pair {a}.{b}")
    return (dom[names[-1]], cod[names[0]], names)


def validate_presentation(p: CatPresentation) -> List[str]:
    bad: List[str] = []
    names = [g[0] for g in p.generators]
    if len(set(names)) != len(names):
        bad.append("duplicate generator names")
    for name, d, c in p.generators:
        if d not in p.objects or c not in p.objects:
            bad.append(f"generator {name} has unknown endpoint")
    for lhs, rhs in p.relations:
        if (lhs[0], lhs[1]) != (rhs[0], rhs[1]):
            bad.append(f"relation sides not parallel: {lhs} = {rhs}")
    return bad


_WORD_CAP = 200000


def close_presentation(p: CatPresentation, max_arrows: int) -> FinCategory:
    """Close a presentation into a composition table.

    Words are enumerated breadth-first; the congruence generated by the
    relations is computed with union-find over single subword
    replacements.  Word classes are named by their shortest-then-lex
    representative.  Raises NotFinitelyClosed if the quotient does not
    stabilize within max_arrows arrows.
    """
    bad = validate_presentation(p)
    if bad:
        raise ValueError("; ".join(bad))
    gens = {a[0]: (a[1], a[2]) for a in p.generators}
    maxrel = max((len(w[2]) for rel in p.relations for w in rel), default=1)

    def words_upto(limit: int) -> List[Word]:
        out: List[Word] = [empty_word(x) for x in p.objects]
        layer: List[Word] = list(out)
        for _ in range(limit):
            nxt: List[Word] = []
            for (d, c, ns) in layer:
                for g, (gd, gc) in gens.items():
                    if gc == d:  # extend on the right: w.g
                        nxt.append((gd, c, ns + (g,)))
            out.extend(nxt)
            layer = nxt
            if len(out) > _WORD_CAP:
                raise NotFinitelyClosed(max_arrows)
        return out

    L = max(1, maxrel)
    while True:
        words = words_upto(2 * L)
        index = {w: i for i, w in enumerate(words)}
        parent = list(range(len(words)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        def union(i: int, j: int) -> None:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

        moves = []
        for lhs, rhs in p.relations:
            moves.append((lhs, rhs))
            moves.append((rhs, lhs))
        for w in words:
            d, c, ns = w
            i = index[w]
            for (src, dst) in moves:
                sd, sc, sns = src
                k = len(sns)
                if k == 0:
                    # insert dst at any boundary typed at sd == sc
                    for pos in range(len(ns) + 1):
                        at = c if pos == 0 else gens[ns[pos - 1]][0]
                        if at != sd:
                            continue
                        w2 = (d, c, ns[:pos] + dst[2] + ns[pos:])
                        j = index.get(w2)
                        if j is not None:
                            union(i, j)
                else:
                    for pos in range(len(ns) - k + 1):
                        if ns[pos : pos + k] == sns:
                            w2 = (d, c, ns[:pos] + dst[2] + ns[pos + k:])
                            j = index.get(w2)
                            if j is not None:
                                union(i, j)

        # representative of each class: shortest-then-lex word
        classes: Dict[int, Word] = {}
        for w in words:
            r = find(index[w])
            cur = classes.get(r)
            if cur is None or (len(w[2]), w[2]) < (len(cur[2]), cur[2]):
                classes[r] = w

        def rep(w: Word) -> Word:
            return classes[find(index[w])]

        reps = sorted(
            {rep(w) for w in words if len(rep(w)[2]) <= L},
            key=lambda w: (len(w[2]), w[2]),
        )
        if len(reps) > max_arrows:
            raise NotFinitelyClosed(max_arrows)

        closed = True
        for (d2, c2, n2) in reps:
            for (d1, c1, n1) in reps:
                if d2 != c1:
                    continue
                r = rep((d1, c2, n2 + n1))
                if len(r[2]) > L:
                    closed = False
                    break
            if not closed:
                break

        if closed:
            def render(w: Word) -> str:
                return f"id_{w[0]}" if not w[2] else ".".join(w[2])

            arrows = tuple((render(w), w[0], w[1]) for w in reps)
            identity = {x: f"id_{x}" for x in p.objects}
            comp = {}
            for w2 in reps:
                for w1 in reps:
                    if w2[0] != w1[1]:
                        continue
                    comp[(render(w2), render(w1))] = render(
                        rep((w1[0], w2[1], w2[2] + w1[2]))
                    )
            cat = FinCategory(p.objects, arrows, identity, comp)
            if not validate(cat):
                return cat
            # non-confluent at this depth: look further
        L += 1
        if L > max_arrows + maxrel + 2:
            raise NotFinitelyClosed(max_arrows)
