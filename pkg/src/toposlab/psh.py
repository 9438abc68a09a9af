"""Finite-set-valued presheaves on a finite category.

A presheaf stores, for every arrow u, the restriction function
``action[u] : carrier[cod(u)] -> carrier[dom(u)]``.  Empty carriers are
first-class everywhere.  Canonical element names: pairs render as
``(x,y)``, tagged sums as ``inl(x)`` / ``inr(y)``, quotient classes are
named by their least member in carrier order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from .cat import FinCategory, FinFunctor, slice_category


@dataclass(frozen=True, eq=False)
class Presheaf:
    site: FinCategory
    carrier: Dict[str, Tuple[str, ...]]
    action: Dict[str, Dict[str, str]]

    def at(self, obj: str) -> Tuple[str, ...]:
        return self.carrier[obj]

    def act(self, u: str, x: str) -> str:
        return self.action[u][x]

    def elem_index(self, obj: str, x: str) -> int:
        return self.carrier[obj].index(x)

    def total_size(self) -> int:
        return sum(len(v) for v in self.carrier.values())

    def __repr__(self) -> str:
        return f"Presheaf({ {o: list(v) for o, v in self.carrier.items()} })"


@dataclass(frozen=True, eq=False)
class PresheafMap:
    source: Presheaf
    target: Presheaf
    components: Dict[str, Dict[str, str]]

    def at(self, obj: str, x: str) -> str:
        return self.components[obj][x]

    def __repr__(self) -> str:
        return f"PresheafMap({self.components})"


@dataclass(frozen=True, eq=False)
class Congruence:
    base: Presheaf
    partition: Dict[str, Tuple[Tuple[str, ...], ...]]


def validate_presheaf(p: Presheaf) -> List[str]:
    bad: List[str] = []
    c = p.site
    for x in c.objects:
        if x not in p.carrier:
            bad.append(f"no carrier at {x}")
    if bad:
        return bad
    for u in c.arrow_names():
        fn = p.action.get(u)
        if fn is None:
            bad.append(f"no action for {u}")
            continue
        src, dst = p.carrier[c.cod(u)], p.carrier[c.dom(u)]
        if set(fn) != set(src) or any(v not in dst for v in fn.values()):
            bad.append(f"action of {u} is not a function carrier(cod)->carrier(dom)")
    if bad:
        return bad
    for x in c.objects:
        i = c.id_of(x)
        if any(p.action[i][e] != e for e in p.carrier[x]):
            bad.append(f"identity action at {x} is not the identity")
    for g in c.arrow_names():
        for f in c.arrow_names():
            if c.dom(g) != c.cod(f):
                continue
            h = c.compose(g, f)
            for e in p.carrier[c.cod(g)]:
                if p.action[h][e] != p.action[f][p.action[g][e]]:
                    bad.append(f"contravariance fails at ({g}, {f})")
                    break
    return bad


def validate_map(m: PresheafMap) -> List[str]:
    bad: List[str] = []
    c = m.source.site
    for x in c.objects:
        comp = m.components.get(x)
        if comp is None:
            bad.append(f"no component at {x}")
            continue
        if set(comp) != set(m.source.carrier[x]) or any(
            v not in m.target.carrier[x] for v in comp.values()
        ):
            bad.append(f"component at {x} is not a function")
    if bad:
        return bad
    for u in c.arrow_names():
        x, y = c.dom(u), c.cod(u)
        for e in m.source.carrier[y]:
            if m.components[x][m.source.act(u, e)] != m.target.act(
                u, m.components[y][e]
            ):
                bad.append(f"naturality fails at {u}")
                break
    return bad


def identity_map(p: Presheaf) -> PresheafMap:
    return PresheafMap(
        p, p, {x: {e: e for e in p.carrier[x]} for x in p.site.objects}
    )


def compose_maps(m2: PresheafMap, m1: PresheafMap) -> PresheafMap:
    return PresheafMap(
        m1.source,
        m2.target,
        {
            x: {e: m2.components[x][m1.components[x][e]] for e in m1.components[x]}
            for x in m1.source.site.objects
        },
    )


def maps_equal(m1: PresheafMap, m2: PresheafMap) -> bool:
    return m1.components == m2.components


def presheaves_equal(p: Presheaf, q: Presheaf) -> bool:
    return p.carrier == q.carrier and p.action == q.action


def is_mono(m: PresheafMap) -> bool:
    return all(
        len(set(comp.values())) == len(comp) for comp in m.components.values()
    )


def is_epi(m: PresheafMap) -> bool:
    return all(
        set(m.components[x].values()) == set(m.target.carrier[x])
        for x in m.source.site.objects
    )


def is_iso(m: PresheafMap) -> bool:
    return is_mono(m) and is_epi(m)


# -- representables -----------------------------------------------------------


def yoneda(c: FinCategory, obj: str) -> Presheaf:
    """carrier(X) = Hom(X, obj), action by precomposition."""
    carrier = {x: c.hom(x, obj) for x in c.objects}
    action = {
        u: {g: c.compose(g, u) for g in carrier[c.cod(u)]}
        for u in c.arrow_names()
    }
    return Presheaf(c, carrier, action)


def yoneda_map(c: FinCategory, u: str) -> PresheafMap:
    """y(u) : y(dom u) -> y(cod u), postcomposition with u."""
    src, dst = yoneda(c, c.dom(u)), yoneda(c, c.cod(u))
    return PresheafMap(
        src,
        dst,
        {x: {g: c.compose(u, g) for g in src.carrier[x]} for x in c.objects},
    )


def element_map(p: Presheaf, obj: str, x: str) -> PresheafMap:
    """The map y(obj) -> p classifying the element x at obj (Yoneda)."""
    yo = yoneda(p.site, obj)
    return PresheafMap(
        yo,
        p,
        {
            z: {u: p.act(u, x) for u in yo.carrier[z]}
            for z in p.site.objects
        },
    )


# -- natural transformations --------------------------------------------------


def nat_transformations(p: Presheaf, q: Presheaf) -> List[PresheafMap]:
    """All natural transformations p => q, in deterministic order."""
    c = p.site
    objs = list(c.objects)
    out: List[PresheafMap] = []
    comps: Dict[str, Dict[str, str]] = {}

    def bt(i: int) -> None:
        if i == len(objs):
            out.append(PresheafMap(p, q, {x: dict(v) for x, v in comps.items()}))
            return
        x = objs[i]
        src = p.carrier[x]
        for images in itertools.product(q.carrier[x], repeat=len(src)):
            comp = dict(zip(src, images))
            ok = True
            for u in c.arrow_names():
                d, co = c.dom(u), c.cod(u)
                if d == x and co in comps:
                    if any(
                        comp[p.act(u, e)] != q.act(u, comps[co][e])
                        for e in p.carrier[co]
                    ):
                        ok = False
                        break
                if co == x and d in comps:
                    if any(
                        comps[d][p.act(u, e)] != q.act(u, comp[e])
                        for e in src
                    ):
                        ok = False
                        break
                if d == x and co == x:
                    if any(
                        comp[p.act(u, e)] != q.act(u, comp[e]) for e in src
                    ):
                        ok = False
                        break
            if ok:
                comps[x] = comp
                bt(i + 1)
                del comps[x]

    bt(0)
    return out


# -- limits and colimits -------------------------------------------------------


def _pair(x: str, y: str) -> str:
    return f"({x},{y})"


def terminal_presheaf(c: FinCategory) -> Presheaf:
    carrier = {x: ("*",) for x in c.objects}
    action = {u: {"*": "*"} for u in c.arrow_names()}
    return Presheaf(c, carrier, action)


def initial_presheaf(c: FinCategory) -> Presheaf:
    return Presheaf(
        c,
        {x: () for x in c.objects},
        {u: {} for u in c.arrow_names()},
    )


def unique_to_terminal(p: Presheaf, t: Optional[Presheaf] = None) -> PresheafMap:
    t = t if t is not None else terminal_presheaf(p.site)
    return PresheafMap(
        p,
        t,
        {
            x: {e: t.carrier[x][0] for e in p.carrier[x]}
            for x in p.site.objects
        },
    )


def product(p: Presheaf, q: Presheaf) -> Tuple[Presheaf, PresheafMap, PresheafMap]:
    c = p.site
    carrier = {
        x: tuple(_pair(a, b) for a in p.carrier[x] for b in q.carrier[x])
        for x in c.objects
    }
    raw = {
        x: [(a, b) for a in p.carrier[x] for b in q.carrier[x]]
        for x in c.objects
    }
    action = {
        u: {
            _pair(a, b): _pair(p.act(u, a), q.act(u, b))
            for (a, b) in raw[c.cod(u)]
        }
        for u in c.arrow_names()
    }
    prod = Presheaf(c, carrier, action)
    pr1 = PresheafMap(
        prod, p, {x: {_pair(a, b): a for (a, b) in raw[x]} for x in c.objects}
    )
    pr2 = PresheafMap(
        prod, q, {x: {_pair(a, b): b for (a, b) in raw[x]} for x in c.objects}
    )
    return prod, pr1, pr2


def pairing(m1: PresheafMap, m2: PresheafMap, prod: Presheaf) -> PresheafMap:
    """<m1, m2> : source -> m1.target x m2.target for a shared source."""
    return PresheafMap(
        m1.source,
        prod,
        {
            x: {
                e: _pair(m1.components[x][e], m2.components[x][e])
                for e in m1.source.carrier[x]
            }
            for x in m1.source.site.objects
        },
    )


def coproduct(p: Presheaf, q: Presheaf) -> Tuple[Presheaf, PresheafMap, PresheafMap]:
    c = p.site
    carrier = {
        x: tuple(f"inl({a})" for a in p.carrier[x])
        + tuple(f"inr({b})" for b in q.carrier[x])
        for x in c.objects
    }
    action = {}
    for u in c.arrow_names():
        fn = {}
        for a in p.carrier[c.cod(u)]:
            fn[f"inl({a})"] = f"inl({p.act(u, a)})"
        for b in q.carrier[c.cod(u)]:
            fn[f"inr({b})"] = f"inr({q.act(u, b)})"
        action[u] = fn
    cop = Presheaf(c, carrier, action)
    in1 = PresheafMap(
        p, cop, {x: {a: f"inl({a})" for a in p.carrier[x]} for x in c.objects}
    )
    in2 = PresheafMap(
        q, cop, {x: {b: f"inr({b})" for b in q.carrier[x]} for x in c.objects}
    )
    return cop, in1, in2


def equalizer(m1: PresheafMap, m2: PresheafMap) -> Tuple[Presheaf, PresheafMap]:
    c = m1.source.site
    p = m1.source
    carrier = {
        x: tuple(
            e
            for e in p.carrier[x]
            if m1.components[x][e] == m2.components[x][e]
        )
        for x in c.objects
    }
    action = {
        u: {e: p.act(u, e) for e in carrier[c.cod(u)]}
        for u in c.arrow_names()
    }
    sub = Presheaf(c, carrier, action)
    incl = PresheafMap(
        sub, p, {x: {e: e for e in carrier[x]} for x in c.objects}
    )
    return sub, incl


def quotient_by_pairs(
    q: Presheaf, seed_pairs: Dict[str, List[Tuple[str, str]]]
) -> Tuple[Presheaf, PresheafMap]:
    """Quotient of q by the action-compatible closure of the seed pairs.

    Classes are named by their least member in carrier order.
    """
    c = q.site
    parent = {
        (x, e): (x, e) for x in c.objects for e in q.carrier[x]
    }

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    def union(k1, k2) -> bool:
        r1, r2 = find(k1), find(k2)
        if r1 == r2:
            return False
        x = r1[0]
        lo, hi = sorted((r1, r2), key=lambda k: q.elem_index(k[0], k[1]))
        parent[hi] = lo
        return True

    for x, pairs in seed_pairs.items():
        for a, b in pairs:
            union((x, a), (x, b))
    changed = True
    while changed:
        changed = False
        for u in c.arrow_names():
            y, x = c.cod(u), c.dom(u)
            for a in q.carrier[y]:
                for b in q.carrier[y]:
                    if find((y, a)) == find((y, b)):
                        if union((x, q.act(u, a)), (x, q.act(u, b))):
                            changed = True

    def cls(x: str, e: str) -> str:
        return find((x, e))[1]

    carrier = {
        x: tuple(dict.fromkeys(cls(x, e) for e in q.carrier[x]))
        for x in c.objects
    }
    action = {
        u: {
            cls(c.cod(u), e): cls(c.dom(u), q.act(u, e))
            for e in q.carrier[c.cod(u)]
        }
        for u in c.arrow_names()
    }
    quot = Presheaf(c, carrier, action)
    proj = PresheafMap(
        q, quot, {x: {e: cls(x, e) for e in q.carrier[x]} for x in c.objects}
    )
    return quot, proj


def coequalizer(m1: PresheafMap, m2: PresheafMap) -> Tuple[Presheaf, PresheafMap]:
    q = m1.target
    seed = {
        x: [
            (m1.components[x][e], m2.components[x][e])
            for e in m1.source.carrier[x]
        ]
        for x in q.site.objects
    }
    return quotient_by_pairs(q, seed)


def pullback(
    m1: PresheafMap, m2: PresheafMap
) -> Tuple[Presheaf, PresheafMap, PresheafMap]:
    """Pullback of m1 : X -> B against m2 : A -> B, with projections."""
    c = m1.source.site
    x_p, a_p = m1.source, m2.source
    carrier = {}
    raw = {}
    for z in c.objects:
        elems = [
            (x, a)
            for x in x_p.carrier[z]
            for a in a_p.carrier[z]
            if m1.components[z][x] == m2.components[z][a]
        ]
        raw[z] = elems
        carrier[z] = tuple(_pair(x, a) for (x, a) in elems)
    action = {
        u: {
            _pair(x, a): _pair(x_p.act(u, x), a_p.act(u, a))
            for (x, a) in raw[c.cod(u)]
        }
        for u in c.arrow_names()
    }
    pb = Presheaf(c, carrier, action)
    pr1 = PresheafMap(
        pb, x_p, {z: {_pair(x, a): x for (x, a) in raw[z]} for z in c.objects}
    )
    pr2 = PresheafMap(
        pb, a_p, {z: {_pair(x, a): a for (x, a) in raw[z]} for z in c.objects}
    )
    return pb, pr1, pr2


# -- exponentials --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ExponentialResult:
    presheaf: Presheaf
    # per object: element name -> the underlying transformation y(x) x q => p
    table: Dict[str, Dict[str, PresheafMap]]
    base: Presheaf  # q
    power: Presheaf  # p


def exponential(p: Presheaf, q: Presheaf) -> ExponentialResult:
    """The exponential p^q: carrier(x) = Nat(y(x) x q, p)."""
    c = p.site
    yons = {x: yoneda(c, x) for x in c.objects}
    prods = {x: product(yons[x], q) for x in c.objects}
    nats = {x: nat_transformations(prods[x][0], p) for x in c.objects}
    carrier = {x: tuple(f"t{i}" for i in range(len(nats[x]))) for x in c.objects}
    table = {
        x: dict(zip(carrier[x], nats[x])) for x in c.objects
    }

    def precompose(u: str, t: PresheafMap) -> Dict[str, Dict[str, str]]:
        # u : x -> x2, t : y(x2) x q => p;  result components on y(x) x q
        x = c.dom(u)
        comps = {}
        for z in c.objects:
            fn = {}
            for v in yons[x].carrier[z]:  # v : z -> x
                for b in q.carrier[z]:
                    fn[_pair(v, b)] = t.components[z][_pair(c.compose(u, v), b)]
            comps[z] = fn
        return comps

    action = {}
    for u in c.arrow_names():
        x2, x = c.cod(u), c.dom(u)
        fn = {}
        for name, t in table[x2].items():
            moved = precompose(u, t)
            for name2, t2 in table[x].items():
                if t2.components == moved:
                    fn[name] = name2
                    break
            else:  # pragma: no cover - would indicate an enumeration bug
                raise RuntimeError("restricted transformation not found")
        action[u] = fn
    exp = Presheaf(c, carrier, action)
    return ExponentialResult(exp, table, q, p)


def evaluation_map(
    exp: ExponentialResult,
) -> Tuple[Presheaf, PresheafMap, PresheafMap, PresheafMap]:
    """(p^q x q, pr1, pr2, eval : p^q x q -> p)."""
    c = exp.presheaf.site
    prod, pr1, pr2 = product(exp.presheaf, exp.base)
    comps = {}
    for x in c.objects:
        fn = {}
        for name in exp.presheaf.carrier[x]:
            t = exp.table[x][name]
            for b in exp.base.carrier[x]:
                fn[_pair(name, b)] = t.components[x][_pair(c.id_of(x), b)]
        comps[x] = fn
    ev = PresheafMap(prod, exp.power, comps)
    return prod, pr1, pr2, ev


# -- category of elements -------------------------------------------------------


def category_of_elements(p: Presheaf) -> Tuple[FinCategory, FinFunctor]:
    """Objects (X, x in p(X)); an arrow (X,x) -> (Y,y) for each u : X -> Y
    with p(u)(y) = x.  The projection to the site is a discrete fibration."""
    c = p.site

    def on(x: str, e: str) -> str:
        return _pair(x, e)

    objects = tuple(on(x, e) for x in c.objects for e in p.carrier[x])
    arrows = []
    proj_arr = {}
    for u in c.arrow_names():
        x, y = c.dom(u), c.cod(u)
        for e in p.carrier[y]:
            name = f"{u}@{e}"
            arrows.append((name, on(x, p.act(u, e)), on(y, e)))
            proj_arr[name] = u
    identity = {
        on(x, e): f"{c.id_of(x)}@{e}" for x in c.objects for e in p.carrier[x]
    }
    comp = {}
    for (n2, d2, c2) in arrows:
        for (n1, d1, c1) in arrows:
            if d2 != c1:
                continue
            u = proj_arr[n2]
            v = proj_arr[n1]
            # n1 ends at (cod v, e1); n2 = u@e2 starts at (dom u, act(u,e2))
            e2 = n2.split("@", 1)[1]
            comp[(n2, n1)] = f"{c.compose(u, v)}@{e2}"
    elems = FinCategory(objects, tuple(arrows), identity, comp)
    proj = FinFunctor(
        elems,
        c,
        {on(x, e): x for x in c.objects for e in p.carrier[x]},
        proj_arr,
    )
    return elems, proj


# -- isomorphism and enumeration -----------------------------------------------


def presheaves_isomorphic(p: Presheaf, q: Presheaf) -> bool:
    """Existence of a natural isomorphism, by backtracking over per-object
    bijections pruned by carrier sizes."""
    c = p.site
    if any(len(p.carrier[x]) != len(q.carrier[x]) for x in c.objects):
        return False
    objs = list(c.objects)
    comps: Dict[str, Dict[str, str]] = {}

    def bt(i: int) -> bool:
        if i == len(objs):
            return True
        x = objs[i]
        src = p.carrier[x]
        for images in itertools.permutations(q.carrier[x]):
            comp = dict(zip(src, images))
            ok = True
            for u in c.arrow_names():
                d, co = c.dom(u), c.cod(u)
                if d == x and co in comps:
                    if any(
                        comp[p.act(u, e)] != q.act(u, comps[co][e])
                        for e in p.carrier[co]
                    ):
                        ok = False
                        break
                if ok and co == x and d in comps:
                    if any(
                        comps[d][p.act(u, e)] != q.act(u, comp[e])
                        for e in src
                    ):
                        ok = False
                        break
                if ok and d == x and co == x:
                    if any(comp[p.act(u, e)] != q.act(u, comp[e]) for e in src):
                        ok = False
                        break
            if ok:
                comps[x] = comp
                if bt(i + 1):
                    return True
                del comps[x]
        return False

    return bt(0)


def enumerate_presheaves(c: FinCategory, size_bound: int) -> Iterator[Presheaf]:
    """All presheaves with carriers of size <= size_bound, up to isomorphism,
    in deterministic order."""
    if size_bound < 0:
        raise ValueError("size_bound must be >= 0")
    nonid = [u for u in c.arrow_names() if not c.is_identity(u)]
    seen: List[Presheaf] = []
    for sizes in itertools.product(range(size_bound + 1), repeat=len(c.objects)):
        carrier = {
            x: tuple(f"{x}{i}" for i in range(k))
            for x, k in zip(c.objects, sizes)
        }
        choices = []
        for u in nonid:
            src, dst = carrier[c.cod(u)], carrier[c.dom(u)]
            if src and not dst:
                choices = None
                break
            fns = [
                dict(zip(src, images))
                for images in itertools.product(dst, repeat=len(src))
            ]
            choices.append(fns)
        if choices is None:
            continue
        for combo in itertools.product(*choices):
            action = dict(zip(nonid, combo))
            for x in c.objects:
                action[c.id_of(x)] = {e: e for e in carrier[x]}
            cand = Presheaf(c, dict(carrier), action)
            ok = True
            for g in c.arrow_names():
                for f in c.arrow_names():
                    if c.dom(g) != c.cod(f):
                        continue
                    h = c.compose(g, f)
                    if any(
                        action[h][e] != action[f][action[g][e]]
                        for e in carrier[c.cod(g)]
                    ):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            if any(presheaves_isomorphic(cand, old) for old in seen):
                continue
            seen.append(cand)
            yield cand


def enumerate_congruences(p: Presheaf) -> List[Dict[Tuple[str, str], Tuple[str, str]]]:
    """All action-compatible congruences of p, each as a map element-key ->
    class representative key.  Enumerated by closing joins of principal
    congruences (breadth-first over the congruence lattice)."""
    c = p.site
    keys = [(x, e) for x in c.objects for e in p.carrier[x]]

    def close(parent: Dict) -> Dict:
        def find(k):
            while parent[k] != k:
                parent[k] = parent[parent[k]]
                k = parent[k]
            return k

        changed = True
        while changed:
            changed = False
            for u in c.arrow_names():
                y, x = c.cod(u), c.dom(u)
                for a in p.carrier[y]:
                    for b in p.carrier[y]:
                        if find((y, a)) != find((y, b)):
                            continue
                        ra, rb = find((x, p.act(u, a))), find((x, p.act(u, b)))
                        if ra != rb:
                            lo, hi = sorted(
                                (ra, rb), key=lambda k: p.elem_index(k[0], k[1])
                            )
                            parent[hi] = lo
                            changed = True
        return {k: find(k) for k in keys}

    def canon(cls: Dict) -> Tuple:
        return tuple(sorted((k, v) for k, v in cls.items()))

    discrete = {k: k for k in keys}
    found = {canon(discrete): discrete}
    frontier = [discrete]
    pairs = [
        ((x, a), (x, b))
        for x in c.objects
        for i, a in enumerate(p.carrier[x])
        for b in p.carrier[x][i + 1 :]
    ]
    while frontier:
        nxt = []
        for cls in frontier:
            for (k1, k2) in pairs:
                if cls[k1] == cls[k2]:
                    continue
                parent = dict(cls)
                r1, r2 = parent[k1], parent[k2]
                lo, hi = sorted(
                    (r1, r2), key=lambda k: p.elem_index(k[0], k[1])
                )
                parent[hi] = lo
                joined = close(parent)
                key = canon(joined)
                if key not in found:
                    found[key] = joined
                    nxt.append(joined)
        frontier = nxt
    return [found[k] for k in sorted(found)]


def enumerate_quotients(
    p: Presheaf,
) -> Iterator[Tuple[Congruence, Presheaf, PresheafMap]]:
    """All action-compatible quotients of p, in deterministic order."""
    c = p.site
    for cls in enumerate_congruences(p):
        part: Dict[str, List[List[str]]] = {x: [] for x in c.objects}
        by_rep: Dict[Tuple[str, str], List[str]] = {}
        for x in c.objects:
            for e in p.carrier[x]:
                by_rep.setdefault(cls[(x, e)], []).append(e)
        for (x, _), members in by_rep.items():
            part[x].append(members)
        cong = Congruence(
            p,
            {
                x: tuple(tuple(g) for g in part[x])
                for x in c.objects
            },
        )
        carrier = {
            x: tuple(
                dict.fromkeys(cls[(x, e)][1] for e in p.carrier[x])
            )
            for x in c.objects
        }
        action = {
            u: {
                cls[(c.cod(u), e)][1]: cls[(c.dom(u), p.act(u, e))][1]
                for e in p.carrier[c.cod(u)]
            }
            for u in c.arrow_names()
        }
        quot = Presheaf(c, carrier, action)
        proj = PresheafMap(
            p,
            quot,
            {x: {e: cls[(x, e)][1] for e in p.carrier[x]} for x in c.objects},
        )
        yield cong, quot, proj
