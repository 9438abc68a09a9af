"""Line-oriented presentation files for sites, functors, presheaves, and
spaces.

Grammar ('#' starts a comment; one clause per line):

    category NAME {
      objects: a, b
      arrows: f: a -> b, g: b -> b
      relations: g.g = g          # optional; '.' composes right-to-left
      # or, instead of relations, a total explicit table:
      table: g.f = h
    }
    functor NAME : CAT1 -> CAT2 {
      obj: a -> x
      arr: f -> u
    }
    presheaf NAME on CAT {
      at a: {e1, e2}
      act f: e1 -> e3, e2 -> e3   # maps carrier(cod f) to carrier(dom f)
    }
    space NAME {
      points: p, q
      opens: {}, {q}, {p, q}
    }

Relations and tables may use the atoms id_<object> for identities.
Composition g.f means "g after f" throughout.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .cat import (
    CatPresentation,
    FinCategory,
    FinFunctor,
    close_presentation,
    empty_word,
    make_category,
    word_of,
)
from .psh import Presheaf
from .space import FinSpace


class DslError(Exception):
    def __init__(self, message: str, line: int, col: int, token: str):
        super().__init__(f"line {line}, col {col}: {message} (at {token!r})")
        self.line = line
        self.col = col
        self.token = token


class ParseError(DslError):
    pass


class ResolutionError(DslError):
    pass


class ArityError(DslError):
    pass


_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_ARROW_NAME = rf"{_NAME}(?:\.{_NAME})*"

DEFAULT_MAX_ARROWS = 128


@dataclass(frozen=True)
class CategoryDecl:
    name: str
    objects: Tuple[str, ...]
    gen_arrows: Tuple[Tuple[str, str, str], ...]  # (name, dom, cod)
    relations: Tuple[Tuple[Tuple[str, ...], Tuple[str, ...]], ...]
    table: Tuple[Tuple[str, str, str], ...]  # ((g, f), h) flattened


@dataclass(frozen=True)
class FunctorDecl:
    name: str
    source: str
    target: str
    obj_map: Tuple[Tuple[str, str], ...]
    arr_map: Tuple[Tuple[str, str], ...]


@dataclass(frozen=True)
class PresheafDecl:
    name: str
    site: str
    carriers: Tuple[Tuple[str, Tuple[str, ...]], ...]
    actions: Tuple[Tuple[str, Tuple[Tuple[str, str], ...]], ...]


@dataclass(frozen=True)
class SpaceDecl:
    name: str
    points: Tuple[str, ...]
    opens: Tuple[Tuple[str, ...], ...]


@dataclass
class Document:
    decls: Tuple = ()
    categories: Dict[str, FinCategory] = field(default_factory=dict)
    functors: Dict[str, FinFunctor] = field(default_factory=dict)
    presheaves: Dict[str, Presheaf] = field(default_factory=dict)
    spaces: Dict[str, FinSpace] = field(default_factory=dict)


class _Lines:
    def __init__(self, text: str):
        self.raw = text.split("\n")
        self.pos = 0

    def next_content(self) -> Optional[Tuple[int, str]]:
        while self.pos < len(self.raw):
            lineno = self.pos + 1
            line = self.raw[self.pos].split("#", 1)[0].rstrip()
            self.pos += 1
            if line.strip():
                return lineno, line
        return None


def _col_of(line_text: str, token: str) -> int:
    i = line_text.find(token)
    return i + 1 if i >= 0 else 1


def _split_commas(s: str) -> List[str]:
    """Split on top-level commas, respecting {...} groups."""
    out, depth, cur = [], 0, []
    for ch in s:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    last = "".join(cur).strip()
    if last or out:
        out.append(last)
    return [x for x in out if x != ""]


def parse(text: str, max_arrows: int = DEFAULT_MAX_ARROWS) -> Document:
    lines = _Lines(text)
    decls: List = []
    doc = Document()
    while True:
        nxt = lines.next_content()
        if nxt is None:
            break
        lineno, line = nxt
        stripped = line.strip()
        m = re.fullmatch(rf"category\s+({_NAME})\s*\{{", stripped)
        if m:
            decls.append(_parse_category(m.group(1), lines, doc, lineno, max_arrows))
            continue
        m = re.fullmatch(
            rf"functor\s+({_NAME})\s*:\s*({_NAME})\s*->\s*({_NAME})\s*\{{",
            stripped,
        )
        if m:
            decls.append(
                _parse_functor(m.group(1), m.group(2), m.group(3), lines, doc, lineno)
            )
            continue
        m = re.fullmatch(rf"presheaf\s+({_NAME})\s+on\s+({_NAME})\s*\{{", stripped)
        if m:
            decls.append(_parse_presheaf(m.group(1), m.group(2), lines, doc, lineno))
            continue
        m = re.fullmatch(rf"space\s+({_NAME})\s*\{{", stripped)
        if m:
            decls.append(_parse_space(m.group(1), lines, doc, lineno))
            continue
        tok = stripped.split()[0]
        raise ParseError(
            "expected a category/functor/presheaf/space declaration",
            lineno,
            _col_of(line, tok),
            tok,
        )
    doc.decls = tuple(decls)
    return doc


def _block_lines(lines: _Lines, open_line: int) -> List[Tuple[int, str]]:
    body = []
    while True:
        nxt = lines.next_content()
        if nxt is None:
            raise ParseError("unterminated block", open_line, 1, "{")
        lineno, line = nxt
        if line.strip() == "}":
            return body
        body.append((lineno, line))


def _dup_check(name: str, table: Dict, kind: str, lineno: int, line: str):
    if name in table:
        raise ParseError(
            f"duplicate {kind} name", lineno, _col_of(line, name), name
        )


def _parse_category(
    name: str, lines: _Lines, doc: Document, open_line: int, max_arrows: int
):
    _dup_check(name, doc.categories, "category", open_line, name)
    objects: Tuple[str, ...] = ()
    gen_arrows: List[Tuple[str, str, str]] = []
    relations: List[Tuple[Tuple[str, ...], Tuple[str, ...]]] = []
    table: List[Tuple[str, str, str]] = []
    has_relations = False
    for lineno, line in _block_lines(lines, open_line):
        key, _, rest = line.strip().partition(":")
        key = key.strip()
        rest = rest.strip()
        if key == "objects":
            objects = tuple(_split_commas(rest))
            for o in objects:
                if not re.fullmatch(_NAME, o):
                    raise ParseError(
                        "bad object name", lineno, _col_of(line, o), o
                    )
        elif key == "arrows":
            for item in _split_commas(rest):
                m = re.fullmatch(
                    rf"({_NAME})\s*:\s*({_NAME})\s*->\s*({_NAME})", item
                )
                if not m:
                    raise ParseError(
                        "expected 'name: dom -> cod'",
                        lineno,
                        _col_of(line, item),
                        item,
                    )
                a, d, c = m.groups()
                for end in (d, c):
                    if end not in objects:
                        raise ResolutionError(
                            "unknown object", lineno, _col_of(line, end), end
                        )
                gen_arrows.append((a, d, c))
        elif key in ("relations", "table"):
            if key == "relations":
                has_relations = True
            for item in _split_commas(rest):
                m = re.fullmatch(
                    rf"({_ARROW_NAME})\s*=\s*({_ARROW_NAME})", item
                )
                if not m:
                    raise ParseError(
                        "expected 'word = word'",
                        lineno,
                        _col_of(line, item),
                        item,
                    )
                lhs = tuple(m.group(1).split("."))
                rhs = tuple(m.group(2).split("."))
                if key == "relations":
                    relations.append((lhs, rhs))
                else:
                    if len(lhs) != 2 or len(rhs) != 1:
                        raise ParseError(
                            "table entries are 'g.f = h'",
                            lineno,
                            _col_of(line, item),
                            item,
                        )
                    table.append((lhs[0], lhs[1], rhs[0]))
        else:
            raise ParseError(
                "unknown clause in category block",
                lineno,
                _col_of(line, key or line.strip()),
                key or line.strip(),
            )
    decl = CategoryDecl(
        name, objects, tuple(gen_arrows), tuple(relations), tuple(table)
    )
    if table and has_relations:
        raise ParseError(
            "category has both relations and table", open_line, 1, name
        )
    doc.categories[name] = _build_category(decl, open_line, max_arrows)
    return decl


def _strip_id_atoms(
    decl: CategoryDecl, word: Tuple[str, ...], lineno: int
) -> Tuple[str, ...]:
    gen_names = {a for a, _, _ in decl.gen_arrows}
    out = []
    for atom in word:
        if atom in gen_names:
            out.append(atom)
        elif atom.startswith("id_") and atom[3:] in decl.objects:
            continue
        else:
            raise ResolutionError("unknown arrow", lineno, 1, atom)
    return tuple(out)


def _word_object(decl: CategoryDecl, word: Tuple[str, ...]) -> Optional[str]:
    """For a word of only identity atoms, the object they sit at."""
    objs = {atom[3:] for atom in word}
    return objs.pop() if len(objs) == 1 else None


def _build_category(
    decl: CategoryDecl, lineno: int, max_arrows: int
) -> FinCategory:
    if decl.table:
        return _build_table_category(decl, lineno)
    pres = CatPresentation(decl.objects, decl.gen_arrows, ())
    rels = []
    for lhs, rhs in decl.relations:
        words = []
        for side in (lhs, rhs):
            stripped = _strip_id_atoms(decl, side, lineno)
            if stripped:
                try:
                    words.append(word_of(pres, stripped))
                except ValueError as exc:
                    raise ArityError(str(exc), lineno, 1, ".".join(side))
            else:
                obj = _word_object(decl, side)
                if obj is None:
                    raise ArityError(
                        "identity atoms at different objects",
                        lineno,
                        1,
                        ".".join(side),
                    )
                words.append(empty_word(obj))
        if (words[0][0], words[0][1]) != (words[1][0], words[1][1]):
            raise ArityError(
                "relation sides are not parallel",
                lineno,
                1,
                ".".join(lhs) + " = " + ".".join(rhs),
            )
        rels.append((words[0], words[1]))
    pres = CatPresentation(decl.objects, decl.gen_arrows, tuple(rels))
    return close_presentation(pres, max_arrows)


def _build_table_category(decl: CategoryDecl, lineno: int) -> FinCategory:
    ids = {x: f"id_{x}" for x in decl.objects}
    arrows = tuple((ids[x], x, x) for x in decl.objects) + decl.gen_arrows
    names = {a[0]: (a[1], a[2]) for a in arrows}
    comp: Dict[Tuple[str, str], str] = {}
    for g, f, h in decl.table:
        for x in (g, f, h):
            if x not in names:
                raise ResolutionError("unknown arrow", lineno, 1, x)
        if names[g][0] != names[f][1]:
            raise ArityError(f"non-composable pair {g}.{f}", lineno, 1, g)
        comp[(g, f)] = h
    # identity compositions are implied
    for a, (d, c) in names.items():
        comp.setdefault((ids[c], a), a)
        comp.setdefault((a, ids[d]), a)
    for g, (gd, gc) in names.items():
        for f, (fd, fc) in names.items():
            if gd == fc and (g, f) not in comp:
                raise ArityError(
                    f"table is missing the entry {g}.{f}", lineno, 1, g
                )
    return make_category(decl.objects, arrows, ids, comp)


def _parse_functor(
    name: str, src: str, dst: str, lines: _Lines, doc: Document, open_line: int
):
    _dup_check(name, doc.functors, "functor", open_line, name)
    for cname in (src, dst):
        if cname not in doc.categories:
            raise ResolutionError("unknown category", open_line, 1, cname)
    c, d = doc.categories[src], doc.categories[dst]
    obj_map: Dict[str, str] = {}
    arr_map: Dict[str, str] = {}
    pairs_o: List[Tuple[str, str]] = []
    pairs_a: List[Tuple[str, str]] = []
    for lineno, line in _block_lines(lines, open_line):
        key, _, rest = line.strip().partition(":")
        key = key.strip()
        items = _split_commas(rest.strip())
        if key == "obj":
            for item in items:
                m = re.fullmatch(rf"({_NAME})\s*->\s*({_NAME})", item)
                if not m:
                    raise ParseError(
                        "expected 'a -> x'", lineno, _col_of(line, item), item
                    )
                a, x = m.groups()
                if a not in c.objects:
                    raise ResolutionError(
                        "unknown source object", lineno, _col_of(line, a), a
                    )
                if x not in d.objects:
                    raise ResolutionError(
                        "unknown target object", lineno, _col_of(line, x), x
                    )
                obj_map[a] = x
                pairs_o.append((a, x))
        elif key == "arr":
            for item in items:
                m = re.fullmatch(
                    rf"({_ARROW_NAME})\s*->\s*({_ARROW_NAME})", item
                )
                if not m:
                    raise ParseError(
                        "expected 'f -> u'", lineno, _col_of(line, item), item
                    )
                a, u = m.groups()
                if a not in c.arrow_names():
                    raise ResolutionError(
                        "unknown source arrow", lineno, _col_of(line, a), a
                    )
                if u not in d.arrow_names():
                    raise ResolutionError(
                        "unknown target arrow", lineno, _col_of(line, u), u
                    )
                arr_map[a] = u
                pairs_a.append((a, u))
        else:
            raise ParseError(
                "unknown clause in functor block",
                lineno,
                _col_of(line, key or line.strip()),
                key or line.strip(),
            )
    for x in c.objects:
        if x not in obj_map:
            raise ResolutionError(
                "object not mapped", open_line, 1, x
            )
        arr_map.setdefault(c.id_of(x), d.id_of(obj_map[x]))
    for a in c.arrow_names():
        if a not in arr_map:
            raise ResolutionError("arrow not mapped", open_line, 1, a)
    doc.functors[name] = FinFunctor(c, d, obj_map, arr_map)
    return FunctorDecl(name, src, dst, tuple(pairs_o), tuple(pairs_a))


def _parse_presheaf(
    name: str, site_name: str, lines: _Lines, doc: Document, open_line: int
):
    _dup_check(name, doc.presheaves, "presheaf", open_line, name)
    if site_name not in doc.categories:
        raise ResolutionError("unknown category", open_line, 1, site_name)
    c = doc.categories[site_name]
    carrier: Dict[str, Tuple[str, ...]] = {}
    actions: Dict[str, Dict[str, str]] = {}
    raw_c: List[Tuple[str, Tuple[str, ...]]] = []
    raw_a: List[Tuple[str, Tuple[Tuple[str, str], ...]]] = []
    for lineno, line in _block_lines(lines, open_line):
        stripped = line.strip()
        m = re.fullmatch(rf"at\s+({_NAME})\s*:\s*\{{(.*)\}}", stripped)
        if m:
            obj, inner = m.groups()
            if obj not in c.objects:
                raise ResolutionError(
                    "unknown object", lineno, _col_of(line, obj), obj
                )
            elems = tuple(_split_commas(inner))
            carrier[obj] = elems
            raw_c.append((obj, elems))
            continue
        m = re.fullmatch(rf"act\s+({_ARROW_NAME})\s*:\s*(.*)", stripped)
        if m:
            arr, rest = m.groups()
            if arr not in c.arrow_names():
                raise ResolutionError(
                    "unknown arrow", lineno, _col_of(line, arr), arr
                )
            fnmap: Dict[str, str] = {}
            pairs: List[Tuple[str, str]] = []
            for item in _split_commas(rest):
                mm = re.fullmatch(r"(\S+)\s*->\s*(\S+)", item)
                if not mm:
                    raise ParseError(
                        "expected 'e -> e2'",
                        lineno,
                        _col_of(line, item),
                        item,
                    )
                fnmap[mm.group(1)] = mm.group(2)
                pairs.append((mm.group(1), mm.group(2)))
            actions[arr] = fnmap
            raw_a.append((arr, tuple(pairs)))
            continue
        tok = stripped.split()[0]
        raise ParseError(
            "unknown clause in presheaf block",
            lineno,
            _col_of(line, tok),
            tok,
        )
    for x in c.objects:
        carrier.setdefault(x, ())
    for x in c.objects:
        actions.setdefault(
            c.id_of(x), {e: e for e in carrier[x]}
        )
    for a in c.arrow_names():
        if a not in actions:
            if carrier[c.cod(a)]:
                raise ResolutionError(
                    "missing action for arrow", open_line, 1, a
                )
            actions[a] = {}
        src_elems = set(carrier[c.cod(a)])
        dst_elems = set(carrier[c.dom(a)])
        for e, e2 in actions[a].items():
            if e not in src_elems:
                raise ResolutionError(
                    f"element not in carrier({c.cod(a)})", open_line, 1, e
                )
            if e2 not in dst_elems:
                raise ResolutionError(
                    f"element not in carrier({c.dom(a)})", open_line, 1, e2
                )
        if set(actions[a]) != src_elems:
            raise ResolutionError(
                "action does not cover the carrier", open_line, 1, a
            )
    doc.presheaves[name] = Presheaf(c, carrier, actions)
    return PresheafDecl(name, site_name, tuple(raw_c), tuple(raw_a))


def _parse_space(name: str, lines: _Lines, doc: Document, open_line: int):
    _dup_check(name, doc.spaces, "space", open_line, name)
    points: Tuple[str, ...] = ()
    opens: List[Tuple[str, ...]] = []
    for lineno, line in _block_lines(lines, open_line):
        key, _, rest = line.strip().partition(":")
        key = key.strip()
        rest = rest.strip()
        if key == "points":
            points = tuple(_split_commas(rest))
        elif key == "opens":
            for item in _split_commas(rest):
                m = re.fullmatch(r"\{(.*)\}", item)
                if not m:
                    raise ParseError(
                        "expected '{p, q}'",
                        lineno,
                        _col_of(line, item),
                        item,
                    )
                members = tuple(_split_commas(m.group(1)))
                for p in members:
                    if p not in points:
                        raise ResolutionError(
                            "unknown point", lineno, _col_of(line, p), p
                        )
                opens.append(members)
        else:
            raise ParseError(
                "unknown clause in space block",
                lineno,
                _col_of(line, key or line.strip()),
                key or line.strip(),
            )
    doc.spaces[name] = FinSpace(points, tuple(frozenset(o) for o in opens))
    return SpaceDecl(name, points, tuple(opens))


# -- printing -----------------------------------------------------------------


def print_document(doc: Document) -> str:
    out: List[str] = []
    for decl in doc.decls:
        if isinstance(decl, CategoryDecl):
            out.append(f"category {decl.name} {{")
            out.append("  objects: " + ", ".join(decl.objects))
            if decl.gen_arrows:
                out.append(
                    "  arrows: "
                    + ", ".join(f"{a}: {d} -> {c}" for a, d, c in decl.gen_arrows)
                )
            if decl.relations:
                out.append(
                    "  relations: "
                    + ", ".join(
                        ".".join(l) + " = " + ".".join(r)
                        for l, r in decl.relations
                    )
                )
            for g, f, h in decl.table:
                out.append(f"  table: {g}.{f} = {h}")
        elif isinstance(decl, FunctorDecl):
            out.append(f"functor {decl.name} : {decl.source} -> {decl.target} {{")
            if decl.obj_map:
                out.append(
                    "  obj: " + ", ".join(f"{a} -> {x}" for a, x in decl.obj_map)
                )
            if decl.arr_map:
                out.append(
                    "  arr: " + ", ".join(f"{a} -> {u}" for a, u in decl.arr_map)
                )
        elif isinstance(decl, PresheafDecl):
            out.append(f"presheaf {decl.name} on {decl.site} {{")
            for obj, elems in decl.carriers:
                out.append(f"  at {obj}: {{{', '.join(elems)}}}")
            for arr, pairs in decl.actions:
                out.append(
                    f"  act {arr}: "
                    + ", ".join(f"{e} -> {e2}" for e, e2 in pairs)
                )
        elif isinstance(decl, SpaceDecl):
            out.append(f"space {decl.name} {{")
            out.append("  points: " + ", ".join(decl.points))
            out.append(
                "  opens: "
                + ", ".join("{" + ", ".join(o) + "}" for o in decl.opens)
            )
        out.append("}")
    return "\n".join(out) + "\n"
