"""Presentation-file parsing: round trips and error reporting."""
import pytest

from toposlab import dsl
from toposlab.cat import find_isomorphism, validate, validate_functor
from toposlab.psh import validate_presheaf
from toposlab.space import validate_space
from toposlab.zoo import retract_category, sierpinski_category

DOC = """
# a small worked corpus
category SIERP {
  objects: A, B
  arrows: f: A -> B
}

category RETRACT {
  objects: X, Y
  arrows: r: X -> Y, s: Y -> X
  relations: r.s = id_Y
}

functor pB : SIERP -> SIERP {
  obj: A -> B, B -> B
  arr: f -> id_B
}

presheaf P on SIERP {
  at A: {a0, a1}
  at B: {b0}
  act f: b0 -> a0
}

space SP {
  points: m, g
  opens: {}, {g}, {g, m}
}
"""


def test_parse_corpus():
    doc = dsl.parse(DOC)
    assert set(doc.categories) == {"SIERP", "RETRACT"}
    assert set(doc.functors) == {"pB"}
    assert set(doc.presheaves) == {"P"}
    assert set(doc.spaces) == {"SP"}
    assert find_isomorphism(doc.categories["SIERP"], sierpinski_category())
    assert not validate(doc.categories["RETRACT"])
    assert not validate_functor(doc.functors["pB"])
    assert not validate_presheaf(doc.presheaves["P"])
    assert not validate_space(doc.spaces["SP"])


def test_relations_close_to_retract_category():
    doc = dsl.parse(DOC)
    assert find_isomorphism(doc.categories["RETRACT"], retract_category())


def test_table_category():
    text = """
category M {
  objects: star
  arrows: e: star -> star
  table: e.e = e
}
"""
    c = dsl.parse(text).categories["M"]
    assert not validate(c)
    assert c.compose("e", "e") == "e"


def test_round_trip_print_parse():
    doc = dsl.parse(DOC)
    text = dsl.print_document(doc)
    doc2 = dsl.parse(text)
    assert doc.decls == doc2.decls


def test_parse_error_reports_position():
    with pytest.raises(dsl.ParseError) as ei:
        dsl.parse("category {\n}")
    assert ei.value.line == 1
    assert ei.value.col >= 1
    assert isinstance(ei.value.token, str)


def test_resolution_error_unknown_object():
    bad = """
category C {
  objects: a
  arrows: f: a -> nowhere
}
"""
    with pytest.raises(dsl.ResolutionError) as ei:
        dsl.parse(bad)
    assert ei.value.line == 4
    assert "nowhere" in ei.value.token


def test_functor_unknown_category():
    bad = """
functor F : NOPE -> NOPE {
  obj: a -> a
}
"""
    with pytest.raises(dsl.ResolutionError):
        dsl.parse(bad)


def test_presheaf_act_must_be_total():
    bad = """
category SIERP {
  objects: A, B
  arrows: f: A -> B
}
presheaf P on SIERP {
  at A: {a0}
  at B: {b0, b1}
  act f: b0 -> a0
}
"""
    with pytest.raises(dsl.ResolutionError):
        dsl.parse(bad)


def test_non_composable_relation_is_arity_error():
    bad = """
category C {
  objects: A, B
  arrows: f: A -> B
  relations: f.f = id_A
}
"""
    with pytest.raises(dsl.ArityError) as ei:
        dsl.parse(bad)
    assert ei.value.line >= 1
    assert "f.f" in ei.value.token


def test_comments_and_blank_lines_ignored():
    text = "# only a comment\n\n" + DOC
    assert dsl.parse(text).decls == dsl.parse(DOC).decls


def test_duplicate_names_rejected():
    bad = DOC + "\ncategory SIERP {\n  objects: Z\n}\n"
    with pytest.raises(dsl.DslError):
        dsl.parse(bad)
