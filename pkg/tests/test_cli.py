"""Command-line interface: exit codes and byte-stable JSON reports."""
import json

import pytest

from toposlab.cli import main

CORPUS = """
category PT {
  objects: star
}

category SIERP {
  objects: A, B
  arrows: f: A -> B
}

functor pB : PT -> SIERP {
  obj: star -> B
}

functor pA : PT -> SIERP {
  obj: star -> A
}

space SP {
  points: m, g
  opens: {}, {g}, {g, m}
}
"""

# the etale square of the B-point at E = yB + yA: top-left site is the
# category of elements of the pulled-back presheaf
BC_CORPUS = """
category PT {
  objects: star
}

category SIERP {
  objects: A, B
  arrows: f: A -> B
}

category SRC {
  objects: s
}

category DST {
  objects: eAf, eAa, eB
  arrows: u: eAf -> eB
}

functor top : SRC -> PT {
  obj: s -> star
}

functor left : SRC -> DST {
  obj: s -> eB
}

functor right : PT -> SIERP {
  obj: star -> B
}

functor bottom : DST -> SIERP {
  obj: eAf -> A, eAa -> A, eB -> B
  arr: u -> f
}

functor idpt : PT -> PT {
  obj: star -> star
}
"""


@pytest.fixture()
def corpus(tmp_path):
    p = tmp_path / "doc.topos"
    p.write_text(CORPUS)
    return str(p)


@pytest.fixture()
def bc_corpus(tmp_path):
    p = tmp_path / "square.topos"
    p.write_text(BC_CORPUS)
    return str(p)


def _run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out.strip()
    return code, json.loads(out)


def test_check_category_ok(corpus, capsys):
    code, body = _run_json(capsys, ["check-category", corpus, "--name", "SIERP", "--json"])
    assert code == 0
    assert body["command"] == "check-category"
    assert body["result"]["objects"] == 2
    assert body["result"]["problems"] == []
    assert len(body["input_sha256"]) == 64


def test_check_category_needs_name(corpus, capsys):
    code = main(["check-category", corpus])
    assert code == 3
    assert "input error" in capsys.readouterr().err


def test_check_space(corpus, capsys):
    code, body = _run_json(capsys, ["check-space", corpus, "--json"])
    assert code == 0
    r = body["result"]
    assert r["t0"] is True
    assert r["jacobson"] is False
    assert r["weakly_jacobson"] is True


def test_check_space_not_t0_refused(tmp_path, capsys):
    p = tmp_path / "ind.topos"
    p.write_text("space IND {\n  points: p, q\n  opens: {}, {p, q}\n}\n")
    code = main(["check-space", str(p), "--no-t0-quotient"])
    assert code == 3


def test_check_morphism_fails_with_witness(corpus, capsys):
    code, body = _run_json(capsys, ["check-morphism", corpus, "--name", "pB", "--json"])
    assert code == 1
    r = body["result"]
    assert r["cc_inverse_image"] is False
    assert r["locally_connected"] is False
    assert r["witness"]["kind"] == "frobenius-failure"
    assert r["witness"]["eval_object"] == "A"


def test_check_morphism_holds(corpus, capsys):
    code, body = _run_json(capsys, ["check-morphism", corpus, "--name", "pA", "--json"])
    assert code == 0
    assert body["result"]["locally_connected"] is True


def test_classify_always_reports(corpus, capsys):
    code, body = _run_json(capsys, ["classify", corpus, "--name", "SIERP", "--json"])
    assert code == 0
    r = body["result"]
    assert r["eilc"] is False
    assert r["cilc_status"] == "Implied-by-WJ-over-Sets"
    assert r["center_closed"] is True


def test_classify_space(corpus, capsys):
    code, body = _run_json(capsys, ["classify", corpus, "--name", "SP", "--json"])
    assert code == 0
    assert body["result"]["weakly_jacobson"]["verdict"] == "holds"


def test_witness_found(corpus, capsys):
    code, body = _run_json(capsys, ["witness", corpus, "--name", "SIERP", "--json"])
    assert code == 1
    assert body["result"]["counterexample"]["point_at"] == "B"


def test_witness_groupoid_none(corpus, capsys):
    code, body = _run_json(capsys, ["witness", corpus, "--name", "PT", "--json"])
    assert code == 0
    assert body["result"]["counterexample"] is None


def test_sweep_small(capsys):
    code, body = _run_json(
        capsys,
        ["sweep", "--max-objects", "1", "--max-arrows", "2", "--budget", "50", "--json"],
    )
    assert code == 0
    assert body["result"]["counterexamples"] == []


def test_bc_square_identity_inconclusive(bc_corpus, capsys):
    code, body = _run_json(
        capsys,
        [
            "bc-square", bc_corpus,
            "--top", "idpt", "--left", "idpt",
            "--right", "idpt", "--bottom", "idpt",
            "--bound", "2", "--json",
        ],
    )
    assert code == 2
    assert body["result"]["verdict"] == "holds-at-bound"


def test_bc_square_fails(bc_corpus, capsys):
    code, body = _run_json(
        capsys,
        [
            "bc-square", bc_corpus,
            "--top", "top", "--left", "left",
            "--right", "right", "--bottom", "bottom",
            "--bound", "2", "--json",
        ],
    )
    assert code == 1
    assert body["result"]["verdict"] == "fails"
    assert body["result"]["witness"]["kind"] == "bc-failure"


def test_bc_square_non_commuting_is_input_error(bc_corpus, capsys):
    code = main(
        [
            "bc-square", bc_corpus,
            "--top", "top", "--left", "left",
            "--right", "right", "--bottom", "top",
        ]
    )
    assert code == 3


def test_missing_file_is_input_error(capsys):
    assert main(["check-category", "/nonexistent.topos"]) == 3


def test_parse_error_is_input_error(tmp_path, capsys):
    p = tmp_path / "bad.topos"
    p.write_text("category {\n}")
    assert main(["check-category", str(p)]) == 3


def test_json_is_canonical_and_stable(corpus, capsys):
    main(["classify", corpus, "--name", "SIERP", "--json"])
    out1 = capsys.readouterr().out
    main(["classify", corpus, "--name", "SIERP", "--json"])
    out2 = capsys.readouterr().out
    assert out1 == out2
    body = json.loads(out1)
    assert out1.strip() == json.dumps(body, sort_keys=True, separators=(",", ":"))


def test_human_output_default(corpus, capsys):
    code = main(["check-category", corpus, "--name", "SIERP"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("check-category: ok")
