import json

import pytest

from bellcanon.cli import main
from bellcanon.compendium import serialize, InterchangeDocument

import bellfixtures as fx

CHSH = " ".join(str(v) for v in fx.chsh().as_ints())
CH = " ".join(str(v) for v in fx.ch().as_ints())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_doc(path, e, bound=None, names=()):
    bounds = {"local": (bound, None)} if bound is not None else {}
    doc = InterchangeDocument(e.scenario, tuple(e.coefficients), "probabilities", bounds, names)
    path.write_text(serialize(doc))
    return str(path)


def test_canon_ch(capsys):
    code, out, _ = run(capsys, "canon", "--scenario", "(2,2,2)", "--coefficients", CH, "--bound", "0")
    assert code == 0
    assert "coefficients: -1 1 -1 1 1 -1 1 -1 -1 1 1 -1 1 -1 -1 1" in out
    assert "bound local: 2" in out


def test_canon_structured(capsys):
    code, out, _ = run(capsys, "canon", "--scenario", "(2,2,2)", "--coefficients", CHSH,
                       "--format", "structured")
    data = json.loads(out)
    assert code == 0 and data["type"] == "leaf" and len(data["key"]) == 64


def test_decompose_document(tmp_path, capsys):
    path = write_doc(tmp_path / "s.yaml", fx.sliwa4(), 0)
    code, out, _ = run(capsys, "decompose", path)
    assert code == 0 and out.startswith("product")
    code, out, _ = run(capsys, "decompose", path, "--format", "structured")
    assert len(json.loads(out)["children"]) == 2


def test_rank_unrank(tmp_path, capsys):
    code, out, _ = run(capsys, "rank", "--scenario", "(2,2,2)", "--coefficients", CHSH)
    assert code == 0 and out.strip().endswith("of 8")
    code, out, _ = run(capsys, "canon", "--scenario", "(2,2,2)", "--coefficients", CHSH,
                       "--format", "structured")
    minimal = " ".join(json.loads(out)["coefficients"])
    code, out, _ = run(capsys, "unrank", "--scenario", "(2,2,2)", "--coefficients", minimal,
                       "--rank", "8")
    assert code == 0 and len(out.split()) == 16
    code, _, err = run(capsys, "unrank", "--scenario", "(2,2,2)", "--coefficients", minimal,
                       "--rank", "9")
    assert code == 1 and "1..8" in err


def test_bounds_and_facets(capsys):
    assert run(capsys, "local-bound", "--scenario", "(2,2,2)", "--coefficients", CHSH)[1].strip() == "2"
    code, out, _ = run(capsys, "facet-check", "--scenario", "(2,2,2)", "--coefficients", CHSH,
                       "--bound", "2")
    assert code == 0 and out.strip() == "facet"
    code, _, err = run(capsys, "local-bound", "--scenario", "(2,2,2)", "--coefficients", CHSH,
                       "--strategy-cap", "4")
    assert code == 1 and "cap" in err


def test_user_errors(tmp_path, capsys):
    assert run(capsys, "canon", str(tmp_path / "missing.yaml"))[0] == 1
    (tmp_path / "bad.yaml").write_text("scenario: [[2, 2]\n")
    code, _, err = run(capsys, "canon", str(tmp_path / "bad.yaml"))
    assert code == 1 and "line" in err
    assert run(capsys, "canon", "--scenario", "(2,2,2)", "--coefficients", "1 2")[0] == 1
    assert run(capsys, "canon", "--scenario", "(2,2,2)", "--coefficients", " ".join(["1"] * 16))[0] == 1
    assert run(capsys, "match", "--scenario", "(2,2,2)", "--coefficients", CHSH)[0] == 1


def test_internal_error_exit_code(monkeypatch, capsys):
    import bellcanon.canonical as canonical

    def broken(*args, **kwargs):
        raise AssertionError("recompose check failed")
    monkeypatch.setattr(canonical, "decompose", broken)
    code, _, err = run(capsys, "canon", "--scenario", "(2,2,2)", "--coefficients", CHSH)
    assert code == 2 and "internal" in err


def test_store_workflow(tmp_path, capsys):
    db = str(tmp_path / "db")
    chsh = write_doc(tmp_path / "chsh.yaml", fx.chsh(), 2, ("CHSH",))
    pos = write_doc(tmp_path / "pos.yaml", fx.positivity(), 0, ("positivity",))
    code, out, _ = run(capsys, "import", chsh, pos, "--db", db)
    assert code == 0
    key = out.split()[0]
    code, out, _ = run(capsys, "match", write_doc(tmp_path / "s.yaml", fx.sliwa4(), 0), "--db", db)
    assert code == 0 and "CHSH" in out and "positivity" in out
    code, out, _ = run(capsys, "export", key[:10], "--db", db)
    assert code == 0 and "CHSH" in out and "notation: probabilities" in out
    code, out, _ = run(capsys, "export", key, "--db", db, "--notation", "collins-gisin")
    assert code == 0 and "collins-gisin" in out
    code, out, _ = run(capsys, "db", "rebuild-index", "--db", db)
    assert code == 0 and out.strip() == "2 records indexed"
    assert run(capsys, "export", "ffff", "--db", db)[0] == 1
