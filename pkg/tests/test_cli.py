from __future__ import annotations

import io
import json
import random
from fractions import Fraction
from pathlib import Path

import pytest

from toric_periods import characters as ch
from toric_periods.cli import emit_corpus, main, run
from toric_periods.etale import quadratic_field
from toric_periods.padic import unit_presentation

FIXTURES = Path(__file__).parent / "fixtures" / "global"


def call(argv, payload=None):
    out = io.StringIO()
    stdin = io.StringIO(json.dumps(payload) if payload is not None else "")
    code = main(argv, stdin=stdin, stdout=out)
    return json.loads(out.getvalue()), code


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("corpus")
    emit_corpus(3, d, per_cell=1, primes=(5,))
    return d


def test_classify():
    rep, code = call(["classify"], {"p": 5, "d": "5", "E": ["u", "1"]})
    assert code == 0
    assert rep["n"] == 3
    assert len(rep["hermitian_classes"]) == 2
    # both components are fields over K: four lambda classes, distinct sign vectors
    assert len({tuple(e["omega"]) for e in rep["embeddings"]}) == len(rep["embeddings"]) == 4


def test_schema_errors_carry_a_pointer():
    rep, code = call(["classify"], {"p": 5, "d": "5", "E": ["v"]})
    assert code == 1
    assert rep["error_kind"] == "SchemaError"
    assert rep["pointer"] == "/payload/E/0"
    rep, code = call(["classify"], {"p": 5, "d": "5", "E": ["u"], "extra": 1})
    assert code == 1 and rep["pointer"] == "/payload"
    rep, code = call(["classify", "--precision", "2"], {"p": 5, "d": "5", "E": ["u"]})
    assert code == 1 and rep["pointer"].startswith("/options")


def test_invalid_json_and_missing_command():
    out = io.StringIO()
    assert main(["classify"], stdin=io.StringIO("{"), stdout=out) == 1
    assert json.loads(out.getvalue())["error_kind"] == "SchemaError"
    rep, code = call([], {})
    assert code == 1


def test_input_errors_exit_one():
    rep, code = call(["classify"], {"p": 2, "d": "3", "E": ["1"]})
    assert code == 1
    assert rep["error_kind"] == "PrimeTwoUnsupported"


def test_epsilon_quadratic_character():
    F = quadratic_field(7, "1", 20)
    legendre = ch.MultiplicativeCharacter(unit_presentation(F, 1), [Fraction(0), Fraction(1, 2)])
    rep, code = call(["epsilon"], {"p": 7, "field": "1", "character": legendre.to_json()})
    assert code == 0
    assert abs(complex(*rep["value"]) - 1j) < 1e-9
    assert rep["conductor"] == 1


def test_epsilon_precision_exhaustion_exits_two():
    F = quadratic_field(3, "u", 20)
    chi = ch.random_character(unit_presentation(F, 3), random.Random(1))
    rep, code = call(["epsilon", "--precision", "4"], {"p": 3, "field": "u", "character": chi.to_json()})
    assert code == 2
    assert rep["error_kind"] == "PrecisionExhausted"


def test_archimedean_epsilon():
    rep, code = call(["epsilon"], {"archimedean": {"m": 3, "s": -1}})
    assert code == 0 and rep["sign"] == -1


def test_sum_check_through_the_cli(corpus_dir):
    files = sorted(corpus_dir.glob("instance_*.json"))
    assert files
    for path in files:
        task = json.loads(path.read_text())
        rep, code = call(["sum-check"], task["payload"])
        assert code == 0
        assert rep["total"] == task["expected_total"]


def test_local_dichotomy(corpus_dir):
    task = json.loads(sorted(corpus_dir.glob("instance_*.json"))[0].read_text())
    payload = {**task["payload"], "lambda": [1] * len(task["payload"]["E"])}
    out, code = run("local-dichotomy", payload)
    assert code == 0
    assert out["hom_dimension"] in (0, 1)
    assert out["hom_dimension"] == int(out["compatibility"] and out["omega"] == out["epsilon"])


def test_input_file(tmp_path):
    path = tmp_path / "payload.json"
    path.write_text(json.dumps({"d": -7, "targets": [{"3": -1, "inf": -1}]}))
    rep, code = call(["find-lambda", "--input", str(path)])
    assert code == 0
    assert len(rep["lambda"]) == 1


def test_find_lambda_parity_obstruction():
    rep, code = call(["find-lambda"], {"d": -7, "targets": [{"3": -1}]})
    assert code == 0
    assert rep["error_kind"] == "ParityObstruction"


@pytest.mark.parametrize("name", ["all_pass", "l_value_zero", "failing_place"])
def test_global_decide_fixtures(name):
    data = json.loads((FIXTURES / f"{name}.json").read_text())
    rep, code = run(data["command"], data["payload"], data["options"])
    assert code == 0
    exp = data["expected"]
    for key in ("verdict", "conditions", "places", "bad_set", "lambda"):
        assert rep[key] == exp[key], key


def test_global_decide_needs_l_value():
    data = json.loads((FIXTURES / "all_pass.json").read_text())
    payload = {k: v for k, v in data["payload"].items() if k != "l_value"}
    rep, code = run("global-decide", payload)
    assert code == 1 and rep["error_kind"] == "LValueMissing"
    rep, code = run("global-decide", payload, {"enable_lvalue": True})
    assert code == 0 and rep["verdict"] is True


def test_batch_keeps_order_and_takes_worst_exit(tmp_path):
    tasks = [
        {"command": "epsilon", "payload": {"archimedean": {"m": 1, "s": 1}}},
        {"command": "classify", "payload": {"p": 5}},
        {"command": "find-lambda", "payload": {"d": -7, "targets": [{"inf": -1, "7": -1}]}},
    ]
    path = tmp_path / "batch.json"
    path.write_text(json.dumps(tasks))
    reps, code = call(["--batch", str(path)])
    assert code == 1
    assert [r["command"] for r in reps] == ["epsilon", "classify", "find-lambda"]
    assert "error_kind" in reps[1] and "error_kind" not in reps[2]


def test_emit_corpus_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    rep, code = call(["emit-corpus", "--seed", "5", "--per-cell", "1", "--out", str(a)])
    assert code == 0 and rep["written"] > 0
    call(["emit-corpus", "--seed", "5", "--per-cell", "1", "--out", str(b)])
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    assert all((a / n).read_bytes() == (b / n).read_bytes() for n in names)


def test_output_is_sorted_json():
    out = io.StringIO()
    main(["epsilon"], stdin=io.StringIO(json.dumps({"archimedean": {"m": 0, "s": 1}})), stdout=out)
    text = out.getvalue()
    assert text.endswith("\n")
    assert text == json.dumps(json.loads(text), sort_keys=True, ensure_ascii=False) + "\n"
