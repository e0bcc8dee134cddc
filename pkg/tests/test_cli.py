import json
from importlib import resources

import pytest

from gerbes.cli import run
from gerbes.document import canonical_json


@pytest.fixture()
def witness_path(tmp_path):
    raw = resources.files("gerbes.data").joinpath("witness_document.json").read_text()
    path = tmp_path / "witness.json"
    path.write_text(raw)
    return str(path)


@pytest.fixture()
def bad_model_path(tmp_path):
    doc = {
        "groups": {"G": {"table": [[0, 1], [1, 0]]}},
        "model": {
            "group": "G",
            "mu": {"modulus": 2},
            "places": [{"name": "v", "subgroup": [0, 1], "inv": ["1/2"]}],
        },
    }
    path = tmp_path / "bad.json"
    path.write_text(canonical_json(doc))
    return str(path)


def test_model_check_exit_codes(witness_path, bad_model_path, capsys):
    assert run(["model", "check", witness_path]) == 0
    assert run(["model", "check", bad_model_path]) == 3
    out = capsys.readouterr().out
    assert "A2 FAIL" in out


def test_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{ not json")
    assert run(["model", "check", str(path)]) == 2
    assert "line" in capsys.readouterr().err


def test_unresolved_reference_exit_code(tmp_path, capsys):
    path = tmp_path / "doc.json"
    path.write_text(json.dumps({"groups": {}, "tasks": {"cohomology": {"module": "M"}}}))
    assert run(["cohomology", str(path)]) == 2


def test_cohomology_command(witness_path, capsys):
    path = witness_path
    # No module in the witness doc; use an explicit small document instead.
    doc = {
        "groups": {"G": {"table": [[0, 1], [1, 0]]}},
        "modules": {"M": {"group": "G", "factors": [2]}},
        "tasks": {"cohomology": {"module": "M", "degree": 1}},
    }
    import os

    p2 = os.path.join(os.path.dirname(path), "coh.json")
    with open(p2, "w") as fh:
        json.dump(doc, fh)
    assert run(["cohomology", p2]) == 0
    assert "Z/2" in capsys.readouterr().out
    assert run(["cohomology", p2, "--degree", "2", "--output", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["result"]["invariant_factors"] == [2]


def test_mh_and_expect_zero(witness_path, capsys):
    assert run(["gerbe", "mh", witness_path]) == 0
    assert "1/2" in capsys.readouterr().out
    assert run(["gerbe", "mh", witness_path, "--expect-zero", "--quiet"]) == 1


def test_verify_factorization_command(witness_path, capsys):
    assert run(["verify", "factorization", witness_path]) == 0
    assert "factorization holds" in capsys.readouterr().out


def test_local_sections_and_class(witness_path, capsys):
    assert run(["gerbe", "local-sections", witness_path]) == 0
    capsys.readouterr()
    assert run(["gerbe", "class", witness_path, "--output", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["result"]["class_coords"] == [2]
    assert payload["result"]["is_trivial"] is False


def test_not_locally_neutral_exit(tmp_path, capsys):
    doc = {
        "groups": {
            "G": {"table": [[0, 1], [1, 0]]},
            "H": {"table": [[0, 1], [1, 0]]},
            "T": {"table": [[0, 1, 2, 3], [1, 2, 3, 0], [2, 3, 0, 1], [3, 0, 1, 2]]},
        },
        "extensions": {
            "E": {"total": "T", "quotient": "G", "kernel": "H",
                   "projection": [0, 1, 0, 1], "injection": [0, 2]}
        },
        "model": {
            "group": "G",
            "mu": {"modulus": 2},
            "places": [
                {"name": "v1", "subgroup": [0, 1], "inv": ["1/2"]},
                {"name": "v2", "subgroup": [0, 1], "inv": ["1/2"]},
            ],
        },
    }
    path = tmp_path / "nonneutral.json"
    path.write_text(json.dumps(doc))
    assert run(["gerbe", "local-sections", str(path)]) == 1
    capsys.readouterr()
    assert run(["gerbe", "mh", str(path), "--quiet"]) == 1


def test_json_outputs_are_deterministic(witness_path, capsys):
    outs = []
    for _ in range(2):
        assert run(["gerbe", "mh", witness_path, "--output", "json", "--certificates"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    for _ in range(2):
        assert run(["sha", witness_path, "--output", "json", "--certificates"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[2] == outs[3]


def test_dual_and_search_inv(witness_path, capsys):
    assert run(["dual", witness_path]) == 0
    assert "Z/4" in capsys.readouterr().out
    assert run(["model", "search-inv", witness_path, "--output", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["result"]["count"] == 2


def test_q8_document_commands(tmp_path, capsys):
    raw = resources.files("gerbes.data").joinpath("q8_document.json").read_text()
    path = tmp_path / "q8.json"
    path.write_text(raw)
    assert run(["verify", "factorization", str(path)]) == 0
    assert "factorization holds" in capsys.readouterr().out
    assert run(["gerbe", "mh", str(path), "--expect-zero", "--quiet"]) == 0
    assert run(["dual", str(path)]) == 0
    assert "Z/2 x Z/2" in capsys.readouterr().out
    assert run(["gerbe", "class", str(path), "--output", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["result"]["is_trivial"] is True  # semidirect products split


def test_json_output_round_trips(witness_path, tmp_path, capsys):
    """Re-ingesting the echoed inputs reproduces identical results."""
    assert run(["gerbe", "mh", witness_path, "--output", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    echoed = payload["inputs"]["document"]
    path = tmp_path / "echo.json"
    path.write_text(json.dumps(echoed))
    assert run(["gerbe", "mh", str(path), "--output", "json"]) == 0
    payload2 = json.loads(capsys.readouterr().out)
    assert payload2["result"] == payload["result"]

    assert run(["sha", witness_path, "--output", "json", "--certificates"]) == 0
    payload = json.loads(capsys.readouterr().out)
    path2 = tmp_path / "echo2.json"
    path2.write_text(json.dumps(payload["inputs"]["document"]))
    assert run(["sha", str(path2), "--output", "json", "--certificates"]) == 0
    payload2 = json.loads(capsys.readouterr().out)
    assert payload2["result"] == payload["result"]
