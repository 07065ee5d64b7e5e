import json

import pytest
from click.testing import CliRunner

from pgeneo.cli import main
from pgeneo.builders import squares_instance
from pgeneo.instances import load_instance, save_instance


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def squares_path(tmp_path, runner):
    path = tmp_path / "squares.json"
    result = runner.invoke(main, ["demo-squares", "--output", str(path)])
    assert result.exit_code == 0, result.output
    return path


def test_demo_squares_then_validate_and_certify(runner, squares_path):
    result = runner.invoke(
        main, ["validate", "--instance", str(squares_path), "--triple", "images"]
    )
    assert result.exit_code == 0, result.output
    assert "admissible" in result.output

    result = runner.invoke(
        main, ["certify", "--instance", str(squares_path), "--operator", "cut"]
    )
    assert result.exit_code == 0, result.output
    assert "CERTIFIED" in result.output


def test_demo_squares_rejects_bad_geometry(runner, tmp_path):
    result = runner.invoke(
        main,
        ["demo-squares", "--margin", "9", "--side", "8", "--output", str(tmp_path / "x.json")],
    )
    assert result.exit_code == 2
    assert "margin" in result.output


def test_validate_corrupted_instance_exits_one(runner, squares_path, tmp_path):
    doc, _ = load_instance(squares_path)
    perm = list(doc.ops["translate"])
    i, j = 4 * 16 + 4, 10 * 16 + 10
    perm[i], perm[j] = perm[j], perm[i]
    doc.ops["translate"] = perm
    bad_path = tmp_path / "corrupted.json"
    save_instance(doc, bad_path)
    result = runner.invoke(
        main, ["validate", "--instance", str(bad_path), "--triple", "images"]
    )
    assert result.exit_code == 1
    assert "NOT admissible" in result.output
    assert "translate" in result.output


def test_validate_vacuous_triple_notes_it(runner, squares_path):
    doc, _ = load_instance(squares_path)
    from pgeneo.schemas import TripleSpec

    doc.triples["empty"] = TripleSpec(phi="Phi", phi_prime="PhiPrime", ops=[])
    save_instance(doc, squares_path)
    result = runner.invoke(
        main, ["validate", "--instance", str(squares_path), "--triple", "empty"]
    )
    assert result.exit_code == 0
    assert "vacuous" in result.output


def test_unknown_names_and_files_exit_two(runner, squares_path, tmp_path):
    result = runner.invoke(
        main, ["validate", "--instance", str(squares_path), "--triple", "nope"]
    )
    assert result.exit_code == 2
    result = runner.invoke(
        main, ["certify", "--instance", str(tmp_path / "missing.json"), "--operator", "cut"]
    )
    assert result.exit_code == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{bad")
    result = runner.invoke(
        main, ["validate", "--instance", str(broken), "--triple", "images"]
    )
    assert result.exit_code == 2


def test_certify_spoiled_instance_exits_one(runner, tmp_path):
    path = tmp_path / "spoiled.json"
    save_instance(squares_instance(spoil_overlap=True), path)
    result = runner.invoke(main, ["certify", "--instance", str(path), "--operator", "cut"])
    assert result.exit_code == 1
    assert "NOT certified" in result.output
    assert "codomain failure" in result.output


def test_combine_writes_back_and_is_certifiable(runner, squares_path):
    result = runner.invoke(
        main,
        [
            "combine",
            "--instance",
            str(squares_path),
            "--aggregator",
            "convex:1",
            "--operators",
            "cut",
            "--output",
            "cut_copy",
        ],
    )
    assert result.exit_code == 0, result.output
    doc, inst = load_instance(squares_path)
    assert "cut_copy" in doc.operators
    assert doc.operators["cut_copy"].certificate.certified
    result = runner.invoke(
        main, ["certify", "--instance", str(squares_path), "--operator", "cut_copy"]
    )
    assert result.exit_code == 0


def test_combine_failure_writes_nothing(runner, squares_path):
    before = squares_path.read_text()
    result = runner.invoke(
        main,
        [
            "combine",
            "--instance",
            str(squares_path),
            "--aggregator",
            "pmean:abc:1",
            "--operators",
            "cut",
            "--output",
            "x",
        ],
    )
    assert result.exit_code == 2
    assert squares_path.read_text() == before


def test_combine_uncertified_result_exits_one_and_writes_nothing(runner, tmp_path):
    # fuse the cut operator with a shifted clone whose images leave the finite
    # target space: the codomain hypothesis fails, so nothing may be written
    doc = squares_instance()
    clone = doc.operators["cut"].model_copy(deep=True)
    clone.on_phi = [[v + 0.125 for v in row] for row in clone.on_phi]
    clone.on_phi_prime = [[v + 0.125 for v in row] for row in clone.on_phi_prime]
    doc.operators["shifted"] = clone
    path = tmp_path / "two_ops.json"
    save_instance(doc, path)
    before = path.read_text()
    result = runner.invoke(
        main,
        [
            "combine",
            "--instance",
            str(path),
            "--aggregator",
            "max",
            "--operators",
            "cut,shifted",
            "--output",
            "fused",
        ],
    )
    assert result.exit_code == 1
    assert "combine failed" in result.output
    assert path.read_text() == before


def test_cover_text_and_json(runner, squares_path):
    args = [
        "cover",
        "--instance",
        str(squares_path),
        "--target",
        "domain",
        "--space",
        "Phi",
        "--epsilon",
        "0.5",
    ]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    assert "covering radius" in result.output

    result = runner.invoke(main, args + ["--json"])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["net"]["covering_radius_achieved"] <= 0.5


def test_json_flag_on_certify(runner, squares_path):
    result = runner.invoke(
        main,
        ["certify", "--instance", str(squares_path), "--operator", "cut", "--json"],
    )
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["certified"] is True


def test_tolerance_overrides_are_accepted(runner, squares_path):
    result = runner.invoke(
        main,
        [
            "validate",
            "--instance",
            str(squares_path),
            "--triple",
            "images",
            "--delta-mem",
            "1e-6",
            "--delta-num",
            "1e-10",
        ],
    )
    assert result.exit_code == 0
