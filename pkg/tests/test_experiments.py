import json
from pathlib import Path

import numpy as np
import pytest

from oscderham import cli, experiments, matrixio
from oscderham.experiments import ConfigError, ExperimentConfig, list_experiments, run

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = sorted((ROOT / "configs").glob("*.json"))
NAMES = ["cartan", "axioms", "oscillator", "symbol", "cohomology", "mishchenko", "gap-scan"]


def load(name):
    return json.loads((ROOT / "configs" / name).read_text())


@pytest.fixture(scope="module")
def validators():
    jsonschema = pytest.importorskip("jsonschema")
    from referencing import Registry, Resource

    schemas = {p.name: json.loads(p.read_text()) for p in (ROOT / "docs").glob("*.schema.json")}
    registry = Registry().with_resources(
        (s["$id"], Resource.from_contents(s)) for s in schemas.values()
    )
    return {
        name.split(".")[0]: jsonschema.Draft202012Validator(s, registry=registry)
        for name, s in schemas.items()
    }


def test_list_is_stable():
    items = list_experiments()
    assert [i["name"] for i in items] == NAMES
    assert all(i["anchor"] and i["description"] for i in items)
    assert list_experiments() == items


def test_cli_list(capsys):
    assert cli.main(["list"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert [ln.split()[0] for ln in lines] == NAMES


def test_every_experiment_has_a_config():
    assert {load(p.name)["experiment"] for p in CONFIGS} == set(NAMES)


@pytest.mark.parametrize(
    "payload",
    [
        {"experiment": "nope", "seed": 1},
        {"experiment": "cartan"},
        {"experiment": "cartan", "seed": -1},
        {"experiment": "cartan", "seed": 1, "dim2n": 3},
        {"experiment": "cohomology", "seed": 1, "fourier_cutoff": 0},
        {"experiment": "cohomology", "seed": 1, "hermite_cutoff": 1},
        {"experiment": "cartan", "seed": 1, "colour": "red"},
        {"experiment": "cartan", "seed": 1, "tolerances": {"bogus": 1.0}},
        {"experiment": "cartan", "seed": 1, "schema_version": 2},
        {"experiment": "symbol", "seed": 1, "connection": {"variant": "line_twist", "c": [1.0]}},
        {"experiment": "symbol", "seed": 1, "connection": {"variant": "rep_twist",
                                                          "gammas": [[[1, 0], [0, -1]], [[0, 1], [0, 0]]]}},
        {"experiment": "cartan", "seed": 1, "metric": [[1, 2], [2, 1]]},
    ],
)
def test_config_errors(payload):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(payload)


def test_config_round_trip():
    cfg = ExperimentConfig.from_dict(load("cohomology.json"))
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg
    assert cfg.tolerances == experiments.DEFAULT_TOLERANCES


def write(tmp_path, payload, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return p


def test_cli_exit_codes(tmp_path):
    bad = write(tmp_path, {"experiment": "nope", "seed": 1})
    assert cli.main(["-q", "run", "--config", str(bad)]) == 2
    assert cli.main(["-q", "run", "--config", str(tmp_path / "missing.json")]) == 2
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{")
    assert cli.main(["-q", "run", "--config", str(garbled)]) == 2

    good = load("cohomology.json")
    out = tmp_path / "r.json"
    assert cli.main(["-q", "run", "--config", str(write(tmp_path, good)), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["status"] == "pass"

    wrong = {**good, "expect": {"a_ranks": [1, 1, 1]}}
    assert cli.main(["-q", "run", "--config", str(write(tmp_path, wrong)), "--out", str(out)]) == 1
    report = json.loads(out.read_text())
    assert report["status"] == "fail" and not report["passed"]
    failing = [e["name"] for e in report["entries"] if e["status"] == "fail"]
    assert failing == ["expected_a_ranks"]


def test_indeterminate_report_exit_code():
    entry = experiments.Entry("rank_stability", False, None, "indeterminate", "x")
    report = experiments.Report({"experiment": "cohomology"}, [entry])
    assert report.status == "indeterminate" and report.exit_code == 3


def test_seed_and_tol_overrides(tmp_path):
    cfg = write(tmp_path, load("axioms.json"))
    out = tmp_path / "r.json"
    assert cli.main(["-q", "run", "--config", str(cfg), "--seed", "99", "--tol", "1e-9", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["config"]["seed"] == 99
    assert report["config"]["tolerances"]["residual"] == 1e-9
    # an impossible tolerance must fail, not pass silently
    assert cli.main(["-q", "run", "--config", str(cfg), "--tol", "1e-300", "--out", str(out)]) == 1


def test_seed_changes_body():
    a = run({**load("axioms.json"), "seed": 1}).body_json()
    b = run({**load("axioms.json"), "seed": 2}).body_json()
    assert a != b


@pytest.mark.parametrize("path", CONFIGS, ids=lambda p: p.stem)
def test_configs_pass_and_are_deterministic(path, validators):
    payload = json.loads(path.read_text())
    validators["config"].validate(payload)
    first, second = run(payload), run(payload)
    assert first.status == "pass", [e.name for e in first.entries if not e.passed]
    assert first.body_json() == second.body_json()
    validators["report"].validate(json.loads(first.to_json()))


def test_threads_do_not_change_reports(monkeypatch):
    payload = load("gap-scan.json")
    single = run(payload).body_json()
    monkeypatch.setenv("OSCDERHAM_THREADS", "4")
    assert run(payload).body_json() == single
    monkeypatch.setenv("OSCDERHAM_THREADS", "many")
    assert experiments._threads() == 1


def test_report_floats_round_trip(rng):
    x = rng.standard_normal(50)
    text = experiments.dumps({"x": x, "nan": float("nan")})
    back = json.loads(text)
    assert np.array_equal(np.array(back["x"]), x)
    assert back["nan"] is None


@pytest.mark.parametrize("kind", ["d", "adjoint", "laplacian"])
def test_dump_round_trip(tmp_path, kind, validators):
    cfg_path = write(tmp_path, {**load("symbol.json"), "experiment": "cohomology"})
    out = tmp_path / f"{kind}.json"
    assert cli.main(["-q", "dump", "--config", str(cfg_path), "--matrix", kind, "--degree", "1", "--out", str(out)]) == 0
    validators["matrix"].validate(json.loads(out.read_text()))
    loaded = matrixio.load_matrix(out)
    direct = experiments.build_assembly(ExperimentConfig.from_dict(json.loads(cfg_path.read_text()))).matrix(kind, 1)
    assert np.array_equal(loaded, direct)
    if kind == "laplacian":
        assert np.array_equal(loaded, loaded.conj().T) or np.abs(loaded - loaded.conj().T).max() < 1e-10


def test_dump_bad_degree(tmp_path):
    cfg_path = write(tmp_path, load("cohomology.json"))
    out = tmp_path / "m.json"
    assert cli.main(["-q", "dump", "--config", str(cfg_path), "--degree", "7", "--out", str(out)]) == 2
    assert not out.exists()


def test_matrix_format_validation(rng):
    m = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    payload = matrixio.matrix_to_dict(m)
    assert np.array_equal(matrixio.matrix_from_dict(payload), m)
    empty = matrixio.matrix_to_dict(np.zeros((0, 4)))
    assert matrixio.matrix_from_dict(empty).shape == (0, 4)
    with pytest.raises(ValueError):
        matrixio.matrix_from_dict({**payload, "format": "other"})
    with pytest.raises(ValueError):
        matrixio.matrix_from_dict({**payload, "version": 9})
    with pytest.raises(ValueError):
        matrixio.matrix_from_dict({**payload, "rows": 4})
    with pytest.raises(ValueError):
        matrixio.matrix_to_dict(np.zeros(3))


def test_cohomology_report_contents():
    report = run(load("cohomology.json")).to_dict()
    by_name = {e["name"]: e for e in report["entries"]}
    assert by_name["expected_a_ranks"]["value"] == [1, 2, 1]
    assert by_name["expected_a_ranks"]["status"] == "pass"
    assert by_name["expected_spectral_gap"]["value"] < 1e-6
    assert by_name["a_ranks_defined"]["detail"]["spectral_gaps"] == pytest.approx([4 * np.pi**2] * 3)
    generic = run(load("cohomology-generic-twist.json"))
    assert generic.passed


def test_rep_twist_cohomology_reports_no_a_rank():
    g = np.array([[0.3, 1.0], [-0.7, -0.3]])
    payload = {"experiment": "cohomology", "seed": 3, "hermite_cutoff": 4, "fourier_cutoff": 1,
               "connection": {"variant": "rep_twist", "gammas": [g.tolist(), (2 * g).tolist()]}}
    report = run(payload)
    by_name = {e.name: e for e in report.entries}
    # not A-linear: ranks are reported as undefined rather than guessed
    assert by_name["a_ranks_defined"].passed
    assert by_name["a_ranks_defined"].detail["a_ranks"] == [None, None, None]
    assert "laplacian_a_invariance" not in by_name
    assert report.passed
