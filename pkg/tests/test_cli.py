import json
import math

import pytest

from virialkit.cli import compact_index, dumps, main
from virialkit.series import MultiIndex


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def hard_rods_model(tmp_path):
    return write(tmp_path / "hr.json",
                 {"schema": "virialkit/1", "type": "hard_rods_1d",
                  "sigma": {"1": 1.0}, "L": 10.0})


@pytest.fixture
def synthetic_model(tmp_path):
    return write(tmp_path / "syn.json",
                 {"schema": "virialkit/1", "type": "synthetic", "species": 2,
                  "default_w": "0",
                  "blocks": [{"graph": {"n": 2, "edges": [[1, 2]]},
                              "colours": [1, 2], "w": "1"}]})


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- JSON emitter ----------------------------------------------------------------


def test_dumps_floats_17_digits():
    text = dumps({"x": 1.0 / 3.0, "y": [2.5, True, None], "s": "a"})
    assert "0.33333333333333331" in text
    assert json.loads(text) == {"x": 1.0 / 3.0, "y": [2.5, True, None], "s": "a"}


def test_dumps_rejects_non_finite():
    with pytest.raises(ValueError):
        dumps({"x": math.inf})


def test_compact_index():
    assert compact_index(MultiIndex({1: 2, 3: 1})) == "2·e1+1·e3"
    assert compact_index(MultiIndex()) == "0"


# -- graphs ----------------------------------------------------------------------


def test_graphs_count(capsys):
    code, out, _ = run(capsys, "graphs", "count", "--n", "4", "--class", "connected")
    assert code == 0
    assert json.loads(out)["count"] == 38


def test_graphs_dissymmetry(capsys):
    code, out, _ = run(capsys, "graphs", "dissymmetry", "--n", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["all_pass"] and doc["graphs"] == 38
    assert all(r["lhs"] == r["rhs"] for r in doc["results"])


def test_graphs_blocks(capsys, tmp_path):
    path = write(tmp_path / "g.json", {"n": 3, "edges": [[1, 2], [2, 3]]})
    code, out, _ = run(capsys, "graphs", "blocks", "--input", path)
    assert code == 0
    doc = json.loads(out)
    assert len(doc["blocks"]) == 2
    assert doc["articulation_points"] == [2]
    assert doc["block_cut_tree"]["block_count"] == 2


# -- virial ----------------------------------------------------------------------


def test_virial_invert_table(capsys, synthetic_model):
    code, out, _ = run(capsys, "virial", "invert", "--model", synthetic_model,
                       "--degree", "2", "--method", "recursive")
    assert code == 0
    rows = json.loads(out)["coefficients"]
    assert {"n": {"1": 1, "2": 1}, "c": "-1", "method": "recursive"} in rows


def test_virial_invert_csv(capsys, synthetic_model):
    code, out, _ = run(capsys, "virial", "invert", "--model", synthetic_model,
                       "--degree", "2", "--method", "two-connected", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,value,method"
    assert "1·e1+1·e2,-1,two-connected" in lines


def test_virial_compare_identical(capsys, synthetic_model):
    code, out, _ = run(capsys, "virial", "compare", "--model", synthetic_model,
                       "--degree", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "identical"
    assert doc["methods"] == ["recursive", "lagrange-good", "two-connected"]
    assert doc["differences"] == []


def test_virial_invert_ideal_gas(tmp_path, capsys):
    model = write(tmp_path / "ideal.json",
                  {"type": "synthetic", "species": 2, "default_w": "0", "blocks": []})
    code, out, _ = run(capsys, "virial", "invert", "--model", model, "--degree", "3")
    assert code == 0
    rows = json.loads(out)["coefficients"]
    assert rows == [{"n": {"2": 1}, "c": "1", "method": "recursive"},
                    {"n": {"1": 1}, "c": "1", "method": "recursive"}]


def test_virial_invert_quadratic_pressure_table(tmp_path, capsys):
    # edge weight 2 with triangle weight -12 makes the cubic term vanish, so
    # the pressure is exactly z + z^2 and the inverted table is -1, 4
    model = write(tmp_path / "quad.json",
                  {"type": "synthetic", "species": 1, "default_w": "0",
                   "blocks": [
                       {"graph": {"n": 2, "edges": [[1, 2]]}, "colours": [1, 1], "w": "2"},
                       {"graph": {"n": 3, "edges": [[1, 2], [2, 3], [1, 3]]},
                        "colours": [1, 1, 1], "w": "-12"}]})
    code, out, _ = run(capsys, "virial", "invert", "--model", model, "--degree", "3",
                       "--method", "recursive")
    assert code == 0
    rows = json.loads(out)["coefficients"]
    assert {"n": {"1": 2}, "c": "-1", "method": "recursive"} in rows
    assert {"n": {"1": 3}, "c": "4", "method": "recursive"} in rows


def test_virial_compare_mc_model_with_tolerance(capsys, hard_rods_model):
    code, out, _ = run(capsys, "virial", "compare", "--model", hard_rods_model,
                       "--degree", "2", "--samples", "60000", "--seed", "4",
                       "--tol", "0.08")
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "identical"
    assert doc["tolerance"] == 0.08


def test_virial_mu(capsys, synthetic_model):
    code, out, _ = run(capsys, "virial", "mu", "--model", synthetic_model,
                       "--degree", "2", "--species", "1")
    assert code == 0
    rows = json.loads(out)["correction"]
    assert rows == [{"n": {"2": 1}, "c": "-1", "method": "chemical-potential"}]


# -- weights ----------------------------------------------------------------------


def test_weights_estimate_and_determinism(tmp_path, capsys, hard_rods_model):
    graph = write(tmp_path / "edge.json", {"n": 2, "edges": [[1, 2]], "colours": [1, 1]})
    out1 = str(tmp_path / "a.json")
    out2 = str(tmp_path / "b.json")
    for out in (out1, out2):
        code = main(["weights", "estimate", "--graph", graph, "--model", hard_rods_model,
                     "--samples", "20000", "--seed", "9", "--output", out])
        assert code == 0
    first = (tmp_path / "a.json").read_bytes()
    assert first == (tmp_path / "b.json").read_bytes()
    doc = json.loads(first)
    assert doc["seed"] == 9 and doc["sample_count"] == 20000
    assert abs(doc["estimate"] + 2.0) <= 3 * doc["stderr"]


def test_weights_kp_check_pass_and_fail(tmp_path, capsys):
    model = write(tmp_path / "rods.json",
                  {"type": "hard_rods_1d",
                   "sigma": {str(k): float(k) for k in range(1, 13)}, "L": 80.0})
    base = {str(k): 0.5 * math.exp(-2 * k) for k in range(1, 13)}
    good = write(tmp_path / "kp.json", {"radii": base, "a": 1.0, "b": 0.0})
    code, out, _ = run(capsys, "weights", "kp-check", "--model", model, "--spec", good)
    assert code == 0 and json.loads(out)["passed"]
    bad = write(tmp_path / "kp2.json",
                {"radii": {k: 2.8 * v for k, v in base.items()}, "a": 1.0, "b": 0.0})
    code, out, _ = run(capsys, "weights", "kp-check", "--model", model, "--spec", bad)
    assert code == 1
    doc = json.loads(out)
    assert not doc["passed"] and not doc["entries"][0]["passed"]


def test_weights_stability(capsys, hard_rods_model):
    code, out, _ = run(capsys, "weights", "stability", "--model", hard_rods_model,
                       "--b", "0", "--samples", "200")
    assert code == 0 and json.loads(out)["passed"]


# -- bounds -----------------------------------------------------------------------


def test_bounds_compute_constant_only(tmp_path, capsys):
    spec = write(tmp_path / "d.json",
                 {"schema": "virialkit/1",
                  "species": [{"i": 1, "r": 0.25, "R": 1.0, "a": 1.0}]})
    code, out, _ = run(capsys, "bounds", "compute", "--spec", spec)
    assert code == 0
    doc = json.loads(out)
    assert doc["constant"] == pytest.approx(math.exp(1 / 3), abs=1e-12)
    assert "hypothesis" not in doc


def test_bounds_compute_with_model(tmp_path, capsys, synthetic_model):
    spec = write(tmp_path / "d.json",
                 {"species": [{"i": 1, "r": 0.02, "R": 0.08, "a": 0.3},
                              {"i": 2, "r": 0.02, "R": 0.08, "a": 0.3}]})
    code, out, _ = run(capsys, "bounds", "compute", "--spec", spec,
                       "--model", synthetic_model, "--degree", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["hypothesis"]["passed"]
    assert doc["audit"]["passed"]
    assert doc["per_n_bounds"]


def test_bounds_compute_hypothesis_and_audit_on_negative_quadratic(tmp_path, capsys):
    # the model builds p = z - z^2 exactly; on |z| <= 1/4 the log-derivative
    # budget 0.75 holds and the audit is clean
    model = write(tmp_path / "m.json",
                  {"type": "synthetic", "species": 1, "default_w": "0",
                   "blocks": [
                       {"graph": {"n": 2, "edges": [[1, 2]]}, "colours": [1, 1], "w": "-2"},
                       {"graph": {"n": 3, "edges": [[1, 2], [2, 3], [1, 3]]},
                        "colours": [1, 1, 1], "w": "-12"}]})
    spec = write(tmp_path / "d.json",
                 {"species": [{"i": 1, "r": 0.1, "R": 0.25, "a": 0.75}]})
    code, out, _ = run(capsys, "bounds", "compute", "--spec", spec,
                       "--model", model, "--degree", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["hypothesis"]["passed"]
    assert doc["hypothesis"]["log_derivative"][0]["max_log_abs"] == pytest.approx(
        math.log(2.0), abs=1e-9)
    assert doc["audit"]["passed"]


# -- errors -----------------------------------------------------------------------


def test_missing_file_is_usage_error(capsys):
    code, _, err = run(capsys, "graphs", "blocks", "--input", "/nonexistent.json")
    assert code == 2
    assert "error:" in err


def test_unknown_schema_is_usage_error(tmp_path, capsys):
    path = write(tmp_path / "g.json", {"schema": "virialkit/999", "n": 2, "edges": []})
    code, _, err = run(capsys, "graphs", "blocks", "--input", path)
    assert code == 2
    assert "schema" in err


def test_two_connected_method_on_non_factorizing_model(tmp_path, capsys, hard_rods_model):
    # interaction models do factorize (rigid molecules), so this passes through;
    # the refusal path needs a source that explicitly does not declare it
    from virialkit.cli import _virial_by_method
    from virialkit.series import Truncation

    class Opaque:
        field = "float"
        block_factorizing = False

    with pytest.raises(ValueError):
        _virial_by_method(Opaque(), Truncation(2, 1), "two-connected")


def test_threads_flag_validation(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--threads", "0", "graphs", "count", "--n", "2"])
    assert exc.value.code == 2
