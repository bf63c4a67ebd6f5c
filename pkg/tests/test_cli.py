import json

import numpy as np
import pytest

from eltqc.cli import EXIT_CONFIG, EXIT_NUMERIC, main
from eltqc.elt import PopulationSeries
from eltqc.linalg import matrix_from_literal, matrix_to_literal

SMALL_GRID = {"grid": {"t_max": 10.0, "n": 11}, "family": {"n": 9}}


def write_config(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def read_series(path):
    return PopulationSeries.from_csv(path.read_text())


def test_markovian_default_outputs(tmp_path):
    assert main(["markovian", "--out", str(tmp_path), "--seed", "3"]) == 0
    exact = read_series(tmp_path / "markovian_exact.csv")
    sv = read_series(tmp_path / "markovian_statevector.csv")
    shots = read_series(tmp_path / "markovian_shots.csv")
    assert exact.times.size == 101
    assert np.max(np.abs(sv.excited - 0.75 * np.exp(-sv.times))) < 1e-10
    assert np.max(np.abs(shots.excited - exact.excited)) < 0.02
    assert (tmp_path / "markovian_shots.csv").read_text().splitlines()[1].endswith("Shots(8192;3)")
    meta = json.loads((tmp_path / "markovian_meta.json").read_text())
    assert meta["gamma_per_second"] == pytest.approx(1.52e9)


def test_markovian_zero_shots_is_statevector_only(tmp_path):
    assert main(["markovian", "--out", str(tmp_path), "--shots", "0"]) == 0
    assert (tmp_path / "markovian_statevector.csv").exists()
    assert not (tmp_path / "markovian_shots.csv").exists()


def test_markovian_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["markovian", "--out", str(a), "--seed", "11", "--threads", "1"]) == 0
    assert main(["markovian", "--out", str(b), "--seed", "11", "--threads", "3"]) == 0
    for f in ("markovian_statevector.csv", "markovian_shots.csv", "markovian_meta.json"):
        assert (a / f).read_bytes() == (b / f).read_bytes()


@pytest.mark.parametrize("regime", ["strong", "detuned"])
def test_jc_regimes(tmp_path, regime):
    cfg = write_config(tmp_path, {**SMALL_GRID, "backend": {"shots": 2048}})
    assert main(["jc", "--config", cfg, "--regime", regime, "--out", str(tmp_path)]) == 0
    exact = read_series(tmp_path / f"jc_{regime}_exact.csv")
    sv = read_series(tmp_path / f"jc_{regime}_elt_statevector.csv")
    assert np.max(np.abs(sv.excited - exact.excited)) < 5e-3
    assert (tmp_path / f"jc_{regime}_elt_shots.csv").exists()
    weights = json.loads((tmp_path / "weights.json").read_text())
    assert np.allclose(np.sum(weights["weights"], axis=1), 1)
    assert weights["regime"]["name"] == regime
    report = json.loads((tmp_path / "fit_report.json").read_text())
    assert report["max_abs_residual"] < 5e-3


def test_jc_custom_markovian_limit_uses_sparse_weights(tmp_path):
    cfg = write_config(tmp_path, {**SMALL_GRID, "reg": 0.0, "backend": {"shots": 0}})
    assert main(["jc", "--config", cfg, "--regime", "custom", "--lambda", "100",
                 "--out", str(tmp_path)]) == 0
    W = np.array(json.loads((tmp_path / "weights.json").read_text())["weights"])
    assert np.all(np.count_nonzero(W > 1e-12, axis=1) <= 2)
    sv = read_series(tmp_path / "jc_custom_elt_statevector.csv")
    assert np.max(np.abs(sv.excited - np.exp(-sv.times))) < 0.02


def test_custom_regime_requires_lambda(tmp_path):
    assert main(["oracle", "--regime", "custom", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_oracle_and_fit_weights(tmp_path):
    cfg = write_config(tmp_path, SMALL_GRID)
    assert main(["oracle", "--config", cfg, "--out", str(tmp_path)]) == 0
    ref = tmp_path / "jc_strong_exact.csv"
    assert read_series(ref).times.size == 11
    assert main(["fit-weights", str(ref), "--config", cfg, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "fit_report.json").read_text())
    assert report["max_abs_residual"] < 1e-10 and not report["any_outside_hull"]


def test_fit_weights_malformed_reference(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("time,value\n0,1\n")
    assert main(["fit-weights", str(bad), "--out", str(tmp_path)]) == EXIT_NUMERIC


def test_dilate_identity(tmp_path):
    src = tmp_path / "eye.json"
    src.write_text(json.dumps(matrix_to_literal(np.eye(2))))
    assert main(["dilate", str(src), "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "dilated.json").read_text())
    U = matrix_from_literal(doc)
    np.testing.assert_allclose(U, np.diag([1, 1, -1, -1]), atol=1e-15)


def test_synthesize_kraus_dilation(tmp_path):
    assert main(["synthesize", "--gamma-t", str(np.log(2)), "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "synthesis.json").read_text())
    assert doc["fidelity"] >= 1 - 1e-9
    assert doc["cnot_count"] <= 3


def test_non_contraction_exit_code(tmp_path):
    src = tmp_path / "big.json"
    src.write_text(json.dumps(matrix_to_literal(2 * np.eye(2))))
    assert main(["dilate", str(src), "--out", str(tmp_path)]) == EXIT_NUMERIC


def test_malformed_matrix_reports_position(tmp_path, capsys):
    src = tmp_path / "broken.json"
    src.write_text('{\n  "rows": 2,\n  "cols": \n}')
    assert main(["dilate", str(src), "--out", str(tmp_path)]) == EXIT_NUMERIC
    assert "broken.json:4:" in capsys.readouterr().err


@pytest.mark.parametrize("doc", [
    {"grid": {"n": 1}},
    {"backend": {"shots": -5}},
    {"colour": "blue"},
    {"family": {"mode": "Sideways"}},
])
def test_bad_config_exit_code(tmp_path, doc):
    assert main(["markovian", "--config", write_config(tmp_path, doc), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_unparsable_config(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text("{not json")
    assert main(["markovian", "--config", str(p)]) == EXIT_CONFIG


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("ELTQC_OUT", str(tmp_path / "env"))
    cfg = write_config(tmp_path, SMALL_GRID)
    assert main(["oracle", "--config", cfg]) == 0
    assert (tmp_path / "env" / "jc_strong_exact.csv").exists()
    assert main(["oracle", "--config", cfg, "--out", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "flag" / "jc_strong_exact.csv").exists()
