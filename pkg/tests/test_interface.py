"""CLI surface and file formats: exit codes, round-trips, reproducibility."""

import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from kdde.encoder import TransitionDataset
from kdde.errors import SchemaError
from kdde.fileio import (
    ExperimentConfig,
    dumps_17g,
    load_dataset,
    load_model,
    load_states,
    save_dataset,
    save_states,
)


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "kdde", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestFileFormats:
    def test_17g_floats_roundtrip_bit_exact(self):
        rng = np.random.default_rng(0)
        values = list(rng.standard_normal(200) * 10.0 ** rng.integers(-10, 10, 200))
        text = dumps_17g({"v": values})
        back = json.loads(text)["v"]
        assert all(a == b for a, b in zip(values, back))

    def test_dataset_roundtrip(self, tmp_path):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((37, 2))
        Y = np.tanh(X)
        data = TransitionDataset.from_pairs(X, Y, {"spec": {"kind": "uniform"}})
        path = tmp_path / "d.csv"
        save_dataset(data, path)
        back = load_dataset(path)
        np.testing.assert_array_equal(back.x, X)
        np.testing.assert_array_equal(back.x_next, Y)
        assert back.provenance["spec"]["kind"] == "uniform"
        rows = read_rows(path)
        assert rows[0] == ["x1", "x2", "y1", "y2"]
        assert len(rows) == 38

    def test_states_roundtrip(self, tmp_path):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((11, 3))
        save_states(X, tmp_path / "s.csv")
        np.testing.assert_array_equal(load_states(tmp_path / "s.csv"), X)

    def test_model_roundtrip(self, tmp_path):
        from kdde.dictionary import make_rbf_grid
        from kdde.encoder import fit_dde

        rng = np.random.default_rng(3)
        X = rng.uniform(-1, 1, size=(200, 2))
        data = TransitionDataset.from_pairs(X, 0.9 * X, {"tag": "unit"})
        d = make_rbf_grid([3, 3], [[-1, 1], [-1, 1]])
        model = fit_dde(data, d)
        from kdde.fileio import save_model

        save_model(model, tmp_path / "m.json")
        back = load_model(tmp_path / "m.json")
        np.testing.assert_array_equal(back.A, model.A)
        np.testing.assert_array_equal(
            back.dictionary.lift_batch(X), model.dictionary.lift_batch(X)
        )
        np.testing.assert_array_equal(back.grams.R, model.grams.R)
        assert back.method == "dde"

    def test_model_with_singular_gram_saves(self, tmp_path):
        # a singular gram (e.g. dead observables) makes the condition
        # estimate infinite; the ridge-solved model must still serialize
        import dataclasses

        from kdde.dictionary import state_dictionary
        from kdde.encoder import fit_dde
        from kdde.fileio import save_model

        rng = np.random.default_rng(6)
        X = rng.uniform(-1, 1, size=(50, 2))
        data = TransitionDataset.from_pairs(X, 0.5 * X)
        model = fit_dde(data, state_dictionary(2), ridge=1e-8)
        meta = dict(model.meta, condition_estimate=float("inf"))
        model = dataclasses.replace(model, meta=meta)
        save_model(model, tmp_path / "singular.json")
        doc = json.loads((tmp_path / "singular.json").read_text())
        assert doc["meta"]["condition_estimate"] is None

    def test_config_roundtrip_and_unknown_keys(self):
        cfg = ExperimentConfig(dataset={"kind": "traj", "size": 1000})
        back = ExperimentConfig.from_json(cfg.to_json())
        assert back == cfg
        with pytest.raises(SchemaError):
            ExperimentConfig.from_json('{"dataset": {}, "bogus": 1}')
        with pytest.raises(SchemaError):
            ExperimentConfig.from_json('{"no_dataset": {}}')


class TestGenDataCommand:
    def test_uniform_900(self, tmp_path):
        out = tmp_path / "u.csv"
        res = run_cli("gen-data", "--kind", "uniform", "--n", "900", "--out", str(out))
        assert res.returncode == 0, res.stderr
        assert len(read_rows(out)) == 901
        side = json.loads((tmp_path / "u.csv.json").read_text())
        assert side["spec"]["kind"] == "uniform"

    def test_gaussian_with_border(self, tmp_path):
        out = tmp_path / "g.csv"
        res = run_cli(
            "gen-data", "--kind", "gaussian", "--n", "1000",
            "--center", "0.8,0", "--seed", "7", "--out", str(out),
        )
        assert res.returncode == 0, res.stderr
        rows = read_rows(out)
        assert len(rows) == 1001
        X = np.array([[float(v) for v in r] for r in rows[1:]])[:, :2]
        on_border = (
            np.isclose(np.abs(X[:, 0]), 0.8) | np.isclose(np.abs(X[:, 1]), 2.0)
        )
        assert on_border.sum() == 100

    def test_missing_kind_is_usage_error(self, tmp_path):
        res = run_cli("gen-data", "--n", "100", "--out", str(tmp_path / "x.csv"))
        assert res.returncode == 2
        assert "usage" in (res.stderr + res.stdout).lower()

    def test_env_seed_fallback(self, tmp_path):
        import os

        env = dict(os.environ, KDDE_SEED="123")
        a = subprocess.run(
            [sys.executable, "-m", "kdde", "gen-data", "--kind", "gaussian",
             "--n", "200", "--out", str(tmp_path / "a.csv")],
            capture_output=True, text=True, env=env,
        )
        assert a.returncode == 0, a.stderr
        side = json.loads((tmp_path / "a.csv.json").read_text())
        assert side["spec"]["seed"] == 123


@pytest.fixture(scope="module")
def traj_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "traj.csv"
    res = run_cli("gen-data", "--kind", "traj", "--n", "1000", "--seed", "1",
                  "--out", str(path))
    assert res.returncode == 0, res.stderr
    return path


@pytest.fixture(scope="module")
def fitted(tmp_path_factory):
    root = tmp_path_factory.mktemp("pipeline")
    data = root / "traj.csv"
    model = root / "model.json"
    assert run_cli("gen-data", "--kind", "traj", "--n", "2500", "--seed", "2",
                   "--out", str(data)).returncode == 0
    assert run_cli("fit", "--method", "dde", "--dict", "rbf:5x5",
                   "--data", str(data), "--out", str(model)).returncode == 0
    return root, data, model


class TestFitCommand:
    def test_fit_dde_rbf(self, traj_csv, tmp_path):
        out = tmp_path / "m.json"
        res = run_cli("fit", "--method", "dde", "--dict", "rbf:5x5",
                      "--data", str(traj_csv), "--out", str(out))
        assert res.returncode == 0, res.stderr
        assert "condition estimate" in res.stdout
        assert "hull volume" in res.stdout
        assert "out-of-hull" in res.stdout
        model = json.loads(out.read_text())
        assert len(model["A"]) == 27 and len(model["A"][0]) == 27
        assert model["method"] == "dde"

    def test_fit_edmd(self, traj_csv, tmp_path):
        out = tmp_path / "m.json"
        res = run_cli("fit", "--method", "edmd", "--dict", "rbf:5x5",
                      "--data", str(traj_csv), "--out", str(out))
        assert res.returncode == 0, res.stderr
        assert json.loads(out.read_text())["method"] == "edmd"

    def test_fit_large_dictionary(self, traj_csv, tmp_path):
        out = tmp_path / "m.json"
        res = run_cli("fit", "--method", "dde", "--dict", "rbf:9x9",
                      "--data", str(traj_csv), "--out", str(out))
        assert res.returncode == 0, res.stderr
        assert len(json.loads(out.read_text())["A"]) == 83

    def test_mesh_dump(self, traj_csv, tmp_path):
        out = tmp_path / "m.json"
        mesh_path = tmp_path / "mesh.json"
        res = run_cli("fit", "--method", "dde", "--dict", "state",
                      "--data", str(traj_csv), "--out", str(out),
                      "--dump-mesh", str(mesh_path))
        assert res.returncode == 0, res.stderr
        mesh = json.loads(mesh_path.read_text())
        assert {"nodes", "simplices", "simplex_volumes", "node_volumes"} <= set(mesh)
        assert sum(mesh["node_volumes"]) == pytest.approx(mesh["hull_volume"])

    def test_singular_gram_exits_4(self, tmp_path):
        # five samples cannot support 27 observables at ridge zero
        path = tmp_path / "tiny.csv"
        res = run_cli("gen-data", "--kind", "traj", "--n", "5", "--n-traj", "5",
                      "--seed", "3", "--out", str(path))
        assert res.returncode == 0, res.stderr
        res = run_cli("fit", "--method", "dde", "--dict", "rbf:5x5",
                      "--data", str(path), "--out", str(tmp_path / "m.json"))
        assert res.returncode == 4
        assert "condition" in res.stderr or "singular" in res.stderr.lower()

    def test_degenerate_input_exits_4(self, tmp_path):
        path = tmp_path / "line.csv"
        with open(path, "w") as fh:
            fh.write("x1,x2,y1,y2\n")
            for i in range(5):
                fh.write(f"{i},{i},{i},{i}\n")
        res = run_cli("fit", "--method", "dde", "--dict", "state",
                      "--data", str(path), "--out", str(tmp_path / "m.json"))
        assert res.returncode == 4

    def test_io_error_exits_3(self, traj_csv, tmp_path):
        res = run_cli("fit", "--method", "dde", "--dict", "state",
                      "--data", str(tmp_path / "missing.csv"),
                      "--out", str(tmp_path / "m.json"))
        assert res.returncode == 3

    def test_reproducible_model_bytes(self, traj_csv, tmp_path):
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            res = run_cli("fit", "--method", "dde", "--dict", "rbf:3x3",
                          "--data", str(traj_csv), "--out", str(out))
            assert res.returncode == 0, res.stderr
            doc = json.loads(out.read_text())
            doc["meta"].pop("fit_time")
            outs.append(json.dumps(doc, sort_keys=True))
        assert outs[0] == outs[1]


class TestEvalAndConvergence:
    def test_eval_prints_totals(self, fitted, tmp_path):
        root, data, model = fitted
        report = tmp_path / "report.csv"
        res = run_cli("eval", "--model", str(model), "--data", str(data),
                      "--grid", "50x50", "--out", str(report))
        assert res.returncode == 0, res.stderr
        assert "total_sse:" in res.stdout and "sse_variance:" in res.stdout
        grid = np.genfromtxt(report, delimiter=",")
        assert grid.shape == (50, 50)
        meta = json.loads((tmp_path / "report.csv.json").read_text())
        assert meta["total_sse"] > 0

    def test_eval_grid_consistency(self, fitted):
        root, data, model = fitted
        totals = {}
        for grid in ("50x50", "100x100"):
            res = run_cli("eval", "--model", str(model), "--data", str(data),
                          "--grid", grid)
            assert res.returncode == 0, res.stderr
            total = float(res.stdout.split("total_sse:")[1].splitlines()[0])
            cells = int(grid.split("x")[0]) ** 2
            totals[grid] = total / cells
        rel = abs(totals["100x100"] - totals["50x50"]) / totals["50x50"]
        assert rel < 0.05

    def test_eval_of_both_methods_comparable(self, fitted, tmp_path):
        root, data, model = fitted
        edmd_model = tmp_path / "edmd.json"
        assert run_cli("fit", "--method", "edmd", "--dict", "rbf:5x5",
                       "--data", str(data), "--out", str(edmd_model)).returncode == 0
        out = {}
        for name, m in (("dde", model), ("edmd", edmd_model)):
            res = run_cli("eval", "--model", str(m), "--data", str(data))
            assert res.returncode == 0
            out[name] = float(res.stdout.split("total_sse:")[1].splitlines()[0])
        assert out["dde"] < out["edmd"]

    def test_convergence_trace(self, tmp_path):
        out = tmp_path / "trace.csv"
        res = run_cli("convergence", "--sizes", "500,1000,2000", "--seed", "4",
                      "--out", str(out))
        assert res.returncode == 0, res.stderr
        rows = read_rows(out)
        assert rows[0] == ["N", "entry_id", "value"]
        # 4 selected entries x (Q and R) x 3 sizes
        assert len(rows) == 1 + 3 * 4 * 2


class TestLiftCommand:
    def test_rbf_lift_roundtrip(self, tmp_path):
        rng = np.random.default_rng(8)
        X = rng.uniform(-1, 1, size=(40, 2))
        states = tmp_path / "states.csv"
        save_states(X, states)
        out = tmp_path / "lifted.csv"
        res = run_cli("lift", "--dict", "rbf:3x3", "--data", str(states),
                      "--out", str(out))
        assert res.returncode == 0, res.stderr
        Z = load_states(out)
        assert Z.shape == (40, 11)
        np.testing.assert_array_equal(Z[:, :2], X)

    def test_mlp_lift_matches_loader(self, tmp_path):
        rng = np.random.default_rng(9)
        doc = {
            "input_dim": 2,
            "include_state": True,
            "layers": [
                {"w": rng.standard_normal((6, 2)).tolist(),
                 "b": rng.standard_normal(6).tolist(), "act": "relu"},
                {"w": rng.standard_normal((4, 6)).tolist(),
                 "b": rng.standard_normal(4).tolist(), "act": "linear"},
            ],
        }
        wfile = tmp_path / "w.json"
        wfile.write_text(json.dumps(doc))
        X = rng.standard_normal((25, 2))
        states = tmp_path / "states.csv"
        save_states(X, states)
        out = tmp_path / "lifted.csv"
        res = run_cli("lift", "--dict", f"mlp:{wfile}", "--data", str(states),
                      "--out", str(out))
        assert res.returncode == 0, res.stderr
        from kdde.dictionary import load_mlp_dictionary

        ref = load_mlp_dictionary(str(wfile))
        np.testing.assert_allclose(load_states(out), ref.lift_batch(X), atol=1e-12)


class TestReproduceCommand:
    def test_small_table_two(self, tmp_path):
        out = tmp_path / "table.md"
        res = run_cli("reproduce", "--table", "II", "--sizes", "1000",
                      "--repeats", "2", "--out", str(out))
        assert res.returncode == 0, res.stderr
        text = out.read_text()
        assert "Center" in text and "1000" in text
