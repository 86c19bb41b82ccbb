#!/usr/bin/env python3
"""
End-to-End Tests for attachlab
Tests complete workflows through the command line, the API and the experiment store
"""

import unittest
import tempfile
import os
import io
import json
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest.mock import patch

# Import components to test
from cli.main import main
from experiments.runner import ExperimentConfig, experiment_dir, run_experiment
from experiments.store import ExperimentStore, wilson_interval
from graphs.core import PREFERENTIAL, UNIFORM

try:
    from fastapi.testclient import TestClient
    from api.main import app
    API_AVAILABLE = True
except ImportError as e:
    print(f"Warning: API not available for testing: {e}")
    API_AVAILABLE = False


def _run_cli(argv):
    """Run the CLI, returning (exit code, stdout)."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue()


def _small_config(name="smoke", trials=3, properties=("pm", "lemma:components")):
    return ExperimentConfig(
        name=name,
        model=[PREFERENTIAL, UNIFORM],
        m=2,
        n=[40, 60],
        trials=trials,
        property=list(properties),
        seed=7,
    )


class TestCommandLineWorkflows(unittest.TestCase):
    """Test the command-line surface from generation to verification."""

    def setUp(self):
        """Set up a scratch directory."""
        self.temp_dir = tempfile.mkdtemp()

    def test_generate_then_match(self):
        """Test gen followed by match on the written edge list."""
        print("\n🔄 Testing gen -> match")
        path = os.path.join(self.temp_dir, "g.tsv")
        code, _ = _run_cli(["gen", "--model", "pa", "--n", "200", "--m1", "3", "--m2", "1", "--seed", "4",
                            "--out", path])
        self.assertEqual(code, 0)
        self.assertTrue(Path(path).exists())

        code, output = _run_cli(["match", "--in", path, "--certify"])
        self.assertEqual(code, 0)
        payload = json.loads(output)
        self.assertEqual(payload["n"], 200)
        self.assertIn(payload["certificate"]["kind"], ("tutte", "matching"))
        if payload["perfect"]:
            self.assertEqual(payload["nu"], 100)

    def test_hamilton_search(self):
        """Test the ham subcommand on a generated graph."""
        code, output = _run_cli(["ham", "--model", "pa", "--n", "40", "--m", "5", "--seed", "2",
                                 "--budget", "50000"])
        self.assertEqual(code, 0)
        payload = json.loads(output)
        self.assertEqual(payload["n"], 40)
        self.assertIn("longest_path_len", payload)
        if payload.get("hamiltonian"):
            self.assertEqual(len(payload["cycle"]), 40)

    def test_verify_published_constants(self):
        """Test verify constants for every published set."""
        for name in ("a", "b", "c", "d"):
            code, output = _run_cli(["verify", "constants", "--set", name])
            self.assertEqual(code, 0, name)
            self.assertTrue(json.loads(output)["overall"])

    def test_verify_failing_constants(self):
        """Test that a failing custom set exits with status 1."""
        path = os.path.join(self.temp_dir, "bad.json")
        with open(path, "w") as f:
            json.dump({"m": 120, "l": 1, "alpha": 0.2, "x": 0.22791, "y": 0.020063, "z": 0.851649,
                       "d": 0.387967}, f)
        code, output = _run_cli(["verify", "constants", "--set", path])
        self.assertEqual(code, 1)
        self.assertFalse(json.loads(output)["overall"])

    def test_verify_lemma(self):
        """Test the degree-sum lemma check through the CLI."""
        code, output = _run_cli(["verify", "lemma", "--name", "degree_sum", "--model", "pa", "--n", "2000",
                                 "--m", "2", "--seed", "3"])
        self.assertEqual(code, 0)
        payload = json.loads(output)
        self.assertTrue(payload["monotone"])
        self.assertEqual(payload["start"], 2 * 2 * 500)

    def test_lowerbound(self):
        """Test the lowerbound table."""
        code, output = _run_cli(["lowerbound", "--n", "400", "--trials", "2", "--seed", "1"])
        self.assertEqual(code, 0)
        payload = json.loads(output)
        self.assertTrue(payload["isolated_exact"])
        self.assertEqual(payload["trials"], 2)
        self.assertIn("A_n", payload["mean_fractions"])

    def test_errors_exit_with_two(self):
        """Test bad input exits with status 2."""
        code, _ = _run_cli(["match", "--model", "pa", "--m", "2"])
        self.assertEqual(code, 2)
        code, _ = _run_cli(["match", "--in", os.path.join(self.temp_dir, "missing.tsv")])
        self.assertEqual(code, 2)
        code, _ = _run_cli(["verify", "constants", "--set", os.path.join(self.temp_dir, "none.json")])
        self.assertEqual(code, 2)

    def test_experiment_and_report(self):
        """Test an experiment config run and rendered through the CLI."""
        print("\n🔄 Testing experiment -> report")
        config = os.path.join(self.temp_dir, "exp.json")
        out_dir = os.path.join(self.temp_dir, "exp")
        with open(config, "w") as f:
            json.dump({"name": "cli", "model": "preferential", "m": 2, "n": [30], "trials": 2,
                       "property": "lemma:components", "seed": 1}, f)
        code, _ = _run_cli(["experiment", "--config", config, "--out", out_dir, "--workers", "1"])
        self.assertEqual(code, 0)
        code, output = _run_cli(["report", "--in", out_dir, "--format", "md"])
        self.assertEqual(code, 0)
        self.assertIn("lemma:components", output)


class TestExperimentHarness(unittest.TestCase):
    """Test determinism, resumption and storage of experiments."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def _records(self, out_dir):
        return {
            (r.cell_key, r.trial): r.reproducible()
            for r in ExperimentStore(out_dir).load_records()
        }

    def test_runs_are_reproducible(self):
        """Test that two runs with the same seed store identical records."""
        cfg = _small_config()
        first, second = os.path.join(self.temp_dir, "one"), os.path.join(self.temp_dir, "two")
        table = run_experiment(cfg, first, workers=1)
        run_experiment(cfg, second, workers=1)
        self.assertEqual(self._records(first), self._records(second))
        self.assertEqual(len(table), 2 * 2 * 2)
        self.assertTrue((table["trials"] == 3).all())

    def test_parallel_matches_sequential(self):
        """Test that the process pool stores the same records."""
        cfg = _small_config()
        sequential, parallel = os.path.join(self.temp_dir, "seq"), os.path.join(self.temp_dir, "par")
        run_experiment(cfg, sequential, workers=1)
        run_experiment(cfg, parallel, workers=2)
        self.assertEqual(self._records(sequential), self._records(parallel))

    def test_resume_skips_finished_trials(self):
        """Test that a truncated run is completed without duplicates."""
        cfg = _small_config()
        reference, resumed = os.path.join(self.temp_dir, "ref"), os.path.join(self.temp_dir, "resume")
        run_experiment(cfg, reference, workers=1)
        run_experiment(cfg, resumed, workers=1)

        records_file = Path(resumed) / "records.jsonl"
        lines = records_file.read_text().splitlines(keepends=True)
        records_file.write_text("".join(lines[:-4]))
        run_experiment(cfg, resumed, workers=1)

        self.assertEqual(len(records_file.read_text().splitlines()), len(lines))
        self.assertEqual(self._records(resumed), self._records(reference))

    def test_other_config_refused(self):
        """Test that a directory holding another config is not reused."""
        out_dir = os.path.join(self.temp_dir, "clash")
        run_experiment(_small_config(trials=1), out_dir, workers=1)
        with self.assertRaises(ValueError):
            run_experiment(_small_config(trials=2), out_dir, workers=1)

    def test_corrupt_lines_are_skipped(self):
        """Test that a damaged record line is skipped with a warning."""
        out_dir = os.path.join(self.temp_dir, "corrupt")
        run_experiment(_small_config(trials=1), out_dir, workers=1)
        store = ExperimentStore(out_dir)
        before = len(store.load_records())
        with open(store.records_file, "a") as f:
            f.write("{not json\n")
        with self.assertLogs("experiments.store", level="WARNING"):
            self.assertEqual(len(store.load_records()), before)

    def test_config_validation(self):
        """Test that unknown properties and models are rejected."""
        with self.assertRaises(ValueError):
            ExperimentConfig(model="preferential", m=2, n=[10], trials=1, property="bogus")
        with self.assertRaises(ValueError):
            ExperimentConfig(model="smallworld", m=2, n=[10], trials=1, property="pm")
        with self.assertRaises(ValueError):
            ExperimentConfig(model="preferential", m=3, m1=1, m2=1, n=[10], trials=1, property="pm")

    def test_names_stay_inside_results_dir(self):
        """Test that names with separators or parent references are rejected."""
        for name in ["../escaped", "..", ".", "a/b", "a\\b", "", "bad name"]:
            with self.assertRaises(ValueError, msg=name):
                ExperimentConfig(name=name, model="preferential", m=2, n=[10], trials=1, property="pm")
        with self.assertRaises(ValueError):
            experiment_dir("../escaped")

        with patch.dict(os.environ, {"ATTACHLAB_RESULTS_DIR": self.temp_dir}):
            self.assertEqual(experiment_dir("run-1.b").parent, Path(self.temp_dir))
        cfg = ExperimentConfig(name="run-1.b", model="preferential", m=2, n=[10], trials=1, property="pm")
        self.assertEqual(cfg.name, "run-1.b")

    def test_exports(self):
        """Test CSV and markdown exports of the cell table."""
        out_dir = os.path.join(self.temp_dir, "export")
        run_experiment(_small_config(trials=2), out_dir, workers=1)
        store = ExperimentStore(out_dir)
        csv_text = Path(store.export_csv()).read_text()
        self.assertTrue(csv_text.startswith("property,model,m1,m2,n,trials"))
        self.assertTrue(Path(store.export_markdown()).exists())

    def test_wilson_interval(self):
        """Test the Wilson interval at the edges."""
        low, high = wilson_interval(0, 20)
        self.assertAlmostEqual(low, 0.0)
        self.assertGreater(high, 0.0)
        low, high = wilson_interval(20, 20)
        self.assertLess(low, 1.0)
        self.assertAlmostEqual(high, 1.0)
        self.assertEqual(wilson_interval(0, 0), (0.0, 1.0))


@unittest.skipUnless(API_AVAILABLE, "API not available")
class TestApiWorkflows(unittest.TestCase):
    """Test the HTTP API."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.client = TestClient(app)

    def test_health(self):
        """Test the health endpoint."""
        response = self.client.get("/health")
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.json()["status"], "healthy")

    def test_roots(self):
        """Test the root endpoint at m = 120."""
        payload = self.client.get("/roots/120").json()
        self.assertLessEqual(payload["gamma"], 0.06238)
        self.assertLess(payload["beta"], payload["beta_upper_bound"])

    def test_constants(self):
        """Test published and unknown constant sets."""
        self.assertTrue(self.client.get("/constants/a").json()["overall"])
        self.assertEqual(self.client.get("/constants/zz").status_code, 404)

    def test_graph_summary_and_matching(self):
        """Test graph summary and matching endpoints."""
        request = {"n": 100, "m1": 3, "model": "preferential", "seed": 2}
        summary = self.client.post("/graphs/summary", json=request).json()
        self.assertEqual(summary["n"], 100)
        self.assertAlmostEqual(summary["mean_degree"], 6.0)
        matching = self.client.post("/matching", json=request).json()
        self.assertLessEqual(matching["matching_number"], 50)

    def test_bad_model_is_a_client_error(self):
        """Test that an unknown model gives 400."""
        response = self.client.post("/matching", json={"n": 10, "m1": 2, "model": "bogus"})
        self.assertEqual(response.status_code, 400)

    def test_lowerbound(self):
        """Test the lower-bound endpoint."""
        payload = self.client.post("/lowerbound", json={"n": 1000, "seed": 3}).json()
        self.assertEqual(payload["n"], 1000)
        self.assertIn("reference", payload)

    def test_experiment_roundtrip(self):
        """Test scheduling an experiment and reading its table."""
        env = {"ATTACHLAB_RESULTS_DIR": self.temp_dir, "ATTACHLAB_THREADS": "1"}
        with patch.dict(os.environ, env):
            body = {"name": "api", "model": "preferential", "m": 2, "n": [30], "trials": 2,
                    "property": "lemma:components", "seed": 5}
            response = self.client.post("/experiments", json=body)
            self.assertEqual(response.status_code, 200)
            self.assertTrue(response.json()["success"])
            cells = self.client.get("/experiments/api").json()["cells"]
            self.assertEqual(cells[0]["trials"], 2)
            self.assertEqual(self.client.get("/experiments/missing").status_code, 404)

    def test_experiment_names_cannot_escape(self):
        """Test that the experiment endpoints refuse names outside the results dir."""
        results = os.path.join(self.temp_dir, "results")
        os.makedirs(results)
        outside = os.path.join(self.temp_dir, "outside")
        run_experiment(_small_config(trials=1, properties=("lemma:components",)), outside, workers=1)

        with patch.dict(os.environ, {"ATTACHLAB_RESULTS_DIR": results, "ATTACHLAB_THREADS": "1"}):
            body = {"name": "../outside", "model": "preferential", "m": 2, "n": [30], "trials": 1,
                    "property": "lemma:components"}
            self.assertEqual(self.client.post("/experiments", json=body).status_code, 422)
            self.assertEqual(self.client.get("/experiments/bad%20name").status_code, 400)
            for path in ["/experiments/..%2Foutside", "/experiments/../outside"]:
                self.assertIn(self.client.get(path).status_code, (400, 404))
        self.assertEqual(os.listdir(results), [])


if __name__ == '__main__':
    unittest.main()
