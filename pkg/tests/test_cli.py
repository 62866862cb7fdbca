import contextlib
import io
import json
import math
import pathlib
import tempfile
import unittest
from typing import List, Tuple

from syk_nqs import __version__
from syk_nqs.cli import EXIT_CONFIG, EXIT_MISSING_RECORD, EXIT_OK, main
from syk_nqs.config import ExperimentConfig
from syk_nqs.models import Model
from syk_nqs.records import couplings_path, ground_state_path, read_csv


def run(*argv: str) -> Tuple[int, str]:
    output = io.StringIO()
    with contextlib.redirect_stdout(output):
        code = main(list(argv))
    return code, output.getvalue()


def read_jsonl(path: pathlib.Path) -> List[dict]:
    return [json.loads(line) for line in path.read_text().splitlines()]


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.output_dir = pathlib.Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def command(self, name: str, *settings: str) -> Tuple[int, str]:
        argv = [name, "--output-dir", str(self.output_dir)]
        for setting in settings:
            argv.extend(["--set", setting])
        return run(*argv)

    def test_schema(self):
        code, output = run("schema")
        self.assertEqual(code, EXIT_OK)
        schema = json.loads(output)
        self.assertEqual(schema["required"], ["model", "sizes"])

    def test_ed_heisenberg(self):
        code, output = self.command("ed", "model=heisenberg", "sizes=[4, 6]")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("L=4 coupling_seed=0", output)
        self.assertIn("dimension=6", output)

        lines = read_jsonl(self.output_dir / "ed.jsonl")
        self.assertEqual(len(lines), 2)
        self.assertEqual(lines[0]["version"], __version__)
        self.assertEqual(lines[0]["config"]["model"], "heisenberg")
        self.assertEqual(lines[0]["config"]["output_dir"], self.output_dir.as_posix())
        self.assertAlmostEqual(lines[0]["result"]["energy"], -8.0, places=9)
        self.assertEqual(lines[0]["result"]["L"], 4)
        self.assertEqual(lines[1]["result"]["dimension"], 20)
        self.assertTrue(ground_state_path(self.output_dir, Model.heisenberg, 6, 0).exists())
        self.assertFalse((self.output_dir / "couplings").exists())

    def test_ed_reproducible(self):
        self.assertEqual(self.command("ed", "model=syk", "sizes=[8]")[0], EXIT_OK)
        first = (self.output_dir / "ed.jsonl").read_text()
        self.assertEqual(self.command("ed", "model=syk", "sizes=[8]")[0], EXIT_OK)
        self.assertEqual((self.output_dir / "ed.jsonl").read_text(), first)

        (coupling_seed,) = ExperimentConfig(model=Model.syk, sizes=[8]).coupling_seeds(8)
        self.assertEqual(read_jsonl(self.output_dir / "ed.jsonl")[0]["result"]["coupling_seed"], coupling_seed)
        self.assertTrue(couplings_path(self.output_dir, 8, coupling_seed).exists())

    def test_pipeline(self):
        settings = [
            "model=heisenberg",
            "sizes=[4]",
            "network_seeds=2",
            "truncate=false",
            "max_steps=5",
            "snapshot_steps=[2, 10]",
            "svd_thresholds=[0.0, 0.5]",
        ]
        self.assertEqual(self.command("ed", *settings)[0], EXIT_OK)

        code, output = self.command("train", *settings)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(output.count("run_id="), 2)
        runs = read_csv(self.output_dir / "runs.csv")
        self.assertEqual(len(runs), 2)
        self.assertEqual(runs[0]["steps"], "5")
        self.assertEqual(runs[0]["verdict"], "exhausted")
        self.assertIn("best_delta_e_2", runs[0])
        self.assertIn("best_delta_e_10", runs[0])
        for row in runs:
            self.assertTrue((self.output_dir / "checkpoints" / f"{row['run_id']}.npz").exists())
            self.assertTrue((self.output_dir / "trajectories" / f"{row['run_id']}.npz").exists())
        summaries = read_jsonl(self.output_dir / "runs.jsonl")
        self.assertEqual([s["result"]["run_id"] for s in summaries], [row["run_id"] for row in runs])
        self.assertEqual(summaries[0]["result"]["snapshots"][1][2], False)

        self.assertEqual(self.command("compress", *settings)[0], EXIT_OK)
        rows = read_csv(self.output_dir / "compression.csv")
        self.assertEqual(len(rows), 4)
        best = {row["run_id"]: float(row["best_delta_e"]) for row in runs}
        for row in rows:
            self.assertAlmostEqual(float(row["delta_e_before"]), best[row["run_id"]], places=10)
            if float(row["threshold"]) == 0.0:
                self.assertEqual(row["delta_e_after"], row["delta_e_before"])
                self.assertEqual(float(row["retained_fraction"]), 1.0)

        code, output = self.command("entropy", *settings)
        self.assertEqual(code, EXIT_OK)
        (row,) = read_csv(self.output_dir / "entropy.csv")
        self.assertEqual(row["model"], "heisenberg")
        self.assertGreater(float(row["entropy"]), 0.0)
        self.assertLessEqual(float(row["entropy"]), 2 * math.log(2) + 1e-12)
        self.assertAlmostEqual(float(row["page_value"]), 2 * math.log(2) - 0.5)
        self.assertIn("mean_entropy=", output)

        (line,) = read_jsonl(self.output_dir / "entropy.jsonl")
        self.assertEqual(line["version"], __version__)
        self.assertEqual(line["config"]["model"], "heisenberg")
        self.assertEqual(line["result"]["L"], 4)
        self.assertEqual(line["result"]["entropy"], float(row["entropy"]))
        self.assertAlmostEqual(line["result"]["page_value"], 2 * math.log(2) - 0.5)

    def test_sweep(self):
        settings = ["model=heisenberg", "sizes=[4]", "network_seeds=1", "truncate=false", "max_steps=2", "threshold=10.0"]
        settings += ["alpha_grid=[1, 2]", "sweep_mu=1"]
        self.assertEqual(self.command("ed", *settings)[0], EXIT_OK)
        code, output = self.command("sweep", *settings)
        self.assertEqual(code, EXIT_OK)
        self.assertIn("alpha_min=1", output)
        self.assertEqual(len(read_csv(self.output_dir / "sweep.csv")), 2)
        (row,) = read_csv(self.output_dir / "scaling.csv")
        self.assertEqual(row["minimum_value"], "1")
        self.assertEqual(row["unbounded"], "False")
        (line,) = read_jsonl(self.output_dir / "scaling.jsonl")
        self.assertEqual(len(line["result"]["points"]), 2)

    def test_missing_records(self):
        self.assertEqual(self.command("train", "model=heisenberg", "sizes=[4]")[0], EXIT_MISSING_RECORD)
        self.assertEqual(self.command("entropy", "model=heisenberg", "sizes=[4]")[0], EXIT_MISSING_RECORD)
        self.assertEqual(self.command("ed", "model=heisenberg", "sizes=[4]")[0], EXIT_OK)
        self.assertEqual(self.command("compress", "model=heisenberg", "sizes=[4]")[0], EXIT_MISSING_RECORD)

    def test_invalid_config(self):
        self.assertEqual(self.command("ed", "sizes=[4]")[0], EXIT_CONFIG)
        self.assertEqual(self.command("ed", "model=heisenberg", "sizes=[5]")[0], EXIT_CONFIG)
        self.assertEqual(self.command("ed", "model=heisenberg", "sizes=[4]", "colour=red")[0], EXIT_CONFIG)
        self.assertEqual(self.command("ed", "model=heisenberg", "sizes=[4]", "alpha")[0], EXIT_CONFIG)
        code, _ = run("ed", "--config", str(self.output_dir / "missing.json"))
        self.assertEqual(code, EXIT_CONFIG)
        self.assertFalse((self.output_dir / "ed.jsonl").exists())

    def test_config_file(self):
        path = self.output_dir / "config.json"
        path.write_text(json.dumps({"model": "heisenberg", "sizes": [4], "output_dir": "ignored"}))
        code, _ = run("ed", "--config", str(path), "--output-dir", str(self.output_dir), "--workers", "2")
        self.assertEqual(code, EXIT_OK)
        (line,) = read_jsonl(self.output_dir / "ed.jsonl")
        self.assertEqual(line["config"]["workers"], 2)
        self.assertEqual(line["config"]["output_dir"], self.output_dir.as_posix())


if __name__ == "__main__":
    unittest.main()
