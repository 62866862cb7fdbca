import json
import pathlib
import tempfile
import unittest

import numpy as np

from syk_nqs import __version__
from syk_nqs.ed import GroundStateSolution
from syk_nqs.exception import ArgumentError, MissingRecordError
from syk_nqs.harness import TrainingSettings, build_problem, train
from syk_nqs.models import Model, sample_syk_couplings
from syk_nqs.nqs import Activation, Architecture, SkipBlocks, init_params
from syk_nqs.records import (
    atomic_open,
    checkpoint_path,
    ground_state_path,
    load_checkpoint,
    load_couplings,
    load_ground_state,
    read_csv,
    save_checkpoint,
    save_couplings,
    save_ground_state,
    save_trajectory,
    write_csv,
    write_jsonl,
)


class TestRecords(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.output_dir = pathlib.Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def test_atomic_open(self):
        path = self.output_dir / "nested" / "table.txt"
        with atomic_open(path) as f:
            f.write("first")
        self.assertEqual(path.read_text(), "first")

        with self.assertRaises(RuntimeError):
            with atomic_open(path) as f:
                f.write("second")
                raise RuntimeError("interrupted")
        self.assertEqual(path.read_text(), "first")
        self.assertEqual(sorted(p.name for p in path.parent.iterdir()), ["table.txt"])

    def test_ground_state(self):
        vector = np.array([0.6, 0.0, 0.8j])
        save_ground_state(self.output_dir, Model.syk, 4, 17, GroundStateSolution(-1.25, vector, 3e-11))
        self.assertTrue(ground_state_path(self.output_dir, Model.syk, 4, 17).exists())

        solution = load_ground_state(self.output_dir, Model.syk, 4, 17)
        self.assertEqual(solution.energy, -1.25)
        self.assertEqual(solution.residual, 3e-11)
        np.testing.assert_array_equal(solution.vector, vector)

        with self.assertRaises(MissingRecordError) as context:
            load_ground_state(self.output_dir, Model.syk, 4, 18)
        self.assertEqual(context.exception.required_command, "ed")
        self.assertIn("syk-nqs ed", str(context.exception))

    def test_couplings(self):
        couplings = sample_syk_couplings(6, 3)
        save_couplings(self.output_dir, couplings)
        loaded = load_couplings(self.output_dir, 6, 3)
        self.assertEqual((loaded.num_sites, loaded.seed), (6, 3))
        np.testing.assert_array_equal(loaded.to_dense(), couplings.to_dense())
        with self.assertRaises(MissingRecordError):
            load_couplings(self.output_dir, 6, 4)

    def test_checkpoint(self):
        architecture = Architecture(4, 2, 2, Activation.tanh, SkipBlocks(2, 1))
        params = init_params(architecture, 11)
        lineage = {"run_id": "test", "network_seed": 11, "master_seed": 0}
        save_checkpoint(self.output_dir, "test", params, lineage)

        loaded, loaded_lineage = load_checkpoint(self.output_dir, "test")
        self.assertEqual(loaded.architecture, architecture)
        self.assertEqual(loaded.seed, 11)
        self.assertEqual(loaded_lineage, lineage)
        np.testing.assert_array_equal(loaded.to_flat(), params.to_flat())

        with self.assertRaises(MissingRecordError) as context:
            load_checkpoint(self.output_dir, "other")
        self.assertEqual(context.exception.required_command, "train")

    def test_checkpoint_version(self):
        path = checkpoint_path(self.output_dir, "old")
        path.parent.mkdir(parents=True)
        with open(path, "wb") as f:
            np.savez(f, version=np.array(99), theta=np.zeros(3, dtype=np.complex128))
        with self.assertRaises(ArgumentError):
            load_checkpoint(self.output_dir, "old")

    def test_trajectory(self):
        problem = build_problem(Model.heisenberg, 4, 0)
        record = train(problem, Architecture(4, 1, 1), TrainingSettings(max_steps=3, threshold=1e-12, truncate=False), 0)
        path = save_trajectory(self.output_dir, record)
        self.assertEqual(path.name, f"{record.run_id}.npz")
        with np.load(path) as data:
            np.testing.assert_array_equal(data["steps"], [0, 1, 2, 3])
            np.testing.assert_array_equal(data["delta_e"], record.delta_e)
            np.testing.assert_array_equal(data["delta_o"], record.delta_o)

    def test_csv(self):
        path = self.output_dir / "table.csv"
        write_csv(path, ["model", "L", "value", "ranks", "missing", "flag"], [[Model.syk, 8, 0.1, [1, 2], None, True]])
        self.assertEqual(path.read_text(), "model,L,value,ranks,missing,flag\nsyk,8,0.1,1 2,,True\n")
        self.assertEqual(
            read_csv(path), [{"model": "syk", "L": "8", "value": "0.1", "ranks": "1 2", "missing": "", "flag": "True"}]
        )

        with self.assertRaises(ArgumentError):
            write_csv(self.output_dir / "broken.csv", ["a", "b"], [[1]])
        self.assertFalse((self.output_dir / "broken.csv").exists())

    def test_jsonl(self):
        path = self.output_dir / "results.jsonl"
        write_jsonl(path, [{"energy": -1.5}, {"energy": -2.5}], {"model": "syk"})
        lines = path.read_text().splitlines()
        self.assertEqual(len(lines), 2)
        self.assertEqual(json.loads(lines[1]), {"version": __version__, "config": {"model": "syk"}, "result": {"energy": -2.5}})


if __name__ == "__main__":
    unittest.main()
