import datetime
import json
import math
import pathlib
import tempfile
import unittest

import numpy as np

from syk_nqs.cli import CompressionSummary, GroundStateSummary
from syk_nqs.compress import CompressionReport
from syk_nqs.config import (
    OUTPUT_DIR_VARIABLE,
    ExperimentConfig,
    SeedStream,
    config_from_json,
    config_to_json,
    derive_seed,
    load_config,
    parse_override,
)
from syk_nqs.exception import ConfigError, JsonKeyError, JsonValueError
from syk_nqs.harness import SweepAxis
from syk_nqs.models import Model
from syk_nqs.nqs import Activation
from syk_nqs.optimize import LearningRateChange, LossKind
from syk_nqs.schema import classdef_to_schema, validate_object
from syk_nqs.serialization import json_dump, json_dump_string, json_to_object, object_to_json


class TestSerialization(unittest.TestCase):
    def test_simple(self):
        self.assertEqual(object_to_json(None), None)
        self.assertEqual(object_to_json(True), True)
        self.assertEqual(object_to_json(23), 23)
        self.assertEqual(object_to_json(4.5), 4.5)
        self.assertEqual(object_to_json(np.float64(0.25)), 0.25)
        self.assertEqual(object_to_json(np.int64(7)), 7)
        self.assertEqual(object_to_json(1.0 - 2.0j), [1.0, -2.0])
        self.assertEqual(object_to_json(Model.syk), "syk")
        self.assertEqual(object_to_json(pathlib.Path("results/syk")), "results/syk")
        self.assertEqual(object_to_json([1, Activation.tanh, (2.0, "a")]), [1, "tanh", [2.0, "a"]])

    def test_non_finite(self):
        self.assertEqual(object_to_json(math.inf), "inf")
        self.assertEqual(object_to_json(-math.inf), "-inf")
        self.assertEqual(object_to_json(math.nan), "nan")
        self.assertEqual(json_to_object(float, "inf"), math.inf)
        self.assertEqual(json_to_object(float, "-inf"), -math.inf)
        self.assertTrue(math.isnan(json_to_object(float, "nan")))
        self.assertEqual(json_to_object(float, 3), 3.0)
        with self.assertRaises(JsonValueError):
            json_to_object(float, "infinity")
        with self.assertRaises(ValueError):
            json_dump_string([math.nan])

    def test_datetime(self):
        timestamp = datetime.datetime(1989, 10, 23, 1, 45, 50, tzinfo=datetime.timezone.utc)
        self.assertEqual(object_to_json(timestamp), "1989-10-23T01:45:50Z")
        self.assertEqual(json_to_object(datetime.datetime, "1989-10-23T01:45:50Z"), timestamp)
        with self.assertRaises(JsonValueError):
            object_to_json(datetime.datetime(1989, 10, 23, 1, 45, 50))
        with self.assertRaises(JsonValueError):
            json_to_object(datetime.datetime, "1989-10-23T01:45:50")

    def test_dump(self):
        with tempfile.TemporaryFile("w+", encoding="utf-8") as f:
            json_dump({"a": [1, 2]}, f, indent=2)
            f.seek(0)
            text = f.read()
        self.assertTrue(text.endswith("}\n"))
        self.assertEqual(json.loads(text), {"a": [1, 2]})
        self.assertEqual(json_dump_string({"a": [1, 2]}), '{"a":[1,2]}')


class TestRecordTypes(unittest.TestCase):
    def test_alias(self):
        summary = GroundStateSummary(Model.syk, 8, 3, -0.5, 1e-12, 70)
        data = object_to_json(summary)
        self.assertEqual(
            data, {"model": "syk", "L": 8, "coupling_seed": 3, "energy": -0.5, "residual": 1e-12, "dimension": 70}
        )
        self.assertEqual(json_to_object(GroundStateSummary, data), summary)
        with self.assertRaises(JsonKeyError):
            json_to_object(GroundStateSummary, {**data, "num_sites": 8})

    def test_nested(self):
        report = CompressionReport(0.1, [2, 3], [4, 8], 5 / 12, 0.01, math.inf)
        summary = CompressionSummary("syk-L4-c0-a2-m2-n0-overlap", 4, 0, 0, [report])
        data = object_to_json(summary)
        self.assertEqual(data["reports"][0]["energy_error_after"], "inf")
        self.assertEqual(json_to_object(CompressionSummary, json.loads(json_dump_string(data))), summary)


class TestConfig(unittest.TestCase):
    def test_round_trip(self):
        config = ExperimentConfig(
            model=Model.syk,
            sizes=[4, 8],
            skip_block_length=1,
            learning_rate_schedule=[LearningRateChange(1000, 1e-4)],
            output_dir=pathlib.Path("out/run"),
        )
        data = config_to_json(config)
        validate_object(ExperimentConfig, data)
        self.assertEqual(data["model"], "syk")
        self.assertEqual(data["output_dir"], "out/run")
        self.assertEqual(data["learning_rate_schedule"], [{"step": 1000, "learning_rate": 1e-4}])
        self.assertEqual(json_to_object(ExperimentConfig, data), config)
        self.assertEqual(config_from_json(json.loads(json_dump_string(data))), config)

    def test_defaults(self):
        config = config_from_json({"model": "heisenberg", "sizes": [4]})
        self.assertIs(config.model, Model.heisenberg)
        self.assertEqual(config.sizes, [4])
        self.assertEqual(config.alpha, 1)
        self.assertEqual(config.mu, 2)
        self.assertIs(config.loss, LossKind.overlap)
        self.assertIs(config.sweep_axis, SweepAxis.alpha)
        self.assertIsNone(config.skip_block_length)
        self.assertEqual(config.snapshot_steps, [50_000, 100_000, 200_000])
        self.assertEqual(config.output_dir, pathlib.Path("results"))
        self.assertNotIn("skip_block_length", config_to_json(config))

    def test_schema(self):
        schema = classdef_to_schema(ExperimentConfig)
        self.assertEqual(schema["$schema"], "https://json-schema.org/draft/2020-12/schema")
        self.assertEqual(schema["required"], ["model", "sizes"])
        self.assertFalse(schema["additionalProperties"])
        properties = schema["properties"]
        self.assertEqual(properties["model"]["enum"], ["syk", "heisenberg"])
        self.assertTrue(properties["model"]["description"].startswith("Physical model"))
        self.assertEqual(properties["sizes"]["minItems"], 1)
        self.assertEqual(properties["sizes"]["items"], {"type": "integer", "minimum": 2, "maximum": 30})
        self.assertEqual(properties["master_seed"]["format"], "seed64")
        self.assertEqual(properties["t_max"]["default"], 200_000)
        self.assertEqual(properties["learning_rate_schedule"]["default"], [])
        self.assertEqual(properties["svd_thresholds"]["default"], [0.0, 0.01, 0.02, 0.05, 0.1, 0.2])
        self.assertEqual(properties["output_dir"]["default"], "results")
        self.assertEqual(properties["beta1"]["exclusiveMaximum"], 1.0)
        self.assertIn("oneOf", properties["skip_block_length"])
        self.assertIn("LearningRateChange", schema["$defs"])

        # callers receive a private copy
        schema["required"].append("alpha")
        self.assertEqual(classdef_to_schema(ExperimentConfig)["required"], ["model", "sizes"])

    def assertConfigError(self, data: dict, field: str) -> None:
        with self.assertRaises(ConfigError) as context:
            config_from_json(data)
        self.assertEqual(context.exception.field, field)

    def test_invalid(self):
        base = {"model": "syk", "sizes": [4]}
        self.assertConfigError({"sizes": [4]}, "model")
        self.assertConfigError({"model": "syk"}, "sizes")
        self.assertConfigError({**base, "colour": 1}, "colour")
        self.assertConfigError({**base, "model": "ising"}, "model")
        self.assertConfigError({**base, "alpha": "two"}, "alpha")
        self.assertConfigError({**base, "alpha": 0}, "alpha")
        self.assertConfigError({**base, "sizes": []}, "sizes")
        self.assertConfigError({**base, "sizes": [4, 5]}, "sizes")
        self.assertConfigError({**base, "sizes": [2]}, "sizes")
        self.assertConfigError({**base, "beta1": 1.0}, "beta1")
        self.assertConfigError({**base, "smoothing_window": 10}, "smoothing_window")
        self.assertConfigError({**base, "alpha_grid": [1, 4, 2]}, "alpha_grid")
        self.assertConfigError({**base, "skip_block_length": 3}, "skip_block_length")
        self.assertConfigError({**base, "sweep_axis": "mu", "skip_block_length": 2}, "skip_block_length")
        self.assertConfigError({**base, "t_max": 10}, "t_max")
        config_from_json({**base, "t_max": 10, "truncate": False})
        config_from_json({"model": "heisenberg", "sizes": [2]})

    def test_seeds(self):
        self.assertEqual(derive_seed(7, SeedStream.coupling, 8, 0), derive_seed(7, SeedStream.coupling, 8, 0))
        seeds = {
            derive_seed(7, SeedStream.coupling, 8, 0),
            derive_seed(7, SeedStream.coupling, 8, 1),
            derive_seed(7, SeedStream.coupling, 10, 0),
            derive_seed(7, SeedStream.init, 8, 0),
            derive_seed(8, SeedStream.coupling, 8, 0),
        }
        self.assertEqual(len(seeds), 5)
        self.assertTrue(all(0 <= seed < 2**32 for seed in seeds))

        config = ExperimentConfig(model=Model.syk, sizes=[8], coupling_realizations=3, master_seed=7)
        self.assertEqual(len(set(config.coupling_seeds(8))), 3)
        self.assertEqual(config.coupling_seeds(8)[1], derive_seed(7, SeedStream.coupling, 8, 1))
        self.assertEqual(ExperimentConfig(model=Model.heisenberg, sizes=[8], coupling_realizations=3).coupling_seeds(8), [0])
        self.assertEqual(len(set(config.network_seed_values())), 4)
        self.assertEqual(config.lanczos_settings(8, 5).seed, derive_seed(7, SeedStream.lanczos, 8, 5))

    def test_training_settings(self):
        config = ExperimentConfig(
            model=Model.syk,
            sizes=[4],
            loss=LossKind.voe,
            learning_rate=1e-2,
            learning_rate_schedule=[LearningRateChange(10, 1e-3)],
            snapshot_steps=[5, 10],
            t_max=1000,
            control_interval=100,
            smoothing_window=11,
        )
        settings = config.training_settings()
        self.assertIs(settings.loss, LossKind.voe)
        self.assertEqual(settings.snapshot_steps, (5, 10))
        self.assertEqual(settings.adam.learning_rate, 1e-2)
        self.assertEqual(settings.adam.schedule, (LearningRateChange(10, 1e-3),))
        self.assertEqual(settings.t_max, 1000)


class TestLoadConfig(unittest.TestCase):
    def test_overrides(self):
        self.assertEqual(parse_override("alpha=3"), ("alpha", 3))
        self.assertEqual(parse_override("model=syk"), ("model", "syk"))
        self.assertEqual(parse_override(" sizes = [4, 6]"), ("sizes", [4, 6]))
        self.assertEqual(parse_override("truncate=false"), ("truncate", False))
        self.assertEqual(parse_override("output_dir=a=b"), ("output_dir", "a=b"))
        for assignment in ("alpha", "=3", ""):
            with self.assertRaises(ConfigError):
                parse_override(assignment)

    def test_precedence(self):
        with tempfile.TemporaryDirectory() as directory:
            path = pathlib.Path(directory) / "config.json"
            path.write_text(json.dumps({"model": "syk", "sizes": [4], "alpha": 2, "output_dir": "from-file"}))

            config = load_config(path, environ={})
            self.assertEqual(config.alpha, 2)
            self.assertEqual(config.output_dir, pathlib.Path("from-file"))

            environ = {OUTPUT_DIR_VARIABLE: "from-env"}
            config = load_config(path, ["alpha=3", "loss=voe", "truncate=false"], environ)
            self.assertEqual(config.alpha, 3)
            self.assertIs(config.loss, LossKind.voe)
            self.assertFalse(config.truncate)
            self.assertEqual(config.output_dir, pathlib.Path("from-env"))

            config = load_config(path, ["output_dir=from-cli"], environ)
            self.assertEqual(config.output_dir, pathlib.Path("from-cli"))

    def test_without_file(self):
        config = load_config(None, ["model=heisenberg", "sizes=[4, 6]"], environ={})
        self.assertIs(config.model, Model.heisenberg)
        self.assertEqual(config.sizes, [4, 6])
        with self.assertRaises(ConfigError) as context:
            load_config(None, ["sizes=[4]"], environ={})
        self.assertEqual(context.exception.field, "model")

    def test_bad_file(self):
        with tempfile.TemporaryDirectory() as directory:
            with self.assertRaises(ConfigError):
                load_config(pathlib.Path(directory) / "missing.json", environ={})

            path = pathlib.Path(directory) / "broken.json"
            path.write_text("{model: syk")
            with self.assertRaises(ConfigError):
                load_config(path, environ={})

            path.write_text("[1, 2]")
            with self.assertRaises(ConfigError):
                load_config(path, environ={})


if __name__ == "__main__":
    unittest.main()
