import os
import unittest

import numpy as np

from sample_problems import random_params

from syk_nqs.basis import build_sector_basis
from syk_nqs.compress import compression_curve, svd_truncate, truncate_matrix
from syk_nqs.ed import ground_state
from syk_nqs.exception import ArgumentError
from syk_nqs.harness import TrainingSettings, Verdict, build_problem, train
from syk_nqs.models import Model, build_hamiltonian
from syk_nqs.nqs import Architecture, NetworkParams, init_params, log_amplitudes

SLOW_TESTS = bool(os.environ.get("SYK_NQS_SLOW_TESTS"))


class TestTruncateMatrix(unittest.TestCase):
    def test_spectral_error(self):
        rng = np.random.default_rng(0)
        weight = rng.standard_normal((8, 6)) + 1j * rng.standard_normal((8, 6))
        for threshold in (0.0, 0.2, 0.5, 0.8):
            with self.subTest(threshold=threshold):
                truncated, singular_values, keep = truncate_matrix(weight, threshold)
                self.assertEqual(len(singular_values), 6)
                self.assertTrue(np.all(np.diff(singular_values) <= 0))
                self.assertEqual(keep, int(np.sum(singular_values >= threshold * singular_values[0])))
                self.assertEqual(np.linalg.matrix_rank(truncated), keep)
                discarded = singular_values[keep] if keep < len(singular_values) else 0.0
                self.assertLessEqual(np.linalg.norm(weight - truncated, 2), discarded + 1e-12)

    def test_identity(self):
        weight = np.random.default_rng(1).standard_normal((4, 4)) + 0j
        truncated, _, keep = truncate_matrix(weight, 0.0)
        self.assertEqual(keep, 4)
        np.testing.assert_array_equal(truncated, weight)
        self.assertIsNot(truncated, weight)

    def test_zero(self):
        truncated, singular_values, keep = truncate_matrix(np.zeros((3, 2), dtype=np.complex128), 0.5)
        self.assertEqual(keep, 0)
        np.testing.assert_array_equal(truncated, 0)
        np.testing.assert_array_equal(singular_values, 0)


class TestCompression(unittest.TestCase):
    basis = None
    hamiltonian = None
    energy = 0.0

    @classmethod
    def setUpClass(cls):
        cls.basis = build_sector_basis(4, 2)
        cls.hamiltonian, _ = build_hamiltonian(Model.syk, cls.basis, 0)
        cls.energy = ground_state(cls.hamiltonian).energy

    def params(self, seed: int) -> NetworkParams:
        return random_params(init_params(Architecture(4, 2, 3), seed), seed + 1)

    def test_zero_threshold(self):
        params = self.params(0)
        compressed, report = svd_truncate(params, 0.0, self.hamiltonian, self.energy)
        self.assertEqual(report.retained_fraction, 1.0)
        self.assertEqual(report.retained_ranks, [4, 8, 8])
        self.assertEqual(report.full_ranks, [4, 8, 8])
        self.assertEqual(report.energy_error_after, report.energy_error_before)
        for a, b in zip(compressed.weights, params.weights):
            np.testing.assert_array_equal(a, b)
        for a, b in zip(compressed.biases, params.biases):
            np.testing.assert_array_equal(a, b)

    def test_rank_one(self):
        architecture = Architecture(4, 2, 3)
        rng = np.random.default_rng(2)
        weights = []
        for rows, cols in architecture.layer_shapes():
            u = rng.standard_normal(rows) + 1j * rng.standard_normal(rows)
            v = rng.standard_normal(cols) + 1j * rng.standard_normal(cols)
            weights.append(0.3 * np.outer(u, v))
        biases = [0.1 * rng.standard_normal(rows) + 0j for rows, _ in architecture.layer_shapes()]
        params = NetworkParams(architecture, weights, biases)

        compressed, report = svd_truncate(params, 0.01, self.hamiltonian, self.energy)
        self.assertEqual(report.retained_ranks, [1, 1, 1])
        self.assertAlmostEqual(report.retained_fraction, 3 / 20)
        np.testing.assert_allclose(log_amplitudes(compressed, self.basis), log_amplitudes(params, self.basis), atol=1e-10)
        self.assertAlmostEqual(report.energy_error_after, report.energy_error_before, places=10)

    def test_curve(self):
        params = self.params(3)
        thresholds = [0.0, 0.1, 0.3, 0.6, 0.9]
        reports = compression_curve(params, thresholds, self.hamiltonian, self.energy)
        self.assertEqual([r.threshold for r in reports], thresholds)
        fractions = [r.retained_fraction for r in reports]
        self.assertTrue(all(b <= a for a, b in zip(fractions, fractions[1:])))
        self.assertLess(fractions[-1], 1.0)
        for report in reports:
            self.assertTrue(all(1 <= kept <= full for kept, full in zip(report.retained_ranks, report.full_ranks)))
            self.assertGreaterEqual(report.energy_error_after, -1e-12)
            self.assertEqual(report.energy_error_before, reports[0].energy_error_before)

    def test_invalid_threshold(self):
        params = self.params(0)
        for threshold in (-0.1, 1.0, 2.0):
            with self.assertRaises(ArgumentError):
                svd_truncate(params, threshold, self.hamiltonian, self.energy)


@unittest.skipUnless(SLOW_TESTS, "set SYK_NQS_SLOW_TESTS to run")
class TestTrainedCompression(unittest.TestCase):
    def test_sensitivity(self):
        problem = build_problem(Model.syk, 8, 0)
        settings = TrainingSettings(max_steps=200_000, threshold=1e-3, truncate=False)
        record = train(problem, Architecture(8, 4, 2), settings, 0)
        self.assertIs(record.verdict, Verdict.converged)

        thresholds = [0.0] + list(np.linspace(0.002, 0.2, 100))
        reports = compression_curve(record.best_params, thresholds, problem.hamiltonian, problem.ground_state.energy)
        self.assertAlmostEqual(reports[0].energy_error_after, record.best_delta_e, delta=1e-10)

        # dropping even a few of the smallest singular values of a converged network spoils the energy
        mild = [r for r in reports if 0.95 <= r.retained_fraction < 1.0]
        self.assertTrue(mild)
        self.assertTrue(any(r.energy_error_after > 1e-3 for r in mild))


if __name__ == "__main__":
    unittest.main()
