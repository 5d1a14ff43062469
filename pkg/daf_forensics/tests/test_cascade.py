# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

import unittest

import numpy as np

from daf_forensics.errors import ConfigError, DimensionMismatch, TooFewSamples
from daf_forensics.forest import CascadeLayer, DeepForestModel, Forest, ForestKind, ForestParams, fit_cascade
from daf_forensics.forest.cascade import count_nodes, last_layer_features, predict_score
from daf_forensics.tests.helpers import blobs, leaf, stump_forest

SMALL_TREES = ForestParams(n_trees=3)


class TestFitCascade(unittest.TestCase):
	def setUp(self):
		self.X, self.y = blobs(n=60, dim=4, separation=2.0, seed=1)

	def test_single_layer_score_is_mean_of_forests(self):
		model = fit_cascade(self.X, self.y, layers=1, params=SMALL_TREES, rng_seed=2)
		forests = model.layers[0].forests
		expected = np.mean([forest.predict_proba(self.X)[:, 1] for forest in forests], axis=0)
		self.assertTrue(np.allclose(model.predict_score(self.X), expected, atol=1e-12))

	def test_layer_inputs_grow_by_class_vectors(self):
		model = fit_cascade(self.X, self.y, layers=3, params=SMALL_TREES, rng_seed=3)
		self.assertEqual(model.shape, (3, 2, 2))
		self.assertEqual(model.layers[0].input_dim, 4)
		self.assertEqual(model.layers[1].input_dim, 4 + 8)
		self.assertEqual(model.layers[2].input_dim, 4 + 8)
		for layer in model.layers:
			kinds = [forest.kind for forest in layer.forests]
			self.assertEqual(kinds, [ForestKind.RANDOM] * 2 + [ForestKind.COMPLETELY_RANDOM] * 2)

	def test_held_out_rows_never_train_their_own_vectors(self):
		folds = []
		fit_cascade(self.X, self.y, layers=2, params=SMALL_TREES, folds=3, rng_seed=4, observer=folds.append)
		self.assertEqual(len(folds), 3)
		covered = np.concatenate([fold["held_out"] for fold in folds])
		self.assertTrue(np.array_equal(np.sort(covered), np.arange(60)))
		for fold in folds:
			self.assertEqual(len(np.intersect1d(fold["train"], fold["held_out"])), 0)
			self.assertEqual(len(fold["train"]) + len(fold["held_out"]), 60)

	def test_one_forest_per_layer(self):
		model = fit_cascade(
			self.X, self.y, layers=1, n_random=1, n_completely_random=0, params=SMALL_TREES, rng_seed=5
		)
		forest = model.layers[0].forests[0]
		self.assertTrue(np.allclose(model.predict_score(self.X), forest.predict_proba(self.X)[:, 1]))

	def test_last_layer_features(self):
		model = fit_cascade(self.X, self.y, layers=2, params=SMALL_TREES, rng_seed=6)
		features = last_layer_features(model, self.X[0])
		self.assertEqual(features.shape, (8,))
		self.assertTrue(np.allclose(features[0::2] + features[1::2], 1.0))
		self.assertAlmostEqual(predict_score(model, self.X[0]), float(np.mean(features[1::2])))

	def test_equal_seeds_give_equal_scores(self):
		first = fit_cascade(self.X, self.y, layers=2, params=SMALL_TREES, rng_seed=7)
		second = fit_cascade(self.X, self.y, layers=2, params=SMALL_TREES, rng_seed=7, n_jobs=2)
		self.assertTrue(np.array_equal(first.predict_score(self.X), second.predict_score(self.X)))

	def test_in_sample_vectors_without_cross_fitting(self):
		folds = []
		model = fit_cascade(
			self.X, self.y, layers=2, params=SMALL_TREES, rng_seed=8, cross_fit=False, observer=folds.append
		)
		self.assertEqual(folds, [])
		self.assertEqual(model.n_layers, 2)

	def test_too_few_samples(self):
		with self.assertRaises(TooFewSamples):
			fit_cascade(self.X[:2], self.y[:2], layers=2, params=SMALL_TREES, folds=3)

	def test_invalid_shape(self):
		with self.assertRaises(ConfigError):
			fit_cascade(self.X, self.y, layers=0, params=SMALL_TREES)
		with self.assertRaises(ConfigError):
			fit_cascade(self.X, self.y, n_random=0, n_completely_random=0, params=SMALL_TREES)


class TestDeepForestModel(unittest.TestCase):
	def test_score_of_hand_built_layer(self):
		layer = CascadeLayer(
			[stump_forest(ForestKind.RANDOM, 1, 0.5), stump_forest(ForestKind.COMPLETELY_RANDOM, 1, 2.0)]
		)
		model = DeepForestModel([layer], base_dim=1)
		self.assertTrue(np.allclose(model.predict_score(np.array([[0.0], [1.0], [3.0]])), [0.0, 0.5, 1.0]))

	def test_kind_order_is_enforced(self):
		with self.assertRaises(ValueError):
			CascadeLayer(
				[stump_forest(ForestKind.COMPLETELY_RANDOM, 1, 0.5), stump_forest(ForestKind.RANDOM, 1, 0.5)]
			)

	def test_dimension_mismatch(self):
		model = DeepForestModel([CascadeLayer([stump_forest(ForestKind.RANDOM, 3, 0.5)])], base_dim=3)
		with self.assertRaises(DimensionMismatch):
			model.predict_score(np.zeros(5))

	def test_count_nodes(self):
		first = CascadeLayer([stump_forest(ForestKind.RANDOM, 2, 0.5)])
		second = CascadeLayer([Forest(ForestKind.RANDOM, [leaf(4, [1, 0]), leaf(4, [0, 1])], 4)])
		counts = count_nodes(DeepForestModel([first, second], base_dim=2))
		self.assertEqual(counts, {"total": 5, "layers": [[3], [2]]})


if __name__ == "__main__":
	unittest.main()
