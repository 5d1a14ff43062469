# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

import unittest

import numpy as np

from daf_forensics.errors import DimensionMismatch, EmptyData
from daf_forensics.forest import Forest, ForestKind, ForestParams, fit_forest, fit_tree, predict_proba
from daf_forensics.forest.forest import bootstrap_indices
from daf_forensics.tests.helpers import blobs, leaf


class TestFitTree(unittest.TestCase):
	def test_single_class_gives_one_leaf(self):
		X = np.random.default_rng(0).random((6, 3))
		tree = fit_tree(X, np.ones(6, dtype=int), ForestKind.RANDOM, ForestParams(), rng_seed=0)
		self.assertEqual(tree.n_nodes, 1)
		self.assertTrue(tree.node(0).is_leaf)
		self.assertEqual(tree.node(0).class_counts, (0, 6))

	def test_perfect_split_has_gain_one_half(self):
		X = np.column_stack([np.repeat([0.0, 1.0], 5), np.tile([0.0, 1.0], 5)])
		y = np.repeat([0, 1], 5)
		splits = []
		params = ForestParams(max_features=2)
		tree = fit_tree(X, y, ForestKind.RANDOM, params, rng_seed=1, observer=splits.append)

		self.assertEqual(splits[0]["feature"], 0)
		self.assertAlmostEqual(splits[0]["gain"], 0.5, places=12)
		self.assertAlmostEqual(splits[0]["threshold"], 0.5)
		self.assertEqual(tree.n_nodes, 3)
		self.assertEqual(tree.node(tree.left[0]).class_counts, (5, 0))
		self.assertEqual(tree.node(tree.right[0]).class_counts, (0, 5))

	def test_xor_corners(self):
		corners = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
		X = np.repeat(corners, 4, axis=0)
		y = (X[:, 0] != X[:, 1]).astype(int)
		tree = fit_tree(X, y, ForestKind.RANDOM, ForestParams(max_features=2), rng_seed=2)
		self.assertEqual(tree.depth(), 2)
		predicted = tree.predict_proba(X).argmax(axis=1)
		self.assertTrue(np.array_equal(predicted, y))

	def test_ties_go_to_lowest_feature(self):
		column = np.random.default_rng(3).random(20)
		X = np.column_stack([column, column, column])
		y = (column > 0.5).astype(int)
		splits = []
		fit_tree(X, y, ForestKind.RANDOM, ForestParams(max_features=3), rng_seed=4, observer=splits.append)
		self.assertTrue(all(split["feature"] == 0 for split in splits))

	def test_chosen_gain_beats_every_candidate(self):
		X, y = blobs(n=120, dim=9, separation=1.0, seed=5)
		splits = []
		fit_tree(X, y, ForestKind.RANDOM, ForestParams(), rng_seed=6, observer=splits.append)
		self.assertTrue(splits)
		for split in splits:
			best = max(gain for _, _, gain in split["candidates"])
			self.assertGreaterEqual(split["gain"], best - 1e-12)

	def test_random_thresholds_inside_node_range(self):
		X, y = blobs(n=120, dim=4, separation=1.0, seed=7)
		splits = []
		fit_tree(X, y, ForestKind.COMPLETELY_RANDOM, ForestParams(), rng_seed=8, observer=splits.append)
		self.assertTrue(splits)
		for split in splits:
			low, high = split["range"]
			self.assertLess(low, high)
			self.assertGreater(split["threshold"], low)
			self.assertLessEqual(split["threshold"], high)

	def test_routing_sends_smaller_values_left(self):
		X = np.array([[0.0], [1.0]])
		tree = fit_tree(X, np.array([0, 1]), ForestKind.RANDOM, ForestParams(), rng_seed=9)
		self.assertEqual(tree.feature[0], 0)
		proba = tree.predict_proba(np.array([[0.49], [0.5]]))
		self.assertTrue(np.array_equal(proba, [[1.0, 0.0], [0.0, 1.0]]))

	def test_depth_cap(self):
		X, y = blobs(n=100, dim=3, separation=0.0, seed=10)
		tree = fit_tree(X, y, ForestKind.COMPLETELY_RANDOM, ForestParams(max_depth=2), rng_seed=11)
		self.assertLessEqual(tree.depth(), 2)

	def test_empty_data(self):
		with self.assertRaises(EmptyData):
			fit_tree(np.empty((0, 3)), np.empty(0, dtype=int), ForestKind.RANDOM, ForestParams(), rng_seed=0)


class TestForest(unittest.TestCase):
	def test_tree_count(self):
		X, y = blobs(n=40, dim=3, seed=12)
		forest = fit_forest(X, y, ForestKind.RANDOM, ForestParams(n_trees=7), rng_seed=13)
		self.assertEqual(forest.n_trees, 7)
		self.assertEqual(forest.feature_dim, 3)
		self.assertIsNone(forest.val_accuracy)

	def test_equal_seeds_give_identical_trees(self):
		X, y = blobs(n=60, dim=4, separation=1.0, seed=14)
		params = ForestParams(n_trees=5)
		for kind in ForestKind.ALL:
			first = fit_forest(X, y, kind, params, rng_seed=15)
			second = fit_forest(X, y, kind, params, rng_seed=15, n_jobs=2)
			for a, b in zip(first.trees, second.trees):
				self.assertTrue(np.array_equal(a.feature, b.feature))
				self.assertTrue(np.array_equal(a.threshold, b.threshold))
				self.assertTrue(np.array_equal(a.counts, b.counts))

	def test_two_blobs_are_learned(self):
		X, y = blobs(n=200, dim=5, separation=4.0, seed=16)
		forest = fit_forest(X, y, ForestKind.RANDOM, ForestParams(n_trees=25), rng_seed=17)
		accuracy = np.mean(forest.predict_proba(X).argmax(axis=1) == y)
		self.assertGreaterEqual(accuracy, 0.99)

	def test_bootstrap_indices(self):
		rng = np.random.default_rng(18)
		indices = bootstrap_indices(50, rng)
		self.assertEqual(len(indices), 50)
		self.assertTrue(np.all((indices >= 0) & (indices < 50)))

	def test_predict_proba_examples(self):
		fake = Forest(ForestKind.RANDOM, [leaf(2, [0, 3]), leaf(2, [0, 1])], 2)
		self.assertTrue(np.array_equal(predict_proba(fake, np.zeros(2)), [0.0, 1.0]))

		split = Forest(ForestKind.COMPLETELY_RANDOM, [leaf(2, [4, 0]), leaf(2, [0, 2])], 2)
		self.assertTrue(np.allclose(predict_proba(split, np.zeros(2)), [0.5, 0.5]))

		X, y = blobs(n=60, dim=3, separation=0.5, seed=19)
		forest = fit_forest(X, y, ForestKind.COMPLETELY_RANDOM, ForestParams(n_trees=9), rng_seed=20)
		probabilities = forest.predict_proba(np.random.default_rng(21).normal(size=(30, 3)))
		self.assertTrue(np.all(probabilities >= 0))
		self.assertLess(np.abs(probabilities.sum(axis=1) - 1.0).max(), 1e-9)

	def test_dimension_mismatch(self):
		forest = Forest(ForestKind.RANDOM, [leaf(3, [1, 1])], 3)
		with self.assertRaises(DimensionMismatch):
			forest.predict_proba(np.zeros(4))


if __name__ == "__main__":
	unittest.main()
