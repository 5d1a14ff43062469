# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Binary decision trees for the two forest kinds of a cascade layer.

random            CART node: a random subset of ceil(sqrt(d)) features, best
                  Gini decrease over midpoints of sorted distinct values.
completely_random one feature drawn uniformly among those not constant at the
                  node, threshold drawn uniformly inside its observed range.

Trees are stored as flat node arrays in depth-first order (left subtree
first). A row goes left iff x[feature] < threshold. Leaves keep raw class
counts of the training rows that reached them.
"""

import math

import numpy as np

from daf_forensics.errors import ConfigError, DimensionMismatch, EmptyData

N_CLASSES = 2
LEAF = -1

# Gains closer than this are ties; ties go to the lowest feature, then lowest threshold
GAIN_TOLERANCE = 1e-12

# Uniform feature draws tried before scanning all features for a non-constant one
MAX_FEATURE_DRAWS = 64


class ForestKind:
	"""Kinds of forests in a cascade layer"""

	RANDOM = "random"
	COMPLETELY_RANDOM = "completely_random"

	ALL = (RANDOM, COMPLETELY_RANDOM)
	CODES = {RANDOM: 0, COMPLETELY_RANDOM: 1}

	@classmethod
	def from_code(cls, code):
		for kind, value in cls.CODES.items():
			if value == code:
				return kind
		raise ValueError(f"Unknown forest kind code {code}")


class ForestParams:
	"""Hyperparameters shared by every forest of a cascade"""

	def __init__(self, n_trees=100, max_depth=64, min_samples_split=2, bootstrap=True, max_features=None):
		self.n_trees = int(n_trees)
		self.max_depth = int(max_depth)
		self.min_samples_split = int(min_samples_split)
		self.bootstrap = bool(bootstrap)
		# None means ceil(sqrt(d))
		self.max_features = None if max_features is None else int(max_features)

	def candidate_features(self, feature_dim):
		if self.max_features is not None:
			return max(1, min(self.max_features, feature_dim))
		return max(1, min(math.ceil(math.sqrt(feature_dim)), feature_dim))

	def validate(self):
		if self.n_trees < 1:
			raise ConfigError(f"n_trees must be >= 1, got {self.n_trees}")
		if self.max_depth < 1:
			raise ConfigError(f"max_depth must be >= 1, got {self.max_depth}")
		if self.min_samples_split < 2:
			raise ConfigError(f"min_samples_split must be >= 2, got {self.min_samples_split}")
		if self.max_features is not None and self.max_features < 1:
			raise ConfigError(f"max_features must be >= 1, got {self.max_features}")

	def as_dict(self):
		return {
			"n_trees": self.n_trees,
			"max_depth": self.max_depth,
			"min_samples_split": self.min_samples_split,
			"bootstrap": self.bootstrap,
			"max_features": self.max_features,
		}

	@classmethod
	def from_dict(cls, data):
		return cls(**data)


class TreeNode:
	"""Read-only view of one node of a Tree"""

	def __init__(self, feature_index, threshold, left, right, class_counts):
		self.feature_index = feature_index
		self.threshold = threshold
		self.left = left
		self.right = right
		self.class_counts = class_counts

	@property
	def is_leaf(self):
		return self.feature_index == LEAF


class Tree:
	"""A fitted binary tree in flat-array form"""

	def __init__(self, feature, threshold, left, right, counts, feature_dim):
		self.feature = np.asarray(feature, dtype=np.int32)
		self.threshold = np.asarray(threshold, dtype=np.float64)
		self.left = np.asarray(left, dtype=np.int32)
		self.right = np.asarray(right, dtype=np.int32)
		self.counts = np.asarray(counts, dtype=np.int64).reshape(-1, N_CLASSES)
		self.feature_dim = int(feature_dim)

	@property
	def n_nodes(self):
		return len(self.feature)

	def node(self, index):
		return TreeNode(
			int(self.feature[index]),
			float(self.threshold[index]),
			int(self.left[index]),
			int(self.right[index]),
			tuple(int(c) for c in self.counts[index]),
		)

	def depth(self):
		depths = np.zeros(self.n_nodes, dtype=np.int64)
		for index in range(self.n_nodes):
			if self.feature[index] != LEAF:
				depths[self.left[index]] = depths[index] + 1
				depths[self.right[index]] = depths[index] + 1
		return int(depths.max())

	def apply(self, X):
		"""Leaf index reached by every row of X"""
		X = np.asarray(X, dtype=np.float64)
		nodes = np.zeros(X.shape[0], dtype=np.int64)
		while True:
			features = self.feature[nodes]
			active = np.flatnonzero(features != LEAF)
			if active.size == 0:
				return nodes
			current = nodes[active]
			go_left = X[active, features[active]] < self.threshold[current]
			nodes[active] = np.where(go_left, self.left[current], self.right[current])

	def leaf_distribution(self):
		"""Class frequencies per node (rows sum to 1 for leaves)"""
		totals = self.counts.sum(axis=1, keepdims=True)
		return self.counts / np.maximum(totals, 1)

	def predict_proba(self, X):
		return self.leaf_distribution()[self.apply(X)]


class _TreeBuilder:
	"""Grows one tree; holds the node lists while growing"""

	def __init__(self, X, y, kind, params, rng, observer=None):
		self.X = X
		self.y = y
		self.kind = kind
		self.params = params
		self.rng = rng
		self.observer = observer
		self.n_candidates = params.candidate_features(X.shape[1])

		self.feature = []
		self.threshold = []
		self.left = []
		self.right = []
		self.counts = []

	def build(self, indices):
		self._grow(indices, 0)
		return Tree(self.feature, self.threshold, self.left, self.right, self.counts, self.X.shape[1])

	def _new_node(self, class_counts):
		self.feature.append(LEAF)
		self.threshold.append(0.0)
		self.left.append(LEAF)
		self.right.append(LEAF)
		self.counts.append(class_counts)
		return len(self.feature) - 1

	def _grow(self, indices, depth):
		class_counts = np.bincount(self.y[indices], minlength=N_CLASSES)
		node = self._new_node(class_counts)

		if (
			np.count_nonzero(class_counts) < 2
			or len(indices) < self.params.min_samples_split
			or depth >= self.params.max_depth
		):
			return node

		if self.kind == ForestKind.RANDOM:
			split = self._best_gini_split(node, indices, class_counts)
		else:
			split = self._random_split(node, indices)

		if split is None:
			return node

		feature, threshold = split
		goes_left = self.X[indices, feature] < threshold
		left = self._grow(indices[goes_left], depth + 1)
		right = self._grow(indices[~goes_left], depth + 1)

		self.feature[node] = int(feature)
		self.threshold[node] = float(threshold)
		self.left[node] = left
		self.right[node] = right
		return node

	def _best_gini_split(self, node, indices, class_counts):
		n = len(indices)
		features = np.sort(self.rng.choice(self.X.shape[1], size=self.n_candidates, replace=False))

		values = self.X[np.ix_(indices, features)]
		order = np.argsort(values, axis=0, kind="stable")
		values = np.take_along_axis(values, order, axis=0)
		labels = self.y[indices][order]

		left_n = np.arange(1, n, dtype=np.float64)[:, None]
		right_n = n - left_n
		left_pos = np.cumsum(labels, axis=0)[:-1].astype(np.float64)
		right_pos = class_counts[1] - left_pos

		left_gini = 1.0 - (left_pos / left_n) ** 2 - ((left_n - left_pos) / left_n) ** 2
		right_gini = 1.0 - (right_pos / right_n) ** 2 - ((right_n - right_pos) / right_n) ** 2
		parent_gini = 1.0 - np.sum((class_counts / n) ** 2)
		gain = parent_gini - (left_n * left_gini + right_n * right_gini) / n

		distinct = values[1:] > values[:-1]
		if not distinct.any():
			return None
		gain = np.where(distinct, gain, -np.inf)

		best_gain = gain.max()
		tied = gain >= best_gain - GAIN_TOLERANCE
		column = int(np.argmax(tied.any(axis=0)))
		row = int(np.argmax(tied[:, column]))

		threshold = _midpoint(values[row, column], values[row + 1, column])

		if self.observer is not None:
			rows, columns = np.nonzero(distinct)
			candidates = [
				(int(features[c]), _midpoint(values[r, c], values[r + 1, c]), float(gain[r, c]))
				for r, c in zip(rows, columns)
			]
			self.observer(
				{
					"node": node,
					"kind": self.kind,
					"feature": int(features[column]),
					"threshold": threshold,
					"gain": float(gain[row, column]),
					"candidates": candidates,
				}
			)

		return int(features[column]), threshold

	def _random_split(self, node, indices):
		d = self.X.shape[1]
		feature = None

		for _ in range(MAX_FEATURE_DRAWS):
			candidate = int(self.rng.integers(d))
			column = self.X[indices, candidate]
			low, high = column.min(), column.max()
			if high > low:
				feature = candidate
				break

		if feature is None:
			for candidate in self.rng.permutation(d):
				column = self.X[indices, candidate]
				low, high = column.min(), column.max()
				if high > low:
					feature = int(candidate)
					break

		if feature is None:
			return None

		threshold = low + self.rng.random() * (high - low)
		if threshold <= low:
			threshold = _midpoint(low, high)

		if self.observer is not None:
			self.observer(
				{
					"node": node,
					"kind": self.kind,
					"feature": feature,
					"threshold": float(threshold),
					"range": (float(low), float(high)),
				}
			)

		return feature, float(threshold)


def _midpoint(low, high):
	"""Threshold strictly above low and at most high"""
	mid = (float(low) + float(high)) / 2.0
	if mid <= low:
		return float(high)
	return mid


def fit_tree(X, y, kind, params, rng_seed, sample_indices=None, observer=None):
	"""
	Grow one decision tree.

	Args:
		X: Feature rows, shape (n, d)
		y: Labels in {0, 1}
		kind: ForestKind.RANDOM or ForestKind.COMPLETELY_RANDOM
		params: ForestParams
		rng_seed: Seed or numpy Generator
		sample_indices: Optional row indices (repeats allowed) to train on
		observer: Optional callable receiving one dict per split

	Returns:
		Tree
	"""
	X = np.asarray(X, dtype=np.float64)
	y = np.asarray(y, dtype=np.int64)
	if X.ndim != 2 or X.shape[0] == 0 or len(y) == 0:
		raise EmptyData("Cannot fit a tree on zero rows")
	if X.shape[0] != len(y):
		raise DimensionMismatch(f"{X.shape[0]} rows but {len(y)} labels", expected=X.shape[0], found=len(y))
	if kind not in ForestKind.ALL:
		raise ValueError(f"Unknown forest kind '{kind}'")

	indices = np.arange(X.shape[0]) if sample_indices is None else np.asarray(sample_indices, dtype=np.int64)
	if indices.size == 0:
		raise EmptyData("Cannot fit a tree on zero rows")

	rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
	return _TreeBuilder(X, y, kind, params, rng, observer=observer).build(indices)
