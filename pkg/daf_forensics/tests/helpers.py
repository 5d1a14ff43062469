# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""Shared builders for the test suite"""

import numpy as np

from daf_forensics.forest.forest import Forest
from daf_forensics.forest.trees import Tree

# A run configuration small enough for end-to-end tests: 32 px images,
# 4 x 4 patches of 8 px, 2 layers of 1 + 1 forests with 5 trees.
SMALL_CONFIG = """
input_size = 32
grid = 4
hog_cell = 8
windows = 2:2,1:1
n_trees = 5
layers = 2
random_forests = 1
completely_random_forests = 1
candidates = 2
sampling_ratio = 0.3
max_rounds = 1
val_fraction = 0.2
seed = 3
"""

# 4 + 16 placements of (9 HOG + 3 * 8 LFS) values
SMALL_FEATURE_DIM = 20 * 33


def blobs(n=200, dim=5, separation=3.0, seed=0):
	"""Two Gaussian blobs, labels alternating 0/1"""
	rng = np.random.default_rng(seed)
	y = np.arange(n) % 2
	centres = np.where(y[:, None] == 1, separation / 2, -separation / 2)
	X = centres + rng.normal(size=(n, dim))
	return X, y


def stump(feature_dim, threshold, feature=0):
	"""Tree predicting fake iff x[feature] >= threshold"""
	return Tree(
		feature=[feature, -1, -1],
		threshold=[threshold, 0.0, 0.0],
		left=[1, -1, -1],
		right=[2, -1, -1],
		counts=[[1, 1], [1, 0], [0, 1]],
		feature_dim=feature_dim,
	)


def leaf(feature_dim, counts):
	"""Single-leaf tree with the given (real, fake) counts"""
	return Tree(
		feature=[-1], threshold=[0.0], left=[-1], right=[-1], counts=[counts], feature_dim=feature_dim
	)


def stump_forest(kind, feature_dim, threshold):
	return Forest(kind, [stump(feature_dim, threshold)], feature_dim)
