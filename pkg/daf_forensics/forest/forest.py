# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Bagged ensembles of decision trees.
"""

import numpy as np
from joblib import Parallel, delayed

from daf_forensics.errors import DimensionMismatch, EmptyData
from daf_forensics.forest.trees import N_CLASSES, ForestKind, fit_tree
from daf_forensics.utils import derive_seed


class Forest:
	"""
	A fitted random or completely-random forest.

	val_accuracy is left unset by fitting; component selection stamps it on
	the copy it places into an assembled layer.
	"""

	def __init__(self, kind, trees, feature_dim, val_accuracy=None):
		if kind not in ForestKind.ALL:
			raise ValueError(f"Unknown forest kind '{kind}'")
		self.kind = kind
		self.trees = list(trees)
		self.feature_dim = int(feature_dim)
		self.val_accuracy = val_accuracy

	@property
	def n_trees(self):
		return len(self.trees)

	def n_nodes(self):
		return sum(tree.n_nodes for tree in self.trees)

	def with_val_accuracy(self, accuracy):
		"""Copy sharing the (immutable) trees, with val_accuracy set"""
		return Forest(self.kind, self.trees, self.feature_dim, val_accuracy=float(accuracy))

	def predict_proba(self, X):
		"""
		Mean leaf class frequencies over all trees.

		Args:
			X: One feature row or a matrix of rows

		Returns:
			np.ndarray of shape (2,) for one row, (n, 2) for a matrix
		"""
		X = np.asarray(X, dtype=np.float64)
		single = X.ndim == 1
		if single:
			X = X[None, :]
		if X.ndim != 2 or X.shape[1] != self.feature_dim:
			raise DimensionMismatch(
				f"Forest expects {self.feature_dim} features, got {X.shape[-1]}",
				expected=self.feature_dim,
				found=int(X.shape[-1]),
			)

		total = np.zeros((X.shape[0], N_CLASSES))
		for tree in self.trees:
			total += tree.predict_proba(X)
		proba = total / self.n_trees

		return proba[0] if single else proba

	def __repr__(self):
		return f"Forest(kind={self.kind!r}, n_trees={self.n_trees}, feature_dim={self.feature_dim})"


def bootstrap_indices(n, rng):
	"""n row indices drawn uniformly with replacement from range(n)"""
	return rng.integers(0, n, size=n)


def _fit_member(X, y, kind, params, seed):
	rng = np.random.default_rng(seed)
	sample = bootstrap_indices(X.shape[0], rng) if params.bootstrap else None
	return fit_tree(X, y, kind, params, rng, sample_indices=sample)


def fit_forest(X, y, kind, params, rng_seed, n_jobs=1):
	"""
	Fit params.n_trees trees, each on its own bootstrap resample.

	Tree t uses the seed derive_seed(rng_seed, t), so the fitted forest does
	not depend on n_jobs or on scheduling.

	Args:
		X: Feature rows, shape (n, d)
		y: Labels in {0, 1}
		kind: ForestKind
		params: ForestParams
		rng_seed: Integer seed
		n_jobs: Worker threads for tree fitting

	Returns:
		Forest
	"""
	X = np.asarray(X, dtype=np.float64)
	y = np.asarray(y, dtype=np.int64)
	if X.ndim != 2 or X.shape[0] == 0 or len(y) == 0:
		raise EmptyData("Cannot fit a forest on zero rows")

	seeds = [derive_seed(rng_seed, t) for t in range(params.n_trees)]
	if n_jobs == 1:
		trees = [_fit_member(X, y, kind, params, seed) for seed in seeds]
	else:
		trees = Parallel(n_jobs=n_jobs, prefer="threads")(
			delayed(_fit_member)(X, y, kind, params, seed) for seed in seeds
		)

	return Forest(kind, trees, X.shape[1])


def predict_proba(forest, x):
	"""Class distribution (real, fake) of a forest for x"""
	return forest.predict_proba(x)
