# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Cascade forests.

Each layer holds A random forests followed by B completely-random forests.
The class vectors of layer k are appended to the original features to form
the input of layer k + 1, forest j always writing positions d + 2j and
d + 2j + 1. Training-time class vectors come from k-fold cross-fitting; the
forests kept in the model are refit on the whole layer input.
"""

import numpy as np

from daf_forensics.errors import ConfigError, DimensionMismatch, EmptyData, TooFewSamples
from daf_forensics.forest.forest import fit_forest
from daf_forensics.forest.trees import N_CLASSES, ForestKind, ForestParams
from daf_forensics.utils import derive_seed, logger


class CascadeLayer:
	"""A random forests followed by B completely-random forests"""

	def __init__(self, forests):
		self.forests = list(forests)
		kinds = [forest.kind for forest in self.forests]
		n_random = kinds.count(ForestKind.RANDOM)
		if kinds != [ForestKind.RANDOM] * n_random + [ForestKind.COMPLETELY_RANDOM] * (len(kinds) - n_random):
			raise ValueError("Random forests must precede completely-random forests in a layer")
		if len({forest.feature_dim for forest in self.forests}) > 1:
			raise ValueError("All forests of a layer must share the input dimension")

	@property
	def n_random(self):
		return sum(1 for forest in self.forests if forest.kind == ForestKind.RANDOM)

	@property
	def n_completely_random(self):
		return len(self.forests) - self.n_random

	@property
	def input_dim(self):
		return self.forests[0].feature_dim

	def class_vectors(self, X):
		"""Concatenated (real, fake) distributions of every forest, shape (n, 2 * len(forests))"""
		return np.hstack([forest.predict_proba(X) for forest in self.forests])

	def __len__(self):
		return len(self.forests)


class DeepForestModel:
	"""
	A cascade of layers on base features of dimension base_dim.

	config holds the run configuration snapshot the model was trained with.
	"""

	def __init__(self, layers, base_dim, config=None):
		self.layers = list(layers)
		self.base_dim = int(base_dim)
		self.config = dict(config or {})

	@property
	def n_layers(self):
		return len(self.layers)

	@property
	def shape(self):
		"""(l, A, B)"""
		first = self.layers[0]
		return self.n_layers, first.n_random, first.n_completely_random

	def prefix(self, n_layers):
		return DeepForestModel(self.layers[:n_layers], self.base_dim, self.config)

	def _check(self, X):
		X = np.asarray(X, dtype=np.float64)
		single = X.ndim == 1
		if single:
			X = X[None, :]
		if X.ndim != 2 or X.shape[1] != self.base_dim:
			raise DimensionMismatch(
				f"Model expects {self.base_dim} features, got {X.shape[-1]}",
				expected=self.base_dim,
				found=int(X.shape[-1]),
			)
		return X, single

	def layer_input(self, X, index):
		"""
		Input rows of layer `index` (0-based) at inference time.

		Args:
			X: Base feature matrix, shape (n, base_dim)
			index: Layer index, may equal n_layers to get the input a
				further layer would see

		Returns:
			np.ndarray
		"""
		X, _ = self._check(X)
		if index == 0:
			return X
		vectors = _propagate(self.layers[:index], X)
		return np.hstack([X, vectors])

	def last_layer_features(self, X):
		X, single = self._check(X)
		vectors = _propagate(self.layers, X)
		return vectors[0] if single else vectors

	def predict_score(self, X):
		"""Mean fake-class probability of the last layer's forests"""
		vectors = self.last_layer_features(X)
		scores = np.mean(vectors[..., 1::N_CLASSES], axis=-1)
		return float(scores) if np.ndim(scores) == 0 else scores

	def __repr__(self):
		return f"DeepForestModel(layers={self.n_layers}, base_dim={self.base_dim})"


def _propagate(layers, X):
	"""Class vectors of the last of `layers` for base rows X"""
	vectors = None
	for index, layer in enumerate(layers):
		layer_in = X if index == 0 else np.hstack([X, vectors])
		vectors = layer.class_vectors(layer_in)
	return vectors


def _fold_assignment(n, folds, seed):
	"""Fold id per row: a seeded permutation dealt round-robin"""
	assignment = np.empty(n, dtype=np.int64)
	assignment[np.random.default_rng(seed).permutation(n)] = np.arange(n) % folds
	return assignment


def fit_cascade(
	X,
	y,
	layers=3,
	n_random=2,
	n_completely_random=2,
	params=None,
	folds=3,
	rng_seed=0,
	cross_fit=True,
	n_jobs=1,
	config=None,
	observer=None,
):
	"""
	Train one cascade on a batch.

	Args:
		X: Base feature rows, shape (n, d)
		y: Labels in {0, 1}
		layers: Number of layers l
		n_random: Random forests per layer A
		n_completely_random: Completely-random forests per layer B
		params: ForestParams
		folds: Cross-fitting folds for the training-time class vectors
		rng_seed: Integer seed
		cross_fit: False uses in-sample class vectors of the refit forests
		n_jobs: Worker threads for tree fitting
		config: Run configuration snapshot stored on the model
		observer: Optional callable receiving one dict per (layer, fold)
			with the training and held-out row indices

	Returns:
		DeepForestModel
	"""
	params = params or ForestParams()
	X = np.asarray(X, dtype=np.float64)
	y = np.asarray(y, dtype=np.int64)
	n = len(y)

	if n == 0 or X.ndim != 2 or X.shape[0] == 0:
		raise EmptyData("Cannot fit a cascade on zero rows")
	if X.shape[0] != n:
		raise DimensionMismatch(f"{X.shape[0]} rows but {n} labels", expected=X.shape[0], found=n)
	if layers < 1 or n_random < 0 or n_completely_random < 0 or n_random + n_completely_random < 1:
		raise ConfigError(f"Invalid cascade shape l={layers}, A={n_random}, B={n_completely_random}")
	if cross_fit and folds < 2:
		raise ConfigError(f"Cross-fitting needs at least 2 folds, got {folds}")
	if cross_fit and n < folds:
		raise TooFewSamples(f"{n} rows cannot be split into {folds} folds")

	kinds = [ForestKind.RANDOM] * n_random + [ForestKind.COMPLETELY_RANDOM] * n_completely_random
	fitted = []
	vectors = None

	for k in range(layers):
		layer_in = X if k == 0 else np.hstack([X, vectors])
		forests = [
			fit_forest(layer_in, y, kind, params, derive_seed(rng_seed, k, j, 0), n_jobs=n_jobs)
			for j, kind in enumerate(kinds)
		]
		layer = CascadeLayer(forests)
		fitted.append(layer)

		if k == layers - 1:
			break

		if cross_fit:
			vectors = _cross_fit_vectors(layer_in, y, kinds, params, folds, rng_seed, k, n_jobs, observer)
		else:
			vectors = layer.class_vectors(layer_in)

		logger("cascade").debug(f"layer {k} fitted on {layer_in.shape[1]} features")

	return DeepForestModel(fitted, X.shape[1], config)


def _cross_fit_vectors(layer_in, y, kinds, params, folds, rng_seed, k, n_jobs, observer):
	"""Out-of-fold class vectors: every row is scored by forests that never saw it"""
	n = len(y)
	assignment = _fold_assignment(n, folds, derive_seed(rng_seed, k, len(kinds), 0))
	vectors = np.empty((n, N_CLASSES * len(kinds)))

	for fold in range(folds):
		held_out = np.flatnonzero(assignment == fold)
		train = np.flatnonzero(assignment != fold)
		if observer is not None:
			observer({"layer": k, "fold": fold, "train": train, "held_out": held_out})

		for j, kind in enumerate(kinds):
			forest = fit_forest(
				layer_in[train], y[train], kind, params, derive_seed(rng_seed, k, j, fold + 1), n_jobs=n_jobs
			)
			vectors[held_out, N_CLASSES * j : N_CLASSES * (j + 1)] = forest.predict_proba(layer_in[held_out])

	return vectors


def predict_score(model, x):
	"""Fake score in [0, 1] for one feature row (or an array of scores for a matrix)"""
	return model.predict_score(x)


def last_layer_features(model, x):
	"""Class vectors of the last layer, length 2 * (A + B) per row"""
	return model.last_layer_features(x)


def count_nodes(model):
	"""
	Node counts of a model.

	Returns:
		dict with "total" and "layers", a list of per-forest counts per layer
	"""
	per_layer = [[forest.n_nodes() for forest in layer.forests] for layer in model.layers]
	return {"total": int(sum(sum(layer) for layer in per_layer)), "layers": per_layer}
