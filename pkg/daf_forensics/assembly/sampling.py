# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Sample weights and weighted batch sampling.
"""

import numpy as np

from daf_forensics.errors import IndexOutOfRange, InvalidCount, LengthMismatch


class SampleWeights:
	"""Positive per-sample weights W over the training set"""

	def __init__(self, values):
		values = np.asarray(values, dtype=np.float64)
		if values.ndim != 1:
			raise ValueError("Sample weights must be a 1-D array")
		if np.any(values <= 0) or not np.all(np.isfinite(values)):
			raise ValueError("Sample weights must be finite and positive")
		self.values = values

	@classmethod
	def uniform(cls, n):
		return cls(np.ones(n))

	def probabilities(self):
		return self.values / self.values.sum()

	def __len__(self):
		return len(self.values)

	def __getitem__(self, index):
		return self.values[index]

	def __repr__(self):
		return f"SampleWeights(n={len(self)}, min={self.values.min():.4g}, max={self.values.max():.4g})"


def weighted_sample(weights, k, rng_seed):
	"""
	k distinct indices drawn by sequential weighted draws without replacement.

	Args:
		weights: SampleWeights
		k: Number of indices
		rng_seed: Seed or numpy Generator

	Returns:
		np.ndarray of sorted indices
	"""
	n = len(weights)
	if k < 0 or k > n:
		raise InvalidCount(f"Cannot draw {k} distinct samples from {n}")

	rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
	if k == n:
		return np.arange(n)
	chosen = rng.choice(n, size=k, replace=False, p=weights.probabilities())
	return np.sort(chosen)


def update_weights(weights, predictions, truth, subset_indices, theta):
	"""
	Multiply the weight of every misclassified subset sample by theta and
	divide the weight of every correctly classified one by theta.

	Args:
		weights: SampleWeights
		predictions: Hard labels predicted for the subset
		truth: True labels of the subset
		subset_indices: Training indices of the subset
		theta: Weight factor (> 1; 1 leaves W unchanged)

	Returns:
		SampleWeights, a new object
	"""
	subset_indices = np.asarray(subset_indices, dtype=np.int64)
	predictions = np.asarray(predictions).astype(np.int64)
	truth = np.asarray(truth).astype(np.int64)
	if not len(subset_indices) == len(predictions) == len(truth):
		raise LengthMismatch(
			f"{len(subset_indices)} indices, {len(predictions)} predictions, {len(truth)} labels"
		)

	n = len(weights)
	outside = (subset_indices < 0) | (subset_indices >= n)
	if outside.any():
		raise IndexOutOfRange(f"Index {int(subset_indices[outside][0])} is outside the {n} training samples")

	factors = np.where(predictions != truth, theta, 1.0 / theta)
	values = weights.values.copy()
	values[subset_indices] *= factors
	return SampleWeights(values)
