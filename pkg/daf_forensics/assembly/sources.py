# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Training data sources for the assembly loop.

A source keeps every label in memory but hands out feature rows only for the
indices asked for, so the loop controls how many rows are resident at once.
"""

import numpy as np

from daf_forensics.errors import DimensionMismatch, IndexOutOfRange
from daf_forensics.store.feature_cache import read_cache, read_header, read_labels


class InMemorySource:
	"""Rows already held in a matrix"""

	def __init__(self, X, y):
		self.X = np.asarray(X, dtype=np.float64)
		self.labels = np.asarray(y, dtype=np.int64)
		if self.X.ndim != 2 or self.X.shape[0] != len(self.labels):
			raise DimensionMismatch(
				f"{self.X.shape[0]} rows but {len(self.labels)} labels", expected=len(self.labels), found=self.X.shape[0]
			)

	@property
	def dim(self):
		return self.X.shape[1]

	def __len__(self):
		return len(self.labels)

	def rows(self, indices):
		indices = np.asarray(indices, dtype=np.int64)
		if len(indices) and (indices.min() < 0 or indices.max() >= len(self)):
			raise IndexOutOfRange(f"Row index outside the {len(self)} training samples")
		return self.X[indices], self.labels[indices]


class CacheSource:
	"""Rows read on demand from a feature cache file"""

	def __init__(self, path):
		self.path = str(path)
		self.header = read_header(self.path)
		self.labels = read_labels(self.path, self.header)

	@property
	def dim(self):
		return self.header.dim

	def __len__(self):
		return self.header.n

	def rows(self, indices):
		return read_cache(self.path, indices)
