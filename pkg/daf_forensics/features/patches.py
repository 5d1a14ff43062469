# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Task-specific feature extraction.

An image is cut into n x n non-overlapping patches. Each patch contributes a
row of HOG (spatial) and LFS (frequency) features. Sliding windows of several
sizes then average the rows of the patches they cover, and all window
placements are concatenated into one flat feature vector.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from daf_forensics.errors import GeometryError
from daf_forensics.features.frequency import dct2, lfs_from_coeffs
from daf_forensics.features.hog import hog_batch, hog_dim

DEFAULT_WINDOWS = ((8, 8), (4, 4), (2, 2), (1, 1))


class PatchConfig:
	"""Geometry and descriptor parameters of the patch pipeline"""

	AVERAGE = "average"
	RECALC = "recalc"

	def __init__(self, grid=16, hog_cell=8, hog_bins=9, windows=DEFAULT_WINDOWS, q=3, mode=AVERAGE):
		self.grid = int(grid)
		self.hog_cell = int(hog_cell)
		self.hog_bins = int(hog_bins)
		self.windows = tuple((int(m), int(s)) for m, s in windows)
		self.q = int(q)
		self.mode = mode

	def patch_side(self, image_size):
		return image_size // self.grid

	def patch_dim(self, image_size):
		"""d_patch = hog_dim + q * patch_side"""
		side = self.patch_side(image_size)
		return hog_dim(side, self.hog_cell, self.hog_bins) + self.q * side

	def placements(self):
		"""Number of placements of each window, in config order"""
		return [((self.grid - m) // s + 1) ** 2 for m, s in self.windows]

	def feature_dim(self, image_size):
		return sum(self.placements()) * self.patch_dim(image_size)

	def validate(self, image_size=None):
		if self.grid < 1:
			raise GeometryError(f"grid must be >= 1, got {self.grid}")
		if self.hog_cell < 1 or self.hog_bins < 1:
			raise GeometryError("hog_cell and hog_bins must be >= 1")
		if not self.windows:
			raise GeometryError("At least one sliding window is required")
		for m, s in self.windows:
			if not 1 <= m <= self.grid or s < 1:
				raise GeometryError(f"Window ({m},{s}) does not fit a {self.grid}x{self.grid} grid")
		if self.mode not in (self.AVERAGE, self.RECALC):
			raise GeometryError(f"Unknown multiscale mode '{self.mode}'")

		if image_size is not None:
			if image_size % self.grid:
				raise GeometryError(f"Image side {image_size} is not divisible by grid {self.grid}")
			side = self.patch_side(image_size)
			if side % self.hog_cell:
				raise GeometryError(f"Patch side {side} is not divisible by HOG cell {self.hog_cell}")
			if not 1 <= self.q <= 2 * side - 1:
				raise GeometryError(f"q={self.q} bands do not fit a {side}x{side} DCT plane")
		elif self.q < 1:
			raise GeometryError(f"q must be >= 1, got {self.q}")

	def as_dict(self):
		return {
			"grid": self.grid,
			"hog_cell": self.hog_cell,
			"hog_bins": self.hog_bins,
			"windows": [list(w) for w in self.windows],
			"q": self.q,
			"mode": self.mode,
		}

	@classmethod
	def from_dict(cls, data):
		return cls(
			grid=data["grid"],
			hog_cell=data["hog_cell"],
			hog_bins=data["hog_bins"],
			windows=[tuple(w) for w in data["windows"]],
			q=data["q"],
			mode=data.get("mode", cls.AVERAGE),
		)

	def __eq__(self, other):
		return isinstance(other, PatchConfig) and self.as_dict() == other.as_dict()


class PatchGrid:
	"""Per-patch feature rows of one image, row-major patch order"""

	def __init__(self, n, rows):
		rows = np.asarray(rows, dtype=np.float64)
		if rows.ndim != 2 or rows.shape[0] != n * n:
			raise GeometryError(f"A {n}x{n} grid needs {n * n} rows, got shape {rows.shape}")
		self.n = n
		self.rows = rows

	@property
	def patch_dim(self):
		return self.rows.shape[1]


def _pixels(img):
	return img.data if hasattr(img, "data") else np.asarray(img, dtype=np.float64)


def partition(img, cfg):
	"""
	Cut an image into cfg.grid x cfg.grid non-overlapping square patches.

	Args:
		img: GrayImage or 2-D array
		cfg: PatchConfig

	Returns:
		np.ndarray of shape (n * n, side, side), row-major patch order
	"""
	data = _pixels(img)
	height, width = data.shape
	n = cfg.grid
	if height != width:
		raise GeometryError(f"Image must be square, got {height}x{width}")
	if n < 1 or height % n:
		raise GeometryError(f"Image side {height} is not divisible by grid {n}")

	side = height // n
	return data.reshape(n, side, n, side).transpose(0, 2, 1, 3).reshape(n * n, side, side)


def patch_features(patches, cfg):
	"""
	HOG ++ LFS rows for a stack of patches.

	Args:
		patches: Array of shape (P, side, side)
		cfg: PatchConfig

	Returns:
		np.ndarray of shape (P, d_patch)
	"""
	spatial = hog_batch(patches, cell=cfg.hog_cell, bins=cfg.hog_bins)
	frequency = lfs_from_coeffs(dct2(patches), q=cfg.q)
	return np.concatenate([spatial, frequency], axis=1)


def multiscale(grid, cfg):
	"""
	Average per-patch rows inside every sliding-window placement.

	Placements are visited row-major, windows in config order, and the mean
	row of each placement is appended to the output.

	Args:
		grid: PatchGrid
		cfg: PatchConfig

	Returns:
		np.ndarray feature vector
	"""
	n = grid.n
	cube = grid.rows.reshape(n, n, grid.patch_dim)
	blocks = []

	for m, s in cfg.windows:
		if not 1 <= m <= n or s < 1:
			raise GeometryError(f"Window ({m},{s}) does not fit a {n}x{n} grid")
		view = sliding_window_view(cube, (m, m), axis=(0, 1))[::s, ::s]
		blocks.append(view.mean(axis=(-2, -1)).reshape(-1))

	return np.concatenate(blocks)


def _recalc_windows(data, cfg):
	"""Features recomputed on each window's merged region, shrunk to one patch side"""
	n = cfg.grid
	side = data.shape[0] // n
	regions = []

	for m, s in cfg.windows:
		if not 1 <= m <= n or s < 1:
			raise GeometryError(f"Window ({m},{s}) does not fit a {n}x{n} grid")
		span = m * side
		for top in range(0, n - m + 1, s):
			for left in range(0, n - m + 1, s):
				region = data[top * side : top * side + span, left * side : left * side + span]
				regions.append(region.reshape(side, m, side, m).mean(axis=(1, 3)))

	return patch_features(np.stack(regions), cfg).reshape(-1)


def extract(img, cfg):
	"""
	Full feature vector of a normalized image.

	partition -> HOG ++ LFS per patch -> multiscale fusion. With
	cfg.mode == "recalc" the window features are recomputed on merged pixel
	regions instead of averaged.

	Args:
		img: GrayImage
		cfg: PatchConfig

	Returns:
		np.ndarray of length cfg.feature_dim(image size)
	"""
	data = _pixels(img)
	cfg.validate(data.shape[0])

	if cfg.mode == PatchConfig.RECALC:
		return _recalc_windows(data, cfg)

	rows = patch_features(partition(data, cfg), cfg)
	return multiscale(PatchGrid(cfg.grid, rows), cfg)


def band_energy(img, cfg, band=-1):
	"""
	Mean LFS value of one frequency band over all patches of an image.

	Args:
		img: GrayImage
		cfg: PatchConfig
		band: Band index, -1 for the highest band

	Returns:
		float
	"""
	data = _pixels(img)
	cfg.validate(data.shape[0])
	patches = partition(data, cfg)
	side = patches.shape[-1]
	descriptor = lfs_from_coeffs(dct2(patches), q=cfg.q).reshape(len(patches), cfg.q, side)
	return float(descriptor[:, band, :].mean())
