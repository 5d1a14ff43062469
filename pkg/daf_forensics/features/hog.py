# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Histogram of oriented gradients for square patches.

Gradients are central differences (zero on the outermost rows/columns).
Unsigned orientations in [0, 180) are split linearly between the two nearest
bin centres, bin k being centred on k * 180 / bins degrees. All cells of a
patch form a single block that is L2-normalized as a whole.
"""

import numpy as np

from daf_forensics.errors import GeometryError

HOG_EPSILON = 1e-6


def hog_dim(patch_side, cell, bins):
	"""Length of the HOG descriptor of one patch"""
	return (patch_side // cell) ** 2 * bins


def hog_batch(patches, cell=8, bins=9, eps=HOG_EPSILON):
	"""
	HOG descriptors for a stack of patches.

	Args:
		patches: Array of shape (P, side, side)
		cell: Cell side in pixels
		bins: Number of orientation bins over [0, 180)
		eps: Normalization guard

	Returns:
		np.ndarray of shape (P, (side / cell)^2 * bins)
	"""
	patches = np.asarray(patches, dtype=np.float64)
	count, height, width = patches.shape
	if height != width:
		raise GeometryError(f"HOG needs square patches, got {height}x{width}")
	if cell < 1 or height % cell:
		raise GeometryError(f"Patch side {height} is not divisible by HOG cell {cell}")

	gx = np.zeros_like(patches)
	gy = np.zeros_like(patches)
	gx[:, :, 1:-1] = patches[:, :, 2:] - patches[:, :, :-2]
	gy[:, 1:-1, :] = patches[:, 2:, :] - patches[:, :-2, :]

	magnitude = np.hypot(gx, gy)
	angle = np.mod(np.degrees(np.arctan2(gy, gx)), 180.0)

	position = angle / (180.0 / bins)
	lower = np.floor(position)
	upper_share = position - lower
	lower = lower.astype(np.int64) % bins
	upper = (lower + 1) % bins

	cells_per_side = height // cell
	n_cells = cells_per_side * cells_per_side
	pixel_rows = np.arange(height) // cell
	cell_of_pixel = pixel_rows[:, None] * cells_per_side + pixel_rows[None, :]
	offsets = (np.arange(count)[:, None, None] * n_cells + cell_of_pixel[None, :, :]) * bins

	size = count * n_cells * bins
	histogram = np.bincount(
		(offsets + lower).ravel(), weights=(magnitude * (1.0 - upper_share)).ravel(), minlength=size
	)
	histogram += np.bincount((offsets + upper).ravel(), weights=(magnitude * upper_share).ravel(), minlength=size)
	histogram = histogram.reshape(count, n_cells * bins)

	norm = np.sqrt(np.sum(histogram**2, axis=1) + eps * eps)
	return histogram / norm[:, None]


def hog(patch, cfg):
	"""
	HOG descriptor of one square patch.

	Args:
		patch: 2-D array
		cfg: PatchConfig (hog_cell, hog_bins)

	Returns:
		np.ndarray of length (side / cell)^2 * bins
	"""
	return hog_batch(np.asarray(patch)[None, :, :], cell=cfg.hog_cell, bins=cfg.hog_bins)[0]
