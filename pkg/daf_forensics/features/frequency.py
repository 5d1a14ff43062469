# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Local frequency statistics (LFS) of a patch.

The patch is transformed with an orthonormal 2-D DCT-II. The DCT plane is cut
into q contiguous bands of equal width in Manhattan radius u + v. Coefficients
are compressed with log(1 + |c|) and, inside each band, averaged down every
column over the entries that belong to the band.
"""

from functools import lru_cache

import numpy as np
from scipy.fft import dctn, idctn

from daf_forensics.errors import GeometryError


def dct2(patch):
	"""
	Orthonormal 2-D DCT-II over the last two axes.

	Args:
		patch: Array of shape (..., side, side)

	Returns:
		np.ndarray of coefficients, same shape
	"""
	patch = np.asarray(patch, dtype=np.float64)
	if patch.shape[-1] != patch.shape[-2]:
		raise GeometryError(f"DCT needs square patches, got {patch.shape[-2]}x{patch.shape[-1]}")
	return dctn(patch, type=2, norm="ortho", axes=(-2, -1))


def idct2(coeffs):
	"""Inverse of dct2"""
	return idctn(np.asarray(coeffs, dtype=np.float64), type=2, norm="ortho", axes=(-2, -1))


@lru_cache(maxsize=32)
def band_masks(side, q):
	"""
	Boolean masks of shape (q, side, side) partitioning the DCT plane.

	Band k holds the indices whose radius u + v falls in the k-th of q
	equal-width slices of [0, 2 * side - 2].
	"""
	radii = 2 * side - 1
	if q < 1 or q > radii:
		raise GeometryError(f"Cannot cut {radii} frequency radii into {q} bands")

	u, v = np.indices((side, side))
	band_of = ((u + v) * q) // radii
	masks = band_of[None, :, :] == np.arange(q)[:, None, None]
	masks.setflags(write=False)
	return masks


def lfs_from_coeffs(coeffs, q=3):
	"""
	LFS descriptor from DCT coefficients.

	Args:
		coeffs: Array of shape (side, side) or (P, side, side)
		q: Number of frequency bands

	Returns:
		np.ndarray of shape (q * side,) or (P, q * side), bands ordered low to high
	"""
	coeffs = np.asarray(coeffs, dtype=np.float64)
	single = coeffs.ndim == 2
	if single:
		coeffs = coeffs[None, :, :]

	side = coeffs.shape[-1]
	masks = band_masks(side, q).astype(np.float64)
	log_magnitude = np.log1p(np.abs(coeffs))

	sums = np.einsum("kuv,puv->pkv", masks, log_magnitude)
	counts = masks.sum(axis=1)
	means = np.divide(sums, counts[None, :, :], out=np.zeros_like(sums), where=counts[None, :, :] > 0)
	descriptor = means.reshape(coeffs.shape[0], q * side)

	return descriptor[0] if single else descriptor


def lfs(coeffs, cfg):
	"""LFS descriptor using the band count of a PatchConfig"""
	return lfs_from_coeffs(coeffs, q=cfg.q)
