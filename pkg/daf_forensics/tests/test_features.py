# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

import math
import unittest

import numpy as np

from daf_forensics.errors import GeometryError
from daf_forensics.features import (
	PatchConfig,
	PatchGrid,
	dct2,
	extract,
	hog,
	idct2,
	lfs,
	multiscale,
	partition,
)
from daf_forensics.features.frequency import band_masks
from daf_forensics.imaging import GrayImage


def brute_force_dct(patch):
	"""Orthonormal 2-D DCT-II straight from its definition"""
	n = patch.shape[0]
	out = np.zeros((n, n))
	for u in range(n):
		for v in range(n):
			cu = math.sqrt(1.0 / n) if u == 0 else math.sqrt(2.0 / n)
			cv = math.sqrt(1.0 / n) if v == 0 else math.sqrt(2.0 / n)
			total = 0.0
			for x in range(n):
				for y in range(n):
					total += (
						patch[x, y]
						* math.cos(math.pi * (2 * x + 1) * u / (2 * n))
						* math.cos(math.pi * (2 * y + 1) * v / (2 * n))
					)
			out[u, v] = cu * cv * total
	return out


class TestPartition(unittest.TestCase):
	def test_default_grid(self):
		image = GrayImage(np.random.default_rng(0).random((256, 256)))
		patches = partition(image, PatchConfig(grid=16))
		self.assertEqual(patches.shape, (256, 16, 16))
		self.assertTrue(np.array_equal(patches[1], image.data[0:16, 16:32]))
		self.assertTrue(np.array_equal(patches[16], image.data[16:32, 0:16]))

	def test_single_patch_is_the_image(self):
		image = GrayImage(np.random.default_rng(1).random((32, 32)))
		patches = partition(image, PatchConfig(grid=1))
		self.assertEqual(patches.shape, (1, 32, 32))
		self.assertTrue(np.array_equal(patches[0], image.data))

	def test_indivisible_grid(self):
		with self.assertRaises(GeometryError):
			partition(GrayImage(np.zeros((256, 256))), PatchConfig(grid=3))


class TestHog(unittest.TestCase):
	def test_constant_patch_gives_zeros(self):
		self.assertTrue(np.array_equal(hog(np.full((16, 16), 0.7), PatchConfig()), np.zeros(36)))

	def test_default_length(self):
		self.assertEqual(len(hog(np.random.default_rng(2).random((16, 16)), PatchConfig())), 36)

	def test_vertical_step_edge_lands_in_bin_zero(self):
		patch = np.zeros((16, 16))
		patch[:, 8:] = 1.0
		histogram = hog(patch, PatchConfig(hog_cell=8, hog_bins=9)).reshape(4, 9)
		self.assertTrue(np.all(histogram[:, 1:] == 0.0))
		self.assertTrue(np.all(histogram[:, 0] > 0.0))
		self.assertAlmostEqual(float(np.sum(histogram**2)), 1.0, places=6)

	def test_indivisible_cell(self):
		with self.assertRaises(GeometryError):
			hog(np.zeros((12, 12)), PatchConfig(hog_cell=8))


class TestDct(unittest.TestCase):
	def test_constant_patch(self):
		coeffs = dct2(np.ones((16, 16)))
		self.assertAlmostEqual(coeffs[0, 0], 16.0, delta=1e-9)
		rest = coeffs.copy()
		rest[0, 0] = 0.0
		self.assertLess(np.abs(rest).max(), 1e-9)

	def test_round_trip_and_parseval(self):
		patches = np.random.default_rng(3).random((1000, 16, 16))
		coeffs = dct2(patches)
		self.assertLess(np.abs(idct2(coeffs) - patches).max(), 1e-6)
		energy_gap = np.abs(np.sum(coeffs**2, axis=(1, 2)) - np.sum(patches**2, axis=(1, 2)))
		self.assertLess(energy_gap.max(), 1e-6)

	def test_matches_definition(self):
		rng = np.random.default_rng(4)
		for _ in range(3):
			patch = rng.random((8, 8))
			self.assertLess(np.abs(dct2(patch) - brute_force_dct(patch)).max(), 1e-9)

	def test_non_square_patch(self):
		with self.assertRaises(GeometryError):
			dct2(np.zeros((4, 8)))


class TestLfs(unittest.TestCase):
	def test_constant_patch(self):
		descriptor = lfs(dct2(np.ones((16, 16))), PatchConfig(q=3))
		self.assertEqual(len(descriptor), 48)
		# rows 0..10 of column 0 fall in band 0
		self.assertAlmostEqual(descriptor[0], math.log(17.0) / 11, places=9)
		self.assertLess(np.abs(descriptor[1:]).max(), 1e-9)

	def test_single_band_is_plain_column_means(self):
		coeffs = dct2(np.random.default_rng(5).random((16, 16)))
		expected = np.log1p(np.abs(coeffs)).mean(axis=0)
		self.assertTrue(np.allclose(lfs(coeffs, PatchConfig(q=1)), expected, atol=1e-12))

	def test_band_masks_partition_the_plane(self):
		for side in (4, 8, 16):
			for q in (1, 2, 3, 5):
				masks = band_masks(side, q)
				self.assertTrue(np.array_equal(masks.sum(axis=0), np.ones((side, side))))

	def test_permuting_entries_inside_a_band_column(self):
		coeffs = dct2(np.random.default_rng(6).random((16, 16)))
		shuffled = coeffs.copy()
		# column 2 rows 0..8 all lie in band 0 for q=3
		shuffled[0:9, 2] = coeffs[0:9, 2][::-1]
		cfg = PatchConfig(q=3)
		self.assertTrue(np.allclose(lfs(coeffs, cfg), lfs(shuffled, cfg), atol=1e-12))


class TestMultiscale(unittest.TestCase):
	def test_unit_window_is_concatenation(self):
		rows = np.random.default_rng(7).random((16, 5))
		out = multiscale(PatchGrid(4, rows), PatchConfig(grid=4, windows=[(1, 1)]))
		self.assertTrue(np.array_equal(out, rows.reshape(-1)))

	def test_identical_patches(self):
		row = np.random.default_rng(8).random(6)
		cfg = PatchConfig(grid=4, windows=[(2, 2), (4, 4), (3, 1)])
		out = multiscale(PatchGrid(4, np.tile(row, (16, 1))), cfg).reshape(-1, 6)
		self.assertTrue(np.allclose(out, row[None, :], atol=1e-12))

	def test_two_by_two_window_is_mean_of_four_rows(self):
		rows = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0], [7.0, 8.0]])
		out = multiscale(PatchGrid(2, rows), PatchConfig(grid=2, windows=[(2, 2)]))
		self.assertTrue(np.allclose(out, [4.0, 5.0]))

	def test_window_blocks_equal_patch_means(self):
		rng = np.random.default_rng(9)
		n, dim = 5, 3
		rows = rng.random((n * n, dim))
		cube = rows.reshape(n, n, dim)
		windows = [(3, 2), (2, 1)]
		out = multiscale(PatchGrid(n, rows), PatchConfig(grid=n, windows=windows))

		expected = []
		for m, s in windows:
			for top in range(0, n - m + 1, s):
				for left in range(0, n - m + 1, s):
					expected.append(cube[top : top + m, left : left + m].reshape(-1, dim).mean(axis=0))
		self.assertLess(np.abs(out - np.concatenate(expected)).max(), 1e-6)

	def test_dimension_formula_for_small_grids(self):
		rng = np.random.default_rng(10)
		for n in range(1, 5):
			rows = rng.random((n * n, 2))
			for m in range(1, n + 1):
				for s in range(1, 4):
					out = multiscale(PatchGrid(n, rows), PatchConfig(grid=n, windows=[(m, s)]))
					self.assertEqual(len(out), ((n - m) // s + 1) ** 2 * 2)

	def test_window_larger_than_grid(self):
		with self.assertRaises(GeometryError):
			multiscale(PatchGrid(2, np.zeros((4, 3))), PatchConfig(grid=2, windows=[(3, 3)]))


class TestExtract(unittest.TestCase):
	def test_default_dimension(self):
		cfg = PatchConfig()
		self.assertEqual(cfg.placements(), [4, 16, 64, 256])
		self.assertEqual(cfg.patch_dim(256), 84)
		self.assertEqual(cfg.feature_dim(256), 28560)

	def test_small_config_dimension_and_determinism(self):
		cfg = PatchConfig(grid=4, hog_cell=8, windows=[(2, 2), (1, 1)])
		image = GrayImage(np.random.default_rng(11).random((32, 32)))
		first = extract(image, cfg)
		self.assertEqual(len(first), cfg.feature_dim(32))
		self.assertEqual(len(first), 660)
		self.assertTrue(np.all(np.isfinite(first)))
		self.assertTrue(np.array_equal(first, extract(image.copy(), cfg)))

	def test_recalc_mode_keeps_dimension(self):
		cfg = PatchConfig(grid=4, hog_cell=8, windows=[(2, 2), (1, 1)], mode=PatchConfig.RECALC)
		image = GrayImage(np.random.default_rng(12).random((32, 32)))
		features = extract(image, cfg)
		self.assertEqual(len(features), cfg.feature_dim(32))
		averaged = extract(image, PatchConfig(grid=4, hog_cell=8, windows=[(2, 2), (1, 1)]))
		# unit windows are identical in both modes
		tail = 16 * cfg.patch_dim(32)
		self.assertTrue(np.allclose(features[-tail:], averaged[-tail:], atol=1e-12))

	def test_config_validation(self):
		with self.assertRaises(GeometryError):
			PatchConfig(grid=4, hog_cell=5).validate(32)
		with self.assertRaises(GeometryError):
			PatchConfig(grid=4, windows=[(5, 1)]).validate(32)
		with self.assertRaises(GeometryError):
			PatchConfig(grid=4, q=16).validate(32)
		PatchConfig().validate(256)


if __name__ == "__main__":
	unittest.main()
