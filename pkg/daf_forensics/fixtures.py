# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Synthetic labeled corpus for smoke tests and acceptance runs.

Real images are smooth random low-frequency fields plus i.i.d. sensor-like
noise. Fake images are drawn the same way and then carry a low-amplitude
checkerboard, a high-frequency periodic artifact the LFS bands pick up.
With amplitude 0 both classes come from the same distribution.
"""

from pathlib import Path

import numpy as np
from tqdm import tqdm

from daf_forensics.errors import IoError
from daf_forensics.imaging.loader import GrayImage, resize_bilinear, save_image
from daf_forensics.manifest import FAKE_DIR, REAL_DIR, ManifestRow, write_manifest
from daf_forensics.utils import logger, make_rng

DEFAULT_AMPLITUDE = 0.03
DEFAULT_NOISE_SIGMA = 0.02
FIELD_RESOLUTION = 8
FAKE_TAG = "periodic"
MANIFEST_NAME = "manifest.csv"


def smooth_field(size, rng, resolution=FIELD_RESOLUTION):
	"""Random field upsampled from a coarse grid, values roughly in [0.2, 0.8]"""
	coarse = rng.uniform(0.2, 0.8, size=(resolution, resolution))
	return resize_bilinear(coarse, size)


def periodic_artifact(size, amplitude):
	"""Checkerboard of +/- amplitude"""
	rows, cols = np.indices((size, size))
	return amplitude * np.where((rows + cols) % 2 == 0, 1.0, -1.0)


def synthesize(index, label, seed, size=256, amplitude=DEFAULT_AMPLITUDE, noise_sigma=DEFAULT_NOISE_SIGMA):
	"""
	One synthetic image.

	Args:
		index: Image index, part of the seed
		label: 0 real, 1 fake
		seed: Corpus seed

	Returns:
		GrayImage
	"""
	rng = make_rng(seed, index)
	data = smooth_field(size, rng) + rng.normal(0.0, noise_sigma, size=(size, size))
	if label == 1:
		data = data + periodic_artifact(size, amplitude)
	return GrayImage(np.clip(data, 0.0, 1.0))


def generate_fixture(
	out_dir, count, seed=0, size=256, amplitude=DEFAULT_AMPLITUDE, noise_sigma=DEFAULT_NOISE_SIGMA, progress=False
):
	"""
	Write a synthetic corpus and its manifest.

	Layout: out_dir/real/*.png, out_dir/fake/periodic/*.png, out_dir/manifest.csv.
	Real and fake images alternate by index; count // 2 images are fake.

	Returns:
		dict with the manifest path and counters
	"""
	out_dir = Path(out_dir)
	real_dir = out_dir / REAL_DIR
	fake_dir = out_dir / FAKE_DIR / FAKE_TAG
	try:
		real_dir.mkdir(parents=True, exist_ok=True)
		fake_dir.mkdir(parents=True, exist_ok=True)
	except OSError as e:
		raise IoError(f"Cannot create fixture directories under {out_dir}: {e}", path=str(out_dir)) from e

	n_fake = count // 2
	rows = []
	for index in tqdm(range(count), desc="fixture", unit="img", disable=not progress):
		label = index % 2
		image = synthesize(index, label, seed, size=size, amplitude=amplitude, noise_sigma=noise_sigma)
		target = (fake_dir if label else real_dir) / f"img_{index:06d}.png"
		save_image(image, target)
		rows.append(ManifestRow(target, label, FAKE_TAG if label else REAL_DIR))

	manifest = out_dir / MANIFEST_NAME
	write_manifest(rows, manifest)

	result = {"manifest": str(manifest), "real": count - n_fake, "fake": n_fake}
	logger("fixtures").info(f"Fixture written: {result}")
	return result
