# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Optional training-time augmentation: horizontal flip, random crop, additive noise.

Each transform is drawn independently with its own probability, always in the
order flip, crop, noise, from a generator seeded by rng_seed.
"""

import numpy as np

from daf_forensics.errors import InvalidSpec
from daf_forensics.imaging.loader import GrayImage, resize_bilinear


class AugmentSpec:
	"""Probabilities and strengths of the three augmentations"""

	def __init__(
		self,
		enabled=False,
		flip_prob=0.5,
		crop_prob=0.5,
		noise_prob=0.5,
		crop_factor=0.875,
		noise_sigma=0.02,
	):
		self.enabled = bool(enabled)
		self.flip_prob = float(flip_prob)
		self.crop_prob = float(crop_prob)
		self.noise_prob = float(noise_prob)
		self.crop_factor = float(crop_factor)
		self.noise_sigma = float(noise_sigma)

	def validate(self):
		for name in ("flip_prob", "crop_prob", "noise_prob"):
			value = getattr(self, name)
			if not 0.0 <= value <= 1.0:
				raise InvalidSpec(f"{name} must be in [0, 1], got {value}")
		if not 0.0 < self.crop_factor <= 1.0:
			raise InvalidSpec(f"crop_factor must be in (0, 1], got {self.crop_factor}")
		if not self.noise_sigma >= 0.0:
			raise InvalidSpec(f"noise_sigma must be >= 0, got {self.noise_sigma}")

	def as_dict(self):
		return {
			"enabled": self.enabled,
			"flip_prob": self.flip_prob,
			"crop_prob": self.crop_prob,
			"noise_prob": self.noise_prob,
			"crop_factor": self.crop_factor,
			"noise_sigma": self.noise_sigma,
		}


def random_crop(data, crop_factor, rng):
	"""Uniformly placed square crop of side crop_factor * size, resized back"""
	size = data.shape[0]
	side = min(size, max(1, int(round(crop_factor * size))))
	top = int(rng.integers(0, size - side + 1))
	left = int(rng.integers(0, size - side + 1))
	return resize_bilinear(data[top : top + side, left : left + side], size)


def augment(img, spec, rng_seed=0):
	"""
	Randomly augment a GrayImage.

	Args:
		img: GrayImage
		spec: AugmentSpec; a disabled spec returns the input unchanged
		rng_seed: Seed for the transform draws

	Returns:
		GrayImage
	"""
	if not spec.enabled:
		return img

	spec.validate()
	rng = np.random.default_rng(rng_seed)
	data = img.data

	if rng.random() < spec.flip_prob:
		data = data[:, ::-1]

	if rng.random() < spec.crop_prob:
		data = random_crop(data, spec.crop_factor, rng)

	if rng.random() < spec.noise_prob:
		data = data + rng.normal(0.0, spec.noise_sigma, size=data.shape)

	return GrayImage(np.clip(data, 0.0, 1.0))
