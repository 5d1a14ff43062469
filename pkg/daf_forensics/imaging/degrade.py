# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Robustness perturbations: Gaussian blur and JPEG re-compression.

Perturbations are applied to the normalized raster, after resizing.
"""

import io
import math

import numpy as np
from PIL import Image
from scipy import ndimage

from daf_forensics.errors import InvalidSpec
from daf_forensics.imaging.loader import GrayImage


class PerturbSpec:
	"""One degradation to apply before feature extraction"""

	BLUR = "blur"
	JPEG = "jpeg"

	def __init__(self, kind, blur_sigma=None, jpeg_quality=None):
		self.kind = kind
		self.blur_sigma = blur_sigma
		self.jpeg_quality = jpeg_quality

	@classmethod
	def blur(cls, sigma):
		return cls(cls.BLUR, blur_sigma=float(sigma))

	@classmethod
	def jpeg(cls, quality):
		return cls(cls.JPEG, jpeg_quality=int(quality))

	@classmethod
	def parse(cls, text):
		"""
		Parse "blur:SIGMA" or "jpeg:QUALITY".

		Args:
			text: Spec string from the command line

		Returns:
			PerturbSpec (validated)
		"""
		kind, sep, value = (text or "").partition(":")
		kind = kind.strip().lower()
		if not sep or not value.strip():
			raise InvalidSpec(f"Perturbation must look like blur:SIGMA or jpeg:QUALITY, got '{text}'")

		try:
			if kind == cls.BLUR:
				spec = cls.blur(float(value))
			elif kind == cls.JPEG:
				spec = cls.jpeg(int(value))
			else:
				raise InvalidSpec(f"Unknown perturbation kind '{kind}'")
		except ValueError:
			raise InvalidSpec(f"Bad perturbation value in '{text}'")

		spec.validate()
		return spec

	def validate(self):
		if self.kind == self.BLUR:
			if self.jpeg_quality is not None:
				raise InvalidSpec("A blur spec cannot also set jpeg_quality")
			if self.blur_sigma is None or not self.blur_sigma > 0 or not math.isfinite(self.blur_sigma):
				raise InvalidSpec(f"Blur sigma must be positive, got {self.blur_sigma}")
		elif self.kind == self.JPEG:
			if self.blur_sigma is not None:
				raise InvalidSpec("A jpeg spec cannot also set blur_sigma")
			if self.jpeg_quality is None or not 1 <= self.jpeg_quality <= 100:
				raise InvalidSpec(f"JPEG quality must be in [1, 100], got {self.jpeg_quality}")
		else:
			raise InvalidSpec(f"Unknown perturbation kind '{self.kind}'")

	def __str__(self):
		if self.kind == self.BLUR:
			return f"blur:{self.blur_sigma:g}"
		return f"jpeg:{self.jpeg_quality}"


def gaussian_kernel(sigma):
	"""Discrete Gaussian of radius ceil(3 sigma), normalized to sum 1"""
	radius = math.ceil(3 * sigma)
	offsets = np.arange(-radius, radius + 1, dtype=np.float64)
	kernel = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
	return kernel / kernel.sum()


def gaussian_blur(data, sigma):
	"""Separable Gaussian blur with reflect-padded borders"""
	kernel = gaussian_kernel(sigma)
	blurred = ndimage.convolve1d(data, kernel, axis=0, mode="reflect")
	return ndimage.convolve1d(blurred, kernel, axis=1, mode="reflect")


def jpeg_roundtrip(data, quality):
	"""
	Re-encode a [0, 1] raster as baseline JPEG at the given quality and decode it.

	Pillow's encoder scales the standard quantization tables by quality.
	"""
	pixels = np.clip(np.rint(data * 255.0), 0, 255).astype(np.uint8)
	buffer = io.BytesIO()
	Image.fromarray(pixels).save(buffer, format="JPEG", quality=int(quality), optimize=False, progressive=False)
	buffer.seek(0)
	with Image.open(buffer) as decoded:
		return np.asarray(decoded.convert("L"), dtype=np.float64) / 255.0


def perturb(img, spec, rng_seed=0):
	"""
	Apply a blur or JPEG perturbation to a GrayImage.

	Args:
		img: GrayImage
		spec: PerturbSpec
		rng_seed: Accepted for a uniform signature; both perturbations are deterministic

	Returns:
		GrayImage of the same dimensions
	"""
	spec.validate()

	if spec.kind == PerturbSpec.BLUR:
		data = gaussian_blur(img.data, spec.blur_sigma)
	else:
		data = jpeg_roundtrip(img.data, spec.jpeg_quality)

	return GrayImage(np.clip(data, 0.0, 1.0))
