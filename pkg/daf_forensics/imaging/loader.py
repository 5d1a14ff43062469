# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Image decoding and normalization.

Every image entering the feature pipeline is a square grayscale raster of the
configured input size with intensities in [0, 1].
"""

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from daf_forensics.errors import DecodeError, IoError

SUPPORTED_FORMATS = ("PNG", "JPEG")

# ITU-R BT.601 luma weights
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


class GrayImage:
	"""Square grayscale raster, row-major, intensities in [0, 1]"""

	def __init__(self, data):
		data = np.asarray(data, dtype=np.float64)
		if data.ndim != 2:
			raise ValueError(f"GrayImage needs a 2-D array, got shape {data.shape}")
		self.data = data

	@property
	def height(self):
		return self.data.shape[0]

	@property
	def width(self):
		return self.data.shape[1]

	@property
	def size(self):
		return self.data.shape[0]

	def copy(self):
		return GrayImage(self.data.copy())

	def __eq__(self, other):
		return isinstance(other, GrayImage) and np.array_equal(self.data, other.data)

	def __repr__(self):
		return f"GrayImage({self.width}x{self.height})"


def resize_bilinear(data, size):
	"""
	Bilinear resize of a 2-D array to size x size.

	Output pixel centres are mapped onto input pixel centres, so shrinking a
	2x2 image to 1x1 averages all four pixels. Samples outside the image use
	the nearest edge value.

	Args:
		data: 2-D float array
		size: Output side in pixels

	Returns:
		np.ndarray of shape (size, size)
	"""
	height, width = data.shape
	if height == size and width == size:
		return data.astype(np.float64, copy=True)

	rows = (np.arange(size) + 0.5) * (height / size) - 0.5
	cols = (np.arange(size) + 0.5) * (width / size) - 0.5
	rows = np.clip(rows, 0, height - 1)
	cols = np.clip(cols, 0, width - 1)
	grid_rows, grid_cols = np.meshgrid(rows, cols, indexing="ij")

	return ndimage.map_coordinates(
		data.astype(np.float64), [grid_rows, grid_cols], order=1, mode="nearest"
	)


def to_grayscale(rgb):
	"""Luminance of an (H, W, 3) array in [0, 255], scaled to [0, 1]"""
	return (rgb.astype(np.float64) @ LUMA_WEIGHTS) / 255.0


def decode_image(path):
	"""
	Decode a PNG or JPEG file into an (H, W, 3) float array in [0, 255].

	Args:
		path: File path

	Returns:
		np.ndarray
	"""
	try:
		with open(path, "rb") as handle:
			with Image.open(handle) as image:
				if image.format not in SUPPORTED_FORMATS:
					raise DecodeError(f"Unsupported image format {image.format} in {path}", path=str(path))
				image.load()
				rgb = np.asarray(image.convert("RGB"), dtype=np.float64)
	except DecodeError:
		raise
	except (FileNotFoundError, IsADirectoryError, PermissionError) as e:
		raise IoError(f"Cannot read image {path}: {e}", path=str(path))
	except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as e:
		raise DecodeError(f"Cannot decode image {path}: {e}", path=str(path))

	return rgb


def load_image(path, size=256):
	"""
	Load an image file as a normalized GrayImage.

	The file is decoded, converted to grayscale with luminance weights
	0.299/0.587/0.114, bilinearly resized to size x size and scaled to [0, 1].

	Args:
		path: PNG or JPEG file
		size: Output side in pixels

	Returns:
		GrayImage
	"""
	gray = to_grayscale(decode_image(path))
	data = resize_bilinear(gray, size)
	return GrayImage(np.clip(data, 0.0, 1.0))


def save_image(image, path):
	"""
	Write a GrayImage as an 8-bit grayscale PNG.

	Args:
		image: GrayImage or 2-D array in [0, 1]
		path: Output file
	"""
	data = image.data if isinstance(image, GrayImage) else np.asarray(image)
	pixels = np.clip(np.rint(data * 255.0), 0, 255).astype(np.uint8)
	try:
		Image.fromarray(pixels).save(path, format="PNG")
	except OSError as e:
		raise IoError(f"Cannot write image {path}: {e}", path=str(path))
