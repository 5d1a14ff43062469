# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Feature cache files.

Layout (all integers little-endian):

	magic      4 bytes   b"DAFC"
	n          u64       row count
	d          u32       feature dimension
	digest     32 bytes  SHA-256 of the source manifest (zeros if none)
	rows       n * d     float32, row-major
	labels     n         uint8, 0 real / 1 fake

Rows sit at fixed offsets, so any subset is read without touching the rest
of the file. Labels come last so a writer can stream rows before it knows n.
"""

import hashlib
import os
import struct

import numpy as np

from daf_forensics.errors import FormatError, IndexOutOfRange, IoError

MAGIC = b"DAFC"
HEADER = struct.Struct("<4sQI32s")
ROW_DTYPE = np.dtype("<f4")
LABEL_DTYPE = np.dtype("u1")
EMPTY_DIGEST = bytes(32)


def manifest_digest(path):
	"""SHA-256 digest of a manifest file"""
	sha = hashlib.sha256()
	try:
		with open(path, "rb") as f:
			for chunk in iter(lambda: f.read(1 << 16), b""):
				sha.update(chunk)
	except OSError as e:
		raise IoError(f"Cannot read manifest {path}: {e}", path=str(path)) from e
	return sha.digest()


class CacheHeader:
	def __init__(self, n, dim, digest):
		self.n = n
		self.dim = dim
		self.digest = digest

	def rows_offset(self):
		return HEADER.size

	def labels_offset(self):
		return HEADER.size + self.n * self.dim * ROW_DTYPE.itemsize

	def file_size(self):
		return self.labels_offset() + self.n * LABEL_DTYPE.itemsize


class CacheWriter:
	"""
	Streaming cache writer.

	Usage:
		with CacheWriter(path, dim, digest) as writer:
			writer.append(row, label)

	An exception inside the block removes the file instead of finishing it.
	"""

	def __init__(self, path, dim, digest=EMPTY_DIGEST):
		if len(digest) != 32:
			raise ValueError("Manifest digest must be 32 bytes")
		self.path = str(path)
		self.dim = int(dim)
		self.digest = bytes(digest)
		self.labels = []
		try:
			self._file = open(self.path, "wb")
		except OSError as e:
			raise IoError(f"Cannot write cache {self.path}: {e}", path=self.path) from e
		self._file.write(HEADER.pack(MAGIC, 0, self.dim, self.digest))

	def append(self, row, label):
		row = np.asarray(row)
		if row.shape != (self.dim,):
			raise FormatError(f"Row of shape {row.shape} does not fit a cache of dimension {self.dim}")
		if label not in (0, 1):
			raise FormatError(f"Label must be 0 or 1, got {label}")
		self._file.write(row.astype(ROW_DTYPE).tobytes())
		self.labels.append(int(label))

	def close(self):
		if self._file.closed:
			return
		self._file.write(np.asarray(self.labels, dtype=LABEL_DTYPE).tobytes())
		self._file.seek(0)
		self._file.write(HEADER.pack(MAGIC, len(self.labels), self.dim, self.digest))
		self._file.close()

	def discard(self):
		"""Drop a partly written cache"""
		if not self._file.closed:
			self._file.close()
		try:
			os.unlink(self.path)
		except FileNotFoundError:
			pass

	def __enter__(self):
		return self

	def __exit__(self, exc_type, exc, tb):
		if exc_type is None:
			self.close()
		else:
			self.discard()


def write_cache(rows, labels, path, digest=EMPTY_DIGEST):
	"""
	Write a whole feature matrix to a cache file.

	Args:
		rows: Matrix of shape (n, d)
		labels: n labels in {0, 1}
		path: Output file
		digest: Source manifest digest
	"""
	rows = np.asarray(rows)
	if rows.ndim != 2 or rows.shape[0] != len(labels):
		raise FormatError(f"Cannot write {len(labels)} labels with rows of shape {rows.shape}")
	with CacheWriter(path, rows.shape[1], digest) as writer:
		for row, label in zip(rows, labels):
			writer.append(row, int(label))


def read_header(path):
	"""Header of a cache file, validated against the file size"""
	try:
		size = os.path.getsize(path)
		with open(path, "rb") as f:
			raw = f.read(HEADER.size)
	except OSError as e:
		raise IoError(f"Cannot read cache {path}: {e}", path=str(path)) from e

	if len(raw) < HEADER.size:
		raise FormatError(f"{path} is too short to be a feature cache")
	magic, n, dim, digest = HEADER.unpack(raw)
	if magic != MAGIC:
		raise FormatError(f"{path} is not a feature cache (magic {magic!r})")

	header = CacheHeader(n, dim, digest)
	if size != header.file_size():
		raise FormatError(f"{path} holds {size} bytes but its header describes {header.file_size()}")
	return header


def read_labels(path, header=None):
	header = header or read_header(path)
	labels = np.fromfile(path, dtype=LABEL_DTYPE, count=header.n, offset=header.labels_offset())
	if np.any(labels > 1):
		raise FormatError(f"{path} contains labels other than 0 and 1")
	return labels.astype(np.int64)


def read_cache(path, indices=None):
	"""
	Rows and labels of a cache, optionally only a subset.

	Only the requested rows are copied into memory.

	Args:
		path: Cache file
		indices: Optional row indices, returned in the given order

	Returns:
		(rows float64 array of shape (k, d), labels int array of length k)
	"""
	header = read_header(path)
	labels = read_labels(path, header)

	if indices is None:
		indices = np.arange(header.n)
	indices = np.asarray(indices, dtype=np.int64).ravel()
	outside = (indices < 0) | (indices >= header.n)
	if outside.any():
		raise IndexOutOfRange(f"Row {int(indices[outside][0])} is outside a cache of {header.n} rows")

	if header.n == 0 or len(indices) == 0:
		return np.empty((0, header.dim)), labels[indices]

	table = np.memmap(path, dtype=ROW_DTYPE, mode="r", offset=header.rows_offset(), shape=(header.n, header.dim))
	try:
		rows = np.array(table[indices], dtype=np.float64)
	finally:
		del table

	return rows, labels[indices]
