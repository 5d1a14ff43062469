# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Model files.

	magic      4 bytes   b"DAF1"
	version    u16
	length     u64       payload size in bytes
	payload    length bytes
	checksum   u32       CRC-32 of the payload

Payload (little-endian):

	config     u32 size + UTF-8 JSON (sorted keys, compact separators)
	base_dim   u32
	layers     u16 count, then per layer:
	  forests  u16 count, then per forest:
	    kind u8 (0 random, 1 completely random), val_accuracy f64 (NaN if unset),
	    n_trees u32, feature_dim u32, then per tree:
	      n_nodes u32, feature i32[n], threshold f64[n], left i32[n], right i32[n],
	      counts i64[n * 2]

Saving a loaded model reproduces the original bytes.
"""

import io
import json
import math
import struct
import zlib

import numpy as np

from daf_forensics.errors import FormatError, IoError, VersionError
from daf_forensics.forest.cascade import CascadeLayer, DeepForestModel, count_nodes
from daf_forensics.forest.forest import Forest
from daf_forensics.forest.trees import N_CLASSES, ForestKind, Tree

MAGIC = b"DAF1"
FORMAT_VERSION = 1
SUPPORTED_VERSIONS = (FORMAT_VERSION,)

PREAMBLE = struct.Struct("<4sHQ")
CHECKSUM = struct.Struct("<I")
FOREST_HEADER = struct.Struct("<BdII")

_ARRAYS = (
	("feature", np.dtype("<i4"), 1),
	("threshold", np.dtype("<f8"), 1),
	("left", np.dtype("<i4"), 1),
	("right", np.dtype("<i4"), 1),
	("counts", np.dtype("<i8"), N_CLASSES),
)


def _config_json(config):
	return json.dumps(config, sort_keys=True, separators=(",", ":")).encode("utf-8")


def model_to_bytes(model):
	"""Serialized model file contents"""
	out = io.BytesIO()

	config = _config_json(model.config)
	out.write(struct.pack("<I", len(config)))
	out.write(config)
	out.write(struct.pack("<I", model.base_dim))
	out.write(struct.pack("<H", model.n_layers))

	for layer in model.layers:
		out.write(struct.pack("<H", len(layer.forests)))
		for forest in layer.forests:
			val = math.nan if forest.val_accuracy is None else float(forest.val_accuracy)
			out.write(
				FOREST_HEADER.pack(ForestKind.CODES[forest.kind], val, forest.n_trees, forest.feature_dim)
			)
			for tree in forest.trees:
				out.write(struct.pack("<I", tree.n_nodes))
				for name, dtype, _ in _ARRAYS:
					out.write(np.ascontiguousarray(getattr(tree, name), dtype=dtype).tobytes())

	payload = out.getvalue()
	return PREAMBLE.pack(MAGIC, FORMAT_VERSION, len(payload)) + payload + CHECKSUM.pack(zlib.crc32(payload))


class _Reader:
	def __init__(self, data):
		self.data = data
		self.offset = 0

	def unpack(self, fmt):
		if isinstance(fmt, str):
			fmt = struct.Struct(fmt)
		values = fmt.unpack_from(self.data, self.offset)
		self.offset += fmt.size
		return values

	def array(self, dtype, count):
		size = dtype.itemsize * count
		if self.offset + size > len(self.data):
			raise FormatError("Model payload ends inside a tree")
		values = np.frombuffer(self.data, dtype=dtype, count=count, offset=self.offset)
		self.offset += size
		return values.astype(dtype.newbyteorder("="))

	def raw(self, size):
		chunk = self.data[self.offset : self.offset + size]
		if len(chunk) != size:
			raise FormatError("Model payload ends early")
		self.offset += size
		return chunk


def model_from_bytes(data):
	"""
	Parse model file contents.

	Raises:
		FormatError: bad magic, truncated file, checksum or payload errors
		VersionError: unknown format version
	"""
	if len(data) < PREAMBLE.size:
		raise FormatError("File is too short to be a model")
	magic, version, length = PREAMBLE.unpack_from(data, 0)
	if magic != MAGIC:
		raise FormatError(f"Not a model file (magic {magic!r})")
	if version not in SUPPORTED_VERSIONS:
		raise VersionError(
			f"Model format version {version} is not supported (supported: {', '.join(map(str, SUPPORTED_VERSIONS))})",
			found=version,
			supported=SUPPORTED_VERSIONS,
		)
	if len(data) != PREAMBLE.size + length + CHECKSUM.size:
		raise FormatError("Model file is truncated or has trailing bytes")

	payload = data[PREAMBLE.size : PREAMBLE.size + length]
	(stored,) = CHECKSUM.unpack_from(data, PREAMBLE.size + length)
	if zlib.crc32(payload) != stored:
		raise FormatError("Model checksum mismatch")

	try:
		return _parse_payload(payload)
	except (struct.error, ValueError, KeyError, UnicodeDecodeError) as e:
		raise FormatError(f"Malformed model payload: {e}") from e


def _parse_payload(payload):
	reader = _Reader(payload)
	(config_size,) = reader.unpack("<I")
	config = json.loads(reader.raw(config_size).decode("utf-8"))
	(base_dim,) = reader.unpack("<I")
	(n_layers,) = reader.unpack("<H")

	layers = []
	for _ in range(n_layers):
		(n_forests,) = reader.unpack("<H")
		forests = []
		for _ in range(n_forests):
			code, val, n_trees, feature_dim = reader.unpack(FOREST_HEADER)
			trees = []
			for _ in range(n_trees):
				(n_nodes,) = reader.unpack("<I")
				arrays = {name: reader.array(dtype, n_nodes * width) for name, dtype, width in _ARRAYS}
				trees.append(Tree(feature_dim=feature_dim, **arrays))
			val_accuracy = None if math.isnan(val) else val
			forests.append(Forest(ForestKind.from_code(code), trees, feature_dim, val_accuracy))
		layers.append(CascadeLayer(forests))

	if reader.offset != len(payload):
		raise FormatError("Unexpected bytes after the last layer")
	return DeepForestModel(layers, base_dim, config)


def save_model(model, path):
	try:
		with open(path, "wb") as f:
			f.write(model_to_bytes(model))
	except OSError as e:
		raise IoError(f"Cannot write model {path}: {e}", path=str(path)) from e


def load_model(path):
	try:
		with open(path, "rb") as f:
			data = f.read()
	except OSError as e:
		raise IoError(f"Cannot read model {path}: {e}", path=str(path)) from e
	return model_from_bytes(data)


def model_summary(model):
	"""JSON-able description of a model for inspection"""
	nodes = count_nodes(model)
	return {
		"layers": model.n_layers,
		"base_dim": model.base_dim,
		"forests_per_layer": [len(layer) for layer in model.layers],
		"layer_details": [
			[
				{
					"kind": forest.kind,
					"n_trees": forest.n_trees,
					"feature_dim": forest.feature_dim,
					"val_accuracy": forest.val_accuracy,
					"nodes": n,
				}
				for forest, n in zip(layer.forests, layer_nodes)
			]
			for layer, layer_nodes in zip(model.layers, nodes["layers"])
		],
		"total_nodes": nodes["total"],
		"config": model.config,
	}
