# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Dataset manifests: CSV files with the header "path,label,tag".

label is 0 for real and 1 for fake, tag names the generator (optional).
Relative paths are resolved against the directory holding the manifest.
"""

import csv
from pathlib import Path

from daf_forensics.errors import FormatError, IoError

HEADER = ["path", "label", "tag"]
IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")

REAL_DIR = "real"
FAKE_DIR = "fake"


class ManifestRow:
	def __init__(self, path, label, tag=""):
		self.path = str(path)
		self.label = int(label)
		self.tag = tag or ""

	def __eq__(self, other):
		return isinstance(other, ManifestRow) and (self.path, self.label, self.tag) == (
			other.path,
			other.label,
			other.tag,
		)

	def __repr__(self):
		return f"ManifestRow({self.path!r}, {self.label}, {self.tag!r})"


def read_manifest(path):
	"""
	Read a manifest.

	Args:
		path: CSV file

	Returns:
		list of ManifestRow with resolved paths
	"""
	path = Path(path)
	try:
		with open(path, newline="", encoding="utf-8") as f:
			reader = csv.reader(f)
			header = next(reader, None)
			lines = list(enumerate(reader, start=2))
	except OSError as e:
		raise IoError(f"Cannot read manifest {path}: {e}", path=str(path)) from e

	if header is None or [h.strip() for h in header[:2]] != HEADER[:2]:
		raise FormatError(f"{path}: manifest must start with the header 'path,label,tag'")

	rows = []
	for line_no, fields in lines:
		if not fields or not "".join(fields).strip():
			continue
		if len(fields) < 2:
			raise FormatError(f"{path}:{line_no}: expected path,label[,tag]")
		label = fields[1].strip()
		if label not in ("0", "1"):
			raise FormatError(f"{path}:{line_no}: label must be 0 or 1, got '{label}'")
		image_path = Path(fields[0].strip())
		if not image_path.is_absolute():
			image_path = path.parent / image_path
		tag = fields[2].strip() if len(fields) > 2 else ""
		rows.append(ManifestRow(image_path, int(label), tag))

	return rows


def write_manifest(rows, path):
	"""Write rows to a manifest, storing paths relative to its directory when possible"""
	path = Path(path)
	base = path.parent.resolve()
	try:
		with open(path, "w", newline="", encoding="utf-8") as f:
			writer = csv.writer(f, lineterminator="\n")
			writer.writerow(HEADER)
			for row in rows:
				image_path = Path(row.path)
				try:
					image_path = image_path.resolve().relative_to(base)
				except ValueError:
					pass
				writer.writerow([image_path.as_posix(), row.label, row.tag])
	except OSError as e:
		raise IoError(f"Cannot write manifest {path}: {e}", path=str(path)) from e


def _images_under(directory):
	return sorted(p for p in directory.rglob("*") if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)


def manifest_from_dirs(root):
	"""
	Build manifest rows from a "real/" and "fake/<generator>/" directory tree.

	Images directly under fake/ get the tag "fake".

	Args:
		root: Directory containing real/ and fake/

	Returns:
		list of ManifestRow
	"""
	root = Path(root)
	real_dir = root / REAL_DIR
	fake_dir = root / FAKE_DIR
	if not real_dir.is_dir() and not fake_dir.is_dir():
		raise IoError(f"{root} has neither a '{REAL_DIR}' nor a '{FAKE_DIR}' directory", path=str(root))

	rows = []
	if real_dir.is_dir():
		rows.extend(ManifestRow(p, 0, REAL_DIR) for p in _images_under(real_dir))
	if fake_dir.is_dir():
		for p in _images_under(fake_dir):
			relative = p.relative_to(fake_dir)
			tag = relative.parts[0] if len(relative.parts) > 1 else FAKE_DIR
			rows.append(ManifestRow(p, 1, tag))
	return rows
