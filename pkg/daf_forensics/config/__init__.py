# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Run configuration.

Settings live in flat "key = value" text files. The shipped default.conf is
read first, then an optional user file, then command-line overrides. Every
key must be one of the documented keys.
"""

from pathlib import Path

from daf_forensics.assembly.trainer import TrainConfig
from daf_forensics.errors import ConfigError, DAFError
from daf_forensics.features.patches import PatchConfig
from daf_forensics.forest.trees import ForestParams
from daf_forensics.imaging.augment import AugmentSpec

DEFAULT_CONFIG = Path(__file__).with_name("default.conf")

AUTO = "auto"


def _bool(text):
	lowered = text.strip().lower()
	if lowered in ("true", "yes", "on", "1"):
		return True
	if lowered in ("false", "no", "off", "0"):
		return False
	raise ValueError(f"expected true or false, got '{text}'")


def _auto_int(text):
	return None if text.strip().lower() == AUTO else int(text)


def _windows(text):
	windows = []
	for item in text.split(","):
		side, _, stride = item.strip().partition(":")
		windows.append((int(side), int(stride or side)))
	if not windows:
		raise ValueError("at least one window is required")
	return windows


def _choice(*options):
	def parse(text):
		value = text.strip()
		if value not in options:
			raise ValueError(f"expected one of {', '.join(options)}, got '{value}'")
		return value

	return parse


PARSERS = {
	"input_size": int,
	"grid": int,
	"hog_cell": int,
	"hog_bins": int,
	"windows": _windows,
	"freq_bands": int,
	"multiscale_mode": _choice(PatchConfig.AVERAGE, PatchConfig.RECALC),
	"sampling_ratio": float,
	"candidates": int,
	"layers": int,
	"random_forests": int,
	"completely_random_forests": int,
	"max_rounds": int,
	"weight_factor": float,
	"early_stop_delta": float,
	"val_fraction": float,
	"ws_cap": _auto_int,
	"folds": int,
	"cross_fit": _bool,
	"selection_conditioning": _choice("assembled", "own"),
	"n_trees": int,
	"max_depth": int,
	"min_samples_split": int,
	"bootstrap": _bool,
	"max_features": _auto_int,
	"seed": int,
	"n_jobs": int,
	"augment": _bool,
	"flip_prob": float,
	"crop_prob": float,
	"noise_prob": float,
	"crop_factor": float,
	"noise_sigma": float,
}


def parse_line(line, source="<config>", line_no=0):
	"""
	Parse one "key = value" line.

	Returns:
		(key, value) or None for blank and comment lines
	"""
	text = line.split("#", 1)[0].strip()
	if not text:
		return None

	key, sep, raw = text.partition("=")
	key = key.strip()
	if not sep:
		raise ConfigError(f"{source}:{line_no}: expected 'key = value', got '{line.strip()}'")
	if key not in PARSERS:
		raise ConfigError(f"{source}:{line_no}: unknown key '{key}'")
	try:
		return key, PARSERS[key](raw.strip())
	except ValueError as e:
		raise ConfigError(f"{source}:{line_no}: invalid value for '{key}': {e}") from e


def read_values(path):
	"""All key/value pairs of a config file"""
	try:
		lines = Path(path).read_text(encoding="utf-8").splitlines()
	except OSError as e:
		raise ConfigError(f"Cannot read config {path}: {e}") from e

	values = {}
	for line_no, line in enumerate(lines, start=1):
		parsed = parse_line(line, str(path), line_no)
		if parsed:
			values[parsed[0]] = parsed[1]
	return values


class RunConfig:
	"""Everything a command needs: training, feature and augmentation settings"""

	def __init__(self, values):
		self.values = dict(values)
		v = self.values

		self.input_size = v["input_size"]
		self.n_jobs = v["n_jobs"]
		self.patch = PatchConfig(
			grid=v["grid"],
			hog_cell=v["hog_cell"],
			hog_bins=v["hog_bins"],
			windows=v["windows"],
			q=v["freq_bands"],
			mode=v["multiscale_mode"],
		)
		self.forest = ForestParams(
			n_trees=v["n_trees"],
			max_depth=v["max_depth"],
			min_samples_split=v["min_samples_split"],
			bootstrap=v["bootstrap"],
			max_features=v["max_features"],
		)
		self.train = TrainConfig(
			sampling_ratio=v["sampling_ratio"],
			candidates=v["candidates"],
			layers=v["layers"],
			random_forests=v["random_forests"],
			completely_random_forests=v["completely_random_forests"],
			max_rounds=v["max_rounds"],
			weight_factor=v["weight_factor"],
			early_stop_delta=v["early_stop_delta"],
			val_fraction=v["val_fraction"],
			ws_cap=v["ws_cap"],
			folds=v["folds"],
			cross_fit=v["cross_fit"],
			selection_conditioning=v["selection_conditioning"],
			forest_params=self.forest,
			patch=self.patch,
			seed=v["seed"],
			n_jobs=v["n_jobs"],
		)
		self.augment = AugmentSpec(
			enabled=v["augment"],
			flip_prob=v["flip_prob"],
			crop_prob=v["crop_prob"],
			noise_prob=v["noise_prob"],
			crop_factor=v["crop_factor"],
			noise_sigma=v["noise_sigma"],
		)

	@property
	def feature_dim(self):
		return self.patch.feature_dim(self.input_size)

	def validate(self):
		if self.input_size < 1:
			raise ConfigError(f"input_size must be >= 1, got {self.input_size}")
		try:
			self.patch.validate(self.input_size)
			self.augment.validate()
		except DAFError as e:
			raise ConfigError(e.message) from e
		self.train.validate()

	def snapshot(self):
		"""JSON-able copy of every setting, stored inside trained models"""
		snapshot = dict(self.values)
		snapshot["windows"] = [list(w) for w in self.values["windows"]]
		return snapshot

	@classmethod
	def from_snapshot(cls, snapshot):
		"""Rebuild a RunConfig from a model's snapshot (missing keys take defaults)"""
		values = read_values(DEFAULT_CONFIG)
		for key, value in snapshot.items():
			if key in PARSERS:
				values[key] = [tuple(w) for w in value] if key == "windows" else value
		return cls(values)

	def to_text(self):
		lines = []
		for key in PARSERS:
			value = self.values[key]
			if key == "windows":
				value = ",".join(f"{m}:{s}" for m, s in value)
			elif value is None:
				value = AUTO
			elif isinstance(value, bool):
				value = str(value).lower()
			lines.append(f"{key} = {value}")
		return "\n".join(lines) + "\n"


def load_config(path=None, overrides=None):
	"""
	Load the run configuration.

	Args:
		path: Optional user config file applied over the defaults
		overrides: Optional list of "key=value" strings applied last

	Returns:
		RunConfig, validated

	Raises:
		ConfigError: unknown keys, malformed lines or invalid values
	"""
	values = read_values(DEFAULT_CONFIG)
	if path:
		values.update(read_values(path))
	for index, override in enumerate(overrides or [], start=1):
		parsed = parse_line(override, "--set", index)
		if parsed:
			values[parsed[0]] = parsed[1]

	config = RunConfig(values)
	config.validate()
	return config
