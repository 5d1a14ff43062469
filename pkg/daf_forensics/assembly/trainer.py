# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Dynamic assembly training loop.

Round 0 trains v cascades on weighted batches, updating the sample weights
after each one on a probe subset b_ws, and assembles them on a validation
subset b_val. Every later round keeps the previous assembled model as the
first candidate and trains v - 1 new cascades. The loop stops after
max_rounds + 1 rounds or once an assembled model improves on its
predecessor by less than early_stop_delta, and returns the best model seen.

Only the rows of one batch, one probe subset or one validation subset are
held in memory at any time.
"""

import math
from contextlib import contextmanager, nullcontext

import numpy as np

from daf_forensics.assembly.sampling import SampleWeights, update_weights, weighted_sample
from daf_forensics.assembly.selector import CONDITION_ASSEMBLED, CONDITIONINGS, assemble
from daf_forensics.errors import ConfigError
from daf_forensics.features.patches import PatchConfig
from daf_forensics.forest.cascade import fit_cascade
from daf_forensics.forest.trees import ForestParams
from daf_forensics.metrics import accuracy
from daf_forensics.utils import derive_seed, logger

# Seed purposes, the last key of derive_seed(seed, round, slot, purpose)
SEED_BATCH = 0
SEED_CASCADE = 1
SEED_PROBE = 2
SEED_VALIDATION = 3

STOP_NO_IMPROVEMENT = "no_improvement"
STOP_MAX_ROUNDS = "max_rounds"
STOP_NO_VALIDATION = "no_validation"

WS_CAP_MAX = 1000
WS_CAP_FRACTION = 0.02


def _round_half_up(value):
	return int(math.floor(value + 0.5))


class TrainConfig:
	"""Hyperparameters of one dynamic assembly run"""

	def __init__(
		self,
		sampling_ratio=0.1,
		candidates=3,
		layers=3,
		random_forests=2,
		completely_random_forests=2,
		max_rounds=10,
		weight_factor=1.5,
		early_stop_delta=0.005,
		val_fraction=0.05,
		ws_cap=None,
		folds=3,
		cross_fit=True,
		selection_conditioning=CONDITION_ASSEMBLED,
		forest_params=None,
		patch=None,
		seed=0,
		n_jobs=1,
	):
		self.sampling_ratio = float(sampling_ratio)
		self.candidates = int(candidates)
		self.layers = int(layers)
		self.random_forests = int(random_forests)
		self.completely_random_forests = int(completely_random_forests)
		self.max_rounds = int(max_rounds)
		self.weight_factor = float(weight_factor)
		self.early_stop_delta = float(early_stop_delta)
		self.val_fraction = float(val_fraction)
		# None means min(1000, 2% of the training set)
		self.ws_cap = None if ws_cap is None else int(ws_cap)
		self.folds = int(folds)
		self.cross_fit = bool(cross_fit)
		self.selection_conditioning = selection_conditioning
		self.forest_params = forest_params or ForestParams()
		self.patch = patch or PatchConfig()
		self.seed = int(seed)
		self.n_jobs = int(n_jobs)

	def batch_size(self, n):
		return max(1, _round_half_up(self.sampling_ratio * n))

	def val_size(self, n):
		if self.val_fraction == 0:
			return 0
		return max(1, _round_half_up(self.val_fraction * n))

	def ws_size(self, n):
		if self.ws_cap is not None:
			return self.ws_cap
		return min(WS_CAP_MAX, max(1, _round_half_up(WS_CAP_FRACTION * n)))

	def validate(self, n=None):
		"""
		Check ranges, and with n the constraints that depend on the data size.

		Raises:
			ConfigError
		"""
		if not 0 < self.sampling_ratio <= 1:
			raise ConfigError(f"sampling_ratio must be in (0, 1], got {self.sampling_ratio}")
		if self.candidates < 1:
			raise ConfigError(f"candidates must be >= 1, got {self.candidates}")
		if self.layers < 1:
			raise ConfigError(f"layers must be >= 1, got {self.layers}")
		if self.random_forests < 0 or self.completely_random_forests < 0:
			raise ConfigError("Forest counts per layer cannot be negative")
		if self.random_forests + self.completely_random_forests < 1:
			raise ConfigError("A layer needs at least one forest")
		if self.max_rounds < 0:
			raise ConfigError(f"max_rounds must be >= 0, got {self.max_rounds}")
		if self.weight_factor <= 1:
			raise ConfigError(f"weight_factor must be > 1, got {self.weight_factor}")
		if self.early_stop_delta < 0:
			raise ConfigError(f"early_stop_delta must be >= 0, got {self.early_stop_delta}")
		if not 0 <= self.val_fraction < 1:
			raise ConfigError(f"val_fraction must be in [0, 1), got {self.val_fraction}")
		if self.ws_cap is not None and self.ws_cap < 0:
			raise ConfigError(f"ws_cap must be >= 0, got {self.ws_cap}")
		if self.folds < 2:
			raise ConfigError(f"folds must be >= 2, got {self.folds}")
		if self.selection_conditioning not in CONDITIONINGS:
			raise ConfigError(f"selection_conditioning must be one of {', '.join(CONDITIONINGS)}")
		if self.n_jobs == 0:
			raise ConfigError("n_jobs cannot be 0")
		if self.candidates * self.sampling_ratio + self.val_fraction > 1 + 1e-9:
			raise ConfigError(
				f"candidates * sampling_ratio + val_fraction must be <= 1 "
				f"({self.candidates} * {self.sampling_ratio} + {self.val_fraction})"
			)
		if self.candidates > 1 and self.val_fraction == 0:
			raise ConfigError("Assembling several candidates needs val_fraction > 0")
		self.forest_params.validate()

		if n is not None and self.cross_fit and self.batch_size(n) < self.folds:
			raise ConfigError(
				f"Batches of {self.batch_size(n)} rows are smaller than the {self.folds} cross-fitting folds"
			)
		# the validation subset is drawn from rows no batch of the round can reach
		if n is not None and self.candidates * self.batch_size(n) + self.val_size(n) > n:
			raise ConfigError(
				f"{self.candidates} batches of {self.batch_size(n)} rows and {self.val_size(n)} "
				f"validation rows do not fit in {n} training rows"
			)

	def as_dict(self):
		return {
			"sampling_ratio": self.sampling_ratio,
			"candidates": self.candidates,
			"layers": self.layers,
			"random_forests": self.random_forests,
			"completely_random_forests": self.completely_random_forests,
			"max_rounds": self.max_rounds,
			"weight_factor": self.weight_factor,
			"early_stop_delta": self.early_stop_delta,
			"val_fraction": self.val_fraction,
			"ws_cap": self.ws_cap,
			"folds": self.folds,
			"cross_fit": self.cross_fit,
			"selection_conditioning": self.selection_conditioning,
			"forest": self.forest_params.as_dict(),
			"patch": self.patch.as_dict(),
			"seed": self.seed,
		}


class ResidencyMeter:
	"""Counts feature rows currently loaded and the peak of that count"""

	def __init__(self):
		self.current = 0
		self.peak = 0

	@contextmanager
	def hold(self, rows):
		self.current += rows
		self.peak = max(self.peak, self.current)
		try:
			yield
		finally:
			self.current -= rows


class TrainingHooks:
	"""
	Observers of a training run.

	Args:
		measure_residency: Count resident feature rows
		record_indices: Keep the batch / probe / validation indices of every round
		on_round: Optional callable receiving each round record
	"""

	def __init__(self, measure_residency=True, record_indices=False, on_round=None):
		self.meter = ResidencyMeter() if measure_residency else None
		self.record_indices = record_indices
		self.on_round = on_round
		self.rounds = []
		self.log_lines = []
		self.audit = []

	def resident(self, rows):
		if self.meter is None:
			return nullcontext()
		return self.meter.hold(rows)

	def record(self, **indices):
		if self.record_indices:
			self.audit.append({key: np.asarray(value).copy() for key, value in indices.items()})

	def round_finished(self, record):
		self.rounds.append(record)
		line = format_round(record)
		self.log_lines.append(line)
		logger("assembly").info(line)
		if self.on_round:
			self.on_round(record)


def format_round(record):
	candidates = ", ".join("-" if acc is None else f"{acc:.4f}" for acc in record["candidates"])
	assembled = "-" if record["assembled"] is None else f"{record['assembled']:.4f}"
	return f"round {record['round']}: candidates [{candidates}] assembled {assembled} stop {record['stop'] or '-'}"


def peak_residency(hooks):
	"""Peak number of feature rows held at once, or "unmeasured" """
	if hooks is None or hooks.meter is None:
		return "unmeasured"
	return hooks.meter.peak


def _score(model, X, y):
	return accuracy(model.predict_score(X), y)


def run_daf(source, cfg, hooks=None, snapshot=None):
	"""
	Train a detector with dynamic assembly.

	Args:
		source: InMemorySource or CacheSource
		cfg: TrainConfig
		hooks: Optional TrainingHooks
		snapshot: Configuration dict stored on every model (defaults to cfg.as_dict())

	Returns:
		DeepForestModel, the best assembled model seen
	"""
	hooks = hooks or TrainingHooks(measure_residency=False)
	n = len(source)
	labels = np.asarray(source.labels)
	if n == 0 or len(np.unique(labels)) < 2:
		raise ConfigError("Training data has a single class: both classes required")
	cfg.validate(n)
	snapshot = cfg.as_dict() if snapshot is None else snapshot

	k = cfg.batch_size(n)
	weights = SampleWeights.uniform(n)
	previous = None
	best = None
	all_rows = np.arange(n)

	for round_index in range(cfg.max_rounds + 1):
		candidates = [] if previous is None else [previous]
		used = np.zeros(n, dtype=bool)
		batches = []

		for slot in range(len(candidates), cfg.candidates):
			batch = weighted_sample(weights, k, derive_seed(cfg.seed, round_index, slot, SEED_BATCH))
			used[batch] = True
			batches.append(batch)

			with hooks.resident(len(batch)):
				X, y = source.rows(batch)
				model = fit_cascade(
					X,
					y,
					layers=cfg.layers,
					n_random=cfg.random_forests,
					n_completely_random=cfg.completely_random_forests,
					params=cfg.forest_params,
					folds=cfg.folds,
					rng_seed=derive_seed(cfg.seed, round_index, slot, SEED_CASCADE),
					cross_fit=cfg.cross_fit,
					n_jobs=cfg.n_jobs,
					config=snapshot,
				)
				del X, y
			candidates.append(model)

			outside = np.setdiff1d(all_rows, batch, assume_unique=True)
			probe_size = min(cfg.ws_size(n), len(outside))
			probe = np.sort(
				np.random.default_rng(derive_seed(cfg.seed, round_index, slot, SEED_PROBE)).choice(
					outside, size=probe_size, replace=False
				)
			)
			hooks.record(round=round_index, slot=slot, batch=batch, probe=probe)
			if probe_size:
				with hooks.resident(probe_size):
					X_ws, y_ws = source.rows(probe)
					predicted = (model.predict_score(X_ws) >= 0.5).astype(np.int64)
					weights = update_weights(weights, predicted, y_ws, probe, cfg.weight_factor)

		unused = np.flatnonzero(~used)
		val_size = min(cfg.val_size(n), len(unused))
		validation = np.sort(
			np.random.default_rng(derive_seed(cfg.seed, round_index, 0, SEED_VALIDATION)).choice(
				unused, size=val_size, replace=False
			)
		)
		hooks.record(round=round_index, validation=validation, batches=np.concatenate(batches or [np.empty(0, int)]))

		record = {
			"round": round_index,
			"batch_size": k,
			"val_size": val_size,
			"candidates": [],
			"assembled": None,
			"best": None,
			"previous": None,
			"stop": None,
		}

		with hooks.resident(val_size):
			X_val, y_val = source.rows(validation)
			assembled = assemble(candidates, X_val, y_val, cfg.selection_conditioning, config=snapshot)

			if val_size:
				record["candidates"] = [_score(model, X_val, y_val) for model in candidates]
				record["assembled"] = _score(assembled, X_val, y_val)
				best_accuracy = _score(best, X_val, y_val) if best is not None else -1.0
				if record["assembled"] >= best_accuracy:
					best = assembled
				record["best"] = max(record["assembled"], best_accuracy)
			else:
				record["candidates"] = [None for _ in candidates]
				best = assembled
			del X_val, y_val

		if previous is not None:
			if val_size == 0:
				record["stop"] = STOP_NO_VALIDATION
			else:
				record["previous"] = record["candidates"][0]
				if record["assembled"] - record["previous"] < cfg.early_stop_delta:
					record["stop"] = STOP_NO_IMPROVEMENT
		if record["stop"] is None and round_index == cfg.max_rounds:
			record["stop"] = STOP_MAX_ROUNDS

		hooks.round_finished(record)
		previous = assembled
		if record["stop"]:
			break

	return best
