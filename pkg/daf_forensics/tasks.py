# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Batch jobs behind the command line: feature extraction, training, scoring,
evaluation and last-layer export.

Per-image failures are logged and collected, never abort the batch; every job
returns a summary dict with counters and the list of failed paths.
"""

import csv
import json
import tempfile
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from daf_forensics.assembly.sources import CacheSource
from daf_forensics.assembly.trainer import TrainingHooks, peak_residency, run_daf
from daf_forensics.config import RunConfig
from daf_forensics.errors import DAFError, DimensionMismatch
from daf_forensics.features.patches import band_energy, extract
from daf_forensics.imaging.augment import augment
from daf_forensics.imaging.degrade import perturb
from daf_forensics.imaging.loader import load_image
from daf_forensics.manifest import read_manifest
from daf_forensics.metrics import EvalReport
from daf_forensics.store.feature_cache import MAGIC as CACHE_MAGIC
from daf_forensics.store.feature_cache import CacheWriter, manifest_digest
from daf_forensics.utils import derive_seed, get_traceback, log_error, logger

# Rows scored at once when predicting
SCORE_CHUNK = 64

# derive_seed purpose key for per-row augmentation
SEED_AUGMENT = 7


def _load(path, cfg, perturb_spec=None, augment_seed=None):
	image = load_image(path, cfg.input_size)
	if perturb_spec is not None:
		image = perturb(image, perturb_spec)
	if augment_seed is not None and cfg.augment.enabled:
		image = augment(image, cfg.augment, rng_seed=augment_seed)
	return image


def _features(path, cfg, perturb_spec=None, augment_seed=None):
	"""(feature vector, None) or (None, error text) for one image"""
	try:
		return extract(_load(path, cfg, perturb_spec, augment_seed), cfg.patch), None
	except DAFError as e:
		return None, f"{type(e).__name__}: {e.message}"
	except Exception as e:
		return None, f"{type(e).__name__}: {e}\n{get_traceback()}"


def iter_features(paths, cfg, perturb_spec=None, augment_seeds=None, progress=False, desc="extract"):
	"""
	Feature vectors of images, in input order.

	Images are processed in parallel with cfg.n_jobs workers.

	Yields:
		(path, vector or None, error text or None)
	"""
	paths = [str(p) for p in paths]
	seeds = augment_seeds or [None] * len(paths)
	if cfg.n_jobs == 1:
		results = (_features(p, cfg, perturb_spec, s) for p, s in zip(paths, seeds))
	else:
		results = Parallel(n_jobs=cfg.n_jobs, return_as="generator")(
			delayed(_features)(p, cfg, perturb_spec, s) for p, s in zip(paths, seeds)
		)

	for path, (vector, error) in zip(paths, tqdm(results, total=len(paths), desc=desc, unit="img", disable=not progress)):
		yield path, vector, error


def _record_failure(result, path, error, title):
	log_error(title=title, message=f"{path}: {error}")
	result["failed"] += 1
	result["errors"].append({"path": path, "error": error.splitlines()[0]})


def extract_manifest(manifest_path, cfg, out_cache, augment_rows=False, progress=False):
	"""
	Extract the features of every manifest row into a cache file.

	Args:
		manifest_path: Manifest CSV
		cfg: RunConfig
		out_cache: Cache file to write
		augment_rows: Apply cfg.augment with a per-row seed
		progress: Show a progress bar

	Returns:
		dict with "total", "extracted", "failed", "errors", "dim"
	"""
	rows = read_manifest(manifest_path)
	seeds = [derive_seed(cfg.train.seed, i, SEED_AUGMENT) for i in range(len(rows))] if augment_rows else None
	result = {"total": len(rows), "extracted": 0, "failed": 0, "errors": [], "dim": cfg.feature_dim}

	with CacheWriter(out_cache, cfg.feature_dim, manifest_digest(manifest_path)) as writer:
		features = iter_features([r.path for r in rows], cfg, augment_seeds=seeds, progress=progress)
		for row, (path, vector, error) in zip(rows, features):
			if error:
				_record_failure(result, path, error, "Feature extraction error")
				continue
			writer.append(vector, row.label)
			result["extracted"] += 1

	logger().info(f"Extraction finished: {json.dumps({k: v for k, v in result.items() if k != 'errors'})}")
	return result


def is_cache(path):
	try:
		with open(path, "rb") as f:
			return f.read(len(CACHE_MAGIC)) == CACHE_MAGIC
	except OSError:
		return False


def train(data_path, cfg, hooks=None, progress=False):
	"""
	Train a detector from a feature cache or a manifest.

	A manifest is first extracted into a temporary cache (with augmentation
	when cfg.augment.enabled), so training always reads rows on demand.

	Returns:
		(DeepForestModel, summary dict)
	"""
	hooks = hooks or TrainingHooks()
	summary = {"extraction": None}

	if is_cache(data_path):
		model = _train_from_cache(data_path, cfg, hooks)
	else:
		with tempfile.TemporaryDirectory(prefix="daf-") as tmp:
			cache = Path(tmp) / "train.dafc"
			summary["extraction"] = extract_manifest(
				data_path, cfg, cache, augment_rows=cfg.augment.enabled, progress=progress
			)
			model = _train_from_cache(cache, cfg, hooks)

	last = hooks.rounds[-1] if hooks.rounds else {}
	summary.update(
		{
			"rounds": len(hooks.rounds),
			"final_val_accuracy": last.get("assembled"),
			"stop": last.get("stop"),
			"peak_residency": peak_residency(hooks),
		}
	)
	return model, summary


def _train_from_cache(path, cfg, hooks):
	source = CacheSource(path)
	if source.dim != cfg.feature_dim:
		raise DimensionMismatch(
			f"Cache holds {source.dim}-dimensional rows but the config produces {cfg.feature_dim}",
			expected=cfg.feature_dim,
			found=source.dim,
		)
	return run_daf(source, cfg.train, hooks=hooks, snapshot=cfg.snapshot())


def config_for_model(model, cfg=None):
	"""
	Feature settings to use with a model.

	An explicit config must produce the model's input dimension; without one
	the model's own snapshot is used.
	"""
	cfg = cfg or RunConfig.from_snapshot(model.config)
	if cfg.feature_dim != model.base_dim:
		raise DimensionMismatch(
			f"Model expects {model.base_dim} features but the config produces {cfg.feature_dim}",
			expected=model.base_dim,
			found=cfg.feature_dim,
		)
	return cfg


def score_paths(model, paths, cfg, perturb_spec=None, progress=False):
	"""
	Fake scores of image files, in input order.

	Returns:
		dict with "scores" (None for failed files), "scored", "failed", "errors"
	"""
	result = {"scores": [], "scored": 0, "failed": 0, "errors": []}
	pending = []

	def flush():
		if pending:
			scores = model.predict_score(np.vstack([vector for _, vector in pending]))
			for (slot, _), score in zip(pending, np.atleast_1d(scores)):
				result["scores"][slot] = float(score)
			pending.clear()

	for path, vector, error in iter_features(paths, cfg, perturb_spec, progress=progress, desc="score"):
		result["scores"].append(None)
		if error:
			_record_failure(result, path, error, "Scoring error")
			continue
		pending.append((len(result["scores"]) - 1, vector))
		result["scored"] += 1
		if len(pending) >= SCORE_CHUNK:
			flush()
	flush()

	return result


def evaluate_manifest(model, manifest_path, cfg, perturb_spec=None, threshold=0.5, progress=False):
	"""
	Score every manifest row and build an EvalReport over the scored rows.

	Returns:
		(EvalReport, scoring summary dict)
	"""
	rows = read_manifest(manifest_path)
	result = score_paths(model, [r.path for r in rows], cfg, perturb_spec, progress=progress)
	kept = [(row, score) for row, score in zip(rows, result["scores"]) if score is not None]

	report = EvalReport.build(
		[score for _, score in kept],
		[row.label for row, _ in kept],
		[row.tag for row, _ in kept],
		threshold=threshold,
	)
	return report, result


def dump_last_layer(model, manifest_path, cfg, out_csv, progress=False):
	"""
	Write the last-layer class vectors of every manifest row as CSV
	"path,label,tag,f0,f1,..." for external visualization.

	Returns:
		dict with "written", "failed", "errors"
	"""
	rows = read_manifest(manifest_path)
	result = {"written": 0, "failed": 0, "errors": []}
	width = 2 * len(model.layers[-1])

	with open(out_csv, "w", newline="", encoding="utf-8") as f:
		writer = csv.writer(f, lineterminator="\n")
		writer.writerow(["path", "label", "tag"] + [f"f{i}" for i in range(width)])
		features = iter_features([r.path for r in rows], cfg, progress=progress, desc="dump")
		for row, (path, vector, error) in zip(rows, features):
			if error:
				_record_failure(result, path, error, "Last-layer export error")
				continue
			values = model.last_layer_features(vector)
			writer.writerow([row.path, row.label, row.tag] + [repr(float(v)) for v in values])
			result["written"] += 1

	return result


def high_band_energy(manifest_path, cfg, perturb_spec=None):
	"""Mean highest-band LFS value over the images of a manifest"""
	rows = read_manifest(manifest_path)
	energies = [band_energy(_load(row.path, cfg, perturb_spec), cfg.patch) for row in rows]
	return float(np.mean(energies))
