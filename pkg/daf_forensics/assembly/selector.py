# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Layer-level component selection.

For every layer the forests of all candidate cascades at that layer form a
pool. Each forest is scored on the validation rows and the best A random and
best B completely-random forests make up the assembled layer, which keeps
the scale of a single cascade.
"""

import numpy as np

from daf_forensics.errors import DimensionMismatch, EmptyValidation
from daf_forensics.forest.cascade import CascadeLayer, DeepForestModel
from daf_forensics.forest.trees import ForestKind
from daf_forensics.metrics import accuracy

# Upstream class vectors for candidate layer l come from the assembled layers 0..l-1
CONDITION_ASSEMBLED = "assembled"
# ... or from the candidate's own layers 0..l-1
CONDITION_OWN = "own"
CONDITIONINGS = (CONDITION_ASSEMBLED, CONDITION_OWN)


class PoolEntry:
	"""One forest of the selection pool with its validation accuracy"""

	def __init__(self, candidate, position, forest, accuracy):
		self.candidate = candidate
		self.position = position
		self.forest = forest
		self.accuracy = accuracy

	@property
	def kind(self):
		return self.forest.kind

	def rank_key(self):
		return (-self.accuracy, self.candidate, self.position)

	def __repr__(self):
		return f"PoolEntry(candidate={self.candidate}, position={self.position}, kind={self.kind}, acc={self.accuracy:.4f})"


def _check_candidates(candidates, layer):
	if not candidates:
		raise ValueError("At least one candidate model is required")
	base_dim = candidates[0].base_dim
	shape = candidates[0].shape
	for model in candidates:
		if model.base_dim != base_dim:
			raise DimensionMismatch(
				f"Candidates disagree on base dimension ({base_dim} vs {model.base_dim})",
				expected=base_dim,
				found=model.base_dim,
			)
		if model.shape != shape:
			raise ValueError(f"Candidates disagree on cascade shape ({shape} vs {model.shape})")
	if layer >= shape[0]:
		raise ValueError(f"Layer {layer} does not exist in a {shape[0]}-layer cascade")


def score_pool(candidates, layer, X_val, y_val, assembled_prefix=None, conditioning=CONDITION_ASSEMBLED):
	"""
	Validation accuracy of every forest at `layer` of every candidate.

	Args:
		candidates: List of DeepForestModel sharing base_dim and shape
		layer: 0-based layer index
		X_val: Base feature rows of the validation subset
		y_val: Validation labels
		assembled_prefix: DeepForestModel with the already assembled layers
			0..layer-1 (used with CONDITION_ASSEMBLED)
		conditioning: CONDITION_ASSEMBLED or CONDITION_OWN

	Returns:
		list of PoolEntry in (candidate, position) order
	"""
	if len(y_val) == 0:
		raise EmptyValidation("Cannot score forests on an empty validation subset")
	if conditioning not in CONDITIONINGS:
		raise ValueError(f"Unknown selection conditioning '{conditioning}'")
	_check_candidates(candidates, layer)

	shared_input = None
	if conditioning == CONDITION_ASSEMBLED:
		if layer == 0:
			shared_input = np.asarray(X_val, dtype=np.float64)
		else:
			if assembled_prefix is None or assembled_prefix.n_layers < layer:
				raise ValueError(f"Selecting layer {layer} needs the assembled layers before it")
			shared_input = assembled_prefix.layer_input(X_val, layer)

	entries = []
	for c, model in enumerate(candidates):
		layer_in = shared_input if shared_input is not None else model.layer_input(X_val, layer)
		for position, forest in enumerate(model.layers[layer].forests):
			score = accuracy(forest.predict_proba(layer_in)[:, 1], y_val)
			entries.append(PoolEntry(c, position, forest, score))

	return entries


def select_components(
	candidates, layer, X_val, y_val, assembled_prefix=None, conditioning=CONDITION_ASSEMBLED, pool=None
):
	"""
	Best A random and best B completely-random forests of a layer pool.

	Ties on accuracy go to the lower candidate index, then the lower forest
	position. Selected forests keep their (candidate, position) order inside
	each kind, so a single candidate is reproduced exactly.

	Args:
		candidates: List of DeepForestModel
		layer: 0-based layer index
		X_val: Base feature rows of the validation subset
		y_val: Validation labels
		assembled_prefix: Already assembled layers (see score_pool)
		conditioning: CONDITION_ASSEMBLED or CONDITION_OWN
		pool: Optional list that receives the scored PoolEntry objects

	Returns:
		CascadeLayer whose forests carry their val_accuracy
	"""
	entries = score_pool(candidates, layer, X_val, y_val, assembled_prefix, conditioning)
	if pool is not None:
		pool.extend(entries)

	_, n_random, n_completely_random = candidates[0].shape
	chosen = []
	for kind, count in ((ForestKind.RANDOM, n_random), (ForestKind.COMPLETELY_RANDOM, n_completely_random)):
		ranked = sorted((e for e in entries if e.kind == kind), key=PoolEntry.rank_key)
		winners = sorted(ranked[:count], key=lambda e: (e.candidate, e.position))
		chosen.extend(e.forest.with_val_accuracy(e.accuracy) for e in winners)

	return CascadeLayer(chosen)


def assemble(candidates, X_val, y_val, conditioning=CONDITION_ASSEMBLED, config=None, pools=None):
	"""
	Assemble one cascade from several, layer by layer.

	Layer l is selected with the assembled layers 0..l-1 feeding the
	candidates' layer-l forests. A single candidate with no validation rows
	is returned as is.

	Args:
		candidates: Non-empty list of DeepForestModel
		X_val: Base feature rows of the validation subset
		y_val: Validation labels
		conditioning: CONDITION_ASSEMBLED or CONDITION_OWN
		config: Snapshot stored on the result (defaults to the first candidate's)
		pools: Optional list that receives one list of PoolEntry per layer

	Returns:
		DeepForestModel with the shape of one candidate
	"""
	if not candidates:
		raise ValueError("At least one candidate model is required")
	if len(candidates) == 1 and len(y_val) == 0:
		return candidates[0]

	first = candidates[0]
	config = first.config if config is None else config
	assembled = DeepForestModel([], first.base_dim, config)

	for layer in range(first.n_layers):
		pool = [] if pools is not None else None
		selected = select_components(candidates, layer, X_val, y_val, assembled, conditioning, pool=pool)
		assembled = DeepForestModel(assembled.layers + [selected], first.base_dim, config)
		if pools is not None:
			pools.append(pool)

	return assembled
