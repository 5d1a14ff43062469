# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Small shared helpers: the package logger, error logging and seed derivation.
"""

import logging
import traceback

import numpy as np

LOGGER_NAME = "daf_forensics"


def logger(name=None):
	"""
	Get the package logger (or a child of it).

	Args:
		name: Optional child name, e.g. "assembly"

	Returns:
		logging.Logger
	"""
	if name:
		return logging.getLogger(f"{LOGGER_NAME}.{name}")
	return logging.getLogger(LOGGER_NAME)


def get_traceback():
	"""Formatted traceback of the exception currently being handled"""
	return traceback.format_exc()


def log_error(title, message):
	"""
	Record a handled failure without interrupting the caller.

	Args:
		title: Short summary, e.g. "Feature extraction error"
		message: Details, usually including get_traceback()
	"""
	logger().error(f"{title}: {message}")


def derive_seed(master_seed, *keys):
	"""
	Derive a reproducible 32-bit seed from a master seed and integer keys.

	The same (master_seed, keys) always yields the same seed, independent of
	call order or thread scheduling.

	Args:
		master_seed: Non-negative integer
		*keys: Non-negative integers naming the consumer (round, slot, tree, ...)

	Returns:
		int
	"""
	sequence = np.random.SeedSequence([int(master_seed), *(int(k) for k in keys)])
	return int(sequence.generate_state(1, dtype=np.uint32)[0])


def make_rng(master_seed, *keys):
	"""numpy Generator seeded from derive_seed(master_seed, *keys)"""
	return np.random.default_rng(derive_seed(master_seed, *keys))
