# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Exception hierarchy shared by the library and the command line.

Every error raised on purpose derives from DAFError, so the CLI can map it to
exit code 1 and print a single readable line.
"""


class DAFError(Exception):
	"""Base class for all daf_forensics errors"""

	exit_code = 1

	def __init__(self, message, **context):
		self.message = message
		self.context = context
		super().__init__(self.message)


class IoError(DAFError):
	"""A file is missing, unreadable or unwritable"""

	def __init__(self, message, path=None):
		super().__init__(message, path=path)
		self.path = path


class DecodeError(DAFError):
	"""An image file exists but cannot be decoded as PNG or JPEG"""

	def __init__(self, message, path=None):
		super().__init__(message, path=path)
		self.path = path


class InvalidSpec(DAFError):
	"""A perturbation or augmentation spec is out of range"""


class GeometryError(DAFError):
	"""Image, patch, cell or window sizes do not tile each other"""


class EmptyData(DAFError):
	"""A learner was given no training rows"""


class TooFewSamples(DAFError):
	"""Fewer training rows than cross-fitting folds"""


class DimensionMismatch(DAFError):
	"""Feature row length does not match what a model was trained on"""

	def __init__(self, message, expected=None, found=None):
		super().__init__(message, expected=expected, found=found)
		self.expected = expected
		self.found = found


class InvalidCount(DAFError):
	"""A sample size larger than the population was requested"""


class IndexOutOfRange(DAFError):
	"""A row index points outside the training set or cache"""


class EmptyValidation(DAFError):
	"""Component selection was asked to score forests on zero rows"""


class ConfigError(DAFError):
	"""Invalid run configuration or training data that cannot satisfy it"""


class EmptyInput(DAFError):
	"""A metric was given no scores"""


class LengthMismatch(DAFError):
	"""Scores and labels differ in length"""


class SingleClass(DAFError):
	"""A ranking metric needs both classes present"""


class FormatError(DAFError):
	"""A model, cache or manifest file is malformed, truncated or fails its checksum"""


class VersionError(DAFError):
	"""A model file was written by an unknown format version"""

	def __init__(self, message, found=None, supported=None):
		super().__init__(message, found=found, supported=supported)
		self.found = found
		self.supported = supported
