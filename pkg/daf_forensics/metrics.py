# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Detection metrics: accuracy at a threshold, ROC AUC, ROC points and the
per-generator evaluation report.

Labels are 0 for real and 1 for fake; a score at or above the threshold
counts as fake.
"""

import json

import numpy as np
from scipy.stats import rankdata

from daf_forensics.errors import EmptyInput, LengthMismatch, SingleClass

DEFAULT_THRESHOLD = 0.5


def _as_arrays(scores, labels):
	scores = np.asarray(scores, dtype=np.float64).ravel()
	labels = np.asarray(labels).astype(np.int64).ravel()
	if len(scores) != len(labels):
		raise LengthMismatch(f"{len(scores)} scores but {len(labels)} labels")
	if len(scores) == 0:
		raise EmptyInput("No scores to evaluate")
	return scores, labels


def accuracy(scores, labels, threshold=DEFAULT_THRESHOLD):
	"""Fraction of samples where (score >= threshold) equals the label"""
	scores, labels = _as_arrays(scores, labels)
	return float(np.mean((scores >= threshold).astype(np.int64) == labels))


def auc(scores, labels):
	"""
	Area under the ROC curve as the Mann-Whitney statistic.

	Ties between a positive and a negative are credited 0.5. Computed from
	midranks; the result equals the brute-force pair count.

	Args:
		scores: Fake scores
		labels: 0/1 labels

	Returns:
		float in [0, 1]
	"""
	scores, labels = _as_arrays(scores, labels)
	n_pos = int(labels.sum())
	n_neg = len(labels) - n_pos
	if n_pos == 0 or n_neg == 0:
		raise SingleClass("AUC needs both real and fake samples")

	# Twice the midranks are integers, so the pair count below is exact
	doubled_ranks = np.rint(2.0 * rankdata(scores, method="average")).astype(np.int64)
	doubled_u = int(doubled_ranks[labels == 1].sum()) - n_pos * (n_pos + 1)
	return doubled_u / (2.0 * n_pos * n_neg)


def roc_points(scores, labels):
	"""
	ROC curve as (fpr, tpr) points from (0, 0) to (1, 1).

	Thresholds sweep the distinct scores from high to low, so a group of
	tied scores spanning both classes produces one diagonal step.

	Returns:
		list of (fpr, tpr) tuples
	"""
	scores, labels = _as_arrays(scores, labels)
	n_pos = int(labels.sum())
	n_neg = len(labels) - n_pos
	if n_pos == 0 or n_neg == 0:
		raise SingleClass("ROC needs both real and fake samples")

	order = np.argsort(-scores, kind="stable")
	sorted_scores = scores[order]
	sorted_labels = labels[order]

	# last index of every run of equal scores
	ends = np.flatnonzero(np.r_[sorted_scores[1:] != sorted_scores[:-1], True])
	true_pos = np.cumsum(sorted_labels)[ends]
	false_pos = (ends + 1) - true_pos

	points = [(0.0, 0.0)]
	points.extend((fp / n_neg, tp / n_pos) for fp, tp in zip(false_pos, true_pos))
	return points


def trapezoid_area(points):
	"""Area under a polyline of (x, y) points"""
	xs = np.array([p[0] for p in points])
	ys = np.array([p[1] for p in points])
	return float(np.sum((xs[1:] - xs[:-1]) * (ys[1:] + ys[:-1]) / 2.0))


class EvalReport:
	"""
	Overall and per-generator ACC/AUC of one scored corpus.

	A group holding only fakes is scored for AUC against every real sample
	of the corpus; a group holding only reals has no AUC.
	"""

	def __init__(self, overall, groups, threshold):
		self.overall = overall
		self.groups = groups
		self.threshold = threshold

	@classmethod
	def build(cls, scores, labels, tags=None, threshold=DEFAULT_THRESHOLD):
		scores, labels = _as_arrays(scores, labels)
		tags = ["" for _ in scores] if tags is None else [tag or "" for tag in tags]
		if len(tags) != len(scores):
			raise LengthMismatch(f"{len(scores)} scores but {len(tags)} tags")

		overall = _group_stats(scores, labels, threshold)
		if overall["auc"] is None:
			raise SingleClass("Evaluation needs both real and fake samples")

		tag_array = np.array(tags, dtype=object)
		reals = labels == 0
		groups = {}
		for tag in sorted(set(tags)):
			members = tag_array == tag
			stats = _group_stats(scores[members], labels[members], threshold)
			if stats["auc"] is None and stats["fake"] and reals.any():
				paired = members | reals
				stats["auc"] = auc(scores[paired], labels[paired])
				stats["auc_vs"] = "all_real"
			groups[tag] = stats

		return cls(overall, groups, threshold)

	def as_dict(self):
		return {"overall": self.overall, "groups": self.groups, "threshold": self.threshold}

	def to_json(self, indent=2):
		return json.dumps(self.as_dict(), indent=indent, sort_keys=True)

	def to_table(self):
		header = f"{'group':<24} {'n':>7} {'real':>7} {'fake':>7} {'acc':>8} {'auc':>8}"
		lines = [header, "-" * len(header)]
		rows = [("overall", self.overall)] + [(tag or "(untagged)", stats) for tag, stats in self.groups.items()]
		for name, stats in rows:
			auc_text = "-" if stats["auc"] is None else f"{stats['auc']:.4f}"
			lines.append(
				f"{name:<24} {stats['n']:>7} {stats['real']:>7} {stats['fake']:>7} "
				f"{stats['acc']:>8.4f} {auc_text:>8}"
			)
		lines.append(f"threshold = {self.threshold}")
		return "\n".join(lines)


def _group_stats(scores, labels, threshold):
	n_fake = int(labels.sum())
	n_real = len(labels) - n_fake
	return {
		"n": len(labels),
		"real": n_real,
		"fake": n_fake,
		"acc": accuracy(scores, labels, threshold),
		"auc": auc(scores, labels) if n_fake and n_real else None,
	}
