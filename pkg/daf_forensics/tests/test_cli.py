# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

import csv
import io
import json
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import numpy as np

from daf_forensics import tasks
from daf_forensics.cli import main
from daf_forensics.config import load_config
from daf_forensics.fixtures import synthesize
from daf_forensics.imaging.degrade import PerturbSpec
from daf_forensics.manifest import ManifestRow, read_manifest, write_manifest
from daf_forensics.metrics import accuracy, auc
from daf_forensics.store import load_model, read_header
from daf_forensics.tests.helpers import SMALL_CONFIG, SMALL_FEATURE_DIM

FIXTURE_COUNT = 40


def run_cli(*argv):
	out, err = io.StringIO(), io.StringIO()
	with redirect_stdout(out), redirect_stderr(err):
		code = main([str(arg) for arg in argv])
	return code, out.getvalue(), err.getvalue()


class TestCommandLine(unittest.TestCase):
	@classmethod
	def setUpClass(cls):
		cls.tmp = tempfile.TemporaryDirectory()
		cls.dir = Path(cls.tmp.name)
		cls.config = cls.dir / "small.conf"
		cls.config.write_text(SMALL_CONFIG)

		cls.fixture = cls.dir / "fixture"
		code, _, _ = run_cli("fixture", cls.fixture, "--count", FIXTURE_COUNT, "--size", 32, "--seed", 5)
		assert code == 0
		cls.manifest = cls.fixture / "manifest.csv"

		cls.cache = cls.dir / "train.dafc"
		code, _, _ = run_cli("extract", cls.manifest, cls.cache, "--config", cls.config)
		assert code == 0

		cls.model = cls.dir / "model.daf"
		code, _, _ = run_cli("train", cls.cache, cls.model, "--config", cls.config)
		assert code == 0

	@classmethod
	def tearDownClass(cls):
		cls.tmp.cleanup()

	def test_fixture_layout(self):
		rows = read_manifest(self.manifest)
		self.assertEqual(len(rows), FIXTURE_COUNT)
		self.assertEqual(sum(row.label for row in rows), FIXTURE_COUNT // 2)
		self.assertEqual(len(list((self.fixture / "real").glob("*.png"))), FIXTURE_COUNT // 2)
		self.assertEqual(len(list((self.fixture / "fake" / "periodic").glob("*.png"))), FIXTURE_COUNT // 2)
		self.assertEqual({row.tag for row in rows}, {"real", "periodic"})

	def test_fixture_is_deterministic(self):
		again = self.dir / "fixture-again"
		code, _, _ = run_cli("fixture", again, "--count", 4, "--size", 32, "--seed", 5)
		self.assertEqual(code, 0)
		for name in ("real/img_000000.png", "fake/periodic/img_000001.png"):
			self.assertEqual((again / name).read_bytes(), (self.fixture / name).read_bytes())

	def test_zero_amplitude_makes_classes_identical(self):
		real = synthesize(3, 0, seed=1, size=32, amplitude=0.0)
		fake = synthesize(3, 1, seed=1, size=32, amplitude=0.0)
		self.assertTrue(np.array_equal(real.data, fake.data))
		self.assertFalse(np.array_equal(real.data, synthesize(3, 1, seed=1, size=32).data))

	def test_extract_writes_every_row(self):
		header = read_header(self.cache)
		self.assertEqual((header.n, header.dim), (FIXTURE_COUNT, SMALL_FEATURE_DIM))

		again = self.dir / "again.dafc"
		code, out, _ = run_cli("extract", self.manifest, again, "--config", self.config)
		self.assertEqual(code, 0)
		self.assertIn(f"extracted {FIXTURE_COUNT}/{FIXTURE_COUNT}", out)
		self.assertEqual(again.read_bytes(), self.cache.read_bytes())

	def test_extract_reports_missing_images(self):
		rows = read_manifest(self.manifest)[:4]
		missing = self.dir / "nowhere" / "gone.png"
		rows.append(ManifestRow(missing, 1, "periodic"))
		manifest = self.dir / "with-missing.csv"
		write_manifest(rows, manifest)

		out_cache = self.dir / "partial.dafc"
		code, _, err = run_cli("extract", manifest, out_cache, "--config", self.config)
		self.assertEqual(code, 1)
		self.assertIn("gone.png", err)
		self.assertEqual(read_header(out_cache).n, 4)

	def test_train_outputs(self):
		self.assertTrue(self.model.exists())
		log = Path(f"{self.model}.log").read_text()
		self.assertTrue(log.startswith("round 0:"))
		self.assertIn("final:", log)
		self.assertEqual(load_config(Path(f"{self.model}.conf")).values, load_config(self.config).values)

		second = self.dir / "model-again.daf"
		code, _, _ = run_cli("train", self.cache, second, "--config", self.config)
		self.assertEqual(code, 0)
		self.assertEqual(second.read_bytes(), self.model.read_bytes())

	def test_train_from_manifest(self):
		out_model = self.dir / "from-manifest.daf"
		log = self.dir / "from-manifest.log"
		code, _, _ = run_cli("train", self.manifest, out_model, "--config", self.config, "--log", log)
		self.assertEqual(code, 0)
		self.assertEqual(out_model.read_bytes(), self.model.read_bytes())
		self.assertTrue(log.exists())

	def test_train_needs_both_classes(self):
		reals = [row for row in read_manifest(self.manifest) if row.label == 0]
		manifest = self.dir / "reals.csv"
		write_manifest(reals, manifest)
		code, _, err = run_cli("train", manifest, self.dir / "never.daf", "--config", self.config)
		self.assertEqual(code, 1)
		self.assertIn("both classes required", err)

	def test_predict(self):
		paths = [row.path for row in read_manifest(self.manifest)[:3]]
		code, out, _ = run_cli("predict", self.model, *paths)
		self.assertEqual(code, 0)
		lines = out.strip().splitlines()
		self.assertEqual([line.split("\t")[0] for line in lines], paths)
		for line in lines:
			self.assertTrue(0.0 <= float(line.split("\t")[1]) <= 1.0)

	def test_predict_with_mismatched_features(self):
		path = read_manifest(self.manifest)[0].path
		code, _, err = run_cli("predict", self.model, path, "--config", self.config, "--set", "grid=2")
		self.assertEqual(code, 1)
		self.assertIn("DimensionMismatch", err)

	def test_eval_matches_metrics(self):
		report_path = self.dir / "report.json"
		code, out, _ = run_cli("eval", self.model, self.manifest, "--json", report_path)
		self.assertEqual(code, 0)
		self.assertIn("overall", out)
		report = json.loads(report_path.read_text())

		model = load_model(self.model)
		rows = read_manifest(self.manifest)
		scores = tasks.score_paths(model, [row.path for row in rows], tasks.config_for_model(model))["scores"]
		labels = [row.label for row in rows]
		self.assertAlmostEqual(report["overall"]["acc"], accuracy(scores, labels))
		self.assertAlmostEqual(report["overall"]["auc"], auc(scores, labels))
		self.assertEqual(report["overall"]["n"], FIXTURE_COUNT)
		self.assertEqual(set(report["groups"]), {"real", "periodic"})

	def test_eval_perturbations(self):
		for spec in ("jpeg:65", "jpeg:30", "blur:1"):
			code, out, _ = run_cli("eval", self.model, self.manifest, "--perturb", spec)
			self.assertEqual(code, 0)
			self.assertIn(f"perturbation: {spec}", out)

		code, _, _ = run_cli("eval", self.model, self.manifest, "--perturb", "blur:0")
		self.assertEqual(code, 2)

	def test_inspect(self):
		code, out, _ = run_cli("inspect", self.model)
		self.assertEqual(code, 0)
		summary = json.loads(out)
		self.assertEqual(summary["layers"], 2)
		self.assertEqual(summary["base_dim"], SMALL_FEATURE_DIM)
		self.assertEqual(summary["forests_per_layer"], [2, 2])
		self.assertEqual(summary["config"]["grid"], 4)

	def test_dump_last_layer(self):
		out_csv = self.dir / "last.csv"
		code, _, _ = run_cli("inspect", self.model, "--dump-last-layer", self.manifest, "--out", out_csv)
		self.assertEqual(code, 0)
		with open(out_csv, newline="") as f:
			rows = list(csv.reader(f))
		self.assertEqual(rows[0], ["path", "label", "tag", "f0", "f1", "f2", "f3"])
		self.assertEqual(len(rows), FIXTURE_COUNT + 1)
		for row in rows[1:]:
			values = [float(v) for v in row[3:]]
			self.assertAlmostEqual(values[0] + values[1], 1.0)
			self.assertAlmostEqual(values[2] + values[3], 1.0)

	def test_corrupt_model(self):
		corrupt = self.dir / "corrupt.daf"
		data = bytearray(self.model.read_bytes())
		data[0:4] = b"XXXX"
		corrupt.write_bytes(bytes(data))
		code, _, err = run_cli("inspect", corrupt)
		self.assertEqual(code, 1)
		self.assertIn("FormatError", err)

	def test_manifest_from_dirs(self):
		out_manifest = self.dir / "rebuilt.csv"
		code, _, _ = run_cli("manifest-from-dirs", self.fixture, out_manifest)
		self.assertEqual(code, 0)
		def keyed(rows):
			return sorted((str(Path(r.path).resolve()), r.label, r.tag) for r in rows)

		self.assertEqual(keyed(read_manifest(out_manifest)), keyed(read_manifest(self.manifest)))

	def test_blur_lowers_high_band_energy(self):
		cfg = load_config(self.config)
		blurred = tasks.high_band_energy(self.manifest, cfg, PerturbSpec.blur(3.0))
		self.assertLess(blurred, tasks.high_band_energy(self.manifest, cfg))

	def test_usage_errors(self):
		self.assertEqual(run_cli()[0], 2)
		self.assertEqual(run_cli("fixture", self.dir / "x", "--count", 0)[0], 2)
		self.assertEqual(run_cli("train", self.cache, self.dir / "m.daf", "--set", "no_such_key=1")[0], 1)


if __name__ == "__main__":
	unittest.main()
