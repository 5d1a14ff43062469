# Copyright (c) 2026, DAF Forensics contributors
# For license information, please see license.txt

"""
Command line: daf <command> ...

Exit codes: 0 success, 1 runtime or data failure, 2 usage error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from daf_forensics import __version__, tasks
from daf_forensics.assembly.trainer import TrainingHooks
from daf_forensics.config import load_config
from daf_forensics.errors import DAFError, InvalidSpec
from daf_forensics.fixtures import DEFAULT_AMPLITUDE, generate_fixture
from daf_forensics.imaging.degrade import PerturbSpec
from daf_forensics.manifest import manifest_from_dirs, write_manifest
from daf_forensics.store.model_file import load_model, model_summary, save_model
from daf_forensics.utils import logger

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def perturb_arg(text):
	try:
		return PerturbSpec.parse(text)
	except InvalidSpec as e:
		raise argparse.ArgumentTypeError(e.message) from e


def positive_int(text):
	try:
		value = int(text)
	except ValueError as e:
		raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'") from e
	if value < 1:
		raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
	return value


def _run_config(args):
	return load_config(args.config, args.set)


def _explicit_config(args):
	"""Config given on the command line, or None to use the model's snapshot"""
	if args.config or args.set:
		return _run_config(args)
	return None


def _print_failures(result):
	for failure in result["errors"]:
		print(f"failed: {failure['path']}: {failure['error']}", file=sys.stderr)


def cmd_extract(args):
	cfg = _run_config(args)
	result = tasks.extract_manifest(args.manifest, cfg, args.out_cache, augment_rows=args.augment, progress=True)
	_print_failures(result)
	print(f"extracted {result['extracted']}/{result['total']} rows of dimension {result['dim']} into {args.out_cache}")
	return EXIT_OK if result["failed"] == 0 else EXIT_FAILURE


def cmd_train(args):
	cfg = _run_config(args)
	hooks = TrainingHooks()
	model, summary = tasks.train(args.data, cfg, hooks=hooks, progress=True)

	extraction = summary["extraction"]
	if extraction:
		_print_failures(extraction)

	save_model(model, args.out_model)
	log_path = Path(args.log or f"{args.out_model}.log")
	lines = list(hooks.log_lines)
	lines.append(
		f"final: val_accuracy {summary['final_val_accuracy']} stop {summary['stop']} "
		f"peak_residency {summary['peak_residency']}"
	)
	log_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
	Path(f"{args.out_model}.conf").write_text(cfg.to_text(), encoding="utf-8")

	accuracy = summary["final_val_accuracy"]
	accuracy_text = "n/a" if accuracy is None else f"{accuracy:.4f}"
	print(f"model written to {args.out_model}")
	print(f"final b_val accuracy {accuracy_text}, stop reason {summary['stop']}, {summary['rounds']} round(s)")
	return EXIT_OK


def cmd_predict(args):
	model = load_model(args.model)
	cfg = tasks.config_for_model(model, _explicit_config(args))
	result = tasks.score_paths(model, args.inputs, cfg)
	for path, score in zip(args.inputs, result["scores"]):
		if score is not None:
			print(f"{path}\t{score:.6f}")
	_print_failures(result)
	return EXIT_OK if result["failed"] == 0 else EXIT_FAILURE


def cmd_eval(args):
	model = load_model(args.model)
	cfg = tasks.config_for_model(model, _explicit_config(args))
	report, result = tasks.evaluate_manifest(
		model, args.manifest, cfg, perturb_spec=args.perturb, threshold=args.threshold, progress=True
	)
	_print_failures(result)

	if args.perturb is not None:
		print(f"perturbation: {args.perturb}")
	print(report.to_table())
	if args.json:
		Path(args.json).write_text(report.to_json() + "\n", encoding="utf-8")
	return EXIT_OK if result["failed"] == 0 else EXIT_FAILURE


def cmd_fixture(args):
	result = generate_fixture(
		args.out_dir, args.count, seed=args.seed, size=args.size, amplitude=args.amplitude, progress=True
	)
	print(f"{result['real']} real + {result['fake']} fake images, manifest {result['manifest']}")
	return EXIT_OK


def cmd_inspect(args):
	model = load_model(args.model)
	print(json.dumps(model_summary(model), indent=2, sort_keys=True))

	if args.dump_last_layer:
		cfg = tasks.config_for_model(model, _explicit_config(args))
		out = args.out or "last_layer.csv"
		result = tasks.dump_last_layer(model, args.dump_last_layer, cfg, out)
		_print_failures(result)
		print(f"{result['written']} row(s) written to {out}", file=sys.stderr)
		return EXIT_OK if result["failed"] == 0 else EXIT_FAILURE
	return EXIT_OK


def cmd_manifest_from_dirs(args):
	rows = manifest_from_dirs(args.root)
	write_manifest(rows, args.out_manifest)
	print(f"{len(rows)} row(s) written to {args.out_manifest}")
	return EXIT_OK


def _add_config_options(parser):
	parser.add_argument("--config", help="Run configuration file (key = value)")
	parser.add_argument(
		"--set", action="append", default=[], metavar="KEY=VALUE", help="Override one configuration key"
	)


def build_parser():
	parser = argparse.ArgumentParser(prog="daf", description="Dynamic assembly forest detector for generated images")
	parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
	verbosity = parser.add_mutually_exclusive_group()
	verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
	verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
	commands = parser.add_subparsers(dest="command", required=True, metavar="command")

	p = commands.add_parser("extract", help="Extract features of a manifest into a cache")
	p.add_argument("manifest")
	p.add_argument("out_cache")
	p.add_argument("--augment", action="store_true", help="Apply the configured augmentation")
	_add_config_options(p)
	p.set_defaults(handler=cmd_extract)

	p = commands.add_parser("train", help="Train a detector from a cache or manifest")
	p.add_argument("data", help="Feature cache or manifest CSV")
	p.add_argument("out_model")
	p.add_argument("--log", help="Training log file (default: OUT_MODEL.log)")
	_add_config_options(p)
	p.set_defaults(handler=cmd_train)

	p = commands.add_parser("predict", help="Score image files")
	p.add_argument("model")
	p.add_argument("inputs", nargs="+")
	_add_config_options(p)
	p.set_defaults(handler=cmd_predict)

	p = commands.add_parser("eval", help="Evaluate a model on a manifest")
	p.add_argument("model")
	p.add_argument("manifest")
	p.add_argument("--perturb", type=perturb_arg, metavar="blur:S|jpeg:Q", help="Degrade images before extraction")
	p.add_argument("--threshold", type=float, default=0.5)
	p.add_argument("--json", help="Also write the report as JSON")
	_add_config_options(p)
	p.set_defaults(handler=cmd_eval)

	p = commands.add_parser("fixture", help="Generate a synthetic labeled corpus")
	p.add_argument("out_dir")
	p.add_argument("--count", type=positive_int, default=200)
	p.add_argument("--seed", type=int, default=0)
	p.add_argument("--size", type=positive_int, default=256)
	p.add_argument("--amplitude", type=float, default=DEFAULT_AMPLITUDE)
	p.set_defaults(handler=cmd_fixture)

	p = commands.add_parser("inspect", help="Print a model summary")
	p.add_argument("model")
	p.add_argument("--dump-last-layer", metavar="MANIFEST", help="Export last-layer class vectors")
	p.add_argument("--out", help="CSV file for --dump-last-layer (default: last_layer.csv)")
	_add_config_options(p)
	p.set_defaults(handler=cmd_inspect)

	p = commands.add_parser("manifest-from-dirs", help="Build a manifest from real/ and fake/<generator>/")
	p.add_argument("root")
	p.add_argument("out_manifest")
	p.set_defaults(handler=cmd_manifest_from_dirs)

	return parser


def main(argv=None):
	parser = build_parser()
	try:
		args = parser.parse_args(argv)
	except SystemExit as e:
		return e.code if isinstance(e.code, int) else EXIT_USAGE

	level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
	logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

	try:
		return args.handler(args)
	except DAFError as e:
		logger().debug("Command failed", exc_info=True)
		print(f"error: {type(e).__name__}: {e.message}", file=sys.stderr)
		return e.exit_code


if __name__ == "__main__":
	sys.exit(main())
