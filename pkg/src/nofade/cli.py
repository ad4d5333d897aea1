"""``nofade`` command line.

Subcommands: entropy, complexity, carbon, nofade, report. Defaults for the
global flags can come from an INI file named by ``--config`` or the
``NOFADE_CONFIG`` environment variable (section ``[nofade]``).
"""

from __future__ import annotations

import argparse
import configparser
import logging
import os
import re
import sys
from pathlib import Path

from ._io import atomic_write
from .carbon import DEFAULT_CARBON_INTENSITY
from .complexity import DEFAULT_N_BINS
from .estimators import CarbonEstimator
from .exceptions import ConfigurationError, NoFadeError
from .registry import TASKS, parse_registry, persist_results, save_complexity
from . import report

log = logging.getLogger("nofade")

CONFIG_ENV = "NOFADE_CONFIG"
DEFAULT_STORE = "nofade-store"

CONFIG_KEYS = {
    "hardware_db": str,
    "intensity": float,
    "cpu_ratio": float,
    "bins": int,
    "out_dir": str,
    "store": str,
}


def load_config(path):
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigurationError(f"{path}: cannot read config ({exc})") from exc
    if not parser.has_section("nofade"):
        return {}
    out = {}
    for key, value in parser["nofade"].items():
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ConfigurationError(f"{path}: unknown setting {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise ConfigurationError(f"{path}: bad value for {key}: {value!r}") from exc
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="nofade", description=__doc__.splitlines()[0].strip("`"))
    p.add_argument("--config", help=f"INI config file (default: ${CONFIG_ENV})")
    p.add_argument("--hardware-db", help="hardware database file (default: bundled)")
    p.add_argument("--intensity", type=float,
                   help=f"carbon intensity, t CO2 per kWh (default {DEFAULT_CARBON_INTENSITY})")
    p.add_argument("--cpu-ratio", type=float, help="CPU Watt-to-FLOPS ratio (default: database reference CPU)")
    p.add_argument("--bins", type=int, help=f"entropy histogram bins (default {DEFAULT_N_BINS})")
    p.add_argument("--out-dir", help="directory for output files (default: .)")
    p.add_argument("--store", help=f"results/score store directory (default: ./{DEFAULT_STORE})")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("entropy", help="per-image entropies and their histogram")
    e.add_argument("dataset", type=Path)
    e.add_argument("--layout", choices=report.LAYOUTS, default=report.FLAT)
    e.add_argument("--mask-dir", type=Path, help="also include masks from this directory (flat layout)")
    e.add_argument("--skip-bad", action="store_true", help="report undecodable images and carry on")

    c = sub.add_parser("complexity", help="dataset complexity score")
    c.add_argument("dataset", type=Path)
    c.add_argument("--task", choices=TASKS, required=True)
    c.add_argument("--dataset-id", help="key for the stored score (default: directory name)")
    c.add_argument("--mask-dir", type=Path, help="also include masks (segmentation/detection)")
    c.add_argument("--skip-bad", action="store_true")

    cb = sub.add_parser("carbon", help="training energy and CO2 per registry row")
    cb.add_argument("registry", type=Path)

    n = sub.add_parser("nofade", help="NoFADE score per registry row; snapshot to the store")
    n.add_argument("registry", type=Path)

    r = sub.add_parser("report", help="CSV + SVG figure")
    r.add_argument("kind", choices=report.REPORT_KINDS)
    r.add_argument("--registry", type=Path, help="registry CSV (scatter reports)")
    r.add_argument("--dataset", type=Path, help="dataset directory (entropy-hist)")
    r.add_argument("--layout", choices=report.LAYOUTS, default=report.FLAT)
    r.add_argument("--task", choices=TASKS, help="restrict a scatter to one task")
    r.add_argument("--x-scale", choices=("linear", "log10"))
    r.add_argument("--y-scale", choices=("linear", "log10"))
    return p


def _settings(args):
    config_path = args.config or os.environ.get(CONFIG_ENV)
    cfg = load_config(config_path) if config_path else {}
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    cfg.setdefault("out_dir", ".")
    cfg.setdefault("store", DEFAULT_STORE)
    cfg.setdefault("bins", DEFAULT_N_BINS)
    cfg.setdefault("intensity", DEFAULT_CARBON_INTENSITY)
    if cfg["bins"] < 1:
        raise ConfigurationError("--bins must be >= 1")
    return cfg


def _write_all(outputs):
    """Write ``{path: text}`` only after every output has been computed."""
    for path, text in outputs.items():
        with atomic_write(path, newline="") as fh:
            fh.write(text)
        print(path)


def _report_failures(failures):
    for image_id, err in failures:
        print(f"warning: skipped {image_id}: {err}", file=sys.stderr)


def _slug(label):
    return re.sub(r"[^A-Za-z0-9._-]+", "_", label)


def _carbon_estimator(cfg):
    return CarbonEstimator(cfg.get("hardware_db"), cfg.get("cpu_ratio"), cfg["intensity"]).fit()


def cmd_entropy(args, cfg):
    out = Path(cfg["out_dir"])
    failures = [] if args.skip_bad else None
    samples, dist, per_class = report.scan_entropy(args.dataset, args.layout, cfg["bins"], failures,
                                                   args.mask_dir)
    outputs = {
        out / "entropy_samples.csv": report.samples_csv(samples),
        out / "entropy_hist.csv": report.histogram_csv(dist),
        out / "entropy_hist.svg": report.histogram_plot(dist, f"Entropy histogram: {args.dataset.name}"),
    }
    for label, (s, d) in per_class.items():
        outputs[out / f"entropy_samples_{_slug(label)}.csv"] = report.samples_csv(s)
        outputs[out / f"entropy_hist_{_slug(label)}.csv"] = report.histogram_csv(d)
    if failures:
        _report_failures(failures)
    _write_all(outputs)


def cmd_complexity(args, cfg):
    failures = [] if args.skip_bad else None
    score = report.dataset_complexity(args.dataset, args.task, args.dataset_id, cfg["bins"], failures,
                                      args.mask_dir)
    if failures:
        _report_failures(failures)
    for w in score.warnings:
        print(f"warning: {w}", file=sys.stderr)
    path = save_complexity(score, cfg["store"])
    print(f"{score.dataset_id}\t{score.kind}\t{score.value!r}")
    log.info("stored %s", path)


def cmd_carbon(args, cfg):
    records = parse_registry(args.registry)
    rows = report.carbon_results(records, _carbon_estimator(cfg))
    _write_all({Path(cfg["out_dir"]) / "carbon.csv": report.carbon_csv(rows)})


def cmd_nofade(args, cfg):
    records = parse_registry(args.registry)
    rows = report.nofade_results(records, _carbon_estimator(cfg), cfg["store"])
    _write_all({Path(cfg["out_dir"]) / "nofade.csv": report.nofade_csv(rows)})
    snap = persist_results(rows, cfg["store"])
    print(f"snapshot {snap.content_hash} {snap.path}")


def cmd_report(args, cfg):
    out = Path(cfg["out_dir"])
    if args.kind == report.ENTROPY_HIST:
        if args.dataset is None:
            raise ConfigurationError("entropy-hist needs --dataset")
        _, dist, _ = report.scan_entropy(args.dataset, args.layout, cfg["bins"])
        _write_all({
            out / "entropy-hist.csv": report.histogram_csv(dist),
            out / "entropy-hist.svg": report.histogram_plot(dist, f"Entropy histogram: {args.dataset.name}"),
        })
        return
    if args.registry is None:
        raise ConfigurationError(f"{args.kind} needs --registry")
    records = parse_registry(args.registry)
    estimator = _carbon_estimator(cfg)
    if args.kind == report.NOFADE_SCATTER:
        candidates = [r for r in records if args.task is None or r.task == args.task]
        rows = report.nofade_results(candidates, estimator, cfg["store"])
    else:
        rows = report.carbon_results(records, estimator)
    points = report.scatter_points(args.kind, rows, args.task)
    _write_all({
        out / f"{args.kind}.csv": report.scatter_csv(points),
        out / f"{args.kind}.svg": report.scatter_plot(args.kind, points, args.x_scale, args.y_scale),
    })


COMMANDS = {
    "entropy": cmd_entropy,
    "complexity": cmd_complexity,
    "carbon": cmd_carbon,
    "nofade": cmd_nofade,
    "report": cmd_report,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _settings(args)
        COMMANDS[args.command](args, cfg)
    except NoFadeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
