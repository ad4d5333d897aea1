"""Pipelines behind the CLI: dataset scans, result tables, CSV and SVG reports.

CSV numbers use ``repr`` so every value round-trips exactly; the SVG
writers receive the same strings, which keeps each plot a pure view of
its sibling CSV.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .complexity import (
    DEFAULT_N_BINS,
    class_distributions,
    classification_complexity,
    dataset_entropy_distribution,
    pairwise_jsd_sum,
    segmentation_detection_complexity,
)
from .exceptions import DegenerateInputError, NoFadeError, ValidationError
from .imaging import iter_image_files
from .registry import ResultRow, load_complexity
from .scoring import nofade
from .svg import LINEAR, LOG10, histogram_svg, scatter_svg

FLAT = "flat"
CLASS_LAYOUT = "class"
LAYOUTS = (FLAT, CLASS_LAYOUT)

ENTROPY_HIST = "entropy-hist"
CO2_SCATTER = "co2-scatter"
NOFADE_SCATTER = "nofade-scatter"
REPORT_KINDS = (ENTROPY_HIST, CO2_SCATTER, NOFADE_SCATTER)


class ReportError(NoFadeError, ValueError):
    pass


def num(value):
    return repr(float(value))


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# -- dataset scanning ----------------------------------------------------------

def flat_items(directory, mask_dir=None):
    """``(image_id, path)`` for a flat directory, plus masks when given."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ReportError(f"{directory}: not a directory")
    items = [(p.name, p) for p in iter_image_files(directory)]
    if mask_dir is not None:
        items += [(f"mask:{p.name}", p) for p in iter_image_files(mask_dir)]
    if not items:
        raise DegenerateInputError(f"{directory}: no supported images found")
    return items


def class_items(directory):
    """``(label, image_id, path)`` with one subdirectory per class."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ReportError(f"{directory}: not a directory")
    items = []
    for sub in sorted(p for p in directory.iterdir() if p.is_dir()):
        files = iter_image_files(sub)
        if not files:
            raise DegenerateInputError(f"class {sub.name!r} has no images")
        items += [(sub.name, f"{sub.name}/{p.name}", p) for p in files]
    if not items:
        raise DegenerateInputError(f"{directory}: no class subdirectories with images")
    return items


def scan_entropy(directory, layout=FLAT, n_bins=DEFAULT_N_BINS, failures=None, mask_dir=None):
    """Samples and distribution for the whole set, plus per-class results.

    Returns ``(samples, distribution, per_class)`` where ``per_class`` maps
    label to ``(samples, distribution)`` and is empty for flat layouts.
    """
    if layout not in LAYOUTS:
        raise ValidationError(f"layout must be one of {', '.join(LAYOUTS)}")
    per_class = {}
    if layout == FLAT:
        samples, dist = dataset_entropy_distribution(flat_items(directory, mask_dir), n_bins, failures)
        return samples, dist, per_class
    grouped = {}
    for label, image_id, path in class_items(directory):
        grouped.setdefault(label, []).append((image_id, path))
    all_samples, dist = [], None
    for label in sorted(grouped):
        try:
            s, d = dataset_entropy_distribution(grouped[label], n_bins, failures)
        except DegenerateInputError as exc:
            raise DegenerateInputError(f"class {label!r}: {exc}") from exc
        per_class[label] = (s, d)
        all_samples += s
        dist = d if dist is None else dist + d
    return all_samples, dist, per_class


def dataset_complexity(directory, task, dataset_id=None, n_bins=DEFAULT_N_BINS, failures=None, mask_dir=None):
    """Complexity score of a dataset directory.

    Classification reads a class-per-subdirectory layout and needs two or
    more classes; segmentation and detection read a flat directory.
    """
    directory = Path(directory)
    dataset_id = dataset_id or directory.name
    if task == "classification":
        items = class_items(directory)
        labels = {label for label, _, _ in items}
        if len(labels) < 2:
            raise DegenerateInputError(
                f"{directory}: classification complexity compares classes pairwise and needs "
                f"at least 2 class subdirectories, found {len(labels)}; "
                "score a single image set with --task segmentation or detection")
        classes = class_distributions(items, n_bins, failures)
        return classification_complexity(pairwise_jsd_sum(classes), dataset_id)
    if task in ("segmentation", "detection"):
        samples, _ = dataset_entropy_distribution(flat_items(directory, mask_dir), n_bins, failures)
        return segmentation_detection_complexity(samples, dataset_id)
    raise ValidationError(f"unknown task {task!r}")


# -- entropy outputs -----------------------------------------------------------

def samples_csv(samples):
    return _csv_text(("image_id", "entropy_bits"), [(s.image_id, num(s.entropy)) for s in samples])


def histogram_rows(dist):
    edges = dist.edges
    return [(k, num(edges[k]), num(edges[k + 1]), int(c)) for k, c in enumerate(dist.counts)]


def histogram_csv(dist):
    return _csv_text(("bin", "lower_bits", "upper_bits", "count"), histogram_rows(dist))


def histogram_plot(dist, title):
    rows = histogram_rows(dist)
    return histogram_svg([float(r[1]) for r in rows] + [float(rows[-1][2])],
                         [r[3] for r in rows], [str(r[3]) for r in rows], title)


# -- carbon and NoFADE tables --------------------------------------------------

CARBON_HEADER = ("model", "dataset", "task", "gpu_type", "flops", "gpu_hours",
                 "power_wh", "co2_tonnes", "intensity_t_per_kwh")


def carbon_results(records, estimator):
    return [ResultRow(r, e) for r, e in zip(records, estimator.estimate(records))]


def carbon_csv(rows):
    body = [
        (r.record.model, r.record.dataset, r.record.task, r.record.gpu_type, num(r.record.flops),
         num(r.record.gpu_hours), num(r.carbon.power_wh), num(r.carbon.co2_tonnes), num(r.carbon.intensity))
        for r in rows
    ]
    total_wh = sum(r.carbon.power_wh for r in rows)
    total_co2 = sum(r.carbon.co2_tonnes for r in rows)
    intensity = num(rows[0].carbon.intensity) if rows else ""
    body.append(("TOTAL", "", "", "", "", "", num(total_wh), num(total_co2), intensity))
    return _csv_text(CARBON_HEADER, body)


def nofade_results(records, estimator, store, scores=None):
    """Carbon plus NoFADE for every record.

    Complexity scores come from ``scores`` (dataset id -> ComplexityScore)
    first, then from the store. A dataset with neither is an error.
    """
    scores = dict(scores or {})
    missing = []
    for ds in sorted({r.dataset for r in records}):
        if ds not in scores:
            found = load_complexity(ds, store) if store is not None else None
            if found is None:
                missing.append(ds)
            else:
                scores[ds] = found
    if missing:
        raise ReportError(f"no stored complexity score for dataset(s): {', '.join(missing)}; "
                          "run `nofade complexity` on them first")
    out = []
    for row in carbon_results(records, estimator):
        rec, score = row.record, scores[row.record.dataset]
        out.append(ResultRow(rec, row.carbon, score,
                             nofade(rec.metric_percent, score, rec.flops, model=rec.model, dataset=rec.dataset)))
    return out


NOFADE_HEADER = ("model", "dataset", "task", "metric_percent", "complexity_kind", "complexity",
                 "flops", "nofade", "power_wh", "co2_tonnes")


def nofade_csv(rows):
    return _csv_text(NOFADE_HEADER, [
        (r.record.model, r.record.dataset, r.record.task, num(r.nofade.metric_percent), r.complexity.kind,
         num(r.nofade.complexity), num(r.nofade.flops), num(r.nofade.value),
         num(r.carbon.power_wh), num(r.carbon.co2_tonnes))
        for r in rows
    ])


# -- scatter reports -----------------------------------------------------------

SCATTER_HEADER = ("label", "dataset", "task", "x", "y", "metric_percent", "complexity", "flops")


def scatter_points(kind, rows, task=None):
    """Plot points with CO2 on x and the test metric (co2-scatter) or NoFADE
    (nofade-scatter) on y. nofade-scatter refuses to mix tasks.
    """
    if task is not None:
        rows = [r for r in rows if r.record.task == task]
    if not rows:
        raise ReportError("no registry rows to plot" + (f" for task {task!r}" if task else ""))
    if kind == NOFADE_SCATTER:
        tasks = sorted({r.record.task for r in rows})
        if len(tasks) > 1:
            raise ReportError(f"nofade-scatter cannot mix tasks ({', '.join(tasks)}); "
                              "pick one with --task")
    elif kind != CO2_SCATTER:
        raise ValidationError(f"not a scatter report: {kind!r}")
    points = []
    for r in rows:
        x = r.carbon.co2_tonnes
        y = r.nofade.value if kind == NOFADE_SCATTER else r.record.metric_percent
        complexity = "" if r.complexity is None else num(r.complexity.value)
        points.append({"label": r.record.model, "group": r.record.dataset, "task": r.record.task,
                       "x": float(x), "y": float(y), "x_text": num(x), "y_text": num(y),
                       "echo": (num(r.record.metric_percent), complexity, num(r.record.flops))})
    return points


def scatter_csv(points):
    return _csv_text(SCATTER_HEADER, [(p["label"], p["group"], p["task"], p["x_text"], p["y_text"], *p["echo"])
                                      for p in points])


def scatter_plot(kind, points, x_scale=None, y_scale=None):
    """SVG view of ``points``; the CO2 axis defaults to log10."""
    if kind == CO2_SCATTER:
        title, yl = "Test metric vs CO2", "test metric (%)"
    else:
        title, yl = "NoFADE vs CO2", "NoFADE"
    try:
        return scatter_svg(points, title, "CO2 (t)", yl, x_scale or LOG10, y_scale or LINEAR)
    except ValueError as exc:
        raise ReportError(str(exc)) from exc
