"""Model registry CSV, complexity score store and result snapshots.

Registry columns, in order::

    model,task,dataset,metric_percent,flops,gpu_hours,gpu_type,source

Numbers are written with ``repr`` (shortest string that parses back to the
same float), so ``parse_registry(emit_registry(records))`` is the identity.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import re
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from ._io import atomic_write, store_lock
from .carbon import CarbonEstimate
from .complexity import ComplexityScore
from .exceptions import RegistryError, StoreError, ValidationError
from .scoring import NoFadeScore

COLUMNS = ("model", "task", "dataset", "metric_percent", "flops", "gpu_hours", "gpu_type", "source")
TASKS = ("classification", "segmentation", "detection")
NUMERIC = ("metric_percent", "flops", "gpu_hours")


@dataclass(frozen=True)
class ModelRecord:
    model: str
    task: str
    dataset: str
    metric_percent: float
    flops: float
    gpu_hours: float
    gpu_type: str
    source: str = ""

    def __post_init__(self):
        if not self.model:
            raise ValidationError("model name is empty")
        if not self.dataset:
            raise ValidationError("dataset is empty")
        if self.task not in TASKS:
            raise ValidationError(f"task must be one of {', '.join(TASKS)}, got {self.task!r}")
        if not (0.0 <= self.metric_percent <= 100.0):
            raise ValidationError(f"metric_percent {self.metric_percent!r} outside [0, 100]")
        if not (math.isfinite(self.flops) and self.flops > 0):
            raise ValidationError(f"flops must be > 0, got {self.flops!r}")
        if not (math.isfinite(self.gpu_hours) and self.gpu_hours >= 0):
            raise ValidationError(f"gpu_hours must be >= 0, got {self.gpu_hours!r}")
        if not self.gpu_type:
            raise ValidationError("gpu_type is empty")

    @property
    def key(self):
        return (self.model, self.dataset)


def _format_number(value):
    return repr(float(value))


def _read_rows(text, path):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise RegistryError([(1, "file is empty; expected a header row")], path) from None
    header = [h.strip() for h in header]
    missing = [c for c in COLUMNS if c not in header]
    extra = [c for c in header if c not in COLUMNS]
    dupes = sorted({c for c in header if header.count(c) > 1})
    problems = []
    if missing:
        problems.append(f"missing column(s): {', '.join(missing)}")
    if extra:
        problems.append(f"unknown column(s): {', '.join(extra)}")
    if dupes:
        problems.append(f"duplicate column(s): {', '.join(dupes)}")
    if problems:
        raise RegistryError([(1, "; ".join(problems))], path)
    return header, reader


def parse_registry(path):
    """Validated ModelRecords from a registry CSV.

    All row problems are gathered and raised together as RegistryError;
    no records are returned if any row is invalid.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise RegistryError([(0, f"cannot read file ({exc.strerror or exc})")], path) from exc
    header, reader = _read_rows(text, path)

    records, errors, seen = [], [], {}
    for row_number, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            errors.append((row_number, f"expected {len(header)} fields, found {len(row)}"))
            continue
        fields = dict(zip(header, row))
        try:
            for name in NUMERIC:
                try:
                    fields[name] = float(fields[name])
                except ValueError:
                    raise ValidationError(f"{name}: cannot parse {fields[name]!r} as a number") from None
            record = ModelRecord(**{c: fields[c] for c in COLUMNS})
        except ValidationError as exc:
            errors.append((row_number, str(exc)))
            continue
        if record.key in seen:
            errors.append((row_number, f"duplicate (model, dataset) pair {record.key!r}; "
                                       f"first seen on row {seen[record.key]}"))
            continue
        seen[record.key] = row_number
        records.append(record)
    if errors:
        raise RegistryError(errors, path)
    return records


def registry_to_string(records):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in records:
        writer.writerow([r.model, r.task, r.dataset, _format_number(r.metric_percent),
                         _format_number(r.flops), _format_number(r.gpu_hours), r.gpu_type, r.source])
    return buf.getvalue()


def emit_registry(records, path):
    keys = [r.key for r in records]
    if len(set(keys)) != len(keys):
        raise ValidationError("records contain duplicate (model, dataset) pairs")
    text = registry_to_string(records)
    try:
        with atomic_write(path, newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise StoreError(f"{path}: cannot write registry ({exc})") from exc
    return Path(path)


# -- results -----------------------------------------------------------------

@dataclass(frozen=True)
class ResultRow:
    record: ModelRecord
    carbon: CarbonEstimate
    complexity: Optional[ComplexityScore] = None
    nofade: Optional[NoFadeScore] = None

    def __post_init__(self):
        if self.nofade is not None:
            n = self.nofade
            if n.metric_percent != self.record.metric_percent or n.flops != self.record.flops:
                raise ValidationError(f"{self.record.key}: NoFADE inputs disagree with the record")
            if self.complexity is not None and n.complexity != self.complexity.value:
                raise ValidationError(f"{self.record.key}: NoFADE complexity disagrees with the score")

    def to_dict(self):
        return {
            "record": asdict(self.record),
            "carbon": asdict(self.carbon),
            "complexity": None if self.complexity is None else self.complexity.to_dict(),
            "nofade": None if self.nofade is None else asdict(self.nofade),
        }


@dataclass(frozen=True)
class Snapshot:
    path: Path
    content_hash: str


def canonical_json(rows):
    payload = [row.to_dict() for row in rows]
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False).encode("utf-8")


def content_hash(rows):
    return hashlib.sha256(canonical_json(rows)).hexdigest()


def persist_results(rows, store, now=None):
    """Write an append-only snapshot ``results/<UTC timestamp>-<sha256>.json``.

    The hash covers only the rows, so identical analyses share a hash even
    though their timestamps differ.
    """
    rows = list(rows)
    if not rows:
        raise StoreError("no result rows to persist")
    data = canonical_json(rows)
    digest = hashlib.sha256(data).hexdigest()
    stamp = (now or datetime.now(timezone.utc)).strftime("%Y%m%dT%H%M%S%fZ")
    store = Path(store)
    target = store / "results" / f"{stamp}-{digest}.json"
    try:
        with store_lock(store):
            if not target.exists():
                with atomic_write(target, "wb") as fh:
                    fh.write(data)
    except OSError as exc:
        raise StoreError(f"{store}: cannot write snapshot ({exc})") from exc
    return Snapshot(target, digest)


def load_snapshot(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


# -- complexity score store --------------------------------------------------

_UNSAFE = re.compile(r"[^A-Za-z0-9._-]+")


def _score_path(store, dataset_id):
    slug = _UNSAFE.sub("_", dataset_id).strip("._") or "_"
    return Path(store) / "complexity" / f"{slug}.json"


def save_complexity(score, store):
    path = _score_path(store, score.dataset_id)
    text = json.dumps(score.to_dict(), sort_keys=True, indent=2) + "\n"
    try:
        with store_lock(store):
            with atomic_write(path) as fh:
                fh.write(text)
    except OSError as exc:
        raise StoreError(f"{store}: cannot store complexity score ({exc})") from exc
    return path


def load_complexity(dataset_id, store):
    """Stored ComplexityScore for ``dataset_id``, or None if absent."""
    path = _score_path(store, dataset_id)
    if not path.exists():
        return None
    with store_lock(store, exclusive=False):
        score = ComplexityScore.from_dict(json.loads(path.read_text(encoding="utf-8")))
    if score.dataset_id != dataset_id:
        raise StoreError(f"{path}: holds a score for {score.dataset_id!r}, not {dataset_id!r}")
    return score
