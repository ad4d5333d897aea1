"""Image entropy, entropy distributions and Jensen-Shannon class distances.

Entropies are measured in bits. Per-image entropies are binned into a fixed
grid over [0, 8] bits so that every dataset and class shares one support,
which keeps the mixture used by the Jensen-Shannon distance well defined.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from ._validation import as_grey_image, check_distribution, check_same_support
from .exceptions import DegenerateInputError, ImageDecodeError, SupportError, ValidationError
from .imaging import N_LEVELS, IntensityHistogram, intensity_histogram

MAX_ENTROPY_BITS = 8.0
DEFAULT_N_BINS = 64

MEAN_ENTROPY = "mean-entropy"
LOG_SUM_JSD = "log-sum-jsd"
COMPLEXITY_KINDS = (MEAN_ENTROPY, LOG_SUM_JSD)


# -- per-image entropy -------------------------------------------------------

def shannon_entropy(hist):
    """Shannon entropy in bits of an intensity histogram (0 log 0 = 0)."""
    counts = hist.counts if isinstance(hist, IntensityHistogram) else np.asarray(hist)
    total = counts.sum()
    if total <= 0:
        raise DegenerateInputError("cannot take the entropy of an empty histogram")
    p = counts[counts > 0] / total
    h = -float(np.sum(p * np.log2(p)))
    # single-bin histograms come out as -0.0
    return h if h > 0 else 0.0


def batch_entropy(images):
    """Entropies of a ``(n, H, W)`` uint8 stack, computed in one pass."""
    images = np.asarray(images)
    if images.ndim != 3 or images.dtype != np.uint8:
        raise ValidationError("batch_entropy expects an (n, H, W) uint8 array")
    n = images.shape[0]
    if n == 0:
        return np.zeros(0)
    flat = images.reshape(n, -1).astype(np.int64)
    offsets = (np.arange(n, dtype=np.int64) * N_LEVELS)[:, None]
    counts = np.bincount((flat + offsets).ravel(), minlength=n * N_LEVELS).reshape(n, N_LEVELS)
    p = counts / flat.shape[1]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(counts > 0, p * np.log2(np.where(counts > 0, p, 1.0)), 0.0)
    return np.maximum(-terms.sum(axis=1), 0.0) + 0.0


# -- distributions -----------------------------------------------------------

@dataclass(frozen=True)
class EntropySample:
    image_id: str
    entropy: float

    def __post_init__(self):
        if not (0.0 <= self.entropy <= MAX_ENTROPY_BITS + 1e-9):
            raise ValidationError(f"entropy {self.entropy!r} outside [0, 8] bits")


def bin_entropies(entropies, n_bins=DEFAULT_N_BINS):
    """Bin indices on the uniform grid over [0, 8]; 8.0 lands in the last bin."""
    values = np.asarray(entropies, dtype=np.float64)
    width = MAX_ENTROPY_BITS / n_bins
    idx = np.floor(values / width).astype(np.int64)
    return np.clip(idx, 0, n_bins - 1)


@dataclass(frozen=True, eq=False)
class EntropyDistribution:
    """Histogram of per-image entropies over uniform bins on [0, 8] bits.

    Merging two distributions with ``+`` is associative and commutative, so
    partial results from any partition of a dataset combine to the same
    distribution a single pass would give.
    """

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or counts.size == 0:
            raise ValidationError("distribution counts must be a non-empty 1-D array")
        if np.any(counts < 0):
            raise ValidationError("distribution counts must be non-negative")
        counts = np.ascontiguousarray(counts)
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_entropies(cls, entropies, n_bins=DEFAULT_N_BINS):
        idx = bin_entropies(entropies, n_bins)
        return cls(np.bincount(idx, minlength=n_bins))

    @classmethod
    def empty(cls, n_bins=DEFAULT_N_BINS):
        return cls(np.zeros(n_bins, dtype=np.int64))

    @property
    def n_bins(self):
        return self.counts.size

    @property
    def bin_width(self):
        return MAX_ENTROPY_BITS / self.n_bins

    @property
    def edges(self):
        return np.arange(self.n_bins + 1) * self.bin_width

    @property
    def sample_count(self):
        return int(self.counts.sum())

    def normalized(self):
        total = self.sample_count
        if total == 0:
            raise DegenerateInputError("cannot normalize an empty entropy distribution")
        return self.counts / total

    def __add__(self, other):
        if not isinstance(other, EntropyDistribution):
            return NotImplemented
        if other.n_bins != self.n_bins:
            raise ValidationError("cannot merge distributions with different bin counts")
        return EntropyDistribution(self.counts + other.counts)

    def __eq__(self, other):
        if not isinstance(other, EntropyDistribution):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)

    __hash__ = None


@dataclass(frozen=True)
class ClassDistribution:
    label: str
    distribution: EntropyDistribution

    def __post_init__(self):
        if self.distribution.sample_count < 1:
            raise DegenerateInputError(f"class {self.label!r} has no samples")

    def normalized(self):
        return self.distribution.normalized()


@dataclass(frozen=True)
class ComplexityScore:
    dataset_id: str
    kind: str
    value: float
    warnings: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in COMPLEXITY_KINDS:
            raise ValidationError(f"unknown complexity kind {self.kind!r}")
        if not math.isfinite(self.value):
            raise ValidationError("complexity value must be finite")
        if self.kind == MEAN_ENTROPY and not (0.0 <= self.value <= MAX_ENTROPY_BITS):
            raise ValidationError(f"mean entropy {self.value!r} outside [0, 8]")

    def to_dict(self):
        return {"dataset_id": self.dataset_id, "kind": self.kind,
                "value": self.value, "warnings": list(self.warnings)}

    @classmethod
    def from_dict(cls, data):
        return cls(str(data["dataset_id"]), str(data["kind"]), float(data["value"]),
                   tuple(data.get("warnings", ())))


class DatasetDecodeError(DegenerateInputError):
    """Some images in a dataset failed to decode.

    ``failures`` lists ``(image_id, ImageDecodeError)`` pairs.
    """

    def __init__(self, failures):
        self.failures = list(failures)
        detail = "; ".join(str(err) for _, err in self.failures[:5])
        more = "" if len(self.failures) <= 5 else f" (+{len(self.failures) - 5} more)"
        super().__init__(f"{len(self.failures)} image(s) failed to decode: {detail}{more}")


def _image_entropy(item):
    image_id, image = item
    try:
        return image_id, shannon_entropy(intensity_histogram(as_grey_image(image))), None
    except ImageDecodeError as exc:
        return image_id, None, exc


def dataset_entropy_distribution(images, n_bins=DEFAULT_N_BINS, failures=None, n_jobs=1):
    """Entropy of every image plus the binned distribution of those entropies.

    ``images`` yields ``(image_id, image)`` pairs where ``image`` is a path,
    raster or GreyImage. Decode failures are appended to ``failures`` when a
    list is supplied; otherwise they are raised together as
    DatasetDecodeError once the whole stream has been read.
    """
    items = list(images)
    if n_jobs and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_image_entropy, items))
    else:
        results = [_image_entropy(item) for item in items]

    samples = [EntropySample(str(i), h) for i, h, err in results if err is None]
    errors = [(str(i), err) for i, _, err in results if err is not None]
    if errors:
        if failures is None:
            raise DatasetDecodeError(errors)
        failures.extend(errors)
    if not samples:
        if errors:
            raise DatasetDecodeError(errors)
        raise DegenerateInputError("no images to analyse")
    dist = EntropyDistribution.from_entropies([s.entropy for s in samples], n_bins)
    return samples, dist


def mean_entropy(samples):
    if not samples:
        raise DegenerateInputError("mean entropy of an empty sample list")
    values = [s.entropy if isinstance(s, EntropySample) else float(s) for s in samples]
    return sum(values) / len(values)


def class_distributions(labeled_images, n_bins=DEFAULT_N_BINS, failures=None):
    """One ClassDistribution per label, sorted by label.

    ``labeled_images`` yields ``(label, image)`` or ``(label, image_id, image)``.
    A class whose images all fail to decode raises an error naming it.
    """
    grouped = {}
    for n, item in enumerate(labeled_images):
        if len(item) == 3:
            label, image_id, image = item
        else:
            label, image = item
            image_id = f"{label}/{n}"
        grouped.setdefault(str(label), []).append((image_id, image))

    out = []
    for label in sorted(grouped):
        local = []
        try:
            _, dist = dataset_entropy_distribution(grouped[label], n_bins, failures=local)
        except DegenerateInputError as exc:
            raise DegenerateInputError(f"class {label!r} has no decodable images") from exc
        if local:
            if failures is None:
                raise DatasetDecodeError(local)
            failures.extend(local)
        out.append(ClassDistribution(label, dist))
    return out


# -- divergences -------------------------------------------------------------

def _kl_bits(p, q):
    # q == 0 with p > 0 only happens when a subnormal p underflows in the
    # mixture; such a term is below float resolution.
    mask = (p > 0) & (q > 0)
    return float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))


def kl_divergence(p, q):
    """KL divergence D(P || Q) in bits."""
    p = check_distribution(p, "P")
    q = check_distribution(q, "Q")
    check_same_support(p, q)
    if np.any((p > 0) & (q == 0)):
        raise SupportError("P has mass where Q is zero; D(P || Q) is infinite")
    d = _kl_bits(p, q)
    return d if d > 0 else 0.0


def jensen_shannon_distance(p, q):
    """Square root of the base-2 Jensen-Shannon divergence; lies in [0, 1]."""
    p = check_distribution(p, "P")
    q = check_distribution(q, "Q")
    check_same_support(p, q)
    m = 0.5 * (p + q)
    radicand = 0.5 * _kl_bits(p, m) + 0.5 * _kl_bits(q, m)
    return min(math.sqrt(radicand), 1.0) if radicand > 0 else 0.0


def pairwise_jsd_terms(classes):
    """``((label_i, label_j), distance)`` for every unordered pair, i < j."""
    labelled = []
    for n, c in enumerate(classes):
        if isinstance(c, ClassDistribution):
            labelled.append((c.label, c.normalized()))
        else:
            labelled.append((str(n), check_distribution(c)))
    if len(labelled) < 2:
        raise DegenerateInputError("need at least two classes for pairwise distances")
    return [
        ((a_label, b_label), jensen_shannon_distance(a, b))
        for (a_label, a), (b_label, b) in combinations(labelled, 2)
    ]


def pairwise_jsd_sum(classes):
    return sum(d for _, d in pairwise_jsd_terms(classes))


# -- dataset complexity scores -----------------------------------------------

def classification_complexity(jsd_sum, dataset_id=""):
    """Natural log of the summed pairwise class distances."""
    jsd_sum = float(jsd_sum)
    if not jsd_sum > 0 or not math.isfinite(jsd_sum):
        raise DegenerateInputError(
            f"pairwise JSD sum is {jsd_sum!r}; its log is undefined "
            "(classes have identical entropy distributions)")
    warnings = ()
    if jsd_sum < 1:
        warnings = (f"pairwise JSD sum {jsd_sum!r} < 1 gives a negative complexity",)
    return ComplexityScore(dataset_id, LOG_SUM_JSD, math.log(jsd_sum), warnings)


def segmentation_detection_complexity(samples, dataset_id=""):
    return ComplexityScore(dataset_id, MEAN_ENTROPY, mean_entropy(samples))


def merge_distributions(distributions: Iterable[EntropyDistribution]):
    return reduce(lambda a, b: a + b, distributions)


def complexity_from_classes(classes: Sequence[ClassDistribution], dataset_id=""):
    return classification_complexity(pairwise_jsd_sum(classes), dataset_id)
