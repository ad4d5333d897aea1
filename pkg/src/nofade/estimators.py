"""scikit-learn compatible wrappers around the functional API."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_image_batch
from .carbon import DEFAULT_CARBON_INTENSITY, CarbonConfig, estimate_record, load_hardware_db
from .complexity import (
    DEFAULT_N_BINS,
    ClassDistribution,
    EntropyDistribution,
    batch_entropy,
    classification_complexity,
    pairwise_jsd_sum,
    segmentation_detection_complexity,
    shannon_entropy,
)
from .exceptions import DegenerateInputError, ValidationError
from .imaging import intensity_histogram
from .registry import TASKS


class ImageEntropy(TransformerMixin, BaseEstimator):
    """Shannon entropy (bits) of each image.

    Stateless. ``X`` may be an ``(n, H, W)`` or ``(n, H, W, 3)`` array, or any
    sequence of GreyImages, rasters or file paths. ``transform`` returns an
    ``(n, 1)`` float array.
    """

    def fit(self, X=None, y=None):
        self.is_fitted_ = True
        return self

    def transform(self, X):
        batch = check_image_batch(X)
        if isinstance(batch, np.ndarray):
            h = batch_entropy(batch)
        else:
            h = np.array([shannon_entropy(intensity_histogram(img)) for img in batch], dtype=np.float64)
        return h.reshape(-1, 1)

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.requires_fit = False
        return tags


class DatasetComplexity(BaseEstimator):
    """Fit a dataset-level complexity score from its images.

    For ``task="classification"`` the labels ``y`` split the images into
    classes and the score is the log of the summed pairwise Jensen-Shannon
    distances between class entropy distributions. Otherwise it is the
    mean per-image entropy.

    Attributes
    ----------
    entropies_ : ndarray of shape (n_images,)
    distribution_ : EntropyDistribution over all images
    class_distributions_ : list of ClassDistribution (classification only)
    pairwise_sum_ : float (classification only)
    complexity_ : ComplexityScore
    """

    def __init__(self, task="segmentation", n_bins=DEFAULT_N_BINS, dataset_id=""):
        self.task = task
        self.n_bins = n_bins
        self.dataset_id = dataset_id

    def fit(self, X, y=None):
        if self.task not in TASKS:
            raise ValidationError(f"task must be one of {', '.join(TASKS)}, got {self.task!r}")
        entropies = ImageEntropy().fit_transform(X).ravel()
        if entropies.size == 0:
            raise DegenerateInputError("no images to analyse")
        self.entropies_ = entropies
        self.distribution_ = EntropyDistribution.from_entropies(entropies, self.n_bins)

        if self.task == "classification":
            if y is None:
                raise ValidationError("classification complexity needs class labels y")
            labels = np.asarray(y).astype(str)
            if labels.shape != entropies.shape:
                raise ValidationError(f"got {labels.size} labels for {entropies.size} images")
            classes = [
                ClassDistribution(label, EntropyDistribution.from_entropies(entropies[labels == label], self.n_bins))
                for label in sorted(set(labels))
            ]
            if len(classes) < 2:
                raise DegenerateInputError(
                    "classification complexity needs at least two classes; "
                    "use task='segmentation' or 'detection' for a single image set")
            self.class_distributions_ = classes
            self.pairwise_sum_ = pairwise_jsd_sum(classes)
            self.complexity_ = classification_complexity(self.pairwise_sum_, self.dataset_id)
        else:
            self.complexity_ = segmentation_detection_complexity(list(entropies), self.dataset_id)
        return self

    @property
    def value_(self):
        check_is_fitted(self, "complexity_")
        return self.complexity_.value


class CarbonEstimator(BaseEstimator):
    """Training energy and CO2 for ModelRecords.

    ``fit`` loads the hardware database; ``cpu_ratio=None`` takes the CPU
    ratio from the database's reference CPU entry.
    """

    def __init__(self, hardware_db=None, cpu_ratio=None, intensity=DEFAULT_CARBON_INTENSITY):
        self.hardware_db = hardware_db
        self.cpu_ratio = cpu_ratio
        self.intensity = intensity

    def fit(self, X=None, y=None):
        self.hardware_ = load_hardware_db(self.hardware_db)
        ratio = self.hardware_.default_cpu_ratio() if self.cpu_ratio is None else float(self.cpu_ratio)
        self.config_ = CarbonConfig(float(self.intensity), ratio)
        return self

    def estimate(self, records):
        check_is_fitted(self, "config_")
        return [estimate_record(r, self.hardware_, self.config_) for r in records]

    def predict(self, records):
        """CO2 in metric tonnes, one per record."""
        return np.array([e.co2_tonnes for e in self.estimate(records)], dtype=np.float64)
