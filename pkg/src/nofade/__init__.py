"""Dataset entropy, training carbon estimates and NoFADE scores."""

from .carbon import (
    CarbonConfig,
    CarbonEstimate,
    GpuSpec,
    WattPerFlop,
    co2_emissions,
    estimate_record,
    load_hardware_db,
    power_draw,
    watt_per_flop,
)
from .complexity import (
    ClassDistribution,
    ComplexityScore,
    EntropyDistribution,
    EntropySample,
    class_distributions,
    classification_complexity,
    dataset_entropy_distribution,
    jensen_shannon_distance,
    kl_divergence,
    mean_entropy,
    pairwise_jsd_sum,
    segmentation_detection_complexity,
    shannon_entropy,
)
from .estimators import CarbonEstimator, DatasetComplexity, ImageEntropy
from .exceptions import NoFadeError
from .imaging import GreyImage, IntensityHistogram, decode_image, intensity_histogram, to_greyscale
from .registry import ModelRecord, ResultRow, emit_registry, parse_registry, persist_results
from .scoring import NoFadeScore, nofade

__version__ = "0.1.0"
