"""NoFADE: test metric times dataset complexity, normalised by log10 FLOPs."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .complexity import ComplexityScore
from .exceptions import ValidationError

#: log10(FLOPs) must exceed 1, so FLOPs must exceed this floor.
FLOPS_FLOOR = 10.0


class FlopsDomainError(ValidationError):
    pass


@dataclass(frozen=True)
class NoFadeScore:
    model: str
    dataset: str
    value: float
    metric_percent: float
    complexity: float
    flops: float

    def recompute(self):
        return self.metric_percent * self.complexity / math.log10(self.flops)


def nofade(metric_percent, complexity, flops, model="", dataset=None):
    """Score one model-dataset pair.

    ``complexity`` may be a ComplexityScore or a bare number. ``dataset``
    defaults to the score's dataset identifier.
    """
    if isinstance(complexity, ComplexityScore):
        if dataset is None:
            dataset = complexity.dataset_id
        complexity = complexity.value
    metric_percent = float(metric_percent)
    complexity = float(complexity)
    flops = float(flops)
    if not (0.0 <= metric_percent <= 100.0):
        raise ValidationError(f"metric must be a percentage in [0, 100], got {metric_percent!r}")
    if not (math.isfinite(complexity) and complexity >= 0):
        raise ValidationError(f"complexity must be finite and >= 0, got {complexity!r}")
    if not (math.isfinite(flops) and flops > FLOPS_FLOOR):
        raise FlopsDomainError(f"FLOPs must exceed {FLOPS_FLOOR:g}, got {flops!r}")
    value = metric_percent * complexity / math.log10(flops)
    return NoFadeScore(model, dataset or "", value, metric_percent, complexity, flops)
