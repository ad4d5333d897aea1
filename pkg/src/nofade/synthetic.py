"""Deterministic synthetic image sets for demos, tests and throughput checks.

An image drawn uniformly from ``k`` distinct intensities has entropy close
to ``log2(k)`` bits, so the number of levels controls where each image
lands on the entropy axis.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np
from PIL import Image

BUNDLED = ("synth-cls", "synth-seg", "synth-det")

# label -> (min levels, max levels); overlapping ranges give partly shared support
CLASS_LEVELS = {
    "coarse": (2, 12),
    "medium": (8, 48),
    "fine": (40, 256),
}


def level_noise(rng, shape, levels):
    """Uniform noise over ``levels`` evenly spaced intensities in [0, 255]."""
    palette = np.round(np.linspace(0, 255, levels)).astype(np.uint8)
    return palette[rng.integers(0, levels, size=shape)]


def uniform_noise(rng, n, height, width):
    return rng.integers(0, 256, size=(n, height, width), dtype=np.uint8)


def equiprobable_image(height=16, width=16):
    """Every one of the 256 intensities equally often (needs H*W % 256 == 0)."""
    if (height * width) % 256:
        raise ValueError("pixel count must be a multiple of 256")
    return np.tile(np.arange(256, dtype=np.uint8), height * width // 256).reshape(height, width)


def cifar_like(n=60000, size=32, seed=0):
    """An ``(n, size, size)`` uint8 stack with a spread of entropies."""
    rng = np.random.default_rng(seed)
    levels = rng.integers(2, 257, size=n)
    out = np.empty((n, size, size), dtype=np.uint8)
    for lv in np.unique(levels):
        idx = np.flatnonzero(levels == lv)
        out[idx] = level_noise(rng, (idx.size, size, size), int(lv))
    return out


def _save(arr, path):
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(arr, mode="L").save(path, format="PNG", optimize=False)


def write_flat_set(root, n=12, size=16, levels=(4, 256), seed=0):
    rng = np.random.default_rng(seed)
    root = Path(root)
    for i in range(n):
        lv = int(rng.integers(levels[0], levels[1] + 1))
        _save(level_noise(rng, (size, size), lv), root / f"img_{i:03d}.png")
    return root


def write_class_set(root, per_class=8, size=16, class_levels=None, seed=0):
    rng = np.random.default_rng(seed)
    root = Path(root)
    for label, (lo, hi) in sorted((class_levels or CLASS_LEVELS).items()):
        for i in range(per_class):
            lv = int(rng.integers(lo, hi + 1))
            _save(level_noise(rng, (size, size), lv), root / label / f"{label}_{i:03d}.png")
    return root


def write_bundled(root):
    """Regenerate the datasets shipped in ``nofade/data/datasets``."""
    root = Path(root)
    write_class_set(root / "synth-cls", seed=1)
    write_flat_set(root / "synth-seg", levels=(16, 256), seed=2)
    write_flat_set(root / "synth-det", levels=(4, 128), seed=3)
    return root


def bundled_dataset(name):
    if name not in BUNDLED:
        raise KeyError(f"no bundled dataset {name!r}; choose from {', '.join(BUNDLED)}")
    return Path(str(resources.files("nofade") / "data" / "datasets" / name))


def sample_registry_path():
    return Path(str(resources.files("nofade") / "data" / "sample_registry.csv"))
