"""Image decoding, greyscale conversion and intensity histograms."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .exceptions import CorruptImageError, ImageDecodeError, UnsupportedFormatError, ValidationError

# Pillow reports binary PGM under its PPM plugin.
SUPPORTED_FORMATS = frozenset({"PNG", "JPEG", "PPM", "BMP"})
IMAGE_SUFFIXES = frozenset({".png", ".jpg", ".jpeg", ".pgm", ".bmp"})

LUMA_WEIGHTS = (0.299, 0.587, 0.114)
N_LEVELS = 256


def _readonly(arr):
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GreyImage:
    """Single-channel 8-bit image.

    ``pixels`` is a read-only ``(height, width)`` uint8 array.
    """

    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 2:
            raise ValidationError(f"grey image must be 2-D, got shape {pixels.shape}")
        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ValidationError("grey image must have at least one pixel")
        if pixels.dtype != np.uint8:
            if pixels.size and (pixels.min() < 0 or pixels.max() > 255):
                raise ValidationError("intensities must lie in [0, 255]")
            if np.issubdtype(pixels.dtype, np.floating) and not np.all(pixels == np.floor(pixels)):
                raise ValidationError("intensities must be integers")
            pixels = pixels.astype(np.uint8)
        object.__setattr__(self, "pixels", _readonly(pixels))

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def intensities(self):
        """Row-major flat view of the pixels."""
        return self.pixels.reshape(-1)

    def __eq__(self, other):
        if not isinstance(other, GreyImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class IntensityHistogram:
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (N_LEVELS,):
            raise ValidationError(f"histogram needs {N_LEVELS} bins, got shape {counts.shape}")
        if np.any(counts < 0):
            raise ValidationError("histogram counts must be non-negative")
        object.__setattr__(self, "counts", _readonly(counts))

    @property
    def total(self):
        return int(self.counts.sum())

    @property
    def n_levels_present(self):
        return int(np.count_nonzero(self.counts))

    def probabilities(self):
        return self.counts / self.total

    def __add__(self, other):
        if not isinstance(other, IntensityHistogram):
            return NotImplemented
        return IntensityHistogram(self.counts + other.counts)

    def __eq__(self, other):
        if not isinstance(other, IntensityHistogram):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)

    __hash__ = None


def _to_8bit(arr, mode):
    if mode in ("I;16", "I;16B", "I;16L", "I;16N"):
        return (arr.astype(np.uint32) >> 8).astype(np.uint8)
    if mode == "I":
        # 32-bit container Pillow uses for 16-bit sources.
        return (np.clip(arr, 0, 65535).astype(np.uint32) >> 8).astype(np.uint8)
    if mode == "F":
        return np.clip(np.floor(arr + 0.5), 0, 255).astype(np.uint8)
    return arr.astype(np.uint8)


def decode_image(path):
    """Read an image file into a ``(H, W)`` or ``(H, W, 3)`` uint8 array.

    Alpha is discarded, never composited. Sources deeper than 8 bits are
    right-shifted down to 8 bits.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            fmt = im.format
            if fmt not in SUPPORTED_FORMATS:
                raise UnsupportedFormatError(path, f"unsupported format {fmt}")
            im.load()
            mode = im.mode
            if mode in ("L", "I;16", "I;16B", "I;16L", "I;16N", "I", "F"):
                return _to_8bit(np.asarray(im), mode)
            if mode == "1":
                return np.asarray(im.convert("L"))
            if mode == "LA":
                return np.asarray(im)[..., 0].copy()
            if mode in ("RGB", "RGBA", "RGBX"):
                return np.asarray(im)[..., :3].copy()
            if mode == "P":
                im = im.convert("RGBA") if "transparency" in im.info else im.convert("RGB")
                return np.asarray(im)[..., :3].copy()
            return np.asarray(im.convert("RGB"))
    except ImageDecodeError:
        raise
    except FileNotFoundError as exc:
        raise ImageDecodeError(path, "file not found") from exc
    except UnidentifiedImageError as exc:
        raise UnsupportedFormatError(path, "not a recognised image format") from exc
    except (OSError, SyntaxError, ValueError) as exc:
        raise CorruptImageError(path, f"corrupt image stream ({exc})") from exc


def to_greyscale(raster):
    """BT.601 luma with round-half-up. 2-D input passes through unchanged."""
    raster = np.asarray(raster)
    if raster.ndim == 2:
        return GreyImage(raster)
    if raster.ndim != 3 or raster.shape[2] != 3:
        raise ValidationError(f"expected an (H, W, 3) raster, got shape {raster.shape}")
    rgb = raster.astype(np.float64)
    luma = rgb[..., 0] * LUMA_WEIGHTS[0] + rgb[..., 1] * LUMA_WEIGHTS[1] + rgb[..., 2] * LUMA_WEIGHTS[2]
    # floor(x + 0.5) absorbs the tiny underflow of grey pixels (v, v, v).
    grey = np.clip(np.floor(luma + 0.5), 0, 255).astype(np.uint8)
    return GreyImage(grey)


def intensity_histogram(image):
    if not isinstance(image, GreyImage):
        image = GreyImage(image)
    return IntensityHistogram(np.bincount(image.intensities, minlength=N_LEVELS))


def load_grey(path):
    """decode_image followed by to_greyscale."""
    return to_greyscale(decode_image(path))


def iter_image_files(directory):
    """Supported image files directly under ``directory``, sorted by name."""
    directory = Path(directory)
    return sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )
