"""Training energy and CO2 estimates from FLOPs, hardware ratios and GPU hours.

Energy follows ``P [Wh] = f * (omega_gpu + omega_cpu) * gpu_hours`` taken
literally, with ``omega = TDP / peak FLOP/s`` per device. Emissions convert
Wh to kWh before applying a tonnes-per-kWh carbon intensity.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .exceptions import ConfigurationError, HardwareLookupError, ValidationError

#: EPA grid factor, metric tonnes CO2 per kWh.
DEFAULT_CARBON_INTENSITY = 0.707e-3
DEFAULT_CPU_RATIO = 1.0e-11
CPU_PREFIX = "cpu:"


@dataclass(frozen=True)
class GpuSpec:
    name: str
    tdp: float
    peak_flops: float
    source: str = ""

    def __post_init__(self):
        for attr in ("tdp", "peak_flops"):
            value = getattr(self, attr)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{self.name}: {attr} must be a positive number, got {value!r}")


@dataclass(frozen=True)
class WattPerFlop:
    omega_g: float
    omega_c: float = 0.0

    def __post_init__(self):
        for attr in ("omega_g", "omega_c"):
            value = getattr(self, attr)
            if not (math.isfinite(value) and value >= 0):
                raise ValidationError(f"{attr} must be finite and >= 0, got {value!r}")

    @property
    def total(self):
        return self.omega_g + self.omega_c


@dataclass(frozen=True)
class CarbonEstimate:
    power_wh: float
    co2_tonnes: float
    intensity: float


@dataclass(frozen=True)
class CarbonConfig:
    intensity: float = DEFAULT_CARBON_INTENSITY
    cpu_ratio: float = DEFAULT_CPU_RATIO

    def __post_init__(self):
        if not (math.isfinite(self.intensity) and self.intensity > 0):
            raise ConfigurationError(f"carbon intensity must be > 0, got {self.intensity!r}")
        if not (math.isfinite(self.cpu_ratio) and self.cpu_ratio >= 0):
            raise ConfigurationError(f"CPU ratio must be >= 0, got {self.cpu_ratio!r}")


class HardwareDatabase:
    """Read-only mapping of GPU name to GpuSpec, plus CPU reference entries."""

    def __init__(self, gpus, cpus=None, default_cpu=None, path=None):
        self.gpus = dict(gpus)
        self.cpus = dict(cpus or {})
        self.default_cpu = default_cpu
        self.path = path

    def __getitem__(self, name):
        try:
            return self.gpus[name]
        except KeyError:
            raise HardwareLookupError(name, self.gpus) from None

    def __contains__(self, name):
        return name in self.gpus

    def __iter__(self):
        return iter(self.gpus)

    def __len__(self):
        return len(self.gpus)

    def default_cpu_ratio(self):
        if self.default_cpu is None:
            return DEFAULT_CPU_RATIO
        return watt_per_flop(self.cpus[self.default_cpu])


def default_hardware_path():
    return Path(str(resources.files("nofade") / "data" / "hardware.ini"))


def load_hardware_db(path=None):
    """Parse an INI-style hardware file (one section per device)."""
    path = Path(path) if path is not None else default_hardware_path()
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigurationError(f"{path}: cannot read hardware database ({exc})") from exc
    except configparser.Error as exc:
        raise ConfigurationError(f"{path}: malformed hardware database ({exc})") from exc

    gpus, cpus = {}, {}
    for section in parser.sections():
        if section == "defaults":
            continue
        entry = parser[section]
        try:
            spec = GpuSpec(section, float(entry["tdp_watts"]), float(entry["peak_flops"]),
                           entry.get("source", ""))
        except KeyError as exc:
            raise ConfigurationError(f"{path}: [{section}] missing {exc.args[0]}") from exc
        except ValueError as exc:
            raise ConfigurationError(f"{path}: [{section}] {exc}") from exc
        (cpus if section.startswith(CPU_PREFIX) else gpus)[section] = spec

    default_cpu = parser.get("defaults", "cpu", fallback=None)
    if default_cpu is not None and default_cpu not in cpus:
        raise ConfigurationError(f"{path}: default cpu {default_cpu!r} has no entry")
    return HardwareDatabase(gpus, cpus, default_cpu, path)


def watt_per_flop(spec):
    return spec.tdp / spec.peak_flops


def power_draw(flops, ratios, gpu_hours):
    """Energy in watt-hours: ``flops * (omega_g + omega_c) * gpu_hours``."""
    if not isinstance(ratios, WattPerFlop):
        ratios = WattPerFlop(float(ratios))
    for name, value in (("flops", flops), ("gpu_hours", gpu_hours)):
        if not (math.isfinite(value) and value >= 0):
            raise ValidationError(f"{name} must be finite and >= 0, got {value!r}")
    return flops * ratios.total * gpu_hours


def co2_emissions(power_wh, intensity=DEFAULT_CARBON_INTENSITY):
    """Metric tonnes of CO2 for ``power_wh`` at ``intensity`` t/kWh."""
    if not (math.isfinite(intensity) and intensity > 0):
        raise ConfigurationError(f"carbon intensity must be > 0, got {intensity!r}")
    if not (math.isfinite(power_wh) and power_wh >= 0):
        raise ValidationError(f"power must be finite and >= 0, got {power_wh!r}")
    return (power_wh / 1000.0) * intensity


def estimate_record(record, hardware, config=None):
    config = config or CarbonConfig()
    ratios = WattPerFlop(watt_per_flop(hardware[record.gpu_type]), config.cpu_ratio)
    wh = power_draw(record.flops, ratios, record.gpu_hours)
    return CarbonEstimate(wh, co2_emissions(wh, config.intensity), config.intensity)
