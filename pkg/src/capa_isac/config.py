"""System parameters and aperture geometry.

SNRs are stored in dB (the form used in config files) and exposed as linear
ratios through properties, so a config survives a JSON round trip exactly.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class ConfigError(ValueError):
    """Invalid or unparsable configuration. ``field`` names the offending key."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


@dataclass(frozen=True)
class SystemConfig:
    wavelength: float = 0.125
    tx_length: float = 1.25
    rx_length: float = 1.25
    gap: float = 0.25
    target_pos: tuple[float, float, float] = (2.0, 1.0, 1.0)
    user_pos: tuple[float, float, float] = (4.0, 0.0, 0.0)
    snr_sense_db: float = 50.0
    snr_comm_db: float = 50.0
    frame_len: int = 4
    rcs_power: float = 1.0
    target_rate: float = 5.0
    quadrature_order: int = 1000
    mc_samples: int = 100_000
    seed: int = 20240601

    def __post_init__(self):
        object.__setattr__(self, "target_pos", tuple(float(v) for v in self.target_pos))
        object.__setattr__(self, "user_pos", tuple(float(v) for v in self.user_pos))
        validate(self)

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def snr_sense(self) -> float:
        return 10.0 ** (self.snr_sense_db / 10.0)

    @property
    def snr_comm(self) -> float:
        return 10.0 ** (self.snr_comm_db / 10.0)

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["target_pos"] = list(self.target_pos)
        d["user_pos"] = list(self.user_pos)
        return d


@dataclass(frozen=True)
class ApertureInterval:
    lo: float
    hi: float
    kind: str = field(default="transmit")

    def __post_init__(self):
        if self.kind not in ("transmit", "receive"):
            raise ValueError(f"unknown aperture kind {self.kind!r}")
        if not self.hi >= self.lo:
            raise ValueError("aperture interval must satisfy hi >= lo")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)


def _require(cond: bool, field: str, message: str):
    if not cond:
        raise ConfigError(message, field)


def validate(cfg: SystemConfig) -> None:
    """Check physical consistency; raise ConfigError naming the first bad field."""
    for name in ("wavelength", "tx_length", "rx_length", "gap", "snr_sense_db",
                 "snr_comm_db", "rcs_power", "target_rate"):
        _require(math.isfinite(getattr(cfg, name)), name, f"{name} must be finite")
    _require(cfg.wavelength > 0, "wavelength", "wavelength must be positive")
    _require(cfg.tx_length > 0, "tx_length", "tx_length must be positive")
    _require(cfg.rx_length > 0, "rx_length", "rx_length must be positive")
    _require(cfg.gap >= 0, "gap", "gap must be nonnegative")
    _require(len(cfg.target_pos) == 3, "target_pos", "target_pos must be a 3-vector")
    _require(len(cfg.user_pos) == 3, "user_pos", "user_pos must be a 3-vector")
    _require(all(math.isfinite(v) for v in cfg.target_pos + cfg.user_pos),
             "target_pos", "positions must be finite")
    px, py, _ = cfg.target_pos
    _require(px * px + py * py > 0, "target_pos", "target on array axis")
    _require(isinstance(cfg.frame_len, int) and cfg.frame_len >= 1,
             "frame_len", "frame_len must be a positive integer")
    _require(cfg.rcs_power >= 0, "rcs_power", "rcs_power must be nonnegative")
    _require(cfg.target_rate >= 0, "target_rate", "target_rate must be nonnegative")
    _require(isinstance(cfg.quadrature_order, int) and cfg.quadrature_order >= 1,
             "quadrature_order", "quadrature_order must be a positive integer")
    _require(isinstance(cfg.mc_samples, int) and cfg.mc_samples >= 1,
             "mc_samples", "mc_samples must be a positive integer")
    _require(isinstance(cfg.seed, int) and 0 <= cfg.seed < 2**64,
             "seed", "seed must be a 64-bit unsigned integer")


_INT_FIELDS = {"frame_len", "quadrature_order", "mc_samples", "seed"}
_VEC_FIELDS = {"target_pos", "user_pos"}
FIELD_NAMES = tuple(f.name for f in dataclasses.fields(SystemConfig))


def config_from_dict(data: dict) -> SystemConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(data) - set(FIELD_NAMES))
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(unknown)}", unknown[0])
    kwargs = {}
    for key, value in data.items():
        try:
            if key in _INT_FIELDS:
                if isinstance(value, bool) or float(value) != int(value):
                    raise ValueError
                kwargs[key] = int(value)
            elif key in _VEC_FIELDS:
                kwargs[key] = tuple(float(v) for v in value)
            else:
                kwargs[key] = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} has invalid value {value!r}", key) from None
    return SystemConfig(**kwargs)


def load_config(path: str | Path) -> SystemConfig:
    """Read a flat JSON config; omitted fields take the built-in defaults."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return config_from_dict(data)


def dump_config(cfg: SystemConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)


def save_config(cfg: SystemConfig, path: str | Path) -> None:
    Path(path).write_text(dump_config(cfg) + "\n")


def tx_interval(cfg: SystemConfig) -> ApertureInterval:
    return ApertureInterval(cfg.gap / 2, cfg.gap / 2 + cfg.tx_length, "transmit")


def rx_interval(cfg: SystemConfig) -> ApertureInterval:
    return ApertureInterval(-cfg.gap / 2 - cfg.rx_length, -cfg.gap / 2, "receive")


def dof(length: float, wavelength: float) -> int:
    """Effective spatial DoF 2L/lambda, rounded half-up with a floor of 1."""
    return max(1, int(math.floor(2.0 * length / wavelength + 0.5)))


def as_position(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape != (3,):
        raise ValueError("position must be a 3-vector")
    return arr
