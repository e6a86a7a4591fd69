from __future__ import annotations

from dataclasses import asdict, dataclass, fields


@dataclass(frozen=True)
class SuiteConfig:
    """Battery parameters. The defaults are the published run configuration."""

    stream_length: int = 1_000_000
    num_streams: int = 100
    block_frequency_m: int = 128
    nonoverlapping_m: int = 9
    overlapping_m: int = 9
    approx_entropy_m: int = 10
    serial_m: int = 16
    linear_complexity_m: int = 500
    alpha: float = 0.01
    uniformity_alpha: float = 0.0001
    histogram_bins: int = 10
    strict_band: bool = False

    def __post_init__(self):
        for name in ("stream_length", "num_streams", "block_frequency_m", "nonoverlapping_m",
                     "overlapping_m", "approx_entropy_m", "serial_m", "linear_complexity_m"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.serial_m < 2:
            raise ValueError("serial_m must be at least 2")
        if not 0 < self.alpha < 1 or not 0 < self.uniformity_alpha < 1:
            raise ValueError("alpha values must lie in (0, 1)")
        if self.histogram_bins < 2:
            raise ValueError("histogram_bins must be at least 2")

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})
