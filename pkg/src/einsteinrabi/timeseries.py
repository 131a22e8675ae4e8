"""Uniform-ish time grids carrying named value channels, and their CSV form."""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

FLOAT_FORMAT = "%.14e"  # 15 significant digits, locale independent


@dataclass
class TimeSeries:
    t: np.ndarray
    channels: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float).reshape(-1)
        if self.t.size > 1 and np.any(np.diff(self.t) <= 0):
            raise DomainError("time axis must be strictly increasing")
        checked = {}
        for name, values in self.channels.items():
            arr = np.asarray(values, dtype=float).reshape(-1)
            if arr.size != self.t.size:
                raise DomainError(
                    f"channel {name!r} has {arr.size} values for {self.t.size} times"
                )
            checked[name] = arr
        self.channels = checked

    def __len__(self) -> int:
        return self.t.size

    def __getitem__(self, name: str) -> np.ndarray:
        return self.channels[name]

    def add(self, name: str, values) -> None:
        arr = np.asarray(values, dtype=float).reshape(-1)
        if arr.size != self.t.size:
            raise DomainError(f"channel {name!r} has wrong length")
        self.channels[name] = arr

    def to_csv(self, time_header: str = "t_s") -> str:
        names = list(self.channels)
        lines = [",".join([time_header, *names])]
        cols = [self.t, *(self.channels[n] for n in names)]
        for row in zip(*cols):
            lines.append(",".join(FLOAT_FORMAT % v for v in row))
        return "\n".join(lines) + "\n"

    def write_csv(self, stream: io.TextIOBase) -> None:
        stream.write(self.to_csv())


def time_grid(t_max: float, points: int) -> np.ndarray:
    """``points`` equally spaced times on [0, t_max]; t_max = 0 gives the single time 0."""
    if t_max < 0 or points < 1:
        raise DomainError("grid needs t_max >= 0 and points >= 1")
    if t_max == 0:
        return np.zeros(1)
    if points < 2:
        raise DomainError("a non-trivial grid needs at least two points")
    return np.linspace(0.0, t_max, points)
