"""Drive-cycle ingestion and resampling.

A cycle is a speed trace v(t) in m/s. Acceleration is the forward difference
over each step, with the last sample held at zero.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import NamedTuple

import numpy as np

KMH = 1.0 / 3.6

SPEED_UNITS = {"m/s": 1.0, "ms": 1.0, "km/h": KMH, "kmh": KMH}


class CycleError(ValueError):
    pass


class CycleParseError(CycleError):
    def __init__(self, path, lineno: int, line: str):
        super().__init__(f"{path}:{lineno}: cannot parse {line!r} as 'time,speed'")
        self.lineno = lineno


class CycleValidationError(CycleError):
    pass


class CyclePoint(NamedTuple):
    t: float
    v: float
    a: float


def forward_acceleration(t: np.ndarray, v: np.ndarray) -> np.ndarray:
    a = np.zeros_like(v)
    a[:-1] = np.diff(v) / np.diff(t)
    return a


@dataclass(frozen=True, eq=False)
class DriveCycle:
    """Immutable speed trace. ``t`` in s, ``v`` in m/s."""

    name: str
    t: np.ndarray
    v: np.ndarray
    a: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        v = np.array(self.v, dtype=float)
        if t.ndim != 1 or t.shape != v.shape:
            raise CycleValidationError("time and speed must be 1-D arrays of equal length")
        if len(t) < 2:
            raise CycleValidationError("a cycle needs at least 2 points")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(v)):
            raise CycleValidationError("non-finite time or speed")
        steps = np.diff(t)
        if np.any(steps <= 0):
            i = int(np.argmax(steps <= 0)) + 1
            raise CycleValidationError(f"time not strictly increasing at sample {i} (t={t[i]})")
        if np.any(v < 0):
            i = int(np.argmax(v < 0))
            raise CycleValidationError(f"negative speed at sample {i} (t={t[i]})")
        a = forward_acceleration(t, v)
        for arr in (t, v, a):
            arr.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "a", a)

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])

    @property
    def dt(self) -> np.ndarray:
        """Step lengths, one per sample; the last sample carries zero weight."""
        d = np.zeros_like(self.t)
        d[:-1] = np.diff(self.t)
        return d

    @property
    def points(self) -> list[CyclePoint]:
        return [CyclePoint(float(t), float(v), float(a)) for t, v, a in zip(self.t, self.v, self.a)]

    @property
    def is_uniform(self) -> bool:
        steps = np.diff(self.t)
        return bool(np.allclose(steps, steps[0], rtol=1e-9, atol=0))

    def distance(self) -> float:
        return float(np.trapezoid(self.v, self.t))

    def __len__(self):
        return len(self.t)

    def __eq__(self, other):
        if not isinstance(other, DriveCycle):
            return NotImplemented
        return (
            self.name == other.name
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.v, other.v)
        )


_SPLIT = re.compile(r"[,\s]+")


def parse_cycle_text(text: str, speed_unit: str = "km/h", name: str = "cycle", source="<string>") -> DriveCycle:
    try:
        scale = SPEED_UNITS[speed_unit]
    except KeyError:
        raise ValueError(f"unknown speed unit {speed_unit!r}; expected one of {sorted(SPEED_UNITS)}") from None

    times, speeds = [], []
    header_allowed = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f for f in _SPLIT.split(line) if f]
        try:
            if len(fields) != 2:
                raise ValueError
            t, s = float(fields[0]), float(fields[1])
        except ValueError:
            # one optional header line before any data
            if header_allowed and not any(_is_number(f) for f in fields):
                header_allowed = False
                continue
            raise CycleParseError(source, lineno, raw) from None
        header_allowed = False
        times.append(t)
        speeds.append(s * scale)

    if len(times) < 2:
        raise CycleValidationError(f"{source}: need at least 2 data rows, found {len(times)}")
    return DriveCycle(name, np.array(times), np.array(speeds))


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def load_cycle(path, speed_unit: str = "km/h", name: str | None = None) -> DriveCycle:
    """Read a two-column ``time,speed`` file (comma or whitespace delimited).

    Lines starting with ``#`` are ignored and a single header line is allowed.
    Speeds are converted to m/s from ``speed_unit``.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_cycle_text(text, speed_unit, name=name or path.stem, source=path)


def wltc_class3_path() -> Path:
    return Path(str(resources.files("emscale") / "data" / "wltc_class3.csv"))


def wltc_class3() -> DriveCycle:
    """The bundled WLTC class 3b trace (1 Hz, 1800 s)."""
    return load_cycle(wltc_class3_path(), "km/h", name="WLTC class 3b")


def resample(cycle: DriveCycle, dt: float = 1.0) -> DriveCycle:
    """Linearly interpolate speed onto a uniform grid starting at the first sample."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    n = int(np.floor(cycle.duration / dt + 1e-9))
    t = cycle.t[0] + dt * np.arange(n + 1)
    v = np.interp(t, cycle.t, cycle.v)
    return DriveCycle(cycle.name, t, v)
