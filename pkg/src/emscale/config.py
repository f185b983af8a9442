"""Flat ``section.key = value`` run configuration.

Every value carries a source tag: ``published`` for the study's vehicle data,
bounds and performance targets, ``default`` for surrogate constants and
artifact defaults, ``config`` when the file sets it.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .cycle import KMH
from .design import MODES
from .motor import DEFAULT_BOUNDS, ReferenceMachine
from .runner import DEFAULT_PENALTY_FALLBACK
from .sim import PerformanceSpec
from .vehicle import VehicleParams

BUILTIN_CYCLE = "builtin:wltc3"


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _pair(text: str) -> tuple[float, float]:
    lo, hi = (float(p) for p in text.split(","))
    if not lo < hi:
        raise ValueError(f"lower bound {lo} must be below upper bound {hi}")
    return lo, hi


def _seeds(text: str) -> tuple[int, ...]:
    seeds = tuple(int(p) for p in text.split(",") if p.strip())
    if not seeds:
        raise ValueError("at least one seed required")
    return seeds


def _mode(text: str) -> str:
    if text not in MODES + ("both",):
        raise ValueError(f"expected one of {MODES + ('both',)}")
    return text


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise ValueError("must be >= 1")
    return n


def _positive_float(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise ValueError("must be positive")
    return x


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


PUBLISHED_VEHICLE = {"m_v", "r_w", "rho_a", "c_d", "A_f", "g", "eta_g"}
PUBLISHED_SPEC = {"v_max_kmh", "v_acc_kmh", "t_acc", "alpha_max"}

# key -> (parser, default, source)
SCHEMA: dict[str, tuple] = {}
for f in dataclasses.fields(VehicleParams):
    parser = _bool if f.type in (bool, "bool") else float
    SCHEMA[f"vehicle.{f.name}"] = (parser, f.default, "published" if f.name in PUBLISHED_VEHICLE else "default")
for f in dataclasses.fields(ReferenceMachine):
    SCHEMA[f"motor.{f.name}"] = (float, f.default, "default")
_spec = PerformanceSpec()
for key, default in {
    "v_max_kmh": 180.0,
    "v_acc_kmh": 100.0,
    "t_acc": _spec.t_acc,
    "alpha_max": _spec.alpha_max,
    "v_grade_kmh": 1.0,
    "dt_acc": _spec.dt_acc,
    "t_cap": _spec.t_cap,
}.items():
    SCHEMA[f"spec.{key}"] = (float, default, "published" if key in PUBLISHED_SPEC else "default")
for name, pair in DEFAULT_BOUNDS.items():
    SCHEMA[f"bounds.{name}"] = (_pair, pair, "published")
SCHEMA.update({
    "run.mode": (_mode, "both", "default"),
    "run.iters": (_positive_int, 50, "published"),
    "run.seeds": (_seeds, (1, 2, 3), "default"),
    "run.cycle": (str, BUILTIN_CYCLE, "default"),
    "run.speed_unit": (str, "kmh", "default"),
    "run.dt": (_positive_float, 1.0, "default"),
    "run.out": (str, "runs", "default"),
    "run.trace": (_bool, False, "default"),
    "run.jobs": (_positive_int, 1, "default"),
    "run.penalty_fallback": (_positive_float, DEFAULT_PENALTY_FALLBACK, "default"),
})


@dataclass
class RunConfig:
    values: dict
    sources: dict

    def __getitem__(self, key):
        return self.values[key]

    def with_overrides(self, **overrides) -> "RunConfig":
        """Apply command-line overrides, keyed ``section.key``; ``None`` is ignored."""
        values, sources = dict(self.values), dict(self.sources)
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in SCHEMA:
                raise ConfigError(key, "unknown key")
            values[key] = value
            sources[key] = "config"
        cfg = RunConfig(values, sources)
        cfg.build()
        return cfg

    def section(self, name: str) -> dict:
        prefix = name + "."
        return {k[len(prefix):]: v for k, v in self.values.items() if k.startswith(prefix)}

    @property
    def vehicle(self) -> VehicleParams:
        return VehicleParams(**self.section("vehicle"))

    @property
    def reference(self) -> ReferenceMachine:
        return ReferenceMachine(**self.section("motor"))

    @property
    def spec(self) -> PerformanceSpec:
        s = self.section("spec")
        return PerformanceSpec(
            v_max=s["v_max_kmh"] * KMH,
            v_acc=s["v_acc_kmh"] * KMH,
            t_acc=s["t_acc"],
            alpha_max=s["alpha_max"],
            v_grade=s["v_grade_kmh"] * KMH,
            dt_acc=s["dt_acc"],
            t_cap=s["t_cap"],
        )

    @property
    def bounds(self) -> dict:
        return self.section("bounds")

    @property
    def modes(self) -> tuple[str, ...]:
        mode = self.values["run.mode"]
        return ("proportional", "combined") if mode == "both" else (mode,)

    def build(self):
        """Construct every typed section once so value errors surface with a key."""
        for section, ctor in (("vehicle", VehicleParams), ("motor", ReferenceMachine)):
            try:
                ctor(**self.section(section))
            except ValueError as exc:
                raise ConfigError(section, str(exc)) from None
        try:
            self.spec
        except ValueError as exc:
            raise ConfigError("spec", str(exc)) from None
        for name, (lo, hi) in self.bounds.items():
            if name != "gamma" and lo <= 0:
                raise ConfigError(f"bounds.{name}", "scaling factors must stay positive")
        if self.values["run.speed_unit"] not in ("kmh", "ms", "km/h", "m/s"):
            raise ConfigError("run.speed_unit", "expected kmh or ms")
        return self

    def to_text(self) -> str:
        lines = ["# emscale run configuration (effective values)"]
        section = None
        for key in SCHEMA:
            head = key.split(".")[0]
            if head != section:
                lines.append("")
                section = head
            lines.append(f"{key} = {_fmt(self.values[key])}  # source: {self.sources[key]}")
        return "\n".join(lines) + "\n"


def default_config() -> RunConfig:
    return RunConfig({k: v[1] for k, v in SCHEMA.items()}, {k: v[2] for k, v in SCHEMA.items()})


@dataclass
class ConfigReport:
    config: RunConfig | None
    unknown: list = field(default_factory=list)
    missing: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not (self.unknown or self.errors)

    def lines(self) -> list[str]:
        out = [f"unknown key: {k}" for k in self.unknown]
        out += [f"error: {e}" for e in self.errors]
        out += [f"warning: {w}" for w in self.warnings]
        out += [f"missing: {k} (default {_fmt(SCHEMA[k][1])}, source: {SCHEMA[k][2]})" for k in self.missing]
        return out


def parse_config_text(text: str, source="<string>") -> ConfigReport:
    values, sources = {}, {}
    report = ConfigReport(None)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            report.errors.append(f"{source}:{lineno}: expected 'section.key = value'")
            continue
        key, _, value = (p.strip() for p in line.partition("="))
        if key not in SCHEMA:
            report.unknown.append(key)
            continue
        try:
            values[key] = SCHEMA[key][0](value)
        except ValueError as exc:
            report.errors.append(f"{key}: {exc}")
            continue
        sources[key] = "config"

    for key, (_, default, tag) in SCHEMA.items():
        if key not in values:
            values[key] = default
            sources[key] = tag
            report.missing.append(key)

    for name, (lo, hi) in DEFAULT_BOUNDS.items():
        clo, chi = values[f"bounds.{name}"]
        if clo < lo:
            report.warnings.append(f"bounds.{name}: lower bound {clo:g} below published bound {lo:g}")
        if chi > hi:
            report.warnings.append(f"bounds.{name}: upper bound {chi:g} exceeds published bound {hi:g}")

    cfg = RunConfig(values, sources)
    if not report.errors:
        try:
            cfg.build()
        except ConfigError as exc:
            report.errors.append(str(exc))
    report.config = cfg
    return report


def validate_config(path) -> ConfigReport:
    """Parse ``path`` and report unknown, missing and out-of-range keys.

    Raises ``OSError`` if the file cannot be read.
    """
    text = Path(path).read_text(encoding="utf-8")
    return parse_config_text(text, source=path)


def load_config(path=None) -> RunConfig:
    if path is None:
        return default_config().build()
    report = validate_config(path)
    if report.unknown:
        raise ConfigError(report.unknown[0], "unknown key")
    if report.errors:
        raise ConfigError(str(path), "; ".join(report.errors))
    return report.config
