"""Experiment configuration: strict JSON, validated against a bundled schema."""
from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .exceptions import ConfigError, SpecError
from .model import BathSpec, ShellWindow, SystemSpec, kappa_of

__all__ = [
    "SCHEMA",
    "SystemConfig",
    "BathConfig",
    "ShellConfig",
    "RunConfig",
    "TwoLevelConfig",
    "OutputConfig",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "parse_window",
]

SCHEMA: dict = json.loads(
    resources.files("thermalize").joinpath("config.schema.json").read_text()
)


def parse_window(text) -> tuple[int, int]:
    """``"a:b"`` or ``[a, b]`` to an inclusive ``(a, b)``."""
    if isinstance(text, (list, tuple)):
        lo, hi = text
    else:
        m = re.fullmatch(r"\s*(\d+)\s*:\s*(\d+)\s*", str(text))
        if not m:
            raise ValueError(f"fit window must look like 'a:b', got {text!r}")
        lo, hi = m.groups()
    lo, hi = int(lo), int(hi)
    if hi < lo:
        raise ValueError(f"fit window {lo}:{hi} is reversed")
    return lo, hi


@dataclass(frozen=True)
class SystemConfig:
    kind: str = "harmonic"
    omega: float | None = None
    M: int | None = None
    energies: tuple[float, ...] | None = None
    couplings: tuple[float, ...] | None = None

    def build(self) -> SystemSpec:
        if self.kind == "harmonic":
            if self.omega is None or self.M is None:
                raise SpecError("harmonic system needs omega and M")
            return SystemSpec.harmonic(self.omega, self.M)
        if self.energies is None or self.couplings is None:
            raise SpecError("explicit system needs energies and couplings")
        return SystemSpec(self.energies, self.couplings)


@dataclass(frozen=True)
class BathConfig:
    N: int
    frequency: float | tuple[float, ...]
    strength: float | tuple[float, ...] = 1.0
    quantum_unit: float | None = None
    kappa_target: float | None = None

    def _expand(self, value, name) -> tuple[float, ...]:
        if isinstance(value, tuple):
            if len(value) != self.N:
                raise SpecError(f"bath.{name} has {len(value)} entries, N is {self.N}")
            return value
        return (float(value),) * self.N

    def build(self, kappa: float | None = None) -> BathSpec:
        """Bath spec; ``kappa`` (or ``kappa_target``) rescales the strengths uniformly."""
        freqs = self._expand(self.frequency, "frequency")
        strengths = self._expand(self.strength, "strength")
        unit = self.quantum_unit
        if unit is None and len(set(freqs)) == 1:
            unit = freqs[0]
        bath = BathSpec(freqs, strengths, unit)
        target = self.kappa_target if kappa is None else kappa
        if target is None:
            return bath
        if target < 0:
            raise SpecError("kappa must be non-negative")
        current = kappa_of(bath)
        if target == 0:
            return bath.scaled(0.0)
        if current == 0:
            raise SpecError("cannot rescale all-zero strengths to a positive kappa")
        return bath.scaled(math.sqrt(target / current))


@dataclass(frozen=True)
class ShellConfig:
    E: float
    delta: float

    def build(self) -> ShellWindow:
        return ShellWindow(self.E, self.delta)


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    samples: int = 100
    mode: str = "analytic"
    fit_window: tuple[int, int] | None = None
    kappas: tuple[float, ...] | None = None
    cap: int = 10**6
    exclude_negative_deformed: bool = False
    fit_abscissa: str = "deformed"


@dataclass(frozen=True)
class TwoLevelConfig:
    beta: float
    delta: float
    F: tuple[float, ...]


@dataclass(frozen=True)
class OutputConfig:
    format: str = "csv"
    path: str | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemConfig | None = None
    bath: BathConfig | None = None
    shell: ShellConfig | None = None
    run: RunConfig = field(default_factory=RunConfig)
    two_level: TwoLevelConfig | None = None
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self) -> dict:
        def clean(obj):
            if isinstance(obj, dict):
                return {k: clean(v) for k, v in obj.items() if v is not None}
            if isinstance(obj, (list, tuple)):
                return [clean(v) for v in obj]
            return obj

        out = clean(asdict(self))
        window = self.run.fit_window
        if window is not None:
            out["run"]["fit_window"] = f"{window[0]}:{window[1]}"
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form, ignoring where output is written."""
        doc = self.to_dict()
        doc.get("output", {}).pop("path", None)
        canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def require(self, *sections: str):
        missing = [s for s in sections if getattr(self, s) is None]
        if missing:
            raise ConfigError(f"config is missing section(s): {', '.join(missing)}")


def _line_of(text: str, path) -> int | None:
    """Best-effort line number of the key at ``path`` inside the JSON text."""
    pos = 0
    found = None
    for key in path:
        if isinstance(key, int):
            continue
        idx = text.find(json.dumps(key), pos)
        if idx < 0:
            break
        pos = idx
        found = text.count("\n", 0, idx) + 1
    return found


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate config JSON text; errors carry a line number."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, exc.lineno) from exc
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: [str(p) for p in e.absolute_path])
    if errors:
        err = errors[0]
        path = list(err.absolute_path)
        if err.validator == "additionalProperties":
            extra = [k for k in err.instance if k not in err.schema.get("properties", {})]
            path = path + extra[:1]
        where = "/".join(str(p) for p in path) or "<root>"
        raise ConfigError(f"{where}: {err.message}", _line_of(text, path))
    try:
        return _from_dict(raw)
    except (SpecError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _from_dict(raw: dict[str, Any]) -> ExperimentConfig:
    kw: dict[str, Any] = {}
    if "system" in raw:
        s = dict(raw["system"])
        for k in ("energies", "couplings"):
            if k in s:
                s[k] = tuple(float(v) for v in s[k])
        if "omega" in s:
            s["omega"] = float(s["omega"])
        kw["system"] = SystemConfig(**s)
    if "bath" in raw:
        b = dict(raw["bath"])
        for k in ("frequency", "strength"):
            if k in b:
                b[k] = tuple(float(v) for v in b[k]) if isinstance(b[k], list) else float(b[k])
        kw["bath"] = BathConfig(**b)
    if "shell" in raw:
        kw["shell"] = ShellConfig(float(raw["shell"]["E"]), float(raw["shell"]["delta"]))
    if "run" in raw:
        r = dict(raw["run"])
        if "fit_window" in r:
            r["fit_window"] = parse_window(r["fit_window"])
        if "kappas" in r:
            r["kappas"] = tuple(float(v) for v in r["kappas"])
        kw["run"] = RunConfig(**r)
    if "two_level" in raw:
        t = raw["two_level"]
        kw["two_level"] = TwoLevelConfig(float(t["beta"]), float(t["delta"]),
                                         tuple(float(v) for v in t["F"]))
    if "output" in raw:
        kw["output"] = OutputConfig(**raw["output"])
    cfg = ExperimentConfig(**kw)
    if cfg.system is not None:
        cfg.system.build()
    if cfg.shell is not None:
        cfg.shell.build()
    if cfg.bath is not None:
        cfg.bath.build()
    return cfg


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())
