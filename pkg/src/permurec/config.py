"""Run configuration: defaults, config files, command-line overrides.

A run is determined by a flat set of keys. Values can come from three
layers and the later layers win: built-in defaults, then a plain-text
config file of ``key=value`` lines, then command-line flags. The file
format allows blank lines and ``#`` comments; unknown keys are an
error, not a warning, because a silently ignored typo would change the
run and ruin reproducibility.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import Dict, Mapping, Optional

from .curves import CURVE_KINDS, SYMMETRIES
from .measures import MEASURE_KINDS

__all__ = ["DEFAULTS", "RunConfig", "parse_config_file", "build_config",
           "PIPELINES", "ENSEMBLE_KINDS"]

PIPELINES = ("permuton", "reconstruct", "embed", "recover", "ensembles", "verify")
ENSEMBLE_KINDS = ("meandric", "baxter", "all")

DEFAULTS: Dict[str, object] = {
    "pipeline": "recover",
    "depth": 3,
    "n": 200,
    "measure": "lebesgue",
    "sigma": 0.5,
    "gamma": None,
    "rho": None,
    "curve": "hilbert",
    "curve2": "hilbert",
    "symmetry": "identity",
    "symmetry2": "rot180",
    "resolution": None,
    "ensemble_kind": "meandric",
    "ensemble_n": 4,
    "seed": 0,
    "tol": 1e-8,
    "mc_walks": 20000,
    "threads": 1,
    "out": "out",
}

_INT_KEYS = {"depth", "n", "resolution", "ensemble_n", "seed", "mc_walks", "threads"}
_FLOAT_KEYS = {"sigma", "gamma", "rho", "tol"}


@dataclass(frozen=True)
class RunConfig:
    pipeline: str
    depth: int
    n: int
    measure: str
    sigma: float
    gamma: Optional[float]
    rho: Optional[float]
    curve: str
    curve2: str
    symmetry: str
    symmetry2: str
    resolution: Optional[int]
    ensemble_kind: str
    ensemble_n: int
    seed: int
    tol: float
    mc_walks: int
    threads: int
    out: str

    def __post_init__(self):
        if self.pipeline not in PIPELINES:
            raise ValueError(f"unknown pipeline {self.pipeline!r}; expected one of {PIPELINES}")
        if self.depth < 1:
            raise ValueError(f"depth must be positive, got {self.depth}")
        if self.threads < 1:
            raise ValueError(f"threads must be positive, got {self.threads}")
        if self.tol <= 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.measure not in MEASURE_KINDS:
            raise ValueError(f"unknown measure kind {self.measure!r}")
        for key, kind in (("curve", self.curve), ("curve2", self.curve2)):
            if kind not in CURVE_KINDS:
                raise ValueError(f"unknown {key} kind {kind!r}")
        for key, name in (("symmetry", self.symmetry), ("symmetry2", self.symmetry2)):
            if name not in SYMMETRIES:
                raise ValueError(f"unknown {key} name {name!r}")
        if self.ensemble_kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble kind {self.ensemble_kind!r}")
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.ensemble_n < 1:
            raise ValueError(f"ensemble_n must be positive, got {self.ensemble_n}")
        if self.resolution is not None and self.resolution < 1:
            raise ValueError(f"resolution must be positive, got {self.resolution}")
        if self.mc_walks < 1:
            raise ValueError(f"mc_walks must be positive, got {self.mc_walks}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def out_dir(self) -> Path:
        return Path(self.out)


def _coerce(key: str, raw: str):
    if raw == "" or raw.lower() == "none":
        return None
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    return raw


def parse_config_file(path) -> Dict[str, object]:
    """Read ``key=value`` lines. Comments start with ``#``."""
    out: Dict[str, object] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in DEFAULTS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, raw)
    return out


def build_config(file_values: Optional[Mapping[str, object]] = None,
                 cli_values: Optional[Mapping[str, object]] = None) -> RunConfig:
    """Merge the three layers. ``None`` in an override means unset."""
    merged = dict(DEFAULTS)
    for layer in (file_values, cli_values):
        if layer:
            for key, value in layer.items():
                if key not in DEFAULTS:
                    raise ValueError(f"unknown config key {key!r}")
                if value is not None:
                    merged[key] = value
    names = {f.name for f in fields(RunConfig)}
    return RunConfig(**{k: v for k, v in merged.items() if k in names})
