"""Experiment configuration: JSON with defaults for every omitted field.

Schema (config_version 1):

    {
      "config_version": 1,
      "corpus_dir": "corpus",
      "models": [
        {"beta_train": 0.002, "delta_min": 0.1, "delta_max": 2.0, "gain_scale": 0.004},
        ...
      ],
      "targets": [0.06, 0.12, 0.25, 0.5, 0.75],
      "tolerance": 0.10,
      "methods": ["baseline", "proposed"],
      "max_iters_binary": 32,
      "max_iters_loglinear": 10,
      "refit_bracketing": false,
      "delta_overrides": {"0.75": 2.0},   # optional per-target delta_max cap/extension
      "output_dir": "out",
      "seed": 0,
      "workers": 1
    }

An empty file means: all defaults. delta_overrides maps a target bpp (as a
JSON key string) to a delta_max to use for the highest-rate model when
running that target.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

CONFIG_VERSION = 1

# Training betas and displacement ranges of the four-model reference family.
DEFAULT_MODELS = [
    {"beta_train": 0.002, "delta_min": 0.1, "delta_max": 2.0, "gain_scale": 0.004},
    {"beta_train": 0.007, "delta_min": 0.3, "delta_max": 1.4, "gain_scale": 0.012},
    {"beta_train": 0.015, "delta_min": 0.4, "delta_max": 2.0, "gain_scale": 0.045},
    {"beta_train": 0.05, "delta_min": 0.6, "delta_max": 6.0, "gain_scale": 0.09},
]
DEFAULT_TARGETS = [0.06, 0.12, 0.25, 0.5, 0.75]
DEFAULT_TOLERANCE = 0.10
DEFAULT_METHODS = ["baseline", "proposed"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    beta_train: float
    delta_min: float
    delta_max: float
    gain_scale: float


@dataclass(frozen=True)
class ExperimentConfig:
    corpus_dir: Path = Path("corpus")
    models: tuple[ModelSpec, ...] = tuple(ModelSpec(**m) for m in DEFAULT_MODELS)
    targets: tuple[float, ...] = tuple(DEFAULT_TARGETS)
    tolerance: float = DEFAULT_TOLERANCE
    methods: tuple[str, ...] = tuple(DEFAULT_METHODS)
    max_iters_binary: int = 32
    max_iters_loglinear: int = 10
    refit_bracketing: bool = False
    delta_overrides: tuple[tuple[float, float], ...] = ()
    output_dir: Path = Path("out")
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if not self.models:
            raise ConfigError("at least one model required")
        if not self.targets:
            raise ConfigError("at least one target required")
        if any(t <= 0 for t in self.targets):
            raise ConfigError("targets must be positive")
        if not (0 < self.tolerance < 1):
            raise ConfigError(f"tolerance must be in (0, 1), got {self.tolerance}")
        for m in self.models:
            if m.beta_train <= 0 or m.gain_scale <= 0:
                raise ConfigError("beta_train and gain_scale must be positive")
            if not (0 < m.delta_min <= 1 <= m.delta_max):
                raise ConfigError(
                    f"need 0 < delta_min <= 1 <= delta_max, got [{m.delta_min}, {m.delta_max}]"
                )
        for method in self.methods:
            if method not in ("baseline", "proposed"):
                raise ConfigError(f"unknown method {method!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def delta_max_for_target(self, target: float, model_index: int) -> float:
        """delta_max of a model when running a given target, honoring the
        per-target override for the highest-rate model."""
        delta_max = self.models[model_index].delta_max
        if model_index == len(self.models) - 1:
            for t, override in self.delta_overrides:
                if t == target:
                    return override
        return delta_max


_KNOWN_KEYS = {
    "config_version", "corpus_dir", "models", "targets", "tolerance", "methods",
    "max_iters_binary", "max_iters_loglinear", "refit_bracketing",
    "delta_overrides", "output_dir", "seed", "workers",
}


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse a JSON config file; an empty file yields the full defaults."""
    text = Path(path).read_text()
    if not text.strip():
        raw = {}
    else:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    version = raw.get("config_version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"{path}: unsupported config_version {version}")
    kwargs = {}
    if "corpus_dir" in raw:
        kwargs["corpus_dir"] = Path(raw["corpus_dir"])
    if "output_dir" in raw:
        kwargs["output_dir"] = Path(raw["output_dir"])
    if "models" in raw:
        try:
            kwargs["models"] = tuple(ModelSpec(**m) for m in raw["models"])
        except TypeError as exc:
            raise ConfigError(f"{path}: bad model entry: {exc}") from exc
    if "targets" in raw:
        kwargs["targets"] = tuple(float(t) for t in raw["targets"])
    if "methods" in raw:
        methods = raw["methods"]
        if methods == "both" or methods == ["both"]:
            methods = DEFAULT_METHODS
        kwargs["methods"] = tuple(methods)
    if "delta_overrides" in raw:
        kwargs["delta_overrides"] = tuple(
            (float(k), float(v)) for k, v in raw["delta_overrides"].items()
        )
    for key in ("tolerance", "max_iters_binary", "max_iters_loglinear",
                "refit_bracketing", "seed", "workers"):
        if key in raw:
            kwargs[key] = raw[key]
    try:
        return ExperimentConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
