"""Key=value configuration files mapped onto the experiment dataclasses.

Format: one `key = value` per line, `#` comments, blank lines ignored.
Nested keys use a dotted prefix (sampler., grid., pulse.), everything
else addresses ExperimentConfig directly, e.g.::

    sampler.n_receivers = 5
    grid.n_rho = 101
    pulse.sample_rate = 100000
    snr_list = 13,17,21
    trials_per_snr = 200
    master_seed = 0
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

from cotans.harness import ExperimentConfig
from cotans.imaging import GridSpec
from cotans.sampler import SamplerConfig
from cotans.signals import PulseSpec


def parse_config_file(path: str | Path) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def _coerce(value: str, target):
    if target is float:
        return float(value)
    if target is int:
        return int(value)
    if target is bool:
        return value.lower() in ("1", "true", "yes")
    if target in (tuple, list) or "tuple" in str(target):
        return tuple(float(v) for v in value.split(","))
    return value


def build_config(overrides: dict[str, str]) -> ExperimentConfig:
    """ExperimentConfig from defaults plus string-valued overrides."""
    sections = {
        "sampler": (SamplerConfig, {}),
        "grid": (GridSpec, {}),
        "pulse": (PulseSpec, {}),
    }
    top: dict = {}
    top_fields = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}
    for key, value in overrides.items():
        if "." in key:
            section, name = key.split(".", 1)
            if section not in sections:
                raise KeyError(f"unknown config section {section!r}")
            cls, kwargs = sections[section]
            fields = {f.name: f.type for f in dataclasses.fields(cls)}
            if name not in fields:
                raise KeyError(f"unknown config key {key!r}")
            kwargs[name] = _coerce(value, _annotation_type(cls, name))
        else:
            if key not in top_fields:
                raise KeyError(f"unknown config key {key!r}")
            top[key] = _coerce(value, _annotation_type(ExperimentConfig, key))
    for section, (cls, kwargs) in sections.items():
        if kwargs:
            top[section] = cls(**kwargs)
    return ExperimentConfig(**top)


def _annotation_type(cls, name):
    hint = next(f.type for f in dataclasses.fields(cls) if f.name == name)
    hint = str(hint)
    if hint == "float":
        return float
    if hint == "int":
        return int
    if hint == "bool":
        return bool
    if hint.startswith("tuple"):
        return tuple
    return str
