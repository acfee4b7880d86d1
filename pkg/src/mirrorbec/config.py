"""Run configuration: defaults, YAML loading, presets and validation.

The configuration is a nested mapping with a versioned schema. Estimator
blocks (``opa``, ``mirror``, ``carl``, ``recoil``) take exactly the
constructor parameters of the matching estimator; unknown keys anywhere are
errors.
"""
import copy
import math
import os
from pathlib import Path

import yaml

from .errors import ConfigError
from .estimators import BraggMirror, CarlSimulator, QIOPAmplifier, RecoilScenario

SCHEMA_VERSION = 1
PRESET_ENV = "MIRRORBEC_PRESET_DIR"
PACKAGE_PRESETS = Path(__file__).with_name("presets")
COMMANDS = ("fringe", "reflectivity", "carl", "scenario")
FORMATS = ("csv", "svg", "both")

ESTIMATORS = {
    "opa": QIOPAmplifier,
    "mirror": BraggMirror,
    "carl": CarlSimulator,
    "recoil": RecoilScenario,
}


def _defaults():
    cfg = {
        "schema_version": SCHEMA_VERSION,
        "name": "default",
        "description": "",
        "calibration": {},
        "fringe": {"n_phases": 361, "bases": ["plus_minus", "LR"]},
        "spectrum": {
            "detuning_min_hz": -2e10,
            "detuning_max_hz": 2e10,
            "n_points": 40001,
            "threshold": 0.5,
        },
        "carl_report": {"levels": [0.99, 0.5], "convergence_check": False, "convergence_time": 1e-5},
        "scenario": {"bases": ["plus_minus", "LR"], "profile_phases": [0.0], "n_velocities": 801,
                     "velocity_span": 2.0},
        "sweep": {"command": "fringe", "axes": []},
        "output": {"directory": "out", "formats": "csv"},
        "workers": 1,
    }
    for block, est in ESTIMATORS.items():
        cfg[block] = est().get_params()
    return cfg


DEFAULTS = _defaults()

# keys whose value may legitimately differ in type from the default
_FREE_FORM = {("calibration",), ("description",)}
_MIXED = {("carl", "seed"): (str, float)}


def deep_merge(base, override):
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict) and (key,) not in _FREE_FORM:
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _coerce(value, default, path):
    where = ".".join(path)
    allowed = _MIXED.get(path)
    if allowed:
        if isinstance(value, str):
            return value
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"expected a string or number, got {value!r}", where) from None
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"expected true/false, got {value!r}", where)
        return value
    if isinstance(default, int):
        if isinstance(value, bool):
            raise ConfigError(f"expected an integer, got {value!r}", where)
        try:
            as_float = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"expected an integer, got {value!r}", where) from None
        if not as_float.is_integer():
            raise ConfigError(f"expected an integer, got {value!r}", where)
        return int(as_float)
    if isinstance(default, float):
        if isinstance(value, bool):
            raise ConfigError(f"expected a number, got {value!r}", where)
        try:
            # YAML 1.1 reads "1e-9" as a string
            out = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"expected a number, got {value!r}", where) from None
        if math.isnan(out):
            raise ConfigError("NaN is not allowed", where)
        return out
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {value!r}", where)
        return value
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"expected a list, got {value!r}", where)
        return value
    return value


def _check(cfg, defaults, path=()):
    if not isinstance(cfg, dict):
        raise ConfigError(f"expected a mapping, got {type(cfg).__name__}", ".".join(path) or None)
    out = {}
    for key, value in cfg.items():
        sub = path + (key,)
        if key not in defaults:
            raise ConfigError("unknown key", ".".join(sub))
        if sub in _FREE_FORM:
            out[key] = value
        elif isinstance(defaults[key], dict):
            out[key] = _check(value, defaults[key], sub)
        else:
            out[key] = _coerce(value, defaults[key], sub)
    return out


def _check_sweep(sweep):
    if sweep["command"] not in COMMANDS:
        raise ConfigError(f"must be one of {COMMANDS}", "sweep.command")
    axes = []
    for k, axis in enumerate(sweep["axes"]):
        where = f"sweep.axes[{k}]"
        if not isinstance(axis, dict) or set(axis) != {"path", "values"}:
            raise ConfigError("each axis needs exactly 'path' and 'values'", where)
        parts = tuple(str(axis["path"]).split("."))
        if parts[0] not in ESTIMATORS and parts[0] not in ("fringe", "spectrum", "carl_report", "scenario"):
            raise ConfigError(f"cannot sweep {axis['path']!r}", f"{where}.path")
        node = DEFAULTS
        for p in parts:
            if not isinstance(node, dict) or p not in node:
                raise ConfigError(f"unknown parameter path {axis['path']!r}", f"{where}.path")
            node = node[p]
        values = axis["values"]
        if not isinstance(values, list) or not values:
            raise ConfigError("sweep axis values must be a non-empty list", f"{where}.values")
        axes.append({"path": ".".join(parts),
                     "values": [_coerce(v, node, parts) for v in values]})
    return {"command": sweep["command"], "axes": axes}


def validate(cfg):
    """Check ``cfg`` against the schema and fill in defaults; returns a new mapping."""
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a mapping")
    version = cfg.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})", "schema_version")
    checked = deep_merge(DEFAULTS, _check(cfg, DEFAULTS))
    fmt = checked["output"]["formats"]
    if fmt not in FORMATS:
        raise ConfigError(f"must be one of {FORMATS}", "output.formats")
    if checked["workers"] < 1:
        raise ConfigError("must be >= 1", "workers")
    checked["sweep"] = _check_sweep(checked["sweep"])
    for block in ("fringe", "scenario"):
        bases = checked[block]["bases"]
        if not bases:
            raise ConfigError("must not be empty", f"{block}.bases")
        for b in bases:
            if b not in ("plus_minus", "LR"):
                raise ConfigError(f"unknown basis {b!r}", f"{block}.bases")
    return checked


def set_path(cfg, path, value):
    out = copy.deepcopy(cfg)
    node = out
    parts = path.split(".")
    for p in parts[:-1]:
        node = node[p]
    node[parts[-1]] = value
    return out


def preset_dirs():
    dirs = []
    env = os.environ.get(PRESET_ENV)
    if env:
        dirs.append(Path(env))
    dirs.append(PACKAGE_PRESETS)
    return dirs


def list_presets():
    names = {}
    for d in reversed(preset_dirs()):
        if d.is_dir():
            for f in sorted(d.glob("*.yaml")):
                names[f.stem] = f
    return dict(sorted(names.items()))


def preset_path(name):
    for d in preset_dirs():
        candidate = d / f"{name}.yaml"
        if candidate.is_file():
            return candidate
    raise ConfigError(f"no preset named {name!r}; available: {', '.join(list_presets())}", "preset")


def read_yaml(path):
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    return data or {}


def load_config(path=None, preset=None):
    """Layer defaults, then a preset, then a config file, and validate the result."""
    cfg = {}
    if preset:
        cfg = deep_merge(cfg, read_yaml(preset_path(preset)))
    if path:
        user = read_yaml(path)
        if not isinstance(user, dict):
            raise ConfigError("configuration must be a mapping")
        cfg = deep_merge(cfg, user)
    return validate(cfg)
