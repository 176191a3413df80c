"""Parameter files: flat JSON or TOML with explicitly unit-suffixed keys.

Unknown keys are an error (fail fast on typos), as are missing required keys.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Union

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .errors import ConfigError, ParameterError
from .params import SystemParams

# config key -> SystemParams field
KEY_MAP = {
    "nu_c_hz": "nu_c",
    "q_factor": "Q",
    "v_eff_m3": "v_eff",
    "rho_nv_per_m3": "rho_nv",
    "v_nv_m3": "v_nv",
    "t2_star_s": "t2_star",
    "gamma_eg_per_s": "gamma_eg",
    "w_per_s": "w",
    "q_pump": "q",
    "t_k": "t",
    "l_m": "l",
    "b_gauss": "b",
    "gamma_nv_hz_per_gauss": "gamma_nv_hz_per_gauss",
    "d_zfs_hz": "d_zfs_hz",
    "orientation_divisor": "orientation_divisor",
    "kappa_ex_fraction": "kappa_ex_fraction",
    "g_hz": "g_hz",
}

REQUIRED_KEYS = (
    "nu_c_hz", "q_factor", "v_eff_m3", "rho_nv_per_m3", "v_nv_m3",
    "t2_star_s", "gamma_eg_per_s", "w_per_s", "t_k", "l_m",
)


def params_from_mapping(data: Mapping[str, Any]) -> SystemParams:
    """Build SystemParams from a flat mapping of unit-suffixed keys."""
    unknown = sorted(set(data) - set(KEY_MAP))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = sorted(k for k in REQUIRED_KEYS if k not in data)
    if missing:
        raise ConfigError(f"missing required config keys: {', '.join(missing)}")
    kwargs = {}
    for key, value in data.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"config key {key} must be a number, got {value!r}")
        kwargs[KEY_MAP[key]] = float(value)
    try:
        return SystemParams(**kwargs)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc


def load_mapping(path: Union[str, Path]) -> dict:
    """Read a flat JSON or TOML file into a dict (format by extension)."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    suffix = path.suffix.lower()
    try:
        if suffix == ".json":
            with open(path, "rb") as fh:
                data = json.load(fh)
        elif suffix == ".toml":
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        else:
            raise ConfigError(f"unsupported config format {suffix!r} (use .json or .toml)")
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"could not parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config root of {path} must be a table/object")
    return data


def load_params(path: Union[str, Path], **overrides: Any) -> SystemParams:
    """Load SystemParams from a file, applying keyword overrides (config keys)."""
    data = load_mapping(path)
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    return params_from_mapping(data)
