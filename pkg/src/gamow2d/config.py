"""Run-configuration parsing, schema validation, and deterministic output
writers shared by the command-line entry points.

Config files are flat ``key = value`` text: numbers, quoted-or-bare strings,
bracketed lists, and kernel expressions like ``power(alpha=-0.5)``.  Unknown
keys are rejected against the per-command schema.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from . import __version__
from .errors import ConfigError
from .kernels import KernelSpec

_KERNEL_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def parse_kernel(text: str) -> KernelSpec:
    """Kernel grammar: family name plus named numeric parameters."""
    m = _KERNEL_RE.match(text.strip())
    if not m:
        raise ConfigError(f"cannot parse kernel expression {text!r}")
    family, argtext = m.group(1), m.group(2) or ""
    kwargs: dict = {}
    if argtext.strip():
        for part in argtext.split(","):
            if "=" not in part:
                raise ConfigError(f"kernel parameter {part!r} must be name=value")
            name, val = (p.strip() for p in part.split("=", 1))
            if name not in ("alpha", "kappa", "radius", "dimension"):
                raise ConfigError(f"unknown kernel parameter {name!r}")
            kwargs[name] = int(val) if name == "dimension" else float(val)
    try:
        return KernelSpec(family=family, **kwargs)
    except Exception as exc:
        raise ConfigError(f"invalid kernel {text!r}: {exc}") from exc


def kernel_to_text(k: KernelSpec) -> str:
    if k.family == "power":
        return f"power(alpha={k.alpha!r})"
    if k.family == "gauss_power":
        return f"gauss_power(kappa={k.kappa!r}, alpha={k.alpha!r})"
    if k.family == "indicator":
        return f"indicator(radius={k.radius!r})"
    if k.family == "constant":
        return "constant"
    return "tabulated"


def _parse_value(raw: str) -> Any:
    raw = raw.strip()
    if raw.startswith("[") and raw.endswith("]"):
        inner = raw[1:-1].strip()
        if not inner:
            return []
        return [_parse_value(p) for p in inner.split(",")]
    if raw.startswith('"') and raw.endswith('"'):
        return raw[1:-1]
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    if raw in ("true", "false"):
        return raw == "true"
    return raw


def parse_config_text(text: str) -> dict:
    out: dict = {}
    for ln, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {ln}: expected key = value")
        key, raw = (p.strip() for p in stripped.split("=", 1))
        if not key:
            raise ConfigError(f"line {ln}: empty key")
        if key in out:
            raise ConfigError(f"line {ln}: duplicate key {key!r}")
        out[key] = _parse_value(raw)
    return out


@dataclass(frozen=True)
class Field:
    type: type
    required: bool = False
    default: Any = None


def validate(raw: dict, schema: dict) -> dict:
    unknown = set(raw) - set(schema)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    out = {}
    for key, fld in schema.items():
        if key in raw:
            val = raw[key]
            if fld.type is float and isinstance(val, int):
                val = float(val)
            if fld.type is list and not isinstance(val, list):
                raise ConfigError(f"key {key!r} must be a list")
            if fld.type is not list and not isinstance(val, fld.type):
                raise ConfigError(
                    f"key {key!r} must be {fld.type.__name__}, got {val!r}"
                )
            out[key] = val
        elif fld.required:
            raise ConfigError(f"missing required config key {key!r}")
        else:
            out[key] = fld.default
    return out


def config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def stamp(cfg: dict) -> dict:
    return {"toolkit_version": __version__, "config_sha256": config_hash(cfg)}


def write_json(path: Path, payload: dict, cfg: dict):
    payload = dict(payload)
    payload.update(stamp(cfg))
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def write_csv(path: Path, header: list, rows: list, cfg: dict):
    meta = stamp(cfg)
    lines = [
        f"# gamow2d {meta['toolkit_version']} config={meta['config_sha256']}",
        ",".join(header),
    ]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, float):
                cells.append("nan" if math.isnan(v) else repr(v))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")
