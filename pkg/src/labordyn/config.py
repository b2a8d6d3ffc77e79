"""Flat ``key = value`` run configuration.

A config file is one assignment per line; ``#`` starts a comment. Every
command writes its fully resolved configuration back in the same format
(``run.cfg``), so a run can be repeated with ``--config run.cfg``.
"""
from __future__ import annotations

import math

from .errors import InvalidParams

HEADER = (
    "# labordyn resolved run configuration\n"
    "# model parameter defaults are conventional food-chain values, not fitted data\n"
)


class ConfigError(InvalidParams):
    pass


def parse_config(text, source="<config>"):
    """Parse config text into an ordered ``{key: raw string}`` mapping."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        out[key.replace("-", "_")] = value
    return out


def read_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), str(path))


def format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(v) for v in value)
    if value is None:
        return ""
    return str(value)


def format_config(mapping):
    """Render ``mapping`` (insertion order kept) as config text."""
    lines = [f"{key} = {format_value(value)}" for key, value in mapping.items()]
    return HEADER + "\n".join(lines) + "\n"


# -- typed coercion ---------------------------------------------------------

def to_float(key, value):
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number, got {value!r}", field=key)
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a number, got {value!r}", field=key) from None
    if not math.isfinite(x):
        raise ConfigError(f"{key}: must be finite, got {value!r}", field=key)
    return x


def to_int(key, value):
    x = to_float(key, value)
    if not x.is_integer():
        raise ConfigError(f"{key}: expected an integer, got {value!r}", field=key)
    return int(x)


def to_bool(key, value):
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}", field=key)


def to_str(key, value):
    return str(value).strip()


def to_float_list(key, value):
    if isinstance(value, (list, tuple)):
        items = list(value)
    else:
        items = [v for v in str(value).replace(" ", "").split(",") if v]
    if not items:
        raise ConfigError(f"{key}: expected a non-empty list of numbers", field=key)
    return [to_float(key, v) for v in items]


def to_name_list(key, value):
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    items = [v for v in str(value).replace(" ", "").split(",") if v]
    if not items:
        raise ConfigError(f"{key}: expected a non-empty list", field=key)
    return items


def to_optional_name_list(key, value):
    """Like ``to_name_list`` but an empty value means an empty list."""
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [v for v in str(value).replace(" ", "").split(",") if v]
