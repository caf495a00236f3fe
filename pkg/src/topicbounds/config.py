"""Plain-text ``key=value`` configuration files.

One assignment per line; blank lines and lines starting with ``#`` are
ignored.  Values stay strings here and are typed by :func:`coerce`, so the
same table serves config files and command-line overrides.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

from .errors import FormatError, ParameterError

__all__ = ["KEY_TYPES", "read_config", "parse_assignment", "coerce", "merge"]


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int(text: str) -> int:
    # accept "1e4"-style integers but reject fractional values
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if not value.is_integer():
            raise
        return int(value)


KEY_TYPES = {
    "model": str,
    "experiment": str,
    "sweep": str,
    "values": str,
    "runs": _int,
    "seed": _int,
    "jobs": _int,
    "sample": _bool,
    "D": _int,
    "L": _int,
    "V": _int,
    "K": _int,
    "N": _int,
    "m": _int,
    "k_max": _int,
    "k_ref": _int,
    "alpha": float,
    "alpha0": float,
    "beta": float,
    "sigma": float,
    "sigma_mu": float,
    "w_min": float,
    "delta": float,
    "delta1": float,
    "delta2": float,
    "delta3": float,
    "t": float,
    "alpha0_mode": str,
    "coefficient_mode": str,
}


def coerce(key: str, value):
    """Type one setting; strings are parsed, other values are checked by the same parser."""
    if key not in KEY_TYPES:
        raise ParameterError(f"unknown setting {key!r}")
    kind = KEY_TYPES[key]
    if not isinstance(value, str):
        value = str(value)
    try:
        return kind(value.strip())
    except ValueError as exc:
        raise ParameterError(f"bad value for {key}: {value!r} ({exc})") from None


def parse_assignment(text: str) -> tuple[str, str]:
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise ParameterError(f"expected key=value, got {text!r}")
    return key.strip(), value.strip()


def read_config(path) -> dict:
    """Typed settings from a ``key=value`` file."""
    out = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            key, value = parse_assignment(line)
            out[key] = coerce(key, value)
        except ParameterError as exc:
            raise FormatError(str(exc), line=lineno, path=str(path)) from None
    return out


def merge(*layers: Mapping) -> dict:
    """Later layers win; ``None`` values never override."""
    out = {}
    for layer in layers:
        for key, value in layer.items():
            if value is not None:
                out[key] = value
    return out
