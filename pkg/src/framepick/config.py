"""Settings file parsing and flag/file/default precedence.

The CLI reads an optional `framepick.toml` style document, a flat list
of `key = value` lines:

    # sampling
    rate_r = 2.0
    n_min = 4
    n_max = 96
    pool_n = 1000
    svd_energy = 0.90
    maxvol_delta = 0.01
    rect_growth_delta = 0.05
    rect_cap_factor = 2
    score_fraction = 0.15
    # evaluation
    timeout_s = 60.0
    in_flight = 4
    jobs = 1

Grammar: one `key = value` per line; blank lines and everything after
`#` are ignored; values are integers, floats, or double-quoted strings
(no `#` inside a string). Tables, arrays, and multi-line values are not
supported. Unknown or duplicate keys are errors, so typos never pass
silently.

Precedence (highest first): command-line flags, then the settings file,
then the built-in defaults above, which reproduce the benchmark
configuration with zero flags.
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import IoError, ValidationError

CONFIG_FILENAME = "framepick.toml"
CACHE_ENV = "FRAMEPICK_CACHE"

# key -> (type, built-in default)
SETTING_SCHEMA: dict[str, tuple[type, object]] = {
    "rate_r": (float, 2.0),
    "n_min": (int, 4),
    "n_max": (int, 96),
    "pool_n": (int, 1000),
    "svd_energy": (float, 0.90),
    "maxvol_delta": (float, 0.01),
    "rect_growth_delta": (float, 0.05),
    "rect_cap_factor": (int, 2),
    "score_fraction": (float, 0.15),
    "timeout_s": (float, 60.0),
    "in_flight": (int, 4),
    "jobs": (int, 1),
}

SAMPLING_KEYS = (
    "rate_r",
    "n_min",
    "n_max",
    "pool_n",
    "svd_energy",
    "maxvol_delta",
    "rect_growth_delta",
    "rect_cap_factor",
    "score_fraction",
)

_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _parse_value(raw: str, kind: type, where: str) -> object:
    if raw.startswith('"'):
        if kind is not str:
            raise ValidationError(f"{where}: expected a {kind.__name__}, got a string")
        if len(raw) < 2 or not raw.endswith('"'):
            raise ValidationError(f"{where}: unterminated string {raw!r}")
        return raw[1:-1]
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
    except ValueError:
        raise ValidationError(
            f"{where}: cannot parse {raw!r} as {kind.__name__}"
        ) from None
    raise ValidationError(f"{where}: expected a quoted string, got {raw!r}")


def parse_config_text(text: str, source: str = "<config>") -> dict[str, object]:
    """Parse a settings document into {key: typed value}."""
    out: dict[str, object] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        where = f"{source}: line {line_no}"
        if '"' not in line:
            line = line.split("#", 1)[0]
        elif line.lstrip().startswith("#"):
            line = ""
        line = line.strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValidationError(f"{where}: expected `key = value`, got {line!r}")
        key = key.strip()
        value = value.strip()
        if not _KEY_RE.match(key):
            raise ValidationError(f"{where}: invalid key {key!r}")
        if key not in SETTING_SCHEMA:
            known = ", ".join(sorted(SETTING_SCHEMA))
            raise ValidationError(f"{where}: unknown key {key!r} (known: {known})")
        if key in out:
            raise ValidationError(f"{where}: duplicate key {key!r}")
        if not value:
            raise ValidationError(f"{where}: empty value for {key!r}")
        kind, _default = SETTING_SCHEMA[key]
        out[key] = _parse_value(value, kind, where)
    return out


def load_config_file(path: str | Path | None) -> dict[str, object]:
    """Read a settings file; with no path, use ./framepick.toml when it
    exists, else nothing."""
    if path is None:
        fallback = Path(CONFIG_FILENAME)
        if not fallback.is_file():
            return {}
        path = fallback
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read settings file {path}: {exc}") from exc
    return parse_config_text(text, str(path))


def resolve_settings(
    config: dict[str, object], overrides: dict[str, object | None]
) -> dict[str, object]:
    """defaults <- settings file <- flags (None means flag not given)."""
    unknown = sorted(set(overrides) - set(SETTING_SCHEMA))
    if unknown:
        raise ValidationError(f"unknown settings {unknown}")
    out = {key: default for key, (_kind, default) in SETTING_SCHEMA.items()}
    out.update(config)
    out.update({k: v for k, v in overrides.items() if v is not None})
    return out
