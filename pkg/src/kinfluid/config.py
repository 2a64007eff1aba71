"""Flat key=value run configuration.

One pair per line, `#` starts a comment, unknown keys are errors.  The
only required key is `scenario`; everything else falls back to that
scenario's defaults.  CLI overrides use the same key=value syntax and
replace file values.
"""

from dataclasses import dataclass, fields

from .errors import ConfigurationError
from .hybrid import MODES
from .scenarios import SCENARIOS


def _parse_bool(s):
    low = s.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


@dataclass
class RunConfig:
    scenario: str
    epsilon: float = None
    nx: int = None
    ny: int = None
    nv: int = None
    vcut: float = None
    order: int = None
    dt: float = None
    t_final: float = None
    eta0: float = None
    delta0: float = None
    forced_band: float = None
    mode: str = None
    output_dir: str = None
    snapshot_interval: float = None
    deterministic: bool = True

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigurationError(
                f"scenario: unknown name {self.scenario!r}; "
                f"pick one of {SCENARIOS}")
        if self.mode is not None and self.mode not in MODES:
            raise ConfigurationError(
                f"mode: {self.mode!r} is not one of {MODES}")
        positive = ("epsilon", "nv", "vcut", "dt", "t_final", "eta0",
                    "delta0", "forced_band", "snapshot_interval", "nx", "ny")
        for name in positive:
            val = getattr(self, name)
            if val is not None and val <= 0:
                raise ConfigurationError(f"{name}: must be positive, got {val}")
        if self.order is not None and self.order < 0:
            raise ConfigurationError(f"order: must be >= 0, got {self.order}")
        if self.scenario.startswith("evap") and self.ny is not None:
            raise ConfigurationError("ny: only valid for 2D scenarios")
        if self.nx is not None and self.ny is not None and self.nx != self.ny:
            raise ConfigurationError(
                "nx/ny: scenarios use square meshes; set one of them "
                "or make them equal")


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {str: str, int: int, float: float, bool: _parse_bool}


def _convert(key, raw, where):
    try:
        return _CASTS[_TYPES[key]](raw)
    except ValueError:
        raise ConfigurationError(
            f"{where}: key {key!r} expects {_TYPES[key].__name__}, got {raw!r}")


def _parse_pair(line, where):
    if "=" not in line:
        raise ConfigurationError(f"{where}: expected key=value, got {line!r}")
    key, _, raw = line.partition("=")
    key, raw = key.strip(), raw.strip()
    if key not in _TYPES:
        raise ConfigurationError(f"{where}: unknown key {key!r}")
    if not raw:
        raise ConfigurationError(f"{where}: empty value for key {key!r}")
    return key, _convert(key, raw, where)


def parse_config(text, overrides=()):
    """Parse config text plus optional key=value override strings."""
    data = {}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"line {lineno}"
        key, value = _parse_pair(line, where)
        if key in data:
            raise ConfigurationError(f"{where}: duplicate key {key!r}")
        data[key] = value
    for i, pair in enumerate(overrides, start=1):
        key, value = _parse_pair(pair.strip(), f"override {i}")
        data[key] = value
    if "scenario" not in data:
        raise ConfigurationError("config must set scenario=<name>")
    return RunConfig(**data)
