"""Run-configuration parsing for the batch front end.

Configs are plain text, one key = value per line, with optional [section]
headers that exist purely for readability (the key namespace is flat).
Every key is validated against the table below; unknown keys, unknown
sections, duplicates, and malformed values are all named errors so typos
never pass silently.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ConfigError
from .model import TOP_BOUNDARIES, SuspensionParams
from .neutral import SWEEPABLE

MODES = ("steady", "spectrum", "neutral", "critical", "sweep")
SECTIONS = ("suspension", "medium", "thermal", "geometry", "numerics", "mode")

# key -> (converter tag, default); None default means "must be set to use it"
_FLOAT_KEYS = {
    "V_c": 10.0,
    "tau_H": 0.5,
    "I_t": 0.8,
    "G_c": 0.63,
    "Pr": 5.0,
    "phi": 0.76,
    "Da": 0.1,
    "Le": 0.4,
    "R_T": 0.0,
    "R_B": 0.0,
    "k": 3.0,
    "k_min": 0.5,
    "k_max": 10.0,
    "R_lo": None,
    "R_hi": None,
    "tol_R": 1e-6,
}
_INT_KEYS = {"n_grid": 200, "n_trace": 120, "n_k": 40}
_STR_KEYS = {
    "top_boundary": "free",
    "mode": None,
    "eigen_parameter": "RB",
    "sweep_parameter": None,
    "sweep_values": None,
    "out_dir": "out",
}
KNOWN_KEYS = frozenset(_FLOAT_KEYS) | frozenset(_INT_KEYS) | frozenset(_STR_KEYS)


@dataclass
class RunConfig:
    """Validated configuration for one solver run."""

    V_c: float = 10.0
    tau_H: float = 0.5
    I_t: float = 0.8
    G_c: float = 0.63
    Pr: float = 5.0
    phi: float = 0.76
    Da: float = 0.1
    Le: float = 0.4
    R_T: float = 0.0
    top_boundary: str = "free"
    R_B: float = 0.0
    k: float = 3.0
    k_min: float = 0.5
    k_max: float = 10.0
    n_k: int = 40
    n_grid: int = 200
    n_trace: int = 120
    R_lo: float | None = None
    R_hi: float | None = None
    tol_R: float = 1e-6
    mode: str = "steady"
    eigen_parameter: str = "RB"
    sweep_parameter: str | None = None
    sweep_values: str | None = None
    out_dir: str = "out"

    def suspension_params(self) -> SuspensionParams:
        return SuspensionParams(
            V_c=self.V_c,
            tau_H=self.tau_H,
            I_t=self.I_t,
            G_c=self.G_c,
            Pr=self.Pr,
            phi=self.phi,
            Da=self.Da,
            Le=self.Le,
            R_T=self.R_T,
            top_boundary=self.top_boundary,
        )

    def seed_bracket(self) -> tuple[float, float]:
        """Configured bracket, or a default wide enough for either branch."""
        if self.R_lo is not None and self.R_hi is not None:
            if not self.R_lo < self.R_hi:
                raise ConfigError(f"R_lo must be < R_hi, got {self.R_lo} >= {self.R_hi}")
            return (self.R_lo, self.R_hi)
        if (self.R_lo is None) != (self.R_hi is None):
            raise ConfigError("R_lo and R_hi must be set together")
        if self.eigen_parameter == "RB":
            return (100.0, 30000.0)
        return (-30000.0, -100.0)

    def sweep_value_list(self) -> list:
        if not self.sweep_parameter:
            raise ConfigError("mode=sweep requires the key 'sweep_parameter'")
        if self.sweep_parameter not in SWEEPABLE:
            raise ConfigError(
                f"key 'sweep_parameter': {self.sweep_parameter!r} is not sweepable "
                f"(choose from {SWEEPABLE})"
            )
        if not self.sweep_values:
            raise ConfigError("mode=sweep requires the key 'sweep_values'")
        items = [v.strip() for v in self.sweep_values.split(",") if v.strip()]
        if not items:
            raise ConfigError("key 'sweep_values': no values given")
        if self.sweep_parameter == "top_boundary":
            for item in items:
                if item not in TOP_BOUNDARIES:
                    raise ConfigError(
                        f"key 'sweep_values': {item!r} is not one of {TOP_BOUNDARIES}"
                    )
            return items
        try:
            return [float(v) for v in items]
        except ValueError as exc:
            raise ConfigError(f"key 'sweep_values': expected numbers, got {self.sweep_values!r}") from exc


def _parse_lines(text: str, source: str) -> dict:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            if section not in SECTIONS:
                raise ConfigError(
                    f"{source}:{lineno}: unknown section [{section}] "
                    f"(known: {', '.join(SECTIONS)})"
                )
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {stripped!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown configuration key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def _convert(key: str, value: str):
    if key in _FLOAT_KEYS:
        try:
            return float(value)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: expected a number, got {value!r}") from exc
    if key in _INT_KEYS:
        try:
            return int(value)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: expected an integer, got {value!r}") from exc
    return value


def load_config(path, overrides=()) -> RunConfig:
    """Parse a config file and apply command-line key=value overrides.

    Overrides take precedence key by key over file values. Raises
    ConfigError for unknown/duplicate keys or bad values, OSError when
    the file cannot be read.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = _parse_lines(fh.read(), str(path))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"override: unknown configuration key {key!r}")
        raw[key] = value

    cfg = RunConfig()
    for key, value in raw.items():
        setattr(cfg, key, _convert(key, value))

    if cfg.mode not in MODES:
        raise ConfigError(f"key 'mode': {cfg.mode!r} is not one of {MODES}")
    if cfg.eigen_parameter not in ("RB", "RT"):
        raise ConfigError(
            f"key 'eigen_parameter': {cfg.eigen_parameter!r} is not one of ('RB', 'RT')"
        )
    if cfg.top_boundary not in TOP_BOUNDARIES:
        raise ConfigError(
            f"key 'top_boundary': {cfg.top_boundary!r} is not one of {TOP_BOUNDARIES}"
        )
    for key in ("n_grid", "n_trace"):
        if getattr(cfg, key) < 32:
            raise ConfigError(f"key {key!r}: must be >= 32, got {getattr(cfg, key)}")
    if cfg.n_k < 2:
        raise ConfigError(f"key 'n_k': must be >= 2, got {cfg.n_k}")
    if not 0.0 < cfg.k_min < cfg.k_max:
        raise ConfigError(
            f"keys 'k_min'/'k_max': need 0 < k_min < k_max, got {cfg.k_min}, {cfg.k_max}"
        )
    if not cfg.tol_R > 0.0:
        raise ConfigError(f"key 'tol_R': must be > 0, got {cfg.tol_R}")
    if cfg.R_B < 0.0:
        raise ConfigError(f"key 'R_B': prescribed value must be >= 0, got {cfg.R_B}")
    # Fail fast on invalid physical parameters (names the offending field).
    cfg.suspension_params()
    return cfg


# keep dataclass fields and key tables in sync at import time
assert {f.name for f in fields(RunConfig)} == set(KNOWN_KEYS)
