"""Experiment configuration: flat ``key = value`` text with ``#`` comments.

Keys marked as lists take comma-separated values and define the sweep
grid. ``slots = auto`` keeps the scheme's own frame length.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields, replace

from .errors import ConfigError
from .simulator import SCHEMES, EnergyModel, RunConfig

log = logging.getLogger(__name__)

STANDARD_CHANNELS = 16
AUTO = "auto"


def _int(v: str) -> int:
    try:
        return int(v)
    except ValueError:
        raise ConfigError(f"expected an integer, got {v!r}") from None


def _float(v: str) -> float:
    try:
        return float(v)
    except ValueError:
        raise ConfigError(f"expected a number, got {v!r}") from None


def _opt_int(v: str):
    return None if v.lower() in (AUTO, "none") else _int(v)


def _bool(v: str) -> bool:
    low = v.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {v!r}")


def _scheme(v: str) -> str:
    up = v.upper()
    if up not in SCHEMES:
        raise ConfigError(f"unknown scheme {v!r}; choose from {', '.join(SCHEMES)}")
    return up


def _fmt(v) -> str:
    if v is None:
        return AUTO
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: tuple[str, ...] = ("DAIL",)
    n_wbans: tuple[int, ...] = (10,)
    sensors: int = 12
    channels: int = STANDARD_CHANNELS
    slots: tuple[int | None, ...] = (None,)
    superframes: int = 20
    replications: int = 1
    seed: int = 1
    arena_side: float = 10.0
    interference_range: float = 3.0
    body_radius: float = 1.0
    e_tx: float = 1.0
    e_rx: float = 0.5
    e_hop: float = 0.2
    e_retx: float = 1.0
    dail_tx_per_superframe: int | None = None
    inactive_slots: int | None = None
    mobility: bool = True
    tx_power_dbm: float = -10.0  # metadata; the range model subsumes it
    omega: float = 1.0
    alpha: float = 1.0
    neighbours: tuple[int, ...] = (0, 2, 4, 6)
    trials: int = 100_000
    jobs: int = 1

    def __post_init__(self):
        for name in ("sensors", "superframes", "replications", "trials", "jobs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not self.scheme or not self.n_wbans or not self.slots or not self.neighbours:
            raise ConfigError("list keys need at least one value")
        if min(self.n_wbans) < 1:
            raise ConfigError("n_wbans must be >= 1")
        if any(s is not None and s < 1 for s in self.slots):
            raise ConfigError("slots must be >= 1")
        if min(self.neighbours) < 0:
            raise ConfigError("neighbours must be >= 0")
        if self.channels < 2:
            raise ConfigError("channels must be >= 2")
        if self.dail_tx_per_superframe is not None and self.dail_tx_per_superframe < 1:
            raise ConfigError("dail_tx_per_superframe must be >= 1")
        if self.interference_range <= 0 or self.arena_side < 0 or self.body_radius < 0:
            raise ConfigError("geometry values out of range")
        if not (0.0 <= self.omega <= 1.0 and 0.0 <= self.alpha <= 1.0):
            raise ConfigError("omega and alpha must lie in [0, 1]")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        # raises on negative constants
        self.energy

    @property
    def energy(self) -> EnergyModel:
        return EnergyModel(self.e_tx, self.e_rx, self.e_hop, self.e_retx)

    @property
    def standard_compliant(self) -> bool:
        return self.channels <= STANDARD_CHANNELS

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, seed=seed)

    def grid(self) -> list[RunConfig]:
        """Run configurations in deterministic (scheme, slots, n_wbans) order."""
        return [
            RunConfig(
                scheme=sch,
                n_wbans=n,
                sensors=self.sensors,
                channels=self.channels,
                slots=sl,
                superframes=self.superframes,
                replications=self.replications,
                seed=self.seed,
                arena_side=self.arena_side,
                interference_range=self.interference_range,
                body_radius=self.body_radius,
                energy=self.energy,
                dail_tx_per_superframe=self.dail_tx_per_superframe,
                inactive_slots=self.inactive_slots,
                mobility=self.mobility,
            )
            for sch in self.scheme
            for sl in self.slots
            for n in self.n_wbans
        ]


_PARSERS = {
    "scheme": _scheme,
    "n_wbans": _int,
    "sensors": _int,
    "channels": _int,
    "slots": _opt_int,
    "superframes": _int,
    "replications": _int,
    "seed": _int,
    "arena_side": _float,
    "interference_range": _float,
    "body_radius": _float,
    "e_tx": _float,
    "e_rx": _float,
    "e_hop": _float,
    "e_retx": _float,
    "dail_tx_per_superframe": _opt_int,
    "inactive_slots": _opt_int,
    "mobility": _bool,
    "tx_power_dbm": _float,
    "omega": _float,
    "alpha": _float,
    "neighbours": _int,
    "trials": _int,
    "jobs": _int,
}
_LISTS = {"scheme", "n_wbans", "slots", "neighbours"}


def loads(text: str) -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = (p.strip() for p in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        parse = _PARSERS[key]
        if key in _LISTS:
            items = [v.strip() for v in val.split(",") if v.strip()]
            if not items:
                raise ConfigError(f"line {lineno}: {key} needs at least one value")
            values[key] = tuple(parse(v) for v in items)
        else:
            values[key] = parse(val)
    cfg = ExperimentConfig(**values)
    if not cfg.standard_compliant:
        log.warning("channels=%d exceeds the %d channels of the standard band", cfg.channels, STANDARD_CHANNELS)
    return cfg


def dumps(cfg: ExperimentConfig) -> str:
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        text = ", ".join(_fmt(x) for x in v) if f.name in _LISTS else _fmt(v)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def load(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
