"""Slot-level simulation of coexisting WBANs.

Every active slot has a data sub-slot (sensor -> coordinator) followed by an
ack sub-slot (coordinator -> sensor). A transmission fails when another
transmitter on the same channel, in the same (sub-)slot, lies within the
interference range of its receiver; every such transmission fails, there is
no capture. Coordinators move once per superframe.

All WBANs share slot boundaries but not superframe counters: WBAN ``w`` at
global superframe ``g`` is in its local superframe ``g + phase_w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import kernels
from .errors import ConfigError
from .scheduler import CHIM, DAIL, ChimSchedule, DailSchedule, chim_build, dail_build

SMS = "SMS"
ZIGBEE = "ZIGBEE"
SCHEMES = (DAIL, CHIM, SMS, ZIGBEE)

COORDINATOR = -1
DATA = "DATA"
ACK = "ACK"
MOBILITY_STREAM = 1


# -- geometry ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Topology:
    coordinators: np.ndarray  # (N, 2)
    offsets: np.ndarray  # (N, K, 2), relative to the coordinator
    interference_range: float = 3.0
    arena_side: float = 10.0

    def __post_init__(self):
        if self.interference_range <= 0:
            raise ConfigError("interference range must be positive")
        if self.arena_side < 0:
            raise ConfigError("arena side must be >= 0")

    @property
    def n_wbans(self) -> int:
        return int(self.coordinators.shape[0])

    @property
    def sensors(self) -> np.ndarray:
        """Absolute sensor positions, kept inside the arena."""
        pos = self.coordinators[:, None, :] + self.offsets
        return np.clip(pos, 0.0, self.arena_side)

    def position(self, wban: int, node: int) -> np.ndarray:
        if node == COORDINATOR:
            return self.coordinators[wban]
        return self.sensors[wban, node]

    def in_range(self, a, b) -> bool:
        return math.dist(a, b) <= self.interference_range


def _disk_offsets(rng: np.random.Generator, K: int, radius: float) -> np.ndarray:
    rad = radius * np.sqrt(rng.random(K))
    ang = 2.0 * np.pi * rng.random(K)
    return np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=-1)


def mobility_rngs(seed: int, N: int) -> list[np.random.Generator]:
    return [np.random.default_rng([seed + w, MOBILITY_STREAM]) for w in range(N)]


def place(
    N: int,
    K: int,
    rngs: Sequence[np.random.Generator],
    arena_side: float = 10.0,
    interference_range: float = 3.0,
    body_radius: float = 1.0,
) -> Topology:
    """Uniform coordinator placement; sensors uniform on a disk around each body."""
    coords = np.array([rngs[w].random(2) * arena_side for w in range(N)]).reshape(N, 2)
    offsets = np.array([_disk_offsets(rngs[w], K, body_radius) for w in range(N)]).reshape(N, K, 2)
    return Topology(coords, offsets, interference_range, arena_side)


def mobility_update(topo: Topology, rng) -> Topology:
    """Re-sample every coordinator uniformly in the arena; bodies keep their shape.

    ``rng`` is one generator, or one generator per WBAN so that a WBAN's
    trajectory does not depend on how many others exist.
    """
    N = topo.n_wbans
    if isinstance(rng, np.random.Generator):
        coords = rng.random((N, 2)) * topo.arena_side
    else:
        coords = np.array([rng[w].random(2) * topo.arena_side for w in range(N)]).reshape(N, 2)
    return replace(topo, coordinators=coords)


# -- events and collision predicates ---------------------------------------------

@dataclass(frozen=True)
class SlotEvent:
    superframe: int
    slot: int
    channel: int
    transmitter: tuple[int, int]  # (wban, node); node -1 is the coordinator
    receiver: tuple[int, int]
    kind: str = DATA


def _interfered(event: SlotEvent, concurrent: Sequence[SlotEvent], topo: Topology) -> bool:
    rx = topo.position(*event.receiver)
    for other in concurrent:
        if other is event or other.transmitter == event.transmitter:
            continue
        if other.channel != event.channel or other.slot != event.slot:
            continue
        if other.superframe != event.superframe:
            continue
        if topo.in_range(topo.position(*other.transmitter), rx):
            return True
    return False


def detect_data_collision(event: SlotEvent, concurrent: Sequence[SlotEvent], topo: Topology) -> bool:
    """True iff a same-channel transmitter in ``concurrent`` reaches the event's coordinator."""
    return _interfered(event, concurrent, topo)


def detect_ack_collision(event: SlotEvent, concurrent: Sequence[SlotEvent], topo: Topology) -> bool:
    """True iff a same-channel transmitter in ``concurrent`` reaches the acked sensor."""
    return _interfered(event, concurrent, topo)


# -- energy and metrics --------------------------------------------------------------

@dataclass(frozen=True)
class EnergyModel:
    e_tx: float = 1.0
    e_rx: float = 0.5
    e_hop: float = 0.2
    e_retx: float = 1.0

    def __post_init__(self):
        if min(self.e_tx, self.e_rx, self.e_hop, self.e_retx) < 0:
            raise ConfigError("energy constants must be >= 0")


@dataclass
class MetricsRecord:
    superframe: int
    scheme: str
    n_wbans: int
    attempted: int = 0
    collided: int = 0
    successful: int = 0
    deferred: int = 0
    energy: float = 0.0
    hops: int = 0
    wasted_energy: float = 0.0
    delivered: int = 0
    ack_lost: int = 0
    cochannel: int = 0
    sensor_attempts: np.ndarray | None = field(default=None, repr=False)
    sensor_successes: np.ndarray | None = field(default=None, repr=False)
    trace: list | None = field(default=None, repr=False)


@dataclass
class SimState:
    scheme: str
    topo: Topology
    n_sensors: int
    n_channels: int
    energy: EnergyModel = field(default_factory=EnergyModel)
    dail_tx_per_superframe: int | None = None
    superframe: int = 0
    last_channel: np.ndarray | None = None
    backlog: np.ndarray | None = None
    trace: bool = False

    def __post_init__(self):
        shape = (self.topo.n_wbans, self.n_sensors)
        if self.last_channel is None:
            self.last_channel = np.full(shape, -1, dtype=np.int64)
        if self.backlog is None:
            self.backlog = np.zeros(shape, dtype=np.int64)


# -- shared exchange machinery -----------------------------------------------------

def exchange(topo: Topology, wban, node, slot, channel):
    """Resolve one batch of concurrent data transmissions and their acks.

    Returns ``(data_collided, ack_lost)`` boolean arrays; ``ack_lost`` is
    only set where the data got through.
    """
    wban = np.asarray(wban, dtype=np.int64)
    node = np.asarray(node, dtype=np.int64)
    slot = np.asarray(slot, dtype=np.int64)
    channel = np.asarray(channel, dtype=np.int64)
    n = len(wban)
    if n == 0:
        return np.zeros(0, dtype=bool), np.zeros(0, dtype=bool)
    K = topo.offsets.shape[1]
    spos = topo.sensors[wban, node]
    cpos = topo.coordinators[wban]
    r = topo.interference_range
    data = kernels.collided_flags(
        slot, channel, wban * K + node, spos[:, 0], spos[:, 1], cpos[:, 0], cpos[:, 1], r
    ).astype(bool)
    ok = np.flatnonzero(~data)
    ack_lost = np.zeros(n, dtype=bool)
    if len(ok):
        # the coordinator is the transmitter of the ack
        ack = kernels.collided_flags(
            slot[ok], channel[ok], wban[ok], cpos[ok, 0], cpos[ok, 1], spos[ok, 0], spos[ok, 1], r
        ).astype(bool)
        ack_lost[ok] = ack
    return data, ack_lost


def cochannel_flags(topo: Topology, wban, node, slot, channel):
    """Transmissions sharing (slot, channel) with an in-range sensor of another WBAN."""
    wban = np.asarray(wban, dtype=np.int64)
    if len(wban) == 0:
        return np.zeros(0, dtype=bool)
    spos = topo.sensors[wban, np.asarray(node)]
    return kernels.collided_flags(
        np.asarray(slot), np.asarray(channel), wban,
        spos[:, 0], spos[:, 1], spos[:, 0], spos[:, 1], topo.interference_range,
    ).astype(bool)


def count_hops(last_channel: np.ndarray, wban, node, slot, channel) -> int:
    """Channel switches in time order; updates ``last_channel`` in place."""
    if len(wban) == 0:
        return 0
    order = np.lexsort((slot, node, wban))
    hops = 0
    for e in order:
        w, i, c = int(wban[e]), int(node[e]), int(channel[e])
        prev = last_channel[w, i]
        if prev >= 0 and prev != c:
            hops += 1
        last_channel[w, i] = c
    return hops


def _trace_rows(g, phase, wban, node, slot, channel, collided, ack_lost):
    return [
        (g, phase, int(w), int(i), int(s), int(c), bool(x), bool(a))
        for w, i, s, c, x, a in zip(wban, node, slot, channel, collided, ack_lost)
    ]


# -- scheme steps ------------------------------------------------------------------------

def _dail_step(state: SimState, schedules: Sequence[DailSchedule]) -> MetricsRecord:
    g = state.superframe
    N, K = state.topo.n_wbans, state.n_sensors
    rows = []
    for sch in schedules:
        local = g + sch.phase
        for i in range(K):
            for ch, sl in sch.cells(i, local, state.dail_tx_per_superframe):
                rows.append((sch.wban_id, i, sl, ch))
    ev = np.array(rows, dtype=np.int64).reshape(-1, 4)
    wban, node, slot, channel = ev.T
    data, ack_lost = exchange(state.topo, wban, node, slot, channel)
    hops = count_hops(state.last_channel, wban, node, slot, channel)

    rec = MetricsRecord(g, DAIL, N)
    rec.attempted = len(ev)
    rec.collided = int(data.sum())
    rec.successful = rec.attempted - rec.collided
    rec.delivered = rec.successful
    rec.ack_lost = int(ack_lost.sum())
    rec.hops = hops
    rec.cochannel = int(cochannel_flags(state.topo, wban, node, slot, channel).sum())
    e = state.energy
    rec.energy = e.e_tx * rec.attempted + e.e_rx * rec.attempted + e.e_hop * hops
    rec.wasted_energy = e.e_tx * rec.collided + e.e_hop * hops
    rec.sensor_attempts = np.zeros((N, K), dtype=np.int64)
    rec.sensor_successes = np.zeros((N, K), dtype=np.int64)
    np.add.at(rec.sensor_attempts, (wban, node), 1)
    np.add.at(rec.sensor_successes, (wban, node), (~data).astype(np.int64))
    if state.trace:
        rec.trace = _trace_rows(g, "data", wban, node, slot, channel, data, ack_lost)
    return rec


def _chim_step(state: SimState, schedules: Sequence[ChimSchedule]) -> MetricsRecord:
    g = state.superframe
    N, K = state.topo.n_wbans, state.n_sensors
    wban = np.repeat(np.arange(N), K)
    node = np.tile(np.arange(K), N)
    slot = np.array([sch.sensors[i].tdma_slot for sch in schedules for i in range(K)], dtype=np.int64)
    channel = np.repeat([sch.default_channel for sch in schedules], K)
    data, ack_lost = exchange(state.topo, wban, node, slot, channel)
    failed = data | ack_lost

    fw, fi = wban[failed], node[failed]
    b = [schedules[w].backup(i, g + schedules[w].phase) for w, i in zip(fw, fi)]
    b_channel = np.array([c for c, _ in b], dtype=np.int64)
    b_slot = K + np.array([s for _, s in b], dtype=np.int64)
    b_data, b_ack = exchange(state.topo, fw, fi, b_slot, b_channel)

    all_w = np.concatenate([wban, fw])
    all_i = np.concatenate([node, fi])
    all_s = np.concatenate([slot, b_slot])
    all_c = np.concatenate([channel, b_channel])
    hops = count_hops(state.last_channel, all_w, all_i, all_s, all_c)

    rec = MetricsRecord(g, CHIM, N)
    rec.attempted = len(wban) + len(fw)
    rec.collided = int(data.sum() + b_data.sum())
    rec.successful = rec.attempted - rec.collided
    got = ~data.reshape(N, K)
    got[fw, fi] |= ~b_data
    rec.delivered = int(got.sum())
    rec.ack_lost = int(ack_lost.sum() + b_ack.sum())
    rec.deferred = len(fw)
    rec.hops = hops
    rec.cochannel = int(cochannel_flags(state.topo, all_w, all_i, all_s, all_c).sum())
    e = state.energy
    rec.energy = (e.e_tx + e.e_rx) * rec.attempted + e.e_hop * hops
    rec.wasted_energy = e.e_tx * rec.collided + e.e_tx * e.e_retx * len(fw) + e.e_hop * hops
    rec.sensor_attempts = np.ones((N, K), dtype=np.int64)
    np.add.at(rec.sensor_attempts, (fw, fi), 1)
    rec.sensor_successes = got.astype(np.int64)
    if state.trace:
        rec.trace = _trace_rows(g, "tdma", wban, node, slot, channel, data, ack_lost) + _trace_rows(
            g, "imb", fw, fi, b_slot, b_channel, b_data, b_ack
        )
    return rec


def step_superframe(state: SimState, schedules, rng) -> tuple[SimState, MetricsRecord]:
    """Play one superframe, then move the WBANs.

    ``rng`` drives mobility (one generator, or one per WBAN); ``None``
    keeps the topology fixed.
    """
    if schedules is not None and len(schedules):
        kinds = {type(s) for s in schedules}
        if len(kinds) != 1:
            raise ConfigError("all WBANs of a run must use the same scheme")
        expected = {DAIL: DailSchedule, CHIM: ChimSchedule}.get(state.scheme)
        if expected is not None and kinds != {expected}:
            raise ConfigError(f"schedules do not match scheme {state.scheme}")

    state = replace(state, last_channel=state.last_channel.copy(), backlog=state.backlog.copy())
    if state.scheme == DAIL:
        rec = _dail_step(state, schedules)
    elif state.scheme == CHIM:
        rec = _chim_step(state, schedules)
    elif state.scheme in (SMS, ZIGBEE):
        from . import baselines

        rec = baselines.sms_step(state) if state.scheme == SMS else baselines.zigbee_step(state)
    else:
        raise ConfigError(f"unknown scheme {state.scheme!r}")

    topo = state.topo if rng is None else mobility_update(state.topo, rng)
    return replace(state, topo=topo, superframe=state.superframe + 1), rec


# -- runs ----------------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    scheme: str = DAIL
    n_wbans: int = 10
    sensors: int = 12
    channels: int = 16
    slots: int | None = None
    superframes: int = 20
    replications: int = 1
    seed: int = 1
    arena_side: float = 10.0
    interference_range: float = 3.0
    body_radius: float = 1.0
    energy: EnergyModel = field(default_factory=EnergyModel)
    dail_tx_per_superframe: int | None = None
    inactive_slots: int | None = None
    mobility: bool = True

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        for name in ("n_wbans", "sensors", "superframes", "replications"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.channels < 2:
            raise ConfigError("need at least two channels")


@dataclass(frozen=True)
class Summary:
    scheme: str
    n_wbans: int
    mcp: float
    cfp: float
    mpc: float
    mspr: float
    dps: float
    tp: float
    replications: int
    seed: int
    slots: int | None = None


def replication_seed(seed: int, replication: int) -> int:
    return seed + replication * 10007


def build_schedules(cfg: RunConfig, base_seed: int):
    N, K, M = cfg.n_wbans, cfg.sensors, cfg.channels
    if cfg.scheme == DAIL:
        return dail_build(N, K, M, base_seed, slots=cfg.slots, inactive_slots=cfg.inactive_slots)[0]
    if cfg.scheme == CHIM:
        return chim_build(N, K, M, base_seed, inactive_slots=cfg.inactive_slots)[0]
    return None


def iterate(cfg: RunConfig, replication: int, trace: bool = False):
    """Yield ``(topology, record)`` per superframe; the topology is the one the record was played on."""
    base = replication_seed(cfg.seed, replication)
    rngs = mobility_rngs(base, cfg.n_wbans)
    topo = place(cfg.n_wbans, cfg.sensors, rngs, cfg.arena_side, cfg.interference_range, cfg.body_radius)
    schedules = build_schedules(cfg, base)
    state = SimState(
        scheme=cfg.scheme,
        topo=topo,
        n_sensors=cfg.sensors,
        n_channels=cfg.channels,
        energy=cfg.energy,
        dail_tx_per_superframe=cfg.dail_tx_per_superframe,
        trace=trace,
    )
    for _ in range(cfg.superframes):
        played = state.topo
        state, rec = step_superframe(state, schedules, rngs if cfg.mobility else None)
        yield played, rec


def run_replication(cfg: RunConfig, replication: int) -> list[MetricsRecord]:
    return [rec for _, rec in iterate(cfg, replication)]


def summarize(cfg: RunConfig, records: Sequence[MetricsRecord]) -> Summary:
    """Aggregate per-superframe records (all replications) into the reported metrics.

    mcp and cfp average the per-superframe ratios; mpc is wasted energy per
    sensor; mspr is unique deliveries per WBAN; dps is deferred packets per
    WBAN; tp is unique deliveries per superframe over the whole network.
    """
    NK = cfg.n_wbans * cfg.sensors
    ratios = [(r.collided / r.attempted, r.cochannel / r.attempted) for r in records if r.attempted]
    mcp = float(np.mean([a for a, _ in ratios])) if ratios else 0.0
    cfp = float(np.mean([b for _, b in ratios])) if ratios else 0.0
    return Summary(
        scheme=cfg.scheme,
        n_wbans=cfg.n_wbans,
        mcp=mcp,
        cfp=cfp,
        mpc=float(np.mean([r.wasted_energy / NK for r in records])),
        mspr=float(np.mean([r.delivered / cfg.n_wbans for r in records])),
        dps=float(np.mean([r.deferred / cfg.n_wbans for r in records])),
        tp=float(np.mean([r.delivered for r in records])),
        replications=cfg.replications,
        seed=cfg.seed,
        slots=cfg.slots,
    )


def run(cfg: RunConfig) -> tuple[list[list[MetricsRecord]], Summary]:
    """All replications of one grid point; deterministic given ``cfg.seed``."""
    series = [run_replication(cfg, r) for r in range(cfg.replications)]
    return series, summarize(cfg, [rec for reps in series for rec in reps])


# -- CSV output -----------------------------------------------------------------------------

SUPERFRAME_COLUMNS = (
    "superframe", "scheme", "n_wbans", "attempted", "collided", "successful",
    "deferred", "energy", "hops", "replication", "slots",
)
SUMMARY_COLUMNS = ("scheme", "n_wbans", "mcp", "cfp", "mpc", "mspr", "dps", "tp", "replications", "seed", "slots")


def _cell(v) -> str:
    if v is None:
        return "auto"
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def superframe_rows(cfg: RunConfig, series: Sequence[Sequence[MetricsRecord]]):
    for rep, records in enumerate(series):
        for r in records:
            yield [
                r.superframe, r.scheme, r.n_wbans, r.attempted, r.collided, r.successful,
                r.deferred, r.energy, r.hops, rep, cfg.slots,
            ]


def summary_row(s: Summary) -> list:
    return [s.scheme, s.n_wbans, s.mcp, s.cfp, s.mpc, s.mspr, s.dps, s.tp, s.replications, s.seed, s.slots]


def write_csv(fh, header: Sequence[str], rows) -> None:
    """Plain comma-separated output with fixed float formatting, so reruns are byte-identical."""
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(_cell(v) for v in row) + "\n")
