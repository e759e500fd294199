"""Per-sensor transmission schedules for the DAIL and CHIM schemes.

Both schemes draw one rectangle per WBAN from the complete cyclic family
whose order is the smallest prime covering the frame length and the sensor
count. Rectangle rows are channels, columns are time-slots.

Randomness: WBAN ``w`` built with base seed ``seed`` draws its rectangle
(and CHIM default channel) from ``default_rng(seed + w)`` and its local
superframe phase from ``default_rng([seed + w, 2])``. WBANs do not share
superframe counters, so the phase decides which row of the hopping
sequence a WBAN is on at global superframe 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgument
from .latin import OrthogonalFamily, mols_family, next_prime, symbol_positions, truncate

DAIL = "DAIL"
CHIM = "CHIM"

Cell = tuple[int, int]  # (channel, slot)

PHASE_STREAM = 2
_PHASE_SPAN = 1 << 30


@lru_cache(maxsize=64)
def family(order: int) -> OrthogonalFamily:
    return mols_family(order)


def _check_sizes(N: int, K: int, M: int) -> None:
    if N < 1:
        raise InvalidArgument(f"need at least one WBAN, got N={N}")
    if K < 1:
        raise InvalidArgument(f"need at least one sensor per WBAN, got K={K}")
    if M < 2:
        raise InvalidArgument(f"need at least two channels, got M={M}")


def wban_rng(seed: int, wban: int) -> np.random.Generator:
    return np.random.default_rng(seed + wban)


def wban_phase(seed: int, wban: int) -> int:
    return int(np.random.default_rng([seed + wban, PHASE_STREAM]).integers(_PHASE_SPAN))


@dataclass(frozen=True)
class SuperframeSpec:
    scheme: str
    active_slots: int
    inactive_slots: int
    tdma_slots: int = 0
    imb_slots: int = 0
    slot_duration: float = 1.0

    @property
    def total_slots(self) -> int:
        return self.active_slots + self.inactive_slots


@dataclass(frozen=True)
class DailSensor:
    symbol: int
    pattern: tuple[Cell, ...]


@dataclass(frozen=True)
class DailSchedule:
    wban_id: int
    rectangle_index: int
    order: int
    frame_length: int
    phase: int
    sensors: tuple[DailSensor, ...]

    def cells(self, sensor: int, local_superframe: int, tx_per_superframe: int | None = None) -> list[Cell]:
        """Cells a sensor transmits in during one of its own superframes.

        ``tx_per_superframe=None`` uses the whole pattern. ``1`` sends a
        single packet in the pattern cell selected by the local superframe
        counter, so the sensor hops once per superframe.
        """
        pattern = self.sensors[sensor].pattern
        if not pattern:
            return []
        if tx_per_superframe is None or tx_per_superframe >= len(pattern):
            return list(pattern)
        start = local_superframe % len(pattern)
        return [pattern[(start + k) % len(pattern)] for k in range(tx_per_superframe)]


@dataclass(frozen=True)
class ChimSensor:
    tdma_slot: int
    symbol: int


@dataclass(frozen=True)
class ChimSchedule:
    wban_id: int
    default_channel: int
    rectangle_index: int
    order: int
    phase: int
    n_channels: int
    imb_slots: int
    backup_table: np.ndarray  # [row, sensor] -> IMB slot, -1 when off-frame
    sensors: tuple[ChimSensor, ...]

    @property
    def rows(self) -> int:
        return int(self.backup_table.shape[0])

    def row_channel(self, row: int) -> int:
        """Channel carried by a rectangle row; rows skip the default channel."""
        return row if row < self.default_channel else row + 1

    def backup_row(self, local_superframe: int) -> int:
        return local_superframe % self.rows

    def backup(self, sensor: int, local_superframe: int) -> Cell:
        """Backup ``(channel, IMB slot)`` of ``sensor`` for one local superframe.

        Rows are visited round-robin. If the symbol's column in the current
        row lies beyond the IMB part, the next row that fits is used.
        """
        r0 = self.backup_row(local_superframe)
        for k in range(self.rows):
            r = (r0 + k) % self.rows
            slot = int(self.backup_table[r, sensor])
            if slot >= 0:
                return self.row_channel(r), slot
        raise InvalidArgument(f"sensor {sensor} has no backup slot inside the IMB part")


def frame_length(N: int, K: int, slots: int | None = None) -> int:
    """DAIL frame length: ``K``, stretched to ``N`` when WBANs outnumber sensors."""
    if slots is not None:
        if slots < 1:
            raise InvalidArgument(f"slot override must be >= 1, got {slots}")
        return slots
    return K if N <= K else N


def _pick(rng: np.random.Generator, size: int, forced: Sequence[int] | None, w: int) -> int:
    if forced is not None:
        idx = int(forced[w])
        if not 0 <= idx < size:
            raise InvalidArgument(f"rectangle index {idx} outside family of {size}")
        return idx
    return int(rng.integers(size))


def dail_build(
    N: int,
    K: int,
    M: int,
    rng_seed: int,
    *,
    slots: int | None = None,
    inactive_slots: int | None = None,
    rectangles: Sequence[int] | None = None,
) -> tuple[list[DailSchedule], SuperframeSpec]:
    _check_sizes(N, K, M)
    FL = frame_length(N, K, slots)
    order = next_prime(max(FL, K))
    fam = family(order)
    spec = SuperframeSpec(DAIL, active_slots=FL, inactive_slots=K if inactive_slots is None else inactive_slots)

    schedules = []
    for w in range(N):
        rect_idx = _pick(wban_rng(rng_seed, w), len(fam), rectangles, w)
        rect = truncate(fam[rect_idx], M)
        sensors = []
        for i in range(K):
            cells = tuple((r, c) for r, c in symbol_positions(rect, i + 1) if c < FL)
            sensors.append(DailSensor(symbol=i + 1, pattern=cells))
        schedules.append(
            DailSchedule(
                wban_id=w,
                rectangle_index=rect_idx,
                order=order,
                frame_length=FL,
                phase=wban_phase(rng_seed, w),
                sensors=tuple(sensors),
            )
        )
    return schedules, spec


def chim_build(
    N: int,
    K: int,
    M: int,
    rng_seed: int,
    *,
    inactive_slots: int | None = None,
    rectangles: Sequence[int] | None = None,
    default_channels: Sequence[int] | None = None,
) -> tuple[list[ChimSchedule], SuperframeSpec]:
    _check_sizes(N, K, M)
    order = next_prime(K)
    fam = family(order)
    rows = min(M - 1, order)
    spec = SuperframeSpec(
        CHIM,
        active_slots=2 * K,
        inactive_slots=K if inactive_slots is None else inactive_slots,
        tdma_slots=K,
        imb_slots=K,
    )

    schedules = []
    for w in range(N):
        rng = wban_rng(rng_seed, w)
        dfc = int(rng.integers(M)) if default_channels is None else int(default_channels[w])
        if not 0 <= dfc < M:
            raise InvalidArgument(f"default channel {dfc} outside 0..{M - 1}")
        rect_idx = _pick(rng, len(fam), rectangles, w)
        cells = fam[rect_idx].cells[:rows]
        # column of symbol s in row r, for the K sensor symbols
        table = np.argsort(cells, axis=1)[:, :K].astype(np.int64)
        table[table >= K] = -1
        table.setflags(write=False)
        schedules.append(
            ChimSchedule(
                wban_id=w,
                default_channel=dfc,
                rectangle_index=rect_idx,
                order=order,
                phase=wban_phase(rng_seed, w),
                n_channels=M,
                imb_slots=K,
                backup_table=table,
                sensors=tuple(ChimSensor(tdma_slot=i, symbol=i + 1) for i in range(K)),
            )
        )
    return schedules, spec


def pattern_overlap(p1: Iterable[Cell], p2: Iterable[Cell]) -> int:
    return len(set(p1) & set(p2))


def dump_schedule(schedules: Sequence[DailSchedule | ChimSchedule]) -> str:
    lines = []
    for sch in schedules:
        if isinstance(sch, DailSchedule):
            for j, sensor in enumerate(sch.sensors):
                cells = ",".join(f"{c}:{s}" for c, s in sensor.pattern)
                lines.append(f"wban={sch.wban_id} sensor={j} scheme=DAIL cells={cells}")
        else:
            for j, sensor in enumerate(sch.sensors):
                seq = [sch.backup(j, f) for f in range(sch.rows)]
                cells = ",".join(f"{c}:{s}" for c, s in seq)
                lines.append(
                    f"wban={sch.wban_id} sensor={j} scheme=CHIM cells={cells} "
                    f"dfc={sch.default_channel} tdma={sensor.tdma_slot}"
                )
    return "\n".join(lines) + "\n"
