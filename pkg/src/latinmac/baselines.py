"""Comparison schedulers: SMS channel allocation and single-channel TDMA with GTS recovery."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .simulator import (
    SMS,
    ZIGBEE,
    MetricsRecord,
    SimState,
    Topology,
    cochannel_flags,
    count_hops,
    exchange,
    _trace_rows,
)

SHARED_CHANNEL = 0


@dataclass(frozen=True)
class SmsSchedule:
    """Per-sensor channel and slot, indexed ``[wban, sensor]``.

    Sensors in an interference region share the slot after the TDMA part
    on their allocated channels; everybody else keeps its TDMA slot on
    channel 0.
    """

    channels: np.ndarray
    slots: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.channels.shape


@dataclass(frozen=True)
class ZigbeeSchedule:
    n_sensors: int
    channel: int = SHARED_CHANNEL

    @property
    def cfp_slots(self) -> int:
        return self.n_sensors

    def tdma_slot(self, sensor: int) -> int:
        return sensor

    def gts_slot(self, grant: int) -> int:
        return self.n_sensors + grant


def color_graph(graph: Mapping[int, set], M: int) -> dict[int, int]:
    """Greedy channel colouring in node-index order; round-robin once channels run out."""
    assigned: dict[int, int] = {}
    rr = 0
    for v in sorted(graph):
        used = {assigned[u] for u in graph[v] if u in assigned}
        free = next((c for c in range(M) if c not in used), None)
        if free is None:
            free = rr % M
            rr += 1
        assigned[v] = free
    return assigned


def interference_graph(topo: Topology) -> dict[int, set]:
    """Conflict graph over sensor ids ``w*K + i``.

    For each pair of WBANs, the interference region holds the sensors of
    either WBAN that lie within range of the other's coordinator; all
    members of one region conflict with each other.
    """
    N, K = topo.offsets.shape[:2]
    spos = topo.sensors
    cpos = topo.coordinators
    r2 = topo.interference_range ** 2
    # near[w, i, q]: sensor i of w hears coordinator q
    d2 = ((spos[:, :, None, :] - cpos[None, None, :, :]) ** 2).sum(axis=-1)
    near = d2 <= r2
    graph: dict[int, set] = {}
    for k in range(N):
        for q in range(k + 1, N):
            members = [k * K + i for i in np.flatnonzero(near[k, :, q])]
            members += [q * K + i for i in np.flatnonzero(near[q, :, k])]
            for v in members:
                graph.setdefault(v, set()).update(u for u in members if u != v)
    return graph


def sms_build(graph: Mapping[int, set], M: int, n_wbans: int | None = None, n_sensors: int | None = None) -> SmsSchedule:
    """Channel allocation for interfering sensors.

    ``graph`` maps sensor id ``w*K + i`` to its conflicting ids. Without
    explicit sizes the schedule covers only the ids present, as one row.
    """
    colours = color_graph(graph, M)
    if n_wbans is None or n_sensors is None:
        n = max(graph, default=-1) + 1
        n_wbans, n_sensors = 1, max(n, 1)
    channels = np.zeros((n_wbans, n_sensors), dtype=np.int64)
    slots = np.tile(np.arange(n_sensors, dtype=np.int64), (n_wbans, 1))
    for v, c in colours.items():
        w, i = divmod(v, n_sensors)
        channels[w, i] = c
        slots[w, i] = n_sensors
    return SmsSchedule(channels, slots)


def _cost(state: SimState, rec: MetricsRecord, retx: int) -> None:
    e = state.energy
    rec.energy = (e.e_tx + e.e_rx) * rec.attempted + e.e_hop * rec.hops
    rec.wasted_energy = e.e_tx * rec.collided + e.e_tx * e.e_retx * retx + e.e_hop * rec.hops


def sms_step(state: SimState) -> MetricsRecord:
    g = state.superframe
    topo = state.topo
    N, K = topo.n_wbans, state.n_sensors
    sched = sms_build(interference_graph(topo), state.n_channels, N, K)
    wban = np.repeat(np.arange(N), K)
    node = np.tile(np.arange(K), N)
    slot = sched.slots.ravel()
    channel = sched.channels.ravel()
    data, ack_lost = exchange(topo, wban, node, slot, channel)

    rec = MetricsRecord(g, SMS, N)
    rec.attempted = len(wban)
    rec.collided = int(data.sum())
    rec.successful = rec.attempted - rec.collided
    rec.delivered = rec.successful
    rec.ack_lost = int(ack_lost.sum())
    rec.hops = count_hops(state.last_channel, wban, node, slot, channel)
    rec.cochannel = int(cochannel_flags(topo, wban, node, slot, channel).sum())
    _cost(state, rec, 0)
    rec.sensor_attempts = np.ones((N, K), dtype=np.int64)
    rec.sensor_successes = (~data).reshape(N, K).astype(np.int64)
    if state.trace:
        rec.trace = _trace_rows(g, "data", wban, node, slot, channel, data, ack_lost)
    return rec


def grant_gts(pending: np.ndarray, capacity: int) -> list[tuple[int, int]]:
    """First-come grants for one WBAN: ``(sensor, gts_index)`` pairs, sensor order."""
    grants = []
    for i in range(len(pending)):
        for _ in range(int(pending[i])):
            if len(grants) == capacity:
                return grants
            grants.append((i, len(grants)))
    return grants


def zigbee_step(state: SimState) -> MetricsRecord:
    """TDMA on one shared channel, then GTS retries for failed and backlogged packets.

    Packets that miss a grant or fail in their GTS wait in ``state.backlog``.
    """
    g = state.superframe
    topo = state.topo
    N, K = topo.n_wbans, state.n_sensors
    sched = ZigbeeSchedule(K)
    wban = np.repeat(np.arange(N), K)
    node = np.tile(np.arange(K), N)
    slot = node.copy()
    channel = np.full(len(wban), sched.channel, dtype=np.int64)
    data, ack_lost = exchange(topo, wban, node, slot, channel)
    failed = (data | ack_lost).reshape(N, K)

    pending = state.backlog + failed
    gw, gi, gs = [], [], []
    for w in range(N):
        for i, k in grant_gts(pending[w], sched.cfp_slots):
            gw.append(w)
            gi.append(i)
            gs.append(sched.gts_slot(k))
    gw = np.array(gw, dtype=np.int64)
    gi = np.array(gi, dtype=np.int64)
    gs = np.array(gs, dtype=np.int64)
    gc = np.full(len(gw), sched.channel, dtype=np.int64)
    g_data, g_ack = exchange(topo, gw, gi, gs, gc)

    got = ~data.reshape(N, K)
    backlog = pending.copy()
    ok = ~(g_data | g_ack)
    np.subtract.at(backlog, (gw[ok], gi[ok]), 1)
    delivered_gts = np.zeros((N, K), dtype=np.int64)
    np.add.at(delivered_gts, (gw, gi), (~g_data).astype(np.int64))
    state.backlog[:] = backlog

    all_w = np.concatenate([wban, gw])
    all_i = np.concatenate([node, gi])
    all_s = np.concatenate([slot, gs])
    all_c = np.concatenate([channel, gc])
    rec = MetricsRecord(g, ZIGBEE, N)
    rec.attempted = len(all_w)
    rec.collided = int(data.sum() + g_data.sum())
    rec.successful = rec.attempted - rec.collided
    rec.delivered = int(got.sum() + delivered_gts.sum())
    rec.ack_lost = int(ack_lost.sum() + g_ack.sum())
    rec.deferred = int(pending.sum())
    rec.hops = count_hops(state.last_channel, all_w, all_i, all_s, all_c)
    rec.cochannel = int(cochannel_flags(topo, all_w, all_i, all_s, all_c).sum())
    _cost(state, rec, len(gw))
    rec.sensor_attempts = np.ones((N, K), dtype=np.int64)
    np.add.at(rec.sensor_attempts, (gw, gi), 1)
    rec.sensor_successes = got.astype(np.int64) + delivered_gts
    if state.trace:
        rec.trace = _trace_rows(g, "tdma", wban, node, slot, channel, data, ack_lost) + _trace_rows(
            g, "gts", gw, gi, gs, gc, g_data, g_ack
        )
    return rec
