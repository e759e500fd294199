"""Pure-Python/NumPy versions of the hot kernels.

Every function here has a Cython twin in ``_kernels.pyx`` with the same
signature and bit-identical output; randomness is always drawn by the
caller and passed in as uniform arrays.
"""

from __future__ import annotations

import numpy as np


def collided_flags(slot, channel, tx_id, tx_x, tx_y, rx_x, rx_y, radius):
    """Flag events hit by another same-slot, same-channel transmitter in range.

    Event ``e`` is flagged iff some event ``f`` with a different
    transmitter shares ``(slot, channel)`` and ``f``'s transmitter lies
    within ``radius`` of ``e``'s receiver.
    """
    n = len(slot)
    out = np.zeros(n, dtype=np.uint8)
    if n < 2:
        return out
    order = np.lexsort((channel, slot))
    s = np.asarray(slot)[order]
    c = np.asarray(channel)[order]
    brk = np.flatnonzero((np.diff(s) != 0) | (np.diff(c) != 0)) + 1
    starts = np.concatenate(([0], brk))
    ends = np.concatenate((brk, [n]))
    r2 = radius * radius
    for a, b in zip(starts, ends):
        if b - a < 2:
            continue
        idx = order[a:b]
        dx = rx_x[idx][:, None] - tx_x[idx][None, :]
        dy = rx_y[idx][:, None] - tx_y[idx][None, :]
        hit = dx * dx + dy * dy <= r2
        hit &= tx_id[idx][:, None] != tx_id[idx][None, :]
        out[idx] = hit.any(axis=1)
    return out


def dail_oracle_successes(act_u, pick_u, chan_u, p_slot, n_patterns, n_same, n_channels):
    """Count trials in which the probe sensor's packet survives.

    Row ``t`` of each ``(T, O)`` array drives one trial: neighbour ``j`` is
    in the probe's slot iff ``act_u[t, j] < p_slot``; the in-slot
    neighbours draw distinct patterns out of ``n_patterns`` (indices below
    ``n_same`` share the probe's rectangle) by a sparse Fisher-Yates shuffle
    fed by ``pick_u``; each foreign-rectangle neighbour hits the probe's
    channel iff ``floor(chan_u * n_channels) == 0``.
    """
    T, O = act_u.shape
    if O == 0:
        return T
    x = (act_u < p_slot).sum(axis=1)
    wpos = np.empty((T, O), dtype=np.int64)
    wval = np.empty((T, O), dtype=np.int64)
    hit = np.zeros(T, dtype=bool)
    for j in range(O):
        r = j + np.floor(pick_u[:, j] * (n_patterns - j)).astype(np.int64)
        sel = r.copy()
        cur = np.full(T, j, dtype=np.int64)
        for k in range(j):
            sel = np.where(wpos[:, k] == r, wval[:, k], sel)
            cur = np.where(wpos[:, k] == j, wval[:, k], cur)
        wpos[:, j] = r
        wval[:, j] = cur
        foreign = sel >= n_same
        same_ch = np.floor(chan_u[:, j] * n_channels).astype(np.int64) == 0
        hit |= (j < x) & foreign & same_ch
    return int(T - hit.sum())
