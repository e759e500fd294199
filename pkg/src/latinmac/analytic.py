"""Closed-form collision and throughput model, plus Monte Carlo oracles.

Notation follows the scheduling model: a probe sensor with ``O`` neighbour
sensors, use factor ``omega``, ``M`` channels, Latin order ``K`` and a
family of ``m`` rectangles (``Z = K*m`` symbol patterns in total).

Combinatorial coefficients use the literal generative model: ``C(O, x)``
neighbours in the probe's slot, ``C(K-1, y)`` of the probe's rectangle
peers among them, ``C(Z-K, x-y)`` foreign patterns, out of ``C(Z-1, x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InvalidArgument

_CHUNK = 1 << 17


def log_comb(n: int, k: int) -> float:
    if k < 0 or k > n or n < 0:
        return -math.inf
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def comb(n: int, k: int) -> float:
    lc = log_comb(n, k)
    return 0.0 if lc == -math.inf else math.exp(lc)


def _binom_pmf(n: int, p: float, k: int) -> float:
    if p <= 0.0:
        return 1.0 if k == 0 else 0.0
    if p >= 1.0:
        return 1.0 if k == n else 0.0
    return math.exp(log_comb(n, k) + k * math.log(p) + (n - k) * math.log1p(-p))


@dataclass(frozen=True)
class DailModelParams:
    O: int
    omega: float
    M: int
    K: int
    m: int | None = None
    Z: int = field(init=False)

    def __post_init__(self):
        if self.m is None:
            object.__setattr__(self, "m", self.K - 1)
        if self.O < 0:
            raise InvalidArgument(f"neighbour count must be >= 0, got {self.O}")
        if not 0.0 <= self.omega <= 1.0:
            raise InvalidArgument(f"use factor must lie in [0, 1], got {self.omega}")
        if self.M < 1 or self.K < 1 or self.m < 1:
            raise InvalidArgument("M, K and m must be positive")
        object.__setattr__(self, "Z", self.K * self.m)

    @property
    def mk(self) -> int:
        return min(self.M, self.K)

    @property
    def slot_prob(self) -> float:
        """Chance that one neighbour is active in the probe's slot."""
        return self.omega * self.mk / self.K


@dataclass(frozen=True)
class ChimModelParams:
    P: int
    alpha: float
    M: int
    K: int
    m: int | None = None
    Z: int = field(init=False)

    def __post_init__(self):
        if self.m is None:
            object.__setattr__(self, "m", self.K - 1)
        if self.P < 0:
            raise InvalidArgument(f"sensor count must be >= 0, got {self.P}")
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidArgument(f"in-range probability must lie in [0, 1], got {self.alpha}")
        object.__setattr__(self, "Z", self.K * self.m)

    @property
    def mk(self) -> int:
        return min(self.M, self.K)


@dataclass(frozen=True)
class ThroughputBounds:
    ts_min: int
    ts_max: int
    t_min: float
    t_max: float
    frame_length: int


# -- DAIL ----------------------------------------------------------------------

def dail_pr_x(params: DailModelParams, x: int) -> float:
    """P(X = x): neighbours transmitting in the probe's slot.

    Activity and slot coincidence are folded into one Bernoulli per
    neighbour with success ``omega * min(M,K) / K``, so this is a PMF.
    """
    if not 0 <= x <= params.O:
        raise InvalidArgument(f"x must lie in 0..{params.O}, got {x}")
    return _binom_pmf(params.O, params.slot_prob, x)


def dail_pr_x_raw(params: DailModelParams, x: int) -> float:
    """Unfolded product ``C(O,x) w^x (1-w)^(O-x) (min(M,K)/K)^x``; not normalised."""
    if not 0 <= x <= params.O:
        raise InvalidArgument(f"x must lie in 0..{params.O}, got {x}")
    return _binom_pmf(params.O, params.omega, x) * (params.mk / params.K) ** x


def dail_pr_y_given_x(params: DailModelParams, x: int, y: int) -> float:
    """Hypergeometric share of same-rectangle patterns among ``x`` draws."""
    if not 0 <= y <= x <= params.O:
        raise InvalidArgument(f"need 0 <= y <= x <= O, got x={x}, y={y}")
    Z, K = params.Z, params.K
    if x > Z - 1:
        raise InvalidArgument(f"cannot draw {x} distinct patterns out of {Z - 1}")
    lp = log_comb(K - 1, y) + log_comb(Z - K, x - y) - log_comb(Z - 1, x)
    return 0.0 if lp == -math.inf else math.exp(lp)


def dail_pr_coll_given(params: DailModelParams, x: int, y: int) -> float:
    if not 0 <= y <= x:
        raise InvalidArgument(f"need 0 <= y <= x, got x={x}, y={y}")
    mk = params.mk
    return 1.0 - ((mk - 1) / mk) ** (x - y)


def dail_success_prob(params: DailModelParams) -> float:
    """Probability lambda that the probe's packet is received.

    Neighbours hold distinct patterns, so ``O`` may not exceed ``Z - 1``.
    """
    if params.O > params.Z - 1:
        raise InvalidArgument(f"{params.O} neighbours cannot hold distinct patterns out of {params.Z - 1}")
    lam = 0.0
    for x in range(params.O + 1):
        px = dail_pr_x(params, x)
        if px == 0.0:
            continue
        inner = sum(
            dail_pr_y_given_x(params, x, y) * (1.0 - dail_pr_coll_given(params, x, y))
            for y in range(x + 1)
        )
        lam += px * inner
    return min(max(lam, 0.0), 1.0)


def dail_throughput_bounds(O: int, N: int, M: int, K: int, m: int | None = None) -> ThroughputBounds:
    """Per-superframe success bounds for one sensor with ``O`` neighbours.

    For ``K <= M`` the frame is ``K`` slots. For ``K > M`` the frame is
    stretched to ``max(M, ceil(N/m))`` and only ``M`` cells carry data.
    """
    if O < 0 or N < 0:
        raise InvalidArgument("O and N must be >= 0")
    if M < 1 or K < 1:
        raise InvalidArgument("M and K must be >= 1")
    m = K - 1 if m is None else m
    if K <= M:
        fl = K
        ts_max = K - max(O - K + 1, 0)
        ts_min = K - O
    else:
        fl = max(M, math.ceil(N / m)) if m > 0 else M
        ts_max = M - max(O - fl + 1, 0)
        ts_min = M - O
    ts_max = max(ts_max, 0)
    ts_min = max(ts_min, 0)
    return ThroughputBounds(
        ts_min=ts_min, ts_max=ts_max, t_min=ts_min / fl, t_max=min(ts_max / fl, 1.0), frame_length=fl
    )


# -- CHIM ----------------------------------------------------------------------

def chim_tdma_pr_x(params: ChimModelParams, x: int) -> float:
    """P(X = x) for TDMA-part contenders, folded into a binomial PMF."""
    if not 0 <= x <= params.P:
        raise InvalidArgument(f"x must lie in 0..{params.P}, got {x}")
    return _binom_pmf(params.P, params.alpha * params.mk / params.K, x)


def chim_tdma_pr_x_raw(params: ChimModelParams, x: int) -> float:
    if not 0 <= x <= params.P:
        raise InvalidArgument(f"x must lie in 0..{params.P}, got {x}")
    return _binom_pmf(params.P, params.alpha, x) * (params.mk / params.K) ** x


def chim_q(params: ChimModelParams | DailModelParams, x: int, y: int) -> float:
    """Single-slot collision probability with ``x - y`` foreign contenders."""
    if not 0 <= y <= x:
        raise InvalidArgument(f"need 0 <= y <= x, got x={x}, y={y}")
    return 1.0 - (1.0 - 1.0 / params.mk) ** (x - y)


def chim_imb_pmf(K: int, Q: float, t: int) -> float:
    """P(T_imb = t): ``t`` of ``K`` sensors collide in both TDMA and IMB."""
    if not 0 <= t <= K:
        raise InvalidArgument(f"t must lie in 0..{K}, got {t}")
    if not 0.0 <= Q <= 1.0:
        raise InvalidArgument(f"Q must lie in [0, 1], got {Q}")
    return _binom_pmf(K, Q * Q, t)


def chim_cfp_pmf(K: int, Q: float, M: int, t: int) -> float:
    """Single-channel CFP comparison quantity: IMB PMF scaled by ``min(M,K)**t``.

    Not a probability; it exceeds 1 for large ``t`` (see :func:`cfp_exceeds_one`).
    """
    return chim_imb_pmf(K, Q, t) * float(min(M, K)) ** t


def cfp_exceeds_one(K: int, Q: float, M: int, t: int) -> bool:
    return chim_cfp_pmf(K, Q, M, t) > 1.0


# -- Monte Carlo oracles -------------------------------------------------------

def _mean_se(successes: float, trials: int) -> tuple[float, float]:
    p = successes / trials
    return p, math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def _check_trials(trials: int) -> None:
    if trials < 10_000:
        raise InvalidArgument(f"oracles need at least 10^4 trials, got {trials}")


def oracle_dail(params: DailModelParams, trials: int, seed: int) -> tuple[float, float]:
    """Simulated success probability of the probe sensor, with standard error.

    Each trial samples which neighbours share the probe's slot, draws their
    patterns without replacement from the ``Z-1`` foreign patterns and
    draws a channel for every neighbour outside the probe's rectangle.
    """
    _check_trials(trials)
    if params.O > params.Z - 1:
        raise InvalidArgument("more neighbours than distinct foreign patterns")
    rng = np.random.default_rng(seed)
    ok = 0
    done = 0
    while done < trials:
        n = min(_CHUNK, trials - done)
        shape = (n, params.O)
        ok += kernels.dail_oracle_successes(
            rng.random(shape), rng.random(shape), rng.random(shape),
            params.slot_prob, params.Z - 1, params.K - 1, params.mk,
        )
        done += n
    return _mean_se(ok, trials)


def _stage_collisions(rng, n, shape, contenders, mk):
    """Boolean collision outcome: any of ``contenders`` picks channel 0."""
    if contenders == 0:
        return np.zeros((n,) + shape, dtype=bool)
    draws = rng.integers(0, mk, size=(n,) + shape + (contenders,), dtype=np.int16)
    return (draws == 0).any(axis=-1)


def oracle_chim_q(M: int, K: int, contenders: int, trials: int, seed: int) -> tuple[float, float]:
    """Fraction of trials in which some contender picks the probe's channel."""
    _check_trials(trials)
    rng = np.random.default_rng(seed)
    mk = min(M, K)
    hits = 0
    done = 0
    while done < trials:
        n = min(_CHUNK, trials - done)
        hits += int(_stage_collisions(rng, n, (), contenders, mk).sum())
        done += n
    return _mean_se(hits, trials)


def oracle_chim_imb(K: int, M: int, contenders: int, t: int, trials: int, seed: int) -> tuple[float, float]:
    """Frequency of exactly ``t`` sensors colliding in both the TDMA and IMB stages."""
    _check_trials(trials)
    rng = np.random.default_rng(seed)
    mk = min(M, K)
    hits = 0
    done = 0
    chunk = max(1, _CHUNK // max(K, 1))
    while done < trials:
        n = min(chunk, trials - done)
        first = _stage_collisions(rng, n, (K,), contenders, mk)
        second = _stage_collisions(rng, n, (K,), contenders, mk)
        hits += int(((first & second).sum(axis=1) == t).sum())
        done += n
    return _mean_se(hits, trials)
