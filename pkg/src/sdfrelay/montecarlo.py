"""Snapshot simulation of the relay link in a marked Poisson field of interferers.

Trials are grouped into fixed-size blocks. Every random quantity of a block
(counts, radii, angles, marks, desired gains) comes from its own Philox
stream keyed by ``(seed, block index, stream id)``, and each stream is
consumed sequentially, trial after trial. A trial is therefore a pure
function of ``(seed, trial_index)`` and results do not depend on how blocks
are scheduled across threads.

Interferers are drawn on a disk around the destination. Interference from
beyond the disk can be replaced by its mean (``tail_correction``); the
fluctuation it leaves out is orders of magnitude below the decision
thresholds for the default radius.
"""

from __future__ import annotations

import enum
import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .analytic import Method, OutageBreakdown
from .errors import DomainError
from .geometry import path_loss
from .model import Fading, NetworkConfig, NodeLayout

MIN_WINDOW_RADIUS = 100.0
TAIL_TOLERANCE = 1e-3

_COUNTS, _RADIUS, _ANGLE, _MARK_G, _MARK_H, _DESIRED = range(6)


@dataclass(frozen=True)
class SimulationParams:
    trials: int
    seed: int = 0
    window_radius: Optional[float] = None  # None picks the radius automatically
    tail_correction: bool = True
    block_size: int = 4096
    threads: int = 1

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials}")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.window_radius is not None and not self.window_radius > 0:
            raise DomainError("window radius must be positive")
        if self.block_size < 1 or self.threads < 1:
            raise DomainError("block size and thread count must be positive")


@dataclass(frozen=True)
class Snapshot:
    positions: np.ndarray  # (n, 2)
    g: np.ndarray
    h: np.ndarray
    u_sr: float
    u_sd: float
    u_rd: float

    @classmethod
    def from_points(cls, points, g=None, h=None, u_sr=1.0, u_sd=1.0, u_rd=1.0) -> "Snapshot":
        pos = np.asarray(points, dtype=float).reshape(-1, 2)
        n = len(pos)
        g = np.ones(n) if g is None else np.asarray(g, dtype=float)
        h = np.ones(n) if h is None else np.asarray(h, dtype=float)
        return cls(pos, g, h, float(u_sr), float(u_sd), float(u_rd))

    def __len__(self):
        return len(self.positions)


@dataclass(frozen=True)
class SnapshotBatch:
    """Consecutive trials in flattened form; ``trial_ids`` maps points to trials."""

    first_trial: int
    counts: np.ndarray
    x: np.ndarray
    y: np.ndarray
    g: np.ndarray
    h: np.ndarray
    u: np.ndarray  # (n_trials, 3): u_sr, u_sd, u_rd

    @property
    def n_trials(self) -> int:
        return len(self.counts)

    @property
    def trial_ids(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_trials), self.counts)

    def snapshot(self, k: int) -> Snapshot:
        start = int(self.counts[:k].sum())
        stop = start + int(self.counts[k])
        pos = np.column_stack((self.x[start:stop], self.y[start:stop]))
        return Snapshot(pos, self.g[start:stop].copy(), self.h[start:stop].copy(), *map(float, self.u[k]))


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    se: float
    trials: int
    seed: int
    events: int

    @classmethod
    def from_count(cls, events: int, trials: int, seed: int) -> "McEstimate":
        p = events / trials
        return cls(p, math.sqrt(p * (1.0 - p) / trials), trials, seed, events)


@dataclass(frozen=True)
class MonteCarloResult:
    breakdown: OutageBreakdown
    bc: McEstimate
    mac: McEstimate
    total: McEstimate
    window_radius: float
    tail: tuple[float, float]


class Outcome(enum.IntEnum):
    SUCCESS = 0
    BC_OUTAGE = 1
    MAC_OUTAGE = 2


def _rng(seed: int, block: int, stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(block), stream))
    return np.random.Generator(np.random.Philox(ss))


def _mark_moments(kind: Fading) -> tuple[float, float]:
    # (E[g], E[g^2])
    return (1.0, 2.0) if kind is Fading.RAYLEIGH else (1.0, 1.0)


def _signal_floor(config: NetworkConfig) -> float:
    """Interference level at which a single slot first goes into outage with unit fading."""
    lay = config.layout
    l_sr = path_loss(lay.dist_sr, config.alpha)
    l_s = path_loss(lay.norm_s, config.alpha)
    return min(l_sr, 2.0 * l_s) / config.beta


def auto_window_radius(config: NetworkConfig, tail_correction: bool = True) -> float:
    """Simulation disk radius.

    ``max(100, 5 max(|x_s|, |x_r|), r_eps)``. Without tail correction r_eps
    bounds the mean interference from beyond the disk (``2 pi lam E[g] R'^(2 -
    alpha)/(alpha - 2)`` with R' the distance from the relay to the disk edge)
    by 1e-3 of the signal floor; with tail correction it bounds the standard
    deviation of that interference instead.
    """
    lay = config.layout
    base = max(MIN_WINDOW_RADIUS, 5.0 * max(lay.norm_s, lay.norm_r))
    lam, alpha = config.lam, config.alpha
    if lam == 0.0:
        return base
    mean_g, second_g = _mark_moments(config.fading.mark_g)
    mean_h, second_h = _mark_moments(config.fading.mark_h)
    tol = TAIL_TOLERANCE * _signal_floor(config)
    if tail_correction:
        var_coeff = 2.0 * math.pi * lam * max(second_g, second_h) / (2.0 * alpha - 2.0)
        reach = (var_coeff / tol**2) ** (1.0 / (2.0 * alpha - 2.0))
    else:
        mean_coeff = 2.0 * math.pi * lam * max(mean_g, mean_h) / (alpha - 2.0)
        reach = (mean_coeff / tol) ** (1.0 / (alpha - 2.0))
    return max(base, lay.norm_r + reach)


@functools.lru_cache(maxsize=128)
def _outer_pathloss_integrals(layout: NodeLayout, alpha: float, radius: float) -> tuple[float, float]:
    """Integrals of l(|x - x_r|) and l(|x|) over the plane outside the disk of given radius."""
    xr = layout.norm_r

    def around_relay(r):
        def f(phi):
            d2 = r * r + xr * xr - 2.0 * r * xr * math.cos(phi)
            return 1.0 / (1.0 + max(d2, 0.0) ** (alpha / 2.0))
        return 2.0 * r * integrate.quad(f, 0.0, math.pi, epsrel=1e-10)[0]

    relay = integrate.quad(around_relay, radius, math.inf, epsrel=1e-9, limit=200)[0]
    dest = integrate.quad(lambda r: 2.0 * math.pi * r / (1.0 + r**alpha), radius, math.inf,
                          epsrel=1e-10, limit=200)[0]
    return relay, dest


def tail_interference(config: NetworkConfig, radius: float) -> tuple[float, float]:
    """Mean interference at relay and destination from interferers beyond ``radius``."""
    if config.lam == 0.0:
        return 0.0, 0.0
    relay, dest = _outer_pathloss_integrals(config.layout, config.alpha, float(radius))
    mean_g = _mark_moments(config.fading.mark_g)[0]
    mean_h = _mark_moments(config.fading.mark_h)[0]
    return config.lam * mean_g * relay, config.lam * mean_h * dest


def sample_block(config: NetworkConfig, params: SimulationParams, block: int,
                 n_trials: Optional[int] = None, radius: Optional[float] = None) -> SnapshotBatch:
    """Draw the first ``n_trials`` trials of a block (all of it by default)."""
    B = params.block_size
    if n_trials is None:
        n_trials = min(B, params.trials - block * B)
    if not 0 < n_trials <= B:
        raise DomainError(f"block {block} holds no trials")
    R = radius if radius is not None else (params.window_radius or
                                            auto_window_radius(config, params.tail_correction))
    seed = params.seed
    counts = _rng(seed, block, _COUNTS).poisson(config.lam * math.pi * R * R, n_trials)
    m = int(counts.sum())
    rad = R * np.sqrt(_rng(seed, block, _RADIUS).random(m))
    ang = 2.0 * math.pi * _rng(seed, block, _ANGLE).random(m)
    fad = config.fading
    g = (_rng(seed, block, _MARK_G).standard_exponential(m)
         if fad.mark_g is Fading.RAYLEIGH else np.ones(m))
    h = (_rng(seed, block, _MARK_H).standard_exponential(m)
         if fad.mark_h is Fading.RAYLEIGH else np.ones(m))
    u = (_rng(seed, block, _DESIRED).standard_exponential((n_trials, 3))
         if fad.desired is Fading.RAYLEIGH else np.ones((n_trials, 3)))
    return SnapshotBatch(block * B, counts, rad * np.cos(ang), rad * np.sin(ang), g, h, u)


def sample_snapshot(config: NetworkConfig, params: SimulationParams, trial_index: int) -> Snapshot:
    """The snapshot seen by one trial; identical to that trial inside a batch run."""
    if not 0 <= trial_index:
        raise DomainError("trial index must be non-negative")
    block, k = divmod(int(trial_index), params.block_size)
    return sample_block(config, params, block, n_trials=k + 1).snapshot(k)


def _pl(d2: np.ndarray, alpha: float) -> np.ndarray:
    if alpha == 4.0:
        return 1.0 / (1.0 + d2 * d2)
    return 1.0 / (1.0 + d2 ** (alpha / 2.0))


def interference_pair(snapshot: Snapshot, layout: NodeLayout, alpha: float) -> tuple[float, float]:
    """Interference at relay and destination from the same interferer locations."""
    if len(snapshot) == 0:
        return 0.0, 0.0
    pos = snapshot.positions
    xr = np.asarray(layout.x_r)
    d2_r = np.sum((pos - xr) ** 2, axis=1)
    d2_d = np.sum(pos**2, axis=1)
    return float(np.sum(snapshot.g * _pl(d2_r, alpha))), float(np.sum(snapshot.h * _pl(d2_d, alpha)))


def interference_batch(batch: SnapshotBatch, layout: NodeLayout, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    xr0, xr1 = layout.x_r
    d2_r = (batch.x - xr0) ** 2 + (batch.y - xr1) ** 2
    d2_d = batch.x**2 + batch.y**2
    ids = batch.trial_ids
    n = batch.n_trials
    i_r = np.bincount(ids, weights=batch.g * _pl(d2_r, alpha), minlength=n)
    i_d = np.bincount(ids, weights=batch.h * _pl(d2_d, alpha), minlength=n)
    return i_r, i_d


def _link_gains(config: NetworkConfig) -> tuple[float, float, float]:
    lay, a = config.layout, config.alpha
    return path_loss(lay.dist_sr, a), path_loss(lay.norm_s, a), path_loss(lay.norm_r, a)


def classify_arrays(i_r, i_d, u, config: NetworkConfig) -> np.ndarray:
    """Outcome labels; comparisons are written without division so that zero
    interference means infinite SIR and hence success."""
    l_sr, l_s, l_r = _link_gains(config)
    beta = config.beta
    u = np.asarray(u, dtype=float).reshape(-1, 3)
    u_sr, u_sd, u_rd = u[:, 0], u[:, 1], u[:, 2]
    relay_fails = u_sr * l_sr < beta * i_r
    bc = relay_fails & (2.0 * u_sd * l_s < beta * i_d)
    mac = ~relay_fails & (u_sd * l_s + u_rd * l_r < beta * i_d)
    return np.where(bc, Outcome.BC_OUTAGE, np.where(mac, Outcome.MAC_OUTAGE, Outcome.SUCCESS))


def classify_sdf(snapshot: Snapshot, config: NetworkConfig, tail: tuple[float, float] = (0.0, 0.0)) -> Outcome:
    i_r, i_d = interference_pair(snapshot, config.layout, config.alpha)
    u = (snapshot.u_sr, snapshot.u_sd, snapshot.u_rd)
    label = classify_arrays(np.array([i_r + tail[0]]), np.array([i_d + tail[1]]), u, config)
    return Outcome(int(label[0]))


def protocol_outage(snapshot: Snapshot, config: NetworkConfig) -> bool:
    """Outage of the two-slot protocol decided by following it step by step."""
    i_r, i_d = interference_pair(snapshot, config.layout, config.alpha)
    l_sr, l_s, l_r = _link_gains(config)

    def sir(signal, interference):
        return math.inf if interference == 0.0 else signal / interference

    if sir(snapshot.u_sr * l_sr, i_r) >= config.beta:
        return sir(snapshot.u_sd * l_s + snapshot.u_rd * l_r, i_d) < config.beta
    return sir(2.0 * snapshot.u_sd * l_s, i_d) < config.beta


def _blocks(params: SimulationParams) -> range:
    return range(math.ceil(params.trials / params.block_size))


def _run_blocks(work, params: SimulationParams):
    blocks = _blocks(params)
    if params.threads == 1 or len(blocks) == 1:
        return [work(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=params.threads) as pool:
        return list(pool.map(work, blocks))


def simulate_interference(config: NetworkConfig, params: SimulationParams) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial (I_r, I_d) without tail correction, for diagnostics."""
    R = params.window_radius or auto_window_radius(config, params.tail_correction)

    def work(b):
        return interference_batch(sample_block(config, params, b, radius=R), config.layout, config.alpha)

    parts = _run_blocks(work, params)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def estimate_outage(config: NetworkConfig, params: SimulationParams) -> MonteCarloResult:
    """Frequencies of broadcast-phase and MAC-phase outage over independent snapshots."""
    R = params.window_radius or auto_window_radius(config, params.tail_correction)
    tail = tail_interference(config, R) if params.tail_correction else (0.0, 0.0)

    def work(b):
        batch = sample_block(config, params, b, radius=R)
        i_r, i_d = interference_batch(batch, config.layout, config.alpha)
        labels = classify_arrays(i_r + tail[0], i_d + tail[1], batch.u, config)
        return (int(np.count_nonzero(labels == Outcome.BC_OUTAGE)),
                int(np.count_nonzero(labels == Outcome.MAC_OUTAGE)))

    n_bc = n_mac = 0
    if config.lam > 0.0:
        for a, b in _run_blocks(work, params):
            n_bc += a
            n_mac += b
    T, seed = params.trials, params.seed
    bc = McEstimate.from_count(n_bc, T, seed)
    mac = McEstimate.from_count(n_mac, T, seed)
    total = McEstimate.from_count(n_bc + n_mac, T, seed)
    return MonteCarloResult(OutageBreakdown(bc.p_hat, mac.p_hat, Method.MONTECARLO),
                            bc, mac, total, R, tail)
