"""Dominant-interferer bounds on the broadcast-phase outage.

An interferer is dominant at a receiver when its own contribution already
pushes the SIR below threshold. Requiring a single interferer to be dominant
at relay and destination at once gives a lower bound on the broadcast-phase
outage, and for the path-loss-only model that bound is tight as the density
vanishes.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy import integrate, special

from .analytic import DEFAULT_SETTINGS, QuadratureSettings, plane_integral
from .errors import DomainError, QuadratureError
from .geometry import DominantRegions, dominant_regions, path_loss
from .model import Fading, FadingSpec, NetworkConfig, NodeLayout, check_alpha, check_lambda

TailFunction = Callable[[float], float]


def rayleigh_tail(x: float) -> float:
    """P(g > x) for a unit-mean exponential mark."""
    return math.exp(-x) if x > 0 else 1.0


@dataclass(frozen=True)
class DominantSetSpec:
    """Per-receiver thresholds on the normalized interference of one interferer."""

    threshold_r: float
    threshold_d: float
    layout: NodeLayout
    alpha: float
    tail_g: TailFunction = rayleigh_tail
    tail_h: TailFunction = rayleigh_tail

    def __post_init__(self):
        if not (self.threshold_r > 0 and self.threshold_d > 0):
            raise DomainError("dominance thresholds must be positive")

    @classmethod
    def from_config(cls, config: NetworkConfig, tail_g: TailFunction = rayleigh_tail,
                    tail_h: TailFunction = rayleigh_tail) -> "DominantSetSpec":
        return cls(1.0 / config.beta, 2.0 / config.beta, config.layout, config.alpha, tail_g, tail_h)


def _check_mixed(config: NetworkConfig, custom_tails: bool) -> None:
    fad = config.fading
    if fad.desired is not Fading.DETERMINISTIC:
        raise DomainError("the fading-mark bound assumes non-fading desired links (u = 1)")
    if not custom_tails and (fad.mark_g is not Fading.RAYLEIGH or fad.mark_h is not Fading.RAYLEIGH):
        raise DomainError("default mark tails are Rayleigh; pass tail functions for other marks")


def dominant_mean_polar(spec: DominantSetSpec,
                        settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Expected number of jointly dominant interferers per unit density (polar form)."""
    lay, alpha = spec.layout, spec.alpha
    xr = lay.norm_r
    half_alpha = 0.5 * alpha
    # thresholds divided by l* kernels, written out: x / l*(r) = x (1 + r^a) / (1 + d^a)
    k_r = spec.threshold_r / (1.0 + lay.dist_sr**alpha)
    k_d = spec.threshold_d / (1.0 + lay.norm_s**alpha)
    tail_g, tail_h = spec.tail_g, spec.tail_h

    def density(r, phi):
        p_h = tail_h(k_d * (1.0 + r**alpha))
        if p_h == 0.0:
            return 0.0
        d2 = r * r + xr * xr - 2.0 * r * xr * math.cos(phi)
        return p_h * tail_g(k_r * (1.0 + max(d2, 0.0) ** half_alpha))

    return plane_integral(density, settings, (xr, lay.norm_s))


def dominant_mean_cartesian(spec: DominantSetSpec, rel_tol: float = 1e-9) -> float:
    """Same quantity as dominant_mean_polar, integrated in Cartesian coordinates
    with the actual relay position (no symmetry reduction)."""
    lay, alpha = spec.layout, spec.alpha
    l_sr = path_loss(lay.dist_sr, alpha)
    l_s = path_loss(lay.norm_s, alpha)
    xr0, xr1 = lay.x_r
    tail_g, tail_h = spec.tail_g, spec.tail_h

    def integrand(y, x):
        p_h = tail_h(spec.threshold_d * l_s * (1.0 + math.hypot(x, y) ** alpha))
        if p_h == 0.0:
            return 0.0
        return p_h * tail_g(spec.threshold_r * l_sr * (1.0 + math.hypot(x - xr0, y - xr1) ** alpha))

    # beyond this radius the destination tail is below exp(-745), i.e. zero in double precision
    reach = (745.0 / (spec.threshold_d * l_s)) ** (1.0 / alpha)
    lo = min(-reach, xr0 - 1.0)
    hi = max(reach, xr0 + 1.0)
    lo_y = min(-reach, xr1 - 1.0)
    hi_y = max(reach, xr1 + 1.0)
    value, err = integrate.dblquad(integrand, lo, hi, lo_y, hi_y, epsabs=1e-13, epsrel=rel_tol)
    if not math.isfinite(value):
        raise QuadratureError("Cartesian dominant-mean integral is not finite", value, err)
    return value


def q_bc_lower_bound_fading_marks(config: NetworkConfig,
                                  settings: QuadratureSettings = DEFAULT_SETTINGS,
                                  tail_g: TailFunction | None = None,
                                  tail_h: TailFunction | None = None) -> float:
    """Lower bound on broadcast-phase outage for u = 1 with random interferer marks.

    ``1 - exp(-lam * m)`` where m counts, per unit density, the interferers
    that are dominant at relay and destination simultaneously.
    """
    custom = tail_g is not None or tail_h is not None
    _check_mixed(config, custom)
    if config.lam == 0.0:
        return 0.0
    spec = DominantSetSpec.from_config(config, tail_g or rayleigh_tail, tail_h or rayleigh_tail)
    if custom:
        mean = dominant_mean_polar(spec, settings)
    else:
        mean = _rayleigh_dominant_mean(config.layout, config.alpha, config.beta, settings)
    return -math.expm1(-config.lam * mean)


@functools.lru_cache(maxsize=256)
def _rayleigh_dominant_mean(layout: NodeLayout, alpha: float, beta: float,
                            settings: QuadratureSettings) -> float:
    return dominant_mean_polar(DominantSetSpec(1.0 / beta, 2.0 / beta, layout, alpha), settings)


# --- path-loss-only model ------------------------------------------------------

def _check_pathloss_only(config: NetworkConfig) -> None:
    if config.fading != FadingSpec.pathloss_only():
        raise DomainError("this result applies to the path-loss-only model (u = g = h = 1)")


@dataclass(frozen=True)
class AsymptoticScaling:
    """Small-density behaviour ``q_bc ~ coefficient * lam**order``."""

    order: int
    coefficient: float
    degenerate: bool
    regions: DominantRegions

    def __call__(self, lam: float) -> float:
        return self.coefficient * lam**self.order

    @property
    def diversity_order(self) -> int:
        return self.order


def q_bc_asymptotic_pathloss_only(config: NetworkConfig) -> AsymptoticScaling:
    """Order and constant of the small-density broadcast-phase outage.

    Overlapping dominant disks give order 1 with the lens area as constant;
    disjoint disks give order 2 with the product of the disk areas. An empty
    disk means no single interferer can cause outage on that side; the result
    is then flagged degenerate with order 2 and constant 0.
    """
    _check_pathloss_only(config)
    reg = dominant_regions(config.layout, config.alpha, config.beta)
    if reg.empty_r or reg.empty_d:
        return AsymptoticScaling(2, 0.0, True, reg)
    if reg.overlap:
        return AsymptoticScaling(1, reg.area_lens, False, reg)
    return AsymptoticScaling(2, reg.area_r * reg.area_d, False, reg)


def dominant_probability(regions: DominantRegions, lam: float) -> float:
    """P(some interferer dominant at the relay and some interferer dominant at the destination).

    Counts in the lens and in the two one-sided parts of the disks are
    independent Poisson variables.
    """
    lam = check_lambda(lam)
    p_lens = -math.expm1(-lam * regions.area_lens)
    p_r = -math.expm1(-lam * (regions.area_r - regions.area_lens))
    p_d = -math.expm1(-lam * (regions.area_d - regions.area_lens))
    return p_lens + (1.0 - p_lens) * p_r * p_d


def q_bc_lower_bound_pathloss_only(config: NetworkConfig) -> float:
    _check_pathloss_only(config)
    return dominant_probability(dominant_regions(config.layout, config.alpha, config.beta), config.lam)


def nearest_interferer_equivalence(n: int, lam: float, epsilon: float, alpha: float) -> float:
    """P(r_n**-alpha * (1 + r_n**alpha) > 1 + epsilon) for the n-th nearest interferer.

    Equals the regularized lower incomplete gamma ``P(n, lam pi eps**(-2/alpha))``,
    i.e. one minus the regularized upper one.
    """
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    lam = check_lambda(lam)
    alpha = check_alpha(alpha)
    return float(special.gammainc(n, lam * math.pi * epsilon ** (-2.0 / alpha)))


@dataclass(frozen=True)
class TightnessRow:
    lam: float
    bound: float
    mc_estimate: float
    se: float
    ratio: float


def tightness_diagnostic(config: NetworkConfig, lambda_grid: Sequence[float], params) -> list[TightnessRow]:
    """Simulated broadcast-phase outage against the dominant-interferer bound.

    Every grid point reuses ``params.seed``.
    """
    from .montecarlo import estimate_outage

    _check_pathloss_only(config)
    regions = dominant_regions(config.layout, config.alpha, config.beta)
    rows = []
    for lam in lambda_grid:
        if not lam > 0:
            raise DomainError("tightness ratios need a positive density (0/0 otherwise)")
        bound = dominant_probability(regions, lam)
        est = estimate_outage(config.with_lambda(lam), params).bc
        ratio = est.p_hat / bound if bound > 0 else math.inf
        rows.append(TightnessRow(lam, bound, est.p_hat, est.se, ratio))
    return rows
