"""Path loss, normalized path-loss kernels and dominant-interferer disks.

The destination is the origin. All distances are dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .model import NodeLayout, check_alpha, check_beta


def path_loss(r: float, alpha: float) -> float:
    """Non-singular path loss ``1 / (1 + r**alpha)``."""
    alpha = check_alpha(alpha)
    if not r >= 0.0:
        raise DomainError(f"distance must be non-negative, got {r}")
    return 1.0 / (1.0 + r**alpha)


def _check_r(r: float) -> None:
    if not r >= 0.0:
        raise DomainError(f"radius must be non-negative, got {r}")


def kernel_sd(r: float, layout: NodeLayout, alpha: float) -> float:
    """Interference at distance r from the destination, relative to the source signal there."""
    _check_r(r)
    alpha = check_alpha(alpha)
    return (1.0 + layout.norm_s**alpha) / (1.0 + r**alpha)


def kernel_rd(r: float, layout: NodeLayout, alpha: float) -> float:
    _check_r(r)
    alpha = check_alpha(alpha)
    return (1.0 + layout.norm_r**alpha) / (1.0 + r**alpha)


def relay_distance(r: float, phi: float, layout: NodeLayout) -> float:
    """Distance to the relay from the point at polar coordinates (r, phi).

    ``phi`` is measured from the direction of the relay as seen from the destination.
    """
    xr = layout.norm_r
    d2 = r * r + xr * xr - 2.0 * r * xr * math.cos(phi)
    return math.sqrt(max(d2, 0.0))


def kernel_sr(r: float, phi: float, layout: NodeLayout, alpha: float) -> float:
    """Interference at (r, phi) relative to the source signal received at the relay."""
    _check_r(r)
    if not 0.0 <= phi <= math.pi:
        raise DomainError(f"angle must lie in [0, pi], got {phi}")
    alpha = check_alpha(alpha)
    return (1.0 + layout.dist_sr**alpha) / (1.0 + relay_distance(r, phi, layout) ** alpha)


def lens_area(d: float, r1: float, r2: float) -> float:
    """Area of the intersection of two disks of radii r1, r2 whose centres are d apart."""
    if d < 0 or r1 < 0 or r2 < 0:
        raise DomainError("distance and radii must be non-negative")
    small, big = sorted((r1, r2))
    if d >= r1 + r2 or small == 0.0:
        return 0.0
    if d + small <= big or d * small == 0.0:  # second test catches subnormal underflow
        return math.pi * small * small
    # clamp guards against rounding just outside [-1, 1]
    c1 = min(1.0, max(-1.0, (d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)))
    c2 = min(1.0, max(-1.0, (d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)))
    kite = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)
    area = r1 * r1 * math.acos(c1) + r2 * r2 * math.acos(c2) - 0.5 * math.sqrt(max(kite, 0.0))
    return min(max(area, 0.0), math.pi * small * small)


@dataclass(frozen=True)
class DominantRegions:
    """Disks in which a single interferer alone causes outage at the relay (radius r1,
    centred at the relay) or at the destination (radius r2, centred at the origin)."""

    r1: float
    r2: float
    area_r: float
    area_d: float
    area_lens: float
    overlap: bool
    relay_distance: float

    @property
    def area_union(self) -> float:
        return self.area_r + self.area_d - self.area_lens

    @property
    def lens_fraction_of_union(self) -> float:
        union = self.area_union
        return self.area_lens / union if union > 0 else 0.0

    @property
    def empty_r(self) -> bool:
        return self.r1 == 0.0

    @property
    def empty_d(self) -> bool:
        return self.r2 == 0.0


def _dominant_radius(ratio: float, alpha: float) -> float:
    # ratio = threshold * (1 + d**alpha); radius solves 1 + rho**alpha = ratio
    excess = ratio - 1.0
    return excess ** (1.0 / alpha) if excess > 0 else 0.0


def dominant_radii(layout: NodeLayout, alpha: float, beta: float) -> tuple[float, float]:
    alpha = check_alpha(alpha)
    beta = check_beta(beta)
    r1 = _dominant_radius(beta * (1.0 + layout.dist_sr**alpha), alpha)
    r2 = _dominant_radius(0.5 * beta * (1.0 + layout.norm_s**alpha), alpha)
    return r1, r2


def dominant_regions(layout: NodeLayout, alpha: float, beta: float) -> DominantRegions:
    """Dominant-interferer disks for the path-loss-only broadcast phase.

    A radius whose defining expression is not positive yields an empty region
    (radius 0, area 0). Tangent disks count as overlapping with zero lens area.
    """
    r1, r2 = dominant_radii(layout, alpha, beta)
    d = layout.norm_r
    area_r = math.pi * r1 * r1
    area_d = math.pi * r2 * r2
    nonempty = r1 > 0 and r2 > 0
    overlap = nonempty and d <= r1 + r2
    area_lens = lens_area(d, r1, r2) if nonempty else 0.0
    return DominantRegions(r1, r2, area_r, area_d, area_lens, overlap, d)
