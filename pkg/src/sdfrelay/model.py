"""Configuration records shared by the analytic, bound and simulation code."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from .errors import DomainError


class Fading(str, enum.Enum):
    RAYLEIGH = "rayleigh"
    DETERMINISTIC = "deterministic"


@dataclass(frozen=True)
class FadingSpec:
    """Fading law for desired links (u), interferer-to-relay (g) and interferer-to-destination (h) gains.

    Rayleigh power gains are unit-mean exponential; deterministic gains are 1.
    """

    desired: Fading = Fading.RAYLEIGH
    mark_g: Fading = Fading.RAYLEIGH
    mark_h: Fading = Fading.RAYLEIGH

    @classmethod
    def rayleigh(cls) -> "FadingSpec":
        return cls(Fading.RAYLEIGH, Fading.RAYLEIGH, Fading.RAYLEIGH)

    @classmethod
    def pathloss_only(cls) -> "FadingSpec":
        return cls(Fading.DETERMINISTIC, Fading.DETERMINISTIC, Fading.DETERMINISTIC)

    @classmethod
    def mixed_u1(cls) -> "FadingSpec":
        """Non-fading desired links with Rayleigh interference."""
        return cls(Fading.DETERMINISTIC, Fading.RAYLEIGH, Fading.RAYLEIGH)

    @classmethod
    def from_name(cls, name: str) -> "FadingSpec":
        try:
            return {"rayleigh": cls.rayleigh, "pathloss-only": cls.pathloss_only,
                    "mixed-u1": cls.mixed_u1}[name]()
        except KeyError:
            raise DomainError(f"unknown fading spec {name!r}") from None

    @property
    def name(self) -> str:
        for candidate in ("rayleigh", "pathloss-only", "mixed-u1"):
            if FadingSpec.from_name(candidate) == self:
                return candidate
        return f"{self.desired.value}/{self.mark_g.value}/{self.mark_h.value}"

    @property
    def is_rayleigh(self) -> bool:
        return self == FadingSpec.rayleigh()


@dataclass(frozen=True)
class NodeLayout:
    """Source and relay positions; the destination sits at the origin."""

    x_s: tuple[float, float]
    x_r: tuple[float, float]

    def __post_init__(self):
        x_s = tuple(float(c) for c in self.x_s)
        x_r = tuple(float(c) for c in self.x_r)
        if len(x_s) != 2 or len(x_r) != 2:
            raise DomainError("node positions must be 2D points")
        if not all(math.isfinite(c) for c in x_s + x_r):
            raise DomainError("node positions must be finite")
        object.__setattr__(self, "x_s", x_s)
        object.__setattr__(self, "x_r", x_r)
        if self.norm_s == 0.0:
            raise DomainError("source may not coincide with the destination")
        if self.dist_sr == 0.0:
            raise DomainError("source may not coincide with the relay")

    x_d = (0.0, 0.0)

    @property
    def norm_s(self) -> float:
        return math.hypot(*self.x_s)

    @property
    def norm_r(self) -> float:
        return math.hypot(*self.x_r)

    @property
    def dist_sr(self) -> float:
        return math.hypot(self.x_s[0] - self.x_r[0], self.x_s[1] - self.x_r[1])

    def rotated(self, angle: float) -> "NodeLayout":
        c, s = math.cos(angle), math.sin(angle)
        rot = lambda p: (c * p[0] - s * p[1], s * p[0] + c * p[1])  # noqa: E731
        return NodeLayout(rot(self.x_s), rot(self.x_r))

    @classmethod
    def line(cls, source_distance: float, ratio: float) -> "NodeLayout":
        """Relay on the source-destination segment at ``|x_s - x_r| = ratio * |x_s|``."""
        if not 0.0 < ratio < 1.0:
            raise DomainError(f"relay ratio must lie in (0, 1), got {ratio}")
        return cls((source_distance, 0.0), ((1.0 - ratio) * source_distance, 0.0))


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > 2.0 or not math.isfinite(alpha):
        raise DomainError(f"path-loss exponent must exceed 2, got {alpha}")
    return alpha


def check_beta(beta: float) -> float:
    beta = float(beta)
    if not beta > 0.0 or not math.isfinite(beta):
        raise DomainError(f"SIR threshold must be positive, got {beta}")
    return beta


def check_lambda(lam: float) -> float:
    lam = float(lam)
    if not lam >= 0.0 or not math.isfinite(lam):
        raise DomainError(f"interferer density must be non-negative, got {lam}")
    return lam


@dataclass(frozen=True)
class NetworkConfig:
    layout: NodeLayout
    alpha: float
    beta: float
    lam: float = 0.0
    fading: FadingSpec = field(default_factory=FadingSpec.rayleigh)

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        object.__setattr__(self, "beta", check_beta(self.beta))
        object.__setattr__(self, "lam", check_lambda(self.lam))

    @classmethod
    def create(cls, x_s, x_r, alpha=4.0, beta=0.1, lam=0.0, fading="rayleigh") -> "NetworkConfig":
        if isinstance(fading, str):
            fading = FadingSpec.from_name(fading)
        return cls(NodeLayout(x_s, x_r), alpha, beta, lam, fading)

    def with_lambda(self, lam: float) -> "NetworkConfig":
        return replace(self, lam=lam)

    def with_fading(self, fading: FadingSpec | str) -> "NetworkConfig":
        if isinstance(fading, str):
            fading = FadingSpec.from_name(fading)
        return replace(self, fading=fading)
