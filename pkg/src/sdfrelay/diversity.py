"""Spatial-contention diversity order from log-log slopes of outage against density."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .analytic import DEFAULT_SETTINGS, QuadratureSettings, outage_rayleigh
from .bounds import q_bc_lower_bound_fading_marks, q_bc_lower_bound_pathloss_only
from .errors import DomainError, ZeroOutageError
from .model import NetworkConfig

ANALYTIC_GRID = (1e-6, 1e-4, 8)
MONTECARLO_GRID = (1e-4, 1e-2, 8)


def log_grid(lo: float, hi: float, n: int) -> list[float]:
    """n log-spaced densities from hi down to lo."""
    if not (0 < lo < hi) or n < 2:
        raise DomainError("log grid needs 0 < lo < hi and at least two points")
    return [float(v) for v in np.logspace(math.log10(hi), math.log10(lo), int(n))]


@dataclass(frozen=True)
class SlopeFit:
    delta_hat: float
    intercept: float
    residual: float
    lambda_grid: tuple[float, ...]
    source: str = "analytic"
    values: tuple[float, ...] = field(default=(), repr=False)


def fit_loglog_slope(lams: Sequence[float], qs: Sequence[float], source: str = "analytic") -> SlopeFit:
    """Ordinary least squares of log q on log lam. Residual is the RMS misfit in log units."""
    lams = np.asarray(lams, dtype=float)
    qs = np.asarray(qs, dtype=float)
    if len(lams) != len(qs) or len(lams) < 2:
        raise DomainError("need at least two (lambda, q) pairs")
    if np.any(lams <= 0):
        raise DomainError("densities must be positive")
    if np.any(qs <= 0):
        bad = float(lams[np.argmax(qs <= 0)])
        raise ZeroOutageError(
            f"outage is zero at lambda={bad!r}; use a larger density or an analytic source")
    order = np.argsort(-lams)
    x, y = np.log(lams[order]), np.log(qs[order])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return SlopeFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))),
                    tuple(lams[order].tolist()), source, tuple(qs[order].tolist()))


def _check_grid(grid: Sequence[float]) -> list[float]:
    grid = sorted((float(v) for v in grid), reverse=True)
    if len(grid) < 5:
        raise DomainError("a diversity fit needs at least 5 grid points")
    if len(set(grid)) != len(grid) or grid[-1] <= 0:
        raise DomainError("grid densities must be positive and distinct")
    if math.log10(grid[0] / grid[-1]) < 2.0 - 1e-9:
        raise DomainError("grid must span at least two decades")
    return grid


def estimate_scdo(q_function: Callable[[float], float], lambda_grid: Sequence[float],
                  source: str = "analytic", threads: int = 1) -> SlopeFit:
    grid = _check_grid(lambda_grid)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            qs = list(pool.map(q_function, grid))
    else:
        qs = [q_function(lam) for lam in grid]
    return fit_loglog_slope(grid, qs, source)


# --- small-t scaling of exponential sums ------------------------------------------

def exp_sum(t: float, a: Sequence[float], z: Sequence[float]) -> float:
    """``sum_k a_k (1 - exp(-t z_k))``."""
    return float(sum(ak * -math.expm1(-t * zk) for ak, zk in zip(a, z)))


def linear_coefficient(a: Sequence[float], z: Sequence[float]) -> float:
    """Limit of exp_sum(t)/t as t -> 0; the sum scales linearly iff this is non-zero."""
    return float(sum(ak * zk for ak, zk in zip(a, z)))


# --- theorem table ---------------------------------------------------------------

@dataclass(frozen=True)
class TheoremCase:
    name: str
    config: NetworkConfig
    expected: int
    source: str  # "analytic" | "bound"
    tolerance: float


@dataclass(frozen=True)
class TheoremCheck:
    case: TheoremCase
    fit: SlopeFit

    @property
    def passed(self) -> bool:
        return abs(self.fit.delta_hat - self.case.expected) <= self.case.tolerance


def default_theorem_family(alpha: float = 4.0, beta: float = 0.1) -> list[TheoremCase]:
    xs = (15.0, 0.0)
    return [
        TheoremCase("rayleigh", NetworkConfig.create(xs, (6.0, 0.0), alpha, beta, fading="rayleigh"),
                    1, "analytic", 0.1),
        TheoremCase("fading-interference", NetworkConfig.create(xs, (6.0, 0.0), alpha, beta, fading="mixed-u1"),
                    1, "bound", 0.1),
        TheoremCase("pathloss-overlap", NetworkConfig.create(xs, (6.0, 0.0), alpha, beta, fading="pathloss-only"),
                    1, "bound", 0.15),
        TheoremCase("pathloss-disjoint", NetworkConfig.create(xs, (30.0, 0.0), alpha, beta, fading="pathloss-only"),
                    2, "bound", 0.05),
    ]


def outage_curve(config: NetworkConfig,
                 settings: QuadratureSettings = DEFAULT_SETTINGS) -> tuple[Callable[[float], float], str]:
    """Best available closed-form outage as a function of density, with its source label.

    Rayleigh: total q. Non-fading links with Rayleigh marks: the fading-mark lower
    bound. Path-loss only: the dominant-interferer probability.
    """
    name = config.fading.name
    if name == "rayleigh":
        return (lambda lam: outage_rayleigh(config.with_lambda(lam), settings).q), "analytic"
    if name == "mixed-u1":
        return (lambda lam: q_bc_lower_bound_fading_marks(config.with_lambda(lam), settings)), "bound"
    if name == "pathloss-only":
        return (lambda lam: q_bc_lower_bound_pathloss_only(config.with_lambda(lam))), "bound"
    raise DomainError(f"no closed-form outage for fading {name!r}")


def verify_theorem_table(family: Optional[Sequence[TheoremCase]] = None,
                         lambda_grid: Optional[Sequence[float]] = None,
                         settings: QuadratureSettings = DEFAULT_SETTINGS) -> list[TheoremCheck]:
    family = default_theorem_family() if family is None else family
    grid = lambda_grid or log_grid(*ANALYTIC_GRID)
    checks = []
    for case in family:
        q_of, source = outage_curve(case.config, settings)
        checks.append(TheoremCheck(case, estimate_scdo(q_of, grid, source)))
    return checks
