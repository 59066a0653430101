"""Relay placement on the source-destination segment minimizing total outage."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .analytic import DEFAULT_SETTINGS, QuadratureSettings, outage_rayleigh, small_lambda_coefficients
from .errors import DomainError
from .model import NetworkConfig, NodeLayout, check_alpha, check_beta

COARSE_POINTS = 41
COARSE_RANGE = (0.025, 0.975)
SMALL_LAMBDA = 1e-6
RATIO_XTOL = 1e-4


class FlatObjectiveWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class PlacementResult:
    optimal_ratio: float   # |x_s - x_r| / |x_s - x_d|
    optimal_q: float
    alpha: float
    beta: float
    lam: float
    objective: str         # "q" or "linear-coefficient"
    trace: tuple[tuple[float, float], ...]


def _config(x_s_distance: float, ratio: float, alpha: float, beta: float, lam: float) -> NetworkConfig:
    return NetworkConfig(NodeLayout.line(x_s_distance, ratio), alpha, beta, lam)


def optimize_relay_line(x_s_distance: float, alpha: float, beta: float, lam: float,
                        settings: QuadratureSettings = DEFAULT_SETTINGS,
                        threads: int = 1) -> PlacementResult:
    """Best relay ratio on the line under Rayleigh fading.

    A 41-point scan of (0.025, 0.975) picks the bracket, golden-section search
    refines it. Below lam = 1e-6 the linear small-density coefficient is
    minimized instead of q, which has the same minimizer and does not underflow.
    """
    alpha, beta = check_alpha(alpha), check_beta(beta)
    if not lam > 0:
        raise DomainError("relay placement needs a positive interferer density")
    if not x_s_distance > 0:
        raise DomainError("source distance must be positive")
    use_coeff = lam < SMALL_LAMBDA

    def objective(ratio: float) -> float:
        cfg = _config(x_s_distance, ratio, alpha, beta, lam)
        if use_coeff:
            return sum(small_lambda_coefficients(cfg, settings))
        return outage_rayleigh(cfg, settings).q

    grid = np.linspace(*COARSE_RANGE, COARSE_POINTS)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(objective, grid))
    else:
        values = [objective(r) for r in grid]
    trace = {float(r): float(v) for r, v in zip(grid, values)}

    if max(values) - min(values) < 1e-12:
        warnings.warn("outage varies by less than 1e-12 along the segment", FlatObjectiveWarning)

    def tracked(ratio):
        ratio = float(ratio)
        if ratio not in trace:
            trace[ratio] = objective(ratio)
        return trace[ratio]

    i = int(np.argmin(values))
    step = grid[1] - grid[0]
    if 0 < i < len(grid) - 1:
        optimize.minimize_scalar(tracked, bracket=(grid[i - 1], grid[i], grid[i + 1]),
                                 method="golden", options={"xtol": RATIO_XTOL})
    else:
        lo, hi = (max(1e-3, grid[i] - step), grid[i + 1]) if i == 0 else (grid[i - 1], min(1 - 1e-3, grid[i] + step))
        optimize.minimize_scalar(tracked, bounds=(lo, hi), method="bounded",
                                 options={"xatol": RATIO_XTOL})

    best_ratio = min(trace, key=lambda r: (trace[r], r))
    best_q = trace[best_ratio]
    if use_coeff:
        best_q = outage_rayleigh(_config(x_s_distance, best_ratio, alpha, beta, lam), settings).q
    return PlacementResult(best_ratio, best_q, alpha, beta, lam,
                           "linear-coefficient" if use_coeff else "q",
                           tuple(sorted(trace.items())))


@dataclass(frozen=True)
class CurvePoint:
    alpha: float
    result: Optional[PlacementResult]
    error: Optional[str] = None

    @property
    def optimal_ratio(self) -> float:
        return self.result.optimal_ratio if self.result else math.nan


def sweep_alpha_curve(alpha_grid: Sequence[float], beta: float, lam: float, x_s_distance: float,
                      settings: QuadratureSettings = DEFAULT_SETTINGS, threads: int = 1) -> list[CurvePoint]:
    """Optimal relay ratio for each path-loss exponent; failures are recorded, not raised."""
    points = []
    for alpha in alpha_grid:
        try:
            res = optimize_relay_line(x_s_distance, alpha, beta, lam, settings, threads)
            points.append(CurvePoint(float(alpha), res))
        except (DomainError, ArithmeticError) as exc:
            points.append(CurvePoint(float(alpha), None, f"{type(exc).__name__}: {exc}"))
    return points
