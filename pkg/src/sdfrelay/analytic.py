"""Outage probabilities of selection decode-and-forward under Rayleigh fading.

Everything reduces to integrals over the plane of functions of the interferer
position. Positions are written in polar form (r, phi) around the destination
with phi measured from the relay direction; the integrand is symmetric in phi,
so the plane integral is ``int_0^inf int_0^pi 2 r F(r, phi) dphi dr``.

The public ``q_*`` functions never subtract nearly equal exponentials: the
combinations of ``psi`` values that appear in the closed forms are folded into
single integrals with positive integrands and then recombined with
``expm1``. The ``*_direct`` variants evaluate the textbook expressions term by
term and exist for cross-checking.
"""

from __future__ import annotations

import enum
import functools
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

from scipy import integrate

from .errors import DomainError, QuadratureError
from .geometry import path_loss
from .model import NetworkConfig, NodeLayout, check_alpha, check_beta, check_lambda

# equal-norm switch for the MAC-phase tail of u_sd*l(|x_s|) + u_rd*l(|x_r|)
EQUAL_NORM_RTOL = 1e-9


class Method(str, enum.Enum):
    ANALYTIC = "analytic"
    BOUND = "bound"
    MONTECARLO = "montecarlo"


@dataclass(frozen=True)
class OutageBreakdown:
    q_bc: float
    q_mac: float
    method: Method = Method.ANALYTIC

    @property
    def q(self) -> float:
        return self.q_bc + self.q_mac


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    radial_transform: bool = True
    limit: int = 200

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.limit < 1:
            raise DomainError("quadrature subdivision limit must be positive")


DEFAULT_SETTINGS = QuadratureSettings()


def _quad(func, a, b, *, epsabs, epsrel, limit, points=None):
    """scipy quad returning (value, error estimate, flagged) with warnings silenced."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(func, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit,
                             points=points, full_output=1)
    # a fourth element (message) is present only when QUADPACK reports ier > 0
    return out[0], out[1], len(out) > 3


def plane_integral(density: Callable[[float, float], float],
                   settings: QuadratureSettings = DEFAULT_SETTINGS,
                   breakpoints: tuple[float, ...] = ()) -> float:
    """Integrate ``density(r, phi)`` over the plane, assuming symmetry about the relay axis.

    Inner integral over phi in [0, pi], outer over r in [0, inf). With
    ``settings.radial_transform`` the outer variable is mapped to
    ``u = 1 / (1 + r)`` on (0, 1). ``breakpoints`` are radii where the
    integrand changes character (e.g. node distances).

    Raises QuadratureError when the achieved error estimate exceeds the
    requested tolerance by more than a factor of ten.
    """
    inner_rtol = settings.rel_tol * 0.1
    worst_inner = [0.0]

    def angular(r):
        val, err, flagged = _quad(lambda phi: density(r, phi), 0.0, math.pi,
                                  epsabs=1e-300, epsrel=inner_rtol, limit=settings.limit)
        if flagged:
            rel = err / abs(val) if val else (0.0 if err == 0.0 else math.inf)
            worst_inner[0] = max(worst_inner[0], rel)
        return 2.0 * r * val

    bps = sorted(b for b in breakpoints if b > 0 and math.isfinite(b))
    if settings.radial_transform:
        def outer(u):
            r = (1.0 - u) / u
            return angular(r) / (u * u)

        pts = sorted({1.0 / (1.0 + b) for b in bps}) or None
        value, err, flagged = _quad(outer, 0.0, 1.0, epsabs=settings.abs_tol,
                                    epsrel=settings.rel_tol, limit=settings.limit, points=pts)
    else:
        edges = [0.0, *bps, math.inf]
        value = err = 0.0
        flagged = False
        for lo, hi in zip(edges[:-1], edges[1:]):
            v, e, f = _quad(angular, lo, hi, epsabs=settings.abs_tol,
                            epsrel=settings.rel_tol, limit=settings.limit)
            value, err, flagged = value + v, err + e, flagged or f

    tol = max(settings.abs_tol, settings.rel_tol * abs(value))
    if not math.isfinite(value):
        raise QuadratureError("plane integral is not finite", value, err)
    if flagged and err > 10.0 * tol:
        raise QuadratureError("outer radial quadrature did not converge", value, err)
    if worst_inner[0] > 10.0 * max(inner_rtol, settings.rel_tol):
        raise QuadratureError("inner angular quadrature did not converge", value,
                              worst_inner[0] * abs(value))
    return value


def psi(f_kernel: Optional[Callable[[float, float], float]],
        g_kernel: Optional[Callable[[float], float]],
        settings: QuadratureSettings = DEFAULT_SETTINGS,
        breakpoints: tuple[float, ...] = ()) -> float:
    """Plane integral of ``1 - 1/((1 + f(r, phi)) (1 + g(r)))``.

    ``f_kernel(r, phi)`` and ``g_kernel(r)`` must be non-negative; ``None``
    stands for the zero kernel.
    """
    if f_kernel is None and g_kernel is None:
        return 0.0
    f_of = f_kernel or (lambda r, phi: 0.0)
    g_of = g_kernel or (lambda r: 0.0)

    def density(r, phi):
        f = f_of(r, phi)
        g = g_of(r)
        return (f + g + f * g) / ((1.0 + f) * (1.0 + g))

    return plane_integral(density, settings, breakpoints)


def psi_pathloss_closed_form(c: float, alpha: float) -> float:
    """Closed form of ``psi(0, c / (1 + r**alpha))``.

    ``pi * c * (1 + c)**(2/alpha - 1) * (2 pi / alpha) / sin(2 pi / alpha)``,
    from ``int_0^inf dt / (A + t**p) = A**(1/p - 1) (pi/p) / sin(pi/p)``.
    """
    alpha = check_alpha(alpha)
    if c < 0:
        raise DomainError("kernel scale must be non-negative")
    theta = 2.0 * math.pi / alpha
    return math.pi * c * (1.0 + c) ** (2.0 / alpha - 1.0) * theta / math.sin(theta)


@dataclass(frozen=True)
class _Kernels:
    """Fast closures for the scaled kernels; beta is already folded in."""

    f_sr: Callable[[float, float], float]   # beta * l*_sr
    g_sd_half: Callable[[float], float]     # (beta/2) * l*_sd
    g_sd: Callable[[float], float]          # beta * l*_sd
    g_rd: Callable[[float], float]          # beta * l*_rd
    breakpoints: tuple[float, ...]


def _kernels(layout: NodeLayout, alpha: float, beta: float) -> _Kernels:
    xr = layout.norm_r
    half_alpha = 0.5 * alpha
    c_sr = beta * (1.0 + layout.dist_sr**alpha)
    c_sd = beta * (1.0 + layout.norm_s**alpha)
    c_rd = beta * (1.0 + xr**alpha)
    cos = math.cos

    def f_sr(r, phi):
        d2 = r * r + xr * xr - 2.0 * r * xr * cos(phi)
        return c_sr / (1.0 + (d2 if d2 > 0.0 else 0.0) ** half_alpha)

    return _Kernels(
        f_sr=f_sr,
        g_sd_half=lambda r: 0.5 * c_sd / (1.0 + r**alpha),
        g_sd=lambda r: c_sd / (1.0 + r**alpha),
        g_rd=lambda r: c_rd / (1.0 + r**alpha),
        breakpoints=(xr, layout.norm_s),
    )


@dataclass(frozen=True)
class PhaseIntegrals:
    """Density-independent integrals behind the Rayleigh outage expressions.

    Notation: f = beta l*_sr, h = (beta/2) l*_sd, s = beta l*_sd, t = beta l*_rd.
    """

    psi_dest_half: float   # psi(0, h)
    psi_relay: float       # psi(f, 0)
    c_bc: float            # int f h / ((1+f)(1+h))
    mac_a: float           # int s / ((1+f)(1+s)) = psi(f, s) - psi(f, 0)
    mac_k: float           # int s / ((1+f)(1+s)(1+t))
    c_mac: float           # int s t / ((1+f)(1+s)(1+t))
    gain_ratio: float      # l(|x_s|) / l(|x_r|) - 1


@functools.lru_cache(maxsize=256)
def phase_integrals(layout: NodeLayout, alpha: float, beta: float,
                    settings: QuadratureSettings = DEFAULT_SETTINGS) -> PhaseIntegrals:
    alpha = check_alpha(alpha)
    beta = check_beta(beta)
    k = _kernels(layout, alpha, beta)
    f_sr, h_of, s_of, t_of = k.f_sr, k.g_sd_half, k.g_sd, k.g_rd
    bp = k.breakpoints

    def integral(density):
        return plane_integral(density, settings, bp)

    def d_relay(r, phi):
        f = f_sr(r, phi)
        return f / (1.0 + f)

    def d_cbc(r, phi):
        f = f_sr(r, phi)
        h = h_of(r)
        return f * h / ((1.0 + f) * (1.0 + h))

    def d_a(r, phi):
        s = s_of(r)
        return s / ((1.0 + f_sr(r, phi)) * (1.0 + s))

    def d_k(r, phi):
        s = s_of(r)
        return s / ((1.0 + f_sr(r, phi)) * (1.0 + s) * (1.0 + t_of(r)))

    def d_cmac(r, phi):
        s = s_of(r)
        t = t_of(r)
        return s * t / ((1.0 + f_sr(r, phi)) * (1.0 + s) * (1.0 + t))

    ls = path_loss(layout.norm_s, alpha)
    lr = path_loss(layout.norm_r, alpha)
    gain_ratio = ls / lr - 1.0
    if abs(ls - lr) < EQUAL_NORM_RTOL * ls:
        gain_ratio = 0.0
    return PhaseIntegrals(
        psi_dest_half=psi(None, h_of, settings, bp),
        psi_relay=integral(d_relay),
        c_bc=integral(d_cbc),
        mac_a=integral(d_a),
        mac_k=integral(d_k),
        c_mac=integral(d_cmac),
        gain_ratio=gain_ratio,
    )


def _require_rayleigh(config: NetworkConfig) -> None:
    if not config.fading.is_rayleigh:
        raise DomainError("the closed-form outage expressions assume Rayleigh fading everywhere")


def _one_minus_exp_over(x: float) -> float:
    """(1 - exp(-x)) / x, continuous at 0."""
    if abs(x) < 1e-12:
        return 1.0 - 0.5 * x
    return -math.expm1(-x) / x


def q_bc_from_integrals(pi: PhaseIntegrals, lam: float) -> float:
    """Broadcast-phase outage.

    ``1 - e^{-lam a} - e^{-lam b} + e^{-lam c}`` rewritten with
    ``c = a + b - c_bc`` so that only expm1 of positive quantities appears.
    """
    a, b = pi.psi_dest_half, pi.psi_relay
    q = math.expm1(-lam * a) * math.expm1(-lam * b) + math.exp(-lam * (a + b)) * math.expm1(lam * pi.c_bc)
    return min(max(q, 0.0), 1.0)


def q_mac_from_integrals(pi: PhaseIntegrals, lam: float) -> float:
    """MAC-phase outage.

    With ``A = psi(f, s) - psi(f, 0)`` and ``K`` as in PhaseIntegrals, the
    mu-weighted pair of exponentials becomes
    ``e^{-lam b} [(1 - e^{-lam A}) - lam K e^{-lam A} (1 - e^{-eps}) / eps]``,
    ``eps = lam K (l(|x_s|)/l(|x_r|) - 1)``. At eps = 0 this is exactly the
    Gamma(2) tail used when the two desired links have equal path loss.
    """
    x = lam * pi.mac_a
    y = lam * pi.mac_k
    tail = math.exp(-x) * _one_minus_exp_over(y * pi.gain_ratio)
    if x < 1.0:
        # A - K = c_mac; keep the O(lam) part as a single positive term
        inner = lam * pi.c_mac + (-math.expm1(-x) - x) + y * (1.0 - tail)
    else:
        inner = -math.expm1(-x) - y * tail
    q = math.exp(-lam * pi.psi_relay) * inner
    return min(max(q, 0.0), 1.0)


def q_bc_rayleigh(config: NetworkConfig, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    _require_rayleigh(config)
    if config.lam == 0.0:
        return 0.0
    pi = phase_integrals(config.layout, config.alpha, config.beta, settings)
    return q_bc_from_integrals(pi, config.lam)


def q_mac_rayleigh(config: NetworkConfig, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    _require_rayleigh(config)
    if config.lam == 0.0:
        return 0.0
    pi = phase_integrals(config.layout, config.alpha, config.beta, settings)
    return q_mac_from_integrals(pi, config.lam)


def outage_rayleigh(config: NetworkConfig,
                    settings: QuadratureSettings = DEFAULT_SETTINGS) -> OutageBreakdown:
    return OutageBreakdown(q_bc_rayleigh(config, settings), q_mac_rayleigh(config, settings),
                           Method.ANALYTIC)


def small_lambda_coefficients(config: NetworkConfig,
                              settings: QuadratureSettings = DEFAULT_SETTINGS) -> tuple[float, float]:
    """Linear coefficients (c_bc, c_mac) with q_bc ~ lam c_bc and q_mac ~ lam c_mac as lam -> 0."""
    _require_rayleigh(config)
    pi = phase_integrals(config.layout, config.alpha, config.beta, settings)
    return pi.c_bc, pi.c_mac


# --- literal term-by-term forms, kept for cross-checks ---------------------

def _mu_weights(layout: NodeLayout, alpha: float) -> tuple[float, float]:
    ls = path_loss(layout.norm_s, alpha)
    lr = path_loss(layout.norm_r, alpha)
    if abs(ls - lr) < EQUAL_NORM_RTOL * ls:
        raise DomainError("mu weights are undefined when |x_s| = |x_r|")
    return ls / (ls - lr), lr / (ls - lr)


def q_bc_rayleigh_direct(config: NetworkConfig,
                         settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    _require_rayleigh(config)
    k = _kernels(config.layout, config.alpha, config.beta)
    lam = config.lam
    p1 = psi(None, k.g_sd_half, settings, k.breakpoints)
    p2 = psi(k.f_sr, None, settings, k.breakpoints)
    p3 = psi(k.f_sr, k.g_sd_half, settings, k.breakpoints)
    return 1.0 - math.exp(-lam * p1) - math.exp(-lam * p2) + math.exp(-lam * p3)


def q_mac_rayleigh_direct(config: NetworkConfig,
                          settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """mu-weighted three-exponential form; requires |x_s| != |x_r|."""
    _require_rayleigh(config)
    mu1, mu2 = _mu_weights(config.layout, config.alpha)
    k = _kernels(config.layout, config.alpha, config.beta)
    lam = config.lam
    p0 = psi(k.f_sr, None, settings, k.breakpoints)
    ps = psi(k.f_sr, k.g_sd, settings, k.breakpoints)
    pr = psi(k.f_sr, k.g_rd, settings, k.breakpoints)
    return math.exp(-lam * p0) - mu1 * math.exp(-lam * ps) + mu2 * math.exp(-lam * pr)


def q_mac_rayleigh_equal_norm(config: NetworkConfig,
                              settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """MAC-phase outage for |x_s| = |x_r| from the Gamma(2) tail
    ``P(z > t) = (1 + t/l) e^{-t/l}`` of ``z = l (u_sd + u_rd)``."""
    _require_rayleigh(config)
    k = _kernels(config.layout, config.alpha, config.beta)
    lam = config.lam
    f_sr, s_of = k.f_sr, k.g_sd

    def d_deriv(r, phi):
        s = s_of(r)
        return s / ((1.0 + f_sr(r, phi)) * (1.0 + s) ** 2)

    p0 = psi(f_sr, None, settings, k.breakpoints)
    ps = psi(f_sr, s_of, settings, k.breakpoints)
    deriv = plane_integral(d_deriv, settings, k.breakpoints)
    return math.exp(-lam * p0) - math.exp(-lam * ps) * (1.0 + lam * deriv)


# --- no-relay baseline -------------------------------------------------------

@dataclass(frozen=True)
class NoRelayOutage:
    exact: float
    closed_form: float
    exponent_exact: float       # psi(0, beta l*_sd); q = 1 - exp(-lam * exponent)
    exponent_closed_form: float

    @property
    def exponent_rel_error(self) -> float:
        return abs(self.exponent_closed_form - self.exponent_exact) / self.exponent_exact


def norelay_closed_form_exponent(norm_s: float, alpha: float, beta: float) -> float:
    """``pi^2 (2/alpha) |x_s|^2 beta^(2/alpha) / sin(2 pi/alpha)`` (singular path-loss law)."""
    alpha = check_alpha(alpha)
    beta = check_beta(beta)
    theta = 2.0 * math.pi / alpha
    return math.pi**2 * (2.0 / alpha) * norm_s**2 * beta ** (2.0 / alpha) / math.sin(theta)


def q_norelay_rayleigh(norm_s: float, alpha: float, beta: float, lam: float,
                       settings: QuadratureSettings = DEFAULT_SETTINGS) -> NoRelayOutage:
    """Direct-link outage with Rayleigh fading, exact and in the classical closed form."""
    alpha = check_alpha(alpha)
    beta = check_beta(beta)
    lam = check_lambda(lam)
    if not norm_s > 0:
        raise DomainError("source distance must be positive")
    c = beta * (1.0 + norm_s**alpha)
    exact_exp = psi(None, lambda r: c / (1.0 + r**alpha), settings, (norm_s,))
    closed_exp = norelay_closed_form_exponent(norm_s, alpha, beta)
    return NoRelayOutage(-math.expm1(-lam * exact_exp), -math.expm1(-lam * closed_exp),
                         exact_exp, closed_exp)
