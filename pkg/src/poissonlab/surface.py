"""Semi-geodesic metric geometry.

A metric dr^2 + G^2(r, theta) dtheta^2 around a fixed center is described by
:class:`MetricProfile` (built-in analytic families or a sampled lattice with
finite-difference derivatives).  On top of it: boundary lengths, ball volumes,
Gauss curvature, isoperimetric constants, the isoperimetric/curvature
volume-length bounds, the radial kernel weight h and its pairing bound against the
Zygmund norm, and the flux-variation integral.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .rearrange import WeightedSamples, rearrange, zygmund_norm
from .report import VerdictReport

_GAUSS5_X, _GAUSS5_W = np.polynomial.legendre.leggauss(5)


@dataclass(frozen=True)
class MetricProfile:
    """Semi-geodesic coefficient G with radial derivatives.

    The callables are vectorized over broadcastable (r, theta) arrays.
    G(0, theta) = 0 and dG(0, theta) = 1 are required.
    """

    name: str
    r_max: float
    G: callable
    dG: callable
    d2G: callable


@dataclass(frozen=True)
class BallStats:
    r: float
    length: float
    volume: float


@dataclass(frozen=True)
class IsoperimetricEstimate:
    A_iso: float
    A_curv: float
    p: float


@dataclass(frozen=True)
class FluxExponentFit:
    rhos: np.ndarray
    values: np.ndarray
    exponent: float | None
    target: float


def flat(r_max: float = 2.0) -> MetricProfile:
    return MetricProfile(
        "flat", r_max,
        lambda r, t: np.broadcast_arrays(np.asarray(r, float), np.asarray(t, float))[0].copy(),
        lambda r, t: np.ones(np.broadcast_shapes(np.shape(r), np.shape(t))),
        lambda r, t: np.zeros(np.broadcast_shapes(np.shape(r), np.shape(t))),
    )


def sphere(r_max: float = np.pi) -> MetricProfile:
    return MetricProfile(
        "sphere", r_max,
        lambda r, t: np.sin(r) * np.ones(np.broadcast_shapes(np.shape(r), np.shape(t))),
        lambda r, t: np.cos(r) * np.ones(np.broadcast_shapes(np.shape(r), np.shape(t))),
        lambda r, t: -np.sin(r) * np.ones(np.broadcast_shapes(np.shape(r), np.shape(t))),
    )


def hyperbolic(r_max: float = 3.0) -> MetricProfile:
    return MetricProfile(
        "hyperbolic", r_max,
        lambda r, t: np.sinh(r) * np.ones(np.broadcast_shapes(np.shape(r), np.shape(t))),
        lambda r, t: np.cosh(r) * np.ones(np.broadcast_shapes(np.shape(r), np.shape(t))),
        lambda r, t: np.sinh(r) * np.ones(np.broadcast_shapes(np.shape(r), np.shape(t))),
    )


def perturbed(eps: float, r_max: float = 1.5) -> MetricProfile:
    if eps * r_max**2 >= 1.0:
        raise ValueError("perturbation degenerates the metric before r_max")
    return MetricProfile(
        f"perturbed:{eps:g}", r_max,
        lambda r, t: np.asarray(r, float) * (1.0 + eps * np.asarray(r, float) ** 2 * np.cos(t)),
        lambda r, t: 1.0 + 3.0 * eps * np.asarray(r, float) ** 2 * np.cos(t),
        lambda r, t: 6.0 * eps * np.asarray(r, float) * np.cos(t),
    )


def from_name(name: str, r_max: float | None = None) -> MetricProfile:
    """Parse a metric spec string: flat | sphere | hyperbolic | perturbed:eps."""
    kwargs = {} if r_max is None else {"r_max": r_max}
    if name == "flat":
        return flat(**kwargs)
    if name == "sphere":
        return sphere(**kwargs)
    if name == "hyperbolic":
        return hyperbolic(**kwargs)
    if name.startswith("perturbed"):
        eps = 0.1
        if ":" in name:
            eps = float(name.split(":", 1)[1])
        return perturbed(eps, **kwargs)
    raise ValueError(f"unknown metric {name!r}")


def from_samples(r_nodes, theta_nodes, G_values, name: str = "sampled",
                 pole_tol: float = 1e-6) -> MetricProfile:
    """Metric from G sampled on a (r, theta) lattice; derivatives by centered
    differences (one-sided at the radial boundary), theta periodic.

    pole_tol bounds the violation of G(0) = 0 and dG(0) = 1; coarse lattices
    of curved metrics may need a looser value to absorb the stencil error.
    """
    r_nodes = np.asarray(r_nodes, dtype=float)
    theta_nodes = np.asarray(theta_nodes, dtype=float)
    G_values = np.asarray(G_values, dtype=float)
    if G_values.shape != (r_nodes.size, theta_nodes.size):
        raise ValueError("G_values shape must be (n_r, n_theta)")
    if r_nodes[0] != 0.0:
        raise ValueError("radial lattice must start at r = 0")
    if np.max(np.abs(G_values[0])) > pole_tol:
        raise ValueError("pole condition G(0, theta) = 0 violated")
    dG = np.gradient(G_values, r_nodes, axis=0)
    d2G = np.gradient(dG, r_nodes, axis=0)
    if np.max(np.abs(dG[0] - 1.0)) > pole_tol:
        raise ValueError("pole condition dG(0, theta) = 1 violated")

    def interp(values):
        tp = np.concatenate([theta_nodes, [theta_nodes[0] + 2 * np.pi]])
        vp = np.concatenate([values, values[:, :1]], axis=1)
        f = RegularGridInterpolator((r_nodes, tp), vp, method="linear",
                                    bounds_error=False, fill_value=None)

        def call(r, t):
            r, t = np.broadcast_arrays(np.asarray(r, float), np.asarray(t, float))
            pts = np.stack([r.ravel(), np.mod(t.ravel(), 2 * np.pi)], axis=-1)
            return f(pts).reshape(r.shape)

        return call

    return MetricProfile(name, float(r_nodes[-1]), interp(G_values), interp(dG), interp(d2G))


def _theta_nodes(n_theta: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n_theta) / n_theta


def boundary_length(metric: MetricProfile, r, n_theta: int = 256):
    """l(dB_r) = int_0^2pi G(r, .) dtheta by the periodic trapezoid rule."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r > metric.r_max * (1 + 1e-12)):
        raise ValueError("radius out of range")
    th = _theta_nodes(n_theta)
    vals = metric.G(r[..., None], th)
    return np.squeeze(vals.mean(axis=-1) * 2 * np.pi)[()]


def ball_volume(metric: MetricProfile, r: float, n_r: int = 512, n_theta: int = 256) -> float:
    """V(B_r) = int_0^r l(dB_t) dt by composite Simpson (l(0) = 0)."""
    if r <= 0 or r > metric.r_max * (1 + 1e-12):
        raise ValueError("radius out of range")
    n = n_r + (n_r % 2)  # Simpson needs an even interval count
    t = np.linspace(0.0, r, n + 1)
    ell = np.empty(n + 1)
    ell[0] = 0.0
    ell[1:] = np.atleast_1d(boundary_length(metric, t[1:], n_theta))
    h = r / n
    wts = np.ones(n + 1)
    wts[1:-1:2] = 4.0
    wts[2:-1:2] = 2.0
    return float(h / 3.0 * np.sum(wts * ell))


def ball_stats(metric: MetricProfile, r: float, n_r: int = 512, n_theta: int = 256) -> BallStats:
    return BallStats(r, float(boundary_length(metric, r, n_theta)),
                     ball_volume(metric, r, n_r, n_theta))


def gauss_curvature(metric: MetricProfile, r, theta):
    """K = -d2G/dr2 / G; undefined at the pole."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("curvature at pole requires limit")
    g = metric.G(r, theta)
    if np.any(np.asarray(g) <= 0):
        raise ValueError("degenerate metric")
    return np.squeeze(-metric.d2G(r, theta) / g)[()]


def curvature_lp_norm(metric: MetricProfile, p: float, radius: float | None = None,
                      n_r: int = 256, n_theta: int = 256) -> float:
    """||K||_{L^p(B_radius)} by midpoint quadrature; radius defaults to
    min(1, r_max)."""
    if radius is None:
        radius = min(1.0, metric.r_max)
    dr = radius / n_r
    dth = 2 * np.pi / n_theta
    rc = (np.arange(n_r) + 0.5) * dr
    tc = (np.arange(n_theta) + 0.5) * dth
    R, T = np.meshgrid(rc, tc, indexing="ij")
    g = metric.G(R, T)
    k = -metric.d2G(R, T) / np.maximum(g, 1e-300)
    return float(np.sum(np.abs(k) ** p * g * dr * dth) ** (1.0 / p))


def isoperimetric_constant(metric: MetricProfile, radii, p: float = 2.0,
                           n_r: int = 512, n_theta: int = 256) -> IsoperimetricEstimate:
    """A_iso = sup V/l^2 over the probed geodesic balls (a lower bound of the
    true isoperimetric constant) together with the curvature L^p bound."""
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0:
        raise ValueError("empty radii list")
    ratios = [ball_volume(metric, r, n_r, n_theta) / boundary_length(metric, r, n_theta) ** 2
              for r in radii]
    return IsoperimetricEstimate(float(max(ratios)), curvature_lp_norm(metric, p, None, n_r, n_theta), p)


def geometry_bounds_verdicts(metric: MetricProfile, A: float, p: float, radii,
                             n_r: int = 512, n_theta: int = 256, tol: float = 1e-9):
    """The four volume/length bounds (two lower via the isoperimetric constant,
    two upper via the curvature bound), each aggregated over the probed radii."""
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0:
        raise ValueError("empty radii list")
    est = isoperimetric_constant(metric, radii, p, n_r, n_theta)
    case = ""
    if A < est.A_iso * (1 - 1e-9) or A < est.A_curv * (1 - 1e-9):
        case = (f"invalid: A={A:g} below measured A_iso={est.A_iso:g} "
                f"or A_curv={est.A_curv:g}")
    up = (2 * np.pi + A) ** (p + 1)
    worst = {}
    for r in radii:
        vol = ball_volume(metric, r, n_r, n_theta)
        ell = float(boundary_length(metric, r, n_theta))
        checks = {
            "lower_volume": (r**2 / (4 * A), vol),
            "lower_length": (r / (2 * A), ell),
            "upper_volume": (vol, up * r**2),
            "upper_length": (ell, up * r),
        }
        for key, (lhs, rhs) in checks.items():
            if key not in worst or lhs / rhs > worst[key][0] / worst[key][1]:
                worst[key] = (lhs, rhs)
    return [VerdictReport(f"geometry_{k}", lhs, rhs, tol, case) for k, (lhs, rhs) in worst.items()]


def geometry_bounds_check(metric: MetricProfile, A: float, p: float, radii,
                          n_r: int = 512, n_theta: int = 256, tol: float = 1e-9) -> VerdictReport:
    """Worst-slack verdict over all four bounds and all probed radii."""
    verdicts = geometry_bounds_verdicts(metric, A, p, radii, n_r, n_theta, tol)
    return max(verdicts, key=lambda v: v.ratio)


def _inverse_length_integral(metric: MetricProfile, knots: np.ndarray, n_theta: int) -> np.ndarray:
    # per-segment Gauss-5 integrals of 1/l between consecutive knots
    lo, hi = knots[:-1], knots[1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = mid[:, None] + half[:, None] * _GAUSS5_X  # (nseg, 5)
    ell = np.atleast_2d(boundary_length(metric, nodes.ravel(), n_theta)).reshape(nodes.shape)
    return np.sum(_GAUSS5_W / ell, axis=1) * half


def kernel_weight(metric: MetricProfile, R: float, d: float, n: int = 512,
                  n_theta: int = 256) -> float:
    """h = int_d^R dr / l(dB_r); flat metric gives ln(R/d) / 2pi."""
    if not (0 <= d <= R <= metric.r_max * (1 + 1e-12)):
        raise ValueError("need 0 <= d <= R <= r_max")
    if d == R:
        return 0.0
    if d == 0.0:
        warnings.warn("singular endpoint: inner cutoff at first grid node")
        d = R / (2 * n)
    knots = np.linspace(d, R, n + 1)
    return float(np.sum(_inverse_length_integral(metric, knots, n_theta)))


def kernel_weight_profile(metric: MetricProfile, R: float, r_eval, n: int = 512,
                          n_theta: int = 256) -> np.ndarray:
    """h evaluated at many radii at once via a reverse cumulative integral on
    a knot grid refined to at least n segments."""
    r_eval = np.asarray(r_eval, dtype=float)
    rs = np.unique(r_eval)
    if rs[0] <= 0 or rs[-1] > R * (1 + 1e-12):
        raise ValueError("evaluation radii must lie in (0, R]")
    knots = np.union1d(rs, np.linspace(rs[0], R, n + 1))
    if knots[-1] < R:
        knots = np.append(knots, R)
    seg = _inverse_length_integral(metric, knots, n_theta)
    h_at = np.append(np.cumsum(seg[::-1])[::-1], 0.0)
    return np.interp(r_eval, knots, h_at)


_GAUSS2_X, _GAUSS2_W = np.polynomial.legendre.leggauss(2)


def sample_ball(metric: MetricProfile, R: float, func=None, n_r: int = 512,
                n_theta: int = 256) -> WeightedSamples:
    """Cell samples of func(r, theta) on the geodesic ball B_R with planar
    chart positions; each radial cell carries two Gauss-Legendre nodes so that
    radially singular kernels integrate to high accuracy."""
    dr = R / n_r
    dth = 2 * np.pi / n_theta
    mid = (np.arange(n_r) + 0.5) * dr
    rc = (mid[:, None] + (dr / 2) * _GAUSS2_X).ravel()
    rw = np.tile((dr / 2) * _GAUSS2_W, n_r)
    tc = (np.arange(n_theta) + 0.5) * dth
    Rg, Tg = np.meshgrid(rc, tc, indexing="ij")
    meas = metric.G(Rg, Tg) * rw[:, None] * dth
    vals = np.ones_like(Rg) if func is None else np.asarray(func(Rg, Tg), dtype=float)
    pos = np.stack([(Rg * np.cos(Tg)).ravel(), (Rg * np.sin(Tg)).ravel()], axis=-1)
    return WeightedSamples(vals.ravel(), meas.ravel(), pos)


def kernel_pairing_check(metric: MetricProfile, f: WeightedSamples, R: float, A: float,
                         tol: float = 1e-6, n_theta: int = 256) -> VerdictReport:
    """int |f| h dV against A * ||f||*_{L ln L(B_R)}; equality for constant f
    on the flat metric with A = 1/(4 pi)."""
    if f.positions is None:
        raise ValueError("samples carry no positions")
    dist = np.hypot(f.positions[:, 0], f.positions[:, 1])
    h = kernel_weight_profile(metric, R, dist, n_theta=n_theta)
    lhs = float(np.sum(np.abs(f.values) * h * f.measures))
    rhs = A * zygmund_norm(f, f.total_measure)
    return VerdictReport("kernel_pairing", lhs, rhs, tol)


def kernel_rearrangement_bound(metric: MetricProfile, R: float, A: float,
                               n_r: int = 512, n_theta: int = 256) -> VerdictReport:
    """h*(t) <= A ln(V(B_R)/t), checked at the left endpoint of each step of
    the discrete rearrangement (where each step attains its sup)."""
    samples = sample_ball(metric, R, None, n_r, n_theta)
    dist = np.hypot(samples.positions[:, 0], samples.positions[:, 1])
    h = kernel_weight_profile(metric, R, dist, n_theta=n_theta)
    hw = WeightedSamples(h, samples.measures, samples.positions)
    prof = rearrange(hw)
    V = samples.total_measure
    # collapse equal-value runs (up to float jitter within a ring): each level
    # h_i starts at t = mu{h > h_i}
    drops = prof.values[:-1] - prof.values[1:]
    keep = np.concatenate([[True], drops > 1e-9 * np.maximum(prof.values[:-1], 1e-300)])
    vals = prof.values[keep]
    t = prof.breakpoints[:-1][keep]
    with np.errstate(divide="ignore"):
        bound = A * np.where(t > 0, np.log(V / np.maximum(t, 1e-300)), np.inf)
    ratios = np.where(np.isinf(bound), 0.0, vals / np.maximum(bound, 1e-300))
    worst = int(np.argmax(ratios))
    return VerdictReport("kernel_rearrangement", float(vals[worst]),
                         float(bound[worst]), 5e-2)


def flux_variation(metric: MetricProfile, rho: float, n_r: int = 512,
                   n_theta: int = 256) -> float:
    """int_0^rho int_0^2pi |d/dr (G / l)| dtheta dr; zero for rotationally
    symmetric metrics."""
    if rho <= 0 or rho > metric.r_max * (1 + 1e-12):
        raise ValueError("radius out of range")
    dr = rho / n_r
    dth = 2 * np.pi / n_theta
    rc = (np.arange(n_r) + 0.5) * dr
    tc = (np.arange(n_theta) + 0.5) * dth
    Rg, Tg = np.meshgrid(rc, tc, indexing="ij")
    g = metric.G(Rg, Tg)
    dg = metric.dG(Rg, Tg)
    ell = g.sum(axis=1) * dth
    dell = dg.sum(axis=1) * dth
    deriv = (dg * ell[:, None] - g * dell[:, None]) / ell[:, None] ** 2
    return float(np.sum(np.abs(deriv)) * dr * dth)


def flux_exponent_fit(metric: MetricProfile, p: float, rhos=None, n_r: int = 512,
                      n_theta: int = 256) -> FluxExponentFit:
    """Fit flux_variation(rho) ~ rho^alpha over a dyadic ladder; the bound
    predicts alpha >= 2 - 2/p."""
    if rhos is None:
        rhos = np.array([1 / 8, 1 / 4, 3 / 8, 1 / 2])
    rhos = np.asarray(rhos, dtype=float)
    if np.any(rhos > metric.r_max):
        raise ValueError("r_max too small for the ladder")
    values = np.array([flux_variation(metric, r, n_r, n_theta) for r in rhos])
    target = 2.0 - 2.0 / p
    if np.any(values <= 0):
        return FluxExponentFit(rhos, values, None, target)
    slope = float(np.polyfit(np.log(rhos), np.log(values), 1)[0])
    return FluxExponentFit(rhos, values, slope, target)
