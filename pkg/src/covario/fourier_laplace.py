"""Fourier-Laplace transform along complex rays and its zero branches."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from covario._quadrature import panel_table
from covario.geometry import Direction, Polygon, area, curvature, width
from covario.radon import chord_autocorrelation_batch, chord_function

IM_CAP_FACTOR = 12.0
OSC_BUDGET = 40.0


class PrecisionLoss(Exception):
    """Raised when |Im zeta| exceeds the context cap."""


class NewtonDiverged(Exception):
    """Raised when complex Newton fails to converge."""


class ValidationFailed(Exception):
    """Raised when a located zero fails argument-principle validation."""


@dataclass(frozen=True)
class RayTransformContext:
    """Quadrature table for zeta -> integral of S_K(u, t) exp(i t zeta) dt.

    The panel layout is fixed at construction for |zeta| <= max_abs_zeta, and
    the chord values at the nodes are precomputed, so each evaluation is a
    single vectorized sum.
    """

    body: object
    u: Direction
    order: int
    max_abs_zeta: float
    im_cap: float
    lo: float
    hi: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    chord_values: np.ndarray = field(repr=False)

    @property
    def body_width(self):
        return self.hi - self.lo


def build_context(body, u: Direction, order=64, max_abs_zeta=200.0):
    if order < 32:
        raise ValueError("per-panel quadrature order must be at least 32")
    cf = chord_function(body, u)
    nodes, weights = panel_table(cf.lo, cf.hi, cf.breakpoints, order=order,
                                 max_freq=max_abs_zeta, osc_budget=OSC_BUDGET)
    return RayTransformContext(body, u, order, max_abs_zeta, IM_CAP_FACTOR / cf.width,
                               cf.lo, cf.hi, nodes, weights, cf(nodes))


def _check_zeta(ctx, zeta):
    z = np.asarray(zeta)
    if np.any(np.abs(z.imag) > ctx.im_cap * (1.0 + 1e-12)):
        raise PrecisionLoss(f"|Im zeta| exceeds cap {ctx.im_cap:.3g}")


def flt_ray(ctx, zeta):
    """Transform value at complex zeta; equals area(K) at zeta = 0."""
    _check_zeta(ctx, zeta)
    return complex(np.sum(ctx.weights * ctx.chord_values * np.exp(1j * ctx.nodes * zeta)))


def flt_ray_derivative(ctx, zeta):
    """d/dzeta of the ray transform: the transform of i t S_K(u, t)."""
    _check_zeta(ctx, zeta)
    w = ctx.weights * ctx.chord_values * ctx.nodes
    return 1j * complex(np.sum(w * np.exp(1j * ctx.nodes * zeta)))


def flt_ray_many(ctx, zetas):
    """Vectorized transform values for an array of complex zetas."""
    zetas = np.asarray(zetas, dtype=complex)
    _check_zeta(ctx, zetas)
    return np.exp(1j * np.outer(zetas, ctx.nodes)) @ (ctx.weights * ctx.chord_values)


def kobayashi_center(body, m, u: Direction, n=2):
    """Predicted center of the m-th zero branch.

    pi (4m + n - 1) / (2 w_K(u)) + i (ln tau(-u) - ln tau(u)) / (2 w_K(u)).
    """
    w = width(body, u)
    re = math.pi * (4 * m + n - 1) / (2.0 * w)
    im = (math.log(curvature(body, u.antipode())) - math.log(curvature(body, u))) / (2.0 * w)
    return complex(re, im)


@dataclass(frozen=True)
class ZeroBranch:
    """One located zero of the ray transform with its validation status."""

    m: int
    u: Direction
    zeta: complex
    residual: float
    validated: bool
    predicted_center: complex

    @property
    def deviation(self):
        return abs(self.zeta - self.predicted_center)


def winding_number(ctx, center, half_re, half_im, panels_per_side=4):
    """Winding of the transform around a rectangle, from the argument increment."""
    corners = [center + complex(half_re, half_im), center + complex(-half_re, half_im),
               center + complex(-half_re, -half_im), center + complex(half_re, -half_im)]
    x, w = np.polynomial.legendre.leggauss(ctx.order)
    pts = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        pts.append(np.array([a]))
        for k in range(panels_per_side):
            lo = a + (b - a) * k / panels_per_side
            hi = a + (b - a) * (k + 1) / panels_per_side
            pts.append(lo + (hi - lo) * 0.5 * (x + 1.0))
    pts.append(np.array([corners[0]]))
    vals = flt_ray_many(ctx, np.concatenate(pts))
    if np.any(vals == 0):
        raise ValidationFailed("transform vanishes on the validation contour")
    total = np.sum(np.angle(vals[1:] / vals[:-1]))
    winding = total / (2.0 * math.pi)
    nearest = round(winding)
    if abs(winding - nearest) > 0.1:
        raise ValidationFailed(f"ambiguous winding {winding:.3f}")
    return int(nearest)


def track_zero(ctx, m, start=None, max_iter=50, strict=True):
    """Newton-track the m-th zero branch from the predicted center.

    Validation encloses the converged zeta in a rectangle of half-sides
    (pi/(2w), 0.5/w) and requires winding number 1.
    """
    w = ctx.body_width
    predicted = kobayashi_center(ctx.body, m, ctx.u) if start is None else complex(start)
    z = predicted
    fz = flt_ray(ctx, z)
    converged = False
    for _ in range(max_iter):
        dfz = flt_ray_derivative(ctx, z)
        if dfz == 0:
            raise NewtonDiverged(f"zero derivative at {z}")
        step = fz / dfz
        lam = 1.0
        z_new, f_new = z, fz
        for _ in range(30):
            cand = z - lam * step
            if abs(cand.imag) > ctx.im_cap:
                lam *= 0.5
                continue
            f_cand = flt_ray(ctx, cand)
            if abs(f_cand) < abs(fz) or lam < 1e-6:
                z_new, f_new = cand, f_cand
                break
            lam *= 0.5
        else:
            raise NewtonDiverged(f"damping failed near {z}")
        moved = abs(z_new - z)
        z, fz = z_new, f_new
        if moved <= 1e-12 * (1.0 + abs(z)):
            converged = True
            break
    if not converged:
        raise NewtonDiverged(f"no convergence after {max_iter} iterations (m={m})")
    residual = abs(fz)
    dscale = abs(flt_ray_derivative(ctx, z))
    if residual > 1e-9 * dscale:
        raise NewtonDiverged(f"residual {residual:.3e} above 1e-9 * {dscale:.3e}")
    try:
        wind = winding_number(ctx, z, math.pi / (2.0 * w), 0.5 / w)
        validated = wind == 1
        if strict and not validated:
            raise ValidationFailed(f"winding {wind} != 1 at m={m}")
    except ValidationFailed:
        if strict:
            raise
        validated = False
    return ZeroBranch(m, ctx.u, z, residual, validated, predicted)


def branch_sweep(body, u_grid, m_range, order=64, strict=True):
    """Validated ZeroBranch table over (m, u) with a branch-continuity check.

    Consecutive grid directions must move each branch by less than half the
    spacing 2 pi / w between neighboring m, so branches cannot be confused.
    """
    m_list = list(m_range)
    u_list = list(u_grid)
    max_zeta = max(abs(kobayashi_center(body, max(m_list), u)) for u in u_list) + 10.0
    rows = []
    per_m = {m: [] for m in m_list}
    for u in u_list:
        ctx = build_context(body, u, order=order, max_abs_zeta=max_zeta)
        for m in m_list:
            try:
                br = track_zero(ctx, m, strict=strict)
            except (NewtonDiverged, ValidationFailed) as exc:
                raise type(exc)(f"(m={m}, theta={u.theta:.6f}): {exc}") from exc
            rows.append(br)
            per_m[m].append(br)
    for m in m_list:
        seq = per_m[m]
        for a, b in zip(seq[:-1], seq[1:]):
            bound = math.pi / min(width(body, a.u), width(body, b.u))
            if abs(b.zeta - a.zeta) > bound:
                raise ValidationFailed(
                    f"branch m={m} jumps by {abs(b.zeta - a.zeta):.3g} > {bound:.3g}")
    return rows


@dataclass(frozen=True)
class IdentityReport:
    max_deviation: float
    tolerance: float
    n_samples: int

    @property
    def passed(self):
        return self.max_deviation <= self.tolerance


def verify_reflection_identity(body, n_samples=50, seed=0, tol_factor=1e-9):
    """Check flt_{-K}(zeta) = conj(flt_K(conj zeta)) on random rays and zetas."""
    from covario.geometry import reflect

    rng = np.random.default_rng(seed)
    refl = reflect(body)
    scale = area(body)
    worst = 0.0
    for _ in range(n_samples):
        u = Direction(float(rng.uniform(0.0, 2.0 * math.pi)))
        ctx_k = build_context(body, u, max_abs_zeta=60.0)
        ctx_r = build_context(refl, u, max_abs_zeta=60.0)
        cap = 0.8 * min(ctx_k.im_cap, ctx_r.im_cap)
        z = complex(rng.uniform(-50.0, 50.0), rng.uniform(-cap, cap))
        growth = math.exp(abs(z.imag) * max(abs(ctx_k.lo), abs(ctx_k.hi)))
        dev = abs(flt_ray(ctx_r, z) - flt_ray(ctx_k, z.conjugate()).conjugate())
        worst = max(worst, dev / (scale * growth))
    return IdentityReport(worst, tol_factor, n_samples)


def autocorr_transform_table(body, u: Direction, max_freq, order=64):
    """Quadrature table (nodes, weights, values) for the transform of g_K on the ray u.

    The integrand is the chord autocorrelation, whose transform equals
    flt_ray(zeta) * conj(flt_ray(conj zeta)).
    """
    cf = chord_function(body, u)
    w = cf.width
    brks = [0.0]
    if isinstance(body, Polygon):
        knots = np.concatenate([[cf.lo], np.asarray(cf.breakpoints), [cf.hi]])
        diffs = (knots[None, :] - knots[:, None]).ravel()
        brks.extend(diffs.tolist())
    nodes, weights = panel_table(-w, w, brks, order=order, max_freq=max_freq,
                                 osc_budget=OSC_BUDGET)
    values = chord_autocorrelation_batch(body, u, nodes, order=order)
    return nodes, weights, values


def verify_factorization(body, u: Direction, xi_grid, tol_factor=1e-6, order=64):
    """Check FT(autocorrelation)(xi) = |flt_ray(xi)|^2 on a real xi grid."""
    xi = np.asarray(xi_grid, dtype=float)
    max_xi = float(np.abs(xi).max())
    nodes, weights, ac = autocorr_transform_table(body, u, max_xi, order=order)
    lhs = np.exp(1j * np.outer(xi, nodes)) @ (weights * ac)
    ctx = build_context(body, u, order=order, max_abs_zeta=max_xi)
    rhs = np.abs(flt_ray_many(ctx, xi.astype(complex))) ** 2
    dev = float(np.abs(lhs - rhs).max())
    scale = area(body) ** 2
    return IdentityReport(dev / scale, tol_factor, xi.shape[0])
