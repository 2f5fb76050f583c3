"""Covariograms and cross-covariograms of planar convex bodies, by exact clipping."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from covario.geometry import (
    Direction,
    Disk,
    Polygon,
    SupportBody,
    area,
    body_hash,
    boundary_point,
    curvature,
    minkowski_sum_polygons,
    polygonal_approximation,
    reflect,
    support,
    width,
)

APPROX_BOUNDARY_POINTS = 4096
SMALL_POLYGON_LIMIT = 64


class FitFailed(Exception):
    """Raised when the covariogram cap fit cannot recover a curvature pair."""


def clip_convex(subject, clip):
    """Sutherland-Hodgman clip of convex subject polygon by convex clip polygon."""
    output = [tuple(p) for p in subject]
    n = len(clip)
    for j in range(n):
        if not output:
            return []
        cx, cy = clip[j]
        dx, dy = clip[(j + 1) % n]
        ex, ey = dx - cx, dy - cy
        inp = output
        output = []
        sx, sy = inp[-1]
        s_in = ex * (sy - cy) - ey * (sx - cx) >= 0.0
        for px, py in inp:
            p_in = ex * (py - cy) - ey * (px - cx) >= 0.0
            if p_in != s_in:
                num = ex * (sy - cy) - ey * (sx - cx)
                den = num - (ex * (py - cy) - ey * (px - cx))
                t = num / den
                output.append((sx + t * (px - sx), sy + t * (py - sy)))
            if p_in:
                output.append((px, py))
            sx, sy, s_in = px, py, p_in
    return output


def _poly_area(points):
    if len(points) < 3:
        return 0.0
    s = 0.0
    n = len(points)
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * abs(s)


@lru_cache(maxsize=64)
def _clip_fan(body, n=APPROX_BOUNDARY_POINTS):
    """Half-plane fan {z : <z, n_j> <= c_j} of the (approximating) polygon."""
    poly = polygonal_approximation(body, n)
    v = poly.vertices
    edges = np.roll(v, -1, axis=0) - v
    normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1)
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    offsets = np.einsum("ij,ij->i", normals, v)
    angles = np.arctan2(normals[:, 1], normals[:, 0])
    order = np.argsort(angles, kind="stable")
    return normals[order], offsets[order], angles[order]


def _halfplane_intersection_area(normals, offsets):
    """Area of {z : <z, n_j> <= c_j} for half-planes sorted by normal angle."""
    from collections import deque

    nx = normals[:, 0].tolist()
    ny = normals[:, 1].tolist()
    c = offsets.tolist()
    n = len(c)

    def crossing(i, j):
        det = nx[i] * ny[j] - ny[i] * nx[j]
        if abs(det) < 1e-300:
            return None
        return ((c[i] * ny[j] - c[j] * ny[i]) / det,
                (nx[i] * c[j] - nx[j] * c[i]) / det)

    def bad(i, j, k):
        p = crossing(i, j)
        if p is None:
            return True
        return nx[k] * p[0] + ny[k] * p[1] > c[k]

    dq = deque()
    for k in range(n):
        while len(dq) >= 2 and bad(dq[-2], dq[-1], k):
            dq.pop()
        while len(dq) >= 2 and bad(dq[1], dq[0], k):
            dq.popleft()
        dq.append(k)
    changed = True
    while changed and len(dq) >= 3:
        changed = False
        if bad(dq[-2], dq[-1], dq[0]):
            dq.pop()
            changed = True
        elif bad(dq[1], dq[0], dq[-1]):
            dq.popleft()
            changed = True
    if len(dq) < 3:
        return 0.0
    idx = list(dq)
    pts = []
    for a, b in zip(idx, idx[1:] + idx[:1]):
        p = crossing(a, b)
        if p is None:
            return 0.0
        pts.append(p)
    ar = _poly_area(pts)
    # reject phantom polygons produced by an empty intersection
    cxm = sum(p[0] for p in pts) / len(pts)
    cym = sum(p[1] for p in pts) / len(pts)
    viol = np.max(normals @ np.array([cxm, cym]) - offsets)
    if viol > 1e-7 * max(1.0, np.abs(offsets).max()):
        return 0.0
    return ar


def polygon_intersection_area(p: Polygon, q: Polygon):
    """Exact area of the intersection of two convex polygons."""
    if p.vertices.shape[0] + q.vertices.shape[0] <= SMALL_POLYGON_LIMIT:
        return _poly_area(clip_convex(p.vertices, q.vertices))
    n1, c1, a1 = _clip_fan(p)
    n2, c2, a2 = _clip_fan(q)
    return _merged_fan_area(n1, c1, a1, n2, c2, a2)


def _merged_fan_area(n1, c1, a1, n2, c2, a2):
    normals = np.vstack([n1, n2])
    offsets = np.concatenate([c1, c2])
    angles = np.concatenate([a1, a2])
    order = np.argsort(angles, kind="stable")
    normals, offsets, angles = normals[order], offsets[order], angles[order]
    # collapse duplicate directions, keeping the tighter constraint
    keep_n, keep_c = [normals[0]], [offsets[0]]
    for i in range(1, angles.shape[0]):
        if angles[i] - angles[i - 1] < 1e-14:
            keep_c[-1] = min(keep_c[-1], offsets[i])
        else:
            keep_n.append(normals[i])
            keep_c.append(offsets[i])
    return _halfplane_intersection_area(np.array(keep_n), np.array(keep_c))


def _pair_area(bodyA, bodyB, x, n=APPROX_BOUNDARY_POINTS):
    """lambda_2(A intersect (B + x)) on the clipping representations."""
    if isinstance(bodyA, Polygon) and isinstance(bodyB, Polygon) \
            and bodyA.vertices.shape[0] + bodyB.vertices.shape[0] <= SMALL_POLYGON_LIMIT:
        return _poly_area(clip_convex(bodyA.vertices, bodyB.vertices + np.asarray(x)))
    if bodyA is bodyB or bodyA == bodyB:
        normals, offsets, _ = _clip_fan(bodyA, n)
        shift = normals @ np.asarray(x, dtype=float)
        return _halfplane_intersection_area(normals, np.minimum(offsets, offsets + shift))
    n1, c1, a1 = _clip_fan(bodyA, n)
    n2, c2, a2 = _clip_fan(bodyB, n)
    return _merged_fan_area(n1, c1, a1, n2, c2 + n2 @ np.asarray(x, dtype=float), a2)


def covariogram(body, x):
    """g_K(x) = area(K intersect (K + x)); exact for polygons."""
    return _pair_area(body, body, x)


def covariogram_evaluator(body, n=APPROX_BOUNDARY_POINTS):
    """Black-box point -> g_K(point) callable (the determination-experiment contract)."""

    def evaluate(x):
        return _pair_area(body, body, x, n=n)

    return evaluate


def cross_covariogram(bodyA, bodyB, x):
    """g_{H,K}(x) = area(H intersect (K + x)); exact for polygon pairs."""
    return _pair_area(bodyA, bodyB, x)


def clip_areas_batch(subject_vertices, clip_vertices, xs):
    """Areas of subject ∩ (clip + x) for every translation x, vectorized.

    Sutherland-Hodgman against each clip edge, carried out simultaneously
    for all translations with padded vertex buffers.
    """
    sv = np.asarray(subject_vertices, dtype=float)
    cv = np.asarray(clip_vertices, dtype=float)
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    g = xs.shape[0]
    edges = np.roll(cv, -1, axis=0) - cv
    normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1)  # inner side: <n, z> <= c
    offsets = np.einsum("ij,ij->i", normals, cv)
    cap = sv.shape[0] + cv.shape[0] + 4
    verts = np.zeros((g, cap, 2))
    verts[:, :sv.shape[0]] = sv
    counts = np.full(g, sv.shape[0])
    idx = np.arange(cap)
    for j in range(cv.shape[0]):
        live = np.maximum(counts, 1)
        nxt = (idx[None, :] + 1) % live[:, None]
        d = verts @ normals[j] - (offsets[j] + xs @ normals[j])[:, None]
        d_nxt = np.take_along_axis(d, nxt, axis=1)
        v_nxt = np.take_along_axis(verts, nxt[:, :, None], axis=1)
        valid = idx[None, :] < counts[:, None]
        inside = d <= 0.0
        inside_nxt = d_nxt <= 0.0
        crossing = (inside != inside_nxt) & valid
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(crossing, d / (d - d_nxt), 0.0)
        xpt = verts + t[:, :, None] * (v_nxt - verts)
        out = np.empty((g, 2 * cap, 2))
        ok = np.empty((g, 2 * cap), dtype=bool)
        out[:, 0::2] = xpt
        out[:, 1::2] = v_nxt
        ok[:, 0::2] = crossing
        ok[:, 1::2] = inside_nxt & valid
        order = np.argsort(~ok, axis=1, kind="stable")
        out = np.take_along_axis(out, order[:, :cap, None], axis=1)
        counts = ok.sum(axis=1)
        verts = out
    valid = idx[None, :] < counts[:, None]
    live = np.maximum(counts, 1)
    nxt = (idx[None, :] + 1) % live[:, None]
    v_nxt = np.take_along_axis(verts, nxt[:, :, None], axis=1)
    contrib = (verts[:, :, 0] * v_nxt[:, :, 1] - v_nxt[:, :, 0] * verts[:, :, 1]) * valid
    areas = 0.5 * np.abs(contrib.sum(axis=1))
    areas[counts < 3] = 0.0
    return areas


@dataclass(frozen=True)
class CovariogramGrid:
    """Sampled covariogram values on a rectangular lattice."""

    origin: tuple
    spacing: tuple
    nx: int
    ny: int
    values: np.ndarray  # shape (ny, nx)
    method: str
    body_hashes: tuple

    def points(self):
        xg = self.origin[0] + self.spacing[0] * np.arange(self.nx)
        yg = self.origin[1] + self.spacing[1] * np.arange(self.ny)
        return xg, yg

    def to_csv(self, path, sidecar_path=None):
        lines = ["x,y,value"]
        xg, yg = self.points()
        for iy in range(self.ny):
            for ix in range(self.nx):
                lines.append(f"{float(xg[ix])!r},{float(yg[iy])!r},{float(self.values[iy, ix])!r}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        if sidecar_path is not None:
            with open(sidecar_path, "w") as fh:
                json.dump(self.sidecar(), fh, indent=2, sort_keys=True)

    def sidecar(self):
        return {
            "schema_version": 1,
            "origin": list(self.origin),
            "spacing": list(self.spacing),
            "shape": [self.nx, self.ny],
            "method": self.method,
            "bodies": list(self.body_hashes),
        }


def _support_bbox(bodyH, bodyK):
    """Bounding box of supp g_{H,K} = H + (-K)."""
    hx = support(bodyH, Direction(0.0)) + support(bodyK, Direction(math.pi))
    lx = support(bodyH, Direction(math.pi)) + support(bodyK, Direction(0.0))
    hy = support(bodyH, Direction(math.pi / 2)) + support(bodyK, Direction(3 * math.pi / 2))
    ly = support(bodyH, Direction(3 * math.pi / 2)) + support(bodyK, Direction(math.pi / 2))
    return (-lx, hx), (-ly, hy)


def cross_covariogram_grid(bodyH, bodyK, nx=41, ny=41, bbox=None):
    """CovariogramGrid of g_{H,K} over the support bounding box."""
    if bbox is None:
        (x0, x1), (y0, y1) = _support_bbox(bodyH, bodyK)
    else:
        (x0, x1), (y0, y1) = bbox
    dx = (x1 - x0) / (nx - 1)
    dy = (y1 - y0) / (ny - 1)
    xg = x0 + dx * np.arange(nx)
    yg = y0 + dy * np.arange(ny)
    exact = isinstance(bodyH, Polygon) and isinstance(bodyK, Polygon)
    small = exact and (bodyH.vertices.shape[0] + bodyK.vertices.shape[0]
                       <= SMALL_POLYGON_LIMIT)
    xsv, ysv = np.meshgrid(xg, yg)
    pts = np.stack([xsv.ravel(), ysv.ravel()], axis=1)
    if small:
        vals = clip_areas_batch(bodyH.vertices, bodyK.vertices, pts)
    else:
        vals = np.array([cross_covariogram(bodyH, bodyK, p) for p in pts])
    values = vals.reshape(ny, nx)
    method = "exact-clip" if exact else "polyline-approx"
    return CovariogramGrid((float(x0), float(y0)), (float(dx), float(dy)), nx, ny,
                           values, method, (body_hash(bodyH), body_hash(bodyK)))


def covariogram_grid(body, nx=41, ny=41, bbox=None):
    """Auto-covariogram grid; the lattice contains the origin for odd nx, ny."""
    return cross_covariogram_grid(body, body, nx=nx, ny=ny, bbox=bbox)


@dataclass(frozen=True)
class MinkowskiSupport:
    body: Polygon
    max_width_deviation: float
    tolerance: float


def support_of_crosscov(bodyH, bodyK, n_dirs=360):
    """H + (-K), the support of g_{H,K}, with the width-sum identity checked."""
    mk = reflect(bodyK)
    if isinstance(bodyH, Polygon) and isinstance(bodyK, Polygon):
        total = minkowski_sum_polygons(bodyH, mk)
        tol = 1e-12
    else:
        pH = polygonal_approximation(bodyH, APPROX_BOUNDARY_POINTS)
        pK = polygonal_approximation(mk, APPROX_BOUNDARY_POINTS)
        total = minkowski_sum_polygons(pH, pK)
        tol = 1e-5
    thetas = np.linspace(0.0, 2.0 * math.pi, n_dirs, endpoint=False)
    scale = 1.0
    dev = 0.0
    for th in thetas:
        u = Direction(float(th))
        ws = width(total, u)
        target = width(bodyH, u) + width(bodyK, u)
        scale = max(scale, abs(target))
        dev = max(dev, abs(ws - target))
    if dev > tol * scale:
        raise AssertionError(f"width-sum identity violated: {dev:.3e} > {tol:.1e}*{scale:.3g}")
    return MinkowskiSupport(total, dev, tol * scale)


@dataclass(frozen=True)
class MatheronDerivative:
    geometric: float
    finite_difference: float
    step: float


def directional_derivative_origin(body, v: Direction, step=1e-4):
    """One-sided derivative of g_K at the origin in direction v.

    The geometric value is -lambda_1(K | v_perp), the negated length of the
    projection of K onto the line orthogonal to v; the finite difference
    (g(step*v) - g(0)) / step validates it.
    """
    geo = -width(body, Direction(v.theta + math.pi / 2.0))
    g0 = covariogram(body, (0.0, 0.0))
    g1 = covariogram(body, step * v.u)
    return MatheronDerivative(geo, (g1 - g0) / step, step)


def sum_reciprocal_curvatures_from_width(body: SupportBody, u: Direction):
    """w(theta) + w''(theta), which equals 1/tau(u) + 1/tau(-u) (checked to 1e-10)."""
    if not isinstance(body, SupportBody):
        raise TypeError("closed-form width differentiation needs a SupportBody")
    th = u.theta
    val = 2.0 * body.a0
    for k, (a, b) in enumerate(body.coeffs, start=1):
        if k % 2 == 0:
            val += 2.0 * (1.0 - k * k) * (a * math.cos(k * th) + b * math.sin(k * th))
    target = 1.0 / curvature(body, u) + 1.0 / curvature(body, u.antipode())
    if abs(val - target) > 1e-10:
        raise AssertionError(f"width/curvature mismatch: {val} vs {target}")
    return val


CAP_PREFACTOR = 2.0 / 3.0  # omega_1 / (n^2 - 1) for n = 2, proof-consistent


@dataclass(frozen=True)
class CurvaturePair:
    """Unordered curvature pair {tau(u), tau(-u)} recovered from g_K near p."""

    low: float
    high: float
    direction: Direction
    fit_residual: float
    n_samples: int

    @property
    def values(self):
        return (self.low, self.high)


FIT_BOUNDARY_POINTS = 32768  # finer fan for cap sampling at depths down to 1e-4


def curvature_pair_from_covariogram(body, u: Direction, depth_range=(1e-4, 1e-2),
                                    depth_count=12, t_star=1e-3, q_count=9,
                                    residual_tol=0.25, disc_tol=5e-3):
    """Recover {tau(u), tau(-u)} from covariogram samples near the support point p.

    Stage one fits the depth law g = c (2t)^{3/2} / sqrt(D) at zero tangential
    offset on a geometric depth ladder (exponent 3/2 asserted, not fitted) to
    get D = tau(u) + tau(-u).  Stage two fixes t = t_star and fits g^{2/3}
    linearly against q^2 to get Q with Q*D = tau(u)*tau(-u).  The pair is the
    sorted root set of z^2 - D z + Q D; discriminants within disc_tol * D^2 of
    zero collapse to the equal pair (the noise floor of the pinned ladder).
    """
    if not isinstance(body, (SupportBody, Disk)):
        raise FitFailed("cap asymptotics require a smooth body")
    p = boundary_point(body, u) - boundary_point(body, u.antipode())
    uv, tan = u.u, u.perp

    def sample(x):
        return _pair_area(body, body, x, n=FIT_BOUNDARY_POINTS)

    depths = np.geomspace(depth_range[0], depth_range[1], depth_count)
    gvals = np.array([sample(p - t * uv) for t in depths])
    if np.any(gvals <= 0):
        raise FitFailed("covariogram vanished on the depth ladder")
    consts = np.log(gvals) - 1.5 * np.log(depths)
    c0 = float(np.mean(consts))
    resid = float(np.max(np.abs(consts - c0)))
    if resid > residual_tol:
        raise FitFailed(f"depth-law residual {resid:.3g} exceeds {residual_tol}")
    d_sum = 8.0 * CAP_PREFACTOR ** 2 / math.exp(2.0 * c0)
    q_max = 0.8 * math.sqrt(4.0 * t_star / d_sum)
    qs = np.linspace(-q_max, q_max, q_count)
    g2 = np.array([sample(p + q * tan - t_star * uv) for q in qs])
    if np.any(g2 <= 0):
        raise FitFailed("covariogram vanished on the tangential stencil")
    y = g2 ** (2.0 / 3.0)
    design = np.stack([np.ones_like(qs), qs * qs], axis=1)
    (b0, b1), *_ = np.linalg.lstsq(design, y, rcond=None)
    if b0 <= 0:
        raise FitFailed("degenerate tangential fit")
    q_curv = -b1 * (2.0 * t_star) / b0
    disc = d_sum * d_sum - 4.0 * q_curv * d_sum
    if disc < -disc_tol * d_sum * d_sum:
        raise FitFailed(f"negative discriminant {disc:.3g} beyond tolerance")
    if abs(disc) <= disc_tol * d_sum * d_sum:
        disc = 0.0
    root = math.sqrt(disc)
    low, high = 0.5 * (d_sum - root), 0.5 * (d_sum + root)
    if low <= 0:
        raise FitFailed("non-positive curvature root")
    return CurvaturePair(low, high, u, resid, depth_count + q_count)
