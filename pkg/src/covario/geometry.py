"""Planar convex bodies: polygons, support-function bodies, disks, zonogons."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

C2PLUS_GRID = 4096
C2PLUS_MARGIN = 1e-9
COLLINEAR_TOL = 1e-12
KMAX = 32


class PolygonNotSmooth(Exception):
    """Raised when a smooth-boundary operation is applied to a polygon."""


class NotC2Plus(Exception):
    """Raised when a support-function body fails the positive-curvature check."""


class DegenerateZonogon(Exception):
    """Raised when all zonogon generators are parallel."""


class InvalidFamilyParams(Exception):
    """Raised when parallelogram-family parameters violate their constraints."""


@dataclass(frozen=True)
class Direction:
    """Unit direction on the circle, stored by its angle in radians."""

    theta: float

    @property
    def u(self):
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    @property
    def perp(self):
        """Unit vector obtained by rotating u by +90 degrees."""
        return np.array([-math.sin(self.theta), math.cos(self.theta)])

    def antipode(self):
        return Direction((self.theta + math.pi) % (2.0 * math.pi))

    @staticmethod
    def from_vector(v):
        return Direction(math.atan2(v[1], v[0]))


@dataclass(frozen=True)
class Segment:
    """Segment [p, q] in the plane, used as a zonogon generator."""

    p: tuple
    q: tuple

    def __post_init__(self):
        if np.allclose(self.p, self.q):
            raise ValueError("segment endpoints coincide")

    @property
    def half_vector(self):
        return 0.5 * (np.asarray(self.q, dtype=float) - np.asarray(self.p, dtype=float))

    @property
    def midpoint(self):
        return 0.5 * (np.asarray(self.q, dtype=float) + np.asarray(self.p, dtype=float))

    def scaled(self, factor):
        return Segment(tuple(factor * np.asarray(self.p, dtype=float)),
                       tuple(factor * np.asarray(self.q, dtype=float)))


def _canonicalize_vertices(vertices):
    """CCW orientation, collinear vertices removed, start at lexicographic minimum."""
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
        raise ValueError("polygon needs at least 3 planar vertices")
    if _shoelace(v) < 0:
        v = v[::-1]
    # drop duplicates and collinear vertices until stable
    changed = True
    while changed:
        if v.shape[0] < 3:
            raise ValueError("polygon degenerates after collinear removal")
        prev = v[np.arange(v.shape[0]) - 1]
        nxt = np.roll(v, -1, axis=0)
        e1 = v - prev
        e2 = nxt - v
        cross = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        scale = np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1)
        keep = cross > COLLINEAR_TOL * np.maximum(scale, 1e-300)
        changed = not keep.all()
        v = v[keep]
    if v.shape[0] < 3 or _shoelace(v) <= 0:
        raise ValueError("vertices do not form a convex polygon with positive area")
    start = np.lexsort((v[:, 1], v[:, 0]))[0]
    return np.ascontiguousarray(np.roll(v, -start, axis=0))


def _shoelace(v):
    x, y = v[:, 0], v[:, 1]
    return 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)


class Polygon:
    """Convex polygon with counterclockwise vertices, canonical and immutable."""

    __slots__ = ("vertices", "_hash")

    def __init__(self, vertices):
        v = _canonicalize_vertices(vertices)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "_hash", hash(v.tobytes()))

    def __setattr__(self, *args):
        raise AttributeError("Polygon is immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Polygon) and self.vertices.tobytes() == other.vertices.tobytes()

    def __repr__(self):
        return f"Polygon({self.vertices.shape[0]} vertices)"


@dataclass(frozen=True)
class SupportBody:
    """Body given by a truncated Fourier series support function h(theta).

    h(theta) = a0 + sum_k (a_k cos k theta + b_k sin k theta), k <= KMAX,
    with the C2+ condition rho = h + h'' > 0 checked on a dense grid.
    The optional center translates the body.
    """

    a0: float
    coeffs: tuple = ()
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if len(self.coeffs) > KMAX:
            raise NotC2Plus(f"at most {KMAX} harmonics supported")
        object.__setattr__(self, "coeffs", tuple((float(a), float(b)) for a, b in self.coeffs))
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        theta = np.linspace(0.0, 2.0 * math.pi, C2PLUS_GRID, endpoint=False)
        h = self.h(theta)
        rho = self.rho(theta)
        if rho.min() <= C2PLUS_MARGIN:
            raise NotC2Plus(f"min(h + h'') = {rho.min():.3e} <= {C2PLUS_MARGIN}")
        if h.min() <= 0.0:
            raise NotC2Plus("support function must be positive (origin inside body)")

    def _series(self, theta, weight):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for k, (a, b) in enumerate(self.coeffs, start=1):
            w = weight(k)
            out = out + w * (a * np.cos(k * theta) + b * np.sin(k * theta))
        return out

    def h(self, theta):
        """Support function of the untranslated shape."""
        return self.a0 + self._series(theta, lambda k: 1.0)

    def h1(self, theta):
        """First derivative h'(theta)."""
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for k, (a, b) in enumerate(self.coeffs, start=1):
            out = out + k * (-a * np.sin(k * theta) + b * np.cos(k * theta))
        return out

    def rho(self, theta):
        """Radius of curvature rho = h + h'' (spectral form)."""
        return self.a0 + self._series(theta, lambda k: 1.0 - k * k)

    def boundary(self, theta):
        """Boundary point with outer normal angle theta, shape (..., 2)."""
        theta = np.asarray(theta, dtype=float)
        h = self.h(theta)
        h1 = self.h1(theta)
        x = h * np.cos(theta) - h1 * np.sin(theta) + self.center[0]
        y = h * np.sin(theta) + h1 * np.cos(theta) + self.center[1]
        return np.stack([x, y], axis=-1)


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("disk radius must be positive")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))


# A Body is any of the three variants below.
Body = (Polygon, SupportBody, Disk)


def area(body):
    """Exact area of the body."""
    if isinstance(body, Polygon):
        return float(_shoelace(body.vertices))
    if isinstance(body, Disk):
        return math.pi * body.radius ** 2
    if isinstance(body, SupportBody):
        # area = (1/2) int (h^2 - h'^2) dtheta, closed form for the series
        s = 2.0 * math.pi * body.a0 ** 2
        for k, (a, b) in enumerate(body.coeffs, start=1):
            s += math.pi * (1.0 - k * k) * (a * a + b * b)
        return 0.5 * s
    raise TypeError(f"not a body: {body!r}")


def support(body, u: Direction):
    """Support function h_K(u) = max over K of <u, y>."""
    uv = u.u
    if isinstance(body, Polygon):
        return float(np.max(body.vertices @ uv))
    if isinstance(body, Disk):
        return float(np.dot(body.center, uv)) + body.radius
    if isinstance(body, SupportBody):
        return float(body.h(u.theta)) + float(np.dot(body.center, uv))
    raise TypeError(f"not a body: {body!r}")


def width(body, u: Direction):
    """Width function w_K(u) = h_K(u) + h_K(-u)."""
    return support(body, u) + support(body, u.antipode())


def boundary_point(body, u: Direction):
    """Point of the boundary with outer normal u (inverse Gauss map)."""
    if isinstance(body, Disk):
        return np.asarray(body.center) + body.radius * u.u
    if isinstance(body, SupportBody):
        return body.boundary(u.theta)
    if isinstance(body, Polygon):
        v = body.vertices
        edges = np.roll(v, -1, axis=0) - v
        normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1)
        normals /= np.linalg.norm(normals, axis=1)[:, None]
        hit = np.nonzero(normals @ u.u > 1.0 - 1e-12)[0]
        if hit.size == 0:
            raise PolygonNotSmooth(f"direction theta={u.theta} is not an edge normal")
        i = hit[0]
        return 0.5 * (v[i] + v[(i + 1) % v.shape[0]])
    raise TypeError(f"not a body: {body!r}")


def curvature(body, u: Direction):
    """Gauss curvature tau_K(u) = 1/(h + h'') at the boundary point with normal u."""
    if isinstance(body, Disk):
        return 1.0 / body.radius
    if isinstance(body, SupportBody):
        return 1.0 / float(body.rho(u.theta))
    raise PolygonNotSmooth("curvature is undefined on a polygon")


def translate(body, x):
    """The body translated by the vector x."""
    x = np.asarray(x, dtype=float)
    if isinstance(body, Polygon):
        return Polygon(body.vertices + x)
    if isinstance(body, Disk):
        return Disk((body.center[0] + x[0], body.center[1] + x[1]), body.radius)
    if isinstance(body, SupportBody):
        return SupportBody(body.a0, body.coeffs, (body.center[0] + x[0], body.center[1] + x[1]))
    raise TypeError(f"not a body: {body!r}")


def reflect(body):
    """Reflection of the body in the origin, K -> -K."""
    if isinstance(body, Polygon):
        return Polygon(-body.vertices)
    if isinstance(body, Disk):
        return Disk((-body.center[0], -body.center[1]), body.radius)
    if isinstance(body, SupportBody):
        # h_{-K}(theta) = h_K(theta + pi): harmonic k picks up (-1)^k
        coeffs = tuple(((-1.0) ** k * a, (-1.0) ** k * b)
                       for k, (a, b) in enumerate(body.coeffs, start=1))
        return SupportBody(body.a0, coeffs, (-body.center[0], -body.center[1]))
    raise TypeError(f"not a body: {body!r}")


def transform(body, op, vec=None):
    """Apply op in {"translate", "reflect"} to the body."""
    if op == "translate":
        return translate(body, vec)
    if op == "reflect":
        return reflect(body)
    raise ValueError(f"unknown transform {op!r}")


def convex_hull(points):
    """Convex hull vertices (CCW) of a point cloud, by monotone chain."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if pts.shape[0] < 3:
        raise ValueError("need at least 3 distinct points")
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                o, a = out[-2], out[-1]
                if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) <= 0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def zonogon(center, generators):
    """Minkowski sum of segment generators, returned as a convex Polygon.

    Parallel generators are merged; fewer than two distinct directions
    raises DegenerateZonogon.
    """
    if not generators:
        raise DegenerateZonogon("no generators")
    c = np.asarray(center, dtype=float)
    halves = []
    for seg in generators:
        s = seg.half_vector
        c = c + seg.midpoint
        ang = math.atan2(s[1], s[0])
        if ang < 0 or ang >= math.pi - 1e-15:
            s = -s
            ang = math.atan2(s[1], s[0])
        halves.append((ang, s))
    halves.sort(key=lambda t: t[0])
    merged = []
    for ang, s in halves:
        if merged and abs(ang - merged[-1][0]) < 1e-12:
            merged[-1] = (merged[-1][0], merged[-1][1] + s)
        else:
            merged.append((ang, s))
    merged = [(a, s) for a, s in merged if np.linalg.norm(s) > 1e-15]
    if len(merged) < 2:
        raise DegenerateZonogon("all generators are parallel")
    svecs = [s for _, s in merged]
    start = c - np.sum(svecs, axis=0)
    chain = [start]
    for s in svecs:
        chain.append(chain[-1] + 2.0 * s)
    lower = np.array(chain[:-1])
    upper = 2.0 * c - lower
    return Polygon(np.vstack([lower, upper]))


def zonogon_area_from_generators(generators):
    """Area of the zonogon as 4 * sum_{i<j} |det(s_i, s_j)| over half-vectors."""
    halves = [seg.half_vector for seg in generators]
    total = 0.0
    for i in range(len(halves)):
        for j in range(i + 1, len(halves)):
            total += abs(halves[i][0] * halves[j][1] - halves[i][1] * halves[j][0])
    return 4.0 * total


_SQ2 = math.sqrt(2.0)
_I1 = Segment((-1.0, 0.0), (1.0, 0.0))
_I2 = Segment((-1.0 / _SQ2, -1.0 / _SQ2), (1.0 / _SQ2, 1.0 / _SQ2))
_I3 = Segment((0.0, -1.0), (0.0, 1.0))
_I4 = Segment((1.0 / _SQ2, -1.0 / _SQ2), (-1.0 / _SQ2, 1.0 / _SQ2))


def _I5(m):
    r = math.sqrt(1.0 + m * m)
    return Segment((-m / r, -1.0 / r), (m / r, 1.0 / r))


def example_pair(family, alpha=1.0, beta=1.0, gamma=1.0, delta=1.0,
                 alpha_p=1.0, beta_p=1.0, gamma_p=2.0, delta_p=1.0,
                 m=0.0, y=(0.0, 0.0), y_p=(0.0, 0.0)):
    """One of the four parallelogram pairs (H_i, K_i) with matching cross-covariograms.

    Families 1 and 2 share g_{H,K}; so do families 3 and 4.
    """
    o = (0.0, 0.0)
    if family in (1, 2):
        if min(alpha, beta, gamma, delta) <= 0:
            raise InvalidFamilyParams("alpha, beta, gamma, delta must be positive")
        if family == 1:
            h = zonogon(o, [_I1.scaled(alpha), _I2.scaled(beta)])
            k = zonogon(y, [_I3.scaled(gamma), _I4.scaled(delta)])
        else:
            h = zonogon(o, [_I1.scaled(alpha), _I4.scaled(delta)])
            k = zonogon(y, [_I2.scaled(beta), _I3.scaled(gamma)])
        return h, k
    if family in (3, 4):
        if min(alpha_p, beta_p, gamma_p, delta_p) <= 0:
            raise InvalidFamilyParams("primed parameters must be positive")
        if m == 0.0 and not (alpha_p != gamma_p and beta_p != delta_p):
            raise InvalidFamilyParams("m = 0 requires alpha' != gamma' and beta' != delta'")
        if m != 0.0 and alpha_p == gamma_p:
            raise InvalidFamilyParams("m != 0 requires alpha' != gamma'")
        i5 = _I5(m)
        if family == 3:
            h = zonogon(o, [_I1.scaled(alpha_p), _I3.scaled(beta_p)])
            k = zonogon(y_p, [_I1.scaled(gamma_p), i5.scaled(delta_p)])
        else:
            h = zonogon(o, [_I1.scaled(gamma_p), _I3.scaled(beta_p)])
            k = zonogon(y_p, [_I1.scaled(alpha_p), i5.scaled(delta_p)])
        return h, k
    raise InvalidFamilyParams(f"family must be 1..4, got {family}")


def minkowski_sum_polygons(p, q):
    """Exact Minkowski sum of two convex polygons by CCW edge merging."""
    pv, qv = p.vertices, q.vertices

    def bottom(v):
        return int(np.lexsort((v[:, 0], v[:, 1]))[0])

    ip, iq = bottom(pv), bottom(qv)
    np_, nq = pv.shape[0], qv.shape[0]
    out = [pv[ip] + qv[iq]]
    cp = cq = 0
    while cp < np_ or cq < nq:
        ep = pv[(ip + 1) % np_] - pv[ip % np_] if cp < np_ else None
        eq = qv[(iq + 1) % nq] - qv[iq % nq] if cq < nq else None
        if eq is None:
            step = ep
            ip, cp = ip + 1, cp + 1
        elif ep is None:
            step = eq
            iq, cq = iq + 1, cq + 1
        else:
            cross = ep[0] * eq[1] - ep[1] * eq[0]
            if cross > 0:
                step = ep
                ip, cp = ip + 1, cp + 1
            elif cross < 0:
                step = eq
                iq, cq = iq + 1, cq + 1
            else:
                step = ep + eq
                ip, cp = ip + 1, cp + 1
                iq, cq = iq + 1, cq + 1
        out.append(out[-1] + step)
    return Polygon(np.array(out[:-1]))


def steiner_point(poly: Polygon):
    """Steiner point (1/pi) * integral of h(u) u over the circle, exact for polygons."""
    v = poly.vertices
    n = v.shape[0]
    edges = np.roll(v, -1, axis=0) - v
    phi = np.arctan2(-edges[:, 0], edges[:, 1])  # outer normal angles
    # unwrap to an increasing sequence over one turn
    phi_un = np.copy(phi)
    for i in range(1, n):
        while phi_un[i] < phi_un[i - 1]:
            phi_un[i] += 2.0 * math.pi
    total = np.zeros(2)
    for i in range(n):
        vert = v[(i + 1) % n]  # vertex between edge i and edge i+1 normals
        a = phi_un[i]
        b = phi_un[(i + 1) % n] if i + 1 < n else phi_un[0] + 2.0 * math.pi
        if b < a:
            b += 2.0 * math.pi
        cx = 0.5 * (b - a) + 0.25 * (math.sin(2 * b) - math.sin(2 * a))
        sx = -0.25 * (math.cos(2 * b) - math.cos(2 * a))
        sy = 0.5 * (b - a) - 0.25 * (math.sin(2 * b) - math.sin(2 * a))
        total[0] += vert[0] * cx + vert[1] * sx
        total[1] += vert[0] * sx + vert[1] * sy
    return total / math.pi


def polygonal_approximation(body, n=4096):
    """Inscribed n-gon with vertices on the boundary (identity for polygons)."""
    if isinstance(body, Polygon):
        return body
    theta = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    if isinstance(body, Disk):
        pts = np.asarray(body.center) + body.radius * np.stack(
            [np.cos(theta), np.sin(theta)], axis=1)
        return Polygon(pts)
    if isinstance(body, SupportBody):
        return Polygon(body.boundary(theta))
    raise TypeError(f"not a body: {body!r}")


def body_to_spec(body):
    """JSON-serializable specification dict for a body."""
    if isinstance(body, Polygon):
        return {"kind": "polygon", "vertices": body.vertices.tolist()}
    if isinstance(body, Disk):
        return {"kind": "disk", "center": list(body.center), "radius": body.radius}
    if isinstance(body, SupportBody):
        spec = {"kind": "support2d", "a0": body.a0, "coeffs": [list(c) for c in body.coeffs]}
        if body.center != (0.0, 0.0):
            spec["center"] = list(body.center)
        return spec
    raise TypeError(f"not a body: {body!r}")


_SPEC_KEYS = {
    "polygon": {"kind", "vertices"},
    "disk": {"kind", "center", "radius"},
    "support2d": {"kind", "a0", "coeffs", "center"},
    "zonogon": {"kind", "center", "generators"},
}


def body_from_spec(spec):
    """Body from a specification dict (see body_to_spec for the schema)."""
    kind = spec.get("kind")
    if kind not in _SPEC_KEYS:
        raise ValueError(f"unknown body kind {kind!r}")
    unknown = set(spec) - _SPEC_KEYS[kind]
    if unknown:
        raise ValueError(f"unknown keys for {kind!r} body: {sorted(unknown)}")
    if kind == "polygon":
        return Polygon(spec["vertices"])
    if kind == "disk":
        return Disk(tuple(spec["center"]), float(spec["radius"]))
    if kind == "support2d":
        return SupportBody(float(spec["a0"]),
                           tuple((float(a), float(b)) for a, b in spec.get("coeffs", [])),
                           tuple(spec.get("center", (0.0, 0.0))))
    gens = [Segment(tuple(p), tuple(q)) for p, q in spec["generators"]]
    return zonogon(tuple(spec.get("center", (0.0, 0.0))), gens)


def body_hash(body):
    """Stable hex digest identifying the body's specification."""
    blob = json.dumps(body_to_spec(body), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
