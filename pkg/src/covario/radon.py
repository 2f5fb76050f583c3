"""Chord-length (Radon) transform of planar convex bodies and its autocorrelation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from covario._quadrature import panel_table
from covario.geometry import Direction, Disk, Polygon, SupportBody, curvature


@dataclass(frozen=True)
class ChordFunction:
    """Evaluator t -> S_K(u, t) = length of the chord at signed offset t along u."""

    direction: Direction
    lo: float
    hi: float
    method: str
    _eval: callable = field(repr=False)
    breakpoints: tuple = ()

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        out = self._eval(np.atleast_1d(t))
        return float(out[0]) if scalar else out

    @property
    def width(self):
        return self.hi - self.lo


def _polygon_chord_at(vertices, u, perp, t):
    """Exact chord length of a convex polygon at one offset."""
    p = vertices @ u
    s = vertices @ perp
    n = p.shape[0]
    svals = []
    for i in range(n):
        j = (i + 1) % n
        a, b = p[i] - t, p[j] - t
        if a == 0.0:
            svals.append(s[i])
        if (a < 0.0 < b) or (b < 0.0 < a):
            w = a / (a - b)
            svals.append(s[i] + w * (s[j] - s[i]))
    if not svals:
        return 0.0
    return max(svals) - min(svals)


def _polygon_profile(body, u: Direction):
    uv, perp = u.u, u.perp
    proj = body.vertices @ uv
    knots = np.unique(proj)
    vals = np.array([_polygon_chord_at(body.vertices, uv, perp, t) for t in knots])
    return knots, vals


@lru_cache(maxsize=256)
def chord_function(body, u: Direction):
    """ChordFunction for the body in direction u (exact for polygons)."""
    if isinstance(body, Polygon):
        knots, vals = _polygon_profile(body, u)
        lo, hi = float(knots[0]), float(knots[-1])

        def ev(t):
            return np.interp(t, knots, vals, left=0.0, right=0.0)

        return ChordFunction(u, lo, hi, "polygon-exact", ev, tuple(knots[1:-1]))
    if isinstance(body, Disk):
        c = float(np.dot(body.center, u.u))
        r = body.radius

        def ev(t):
            return 2.0 * np.sqrt(np.clip(r * r - (t - c) ** 2, 0.0, None))

        return ChordFunction(u, c - r, c + r, "disk-closed-form", ev)
    if isinstance(body, SupportBody):
        return _support_chord_function(body, u)
    raise TypeError(f"not a body: {body!r}")


def _support_chord_function(body, u: Direction):
    th = u.theta
    shift = body.center[0] * math.cos(th) + body.center[1] * math.sin(th)
    hu = float(body.h(th))
    hmu = float(body.h(th + math.pi))
    lo, hi = -hmu + shift, hu + shift

    def height(phi):
        # signed offset <x(phi), u> of the untranslated boundary point
        return body.h(phi) * np.cos(phi - th) - body.h1(phi) * np.sin(phi - th)

    def solve(t, left, right):
        # height is strictly monotone on [left, right]; vectorized bisection
        a = np.full_like(t, left)
        b = np.full_like(t, right)
        fa = height(a) - t
        for _ in range(60):
            mid = 0.5 * (a + b)
            fm = height(mid) - t
            take = (fa * fm) <= 0
            b = np.where(take, mid, b)
            a = np.where(take, a, mid)
            fa = np.where(take, fa, fm)
        return 0.5 * (a + b)

    def ev(t):
        tt = np.clip(t - shift, -hmu, hu)
        # decreasing branch on [th, th+pi], increasing on [th-pi, th]
        phi1 = solve(tt, th, th + math.pi)
        phi2 = solve(tt, th - math.pi, th)
        s1 = body.h(phi1) * np.sin(phi1 - th) + body.h1(phi1) * np.cos(phi1 - th)
        s2 = body.h(phi2) * np.sin(phi2 - th) + body.h1(phi2) * np.cos(phi2 - th)
        out = np.where((t >= lo) & (t <= hi), np.maximum(s1 - s2, 0.0), 0.0)
        return out

    return ChordFunction(u, lo, hi, "support-rootfind", ev)


def radon(body, u: Direction, t):
    """S_K(u, t): length of the chord of the body on the line <x, u> = t."""
    return chord_function(body, u)(t)


def chord_autocorrelation_batch(body, u: Direction, s_values, order=64):
    """integral S(t) S(t + s) dt for every s in s_values."""
    cf = chord_function(body, u)
    s_values = np.asarray(s_values, dtype=float)
    nodes_all, weights_all, rows = [], [], []
    for i, s in enumerate(s_values):
        a = max(cf.lo, cf.lo - s)
        b = min(cf.hi, cf.hi - s)
        if b <= a:
            continue
        brk = list(cf.breakpoints)
        brk += [x - s for x in cf.breakpoints]
        brk += [cf.lo, cf.hi, cf.lo - s, cf.hi - s]
        nodes, weights = panel_table(a, b, brk, order=order)
        nodes_all.append(nodes)
        weights_all.append(weights)
        rows.append(np.full(nodes.shape[0], i))
    if not nodes_all:
        return np.zeros_like(s_values)
    nodes = np.concatenate(nodes_all)
    weights = np.concatenate(weights_all)
    rows = np.concatenate(rows)
    shifts = s_values[rows]
    integrand = weights * cf(nodes) * cf(nodes + shifts)
    return np.bincount(rows, weights=integrand, minlength=s_values.shape[0])


def chord_autocorrelation(body, u: Direction, s, order=64):
    """Autocorrelation of the chord function at shift s (Radon transform of g_K)."""
    return float(chord_autocorrelation_batch(body, u, [s], order=order)[0])


def leading_coefficients(body, u: Direction, n=2):
    """Leading square-root coefficients (a0, b0) of the chord function at its endpoints.

    a0 belongs to the lower endpoint -h(-u) and carries tau(-u); b0 to the
    upper endpoint h(u) with tau(u).
    """
    tau_u = curvature(body, u)
    tau_mu = curvature(body, u.antipode())
    pref = (2.0 * math.pi) ** ((n - 1) / 2.0) / math.gamma((n + 1) / 2.0)
    return pref / math.sqrt(tau_mu), pref / math.sqrt(tau_u)
