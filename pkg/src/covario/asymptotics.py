"""Experiment drivers: Kobayashi reports, zero-set unions, counterexamples, determination."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from covario._parallel import parallel_map
from covario._quadrature import gauss_legendre, panel_table
from covario.covariogram import CAP_PREFACTOR, FitFailed, cross_covariogram_grid
from covario.fourier_laplace import (
    autocorr_transform_table,
    build_context,
    kobayashi_center,
    track_zero,
)
from covario.geometry import (
    Direction,
    Polygon,
    area,
    body_hash,
    curvature,
    example_pair,
    reflect,
    steiner_point,
    width,
)


class UnmatchedZero(Exception):
    """Raised when a zero of the g-transform matches no tracked branch."""


class Inconclusive(Exception):
    """Raised when too many directions fail the curvature fit."""


@dataclass(frozen=True)
class KobayashiReport:
    """Deviations of tracked zero branches from their predicted centers."""

    body_id: str
    m_list: tuple
    thetas: tuple
    deviations: np.ndarray = field(repr=False)  # (n_m, n_u)
    im_error_per_m: np.ndarray = field(repr=False)
    re_error_per_m: np.ndarray = field(repr=False)
    decay_exponent: float
    decay_fit_residual: float
    flags: tuple = ()
    branches: tuple = field(default=(), repr=False)


def kobayashi_report(body, m_range, u_grid, order=64):
    """Track branches over (m, u), compare with predicted centers, fit the decay."""
    if isinstance(body, Polygon):
        return KobayashiReport(body_hash(body), (), (), np.zeros((0, 0)),
                               np.zeros(0), np.zeros(0), math.nan, math.nan,
                               flags=("non-C2plus-input",))
    m_list = list(m_range)
    u_list = list(u_grid)
    max_zeta = max(abs(kobayashi_center(body, max(m_list), u)) for u in u_list) + 10.0

    def per_direction(u):
        ctx = build_context(body, u, order=order, max_abs_zeta=max_zeta)
        return [track_zero(ctx, m) for m in m_list]

    columns = parallel_map(per_direction, u_list)
    dev = np.zeros((len(m_list), len(u_list)))
    im_err = np.zeros_like(dev)
    re_err = np.zeros_like(dev)
    for j, (u, col) in enumerate(zip(u_list, columns)):
        w = width(body, u)
        target = (math.log(curvature(body, u.antipode()))
                  - math.log(curvature(body, u)))
        for i, br in enumerate(col):
            dev[i, j] = br.deviation
            im_err[i, j] = abs(br.zeta.imag * 2.0 * w - target)
            re_err[i, j] = abs(br.zeta.real * 2.0 * w / math.pi - (4 * m_list[i] + 1))
    dev_m = dev.max(axis=1)
    if len(m_list) >= 2:
        logm = np.log(np.asarray(m_list, dtype=float))
        logd = np.log(np.maximum(dev_m, 1e-300))
        slope, intercept = np.polyfit(logm, logd, 1)
        resid = float(np.sqrt(np.mean((logd - slope * logm - intercept) ** 2)))
    else:
        slope, resid = math.nan, math.nan
    branches = tuple(br for col in columns for br in col)
    return KobayashiReport(body_hash(body), tuple(m_list),
                           tuple(u.theta for u in u_list), dev,
                           im_err.max(axis=1), re_err.max(axis=1),
                           float(slope), resid, branches=branches)


def _newton_multiple(fun, dfun, d2fun, start, max_iter=60, im_cap=None):
    """Newton on f/f', which has simple zeros at zeros of any multiplicity."""
    z = complex(start)
    if im_cap is None:
        im_cap = 10.0 * (1.0 + abs(z.imag))
    for _ in range(max_iter):
        f, df, d2f = fun(z), dfun(z), d2fun(z)
        denom = df * df - f * d2f
        if denom == 0:
            raise UnmatchedZero(f"degenerate Newton at {z}")
        step = f * df / denom
        while abs((z - step).imag) > im_cap and abs(step) > 1e-15:
            step *= 0.5
        z -= step
        if abs(step) <= 1e-12 * (1.0 + abs(z)):
            return z
    raise UnmatchedZero(f"no convergence from {start}")


@dataclass(frozen=True)
class ZeroUnionRow:
    m: int
    branch_zeta: complex
    located: tuple
    multiplicity: int
    residual: float


@dataclass(frozen=True)
class ZeroUnionReport:
    body_id: str
    theta: float
    rows: tuple
    match_tol: float
    residual_tol: float

    @property
    def passed(self):
        return all(r.multiplicity >= 1 for r in self.rows)


def zero_union_check(body, u: Direction, m_range, order=64,
                     match_tol=1e-6, residual_tol=1e-8):
    """Zeros of the g_K ray transform against the branch set {F_m, conj F_m}.

    The transform of g_K on the ray factors as flt(zeta) * conj(flt(conj zeta)),
    so its zero set is the union of the branch set and its conjugate; each
    located zero must match a member within match_tol.
    """
    m_list = list(m_range)
    max_zeta = abs(kobayashi_center(body, max(m_list), u)) + 10.0
    ctx = build_context(body, u, order=order, max_abs_zeta=max_zeta)
    nodes, weights, ac = autocorr_transform_table(body, u, max_zeta, order=order)
    wa = weights * ac

    def g_t(z):
        return complex(np.sum(wa * np.exp(1j * nodes * z)))

    def g_t1(z):
        return complex(np.sum(wa * 1j * nodes * np.exp(1j * nodes * z)))

    def g_t2(z):
        return complex(np.sum(wa * (1j * nodes) ** 2 * np.exp(1j * nodes * z)))

    sq_area = area(body) ** 2
    x_gl, w_gl = gauss_legendre(order)
    rows = []
    for m in m_list:
        branch = track_zero(ctx, m)
        f = branch.zeta
        targets = (f, f.conjugate())
        located = []
        for start in targets:
            z = _newton_multiple(g_t, g_t1, g_t2, start)
            if min(abs(z - t) for t in targets) > match_tol:
                raise UnmatchedZero(
                    f"g-transform zero {z} matches no branch at m={m}")
            if not any(abs(z - prev) < match_tol for prev in located):
                located.append(z)
        resid = abs(g_t(f))
        if resid > residual_tol * sq_area:
            raise UnmatchedZero(
                f"g-transform residual {resid:.3e} at branch m={m}")
        # multiplicity by argument principle on a rectangle containing f but
        # not its conjugate (unless they coincide)
        half_re = math.pi / (2.0 * ctx.body_width)
        half_im = 0.5 / ctx.body_width
        if abs(f.imag) >= 0.5 * half_im:
            half_im = 1.2 * abs(f.imag)
        corners = [f + complex(half_re, half_im), f + complex(-half_re, half_im),
                   f + complex(-half_re, -half_im), f + complex(half_re, -half_im)]
        pts = []
        for a, b in zip(corners, corners[1:] + corners[:1]):
            pts.append(np.array([a]))
            for k in range(4):
                lo = a + (b - a) * k / 4.0
                hi = a + (b - a) * (k + 1) / 4.0
                pts.append(lo + (hi - lo) * 0.5 * (x_gl + 1.0))
        pts.append(np.array([corners[0]]))
        zs = np.concatenate(pts)
        vals = np.exp(1j * np.outer(zs, nodes)) @ wa
        mult = int(round(float(np.sum(np.angle(vals[1:] / vals[:-1]))) / (2 * math.pi)))
        rows.append(ZeroUnionRow(m, f, tuple(located), mult, resid))
    return ZeroUnionReport(body_hash(body), u.theta, tuple(rows),
                           match_tol, residual_tol)


def _best_cyclic_distance(va, vb):
    if va.shape != vb.shape:
        return math.inf
    n = va.shape[0]
    return min(np.abs(np.roll(vb, k, axis=0) - va).max() for k in range(n))


def trivial_associates(pair_a, pair_b, tol=1e-9):
    """Whether (H,K) and (H',K') coincide after a common translation, possibly
    combined with the swap (H,K) -> (-K,-H)."""
    h1, k1 = pair_a
    h2, k2 = pair_b
    # same-order form: (H,K) = (H'+x, K'+x)
    x = steiner_point(h1) - steiner_point(h2)
    if (_best_cyclic_distance(h1.vertices, h2.vertices + x) <= tol
            and _best_cyclic_distance(k1.vertices, k2.vertices + x) <= tol):
        return True
    # swapped form: (H,K) = (-K'+x, -H'+x)
    mk2, mh2 = reflect(k2), reflect(h2)
    x = steiner_point(h1) - steiner_point(mk2)
    if (_best_cyclic_distance(h1.vertices, mk2.vertices + x) <= tol
            and _best_cyclic_distance(k1.vertices, mh2.vertices + x) <= tol):
        return True
    return False


@dataclass(frozen=True)
class CounterexampleReport:
    family: int
    max_deviation: float
    tolerance: float
    trivial: bool
    grid_shape: tuple

    @property
    def passed(self):
        return self.max_deviation <= self.tolerance and not self.trivial


def crosscov_counterexample(family, params=None, grid=(41, 41), tol=1e-9):
    """Grid equality of the two cross-covariograms of a parallelogram family,
    plus the check that the pairs are not trivial associates."""
    if family not in (1, 3):
        raise ValueError("family must be 1 or 3 (compared against family+1)")
    params = dict(params or {})
    h1, k1 = example_pair(family, **params)
    h2, k2 = example_pair(family + 1, **params)
    g1 = cross_covariogram_grid(h1, k1, nx=grid[0], ny=grid[1])
    bbox = ((g1.origin[0], g1.origin[0] + g1.spacing[0] * (g1.nx - 1)),
            (g1.origin[1], g1.origin[1] + g1.spacing[1] * (g1.ny - 1)))
    g2 = cross_covariogram_grid(h2, k2, nx=grid[0], ny=grid[1], bbox=bbox)
    dev = float(np.abs(g1.values - g2.values).max())
    triv = trivial_associates((h1, k1), (h2, k2), tol=1e-9)
    return CounterexampleReport(family, dev, tol, triv, tuple(grid))


@dataclass(frozen=True)
class DeterminationConfig:
    n_dirs: int = 24
    extent_dirs: int = 128          # radial-table resolution for anchors/extents
    radial_tol: float = 5e-3        # relative support mismatch -> distinct
    pair_rel_tol: float = 0.15      # relative curvature-pair mismatch -> distinct
    ratio_threshold: float = 0.3    # min |ln(high/low)| for a sign region
    sign_m: int = 5
    depth_lo: float = 2e-3          # fit depths relative to the support scale
    depth_hi: float = 2e-2
    n_depth: int = 6
    n_offsets: int = 7
    disc_tol: float = 0.02
    fit_fail_frac: float = 0.05
    t_order: int = 24
    s_order: int = 16
    max_regions_checked: int = 4


@dataclass(frozen=True)
class DeterminationVerdict:
    outcome: str  # identical-up-to-translation | reflection-needed | distinct
    thetas: tuple
    pairs_a: tuple
    pairs_b: tuple
    region_relations: tuple
    details: dict


def _radial_extent(g, udir, hint=1.0):
    lo, hi = 0.0, None
    if hint > 0:
        a, b = 0.85 * hint, 1.18 * hint
        if g(a * udir) > 0:
            lo = a
            if g(b * udir) <= 0:
                hi = b
    if hi is None:
        hi = max(hint, 1e-6)
        if g(hi * udir) > 0:
            lo = hi
            for _ in range(60):
                hi *= 2.0
                if g(hi * udir) <= 0:
                    break
                lo = hi
            else:
                raise Inconclusive("covariogram support appears unbounded")
    while hi - lo > 1e-7 * max(hi, 1.0):
        mid = 0.5 * (lo + hi)
        if g(mid * udir) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _radial_table(g, thetas):
    out = []
    hint = 1.0
    for th in thetas:
        r = _radial_extent(g, np.array([math.cos(th), math.sin(th)]), hint)
        hint = r
        out.append(r)
    return np.asarray(out)


def _support_from_radial(radial, thetas, u):
    """Support value and boundary anchor of supp g in direction u, by parabola
    refinement of the radial polygon."""
    pts = radial[:, None] * np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    vals = pts @ u
    j = int(np.argmax(vals))
    n = len(thetas)
    jm, jp = (j - 1) % n, (j + 1) % n
    ym, y0, yp = vals[jm], vals[j], vals[jp]
    denom = ym - 2.0 * y0 + yp
    delta = 0.0 if denom == 0 else 0.5 * (ym - yp) / denom
    delta = float(np.clip(delta, -1.0, 1.0))
    # quadratic interpolation of the boundary curve at fractional index j + delta
    anchor = (pts[j] + 0.5 * delta * (pts[jp] - pts[jm])
              + 0.5 * delta * delta * (pts[jp] - 2.0 * pts[j] + pts[jm]))
    h = y0 - 0.25 * (ym - yp) * delta
    return float(h), anchor


def _blackbox_pair(g, radial, thetas, u: Direction, cfg: DeterminationConfig):
    """Curvature pair from a black-box covariogram by a linear cap-model fit.

    Around a boundary anchor of supp g, g^{2/3} is linear in {1, t, q, q^2};
    the t-coefficient gives D = tau(u) + tau(-u) and the q^2/t ratio gives Q.
    """
    uv, tan = u.u, u.perp
    h, anchor = _support_from_radial(radial, thetas, uv)
    depths = h * np.geomspace(cfg.depth_lo, cfg.depth_hi, cfg.n_depth)
    g0 = np.array([g(anchor - t * uv) for t in depths])
    if np.any(g0 <= 0):
        raise FitFailed("empty cap on the depth ladder")
    design = np.stack([np.ones_like(depths), 2.0 * depths], axis=1)
    (_, slope), *_ = np.linalg.lstsq(design, g0 ** (2.0 / 3.0), rcond=None)
    if slope <= 0:
        raise FitFailed("non-positive depth slope")
    d0 = (CAP_PREFACTOR ** (2.0 / 3.0) / slope) ** 3
    t_star = depths[-1]
    q_max = 0.7 * math.sqrt(4.0 * t_star / d0)
    qs = np.linspace(-q_max, q_max, cfg.n_offsets)
    pts, ys = [], []
    for t in (0.5 * t_star, t_star):
        for q in qs:
            val = g(anchor + q * tan - t * uv)
            if val > 0:
                pts.append((t, q))
                ys.append(val ** (2.0 / 3.0))
    if len(ys) < 8:
        raise FitFailed("stencil mostly outside the cap")
    tarr = np.array([p[0] for p in pts])
    qarr = np.array([p[1] for p in pts])
    basis = np.stack([np.ones_like(tarr), 2.0 * tarr, qarr, qarr * qarr], axis=1)
    coef, *_ = np.linalg.lstsq(basis, np.array(ys), rcond=None)
    alpha, beta_q2 = coef[1], coef[3]
    if alpha <= 0:
        raise FitFailed("non-positive fitted depth coefficient")
    d_sum = (CAP_PREFACTOR ** (2.0 / 3.0) / alpha) ** 3
    q_curv = -beta_q2 / alpha
    disc = d_sum * d_sum - 4.0 * q_curv * d_sum
    if disc < -0.25 * d_sum * d_sum:
        raise FitFailed("strongly negative discriminant")
    if abs(disc) <= cfg.disc_tol * d_sum * d_sum:
        disc = 0.0
    disc = max(disc, 0.0)
    root = math.sqrt(disc)
    low, high = 0.5 * (d_sum - root), 0.5 * (d_sum + root)
    if low <= 0:
        raise FitFailed("non-positive curvature root")
    return low, high


def _segment_extent(radial, thetas, u, t):
    """Tangential extent of supp g on the line <x, u> = t, from the radial polygon."""
    pts = radial[:, None] * np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    d = pts @ u
    s = pts @ np.array([-u[1], u[0]])
    n = len(thetas)
    svals = []
    for i in range(n):
        j = (i + 1) % n
        a, b = d[i] - t, d[j] - t
        if a == 0.0:
            svals.append(s[i])
        if (a < 0 < b) or (b < 0 < a):
            w = a / (a - b)
            svals.append(s[i] + w * (s[j] - s[i]))
    if not svals:
        return None
    pad = 0.02 * (max(svals) - min(svals) + 1e-9)
    return min(svals) - pad, max(svals) + pad


def _line_integral(g, uv, perp, t, extent, order):
    """integral of g along <x, u> = t, with panels split at the origin kink."""
    smin, smax = extent
    cuts = sorted({smin, smax} | {s for s in (-2.0 * abs(t), 0.0, 2.0 * abs(t))
                                  if smin < s < smax})
    x_gl, w_gl = gauss_legendre(order)
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        pts = t * uv[None, :] + (mid + half * x_gl)[:, None] * perp[None, :]
        gv = np.array([g(p) for p in pts])
        total += half * float(np.sum(w_gl * gv))
    return total


def _gtransform_im(g, radial, thetas, u: Direction, w_u, im_guess, cfg):
    """Imaginary part of the g-transform zero near branch sign_m along u.

    R_g(u, t) is even in t, so the transform is assembled as a cosine sum over
    the half-line table.
    """
    uv = u.u
    perp = u.perp
    zeta_c = math.pi * (4 * cfg.sign_m + 1) / (2.0 * w_u)
    t_nodes, t_weights = panel_table(0.0, w_u, [], order=cfg.t_order,
                                     max_freq=zeta_c + 2.0, osc_budget=30.0)
    r_vals = np.zeros_like(t_nodes)
    for i, t in enumerate(t_nodes):
        ext = _segment_extent(radial, thetas, uv, t)
        if ext is not None:
            r_vals[i] = _line_integral(g, uv, perp, t, ext, cfg.s_order)
    wa = t_weights * r_vals

    def gt(z):
        return 2.0 * complex(np.sum(wa * np.cos(t_nodes * z)))

    def gt1(z):
        return -2.0 * complex(np.sum(wa * t_nodes * np.sin(t_nodes * z)))

    def gt2(z):
        return -2.0 * complex(np.sum(wa * t_nodes ** 2 * np.cos(t_nodes * z)))

    cap = 3.0 * (abs(im_guess) + 1.0 / w_u)
    z = _newton_multiple(gt, gt1, gt2, complex(zeta_c, im_guess), im_cap=cap)
    return z.imag


def _contiguous_regions(mask):
    """Maximal runs of True in a circular mask, as index tuples."""
    n = len(mask)
    if not np.any(mask):
        return []
    if np.all(mask):
        return [tuple(range(n))]
    regions = []
    i = 0
    while i < n:
        if mask[i] and not mask[(i - 1) % n]:
            run = []
            j = i
            while mask[j % n]:
                run.append(j % n)
                j += 1
            regions.append(tuple(run))
            i = j
        else:
            i += 1
    return regions


def determination_experiment(g_a, g_b, u_grid=None, config=None):
    """Re-enact the uniqueness pipeline on two black-box covariogram evaluators.

    Recovers the support and the per-direction curvature pairs from each
    evaluator, then compares the sign structure of the g-transform zero
    branches region by region, requiring a single global relation.  Since the
    covariogram itself is invariant under reflection of the body, pointwise
    equal inputs always resolve to identical-up-to-translation.
    """
    cfg = config or DeterminationConfig()
    if u_grid is None:
        thetas = np.linspace(0.0, 2.0 * math.pi, cfg.n_dirs, endpoint=False)
    else:
        thetas = np.asarray([u.theta for u in u_grid])
    fine = np.linspace(0.0, 2.0 * math.pi, cfg.extent_dirs, endpoint=False)
    rad_a = _radial_table(g_a, fine)
    rad_b = _radial_table(g_b, fine)
    scale = max(rad_a.max(), rad_b.max())
    details = {"radial_max_dev": float(np.abs(rad_a - rad_b).max() / scale)}
    if details["radial_max_dev"] > cfg.radial_tol:
        return DeterminationVerdict("distinct", tuple(thetas), (), (), (),
                                    {**details, "reason": "support mismatch"})
    pairs_a, pairs_b = [], []
    failures = 0
    for th in thetas:
        u = Direction(float(th))
        try:
            pairs_a.append(_blackbox_pair(g_a, rad_a, fine, u, cfg))
            pairs_b.append(_blackbox_pair(g_b, rad_b, fine, u, cfg))
        except FitFailed:
            failures += 1
            pairs_a.append(None)
            pairs_b.append(None)
    if failures > cfg.fit_fail_frac * len(thetas):
        raise Inconclusive(f"curvature fit failed on {failures}/{len(thetas)} directions")
    pair_dev = 0.0
    ratios = np.zeros(len(thetas))
    for i, (pa, pb) in enumerate(zip(pairs_a, pairs_b)):
        if pa is None or pb is None:
            continue
        pair_dev = max(pair_dev,
                       abs(pa[0] - pb[0]) / pb[0], abs(pa[1] - pb[1]) / pb[1])
        ratios[i] = math.log(pa[1] / pa[0])
    details["pair_max_dev"] = float(pair_dev)
    if pair_dev > cfg.pair_rel_tol:
        return DeterminationVerdict("distinct", tuple(thetas), tuple(pairs_a),
                                    tuple(pairs_b), (),
                                    {**details, "reason": "curvature pairs mismatch"})
    regions = _contiguous_regions(ratios > cfg.ratio_threshold)
    regions = regions[: cfg.max_regions_checked]
    relations = []
    for run in regions:
        rep = run[len(run) // 2]
        u = Direction(float(thetas[rep]))
        w_a, _ = _support_from_radial(rad_a, fine, u.u)
        w_b, _ = _support_from_radial(rad_b, fine, u.u)
        guess = ratios[rep] / (2.0 * w_a)
        im_a = _gtransform_im(g_a, rad_a, fine, u, w_a, guess, cfg)
        im_b = _gtransform_im(g_b, rad_b, fine, u, w_b, guess, cfg)
        if abs(im_a) < 1e-3 or abs(im_b) < 1e-3:
            continue
        relations.append(1 if (im_a > 0) == (im_b > 0) else -1)
    details["regions_checked"] = len(relations)
    if relations and all(r == -1 for r in relations):
        outcome = "reflection-needed"
    elif any(r == -1 for r in relations):
        raise Inconclusive("mixed sign assignment across regions")
    else:
        outcome = "identical-up-to-translation"
    return DeterminationVerdict(outcome, tuple(thetas), tuple(pairs_a),
                                tuple(pairs_b), tuple(relations), details)
