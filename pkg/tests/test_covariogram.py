import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from covario.covariogram import (
    FitFailed,
    clip_areas_batch,
    covariogram,
    covariogram_evaluator,
    covariogram_grid,
    cross_covariogram,
    cross_covariogram_grid,
    curvature_pair_from_covariogram,
    directional_derivative_origin,
    polygon_intersection_area,
    sum_reciprocal_curvatures_from_width,
    support_of_crosscov,
)
from covario.geometry import (
    Direction,
    Disk,
    Polygon,
    Segment,
    SupportBody,
    area,
    convex_hull,
    curvature,
    example_pair,
    reflect,
    translate,
    width,
    zonogon,
)
from covario.oracles import mc_area

E1 = Direction(0.0)
LENS_AT_1 = 2.0 * math.acos(0.5) - 0.5 * math.sqrt(3.0)


def test_intersection_area_examples(unit_square):
    assert abs(polygon_intersection_area(unit_square, unit_square) - 1.0) < 1e-14
    shifted = translate(unit_square, (0.5, 0.0))
    assert abs(polygon_intersection_area(unit_square, shifted) - 0.5) < 1e-14
    far = translate(unit_square, (5.0, 0.0))
    assert polygon_intersection_area(unit_square, far) == 0.0


def test_intersection_area_monte_carlo_oracle():
    tri = Polygon([(0, 0), (1, 0), (0, 1)])
    moved = translate(tri, (0.2, 0.2))
    exact = polygon_intersection_area(tri, moved)

    def member(pts):
        def inside(p, verts):
            v = verts
            nxt = np.roll(v, -1, axis=0)
            edge = nxt - v
            rel = p[:, None, :] - v[None, :, :]
            cross = edge[None, :, 0] * rel[:, :, 1] - edge[None, :, 1] * rel[:, :, 0]
            return np.all(cross >= -1e-12, axis=1)

        return inside(pts, tri.vertices) & inside(pts, moved.vertices)

    est = mc_area(member, [(0, 1.3), (0, 1.3)], 1_000_000, seed=9)
    assert abs(exact - est.mean) < 3.0 * est.standard_error


def test_covariogram_square_product_formula(unit_square):
    assert abs(covariogram(unit_square, (0.5, 0.5)) - 0.25) < 1e-14
    rng = np.random.default_rng(2)
    for _ in range(40):
        x = rng.uniform(-0.999, 0.999, 2)
        expected = (1 - abs(x[0])) * (1 - abs(x[1]))
        assert abs(covariogram(unit_square, x) - expected) < 1e-12


def test_covariogram_disk_lens(unit_disk):
    g = covariogram(unit_disk, (1.0, 0.0))
    assert abs(g - LENS_AT_1) < 2e-6  # polygonal approximation error O(N^-2)
    assert abs(covariogram(unit_disk, (0.0, 0.0)) - math.pi) < 1e-5


def test_covariogram_at_origin_is_area(unit_square, cw3):
    assert abs(covariogram(unit_square, (0.0, 0.0)) - 1.0) < 1e-14
    assert abs(covariogram(cw3, (0.0, 0.0)) - area(cw3)) < 1e-5


def test_cross_covariogram_examples(unit_square):
    assert abs(cross_covariogram(unit_square, unit_square, (0.0, 0.0)) - 1.0) < 1e-14
    assert cross_covariogram(unit_square, unit_square, (9.0, 0.0)) == 0.0
    h1, k1 = example_pair(1, alpha=1, beta=1, gamma=1, delta=1)
    h2, k2 = example_pair(2, alpha=1, beta=1, gamma=1, delta=1)
    x = (0.3, 0.1)
    assert abs(cross_covariogram(h1, k1, x) - cross_covariogram(h2, k2, x)) < 1e-12


def test_batched_clipper_matches_scalar(make_polygon):
    rng = np.random.default_rng(3)
    p = make_polygon(rng, 7)
    q = make_polygon(rng, 5)
    xs = rng.uniform(-2.5, 2.5, (64, 2))
    batch = clip_areas_batch(p.vertices, q.vertices, xs)
    scalar = np.array([cross_covariogram(p, q, x) for x in xs])
    assert np.abs(batch - scalar).max() < 1e-12


def test_dense_fan_matches_small_clipper(unit_disk):
    # same polygon fed through both kernels
    from covario.geometry import polygonal_approximation
    poly = polygonal_approximation(unit_disk, 256)
    small = Polygon(poly.vertices[::8])  # 32-gon: small-polygon path
    rng = np.random.default_rng(4)
    for _ in range(10):
        x = rng.uniform(-1.5, 1.5, 2)
        a = polygon_intersection_area(small, translate(small, x))
        b = covariogram(small, x)
        assert abs(a - b) < 1e-12


@settings(deadline=None, max_examples=25)
@given(st.integers(0, 10 ** 9))
def test_evenness_random_polygons(seed):
    rng = np.random.default_rng(seed)
    poly = Polygon(convex_hull(rng.uniform(-1.5, 1.5, (8, 2))))
    for _ in range(4):
        x = rng.uniform(-2, 2, 2)
        assert abs(covariogram(poly, x) - covariogram(poly, -x)) < 1e-12


@settings(deadline=None, max_examples=25)
@given(st.integers(0, 10 ** 9))
def test_translation_reflection_invariance(seed):
    rng = np.random.default_rng(seed)
    poly = Polygon(convex_hull(rng.uniform(-1.5, 1.5, (7, 2))))
    shift = rng.uniform(-2, 2, 2)
    x = rng.uniform(-1.5, 1.5, 2)
    g0 = covariogram(poly, x)
    assert abs(covariogram(translate(poly, shift), x) - g0) < 1e-12
    assert abs(covariogram(reflect(poly), x) - g0) < 1e-12


@settings(deadline=None, max_examples=20)
@given(st.integers(0, 10 ** 9))
def test_cross_trivial_associate_invariance(seed):
    rng = np.random.default_rng(seed)
    h = Polygon(convex_hull(rng.uniform(-1.5, 1.5, (7, 2))))
    k = Polygon(convex_hull(rng.uniform(-1.5, 1.5, (6, 2))))
    x = rng.uniform(-2, 2, 2)
    assert abs(cross_covariogram(h, k, x)
               - cross_covariogram(reflect(k), reflect(h), x)) < 1e-12


def test_ray_monotonicity(make_polygon):
    rng = np.random.default_rng(6)
    poly = make_polygon(rng)
    for th in rng.uniform(0, 2 * math.pi, 8):
        v = np.array([math.cos(th), math.sin(th)])
        vals = [covariogram(poly, t * v) for t in np.linspace(0, 3.5, 50)]
        assert all(b <= a + 1e-12 for a, b in zip(vals[:-1], vals[1:]))


def test_support_of_crosscov_examples(unit_square):
    rep = support_of_crosscov(unit_square, unit_square)
    assert abs(width(rep.body, E1) - 2.0) < 1e-12
    assert np.allclose(sorted(map(tuple, rep.body.vertices)),
                       [(-1, -1), (-1, 1), (1, -1), (1, 1)])
    disks = support_of_crosscov(Disk((0, 0), 1.0), Disk((0, 0), 2.0))
    assert abs(width(disks.body, Direction(0.9)) - 6.0) < 1e-4


def test_support_of_crosscov_zonogon_generators():
    # the support of the family-1 cross covariogram is the zonogon on all four
    # generators, for both pairings
    params = dict(alpha=1.1, beta=0.8, gamma=1.3, delta=0.6)
    h1, k1 = example_pair(1, **params)
    h2, k2 = example_pair(2, **params)
    sq2 = math.sqrt(2.0)
    gens = [Segment((-params["alpha"], 0), (params["alpha"], 0)),
            Segment((-params["beta"] / sq2, -params["beta"] / sq2),
                    (params["beta"] / sq2, params["beta"] / sq2)),
            Segment((0, -params["gamma"]), (0, params["gamma"])),
            Segment((params["delta"] / sq2, -params["delta"] / sq2),
                    (-params["delta"] / sq2, params["delta"] / sq2))]
    target = zonogon((0, 0), gens)
    s1 = support_of_crosscov(h1, k1).body
    s2 = support_of_crosscov(h2, k2).body
    assert np.abs(s1.vertices - target.vertices).max() < 1e-12
    assert np.abs(s2.vertices - target.vertices).max() < 1e-12


def test_supp_is_minkowski_sum(make_polygon):
    rng = np.random.default_rng(8)
    h = make_polygon(rng, 6)
    k = make_polygon(rng, 7)
    supp = support_of_crosscov(h, k).body
    grid = cross_covariogram_grid(h, k, nx=21, ny=21)
    xg, yg = grid.points()
    eps = 1e-6
    for iy in range(21):
        for ix in range(21):
            p = np.array([xg[ix], yg[iy]])
            val = grid.values[iy, ix]
            probe = Polygon(np.array([p + [-eps, -eps], p + [eps, -eps],
                                      p + [eps, eps], p + [-eps, eps]]))
            overlap = polygon_intersection_area(supp, probe)
            if overlap == 0.0:
                assert val == 0.0
            elif overlap >= (2 * eps) ** 2 * (1 - 1e-9):  # strictly interior
                assert val > 0.0


def test_directional_derivative(unit_square, unit_disk, cw3):
    rep = directional_derivative_origin(unit_square, E1)
    assert rep.geometric == -1.0
    assert abs(rep.finite_difference - rep.geometric) < 1e-3
    rep = directional_derivative_origin(unit_disk, Direction(0.8))
    assert abs(rep.geometric + 2.0) < 1e-12
    assert abs(rep.finite_difference - rep.geometric) < 1e-3
    rep = directional_derivative_origin(cw3, E1)
    assert abs(rep.geometric + 2.0) < 1e-12
    assert abs(rep.finite_difference - rep.geometric) < 1e-3


def test_sum_reciprocal_curvatures(cw3):
    disk_like = SupportBody(1.0)
    assert abs(sum_reciprocal_curvatures_from_width(disk_like, E1) - 2.0) < 1e-12
    for th in np.linspace(0, 2 * math.pi, 12):
        assert abs(sum_reciprocal_curvatures_from_width(cw3, Direction(float(th))) - 2.0) < 1e-12
    k2 = SupportBody(1.0, ((0.0, 0.0), (0.02, 0.0)))
    assert abs(sum_reciprocal_curvatures_from_width(k2, E1) - 1.88) < 1e-12


def test_curvature_pair_disk(unit_disk):
    pair = curvature_pair_from_covariogram(unit_disk, Direction(0.7))
    assert abs(pair.low - 1.0) < 0.02
    assert abs(pair.high - 1.0) < 0.02
    # equal-pair degeneracy: Q*D collapses to D^2/4
    qd = pair.low * pair.high
    d = pair.low + pair.high
    assert abs(qd - d * d / 4.0) <= 0.02 * d * d / 4.0


def test_curvature_pair_cw3(cw3):
    pair = curvature_pair_from_covariogram(cw3, E1)
    assert abs(pair.low - 1.0 / 1.4) / (1.0 / 1.4) < 0.05
    assert abs(pair.high - 1.0 / 0.6) / (1.0 / 0.6) < 0.05
    assert 0 < pair.low <= pair.high


def test_curvature_pair_rejects_polygon(unit_square):
    with pytest.raises(FitFailed):
        curvature_pair_from_covariogram(unit_square, E1)


def test_grid_center_and_evenness(unit_square, cw3):
    grid = covariogram_grid(unit_square, nx=21, ny=21)
    assert abs(grid.values[10, 10] - 1.0) < 1e-9
    assert np.abs(grid.values - grid.values[::-1, ::-1]).max() < 1e-12
    grid_s = covariogram_grid(cw3, nx=11, ny=11)
    assert abs(grid_s.values[5, 5] - area(cw3)) < 1e-5 * max(1.0, area(cw3))


def test_grid_csv_determinism(tmp_path, unit_square):
    g1 = covariogram_grid(unit_square, nx=9, ny=9)
    g2 = covariogram_grid(unit_square, nx=9, ny=9)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    g1.to_csv(p1, tmp_path / "a.json")
    g2.to_csv(p2, tmp_path / "b.json")
    assert p1.read_bytes() == p2.read_bytes()
    assert (tmp_path / "a.json").read_text() == (tmp_path / "b.json").read_text()
    side = g1.sidecar()
    assert side["schema_version"] == 1
    assert side["method"] == "exact-clip"
    assert len(side["bodies"]) == 2


def test_covariogram_evaluator_contract(cw3):
    ev = covariogram_evaluator(cw3, n=512)
    assert abs(ev(np.zeros(2)) - area(cw3)) < 1e-3
    assert ev(np.array([10.0, 0.0])) == 0.0
