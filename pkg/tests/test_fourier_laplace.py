import math

import numpy as np
import pytest

from covario.fourier_laplace import (
    PrecisionLoss,
    branch_sweep,
    build_context,
    flt_ray,
    flt_ray_derivative,
    kobayashi_center,
    track_zero,
    verify_factorization,
    verify_reflection_identity,
    winding_number,
)
from covario.geometry import Direction, area
from covario.oracles import bessel_j1, bessel_j1_zero
from covario.radon import chord_autocorrelation

E1 = Direction(0.0)


def test_flt_at_zero_is_area(unit_square, unit_disk, cw3):
    for body in (unit_square, unit_disk, cw3):
        ctx = build_context(body, Direction(0.4), max_abs_zeta=10.0)
        assert abs(flt_ray(ctx, 0.0) - area(body)) < 1e-8 * max(1.0, area(body))


def test_flt_square_sinc_zero(centered_square):
    ctx = build_context(centered_square, E1, max_abs_zeta=30.0)
    assert abs(flt_ray(ctx, 2.0 * math.pi)) < 1e-13


def test_flt_disk_bessel_value(unit_disk):
    ctx = build_context(unit_disk, E1, max_abs_zeta=10.0)
    target = 2.0 * math.pi * bessel_j1(3.0) / 3.0
    assert abs(flt_ray(ctx, 3.0) - target) < 1e-12


def test_flt_derivative(unit_disk, centered_square):
    ctx = build_context(centered_square, E1, max_abs_zeta=10.0)
    assert abs(flt_ray_derivative(ctx, 0.0)) < 1e-13  # odd integrand for symmetric body
    ctx_d = build_context(unit_disk, E1, max_abs_zeta=10.0)
    h = 1e-5
    oracle = (2 * math.pi) * (bessel_j1(3 + h) / (3 + h) - bessel_j1(3 - h) / (3 - h)) / (2 * h)
    assert abs(flt_ray_derivative(ctx_d, 3.0) - oracle) < 1e-9
    rng = np.random.default_rng(0)
    for _ in range(20):
        z = complex(rng.uniform(-8, 8), rng.uniform(-2, 2))
        fd = (flt_ray(ctx_d, z + h) - flt_ray(ctx_d, z - h)) / (2 * h)
        dv = flt_ray_derivative(ctx_d, z)
        assert abs(dv - fd) < 1e-7 * max(1.0, abs(dv))


def test_precision_loss_cap(unit_disk):
    ctx = build_context(unit_disk, E1, max_abs_zeta=10.0)
    with pytest.raises(PrecisionLoss):
        flt_ray(ctx, complex(1.0, ctx.im_cap + 1.0))


def test_kobayashi_center_values(unit_disk, cw3):
    assert abs(kobayashi_center(unit_disk, 1, E1) - 5 * math.pi / 4) < 1e-14
    c = kobayashi_center(cw3, 1, E1)
    assert abs(c.real - 5 * math.pi / 4) < 1e-12
    expected_im = (math.log(1 / 1.4) - math.log(1 / 0.6)) / 4.0
    assert abs(c.imag - expected_im) < 1e-12
    assert abs(c.imag + 0.21182) < 1e-4
    assert kobayashi_center(unit_disk, 7, Direction(1.1)).imag == 0.0


def test_track_zero_disk(unit_disk):
    ctx = build_context(unit_disk, E1, max_abs_zeta=70.0)
    for m in (1, 5):
        br = track_zero(ctx, m)
        assert abs(br.zeta - bessel_j1_zero(m)) < 1e-9
        assert br.validated
        assert br.residual <= 1e-9 * abs(flt_ray_derivative(ctx, br.zeta))
    assert abs(track_zero(ctx, 1).deviation - 0.0953) < 1e-3


def test_track_zero_square_control(centered_square):
    # non-C2+ control case: zeros of the separable sinc at exactly 2 pi m
    ctx = build_context(centered_square, E1, max_abs_zeta=70.0)
    for m in (1, 2, 5):
        br = track_zero(ctx, m, start=2.0 * math.pi * m + 0.3)
        assert abs(br.zeta - 2.0 * math.pi * m) < 1e-10
        assert abs(br.zeta.imag) < 1e-12


def test_winding_number_counts(unit_disk):
    ctx = build_context(unit_disk, E1, max_abs_zeta=30.0)
    j1, j2 = bessel_j1_zero(1), bessel_j1_zero(2)
    assert winding_number(ctx, complex(j1, 0.0), 0.5, 0.3) == 1
    mid = 0.5 * (j1 + j2)
    assert winding_number(ctx, complex(mid, 0.0), 0.7 * (j2 - j1), 0.3) == 2
    assert winding_number(ctx, complex(mid, 0.0), 0.2, 0.2) == 0


def test_branch_sweep_disk_constant(unit_disk):
    grid = [Direction(float(t)) for t in np.linspace(0, 2 * math.pi, 12, endpoint=False)]
    rows = branch_sweep(unit_disk, grid, [3])
    zs = np.array([r.zeta for r in rows])
    assert np.abs(zs - zs[0]).max() <= 1e-8
    assert all(r.validated for r in rows)


def test_branch_sweep_cw3_symmetry(cw3):
    grid = [Direction(float(t)) for t in np.linspace(0, 2 * math.pi, 24, endpoint=False)]
    rows = branch_sweep(cw3, grid, [10])
    ims = np.array([r.zeta.imag for r in rows])
    # cos(3 theta) symmetry of the curvature ratio: period 2 pi / 3 = 8 grid steps
    assert np.abs(ims - np.roll(ims, 8)).max() < 1e-9
    assert np.abs(ims).max() > 0.05  # branches genuinely leave the real axis


def test_branch_real_parts_increase(cw3):
    ctx = build_context(cw3, Direction(0.3), max_abs_zeta=80.0)
    res = [track_zero(ctx, m).zeta.real for m in range(5, 16)]
    assert all(b > a for a, b in zip(res[:-1], res[1:]))


def test_antipodal_branch_identity(cw3):
    # the gamma = -1 zero along u coincides with -F_m(-u)
    u = Direction(0.4)
    ctx_u = build_context(cw3, u, max_abs_zeta=40.0)
    ctx_mu = build_context(cw3, u.antipode(), max_abs_zeta=40.0)
    f_mu = track_zero(ctx_mu, 7).zeta
    neg = track_zero(ctx_u, 7, start=-f_mu).zeta
    assert abs(neg - (-f_mu)) < 1e-9


def test_reflection_identity_random_polygon(make_polygon):
    rng = np.random.default_rng(1)
    poly = make_polygon(rng)
    rep = verify_reflection_identity(poly, n_samples=50, seed=2)
    assert rep.passed


def test_reflection_symmetric_body_real_on_axis(centered_square):
    ctx = build_context(centered_square, E1, max_abs_zeta=40.0)
    for xi in np.linspace(0.5, 30.0, 20):
        assert abs(flt_ray(ctx, xi).imag) < 1e-12


def test_zero_set_conjugate_symmetry(cw3):
    # if flt(z*) = 0 then flt(-conj z*) = 0 on the same ray
    ctx = build_context(cw3, Direction(0.9), max_abs_zeta=40.0)
    z = track_zero(ctx, 6).zeta
    assert abs(flt_ray(ctx, -z.conjugate())) < 1e-10


def test_paley_wiener_growth(cw3, unit_square):
    rng = np.random.default_rng(3)
    for body in (cw3, unit_square):
        ctx = build_context(body, Direction(0.2), max_abs_zeta=60.0)
        h_bound = max(abs(ctx.lo), abs(ctx.hi))
        for _ in range(40):
            z = complex(rng.uniform(-50, 50), rng.uniform(-ctx.im_cap, ctx.im_cap))
            bound = area(body) * math.exp(h_bound * abs(z.imag))
            assert abs(flt_ray(ctx, z)) <= bound * (1.0 + 1e-9)


def test_factorization_identity(unit_disk, centered_square):
    # xi = 0: both sides equal area^2
    xi = np.array([0.0])
    rep = verify_factorization(unit_disk, E1, xi)
    assert rep.passed
    ac0 = chord_autocorrelation(unit_disk, E1, 0.0)
    ctx = build_context(centered_square, E1, max_abs_zeta=10.0)
    assert abs(abs(flt_ray(ctx, 2 * math.pi)) ** 2) < 1e-20
    xi = np.linspace(0.0, 50.0, 256)
    rep = verify_factorization(unit_disk, E1, xi)
    assert rep.max_deviation <= 1e-6


def test_validation_failure_reported(unit_disk):
    # force a start so far off that Newton lands on a different branch; with
    # strict=False the branch is still returned and flagged by its residual
    ctx = build_context(unit_disk, E1, max_abs_zeta=70.0)
    br = track_zero(ctx, 2, start=bessel_j1_zero(3) + 0.01)
    assert abs(br.zeta - bessel_j1_zero(3)) < 1e-8  # converged to the m=3 zero
    assert br.validated  # winding is still 1 around that zero


def test_deviation_decay_slope(unit_disk):
    ctx = build_context(unit_disk, E1, max_abs_zeta=135.0)
    devs = [track_zero(ctx, m).deviation for m in range(2, 41)]
    slope = np.polyfit(np.log(np.arange(2, 41)), np.log(devs), 1)[0]
    assert -1.3 <= slope <= -0.7
