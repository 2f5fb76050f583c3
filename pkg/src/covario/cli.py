"""Command-line surface: body files in, CSV/JSON tables and verification suites out."""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from covario import asymptotics, covariogram, fourier_laplace, geometry, oracles, radon
from covario.geometry import Direction

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


def _load_body(path):
    try:
        with open(path) as fh:
            spec = json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"body file not found: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {path} at line {exc.lineno} column {exc.colno}: {exc.msg}")
    try:
        return geometry.body_from_spec(spec)
    except (ValueError, KeyError, TypeError, geometry.NotC2Plus,
            geometry.DegenerateZonogon) as exc:
        raise UsageError(f"invalid body spec in {path}: {exc}")


def _parse_grid(text):
    try:
        nx, ny = text.lower().split("x")
        return int(nx), int(ny)
    except ValueError:
        raise UsageError(f"grid must look like 41x41, got {text!r}")


def _parse_range(text):
    try:
        if ".." in text:
            a, b = text.split("..")
            return range(int(a), int(b) + 1)
        return range(int(text), int(text) + 1)
    except ValueError:
        raise UsageError(f"range must look like 1..40 or 5, got {text!r}")


def _write_csv(path, header, rows):
    lines = [header]
    for row in rows:
        lines.append(",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _emit(report, as_json):
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=True, default=str))
    else:
        for key, val in report.items():
            if key == "schema_version":
                continue
            print(f"{key}: {val}")


def cmd_body_validate(args):
    body = _load_body(args.body)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "body-validate",
        "kind": geometry.body_to_spec(body)["kind"],
        "area": geometry.area(body),
        "hash": geometry.body_hash(body),
        "valid": True,
    }
    _emit(report, args.json)
    return 0


def cmd_covariogram(args):
    body = _load_body(args.body)
    nx, ny = _parse_grid(args.grid)
    grid = covariogram.covariogram_grid(body, nx=nx, ny=ny)
    grid.to_csv(args.out, args.out + ".meta.json")
    _emit({"schema_version": SCHEMA_VERSION, "command": "covariogram", "out": args.out,
           "method": grid.method, "center_value": float(grid.values[ny // 2, nx // 2]),
           "area": geometry.area(body)}, args.json)
    return 0


def cmd_crosscov(args):
    body_h = _load_body(args.body)
    body_k = _load_body(args.body2)
    nx, ny = _parse_grid(args.grid)
    grid = covariogram.cross_covariogram_grid(body_h, body_k, nx=nx, ny=ny)
    grid.to_csv(args.out, args.out + ".meta.json")
    _emit({"schema_version": SCHEMA_VERSION, "command": "crosscov", "out": args.out,
           "method": grid.method, "max_value": float(grid.values.max())}, args.json)
    return 0


def cmd_radon(args):
    body = _load_body(args.body)
    u = Direction(args.u)
    cf = radon.chord_function(body, u)
    ts = np.linspace(cf.lo, cf.hi, args.num)
    _write_csv(args.out, "t,chord", [(float(t), float(cf(t))) for t in ts])
    _emit({"schema_version": SCHEMA_VERSION, "command": "radon", "out": args.out,
           "domain": [cf.lo, cf.hi], "method": cf.method}, args.json)
    return 0


def cmd_flt(args):
    body = _load_body(args.body)
    u = Direction(args.u)
    ctx = fourier_laplace.build_context(body, u, max_abs_zeta=max(args.xi_max, 1.0))
    xi = np.linspace(0.0, args.xi_max, args.num)
    vals = fourier_laplace.flt_ray_many(ctx, xi.astype(complex))
    rows = [(float(x), float(v.real), float(v.imag), float(abs(v) ** 2))
            for x, v in zip(xi, vals)]
    _write_csv(args.out, "xi,re,im,abs2", rows)
    _emit({"schema_version": SCHEMA_VERSION, "command": "flt", "out": args.out,
           "value_at_zero": float(vals[0].real)}, args.json)
    return 0


def cmd_zeros(args):
    body = _load_body(args.body)
    u = Direction(args.u)
    m_range = _parse_range(args.m)
    rows = []
    branches = fourier_laplace.branch_sweep(body, [u], m_range)
    for br in branches:
        rows.append((br.m, br.u.theta, br.zeta.real, br.zeta.imag, br.residual,
                     br.predicted_center.real, br.predicted_center.imag,
                     int(br.validated)))
    _write_csv(args.out, "m,theta,re_zeta,im_zeta,residual,pred_re,pred_im,validated", rows)
    _emit({"schema_version": SCHEMA_VERSION, "command": "zeros", "out": args.out,
           "n_branches": len(rows), "all_validated": all(r[-1] for r in rows)}, args.json)
    return 0


def cmd_kobayashi(args):
    body = _load_body(args.body)
    m_range = _parse_range(args.m)
    thetas = np.linspace(0.0, 2.0 * math.pi, args.u_grid, endpoint=False)
    rep = asymptotics.kobayashi_report(body, m_range,
                                       [Direction(float(t)) for t in thetas])
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "kobayashi",
        "body": rep.body_id,
        "flags": list(rep.flags),
        "decay_exponent": rep.decay_exponent,
        "decay_fit_residual": rep.decay_fit_residual,
        "per_m": [
            {"m": m, "max_deviation": float(rep.deviations[i].max()),
             "im_error": float(rep.im_error_per_m[i]),
             "re_error": float(rep.re_error_per_m[i])}
            for i, m in enumerate(rep.m_list)
        ],
    }
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    _emit(report if args.json else {"schema_version": SCHEMA_VERSION,
                                    "decay_exponent": rep.decay_exponent,
                                    "flags": list(rep.flags)}, args.json)
    return 0


def cmd_recover_curvature(args):
    body = _load_body(args.body)
    thetas = np.linspace(0.0, 2.0 * math.pi, args.u_grid, endpoint=False)
    rows = []
    for th in thetas:
        pair = covariogram.curvature_pair_from_covariogram(body, Direction(float(th)))
        rows.append((float(th), pair.low, pair.high, pair.fit_residual))
    _write_csv(args.out, "theta,low,high,residual", rows)
    _emit({"schema_version": SCHEMA_VERSION, "command": "recover-curvature",
           "out": args.out, "n_directions": len(rows)}, args.json)
    return 0


# ---------------------------------------------------------------------------
# verification suites (defaults mirror the acceptance tolerances)

def suite_matrix_identities(seed=0, n_pairs=1000, tol=1e-10):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_pairs):
        dim = int(rng.integers(1, 7))
        rep = oracles.matrix_identities(oracles.random_spd(dim, rng),
                                        oracles.random_spd(dim, rng))
        worst = max(worst, rep.max_deviation)
    return [("matrix-identities", worst <= tol, f"max relative deviation {worst:.3e}")]

def suite_paraboloid(seed=0, n_samples=1_000_000, n_instances=10):
    rows = []
    ref = oracles.paraboloid_volume(np.eye(1), np.eye(1), np.zeros(1), 1.0,
                                    n_samples, seed)
    ok_ref = ref.z_closed_form <= 3.0 and abs(ref.estimate.mean - 4.0 / 3.0) <= 0.01 * (4.0 / 3.0)
    rows.append(("paraboloid-reference", ok_ref,
                 f"volume {ref.estimate.mean:.5f} vs 4/3, z={ref.z_closed_form:.2f}"))
    rows.append(("paraboloid-rejects-statement-constant", ref.z_statement_level > 10.0,
                 f"z={ref.z_statement_level:.1f} against the 2^((n+1)/2)-inflated value"))
    rng = np.random.default_rng(seed + 1)
    all_ok, worst = True, 0.0
    for i in range(n_instances):
        d = int(rng.integers(1, 4))
        a = oracles.random_spd(d, rng, (0.5, 3.0))
        b = oracles.random_spd(d, rng, (0.5, 3.0))
        q = rng.uniform(-0.3, 0.3, size=d)
        t = rng.uniform(0.5, 1.5)
        rep = oracles.paraboloid_volume(a, b, q, t, n_samples, seed + 2 + i)
        rel = abs(rep.estimate.mean - rep.closed_form) / rep.closed_form
        all_ok &= rep.z_closed_form <= 3.0 and rel <= 0.01
        worst = max(worst, rel)
    rows.append(("paraboloid-random-instances", all_ok,
                 f"{n_instances} draws, worst relative gap {worst:.4f}"))
    return rows

def suite_factorization(seed=0, tol=1e-6):
    rows = []
    xi = np.linspace(0.0, 50.0, 512)
    rep = fourier_laplace.verify_factorization(geometry.Disk((0.0, 0.0), 1.0),
                                               Direction(0.0), xi, tol_factor=tol)
    rows.append(("factorization-disk", rep.passed, f"sup deviation {rep.max_deviation:.3e} * area^2"))
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.0, 1.0, size=(9, 2))
    poly = geometry.Polygon(geometry.convex_hull(pts))
    rep2 = fourier_laplace.verify_factorization(poly, Direction(0.7), xi, tol_factor=tol)
    rows.append(("factorization-polygon", rep2.passed,
                 f"sup deviation {rep2.max_deviation:.3e} * area^2"))
    return rows

def _random_family_params(family, rng):
    if family == 1:
        return dict(alpha=float(rng.uniform(0.3, 2.0)), beta=float(rng.uniform(0.3, 2.0)),
                    gamma=float(rng.uniform(0.3, 2.0)), delta=float(rng.uniform(0.3, 2.0)),
                    y=tuple(rng.uniform(-1.0, 1.0, 2)))
    m = float(rng.choice([0.0, rng.uniform(-2.0, 2.0)]))
    alpha_p = float(rng.uniform(0.3, 2.0))
    gamma_p = alpha_p * float(rng.uniform(1.1, 2.0))
    beta_p = float(rng.uniform(0.3, 2.0))
    delta_p = beta_p * float(rng.uniform(1.1, 2.0))
    return dict(alpha_p=alpha_p, beta_p=beta_p, gamma_p=gamma_p, delta_p=delta_p,
                m=m, y_p=tuple(rng.uniform(-1.0, 1.0, 2)))

def suite_counterexample(seed=0, families=(1, 3), n_draws=20, grid=(41, 41), tol=1e-9):
    rows = []
    for family in families:
        rng = np.random.default_rng(seed + family)
        worst = 0.0
        ok = True
        for _ in range(n_draws):
            rep = asymptotics.crosscov_counterexample(
                family, _random_family_params(family, rng), grid=grid, tol=tol)
            worst = max(worst, rep.max_deviation)
            ok &= rep.passed
        rows.append((f"counterexample-family-{family}", ok,
                     f"{n_draws} draws, max grid deviation {worst:.3e}, non-associate"))
    return rows

def suite_kobayashi_disk(tol_zero=1e-6):
    disk = geometry.Disk((0.0, 0.0), 1.0)
    u = Direction(0.0)
    ctx = fourier_laplace.build_context(disk, u, max_abs_zeta=135.0)
    worst = 0.0
    devs = []
    for m in range(1, 41):
        br = fourier_laplace.track_zero(ctx, m)
        devs.append(br.deviation)
        if m <= 20:
            worst = max(worst, abs(br.zeta - oracles.bessel_j1_zero(m)))
    slope = np.polyfit(np.log(np.arange(2, 41)), np.log(devs[1:]), 1)[0]
    rows = [
        ("kobayashi-disk-zeros", worst <= tol_zero,
         f"max |zeta - j_1m| = {worst:.2e} over m=1..20"),
        ("kobayashi-disk-decay", -1.3 <= slope <= -0.7, f"decay slope {slope:.3f}"),
        ("kobayashi-disk-m1", abs(devs[0] - 0.0953) <= 0.01,
         f"m=1 deviation {devs[0]:.4f} vs 0.0953"),
    ]
    return rows

def suite_properties(seed=0):
    rows = []
    rng = np.random.default_rng(seed)
    sq = geometry.Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])

    worst = 0.0
    for _ in range(5):
        poly = geometry.Polygon(geometry.convex_hull(rng.uniform(-1, 1, size=(8, 2))))
        for _ in range(20):
            x = rng.uniform(-1.5, 1.5, 2)
            worst = max(worst, abs(covariogram.covariogram(poly, x)
                                   - covariogram.covariogram(poly, -x)))
    rows.append(("covariogram-evenness", worst <= 1e-12, f"max |g(x)-g(-x)| = {worst:.2e}"))

    poly = geometry.Polygon(geometry.convex_hull(rng.uniform(-1, 1, size=(8, 2))))
    shift = rng.uniform(-2, 2, 2)
    moved = geometry.translate(poly, shift)
    refl = geometry.reflect(poly)
    worst_t = worst_r = 0.0
    for _ in range(30):
        x = rng.uniform(-1.5, 1.5, 2)
        g0 = covariogram.covariogram(poly, x)
        worst_t = max(worst_t, abs(covariogram.covariogram(moved, x) - g0))
        worst_r = max(worst_r, abs(covariogram.covariogram(refl, x) - g0))
    rows.append(("covariogram-translation-invariance", worst_t <= 1e-12, f"{worst_t:.2e}"))
    rows.append(("covariogram-reflection-invariance", worst_r <= 1e-12, f"{worst_r:.2e}"))

    mono_ok = True
    for _ in range(10):
        th = rng.uniform(0, 2 * math.pi)
        v = np.array([math.cos(th), math.sin(th)])
        vals = [covariogram.covariogram(poly, t * v) for t in np.linspace(0, 3, 40)]
        mono_ok &= all(b <= a + 1e-12 for a, b in zip(vals[:-1], vals[1:]))
    rows.append(("covariogram-ray-monotonicity", mono_ok, "sampled rays non-increasing"))

    from covario._quadrature import panel_table
    worst_a = 0.0
    for body in (geometry.Disk((0.2, -0.1), 1.3),
                 geometry.SupportBody(1.0, ((0, 0), (0, 0), (0.05, 0))), poly):
        for _ in range(6):
            u = Direction(rng.uniform(0, 2 * math.pi))
            cf = radon.chord_function(body, u)
            nodes, weights = panel_table(cf.lo, cf.hi, cf.breakpoints)
            worst_a = max(worst_a, abs(float(np.sum(weights * cf(nodes)))
                                       - geometry.area(body)))
    rows.append(("radon-area-identity", worst_a <= 1e-8,
                 f"max |int S - area| = {worst_a:.2e}"))

    rep = fourier_laplace.verify_reflection_identity(poly, n_samples=50, seed=seed)
    rows.append(("reflection-identity", rep.passed, f"max deviation {rep.max_deviation:.2e}"))

    worst_sq = 0.0
    for _ in range(50):
        x = rng.uniform(-0.999, 0.999, 2)
        expected = (1 - abs(x[0])) * (1 - abs(x[1]))
        worst_sq = max(worst_sq, abs(covariogram.covariogram(sq, x) - expected))
    rows.append(("square-product-formula", worst_sq <= 1e-12, f"{worst_sq:.2e}"))
    return rows


SUITES = {
    "matrix-identities": lambda args: suite_matrix_identities(seed=args.seed),
    "paraboloid": lambda args: suite_paraboloid(seed=args.seed, n_samples=args.mc_n),
    "factorization": lambda args: suite_factorization(seed=args.seed),
    "counterexample": lambda args: suite_counterexample(
        seed=args.seed, families=(args.family,) if args.family else (1, 3)),
    "kobayashi-disk": lambda args: suite_kobayashi_disk(),
    "properties": lambda args: suite_properties(seed=args.seed),
}


def cmd_verify(args):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    rows = []
    for name in names:
        rows.extend(SUITES[name](args))
    if args.json:
        print(json.dumps({
            "schema_version": SCHEMA_VERSION,
            "command": "verify",
            "suites": names,
            "checks": [{"name": n, "passed": bool(p), "detail": d} for n, p, d in rows],
            "passed": all(p for _, p, _ in rows),
        }, indent=2, sort_keys=True))
    else:
        width_name = max(len(n) for n, _, _ in rows)
        for name, passed, detail in rows:
            print(f"{name:<{width_name}}  {'PASS' if passed else 'FAIL'}  {detail}")
    return 0 if all(p for _, p, _ in rows) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="covario",
                                description="Covariograms, chord transforms and "
                                            "Fourier-Laplace zero branches of planar convex bodies")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    sp = sub.add_parser("body-validate", help="validate a body specification file")
    sp.add_argument("--body", required=True)
    add_common(sp)
    sp.set_defaults(func=cmd_body_validate)

    sp = sub.add_parser("covariogram", help="sample g_K on a grid")
    sp.add_argument("--body", required=True)
    sp.add_argument("--grid", default="41x41")
    sp.add_argument("--out", required=True)
    add_common(sp)
    sp.set_defaults(func=cmd_covariogram)

    sp = sub.add_parser("crosscov", help="sample g_{H,K} on a grid")
    sp.add_argument("--body", required=True)
    sp.add_argument("--body2", required=True)
    sp.add_argument("--grid", default="41x41")
    sp.add_argument("--out", required=True)
    add_common(sp)
    sp.set_defaults(func=cmd_crosscov)

    sp = sub.add_parser("radon", help="chord function along one direction")
    sp.add_argument("--body", required=True)
    sp.add_argument("--u", type=float, required=True, help="direction angle in radians")
    sp.add_argument("--num", type=int, default=201)
    sp.add_argument("--out", required=True)
    add_common(sp)
    sp.set_defaults(func=cmd_radon)

    sp = sub.add_parser("flt", help="transform values on a real frequency grid")
    sp.add_argument("--body", required=True)
    sp.add_argument("--u", type=float, required=True)
    sp.add_argument("--xi-max", type=float, default=50.0)
    sp.add_argument("--num", type=int, default=512)
    sp.add_argument("--out", required=True)
    add_common(sp)
    sp.set_defaults(func=cmd_flt)

    sp = sub.add_parser("zeros", help="track zero branches along one direction")
    sp.add_argument("--body", required=True)
    sp.add_argument("--u", type=float, required=True)
    sp.add_argument("--m", required=True, help="branch range, e.g. 1..40")
    sp.add_argument("--out", required=True)
    add_common(sp)
    sp.set_defaults(func=cmd_zeros)

    sp = sub.add_parser("kobayashi", help="branch deviations against predicted centers")
    sp.add_argument("--body", required=True)
    sp.add_argument("--m", default="2..40")
    sp.add_argument("--u-grid", type=int, default=120)
    sp.add_argument("--out", default="")
    add_common(sp)
    sp.set_defaults(func=cmd_kobayashi)

    sp = sub.add_parser("recover-curvature", help="curvature pairs from the covariogram")
    sp.add_argument("--body", required=True)
    sp.add_argument("--u-grid", type=int, default=24)
    sp.add_argument("--out", required=True)
    add_common(sp)
    sp.set_defaults(func=cmd_recover_curvature)

    sp = sub.add_parser("verify", help="run a named verification suite")
    sp.add_argument("suite", choices=sorted(SUITES) + ["all"])
    sp.add_argument("--family", type=int, choices=(1, 3), default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--mc-n", type=int, default=1_000_000)
    add_common(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AssertionError, asymptotics.UnmatchedZero, asymptotics.Inconclusive,
            covariogram.FitFailed, fourier_laplace.NewtonDiverged,
            fourier_laplace.ValidationFailed) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
