"""Panel Gauss-Legendre tables with square-root endpoint substitutions."""

from __future__ import annotations

import numpy as np

GL_CACHE = {}


def gauss_legendre(order):
    if order not in GL_CACHE:
        GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return GL_CACHE[order]


def panel_table(lo, hi, breakpoints=(), order=64, max_freq=0.0, osc_budget=40.0):
    """Quadrature nodes/weights on [lo, hi] for integrands with sqrt endpoints.

    Panels are split at the given interior breakpoints and further subdivided
    until max_freq * panel_length <= osc_budget (so oscillatory factors stay
    resolved by the per-panel order).  Each panel is halved and mapped through
    t = end +/- tau^2 from its two ends, which absorbs square-root behavior at
    any breakpoint.
    """
    if hi <= lo:
        return np.zeros(0), np.zeros(0)
    cuts = [lo, hi]
    for b in breakpoints:
        if lo + 1e-14 * (hi - lo) < b < hi - 1e-14 * (hi - lo):
            cuts.append(float(b))
    cuts = np.unique(np.asarray(cuts, dtype=float))
    edges = []
    max_len = (hi - lo) if max_freq <= 0 else max(osc_budget / max_freq, 1e-9 * (hi - lo))
    for a, b in zip(cuts[:-1], cuts[1:]):
        n_sub = max(1, int(np.ceil((b - a) / max_len)))
        edges.append(np.linspace(a, b, n_sub + 1))
    x, w = gauss_legendre(order)
    nodes, weights = [], []
    for seg in edges:
        for a, b in zip(seg[:-1], seg[1:]):
            mid = 0.5 * (a + b)
            for end, sgn in ((a, 1.0), (b, -1.0)):
                r = np.sqrt(abs(mid - end))
                tau = 0.5 * r * (x + 1.0)
                tw = 0.5 * r * w
                nodes.append(end + sgn * tau * tau)
                weights.append(tw * 2.0 * tau)
    return np.concatenate(nodes), np.concatenate(weights)


def fourier_weights(nodes, weights, values, zeta):
    """sum_j w_j v_j exp(i t_j zeta) for scalar or array-valued complex zeta."""
    zeta = np.asarray(zeta)
    if zeta.ndim == 0:
        return complex(np.sum(weights * values * np.exp(1j * nodes * complex(zeta))))
    return np.exp(1j * np.outer(zeta, nodes)) @ (weights * values)
