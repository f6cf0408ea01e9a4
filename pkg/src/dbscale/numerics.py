"""Inner products on the space and zero-finding for the s-family.

Two independent inner-product rules are provided and cross-checked in the
test suite:

* ``SamplingSeries`` -- the orthogonal-basis expansion over the spectrum of
  the gamma=0 extension (for Paley-Wiener realizations these are the points
  n pi / a with constant weight pi / a).  Partial sums are refined by
  Richardson extrapolation of the geometric doubling sequence, since the
  truncation error of dictionary elements has a smooth 1/N expansion.

* ``AdaptiveQuadrature`` -- composite Gauss-Legendre panels on [-X, X]
  against the weight 1/|e(x)|^2, plus an algebraic two-term tail fit.  The
  partial integral is formed at two endpoints half an oscillation period
  apart, which cancels the leading oscillatory tail term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonConvergence, StepTooCoarse
from .fncore import AtomS, fn_eval, kernel_diag_real

# ----------------------------------------------------------------------------
# Engine configuration
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class SamplingSeries:
    """Sampling-series inner product over spec(S_0)."""

    n_base: int = 256
    tol_ip: float = 1e-10
    max_doublings: int = 4

    def __post_init__(self):
        if self.n_base < 8:
            raise ValueError("sampling truncation index must be >= 8")
        if not 0 < self.tol_ip <= 1e-4:
            raise ValueError("tol_ip must lie in (0, 1e-4]")


@dataclass(frozen=True)
class AdaptiveQuadrature:
    """Weighted quadrature of conj(f) g / |e|^2 over the real line."""

    half_width: float = 250.0
    tol_ip: float = 1e-9
    panels_per_period: int = 4
    max_refine: int = 2

    def __post_init__(self):
        if self.half_width < 10:
            raise ValueError("quadrature half-width must be >= 10")
        if not 0 < self.tol_ip <= 1e-4:
            raise ValueError("tol_ip must lie in (0, 1e-4]")


@dataclass(frozen=True)
class RootWindow:
    lo: float
    hi: float
    scan_step: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("window needs lo < hi")
        if not self.scan_step > 0:
            raise ValueError("scan_step must be positive")


# ----------------------------------------------------------------------------
# Sampling grid over spec(S_0)
# ----------------------------------------------------------------------------

def _sampling_grid(space, n_max):
    """Points of spec(S_0) sorted by |mu| plus weights 1/k(mu, mu).

    Cached on the space.  Paley-Wiener realizations use the exact lattice
    n pi / a; other realizations locate the zeros numerically once.
    """
    key = ("sampling", n_max)
    hit = space._cache.get(key)
    if hit is not None:
        return hit
    a = space.type_a
    from .fncore import PaleyWiener
    if isinstance(space.realization, PaleyWiener):
        idx = np.argsort(np.abs(np.arange(-n_max, n_max + 1)), kind="stable")
        mus = (np.arange(-n_max, n_max + 1) * math.pi / a)[idx]
        wts = np.full(mus.shape, math.pi / a)
    else:
        span = (n_max + 2) * math.pi / a + 1.0
        mus = find_zeros(space, 0.0, -span, span)
        order = np.argsort(np.abs(mus), kind="stable")
        mus = mus[order]
        wts = 1.0 / kernel_diag_real(space, mus)
    space._cache[key] = (mus, wts)
    return mus, wts


def _inner_sampling(space, f, g, engine):
    n0 = engine.n_base
    levels = engine.max_doublings + 1
    mus, wts = _sampling_grid(space, n0 * 2 ** engine.max_doublings)
    fv = np.conj(fn_eval(f, space, mus))
    gv = fn_eval(g, space, mus)
    csum = np.cumsum(fv * gv * wts)
    partial = []
    for lev in range(levels):
        count = min(len(csum), 2 * n0 * 2 ** lev + 1)
        partial.append(csum[count - 1])
    # tail of the truncated series behaves like c/N + d/N^2 + ...; two
    # Richardson sweeps of the doubling sequence remove both leading terms
    r1 = [2.0 * partial[i] - partial[i - 1] for i in range(1, levels)]
    r2 = [(4.0 * r1[i] - r1[i - 1]) / 3.0 for i in range(1, len(r1))]
    for i in range(1, len(r2)):
        if abs(r2[i] - r2[i - 1]) <= engine.tol_ip * (1.0 + abs(r2[i])):
            return complex(r2[i])
    raise NonConvergence(
        "sampling series did not converge to %.1e after %d doublings"
        % (engine.tol_ip, engine.max_doublings))


# ----------------------------------------------------------------------------
# Weighted quadrature with algebraic tail
# ----------------------------------------------------------------------------

_GL_MAIN = np.polynomial.legendre.leggauss(16)
_GL_TAIL = np.polynomial.legendre.leggauss(64)


def _panel_nodes(edges, rule):
    xg, wg = rule
    lo = edges[:-1]
    hi = edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    return nodes, weights


class _QuadPlan:
    """Precomputed nodes for one (space, half-width, density) combination."""

    def __init__(self, space, engine, density):
        a = space.type_a
        period = math.pi / a
        x1 = engine.half_width
        x2 = x1 + 0.5 * period
        h = period / (engine.panels_per_period * density)
        n_core = max(4, int(math.ceil(x1 / h)))
        right = np.concatenate([np.linspace(0.0, x1, n_core + 1),
                                np.linspace(x1, x2, 3)[1:]])
        edges = np.concatenate([-right[::-1], right[1:]])
        self.x_main, self.w_main = _panel_nodes(edges, _GL_MAIN)
        self.inner_mask = np.abs(self.x_main) <= x1 + 1e-12
        self.x1, self.x2, self.period = x1, x2, period
        self.stations = []
        for side in (+1.0, -1.0):
            for s in (x2, 1.5 * x2):
                lo, hi = (s, s + period) if side > 0 else (-s - period, -s)
                nodes, weights = _panel_nodes(np.array([lo, hi]), _GL_TAIL)
                kappa = math.log((s + period) / s) / period * side
                self.stations.append((side, s, nodes, weights, kappa))
        self.all_nodes = np.concatenate(
            [self.x_main] + [st[2] for st in self.stations])

    def integrate(self, uvals):
        """Full-line integral estimate from integrand values on all_nodes."""
        n = len(self.x_main)
        u_main = uvals[:n]
        i_x2 = np.dot(self.w_main, u_main)
        i_x1 = np.dot(self.w_main[self.inner_mask], u_main[self.inner_mask])
        # station means of x^2 u(x), oscillation averaged over one period
        pos = n
        fits = {+1.0: [], -1.0: []}
        for side, s, nodes, weights, kappa in self.stations:
            uv = uvals[pos:pos + len(nodes)]
            pos += len(nodes)
            m = np.dot(weights, nodes ** 2 * uv) / self.period
            fits[side].append((m, kappa))
        tails = {}
        for side, pairs in fits.items():
            (m1, k1), (m2, k2) = pairs
            d = (m1 - m2) / (k1 - k2)
            c = m1 - d * k1
            tails[side] = (c, d)
        est = []
        for x in (self.x1, self.x2):
            cr, dr = tails[+1.0]
            cl, dl = tails[-1.0]
            tail = cr / x + dr / (2 * x * x) + cl / x - dl / (2 * x * x)
            est.append((i_x1 if x == self.x1 else i_x2) + tail)
        return 0.5 * (est[0] + est[1])


def _quad_plan(space, engine, density):
    key = ("quadplan", engine.half_width, engine.panels_per_period, density)
    plan = space._cache.get(key)
    if plan is None:
        plan = _QuadPlan(space, engine, density)
        space._cache[key] = plan
    return plan


def _inner_quadrature(space, f, g, engine):
    prev = None
    for refine in range(engine.max_refine + 1):
        plan = _quad_plan(space, engine, 2 ** refine)
        x = plan.all_nodes
        u = np.conj(fn_eval(f, space, x)) * fn_eval(g, space, x) / space.emod2(x)
        est = plan.integrate(u)
        if prev is not None and abs(est - prev) <= engine.tol_ip * (1.0 + abs(est)):
            return complex(est)
        prev = est
    raise NonConvergence(
        "quadrature did not stabilize to %.1e after %d refinements"
        % (engine.tol_ip, engine.max_refine))


# ----------------------------------------------------------------------------
# Public operations
# ----------------------------------------------------------------------------

def inner_B(space, f, g, engine=None):
    """Inner product on the space: conjugate linear in f, linear in g."""
    engine = engine or space.ip_engine or SamplingSeries()
    if isinstance(engine, SamplingSeries):
        return _inner_sampling(space, f, g, engine)
    if isinstance(engine, AdaptiveQuadrature):
        return _inner_quadrature(space, f, g, engine)
    raise TypeError("unknown inner-product engine %r" % (engine,))


def quad_inner(space, f, g, engine=None):
    """Always-quadrature inner product (the independent oracle)."""
    if not isinstance(engine, AdaptiveQuadrature):
        engine = engine or AdaptiveQuadrature()
    return _inner_quadrature(space, f, g, engine)


def norm_B(space, f, engine=None):
    val = inner_B(space, f, f, engine)
    return math.sqrt(max(val.real, 0.0))


def default_scan_step(space):
    """Half the minimal zero gap of the s-family is pi/(2a); use pi/(4a)."""
    return math.pi / (4.0 * space.type_a)


def find_zeros(space, gamma, lo, hi, scan_step=None):
    """All real zeros of s_gamma in [lo, hi] to absolute accuracy ~1e-12.

    Sign-change scan, bisection bracketing, then a safeguarded Newton
    polish with the closed-form derivative.  Raises StepTooCoarse when an
    interior extremum betrays two sign changes inside a single scan step.
    """
    if scan_step is None:
        scan_step = default_scan_step(space)
    window = RootWindow(float(lo), float(hi), float(scan_step))
    n = max(2, int(math.ceil((window.hi - window.lo) / window.scan_step)))
    xs = np.linspace(window.lo, window.hi, n + 1)
    s = AtomS(float(gamma))
    v0, v1 = s._derivs(space, xs.astype(complex), 1)
    vals = v0.real
    ders = v1.real

    def s_pair(x):
        d = s.derivs(space, complex(x), 1)
        return d[0].real, d[1].real

    _coarse_scan_guard(xs, vals, ders, s_pair)

    roots = []
    for i in range(n):
        va, vb = vals[i], vals[i + 1]
        if va == 0.0:
            roots.append(xs[i])
            continue
        if va * vb < 0.0:
            roots.append(_polish(s_pair, xs[i], xs[i + 1], va, vb))
    if vals[-1] == 0.0:
        roots.append(xs[-1])
    roots = sorted(roots)
    out = []
    for r in roots:
        if not out or abs(r - out[-1]) > 1e-8:
            out.append(r)
    return np.asarray(out)


def _coarse_scan_guard(xs, vals, ders, s_pair):
    for i in range(len(xs) - 1):
        if vals[i] * vals[i + 1] <= 0.0:
            continue
        da, db = ders[i], ders[i + 1]
        if da == 0.0 or db == 0.0 or da * db > 0.0:
            continue
        # interior extremum with the same endpoint sign on both sides;
        # locate it on the derivative and compare signs
        lo, hi = xs[i], xs[i + 1]
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            dm = s_pair(mid)[1]
            if dm == 0.0:
                break
            if da * dm < 0.0:
                hi = mid
            else:
                lo, da = mid, dm
        ext = s_pair(0.5 * (lo + hi))[0]
        if ext * vals[i] < 0.0:
            raise StepTooCoarse(
                "two zeros inside one scan step near x=%.6g" % (0.5 * (lo + hi)))


def _polish(s_pair, lo, hi, vlo, vhi, tol=1e-13, max_newton=8):
    # bisect to a narrow bracket first
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        vm = s_pair(mid)[0]
        if vm == 0.0:
            return mid
        if vlo * vm < 0.0:
            hi, vhi = mid, vm
        else:
            lo, vlo = mid, vm
        if hi - lo < 1e-6 * (1.0 + abs(mid)):
            break
    x = 0.5 * (lo + hi)
    for _ in range(max_newton):
        v, d = s_pair(x)
        if v == 0.0 or d == 0.0:
            break
        step = v / d
        xn = x - step
        if not lo <= xn <= hi:  # safeguard: fall back to bisection
            xn = 0.5 * (lo + hi)
            vn = s_pair(xn)[0]
            if vlo * vn < 0.0:
                hi, vhi = xn, vn
            else:
                lo, vlo = xn, vn
        x = xn
        if abs(step) < tol * (1.0 + abs(x)):
            break
    return x


def interlaces(zeros_a, zeros_b, window):
    """True when exactly one zero of the second family separates each
    consecutive pair of the first inside the window."""
    za = [z for z in zeros_a if window[0] <= z <= window[1]]
    zb = np.asarray(zeros_b)
    for lo, hi in zip(za[:-1], za[1:]):
        inside = np.count_nonzero((zb > lo) & (zb < hi))
        if inside != 1:
            return False
    return True
