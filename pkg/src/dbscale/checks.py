"""The identity-verification suite.

Every computable statement handled by the toolkit is packaged as a check
producing one or more records (identifier, parameters, worst error, pinned
tolerance).  The CLI ``verify`` subcommand and the acceptance tests both
run this registry.
"""

from __future__ import annotations

import math
import os
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .fncore import (AtomKernel, AtomS, DbSpace, MulAffine, PaleyWiener,
                     Shifted, fn_eval, hb_verify, kernel, kernel_via_s,
                     lincomb, s_gamma, sharp, standard_hb_grid)
from .numerics import (AdaptiveQuadrature, SamplingSeries, find_zeros,
                       inner_B, interlaces, norm_B, quad_inner)
from .operator import (ExtensionHandle, GammaDomainElement, StarDomainElement,
                       apply_S_gamma, cayley_apply, cayley_kernel_identity_check,
                       cayley_on_kernel_check, dom_S_element, eigen_element,
                       quotient_kernel_identity_check, resolvent_apply,
                       star_apply, star_from_gamma, star_from_kernel,
                       symmetry_identity_check)
from .scale import (AssocFunction, ZERO, assoc_from_B, assoc_from_s,
                    assoc_roundtrip, counterexample_run, dictionary_gamma,
                    dictionary_star, dual_from_s, inner_plus2, kernel_plus2,
                    minus2_lower, minusF_lower, nondensity_gap, norm_plus2,
                    norm_plusF, pairing_F, pairing_minus2, scale_norms,
                    sharp_isometry_checks)
from .perturbation import (KreinData, boundary_functional, cyclicity_check,
                           dom_gamma_decompose, krein_diff_check,
                           lambda_of_gamma, pairing_s0_F, qfunc,
                           rank_one_pole_points, rhat_on_s0, s_ratio_at_i,
                           s_tilde_gamma_pairing_check)

HALF_PI = 0.5 * math.pi
GAMMA_GRID = (math.pi / 6, math.pi / 4, math.pi / 3,
              2 * math.pi / 3, 3 * math.pi / 4)


@dataclass
class CheckRecord:
    check_id: str
    params: dict
    max_abs_err: float
    tol: float
    passed: bool
    runtime_ms: float = 0.0


def _rec(check_id, err, tol, **params):
    err = float(err)
    return CheckRecord(check_id, params, err, float(tol), err <= tol)


class Suite:
    """Shared state for one verification run."""

    def __init__(self, a=math.pi, gamma=math.pi / 4, seed=0, grid_n=41):
        self.a = float(a)
        self.gamma = float(gamma) % math.pi
        self.seed = int(seed)
        self.grid_n = int(grid_n)
        self.quad = AdaptiveQuadrature()
        self.space = DbSpace(PaleyWiener(self.a), ip_engine=SamplingSeries())
        self.space1 = DbSpace(PaleyWiener(1.0), ip_engine=SamplingSeries())
        self.ext = ExtensionHandle(self.space, self.gamma)
        self.ext_half = ExtensionHandle(self.space, HALF_PI)

    def rng(self, check_id):
        h = zlib.crc32(check_id.encode("utf-8"))
        return np.random.default_rng((self.seed * 1000003 + h) % 2 ** 63)

    def draw_z(self, rng, n, span=2.5, ymax=1.5, nonreal=False):
        x = rng.uniform(-span, span, n)
        y = rng.uniform(-ymax, ymax, n)
        if nonreal:
            y = np.where(np.abs(y) < 0.1, np.sign(y + 1e-12) * 0.35, y)
        return x + 1j * y

    def rand_B(self, rng, n_terms=3, min_at_i=None):
        """Random kernel combination; optionally bounded below at z = i."""
        for _ in range(40):
            pts = self.draw_z(rng, n_terms, span=1.5, ymax=1.0)
            cs = rng.normal(size=n_terms) + 1j * rng.normal(size=n_terms)
            f = lincomb(cs, [AtomKernel(complex(p)) for p in pts])
            if min_at_i is None:
                return f
            if abs(fn_eval(f, self.space, 1j)) > min_at_i:
                return f
        raise RuntimeError("could not draw a suitable random element")


# ----------------------------------------------------------------------------
# fncore checks
# ----------------------------------------------------------------------------

def check_hb_inequality(s):
    grid = standard_hb_grid()
    margins = {}
    for label, realization in (("pw", s.space.realization),
                               ("pw-a1", s.space1.realization),
                               ("shifted", Shifted(PaleyWiener(1.0)))):
        _, margins[label] = hb_verify(realization, grid)
    worst = min(margins.values())
    return [_rec("hb-inequality", max(0.0, -worst), 0.0, margins=margins)]


def check_kernel_via_s(s):
    rng = s.rng("eq:k-given-by-s")
    worst = 0.0
    for space in (s.space, s.space1):
        for _ in range(50):
            z = complex(s.draw_z(rng, 1)[0])
            w = complex(s.draw_z(rng, 1)[0])
            g0 = rng.uniform(0.0, math.pi)
            lhs = kernel(space, z, w)
            rhs = kernel_via_s(space, g0, z, w)
            worst = max(worst, abs(lhs - rhs) / (1e-12 + abs(lhs)))
        # exercise the diagonal branch too
        x = complex(rng.uniform(-2, 2))
        lhs = kernel(space, x, x)
        rhs = kernel_via_s(space, rng.uniform(0, math.pi), x, x)
        worst = max(worst, abs(lhs - rhs) / (1e-12 + abs(lhs)))
    return [_rec("eq:k-given-by-s", worst, 1e-10, draws=100)]


def check_s_beta(s):
    rng = s.rng("eq:s-beta")
    worst = 0.0
    for _ in range(100):
        g = rng.uniform(-math.pi, 2 * math.pi)
        g0 = rng.uniform(-math.pi, 2 * math.pi)
        z = complex(s.draw_z(rng, 1)[0])
        lhs = s_gamma(s.space, g, z)
        rhs = (math.cos(g - g0) * s_gamma(s.space, g0, z)
               + math.sin(g - g0) * s_gamma(s.space, g0 + HALF_PI, z))
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
    return [_rec("eq:s-beta", worst, 1e-12, draws=100)]


def check_kernel_symmetries(s):
    rng = s.rng("kernel-symmetries")
    worst_conj = 0.0
    worst_herm = 0.0
    for _ in range(100):
        z = complex(s.draw_z(rng, 1)[0])
        w = complex(s.draw_z(rng, 1)[0])
        kzw = kernel(s.space, z, w)
        conj_form = np.conj(kernel(s.space, np.conj(z), w))
        worst_conj = max(worst_conj,
                         abs(conj_form - kernel(s.space, z, np.conj(w)))
                         / (1e-12 + abs(kzw)))
        worst_herm = max(worst_herm,
                         abs(kzw - np.conj(kernel(s.space, w, z)))
                         / (1e-12 + abs(kzw)))
    return [_rec("kernel-conj-symmetry", worst_conj, 1e-12, draws=100),
            _rec("kernel-hermiticity", worst_herm, 1e-12, draws=100)]


def check_kernel_diag_continuity(s):
    rng = s.rng("kernel-diagonal-continuity")
    d = s.space.delta_rem
    worst = 0.0
    for _ in range(10):
        w = complex(rng.uniform(-2, 2), rng.uniform(-0.5, 0.5))
        u = np.conj(w)
        phase = np.exp(1j * rng.uniform(0, 2 * math.pi))
        inner_pt = u + (d * 0.9) * phase
        outer_pt = u + (d * 1.1) * phase
        worst = max(worst, abs(kernel(s.space, inner_pt, w)
                               - kernel(s.space, outer_pt, w)))
    return [_rec("kernel-diagonal-continuity", worst, 1e-6, draws=10)]


# ----------------------------------------------------------------------------
# numerics checks
# ----------------------------------------------------------------------------

def _pair_dictionary(s, rng, n_pairs):
    pool = [AtomKernel(complex(w)) for w in
            (0.0, 0.5, -0.5, 1.0, 1j, -1j, 1 + 1j, 1 - 1j)]
    pool += [resolvent_apply(s.ext_half, 1j, AtomKernel(complex(w)))
             for w in (0.0, 0.5, 1j, -1.0)]
    pairs = []
    for _ in range(n_pairs):
        i, j = rng.integers(0, len(pool), 2)
        pairs.append((pool[i], pool[j]))
    return pairs


def check_sampling_vs_quadrature(s):
    rng = s.rng("sampling-vs-quadrature")
    worst = 0.0
    for f, g in _pair_dictionary(s, rng, 20):
        ip_s = inner_B(s.space, f, g)
        ip_q = quad_inner(s.space, f, g, s.quad)
        worst = max(worst, abs(ip_s - ip_q) / (1.0 + abs(ip_s)))
    return [_rec("sampling-vs-quadrature", worst, 1e-6, pairs=20)]


def check_parseval(s):
    rng = s.rng("parseval")
    worst = 0.0
    for f, _ in _pair_dictionary(s, rng, 6):
        via_samples = inner_B(s.space, f, f).real
        via_quad = quad_inner(s.space, f, f, s.quad).real
        worst = max(worst, abs(via_samples - via_quad) / abs(via_quad))
    return [_rec("parseval", worst, 1e-6, functions=6)]


def check_reproducing(s):
    rng = s.rng("reproducing-property")
    fs = [f for f, _ in _pair_dictionary(s, rng, 20)]
    ws = list(s.draw_z(rng, 7, span=2.0, ymax=1.0)) + [0.25, -1.3, 0.8 + 0.3j]
    worst = 0.0
    for f in fs:
        fw = fn_eval(f, s.space, np.asarray(ws, dtype=complex))
        for w, ref in zip(ws, fw):
            kw = AtomKernel(complex(w))
            for ip in (inner_B(s.space, kw, f),
                       quad_inner(s.space, kw, f, s.quad)):
                worst = max(worst, abs(ip - ref) / (1.0 + abs(ref)))
    return [_rec("reproducing-property", worst, 1e-6,
                 functions=len(fs), points=len(ws))]


def check_spectra(s):
    zeros0 = find_zeros(s.space, 0.0, -5.5, 5.5)
    expected0 = np.arange(-5, 6, dtype=float) * math.pi / s.a
    if s.a == math.pi:
        expected0 = np.arange(-5, 6, dtype=float)
    err = 1.0 if len(zeros0) != len(expected0) else \
        float(np.max(np.abs(zeros0 - expected0)))
    zeros_h = find_zeros(s.space, HALF_PI, -5.0, 5.0)
    expected_h = (np.arange(-4.5, 5.0, 1.0)) * math.pi / s.a
    if s.a == math.pi:
        expected_h = np.arange(-4.5, 5.0, 1.0)
    err_h = 1.0 if len(zeros_h) != len(expected_h) else \
        float(np.max(np.abs(zeros_h - expected_h)))
    recs = [_rec("spectrum-zeros", max(err, err_h), 1e-10,
                 gamma0_count=len(zeros0), gammah_count=len(zeros_h))]
    bad = 0
    pairs = [(0.0, HALF_PI), (math.pi / 6, math.pi / 3),
             (math.pi / 4, 3 * math.pi / 4), (0.3, 2.1), (1.0, 2.5)]
    for g1, g2 in pairs:
        z1 = find_zeros(s.space, g1, -4.0, 4.0)
        z2 = find_zeros(s.space, g2, -4.0, 4.0)
        if not (interlaces(z1, z2, (-4, 4)) and interlaces(z2, z1, (-4, 4))):
            bad += 1
    recs.append(_rec("spectrum-interlacing", float(bad), 0.0, pairs=len(pairs)))
    worst = 0.0
    xs = np.linspace(-4, 4, 401)
    for g in GAMMA_GRID:
        zeros = find_zeros(s.space, g, -4.0, 4.0)
        smax = float(np.max(np.abs(fn_eval(AtomS(g), s.space,
                                           xs.astype(complex)))))
        resid = float(np.max(np.abs(fn_eval(AtomS(g), s.space,
                                            zeros.astype(complex)))))
        worst = max(worst, resid / smax)
    recs.append(_rec("zero-residual", worst, 1e-9, gammas=len(GAMMA_GRID)))
    return recs


# ----------------------------------------------------------------------------
# operator checks
# ----------------------------------------------------------------------------

def check_operator_identities(s):
    rng = s.rng("operator-identities")
    recs = []
    worst = 0.0
    for _ in range(10):
        g = rng.uniform(0, math.pi)
        ext = ExtensionHandle(s.space, g)
        v, w = [complex(z) for z in s.draw_z(rng, 2, nonreal=True)]
        worst = max(worst, quotient_kernel_identity_check(ext, v, w))
    recs.append(_rec("lem:quotient-diff-reprod-kernel", worst, 1e-10, draws=10))
    worst = 0.0
    for _ in range(10):
        ext = ExtensionHandle(s.space, rng.uniform(0, math.pi))
        v, w = [complex(z) for z in s.draw_z(rng, 2, nonreal=True)]
        worst = max(worst, symmetry_identity_check(ext, v, w))
    recs.append(_rec("eq:symmetry", worst, 1e-10, draws=10))
    worst = 0.0
    for _ in range(10):
        ext = ExtensionHandle(s.space, rng.uniform(0, math.pi))
        w = complex(s.draw_z(rng, 1, nonreal=True)[0])
        worst = max(worst, cayley_kernel_identity_check(ext, w))
    recs.append(_rec("eq:cayley-transf", worst, 1e-10, draws=10))
    worst = 0.0
    for _ in range(10):
        ext = ExtensionHandle(s.space, rng.uniform(0, math.pi))
        w0, z0 = [complex(z) for z in s.draw_z(rng, 2, nonreal=True)]
        worst = max(worst, cayley_on_kernel_check(ext, w0, z0))
    recs.append(_rec("eq:cayley-transform-on-k", worst, 1e-10, draws=10))
    return recs


def check_cayley_unitarity(s):
    rng = s.rng("cayley-unitarity")
    worst = 0.0
    for _ in range(10):
        w = complex(s.draw_z(rng, 1, nonreal=True)[0])
        f = s.rand_B(rng)
        nf = norm_B(s.space, f)
        nu = norm_B(s.space, cayley_apply(s.ext, w, f))
        worst = max(worst, abs(nu - nf) / nf)
    recs = [_rec("cayley-unitarity", worst, 1e-8, draws=10)]
    grid = np.linspace(-2, 2, 9).astype(complex)
    worst = 0.0
    for _ in range(5):
        w = complex(s.draw_z(rng, 1, nonreal=True)[0])
        f = s.rand_B(rng)
        roundtrip = cayley_apply(s.ext, np.conj(w), cayley_apply(s.ext, w, f))
        diff = fn_eval(roundtrip, s.space, grid) - fn_eval(f, s.space, grid)
        scale = 1.0 + float(np.max(np.abs(fn_eval(f, s.space, grid))))
        worst = max(worst, float(np.max(np.abs(diff))) / scale)
    recs.append(_rec("cayley-involution", worst, 1e-10, draws=5))
    return recs


def check_resolvent_identity(s):
    rng = s.rng("resolvent-identity")
    grid = np.linspace(-2, 2, 9).astype(complex)
    worst = 0.0
    for _ in range(5):
        v, w = [complex(z) for z in s.draw_z(rng, 2, nonreal=True)]
        f = s.rand_B(rng)
        rw = resolvent_apply(s.ext, w, f)
        rv = resolvent_apply(s.ext, v, f)
        lhs = lincomb([1.0, -1.0], [rw, rv])
        rhs = (w - v) * resolvent_apply(s.ext, w,
                                        resolvent_apply(s.ext, v, f))
        diff = fn_eval(lhs, s.space, grid) - fn_eval(rhs, s.space, grid)
        worst = max(worst, float(np.max(np.abs(diff))))
    return [_rec("resolvent-identity", worst, 1e-9, draws=5)]


def check_eigen_relation(s):
    grid = np.linspace(-2.3, 2.3, 9).astype(complex)
    worst = 0.0
    for g in (0.0, s.gamma, HALF_PI):
        ext = ExtensionHandle(s.space, g)
        for mu in find_zeros(s.space, g, -2.0, 2.0):
            el = eigen_element(ext, mu)
            act = apply_S_gamma(ext, el)
            diff = (fn_eval(act, s.space, grid)
                    - mu * fn_eval(el.expr, s.space, grid))
            worst = max(worst, float(np.max(np.abs(diff))))
    return [_rec("eigen-relation", worst, 1e-9, gammas=3)]


def check_dom_S_consistency(s):
    rng = s.rng("dom-S-consistency")
    grid = np.linspace(-2, 2, 9).astype(complex)
    worst = 0.0
    for _ in range(5):
        base = s.rand_B(rng)
        h, _ = dom_S_element(s.space, base)
        el = GammaDomainElement(s.ext, MulAffine(1j, h), 1j)
        act = apply_S_gamma(s.ext, el)
        diff = fn_eval(act, s.space, grid) - grid * fn_eval(h, s.space, grid)
        worst = max(worst, float(np.max(np.abs(diff))))
    return [_rec("dom-S-consistency", worst, 1e-10, draws=5)]


def check_adjoint_deficiency(s):
    rng = s.rng("adjoint-deficiency")
    grid = np.linspace(-2, 2, 9).astype(complex)
    worst = 0.0
    for w0 in (-1j, 1j, 0.7 + 0.9j, complex(s.draw_z(rng, 1, nonreal=True)[0])):
        g = star_from_kernel(s.space, complex(w0), s.gamma)
        lhs = fn_eval(star_apply(s.space, g), s.space, grid)
        rhs = np.conj(complex(w0)) * fn_eval(AtomKernel(complex(w0)),
                                             s.space, grid)
        scale = 1.0 + float(np.max(np.abs(rhs)))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))) / scale)
    return [_rec("adjoint-deficiency", worst, 1e-9, points=4)]


# ----------------------------------------------------------------------------
# scale checks
# ----------------------------------------------------------------------------

def check_sharp_isometries(s):
    rep = sharp_isometry_checks(s.space, HALF_PI)
    return [_rec("sharp-isometry-plus2", rep["plus2_max_rel"], 1e-8),
            _rec("sharp-isometry-plusF", rep["plusF_max_rel"], 1e-8),
            _rec("sharp-isometry-minusF-lower",
                 rep["minusF_lower_max_rel"], 1e-8)]


def check_kplus2_reproducing(s):
    rng = s.rng("k-plus2-reproducing")
    gam_dict = dictionary_gamma(s.ext_half)
    worst = 0.0
    for _ in range(20):
        w = complex(s.draw_z(rng, 1, span=1.8, ymax=1.0)[0])
        _, g = gam_dict[rng.integers(0, len(gam_dict))]
        kp = kernel_plus2(s.ext_half, w)
        ip = inner_plus2(s.ext_half, kp, g)
        ref = fn_eval(g.expr, s.space, w)
        worst = max(worst, abs(ip - ref) / (1.0 + abs(ref)))
    return [_rec("k-plus2-reproducing", worst, 1e-8, pairs=20)]


def check_duality(s):
    rng = s.rng("eq:duality-for-K")
    star_dict = dictionary_star(s.space, HALF_PI)
    worst = 0.0
    for _ in range(10):
        f = s.rand_B(rng)
        _, g_star = star_dict[rng.integers(0, len(star_dict))]
        lhs = pairing_F(s.space, f, g_star)
        rhs = inner_B(s.space, f, g_star.expr)
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(rhs)))
    recs = [_rec("eq:duality-for-K", worst, 1e-7, pairs=10)]
    assoc_elems = [
        AssocFunction(AtomKernel(0.0), ZERO),
        assoc_from_B(AtomKernel(0.5)),
        assoc_from_s(s.space, [(1.0, math.pi / 4)]),
        AssocFunction(AtomKernel(1j), AtomKernel(-1.0)),
        assoc_from_s(s.space, [(1.0, 0.0)]),
    ]
    worst = 0.0
    for f in assoc_elems:
        worst = max(worst, assoc_roundtrip(s.space, f))
    recs.append(_rec("assoc-roundtrip", worst, 1e-7,
                     elements=len(assoc_elems)))
    return recs


def check_nondensity(s):
    gap, k_norm = nondensity_gap(s.space, HALF_PI)
    err = max(0.0, 0.99 * k_norm - gap)
    return [_rec("nondensity-witness", err, 0.0,
                 gap=gap, kernel_norm=k_norm)]


def check_scale_chain(s):
    star_dict = dictionary_star(s.space, HALF_PI,
                                points=(0.0, 0.5, -0.5, 1j, -1j, 1 + 1j, 1 - 1j))
    gam_dict = dictionary_gamma(s.ext_half,
                                points=(0.0, 0.5, -0.5, 1j, -1j, 1 + 1j, 1 - 1j))
    worst = 0.0
    for w in (0.0, 1j, 0.5, 1 + 1j):
        g = GammaDomainElement(s.ext_half, AtomKernel(complex(w)), 1j)
        ns = scale_norms(s.ext_half, g, star_dict, gam_dict)
        nb = norm_B(s.space, g.expr)
        worst = max(worst,
                    ns.minus2_lower - ns.minusF_lower,
                    ns.minusF_lower - nb * (1 + 1e-8),
                    nb - ns.plusF * (1 + 1e-8),
                    abs(ns.plusF - ns.plus2) / ns.plus2 - 1e-8)
    return [_rec("scale-chain", max(worst, 0.0), 1e-7, elements=4)]


def check_annihilator(s):
    rng = s.rng("annihilator")
    worst = 0.0
    for g in (s.gamma, HALF_PI, math.pi / 6):
        ext = ExtensionHandle(s.space, g)
        phi = dual_from_s(s.space, [(1.0, g)], g)
        gam_dict = dictionary_gamma(ext)
        idx = rng.integers(0, len(gam_dict), 4)
        for i in idx:
            _, el = gam_dict[int(i)]
            g_star = star_from_gamma(el, g)
            worst = max(worst, abs(pairing_F(s.space, phi, g_star)))
            worst = max(worst, abs(pairing_minus2(ext, phi, el)))
    return [_rec("annihilator", worst, 1e-8, gammas=3)]


def check_pairing_consistency(s):
    rng = s.rng("pairing-consistency")
    worst = 0.0
    functionals = [
        dual_from_s(s.space, [(1.0, 0.0)], HALF_PI),
        dual_from_s(s.space, [(0.7, 0.0)], HALF_PI, b_part=AtomKernel(0.3)),
    ]
    gam_dict = dictionary_gamma(s.ext_half)
    for phi in functionals:
        for _ in range(5):
            _, el = gam_dict[int(rng.integers(0, len(gam_dict)))]
            p2 = pairing_minus2(s.ext_half, phi, el)
            pf = pairing_F(s.space, phi, star_from_gamma(el, HALF_PI))
            worst = max(worst, abs(p2 - pf) / (1.0 + abs(p2)))
    return [_rec("pairing-consistency", worst, 1e-8, functionals=2)]


def check_counterexample(s):
    rep = counterexample_run(1.0, s.space1)
    recs = [_rec("counter-example-zero", rep.zero_residual, 1e-12, a=1.0),
            _rec("counter-example-phi-norm",
                 abs(rep.norm_phi_prime_sq_quad - rep.norm_phi_prime_sq_closed)
                 / rep.norm_phi_prime_sq_closed, 1e-8, a=1.0),
            _rec("counter-example-gap", max(0.0, 0.01 - rep.rel_gap), 0.0,
                 rel_gap=rep.rel_gap,
                 norm_phi_prime=rep.norm_phi_prime,
                 norm_eta_prime=rep.norm_eta_prime,
                 fourier_constant=rep.fourier_constant)]
    return recs


# ----------------------------------------------------------------------------
# perturbation checks
# ----------------------------------------------------------------------------

def check_rhat_on_s0(s):
    rng = s.rng("lem:resolvent-on-s")
    worst = 0.0
    for w in (1j, 0.7 + 0.9j, 0.25, complex(s.draw_z(rng, 1, nonreal=True)[0])):
        r = rhat_on_s0(s.space, complex(w))
        for _ in range(3):
            f = s.rand_B(rng)
            ip = inner_B(s.space, r, f)
            sw = s_gamma(s.space, HALF_PI, np.conj(complex(w)))
            ref = -math.pi * fn_eval(f, s.space, np.conj(complex(w))) / sw
            worst = max(worst, abs(ip - ref) / (1.0 + abs(ref)))
    return [_rec("lem:resolvent-on-s", worst, 1e-8, points=4)]


def check_qfunc(s):
    rng = s.rng("eq:function-q")
    worst = 0.0
    for space in (s.space, s.space1):
        for _ in range(5):
            w = complex(s.draw_z(rng, 1, nonreal=True)[0])
            qd = qfunc(space, w, "definitional")
            qc = qfunc(space, w, "closed")
            worst = max(worst, abs(qd - qc) / (1.0 + abs(qc)))
    recs = [_rec("eq:function-q", worst, 1e-9, points=10)]
    worst = 0.0
    for space, a in ((s.space, s.a), (s.space1, 1.0)):
        for _ in range(5):
            w = complex(s.draw_z(rng, 1, nonreal=True, ymax=1.0)[0])
            qc = qfunc(space, w, "closed")
            ref = math.pi * np.tan(a * w)
            worst = max(worst, abs(qc - ref) / (1.0 + abs(ref)))
    recs.append(_rec("q-pw-closed-form", worst, 1e-10, points=10))
    xs = np.linspace(-2.0, 2.0, 5)
    ys = (0.3, 0.8, 1.5, 2.5)
    min_im = min(qfunc(s.space, complex(x, y), "closed").imag
                 for x in xs for y in ys)
    recs.append(_rec("q-herglotz", max(0.0, -min_im), 0.0,
                     grid=len(xs) * len(ys), min_im=min_im))
    return recs


def check_quasi_krein(s):
    rng = s.rng("quasi-krein")
    worst = 0.0
    worst_lam = 0.0
    for g in GAMMA_GRID:
        for w in (1j, 0.3 + 0.7j):
            for _ in range(3):
                f = s.rand_B(rng)
                err, lam_err = krein_diff_check(s.space, g, w, f)
                worst = max(worst, err)
                worst_lam = max(worst_lam, lam_err)
    return [_rec("quasi-krein", worst, 1e-9,
                 gammas=len(GAMMA_GRID), points=2),
            _rec("lambda-q-consistency", worst_lam, 1e-10,
                 gammas=len(GAMMA_GRID))]


def check_dom_alternative(s):
    rng = s.rng("teo:dom-selfadj-alternative")
    grid = np.linspace(-1.5, 1.5, 7).astype(complex)
    worst_re = 0.0
    worst_bc = 0.0
    for g in GAMMA_GRID:
        ext = ExtensionHandle(s.space, g)
        for _ in range(10):
            f = s.rand_B(rng)
            el = GammaDomainElement(ext, f, 1j)
            p = dom_gamma_decompose(s.space, g, el, validate=False)
            gv = fn_eval(el.expr, s.space, grid)
            pv = fn_eval(p.expr, s.space, grid)
            scale = 1.0 + float(np.max(np.abs(gv)))
            worst_re = max(worst_re, float(np.max(np.abs(gv - pv))) / scale)
            bc = boundary_functional(s.space, p.h)
            target = math.pi * p.b * (math.tan(g) + s_ratio_at_i(s.space).real)
            worst_bc = max(worst_bc, abs(bc - target) / (1.0 + abs(target)))
    return [_rec("dom-selfadj-alternative-reassembly", worst_re, 1e-9,
                 gammas=len(GAMMA_GRID), draws=10),
            _rec("dom-selfadj-alternative-boundary", worst_bc, 1e-8,
                 gammas=len(GAMMA_GRID), draws=10)]


def check_S_restriction(s):
    rng = s.rng("prop:S-as-restriction")
    phi0 = dual_from_s(s.space, [(1.0, 0.0)], HALF_PI)
    worst_ker = 0.0
    for _ in range(10):
        base = s.rand_B(rng)
        h, _ = dom_S_element(s.space, base)
        el = GammaDomainElement(s.ext_half, MulAffine(1j, h), 1j)
        worst_ker = max(worst_ker, abs(pairing_minus2(s.ext_half, phi0, el)))
        worst_ker = max(worst_ker, abs(boundary_functional(s.space, el)))
    min_sep = math.inf
    for _ in range(10):
        f = s.rand_B(rng, min_at_i=0.3)
        el = GammaDomainElement(s.ext_half, f, 1j)
        min_sep = min(min_sep, abs(boundary_functional(s.space, el)))
    return [_rec("prop:S-as-restriction-kernel", worst_ker, 1e-9, draws=10),
            _rec("prop:S-as-restriction-separation",
                 max(0.0, 1e-6 - min_sep), 0.0, min_abs=min_sep)]


def check_sigma0(s):
    rng = s.rng("eq:sigma_0")
    worst = 0.0
    for g in GAMMA_GRID:
        ext = ExtensionHandle(s.space, g)
        f = s.rand_B(rng)
        p = dom_gamma_decompose(s.space, g, GammaDomainElement(ext, f, 1j))
        lhs = pairing_s0_F(s.space, p)
        rhs = math.pi * p.b * math.tan(g)
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(rhs)))
    return [_rec("eq:sigma_0", worst, 1e-8, gammas=len(GAMMA_GRID))]


def check_action_s_gamma(s):
    rng = s.rng("thm:action-s-gamma")
    test_set = [GammaDomainElement(s.ext_half, AtomKernel(complex(w)), 1j)
                for w in (0.0, 0.5, -1.0, 1j, 1 - 1j)]
    worst = 0.0
    for g in GAMMA_GRID:
        ext = ExtensionHandle(s.space, g)
        f = s.rand_B(rng)
        p = dom_gamma_decompose(s.space, g, GammaDomainElement(ext, f, 1j))
        worst = max(worst, s_tilde_gamma_pairing_check(s.space, g, p, test_set))
    return [_rec("thm:action-s-gamma", worst, 1e-7,
                 gammas=len(GAMMA_GRID), tests=len(test_set))]


def check_cyclicity(s):
    w_sets = [(1j, 1 + 1j),
              (1j, 1 + 1j, -1 + 2j, 0.5 + 0.5j),
              (1j, 1 + 1j, -1 + 2j, 0.5 + 0.5j, 2j, -0.5 + 1.5j,
               1.5 + 0.5j, -2 + 1j)]
    targets = [AtomKernel(0.0), AtomKernel(0.3),
               resolvent_apply(s.ext_half, 1j, AtomKernel(-0.5))]
    err = 0.0
    residuals = {}
    for t_i, target in enumerate(targets):
        rs = [cyclicity_check(s.space, ws, target)["residual"]
              for ws in w_sets]
        residuals["target%d" % t_i] = rs
        err = max(err, max(0.0, rs[1] - rs[0]), max(0.0, rs[2] - rs[1]))
    member = cyclicity_check(s.space, w_sets[0], AtomKernel(np.conj(1 + 1j)))
    err = max(err, member["residual"] - 1e-7)
    return [_rec("cyclicity", max(err, 0.0), 0.0, residuals=residuals)]


def check_krein_eigenvalues(s):
    worst = 0.0
    for g in (math.pi / 6, math.pi / 4, 2 * math.pi / 3):
        poles = rank_one_pole_points(s.space, g, -3.0, 3.0)
        zeros = find_zeros(s.space, g, -3.0, 3.0)
        lo, hi = -2.9, 2.9
        poles = poles[(poles > lo) & (poles < hi)]
        zeros = zeros[(zeros > lo) & (zeros < hi)]
        if len(poles) != len(zeros):
            worst = max(worst, 1.0)
        else:
            worst = max(worst, float(np.max(np.abs(poles - zeros))))
    return [_rec("krein-eigenvalue-consistency", worst, 1e-8, gammas=3)]


# ----------------------------------------------------------------------------
# Registry and runner
# ----------------------------------------------------------------------------

REGISTRY = [
    check_hb_inequality,
    check_kernel_via_s,
    check_s_beta,
    check_kernel_symmetries,
    check_kernel_diag_continuity,
    check_sampling_vs_quadrature,
    check_parseval,
    check_reproducing,
    check_spectra,
    check_operator_identities,
    check_cayley_unitarity,
    check_resolvent_identity,
    check_eigen_relation,
    check_dom_S_consistency,
    check_adjoint_deficiency,
    check_sharp_isometries,
    check_kplus2_reproducing,
    check_duality,
    check_nondensity,
    check_scale_chain,
    check_annihilator,
    check_pairing_consistency,
    check_counterexample,
    check_rhat_on_s0,
    check_qfunc,
    check_quasi_krein,
    check_dom_alternative,
    check_S_restriction,
    check_sigma0,
    check_action_s_gamma,
    check_cyclicity,
    check_krein_eigenvalues,
]


def _pool_size():
    env = os.environ.get("DBSCALE_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def run_suite(a=math.pi, gamma=math.pi / 4, seed=0, grid_n=41,
              tol_cap=None, threads=None):
    """Run every registered check; returns records sorted by identifier."""
    suite = Suite(a=a, gamma=gamma, seed=seed, grid_n=grid_n)
    # warm shared caches single-threaded before the pool shares them
    inner_B(suite.space, AtomKernel(0.0), AtomKernel(0.0))
    quad_inner(suite.space, AtomKernel(0.0), AtomKernel(0.0), suite.quad)

    def run_one(fn):
        t0 = time.perf_counter()
        recs = fn(suite)
        dt = (time.perf_counter() - t0) * 1000.0 / max(len(recs), 1)
        for r in recs:
            r.runtime_ms = dt
        return recs

    workers = threads if threads is not None else _pool_size()
    records = []
    if workers <= 1:
        for fn in REGISTRY:
            records.extend(run_one(fn))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for recs in pool.map(run_one, REGISTRY):
                records.extend(recs)
    if tol_cap is not None:
        for r in records:
            r.tol = min(r.tol, float(tol_cap))
            r.passed = r.max_abs_err <= r.tol
    records.sort(key=lambda r: (r.check_id, repr(sorted(r.params.items()))))
    return records
