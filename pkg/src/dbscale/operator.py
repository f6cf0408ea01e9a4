"""Multiplication operator machinery: canonical selfadjoint extensions,
resolvents, Cayley transforms and the adjoint-domain decompositions.

Everything is carried symbolically: domain elements are stored by their
resolvent generators, operator applications produce new expression trees,
and the defect-direction bookkeeping uses the closed two-kernel forms, so
all identities here hold to rounding before any quadrature enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SpectralPoint
from .fncore import (AtomKernel, AtomS, DiffQuotient, MulAffine, fn_eval,
                     lincomb, sharp)

SPECTRAL_TOL = 1e-12
HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class ExtensionHandle:
    """The canonical selfadjoint extension indexed by gamma in [0, pi)."""

    space: object
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", float(self.gamma) % math.pi)

    def s_value(self, z):
        return fn_eval(AtomS(self.gamma), self.space, z)

    def s_atom(self):
        return AtomS(self.gamma)


def extension(space, gamma):
    return ExtensionHandle(space, gamma)


# ----------------------------------------------------------------------------
# Resolvent, action, Cayley transform
# ----------------------------------------------------------------------------

def resolvent_apply(ext, w, f):
    """g = (f - (s_g / s_g(w)) f(w)) / (z - w), the resolvent image of f.

    Satisfies (z - w) g(z) + (s_g(z)/s_g(w)) f(w) = f(z) identically.
    Refused when |s_g(w)| is below the spectral tolerance.
    """
    w = complex(w)
    sw = ext.s_value(w)
    if abs(sw) <= SPECTRAL_TOL:
        raise SpectralPoint("w=%s lies in (or on top of) the spectrum" % w)
    fw = fn_eval(f, ext.space, w)
    return DiffQuotient(f, fw / sw, ext.s_atom(), w)


class GammaDomainElement:
    """Element of dom(S_gamma), stored by its generator: g = R_gamma(w) f."""

    def __init__(self, ext, generator, w=1j):
        self.ext = ext
        self.generator = generator
        self.w = complex(w)
        self.expr = resolvent_apply(ext, self.w, generator)

    def sharp(self):
        return GammaDomainElement(self.ext, sharp(self.generator),
                                  np.conj(self.w))


def apply_S_gamma(ext, g):
    """S_gamma g = z g(z) + f(w) s_gamma(z) / s_gamma(w) as an expression."""
    fw = fn_eval(g.generator, ext.space, g.w)
    sw = ext.s_value(g.w)
    return lincomb([1.0, fw / sw], [MulAffine(0.0, g.expr), ext.s_atom()])


def s_minus_i(ext, g):
    """(S_gamma - i) g as an expression tree."""
    return lincomb([1.0, -1j], [apply_S_gamma(ext, g), g.expr])


def cayley_apply(ext, w, f):
    """U(w) f = f + (w - conj w) R_gamma(w) f, unitary for nonreal w."""
    w = complex(w)
    if w.imag == 0:
        raise ValueError("Cayley transform needs a nonreal point")
    return lincomb([1.0, w - np.conj(w)], [f, resolvent_apply(ext, w, f)])


def eigen_element(ext, mu, w=1j):
    """The eigenfunction s_gamma / (z - mu) at mu in spec(S_gamma)."""
    u = DiffQuotient(ext.s_atom(), 0.0, None, complex(mu))
    return GammaDomainElement(ext, (complex(mu) - complex(w)) * u, w)


def dom_S_element(space, base, zero_at=-1j):
    """An element of dom(S): h = g / (z - zero_at) with g(zero_at) = 0.

    ``base`` is any space element; the kernel at i is used to cancel the
    value at ``zero_at``.  Returns (h, zh) where zh = z * h is again in
    the space.
    """
    z0 = complex(zero_at)
    anchor = AtomKernel(1j)
    val = fn_eval(base, space, z0)
    ank = fn_eval(anchor, space, z0)
    g = lincomb([1.0, -val / ank], [base, anchor])
    h = DiffQuotient(g, 0.0, None, z0)
    zh = MulAffine(0.0, h)
    return h, zh


# ----------------------------------------------------------------------------
# The adjoint and its decompositions
# ----------------------------------------------------------------------------

def rho_bar(space, gamma):
    """s_gamma(i) / s_gamma(-i); unimodular since s_gamma is real entire."""
    s = AtomS(float(gamma) % math.pi)
    return fn_eval(s, space, 1j) / fn_eval(s, space, -1j)


def defect_direction(space, gamma):
    """d = S_gamma R_gamma(i) k(., i) = k(., i) + i R_gamma(i) k(., i).

    The one-dimensional complement of dom(S_gamma) in dom(S*); it also
    equals (k(., i) + rho k(., -i)) / 2 with rho = s_gamma(-i)/s_gamma(i).
    """
    ext = ExtensionHandle(space, gamma)
    k_i = AtomKernel(1j)
    return lincomb([1.0, 1j], [k_i, resolvent_apply(ext, 1j, k_i)])


class StarDomainElement:
    """Element of dom(S*): g = h + b d with h = R_gamma_ref(i) f.

    ``f`` (the h-part generator) and the scalar ``b`` determine the element
    together with the reference extension angle (default pi/2).
    """

    def __init__(self, space, f, b, gamma_ref=HALF_PI):
        self.space = space
        self.gamma_ref = float(gamma_ref) % math.pi
        self.f = f
        self.b = complex(b)
        self.ext = ExtensionHandle(space, self.gamma_ref)
        self.h = GammaDomainElement(self.ext, f, 1j)
        self._d = defect_direction(space, self.gamma_ref)
        self.expr = lincomb([1.0, self.b], [self.h.expr, self._d])
        # S* g = S_gamma h - b R_gamma(i) k(., i) and S_gamma h = i h + f
        rk = resolvent_apply(self.ext, 1j, AtomKernel(1j))
        self.star_expr = lincomb([1j, 1.0, -self.b], [self.h.expr, f, rk])

    def sharp(self):
        """Conjugated element: generator U(-i) f#, coefficient conj(b) rho_bar."""
        fs = sharp(self.f)
        f_new = lincomb([1.0, -2j], [fs, resolvent_apply(self.ext, -1j, fs)])
        b_new = np.conj(self.b) * rho_bar(self.space, self.gamma_ref)
        return StarDomainElement(self.space, f_new, b_new, self.gamma_ref)


def star_apply(space, g):
    """S* g as an expression tree."""
    assert g.space is space
    return g.star_expr


def star_adjoint_parts(g):
    """Split g in dom(S*) as h0 + a+ k(., -i) + a- k(., i), h0 in dom(S).

    The defect coefficients come from graph-inner-product orthogonality of
    the von Neumann decomposition, which reduces to four point evaluations.
    """
    space = g.space
    gi = fn_eval(g.expr, space, 1j)
    gm = fn_eval(g.expr, space, -1j)
    si = fn_eval(g.star_expr, space, 1j)
    sm = fn_eval(g.star_expr, space, -1j)
    kii = fn_eval(AtomKernel(1j), space, 1j)
    kmm = fn_eval(AtomKernel(-1j), space, -1j)
    a_minus = (gi + 1j * si) / (2.0 * kii)
    a_plus = (gm - 1j * sm) / (2.0 * kmm)
    h0 = lincomb([1.0, -a_plus, -a_minus],
                 [g.expr, AtomKernel(-1j), AtomKernel(1j)])
    return h0, a_plus, a_minus


def star_from_adjoint_parts(space, gamma_ref, h0, a_plus, a_minus):
    """Assemble a StarDomainElement from (h0 in dom(S), defect coefficients)."""
    gamma_ref = float(gamma_ref) % math.pi
    s = AtomS(gamma_ref)
    s_i = fn_eval(s, space, 1j)
    s_m = fn_eval(s, space, -1j)
    b = (a_plus * s_i + a_minus * s_m) / s_m
    dmin = (a_plus * s_i - a_minus * s_m) / s_m
    f = lincomb([1.0, 1j * dmin], [MulAffine(1j, h0), AtomKernel(1j)])
    return StarDomainElement(space, f, b, gamma_ref)


def star_from_kernel(space, w0, gamma_ref=HALF_PI):
    """k(., w0) as a dom(S*) element (it satisfies S* k = conj(w0) k)."""
    w0 = complex(w0)
    wc = np.conj(w0)
    kii = fn_eval(AtomKernel(1j), space, 1j)
    kmm = fn_eval(AtomKernel(-1j), space, -1j)
    k_at_i = fn_eval(AtomKernel(w0), space, 1j)
    k_at_m = fn_eval(AtomKernel(w0), space, -1j)
    a_minus = (1.0 + 1j * wc) * k_at_i / (2.0 * kii)
    a_plus = (1.0 - 1j * wc) * k_at_m / (2.0 * kmm)
    h0 = lincomb([1.0, -a_plus, -a_minus],
                 [AtomKernel(w0), AtomKernel(-1j), AtomKernel(1j)])
    return star_from_adjoint_parts(space, gamma_ref, h0, a_plus, a_minus)


def star_from_gamma(g, gamma_ref=HALF_PI):
    """Embed a dom(S_gamma) element into the dom(S*) representation."""
    h0, a_plus, a_minus = _gamma_adjoint_parts(g)
    return star_from_adjoint_parts(g.ext.space, gamma_ref, h0, a_plus, a_minus)


def _gamma_adjoint_parts(g):
    space = g.ext.space
    expr = g.expr
    act = apply_S_gamma(g.ext, g)
    gi = fn_eval(expr, space, 1j)
    gm = fn_eval(expr, space, -1j)
    si = fn_eval(act, space, 1j)
    sm = fn_eval(act, space, -1j)
    kii = fn_eval(AtomKernel(1j), space, 1j)
    kmm = fn_eval(AtomKernel(-1j), space, -1j)
    a_minus = (gi + 1j * si) / (2.0 * kii)
    a_plus = (gm - 1j * sm) / (2.0 * kmm)
    h0 = lincomb([1.0, -a_plus, -a_minus],
                 [expr, AtomKernel(-1j), AtomKernel(1j)])
    return h0, a_plus, a_minus


def star_convert(g, new_gamma_ref):
    """Re-express a StarDomainElement against another reference extension."""
    h0, a_plus, a_minus = star_adjoint_parts(g)
    return star_from_adjoint_parts(g.space, new_gamma_ref, h0, a_plus, a_minus)


# ----------------------------------------------------------------------------
# Identity checks used by the verification suite
# ----------------------------------------------------------------------------

def default_check_grid(span=2.0, n=9, rows=(0.0, 0.5, -0.5)):
    xs = np.linspace(-span, span, n)
    return np.concatenate([xs + 1j * y for y in rows])


def quotient_kernel_identity_check(ext, v, w, grid=None):
    """Max discrepancy of the difference-quotient form of kernel shifts:

    (k(z, conj w) - k(z, conj v)) / (w - v)
        = R_gamma(v) k(z, conj w)
          + (s_gamma(w)/s_gamma(v) - 1) k(z, conj v) / (w - v).
    """
    v, w = complex(v), complex(w)
    if v == w:
        raise ValueError("needs v != w")
    space = ext.space
    if grid is None:
        grid = default_check_grid()
    kw = AtomKernel(np.conj(w))
    kv = AtomKernel(np.conj(v))
    sv = ext.s_value(v)
    if abs(sv) <= SPECTRAL_TOL or abs(ext.s_value(w)) <= SPECTRAL_TOL:
        raise SpectralPoint("v or w is a spectral point of the extension")
    lhs = lincomb([1.0 / (w - v), -1.0 / (w - v)], [kw, kv])
    rhs = lincomb([1.0, (ext.s_value(w) / sv - 1.0) / (w - v)],
                  [resolvent_apply(ext, v, kw), kv])
    diff = fn_eval(lhs, space, grid) - fn_eval(rhs, space, grid)
    return float(np.max(np.abs(diff)))


def symmetry_identity_check(ext, v, w, grid=None):
    """Max discrepancy of s(v) R(v) k(., conj w) = s(w) R(w) k(., conj v)."""
    v, w = complex(v), complex(w)
    space = ext.space
    if grid is None:
        grid = default_check_grid()
    lhs = ext.s_value(v) * resolvent_apply(ext, v, AtomKernel(np.conj(w)))
    rhs = ext.s_value(w) * resolvent_apply(ext, w, AtomKernel(np.conj(v)))
    diff = fn_eval(lhs, space, grid) - fn_eval(rhs, space, grid)
    return float(np.max(np.abs(diff)))


def cayley_kernel_identity_check(ext, w, grid=None):
    """Max discrepancy of s(conj w) k(z, conj w) = s(w) U(w) k(z, w)."""
    w = complex(w)
    space = ext.space
    if grid is None:
        grid = default_check_grid()
    lhs = ext.s_value(np.conj(w)) * AtomKernel(np.conj(w))
    rhs = ext.s_value(w) * cayley_apply(ext, w, AtomKernel(w))
    diff = fn_eval(lhs, space, grid) - fn_eval(rhs, space, grid)
    return float(np.max(np.abs(diff)))


def cayley_on_kernel_check(ext, w0, z0, grid=None):
    """Max discrepancy of the two-term form of U(conj w0) k(., z0):

    U(conj w0) k(v, z0)
        = ((conj z0 - w0)/(conj z0 - conj w0)) k(v, z0)
          - ((conj w0 - w0)/(conj z0 - conj w0))
            (s(conj z0)/s(conj w0)) k(v, w0),   z0 != w0.
    """
    w0, z0 = complex(w0), complex(z0)
    if z0 == w0:
        raise ValueError("needs z0 != w0")
    space = ext.space
    if grid is None:
        grid = default_check_grid()
    zc, wc = np.conj(z0), np.conj(w0)
    lhs = cayley_apply(ext, wc, AtomKernel(z0))
    c1 = (zc - w0) / (zc - wc)
    c2 = -((wc - w0) / (zc - wc)) * (ext.s_value(zc) / ext.s_value(wc))
    rhs = lincomb([c1, c2], [AtomKernel(z0), AtomKernel(w0)])
    diff = fn_eval(lhs, space, grid) - fn_eval(rhs, space, grid)
    return float(np.max(np.abs(diff)))
