"""The two Hilbert scales built on the multiplication operator.

Graph norms (+2 and +F levels) are computed through generators, dual
objects (-F and -2 levels) are carried by their associated-function
representatives (pairs g, h with f = z g + h) together with pairing rules;
the abstract completions are never materialized.  Dual norms are reported
as certified dictionary lower bounds only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import EmptyDictionary, LevelMismatch
from .fncore import (AtomKernel, AtomS, DiffQuotient, EntireFn, LinComb,
                     MulAffine, fn_eval, lincomb, sharp)
from .numerics import find_zeros, inner_B, norm_B, quad_inner
from .operator import (ExtensionHandle, GammaDomainElement, StarDomainElement,
                       apply_S_gamma, resolvent_apply, s_minus_i,
                       star_adjoint_parts, star_from_gamma)

HALF_PI = 0.5 * math.pi

#: the identically-zero function
ZERO = LinComb((), ())


# ----------------------------------------------------------------------------
# Associated functions and dual functionals
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class AssocFunction:
    """f = z g + h with g, h in the space; the representative of a dual
    element at the -F level."""

    g: EntireFn
    h: EntireFn

    @property
    def expr(self):
        return lincomb([1.0, 1.0], [MulAffine(0.0, self.g), self.h])

    def sharp(self):
        return AssocFunction(sharp(self.g), sharp(self.h))


def assoc_from_B(f):
    """A space element viewed inside the associated functions (g = 0)."""
    return AssocFunction(ZERO, f)


@dataclass(frozen=True)
class DualLevel:
    kind: str  # "F-1" or "B-2"
    gamma: Optional[float] = None


F_MINUS_1 = DualLevel("F-1")


def b_minus_2(gamma):
    return DualLevel("B-2", float(gamma) % math.pi)


@dataclass(frozen=True)
class DualFunctional:
    """A dual element carried by its associated-function representative.

    ``s_combination`` records the part of the representative that is a
    combination of s-family members (pairs (coeff, beta)); those summands
    have closed-form regularized resolvents, everything else sits in
    ``b_part`` which must belong to the space itself.
    """

    rep: AssocFunction
    level: DualLevel
    s_combination: Tuple[Tuple[complex, float], ...] = ()
    b_part: Optional[EntireFn] = None


def assoc_from_s(space, combination, b_part=None):
    """Associated-function representative of sum(c_j s_{beta_j}) + b_part.

    Each s_beta is written as (z - mu) u with u = s_beta/(z - mu) in the
    space, mu a real zero of s_beta, giving the z g + h split directly.
    """
    a = space.type_a
    gs, hs, cs, mus = [], [], [], []
    for c, beta in combination:
        beta = float(beta)
        zeros = find_zeros(space, beta, -1.5 * math.pi / a, 1.5 * math.pi / a)
        mu = float(zeros[np.argmin(np.abs(zeros))])
        u = DiffQuotient(AtomS(beta), 0.0, None, mu)
        gs.append(u)
        cs.append(complex(c))
        mus.append(mu)
    g = lincomb(cs, gs) if gs else ZERO
    h_terms = [(-c * mu) for c, mu in zip(cs, mus)]
    h = lincomb(h_terms, gs) if gs else ZERO
    if b_part is not None:
        h = lincomb([1.0, 1.0], [h, b_part])
    return AssocFunction(g, h)


def dual_from_s(space, combination, gamma_level, b_part=None):
    """DualFunctional for an s-family combination at the -2 level."""
    rep = assoc_from_s(space, combination, b_part)
    return DualFunctional(rep, b_minus_2(gamma_level),
                          tuple((complex(c), float(b)) for c, b in combination),
                          b_part)


# ----------------------------------------------------------------------------
# Graph norms
# ----------------------------------------------------------------------------

def inner_plus2(ext, g1, g2, engine=None):
    """Graph inner product <(S-i)g1, (S-i)g2> on dom(S_gamma)."""
    space = ext.space
    e1 = g1.generator if g1.w == 1j else s_minus_i(ext, g1)
    e2 = g2.generator if g2.w == 1j else s_minus_i(ext, g2)
    return inner_B(space, e1, e2, engine)


def norm_plus2(ext, g, engine=None):
    val = inner_plus2(ext, g, g, engine)
    return math.sqrt(max(val.real, 0.0))


def inner_plusF(space, f_star, g_star, engine=None):
    """Graph inner product of dom(S*): <h_f, h_g>_{+2} + conj(b_f) b_g |k(.,i)|^2."""
    if abs(f_star.gamma_ref - g_star.gamma_ref) > 1e-15:
        from .operator import star_convert
        g_star = star_convert(g_star, f_star.gamma_ref)
    hh = inner_B(space, f_star.f, g_star.f, engine)
    kii = fn_eval(AtomKernel(1j), space, 1j)
    return hh + np.conj(f_star.b) * g_star.b * kii


def norm_plusF(space, f_star, engine=None):
    val = inner_plusF(space, f_star, f_star, engine)
    return math.sqrt(max(val.real, 0.0))


def kernel_plus2(ext, w):
    """The +2 reproducing element (S_gamma^2 + I)^{-1} k(., w).

    Returned as a domain element with generator R_gamma(-i) k(., w); its
    +2 inner product against g in dom(S_gamma) reproduces g(w).
    """
    gen = resolvent_apply(ext, -1j, AtomKernel(complex(w)))
    return GammaDomainElement(ext, gen, 1j)


# ----------------------------------------------------------------------------
# Pairings
# ----------------------------------------------------------------------------

def _rhat_s_family(space, gamma, beta, w):
    """Closed form of the regularized resolvent on s_beta at level gamma:

        Rhat_gamma(w) s_beta = pi sin(beta - gamma) / s_gamma(w) * k(., conj w).

    For beta = gamma this is the zero element: s_gamma annihilates the
    gamma-domain, i.e. it represents 0 at the -2 level.
    """
    sw = fn_eval(AtomS(float(gamma) % math.pi), space, w)
    coef = math.pi * math.sin(float(beta) - float(gamma)) / sw
    return coef, AtomKernel(np.conj(complex(w)))


def pairing_minus2(ext, phi, g, engine=None):
    """The (-2, +2) duality pairing <phi, g>_2 = <Rhat(-i) phi, (S-i) g>.

    ``phi`` is either an honest space element (then the pairing extends the
    inner product) or a DualFunctional at the matching -2 level, whose
    regularized resolvent is assembled from the s-family closed form.
    """
    space = ext.space
    rhs = g.generator if g.w == 1j else s_minus_i(ext, g)
    if isinstance(phi, EntireFn):
        lh = resolvent_apply(ext, -1j, phi)
        return inner_B(space, lh, rhs, engine)
    if not isinstance(phi, DualFunctional):
        raise TypeError("phi must be a space element or a DualFunctional")
    if phi.level.kind != "B-2" or abs(phi.level.gamma - ext.gamma) > 1e-15:
        raise LevelMismatch(
            "functional lives at %r, pairing requested at gamma=%.6f"
            % (phi.level, ext.gamma))
    coeffs, terms = [], []
    for c, beta in phi.s_combination:
        coef, knode = _rhat_s_family(space, ext.gamma, beta, -1j)
        coeffs.append(c * coef)
        terms.append(knode)
    if phi.b_part is not None:
        coeffs.append(1.0)
        terms.append(resolvent_apply(ext, -1j, phi.b_part))
    if not terms:
        return 0.0 + 0.0j
    return inner_B(space, lincomb(coeffs, terms), rhs, engine)


def kernel_domain_element(ext, mu):
    """k(., mu) for real mu in spec(S_gamma) as a domain element."""
    mu = complex(mu)
    return GammaDomainElement(ext, (mu - 1j) * AtomKernel(mu), 1j)


def pairing_F(space, f, g_star, engine=None):
    """The (-F, +F) duality pairing against a dom(S*) element:

        <f, g>_F = integral conj(f) h0 / |e|^2
                   + a_plus f#(i) + a_minus f#(-i),

    with g = h0 + a_plus k(., -i) + a_minus k(., i), h0 in dom(S).
    The integral uses the quadrature engine (the h0 part need not have a
    sampling expansion with fast decay).
    """
    if isinstance(f, DualFunctional):
        f = f.rep
    if isinstance(f, EntireFn):
        f = assoc_from_B(f)
    h0, a_plus, a_minus = star_adjoint_parts(g_star)
    fx = f.expr
    integral = quad_inner(space, fx, h0, engine)
    fs = sharp(fx)
    return (integral + a_plus * fn_eval(fs, space, 1j)
            + a_minus * fn_eval(fs, space, -1j))


def assoc_roundtrip(space, f, grid=None, engine=None):
    """Recover the representative from its functional through kernels.

    Pairs the functional of f with k(., z) over the grid and compares the
    outcome to the pointwise values of z g(z) + h(z); returns the maximum
    discrepancy.
    """
    from .operator import star_from_kernel
    if grid is None:
        grid = np.linspace(-2.0, 2.0, 9)
    worst = 0.0
    for z in np.atleast_1d(grid):
        k_star = star_from_kernel(space, complex(z))
        recovered = np.conj(pairing_F(space, f, k_star, engine))
        direct = fn_eval(f.expr, space, complex(z))
        worst = max(worst, abs(recovered - direct))
    return worst


# ----------------------------------------------------------------------------
# Dictionary lower bounds and reports
# ----------------------------------------------------------------------------

DICTIONARY_POINTS = (0.0, 0.5, -0.5, 1.0, -1.0, 1j, -1j, 1 + 1j, 1 - 1j)


def dictionary_B(space, gamma=HALF_PI, points=DICTIONARY_POINTS,
                 resolvent_images=True):
    """Kernel dictionary (conjugation-closed) plus resolvent images."""
    ext = ExtensionHandle(space, gamma)
    out = [("k(%s)" % _fmt(w), AtomKernel(complex(w))) for w in points]
    if resolvent_images:
        for w in points:
            out.append(("R(i)k(%s)" % _fmt(w),
                        resolvent_apply(ext, 1j, AtomKernel(complex(w)))))
            out.append(("R(-i)k(%s)" % _fmt(w),
                        resolvent_apply(ext, -1j, AtomKernel(complex(w)))))
    return out


def _fmt(w):
    w = complex(w)
    if w.imag == 0:
        return "%g" % w.real
    return "%g%+gi" % (w.real, w.imag)


def dictionary_gamma(ext, points=DICTIONARY_POINTS):
    """dom(S_gamma) dictionary: resolvent images of the kernel dictionary."""
    return [("R(i)k(%s)" % _fmt(w),
             GammaDomainElement(ext, AtomKernel(complex(w)), 1j))
            for w in points]


def dictionary_star(space, gamma=HALF_PI, points=DICTIONARY_POINTS,
                    b_values=(0.0, 1.0)):
    """dom(S*) dictionary: (generator, b) combinations; conjugation-closed."""
    out = []
    for w in points:
        for b in b_values:
            out.append(("star[k(%s),b=%s]" % (_fmt(w), _fmt(b)),
                        StarDomainElement(space, AtomKernel(complex(w)),
                                          b, gamma)))
    return out


def minusF_lower(space, f, dictionary, engine=None):
    """Certified lower bound for the -F norm: sup |<f, g>_F| / |g|_{+F}.

    Monotone in the dictionary; never exceeds the true dual norm.
    """
    if not dictionary:
        raise EmptyDictionary("minusF_lower needs a nonempty dictionary")
    best = 0.0
    for _, g_star in dictionary:
        denom = norm_plusF(space, g_star, engine)
        if denom == 0.0:
            continue
        best = max(best, abs(pairing_F(space, f, g_star, engine)) / denom)
    return best


def minus2_lower(ext, phi, dictionary, engine=None):
    """Certified lower bound for the -2 norm over a dom(S_gamma) dictionary."""
    if not dictionary:
        raise EmptyDictionary("minus2_lower needs a nonempty dictionary")
    best = 0.0
    for _, g in dictionary:
        denom = norm_plus2(ext, g, engine)
        if denom == 0.0:
            continue
        best = max(best, abs(pairing_minus2(ext, phi, g, engine)) / denom)
    return best


@dataclass(frozen=True)
class ScaleNorms:
    plus2: float
    plusF: float
    minusF_lower: float
    minus2_lower: float


def scale_norms(ext, g, star_dict=None, gamma_dict=None, engine=None):
    """All four scale levels for a dom(S_gamma) element."""
    space = ext.space
    if star_dict is None:
        star_dict = dictionary_star(space, ext.gamma)
    if gamma_dict is None:
        gamma_dict = dictionary_gamma(ext)
    plus2 = norm_plus2(ext, g, engine)
    plusF = norm_plusF(space, star_from_gamma(g, ext.gamma), engine)
    mf = minusF_lower(space, assoc_from_B(g.expr), star_dict, engine)
    m2 = minus2_lower(ext, g.expr, gamma_dict, engine)
    return ScaleNorms(plus2, plusF, mf, m2)


def nondensity_gap(space, gamma, gamma_generators=None, engine=None):
    """+F distance from the defect direction to a dom(S_gamma) dictionary.

    The b-component is +F-orthogonal to dom(S_gamma), so the distance can
    never drop below |k(., i)|; returns (min distance, |k(., i)|).
    """
    d_star = StarDomainElement(space, ZERO, 1.0, gamma)
    if gamma_generators is None:
        gamma_generators = [AtomKernel(complex(w)) for w in DICTIONARY_POINTS[:8]]
    dists = []
    for f in gamma_generators:
        diff = StarDomainElement(space, -1.0 * f, 1.0, gamma)
        dists.append(norm_plusF(space, diff, engine))
    k_norm = math.sqrt(fn_eval(AtomKernel(1j), space, 1j).real)
    return min(dists), k_norm


def sharp_isometry_checks(space, gamma=HALF_PI, engine=None):
    """Conjugation isometries of both graph norms and of the -F lower bound.

    Returns a report with the worst relative deviations over the default
    dictionaries (all conjugation-closed).
    """
    ext = ExtensionHandle(space, gamma)
    worst2 = 0.0
    for w in (0.0, 0.5, 1j, 1 + 1j):
        g = GammaDomainElement(ext, AtomKernel(complex(w)), 1j)
        n1 = norm_plus2(ext, g, engine)
        n2 = norm_plus2(ext, g.sharp(), engine)
        worst2 = max(worst2, abs(n1 - n2) / n1)
    worstF = 0.0
    for w, b in ((0.0, 0.0), (0.5, 1.0), (1j, 1.0), (1 + 1j, 2.0 - 1j)):
        g = StarDomainElement(space, AtomKernel(complex(w)), b, gamma)
        n1 = norm_plusF(space, g, engine)
        n2 = norm_plusF(space, g.sharp(), engine)
        worstF = max(worstF, abs(n1 - n2) / n1)
    star_dict = dictionary_star(space, gamma, points=(0.0, 1j, -1j, 0.5, -0.5))
    worstL = 0.0
    for f in (assoc_from_B(AtomKernel(0.5)),
              AssocFunction(AtomKernel(0.0), AtomKernel(1j))):
        l1 = minusF_lower(space, f, star_dict, engine)
        l2 = minusF_lower(space, f.sharp(), star_dict, engine)
        worstL = max(worstL, abs(l1 - l2) / max(l1, 1e-30))
    return {"plus2_max_rel": worst2, "plusF_max_rel": worstF,
            "minusF_lower_max_rel": worstL}


# ----------------------------------------------------------------------------
# The Paley-Wiener counterexample
# ----------------------------------------------------------------------------

_GL64 = np.polynomial.legendre.leggauss(64)


def _gl_integral(fn, lo, hi, panels=40):
    xg, wg = _GL64
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    return np.dot(weights, fn(nodes))


@dataclass(frozen=True)
class CounterexampleReport:
    a: float
    w0: complex
    zero_residual: float
    norm_phi_prime: float
    norm_eta_prime: float
    rel_gap: float
    norm_phi_prime_sq_quad: float
    norm_phi_prime_sq_closed: float
    fourier_constant: float


def counterexample_eta(a, x):
    """eta(x) = e^{-x} + i (2a/pi) e^{-x} (1 + e^{-i pi x / a})."""
    x = np.asarray(x, dtype=float)
    return np.exp(-x) * (1.0 + 1j * (2.0 * a / math.pi)
                         * (1.0 + np.exp(-1j * math.pi * x / a)))


def counterexample_eta_prime(a, x):
    x = np.asarray(x, dtype=float)
    c = 2.0 * a / math.pi
    return (-(1.0 + 1j * c) * np.exp(-x)
            + (2.0 - 1j * c) * np.exp(-x) * np.exp(-1j * math.pi * x / a))


def counterexample_run(a, space=None):
    """Quantify the failure of the +F quotient-map isometry on PW(a).

    phi(x) = e^{-x} transforms to f(z) = 2 sin((z+i)a)/(z+i), which vanishes
    at w0 = pi/a - i; applying the quotient map at w0 multiplies the
    transform side by an isometry of the space but changes the derivative
    norm of the pre-image from phi to eta.  The report carries both norms;
    their gap realizes the non-isometry.
    """
    a = float(a)
    if a <= 0:
        raise ValueError("counterexample needs a > 0")
    w0 = math.pi / a - 1j
    f_w0 = 2.0 * np.sin((w0 + 1j) * a) / (w0 + 1j)
    phi_sq = _gl_integral(lambda x: np.exp(-2.0 * x), -a, a)
    eta_sq = _gl_integral(lambda x: np.abs(counterexample_eta_prime(a, x)) ** 2,
                          -a, a)
    norm_phi = math.sqrt(phi_sq.real)
    norm_eta = math.sqrt(eta_sq.real)
    fourier_const = float("nan")
    if space is not None:
        # measured proportionality between the transform-side norm and the
        # L2(-a, a) norm (the classical value is 2 pi)
        f_expr = (2.0 * math.pi) * AtomKernel(1j)
        fsq = quad_inner(space, f_expr, f_expr).real
        phisq = _gl_integral(lambda x: np.exp(-2.0 * x), -a, a).real
        fourier_const = fsq / phisq
    return CounterexampleReport(
        a=a, w0=w0, zero_residual=abs(f_w0),
        norm_phi_prime=norm_phi, norm_eta_prime=norm_eta,
        rel_gap=abs(norm_eta - norm_phi) / norm_phi,
        norm_phi_prime_sq_quad=float(phi_sq.real),
        norm_phi_prime_sq_closed=math.sinh(2.0 * a),
        fourier_constant=fourier_const)
