"""Rank-one singular perturbation machinery around the pi/2 extension.

The perturbation direction is the gamma=0 family member s_0, which lies
outside the space; every object touching it (regularized resolvents, the
boundary functional, Krein's Q-function, the perturbed operator) is handled
through closed forms and pairings at the -2 level, never through abstract
completions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, SpectralPoint
from .fncore import AtomKernel, AtomS, fn_eval, lincomb
from .numerics import find_zeros, inner_B
from .operator import (SPECTRAL_TOL, ExtensionHandle, GammaDomainElement,
                       apply_S_gamma, resolvent_apply)

HALF_PI = 0.5 * math.pi


def _s_half(space, z):
    return fn_eval(AtomS(HALF_PI), space, z)


def _s_zero(space, z):
    return fn_eval(AtomS(0.0), space, z)


def s_ratio_at_i(space):
    """s_0(i) / s_{pi/2}(i); its real part enters every boundary formula
    (it vanishes identically for Paley-Wiener realizations)."""
    return _s_zero(space, 1j) / _s_half(space, 1j)


# ----------------------------------------------------------------------------
# Regularized resolvent on s_0 and the boundary functional
# ----------------------------------------------------------------------------

def rhat_on_s0(space, w):
    """Closed form of the regularized pi/2-resolvent applied to s_0:

        Rhat_{pi/2}(w) s_0 = -pi k(., conj w) / s_{pi/2}(w).

    An honest space element, so everything downstream of it can be paired
    with ordinary inner products.
    """
    w = complex(w)
    sw = _s_half(space, w)
    if abs(sw) <= SPECTRAL_TOL:
        raise SpectralPoint("w=%s is in the spectrum of the pi/2 extension" % w)
    return (-math.pi / sw) * AtomKernel(np.conj(w))


def boundary_functional(space, h):
    """<s_0, h>_2 for h in dom(S_{pi/2}) given by generator f at w = i:

        <s_0, h>_2 = -pi f(i) / s_{pi/2}(i).

    Vanishes exactly on dom(S); its kernel inside dom(S_{pi/2}) is dom(S).
    """
    if abs(h.ext.gamma - HALF_PI) > 1e-12 or h.w != 1j:
        raise ValueError("boundary functional needs a pi/2 element with w = i")
    f_i = fn_eval(h.generator, space, 1j)
    return -math.pi * f_i / _s_half(space, 1j)


# ----------------------------------------------------------------------------
# Krein's Q-function
# ----------------------------------------------------------------------------

def qfunc(space, w, form="closed", engine=None):
    """Krein's Q-function for the pair (S_gamma, S_{pi/2}).

    form="closed":        pi Re(s_0(i)/s_{pi/2}(i)) - pi s_0(w)/s_{pi/2}(w)
    form="definitional":  <phi0, (I + w S) R(w) phi0> with phi0 the
                          regularized resolvent of s_0 at i, evaluated with
                          explicit resolvents and the inner product.
    The two must agree; the closed form for PW(a) reduces to pi tan(a w).
    """
    w = complex(w)
    sw = _s_half(space, w)
    if abs(sw) <= SPECTRAL_TOL:
        raise SpectralPoint("w=%s is in the spectrum of the pi/2 extension" % w)
    if form == "closed":
        return (math.pi * s_ratio_at_i(space).real
                - math.pi * _s_zero(space, w) / sw)
    if form == "definitional":
        if w.imag == 0:
            raise ValueError("definitional form needs a nonreal w")
        ext = ExtensionHandle(space, HALF_PI)
        phi0 = rhat_on_s0(space, 1j)
        operand = lincomb([w, 1.0 + w * w],
                          [phi0, resolvent_apply(ext, w, phi0)])
        return inner_B(space, phi0, operand, engine)
    raise ValueError("unknown Q-function form %r" % (form,))


def lambda_of_gamma(space, gamma):
    """The Krein parameter matching the gamma extension:

        lambda = pi tan(gamma) + pi Re(s_0(i)/s_{pi/2}(i)).
    """
    return math.pi * math.tan(float(gamma)) + math.pi * s_ratio_at_i(space).real


@dataclass(frozen=True)
class KreinData:
    """Resolvent-difference parameters for one extension angle."""

    gamma: float
    lam: float
    q_form: str = "closed"

    @classmethod
    def for_gamma(cls, space, gamma, q_form="closed"):
        return cls(float(gamma), lambda_of_gamma(space, gamma), q_form)


def krein_denominator(space, gamma, w):
    """tan(gamma) + s_0(w)/s_{pi/2}(w), the rank-one resolvent denominator
    up to the factor pi; equals (lambda - q(w)) / pi."""
    sw = _s_half(space, complex(w))
    if abs(sw) <= SPECTRAL_TOL:
        raise SpectralPoint("w=%s is in the spectrum of the pi/2 extension" % w)
    return math.tan(float(gamma)) + _s_zero(space, complex(w)) / sw


def krein_diff_check(space, gamma, w, f, grid=None):
    """Pointwise check of the rank-one resolvent-difference formula.

    Left side: two explicit resolvents, R_gamma(w) f - R_{pi/2}(w) f.
    Right side: <Rhat(conj w) s_0, f> Rhat(w) s_0 / (pi tan(gamma)
                + pi s_0(w)/s_{pi/2}(w)).
    Also cross-checks the lambda - q(w) parameterization.  Returns
    (max pointwise error, lambda-consistency error).
    """
    gamma = float(gamma)
    w = complex(w)
    if w.imag == 0:
        raise ValueError("needs a nonreal w")
    if not 0.0 < gamma < math.pi or abs(gamma - HALF_PI) < 1e-12:
        raise ValueError("gamma must lie in (0, pi) away from pi/2")
    if grid is None:
        grid = np.linspace(-2.0, 2.0, 9).astype(complex)
    tau = krein_denominator(space, gamma, w)
    if abs(tau) < 1e-12:
        raise DegenerateDenominator(
            "tan(gamma) + s_0(w)/s_{pi/2}(w) = %.3e at w=%s" % (abs(tau), w))
    ext_g = ExtensionHandle(space, gamma)
    ext_h = ExtensionHandle(space, HALF_PI)
    lhs = lincomb([1.0, -1.0],
                  [resolvent_apply(ext_g, w, f), resolvent_apply(ext_h, w, f)])
    # <Rhat(conj w) s_0, f> = -pi f(w) / s_{pi/2}(w) by the reproducing property
    fw = fn_eval(f, space, w)
    sw = _s_half(space, w)
    coef = (1.0 / (math.pi * tau)) * (-math.pi * fw / sw) * (-math.pi / sw)
    rhs = coef * AtomKernel(np.conj(w))
    diff = fn_eval(lhs, space, grid) - fn_eval(rhs, space, grid)
    lam = lambda_of_gamma(space, gamma)
    lam_err = abs((lam - qfunc(space, w, "closed")) - math.pi * tau)
    return float(np.max(np.abs(diff))), float(lam_err)


def rank_one_pole_points(space, gamma, lo, hi, scan_step=None):
    """Real zeros of tan(gamma) + s_0/s_{pi/2} (the rank-one resolvent
    poles), located from that quotient alone.  Sign changes across poles of
    the quotient are rejected by a residual test."""
    gamma = float(gamma)
    if scan_step is None:
        scan_step = math.pi / (8.0 * space.type_a)
    n = max(2, int(math.ceil((hi - lo) / scan_step)))
    xs = np.linspace(lo, hi, n + 1)
    s0 = fn_eval(AtomS(0.0), space, xs.astype(complex)).real
    sh = fn_eval(AtomS(HALF_PI), space, xs.astype(complex)).real
    ok = np.abs(sh) > 1e-8
    tau = np.where(ok, math.tan(gamma) + s0 / np.where(ok, sh, 1.0), np.nan)

    def tau_at(x):
        return (math.tan(gamma)
                + (_s_zero(space, complex(x)) / _s_half(space, complex(x))).real)

    roots = []
    for i in range(n):
        if not (ok[i] and ok[i + 1]):
            continue
        if tau[i] == 0.0:
            roots.append(xs[i])
            continue
        if tau[i] * tau[i + 1] < 0.0:
            a, b = xs[i], xs[i + 1]
            ta = tau[i]
            for _ in range(60):
                m = 0.5 * (a + b)
                tm = tau_at(m)
                if tm == 0.0:
                    break
                if ta * tm < 0.0:
                    b = m
                else:
                    a, ta = m, tm
            root = 0.5 * (a + b)
            if abs(tau_at(root)) < 1e-3:  # poles fail this residual test
                roots.append(root)
    return np.asarray(sorted(roots))


# ----------------------------------------------------------------------------
# Alternative domain characterization and the perturbed operator
# ----------------------------------------------------------------------------

def perturbation_direction(space):
    """D = S_{pi/2} R_{pi/2}(-i) Rhat_{pi/2}(i) s_0 as an expression.

    Using the averaging identity S R(-i) Rhat(i) = (Rhat(-i) + Rhat(i))/2
    and the closed form of the regularized resolvent:

        D = -(pi/2) [k(., i)/s_{pi/2}(-i) + k(., -i)/s_{pi/2}(i)].
    """
    return lincomb([-0.5 * math.pi / _s_half(space, -1j),
                    -0.5 * math.pi / _s_half(space, 1j)],
                   [AtomKernel(1j), AtomKernel(-1j)])


def perturbation_direction_resolvent_form(space):
    """Same direction through explicit resolvents (cross-check route)."""
    ext = ExtensionHandle(space, HALF_PI)
    km = AtomKernel(-1j)
    inner = lincomb([1.0, -1j], [km, resolvent_apply(ext, -1j, km)])
    return (-math.pi / _s_half(space, 1j)) * inner


class PerturbedDomainElement:
    """g = h + b D with h in dom(S_{pi/2}); the D-coordinate form of the
    gamma-domain characterization."""

    def __init__(self, space, h, b):
        if abs(h.ext.gamma - HALF_PI) > 1e-12:
            raise ValueError("h must be a pi/2 domain element")
        self.space = space
        self.h = h
        self.b = complex(b)
        self.expr = lincomb([1.0, self.b],
                            [h.expr, perturbation_direction(space)])

    def boundary_residual(self, space=None):
        """|<s_0,h>_2 - pi b (tan g + Re ratio)| is checked by the caller;
        here we only expose the boundary value itself."""
        return boundary_functional(self.space, self.h)


def dom_gamma_decompose(space, gamma, g, validate=True):
    """Split g in dom(S_gamma) (generator f at w = i) as h + b D with

        b = -cos(gamma) f(i) / s_gamma(i),
        h = R_{pi/2}(i) [f - i pi b k(., i) / s_{pi/2}(-i)],

    h in dom(S_{pi/2}) obeying the boundary condition
    <s_0, h>_2 = pi b (tan(gamma) + Re(s_0(i)/s_{pi/2}(i))).
    """
    gamma = float(gamma)
    if g.w != 1j or abs(g.ext.gamma - (gamma % math.pi)) > 1e-12:
        raise ValueError("g must be given by a generator at w = i for gamma")
    s_g_i = fn_eval(AtomS(gamma), space, 1j)
    if abs(s_g_i) < 1e-12:
        raise DegenerateDenominator("s_gamma(i) vanished")
    f_i = fn_eval(g.generator, space, 1j)
    b = -math.cos(gamma) * f_i / s_g_i
    f_h = lincomb([1.0, -1j * math.pi * b / _s_half(space, -1j)],
                  [g.generator, AtomKernel(1j)])
    h = GammaDomainElement(ExtensionHandle(space, HALF_PI), f_h, 1j)
    out = PerturbedDomainElement(space, h, b)
    if validate:
        bc = boundary_functional(space, h)
        target = math.pi * b * (math.tan(gamma) + s_ratio_at_i(space).real)
        scale = 1.0 + abs(target)
        if abs(bc - target) > 1e-8 * scale:
            raise ValueError("boundary condition violated by %.3e"
                             % abs(bc - target))
        zs = np.linspace(-1.5, 1.5, 7).astype(complex)
        err = np.max(np.abs(fn_eval(out.expr, space, zs)
                            - fn_eval(g.expr, space, zs)))
        if err > 1e-9 * (1.0 + float(np.max(np.abs(fn_eval(g.expr, space, zs))))):
            raise ValueError("decomposition does not reassemble g (%.3e)" % err)
    return out


def perturbed_to_gamma(space, gamma, p):
    """Inverse of dom_gamma_decompose: rebuild the gamma-domain element."""
    f_gamma = lincomb([1.0, 1j * math.pi * p.b / _s_half(space, -1j)],
                      [p.h.generator, AtomKernel(1j)])
    return GammaDomainElement(ExtensionHandle(space, float(gamma)), f_gamma, 1j)


def pairing_s0_F(space, p):
    """<s_0, g>_F for g = h + b D in dom(S*):

        <s_0, g>_F = <s_0, h>_2 - pi b Re(s_0(i)/s_{pi/2}(i)).

    On dom(S_gamma) this collapses to pi b tan(gamma).
    """
    return (boundary_functional(space, p.h)
            - math.pi * p.b * s_ratio_at_i(space).real)


def s_tilde_gamma_pairing_check(space, gamma, p, test_set, engine=None):
    """Compare the rank-one realization of the gamma extension against its
    explicit action, at pairing level:

        <S~_gamma g, u>_2 = <g, S_{pi/2} u>
                            - (cot g / pi) conj(<s_0, g>_F) <s_0, u>_2

    versus <S_gamma g, u> with the explicit action, for each test element
    u in dom(S_{pi/2}).  Returns the maximum absolute discrepancy.
    """
    gamma = float(gamma)
    if not 0.0 < gamma < math.pi:
        raise ValueError("gamma must lie in (0, pi)")
    ext_h = ExtensionHandle(space, HALF_PI)
    at_half = abs(gamma - HALF_PI) < 1e-12
    cot = 0.0 if at_half else 1.0 / math.tan(gamma)
    s0_g = pairing_s0_F(space, p)
    if at_half:
        g_gamma = p.h if abs(p.b) < 1e-13 else None
        if g_gamma is None:
            raise ValueError("at gamma = pi/2 the element must have b = 0")
    else:
        g_gamma = perturbed_to_gamma(space, gamma, p)
    ext_g = g_gamma.ext
    act_g = apply_S_gamma(ext_g, g_gamma)
    worst = 0.0
    for u in test_set:
        su = apply_S_gamma(ext_h, u)
        lhs = inner_B(space, p.expr, su, engine)
        if cot != 0.0:
            lhs = lhs - (cot / math.pi) * np.conj(s0_g) * boundary_functional(space, u)
        rhs = inner_B(space, act_g, u.expr, engine)
        worst = max(worst, abs(lhs - rhs))
    return worst


# ----------------------------------------------------------------------------
# Cyclicity of the perturbation direction
# ----------------------------------------------------------------------------

def cyclicity_check(space, w_set, target, engine=None):
    """Least-squares residual of projecting a target onto the span of the
    regularized resolvents of s_0 (equivalently of kernels at conj w_j).

    Returns a dict with the residual, the Gram condition number, and an
    ill-conditioning flag (condition > 1e12 is reported, not failed).
    """
    pts = [np.conj(complex(w)) for w in w_set]
    if any(p.imag == 0 for p in pts):
        raise ValueError("w_set must be nonreal")
    m = len(pts)
    gram = np.empty((m, m), dtype=complex)
    rhs = np.empty(m, dtype=complex)
    for j, pj in enumerate(pts):
        for l, pl in enumerate(pts):
            gram[j, l] = fn_eval(AtomKernel(pl), space, pj)
        rhs[j] = fn_eval(target, space, pj)
    tsq = inner_B(space, target, target, engine).real
    cond = float(np.linalg.cond(gram))
    ill = cond > 1e12
    if ill:
        coef, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
    else:
        coef = np.linalg.solve(gram, rhs)
    res_sq = tsq - float(np.real(np.vdot(rhs, coef)))
    return {"residual": math.sqrt(max(res_sq, 0.0)),
            "condition": cond, "ill_conditioned": ill}
