"""Entire-function expression trees over Hermite-Biehler structure functions.

Functions are never discretized: every object handled by the toolkit is a
finite expression tree whose atoms (the structure function e, its conjugate
partner, the real-entire family s_gamma, reproducing kernels) carry
closed-form derivatives of every order.  Difference quotients with removable
singularities are evaluated through local Taylor expansions of the numerator,
so values stay accurate arbitrarily close to the singular point instead of
losing digits to cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import EmptySampleSet, OverflowGuard, RemovabilityViolation

_TWO_PI_I = 2j * math.pi
# extra numerator derivatives used by the Taylor branch of a quotient
_TAYLOR_EXTRA = 4


# ----------------------------------------------------------------------------
# Hermite-Biehler realizations
# ----------------------------------------------------------------------------

class HbRealization:
    """A concrete structure function e(z) with |e(z)| > |e(conj z)| on C+.

    Subclasses provide e and all its derivatives in closed form; the
    conjugate partner e*(z) = conj(e(conj z)) is derived from them.
    """

    def e_derivs(self, z, order):
        """Return [e(z), e'(z), ..., e^(order)(z)], vectorized in z."""
        raise NotImplementedError

    def exponential_type(self):
        """Growth exponent a in |e(x+iy)| ~ e^(a|y|)."""
        raise NotImplementedError


@dataclass(frozen=True)
class PaleyWiener(HbRealization):
    """e(z) = exp(-i a z), a > 0."""

    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("PaleyWiener requires a > 0")

    def e_derivs(self, z, order):
        base = np.exp(-1j * self.a * np.asarray(z, dtype=complex))
        return [((-1j * self.a) ** k) * base for k in range(order + 1)]

    def exponential_type(self):
        return self.a


@dataclass(frozen=True)
class Shifted(HbRealization):
    """e1(z) = (z + i) e(z) over a Paley-Wiener base (nesting depth 1)."""

    base: PaleyWiener

    def __post_init__(self):
        if not isinstance(self.base, PaleyWiener):
            raise ValueError("Shifted may only wrap a PaleyWiener base")

    def e_derivs(self, z, order):
        z = np.asarray(z, dtype=complex)
        b = self.base.e_derivs(z, order)
        out = [(z + 1j) * b[0]]
        for k in range(1, order + 1):
            out.append((z + 1j) * b[k] + k * b[k - 1])
        return out

    def exponential_type(self):
        return self.base.a


def hb_verify(realization, samples):
    """Check |e(z)| > |e(conj z)| on the given upper half-plane samples.

    Returns (ok, margin) where margin = min(|e(z)| - |e(conj z)|) over the
    sample set.
    """
    pts = np.asarray(samples, dtype=complex).ravel()
    if pts.size == 0:
        raise EmptySampleSet("hb_verify needs at least one sample point")
    if np.any(pts.imag <= 0):
        raise ValueError("hb_verify samples must lie in the open upper half-plane")
    upper = np.abs(realization.e_derivs(pts, 0)[0])
    lower = np.abs(realization.e_derivs(np.conj(pts), 0)[0])
    margin = float(np.min(upper - lower))
    return margin > 0.0, margin


def standard_hb_grid(n=20, x_span=3.0, y_max=3.0):
    """The default 20x20 verification grid: x in [-span, span], y in (0, y_max]."""
    xs = np.linspace(-x_span, x_span, n)
    ys = np.linspace(y_max / n, y_max, n)
    return (xs[:, None] + 1j * ys[None, :]).ravel()


# ----------------------------------------------------------------------------
# The space handle
# ----------------------------------------------------------------------------

class DbSpace:
    """A de Branges space handle: realization plus numerics configuration.

    Immutable by convention; the only mutable member is a memo cache for
    quadrature plans and sampling grids, which is safe to share because
    entries are pure functions of their keys.
    """

    def __init__(self, realization, ip_engine=None, delta_rem=1e-6,
                 im_guard=10.0, validate=True):
        self.realization = realization
        self.ip_engine = ip_engine
        self.delta_rem = float(delta_rem)
        self.im_guard = float(im_guard)
        self._cache = {}
        if validate:
            ok, margin = hb_verify(realization, standard_hb_grid())
            if not ok:
                raise ValueError(
                    "realization fails the Hermite-Biehler inequality on the "
                    "standard grid (margin %.3e)" % margin)

    @property
    def type_a(self):
        return self.realization.exponential_type()

    def e_derivs(self, z, order=0):
        return self.realization.e_derivs(z, order)

    def esharp_derivs(self, z, order=0):
        zc = np.conj(np.asarray(z, dtype=complex))
        return [np.conj(d) for d in self.realization.e_derivs(zc, order)]

    def emod2(self, x):
        """|e(x)|^2 on the real axis (the reciprocal inner-product weight)."""
        e = self.realization.e_derivs(np.asarray(x, dtype=complex), 0)[0]
        return np.abs(e) ** 2

    def guard(self, *points):
        for z in points:
            arr = np.asarray(z, dtype=complex)
            if np.any(np.abs(arr.imag) > self.im_guard):
                raise OverflowGuard(
                    "|Im z| exceeds the overflow guard %.3g" % self.im_guard)


# ----------------------------------------------------------------------------
# Removable-quotient evaluation
# ----------------------------------------------------------------------------

def _quotient_derivs(num_at_z, num_at_u, t, order, delta):
    """Derivatives 0..order of Q(z) = N(z)/(z-u) with N(u) = 0.

    num_at_z : list of N^(k)(z) arrays for k <= order (used where |t| >= delta)
    num_at_u : list of N^(j)(u) scalars for j <= order + 4 (Taylor branch)
    t        : z - u
    """
    t = np.asarray(t, dtype=complex)
    near = np.abs(t) < delta
    tsafe = np.where(near, 1.0, t)
    out = []
    for m in range(order + 1):
        acc = np.zeros(t.shape, dtype=complex)
        for k in range(m + 1):
            coef = ((-1.0) ** (m - k)) * math.factorial(m) / math.factorial(k)
            acc = acc + coef * num_at_z[k] / tsafe ** (m - k + 1)
        if near.any():
            tn = t[near]
            ser = np.zeros(tn.shape, dtype=complex)
            for j in range(m + 1, min(len(num_at_u), m + 1 + _TAYLOR_EXTRA)):
                c = (num_at_u[j] / math.factorial(j)) * (
                    math.factorial(j - 1) / math.factorial(j - 1 - m))
                ser = ser + c * tn ** (j - 1 - m)
            acc[near] = ser
        out.append(acc)
    return out


# ----------------------------------------------------------------------------
# Expression-tree nodes
# ----------------------------------------------------------------------------

class EntireFn:
    """Base node.  All nodes are immutable and hashable."""

    def eval(self, space, z):
        return fn_eval(self, space, z)

    def derivs(self, space, z, order):
        """[f(z), f'(z), ..., f^(order)(z)]; scalar in, scalars out."""
        arr, scalar = _as_points(space, z)
        ds = self._derivs(space, arr, order)
        if scalar:
            return [complex(d.reshape(-1)[0]) for d in ds]
        return ds

    def sharp(self):
        raise NotImplementedError

    def _derivs(self, space, z, order):
        raise NotImplementedError

    # small arithmetic sugar used throughout the toolkit
    def __add__(self, other):
        return lincomb([1.0, 1.0], [self, other])

    def __sub__(self, other):
        return lincomb([1.0, -1.0], [self, other])

    def __mul__(self, c):
        return lincomb([complex(c)], [self])

    __rmul__ = __mul__

    def __neg__(self):
        return lincomb([-1.0], [self])


def _as_points(space, z):
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    scalar = np.ndim(z) == 0
    space.guard(arr)
    return arr, scalar


@dataclass(frozen=True)
class AtomE(EntireFn):
    """The structure function e itself."""

    def _derivs(self, space, z, order):
        return space.e_derivs(z, order)

    def sharp(self):
        return AtomESharp()


@dataclass(frozen=True)
class AtomESharp(EntireFn):
    """The conjugate partner e*(z) = conj(e(conj z))."""

    def _derivs(self, space, z, order):
        return space.esharp_derivs(z, order)

    def sharp(self):
        return AtomE()


@dataclass(frozen=True)
class AtomS(EntireFn):
    """s_gamma(z) = (i/2)(e^(i gamma) e(z) - e^(-i gamma) e*(z)); real entire."""

    gamma: float

    def _derivs(self, space, z, order):
        ce = 0.5j * np.exp(1j * self.gamma)
        cs = 0.5j * np.exp(-1j * self.gamma)
        ed = space.e_derivs(z, order)
        sd = space.esharp_derivs(z, order)
        return [ce * ed[k] - cs * sd[k] for k in range(order + 1)]

    def sharp(self):
        return self


@dataclass(frozen=True)
class AtomKernel(EntireFn):
    """The reproducing kernel k(z, w) as a function of z.

    k(z,w) = [e*(z) e(conj w) - e(z) e*(conj w)] / (2 pi i (z - conj w)),
    with the derivative branch taking over within delta_rem of z = conj w.
    """

    w: complex

    def _derivs(self, space, z, order):
        u = np.conj(complex(self.w))
        space.guard(u)
        e_u = complex(space.e_derivs(u, 0)[0])
        es_u = complex(space.esharp_derivs(u, 0)[0])
        ez = space.e_derivs(z, order)
        esz = space.esharp_derivs(z, order)
        num_z = [esz[k] * e_u - ez[k] * es_u for k in range(order + 1)]
        ju = order + _TAYLOR_EXTRA
        e_ju = space.e_derivs(u, ju)
        es_ju = space.esharp_derivs(u, ju)
        num_u = [complex(es_ju[j] * e_u - e_ju[j] * es_u) for j in range(ju + 1)]
        q = _quotient_derivs(num_z, num_u, z - u, order, space.delta_rem)
        return [d / _TWO_PI_I for d in q]

    def sharp(self):
        # conj(k(conj z, w)) = k(z, conj w)
        return AtomKernel(np.conj(complex(self.w)))


@dataclass(frozen=True)
class UserFn(EntireFn):
    """A black-box entire function.

    When no derivative callable is supplied, first derivatives at real
    points of real-entire functions use complex-step differentiation
    (step 1e-20, no subtractive cancellation); every other case falls back
    to a trapezoidal Cauchy-circle rule, which is spectrally accurate for
    entire functions.
    """

    fn: Callable
    dfn: Optional[Callable] = None
    label: str = "user"

    def _call(self, z):
        try:
            out = np.asarray(self.fn(z), dtype=complex)
            if out.shape != np.shape(z):
                raise ValueError
            return out
        except Exception:
            return np.asarray([complex(self.fn(p)) for p in np.ravel(z)],
                              dtype=complex).reshape(np.shape(z))

    def _derivs(self, space, z, order):
        out = [self._call(z)]
        if order >= 1:
            if self.dfn is not None:
                d1 = np.asarray(self.dfn(z), dtype=complex)
                out.append(np.broadcast_to(d1, z.shape).astype(complex))
            elif np.all(z.imag == 0) and np.all(out[0].imag == 0):
                h = 1e-20
                out.append(self._call(z + 1j * h).imag / h + 0j)
            else:
                out.append(_cauchy_derivs(self._call, z, 1)[1])
        if order >= 2:
            higher = _cauchy_derivs(self._call, z, order)
            out.extend(higher[2:order + 1])
        return out

    def sharp(self):
        fn = self.fn
        sfn = lambda z: np.conj(np.asarray(fn(np.conj(z)), dtype=complex))
        sdfn = None
        if self.dfn is not None:
            dfn = self.dfn
            sdfn = lambda z: np.conj(np.asarray(dfn(np.conj(z)), dtype=complex))
        return UserFn(sfn, sdfn, self.label + "#")


def _cauchy_derivs(call, z, order, radius=0.5, nodes=64):
    """f^(m)(z) for m <= order via the trapezoidal Cauchy-circle rule."""
    theta = 2.0 * math.pi * np.arange(nodes) / nodes
    ring = radius * np.exp(1j * theta)
    vals = call(z[..., None] + ring)  # (..., nodes)
    out = []
    for m in range(order + 1):
        phase = np.exp(-1j * m * theta)
        s = np.sum(vals * phase, axis=-1) / nodes
        out.append(math.factorial(m) * s / radius ** m)
    return out


@dataclass(frozen=True)
class LinComb(EntireFn):
    coeffs: Tuple[complex, ...]
    terms: Tuple[EntireFn, ...]

    def _derivs(self, space, z, order):
        out = [np.zeros(z.shape, dtype=complex) for _ in range(order + 1)]
        for c, t in zip(self.coeffs, self.terms):
            td = t._derivs(space, z, order)
            for m in range(order + 1):
                out[m] = out[m] + c * td[m]
        return out

    def sharp(self):
        return LinComb(tuple(np.conj(c) for c in self.coeffs),
                       tuple(t.sharp() for t in self.terms))


def lincomb(coeffs, terms):
    """Build a linear combination, flattening one level of nesting."""
    flat_c, flat_t = [], []
    for c, t in zip(coeffs, terms):
        c = complex(c)
        if isinstance(t, LinComb):
            flat_c.extend(c * ci for ci in t.coeffs)
            flat_t.extend(t.terms)
        else:
            flat_c.append(c)
            flat_t.append(t)
    return LinComb(tuple(flat_c), tuple(flat_t))


@dataclass(frozen=True)
class MulAffine(EntireFn):
    """(z - w) * term(z); multiplication by z is MulAffine(0, term)."""

    w: complex
    term: EntireFn

    def _derivs(self, space, z, order):
        td = self.term._derivs(space, z, order)
        shift = z - complex(self.w)
        out = [shift * td[0]]
        for m in range(1, order + 1):
            out.append(shift * td[m] + m * td[m - 1])
        return out

    def sharp(self):
        return MulAffine(np.conj(complex(self.w)), self.term.sharp())


@dataclass(frozen=True)
class DiffQuotient(EntireFn):
    """(term(z) - c * pivot(z)) / (z - w), removable at z = w.

    Requires term(w) = c * pivot(w); within delta_rem of w the value comes
    from the Taylor expansion of the numerator around w.
    """

    term: EntireFn
    c: complex
    pivot: Optional[EntireFn]
    w: complex

    def _num_derivs(self, space, z, order):
        td = self.term._derivs(space, z, order)
        if self.pivot is None or self.c == 0:
            return td
        pd = self.pivot._derivs(space, z, order)
        c = complex(self.c)
        return [td[k] - c * pd[k] for k in range(order + 1)]

    def _derivs(self, space, z, order):
        w = complex(self.w)
        num_z = self._num_derivs(space, z, order)
        t = z - w
        near = np.abs(t) < space.delta_rem
        num_u = [0j] * (order + 1 + _TAYLOR_EXTRA)
        if near.any():
            wp = np.atleast_1d(np.asarray(w, dtype=complex))
            nd = self._num_derivs(space, wp, order + _TAYLOR_EXTRA)
            num_u = [complex(d.reshape(-1)[0]) for d in nd]
            _check_removable(self, space, num_u[0], wp)
        return _quotient_derivs(num_z, num_u, t, order, space.delta_rem)

    def sharp(self):
        pivot = None if self.pivot is None else self.pivot.sharp()
        return DiffQuotient(self.term.sharp(), np.conj(complex(self.c)),
                            pivot, np.conj(complex(self.w)))


def _removability_scale(node, space, wp):
    scale = 1.0 + abs(complex(node.term._derivs(space, wp, 0)[0].reshape(-1)[0]))
    if node.pivot is not None and node.c != 0:
        pv = complex(node.pivot._derivs(space, wp, 0)[0].reshape(-1)[0])
        scale = max(scale, 1.0 + abs(complex(node.c) * pv))
    return scale


def _check_removable(node, space, num_w, wp, factor=10.0):
    scale = _removability_scale(node, space, wp)
    if abs(num_w) > factor * space.delta_rem * scale:
        raise RemovabilityViolation(
            "difference quotient pivot w=%s: |numerator(w)| = %.3e exceeds "
            "%g * delta_rem * scale" % (node.w, abs(num_w), factor))


def diff_quotient(space, term, c, pivot, w):
    """Validated constructor: checks the removability condition at w."""
    node = DiffQuotient(term, complex(c), pivot, complex(w))
    wp = np.atleast_1d(np.asarray(complex(w), dtype=complex))
    num_w = complex(node._num_derivs(space, wp, 0)[0].reshape(-1)[0])
    scale = _removability_scale(node, space, wp)
    if abs(num_w) > space.delta_rem * scale:
        raise RemovabilityViolation(
            "removability fails at w=%s: |numerator(w)| = %.3e" % (w, abs(num_w)))
    return node


# ----------------------------------------------------------------------------
# Module-level operations
# ----------------------------------------------------------------------------

def fn_eval(f, space, z):
    """Evaluate an expression tree at z (scalar or array of complex points)."""
    arr, scalar = _as_points(space, z)
    out = f._derivs(space, arr, 0)[0]
    return complex(out.reshape(-1)[0]) if scalar else out


def fn_deriv(f, space, z, order=1):
    """The order-th derivative of f at z."""
    return f.derivs(space, z, order)[order]


def s_gamma(space, gamma, z):
    """The real-entire family member s_gamma evaluated at z."""
    return fn_eval(AtomS(float(gamma)), space, z)


def kernel(space, z, w):
    """Reproducing kernel k(z, w), derivative branch near z = conj w."""
    space.guard(w)
    return fn_eval(AtomKernel(complex(w)), space, z)


def kernel_diag_real(space, x):
    """k(x, x) for real x, vectorized (the derivative-branch diagonal)."""
    x = np.asarray(x, dtype=float)
    ed = space.e_derivs(x.astype(complex), 1)
    esd = space.esharp_derivs(x.astype(complex), 1)
    return np.real((esd[1] * ed[0] - ed[1] * esd[0]) / _TWO_PI_I)


def kernel_via_s(space, gamma0, z, w):
    """k(z, w) through the s-family form at reference angle gamma0:

      [s_{g0+pi/2}(z) s_{g0}(u) - s_{g0+pi/2}(u) s_{g0}(z)] / (pi (z - u)),

    u = conj w, with the derivative branch on the diagonal.  Must agree with
    kernel() for every gamma0.
    """
    arr, scalar = _as_points(space, z)
    space.guard(w)
    u = np.conj(complex(w))
    s_a = AtomS(float(gamma0))
    s_b = AtomS(float(gamma0) + 0.5 * math.pi)
    sa_u = complex(s_a._derivs(space, np.atleast_1d(u), 0)[0][0])
    sb_u = complex(s_b._derivs(space, np.atleast_1d(u), 0)[0][0])
    sa_z = s_a._derivs(space, arr, 0)
    sb_z = s_b._derivs(space, arr, 0)
    num_z = [sb_z[0] * sa_u - sb_u * sa_z[0]]
    ju = _TAYLOR_EXTRA
    sa_ju = s_a._derivs(space, np.atleast_1d(u), ju)
    sb_ju = s_b._derivs(space, np.atleast_1d(u), ju)
    num_u = [complex(sb_ju[j][0] * sa_u - sb_u * sa_ju[j][0]) for j in range(ju + 1)]
    q = _quotient_derivs(num_z, num_u, arr - u, 0, space.delta_rem)
    out = q[0] / math.pi
    return complex(out.reshape(-1)[0]) if scalar else out


def sharp(f):
    """Structural conjugation: sharp(f)(z) = conj(f(conj z))."""
    return f.sharp()
