"""Complex Airy functions, their iterated primitives and related helpers.

Three evaluation regimes are used, chosen per point:

* ``|z| <= 9`` (and the non-decaying sectors up to ``|z| = 15``): the Maclaurin
  series, summed in double-double arithmetic so that the cancellation between
  the two series families does not destroy the decaying values.
* ``9 < |z| <= 15`` inside the decay sector ``|arg z| <= pi/3``: the primitive
  ``Ai(1, z)`` is obtained by Gauss-Laguerre quadrature of ``Ai`` along the
  steepest-descent path; ``Ai`` itself uses its asymptotic expansion.
* ``|z| > 15``: Poincare asymptotic expansions on ``|arg z| <= 2 pi / 3``,
  extended to the rest of the plane with the rotation identities
  ``Ai(z) + w Ai(w z) + w^2 Ai(w^2 z) = 0`` and
  ``Ai(1, z) + Ai(1, w z) + Ai(1, w^2 z) = -1`` (``w = exp(2 i pi / 3)``).

``Ai(1, .)`` and ``Ai(2, .)`` are the primitives of ``Ai`` vanishing at
``+infinity``; ``Ai(2, z) = z Ai(1, z) - Ai'(z)``.
"""

from __future__ import annotations

import math

import numpy as np

# Double-double splits of Ai(0) and -Ai'(0).
_AI0 = (0.3550280538878172, 2.05233632436212e-17)
_MAIP0 = (0.2588194037928068, -2.522243111610832e-17)

AI0 = _AI0[0]
MAIP0 = _MAIP0[0]

OMEGA = np.exp(2j * np.pi / 3)

SERIES_RADIUS = 9.0
QUADRATURE_RADIUS = 15.0
_SERIES_TOL = 1e-33
_SERIES_MAX_TERMS = 200

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_real(x: float) -> float:
    """Gamma function for real ``x > 0`` (Lanczos approximation, g = 7)."""
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"gamma_real requires x > 0, got {x!r}")
    if x < 0.5:
        # Reflection keeps the approximation in its accurate range.
        return math.pi / (math.sin(math.pi * x) * gamma_real(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (x + k)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


# --------------------------------------------------------------------------
# double-double arithmetic on numpy arrays


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = 134217729.0 * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dd_add(a, b):
    s, e = _two_sum(a[0], b[0])
    e = e + a[1] + b[1]
    return _quick_two_sum(s, e)


def _dd_mul(a, b):
    p, e = _two_prod(a[0], b[0])
    e = e + (a[0] * b[1] + a[1] * b[0])
    return _quick_two_sum(p, e)


def _dd_mul_d(a, d):
    p, e = _two_prod(a[0], d)
    e = e + a[1] * d
    return _quick_two_sum(p, e)


def _dd_div_d(a, d):
    q1 = a[0] / d
    p, e = _two_prod(q1, d)
    s, f = _two_sum(a[0], -p)
    f = f - e + a[1]
    return _quick_two_sum(q1, (s + f) / d)


class _CDD:
    """Complex double-double number stored as four real arrays."""

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = re
        self.im = im

    @classmethod
    def from_complex(cls, z):
        z = np.asarray(z, dtype=complex)
        zero = np.zeros(z.shape)
        return cls((z.real.copy(), zero), (z.imag.copy(), zero.copy()))

    def __add__(self, other):
        return _CDD(_dd_add(self.re, other.re), _dd_add(self.im, other.im))

    def __mul__(self, other):
        rr = _dd_mul(self.re, other.re)
        ii = _dd_mul(self.im, other.im)
        ri = _dd_mul(self.re, other.im)
        ir = _dd_mul(self.im, other.re)
        return _CDD(_dd_add(rr, (-ii[0], -ii[1])), _dd_add(ri, ir))

    def scale(self, num, den):
        re = _dd_div_d(_dd_mul_d(self.re, num), den)
        im = _dd_div_d(_dd_mul_d(self.im, num), den)
        return _CDD(re, im)

    def scale_dd(self, c):
        """Multiply by a real double-double constant ``c = (hi, lo)``."""
        return _CDD(_dd_mul(self.re, c), _dd_mul(self.im, c))

    def neg(self):
        return _CDD((-self.re[0], -self.re[1]), (-self.im[0], -self.im[1]))

    def magnitude(self):
        return np.hypot(self.re[0], self.im[0])

    def to_complex(self):
        return (self.re[0] + self.re[1]) + 1j * (self.im[0] + self.im[1])


def _dd_series(z3: _CDD, first: _CDD, k0: float, ratio) -> _CDD:
    """Sum ``sum_n K_n z^(3n+s)`` given the first term ``first = K_0 z^s``.

    ``ratio(n)`` returns ``(num, den)`` with ``K_{n+1}/K_n = num/den``.
    """
    term = first.scale(k0, 1.0)
    total = term
    for n in range(_SERIES_MAX_TERMS):
        num, den = ratio(n)
        term = (term * z3).scale(num, den)
        total = total + term
        if np.all(term.magnitude() <= _SERIES_TOL * np.maximum(total.magnitude(), 1e-300)):
            break
    return total


def _series_all(z: np.ndarray):
    """Ai, Ai', Ai(1,.), Ai(2,.) from the Maclaurin series in double-double."""
    zc = _CDD.from_complex(z)
    z2 = zc * zc
    z3 = z2 * zc
    one = _CDD.from_complex(np.ones_like(z))
    c1 = _AI0
    c2 = _MAIP0

    f = _dd_series(z3, one, 1.0, lambda n: (1.0, (3 * n + 2) * (3 * n + 3)))
    g = _dd_series(z3, zc, 1.0, lambda n: (1.0, (3 * n + 3) * (3 * n + 4)))
    ai = f.scale_dd(c1) + g.scale_dd(c2).neg()

    fp = _dd_series(z3, z2, 0.5, lambda n: (1.0, 3 * (n + 1) * (3 * n + 5)))
    gp = _dd_series(z3, one, 1.0, lambda n: (1.0, (3 * n + 1) * (3 * n + 3)))
    aip = fp.scale_dd(c1) + gp.scale_dd(c2).neg()

    f1 = _dd_series(z3, zc, 1.0, lambda n: (3 * n + 1, (3 * n + 4) * (3 * n + 2) * (3 * n + 3)))
    g1 = _dd_series(z3, z2, 0.5, lambda n: (3 * n + 2, (3 * n + 5) * (3 * n + 3) * (3 * n + 4)))
    third = _CDD.from_complex(np.full(z.shape, -1.0 / 3.0 + 0j))
    third.re = (third.re[0], np.full(z.shape, -1.850371707708594e-17))
    ai1 = f1.scale_dd(c1) + g1.scale_dd(c2).neg() + third

    f2 = _dd_series(z3, z2, 0.5, lambda n: (3 * n + 1, (3 * n + 4) * (3 * n + 5) * (3 * n + 3)))
    g2 = _dd_series(z3, z3.scale(1.0, 6.0), 1.0, lambda n: (3 * n + 2, (3 * n + 5) * (3 * n + 6) * (3 * n + 4)))
    lin = zc.scale(-1.0, 3.0)
    const = _CDD((np.full(z.shape, c2[0]), np.full(z.shape, c2[1])), (np.zeros(z.shape), np.zeros(z.shape)))
    ai2 = f2.scale_dd(c1) + g2.scale_dd(c2).neg() + lin + const
    return ai.to_complex(), aip.to_complex(), ai1.to_complex(), ai2.to_complex()


# --------------------------------------------------------------------------
# asymptotic expansions


def _asym_coefficients(n_terms: int = 60):
    u = [1.0]
    for k in range(1, n_terms):
        # u_k = Gamma(3k+1/2) / (54^k k! Gamma(k+1/2))
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * k * (2 * k - 1)))
    v = [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(n_terms)]
    g = [1.0]
    for k in range(1, n_terms):
        g.append((-1) ** k * u[k] - (k - 0.5) * g[-1])
    return np.array(u), np.array(v), np.array(g)


_U, _V, _G = _asym_coefficients()


def _asym_sum(coef, signed, zeta):
    """Truncated asymptotic sum, stopped at the smallest term."""
    out = np.zeros(zeta.shape, dtype=complex)
    inv = 1.0 / zeta
    power = np.ones(zeta.shape, dtype=complex)
    prev = np.full(zeta.shape, np.inf)
    active = np.ones(zeta.shape, dtype=bool)
    for k in range(len(coef)):
        c = coef[k] * ((-1) ** k if signed else 1.0)
        term = c * power
        mag = np.abs(term)
        active &= mag < prev
        out = out + np.where(active, term, 0.0)
        prev = np.where(active, mag, prev)
        power = power * inv
        if not active.any():
            break
    return out


def _ai_asym(z):
    """Ai and Ai' for large |z|, valid on |arg z| <= 2 pi / 3."""
    zeta = (2.0 / 3.0) * z**1.5
    pref = np.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    ai = pref * z**-0.25 * _asym_sum(_U, True, zeta)
    aip = -pref * z**0.25 * _asym_sum(_V, True, zeta)
    return ai, aip


def _ai1_asym(z):
    zeta = (2.0 / 3.0) * z**1.5
    return -np.exp(-zeta) * z**-0.75 / (2.0 * math.sqrt(math.pi)) * _asym_sum(_G, False, zeta)


_LAG_X, _LAG_W = np.polynomial.laguerre.laggauss(48)


def _ai1_laguerre(z):
    """Ai(1, z) = -int_z^inf Ai for z in the decay sector, via Gauss-Laguerre in zeta."""
    zeta0 = (2.0 / 3.0) * z**1.5
    zeta = zeta0[..., None] + _LAG_X
    t = (1.5 * zeta) ** (2.0 / 3.0)
    # Ai(t) dt = exp(-zeta) t^(-3/4) A(zeta) / (2 sqrt(pi)) dzeta
    h = t**-0.75 * _asym_sum(_U, True, zeta) / (2.0 * math.sqrt(math.pi))
    return -np.exp(-zeta0) * (h @ _LAG_W)


# --------------------------------------------------------------------------
# region dispatch


def _large(z):
    """Ai, Ai', Ai(1,.) for |z| > QUADRATURE_RADIUS, any argument."""
    ai = np.empty(z.shape, dtype=complex)
    aip = np.empty(z.shape, dtype=complex)
    ai1 = np.empty(z.shape, dtype=complex)
    near = np.abs(np.angle(z)) <= 2.0 * np.pi / 3.0
    if near.any():
        zn = z[near]
        ai[near], aip[near] = _ai_asym(zn)
        ai1[near] = _ai1_asym(zn)
    far = ~near
    if far.any():
        zf = z[far]
        w1 = OMEGA * zf
        w2 = OMEGA**2 * zf
        a1, ap1 = _ai_asym(w1)
        a2, ap2 = _ai_asym(w2)
        ai[far] = -OMEGA * a1 - OMEGA**2 * a2
        aip[far] = -(OMEGA**2) * ap1 - OMEGA**4 * ap2
        ai1[far] = -1.0 - _ai1_asym(w1) - _ai1_asym(w2)
    return ai, aip, ai1


def _airy_all(z):
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    ai = np.empty(z.shape, dtype=complex)
    aip = np.empty(z.shape, dtype=complex)
    ai1 = np.empty(z.shape, dtype=complex)
    ai2 = np.empty(z.shape, dtype=complex)
    r = np.abs(z)
    decay = np.abs(np.angle(z)) <= np.pi / 3.0
    use_series = (r <= SERIES_RADIUS) | ((r <= QUADRATURE_RADIUS) & ~decay)
    use_quad = (r > SERIES_RADIUS) & (r <= QUADRATURE_RADIUS) & decay
    use_asym = r > QUADRATURE_RADIUS
    if use_series.any():
        ai[use_series], aip[use_series], ai1[use_series], ai2[use_series] = _series_all(z[use_series])
    if use_quad.any():
        zq = z[use_quad]
        ai[use_quad], aip[use_quad] = _ai_asym(zq)
        ai1[use_quad] = _ai1_laguerre(zq)
        ai2[use_quad] = zq * ai1[use_quad] - aip[use_quad]
    if use_asym.any():
        za = z[use_asym]
        a, ap, a1 = _large(za)
        ai[use_asym], aip[use_asym], ai1[use_asym] = a, ap, a1
        ai2[use_asym] = za * a1 - ap
    return tuple(v.reshape(shape) for v in (ai, aip, ai1, ai2))


def _unwrap(value, like):
    return value[()] if np.ndim(like) == 0 else value


def airy_ai(z, derivative: int = 0):
    """Ai(z) (or Ai'(z) with ``derivative=1``) for complex ``z``."""
    ai, aip, _, _ = _airy_all(z)
    if derivative == 0:
        return _unwrap(ai, z)
    if derivative == 1:
        return _unwrap(aip, z)
    raise ValueError("derivative must be 0 or 1")


def airy_iterated(z, k: int):
    """Primitive ``Ai(k, z)`` of order ``k`` in {1, 2}, vanishing at +infinity."""
    _, _, ai1, ai2 = _airy_all(z)
    if k == 1:
        return _unwrap(ai1, z)
    if k == 2:
        return _unwrap(ai2, z)
    raise ValueError("k must be 1 or 2")


def airy_bundle(z):
    """Return ``(Ai, Ai', Ai(1,.), Ai(2,.))`` evaluated together."""
    out = _airy_all(z)
    return tuple(_unwrap(v, z) for v in out)


def airy_bi(z, derivative: int = 0):
    """Bi from the rotation identity ``Bi(z) = e^{i pi/6} Ai(wz) + e^{-i pi/6} Ai(w^2 z)``."""
    z = np.asarray(z, dtype=complex)
    a1, ap1, _, _ = _airy_all(OMEGA * z)
    a2, ap2, _, _ = _airy_all(OMEGA**2 * z)
    e = np.exp(1j * np.pi / 6)
    if derivative == 0:
        return _unwrap(e * a1 + np.conj(e) * a2, z)
    if derivative == 1:
        return _unwrap(e * OMEGA * ap1 + np.conj(e) * OMEGA**2 * ap2, z)
    raise ValueError("derivative must be 0 or 1")


_CI_FACTOR = 2.0 * np.pi * np.exp(5j * np.pi / 6)


def airy_ci(z, derivative: int = 0):
    """Ci = i pi (Ai + i Bi), computed as ``2 pi e^{5 i pi/6} Ai(z e^{-2 i pi/3})``.

    The rotated form is the same function; it avoids adding a decaying and a
    growing term when one of them dominates.
    """
    z = np.asarray(z, dtype=complex)
    a, ap, _, _ = _airy_all(OMEGA**2 * z)
    if derivative == 0:
        return _unwrap(_CI_FACTOR * a, z)
    if derivative == 1:
        return _unwrap(_CI_FACTOR * OMEGA**2 * ap, z)
    raise ValueError("derivative must be 0 or 1")


def wronskian_ai_ci(z):
    """``Ai'(z) Ci(z) - Ci'(z) Ai(z)``; constant, equal to 1."""
    return airy_ai(z, 1) * airy_ci(z) - airy_ci(z, 1) * airy_ai(z)


# Measured once at import, used by the Green function denominators.
WRONSKIAN = complex(wronskian_ai_ci(0.3 + 0.2j))


_ROT = np.exp(-5j * np.pi / 6)


def tietjens_complex(z):
    """Tietjens function continued to complex arguments."""
    w = np.asarray(z, dtype=complex) * _ROT
    _, _, a1, a2 = _airy_all(w)
    return _unwrap(a2 / (w * a1), z)


def tietjens(z):
    """Ti(z) = Ai(2, z e^{-5 i pi/6}) / (z e^{-5 i pi/6} Ai(1, z e^{-5 i pi/6})), z > 0."""
    zr = np.asarray(z, dtype=float)
    if np.any(zr <= 0):
        raise ValueError("tietjens is defined for z > 0")
    return tietjens_complex(zr)
