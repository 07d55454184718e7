"""Multi-scale function representation.

A function on ``[0, inf)`` is stored as the sum of a *slow* part and a
*fast* part:

* slow: a log-power series about the complex critical point ``y_c`` on
  ``[0, sigma]``, a uniform grid on ``[sigma, Y0]`` and a decay tag beyond;
* fast: a uniform grid on the critical layer ``[0, L_c]``, zero beyond.

Series terms are ``Y**n * log(Y)**k`` with ``Y = y - y_c``, principal branch,
``k = 0, 1, 2`` and ``n`` from ``NMIN`` to the truncation order.
"""

from __future__ import annotations

import json
from math import comb
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.integrate import simpson

NMIN = -6
NLOG = 3
SCHEMA_VERSION = 1


class RepresentationError(ValueError):
    """Raised when a result leaves the fixed log/singular basis."""


def _term_name(n: int, k: int) -> str:
    s = "1" if n == 0 else f"Y^{n}"
    if k:
        s += " log" + ("^%d" % k if k > 1 else "") + " Y"
    return s


# --------------------------------------------------------------------------
# Series


@dataclass(frozen=True, eq=False)
class SeriesRep:
    """Coefficients ``coef[k, n - NMIN]`` of ``Y**n log(Y)**k`` about ``center``."""

    center: complex
    sigma: float
    coef: np.ndarray

    @property
    def n_max(self) -> int:
        return self.coef.shape[1] - 1 + NMIN

    @classmethod
    def zeros(cls, center, sigma, n_max):
        return cls(complex(center), float(sigma), np.zeros((NLOG, n_max + 1 - NMIN), complex))

    @classmethod
    def from_taylor(cls, center, sigma, taylor, n_max):
        """Series of an analytic function from normalized Taylor coefficients."""
        s = cls.zeros(center, sigma, n_max)
        t = np.asarray(taylor, complex)[: n_max + 1]
        s.coef[0, -NMIN : -NMIN + len(t)] = t
        return s

    @classmethod
    def monomial(cls, center, sigma, n_max, n, k=0, value=1.0):
        s = cls.zeros(center, sigma, n_max)
        s.coef[k, n - NMIN] = value
        return s

    def get(self, n: int, k: int = 0) -> complex:
        i = n - NMIN
        if k >= NLOG or i < 0 or i >= self.coef.shape[1]:
            return 0j
        return complex(self.coef[k, i])

    # Named families, for reading only.
    @property
    def e(self):
        return self.coef[0, -NMIN:]

    @property
    def d(self):
        return self.coef[1, -NMIN:]

    @property
    def f(self):
        return self.coef[2, -NMIN:]

    def singular_terms(self, tol=0.0) -> set[tuple[int, int]]:
        """``(n, k)`` pairs of non-regular terms (negative power or a log)."""
        out = set()
        for k in range(NLOG):
            for i, v in enumerate(self.coef[k]):
                n = i + NMIN
                if abs(v) > tol and (n < 0 or k > 0):
                    out.add((n, k))
        return out

    def lowest_power(self) -> int | None:
        nz = np.nonzero(np.any(self.coef != 0, axis=0))[0]
        return None if len(nz) == 0 else int(nz[0]) + NMIN

    def max_log(self) -> int:
        ks = [k for k in range(NLOG) if np.any(self.coef[k] != 0)]
        return max(ks) if ks else 0

    # -- arithmetic ------------------------------------------------------
    def _check(self, other):
        if self.center != other.center:
            raise RepresentationError("series with different centres cannot be combined")

    def __add__(self, other):
        self._check(other)
        m = min(self.n_max, other.n_max)
        w = m + 1 - NMIN
        return SeriesRep(self.center, self.sigma, self.coef[:, :w] + other.coef[:, :w])

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, s):
        return SeriesRep(self.center, self.sigma, self.coef * s)

    def truncate(self, n_max):
        s = SeriesRep.zeros(self.center, self.sigma, n_max)
        w = min(n_max, self.n_max) + 1 - NMIN
        s.coef[:, :w] = self.coef[:, :w]
        return s

    def differentiate(self) -> SeriesRep:
        out = np.zeros_like(self.coef)
        ns = np.arange(self.coef.shape[1]) + NMIN
        for k in range(NLOG):
            c = self.coef[k]
            if c[0] != 0 and (ns[0] != 0 or k != 0):
                raise RepresentationError(f"derivative of {_term_name(NMIN, k)} leaves the basis")
            out[k, :-1] += ns[1:] * c[1:]
            if k:
                out[k - 1, :-1] += k * c[1:]
        return SeriesRep(self.center, self.sigma, out)

    def multiply(self, other, floor: int = -2) -> SeriesRep:
        """Cauchy product, truncated at the smaller order.

        Raises if the product has a ``log^3`` term or a power below ``floor``.
        """
        self._check(other)
        m = min(self.n_max, other.n_max)
        w = m + 1 - NMIN
        out = np.zeros((NLOG, w), complex)
        for k1 in range(NLOG):
            a = self.coef[k1]
            if not np.any(a):
                continue
            for k2 in range(NLOG):
                b = other.coef[k2]
                if not np.any(b):
                    continue
                full = np.convolve(a, b)  # index i -> power i + 2 NMIN
                if k1 + k2 >= NLOG:
                    raise RepresentationError(f"product creates a log^{k1 + k2} Y term")
                low = full[: -NMIN]  # powers below NMIN
                if np.any(low != 0):
                    raise RepresentationError(
                        f"product creates {_term_name(int(np.nonzero(low)[0][0]) + 2 * NMIN, k1 + k2)}")
                out[k1 + k2] += full[-NMIN : -NMIN + w]
        for k in range(NLOG):
            bad = np.nonzero(out[k, : floor - NMIN])[0]
            if len(bad):
                raise RepresentationError(f"product creates {_term_name(int(bad[0]) + NMIN, k)}")
        return SeriesRep(self.center, self.sigma, out)

    def reciprocal(self) -> SeriesRep:
        """``1/s`` for a log-free series; the result starts at ``Y**-p``."""
        if np.any(self.coef[1:] != 0):
            raise RepresentationError("reciprocal of a series with log terms")
        p = self.lowest_power()
        if p is None:
            raise ZeroDivisionError("reciprocal of the zero series")
        a = self.coef[0, p - NMIN :]
        n_terms = self.n_max - p + 1
        r = np.zeros(n_terms, complex)
        r[0] = 1.0 / a[0]
        for j in range(1, n_terms):
            r[j] = -np.dot(a[1 : j + 1], r[j - 1 :: -1][:j]) / a[0]
        out = SeriesRep.zeros(self.center, self.sigma, self.n_max)
        lo = -p
        if lo < NMIN:
            raise RepresentationError(f"reciprocal creates {_term_name(lo, 0)}")
        top = min(self.n_max, lo + n_terms - 1)
        out.coef[0, lo - NMIN : top - NMIN + 1] = r[: top - lo + 1]
        return out

    def conjugate(self) -> SeriesRep:
        """Exact pointwise conjugate on the real axis: centre ``conj(y_c)``."""
        return SeriesRep(np.conj(self.center), self.sigma, np.conj(self.coef))

    def recenter_bookkeeping(self, center) -> SeriesRep:
        """Re-expand about a nearby centre for term bookkeeping.

        The regular family is re-expanded exactly (binomial shift); log terms
        keep their coefficients with ``log`` taken about the new centre, so the
        result only tracks which basis terms are present.
        """
        delta = self.center - complex(center)
        out = SeriesRep.zeros(center, self.sigma, self.n_max)
        out.coef[1:] = self.coef[1:]
        ns = np.arange(self.coef.shape[1]) + NMIN
        for i, n in enumerate(ns):
            c = self.coef[0, i]
            if c == 0:
                continue
            if n < 0:
                out.coef[0, i] += c
                continue
            for j in range(n + 1):
                out.coef[0, j - NMIN] += c * comb(n, j) * delta ** (n - j)
        return out

    def term_weights(self, r_min: float) -> np.ndarray:
        """``|coef| max |Y^n log^k Y|`` over ``r_min <= |Y| <= sigma`` (same shape as ``coef``).

        ``|log Y|`` is bounded above by ``|log |Y|| + pi``.
        """
        r = np.geomspace(r_min, self.sigma, 48)
        ns = np.arange(self.coef.shape[1]) + NMIN
        lr = np.abs(np.log(r)) + np.pi
        w = np.empty(self.coef.shape)
        for k in range(NLOG):
            w[k] = np.max(r[None, :] ** ns[:, None] * lr[None, :] ** k, axis=1)
        return np.abs(self.coef) * w

    def prune(self, r_min: float, rtol: float) -> SeriesRep:
        """Drop terms weighing less than ``rtol`` times the largest term."""
        w = self.term_weights(r_min)
        out = self.coef.copy()
        out[w < rtol * w.max()] = 0
        return SeriesRep(self.center, self.sigma, out)

    # -- evaluation ------------------------------------------------------
    def evaluate(self, y, deriv: int = 0):
        s = self
        for _ in range(deriv):
            s = s.differentiate()
        Y = np.asarray(y) - s.center
        if np.any(Y == 0) and s.lowest_power() is not None and (s.lowest_power() < 0 or s.max_log() > 0):
            raise ZeroDivisionError("series evaluated at its singular point")
        Yf = np.atleast_1d(Y).astype(complex)
        L = np.log(Yf)
        # Horner over the shifted powers, one family at a time.
        out = np.zeros_like(Yf)
        for k in range(NLOG):
            c = s.coef[k]
            if not np.any(c):
                continue
            acc = np.zeros_like(Yf)
            for v in c[::-1]:
                acc = acc * Yf + v
            acc = acc * Yf ** float(NMIN)
            out += acc * (L**k if k else 1.0)
        return out[0] if np.ndim(Y) == 0 else out

    def to_dict(self):
        return {
            "center": [self.center.real, self.center.imag],
            "sigma": self.sigma,
            "n_min": NMIN,
            "coef_re": self.coef.real.tolist(),
            "coef_im": self.coef.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        coef = np.array(d["coef_re"]) + 1j * np.array(d["coef_im"])
        return cls(complex(*d["center"]), float(d["sigma"]), coef)


# --------------------------------------------------------------------------
# Grids


def fd_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference derivative on a uniform grid."""
    v = np.asarray(values)
    n = len(v)
    if n < 5:
        return np.gradient(v, h, edge_order=2)
    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    d[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * h)
    d[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * h)
    d[-1] = (25 * v[-1] - 48 * v[-2] + 36 * v[-3] - 16 * v[-4] + 3 * v[-5]) / (12 * h)
    d[-2] = (3 * v[-1] + 10 * v[-2] - 18 * v[-3] + 6 * v[-4] - v[-5]) / (12 * h)
    return d


@dataclass(frozen=True, eq=False)
class GridRep:
    """Samples on a uniform grid, optionally with exact derivative samples."""

    nodes: np.ndarray
    values: np.ndarray
    derivs: tuple = ()

    def __post_init__(self):
        if len(self.nodes) < 4:
            raise ValueError("a grid needs at least 4 nodes")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @property
    def h(self) -> float:
        return float(self.nodes[1] - self.nodes[0])

    def differentiate(self) -> GridRep:
        if self.derivs:
            return GridRep(self.nodes, self.derivs[0], self.derivs[1:])
        return GridRep(self.nodes, fd_derivative(self.values, self.h))

    def map(self, fn) -> GridRep:
        return GridRep(self.nodes, fn(self.values))

    def __add__(self, other):
        ds = tuple(a + b for a, b in zip(self.derivs, other.derivs))
        return GridRep(self.nodes, self.values + other.values, ds)

    def scale(self, s):
        return GridRep(self.nodes, self.values * s, tuple(d * s for d in self.derivs))

    @cached_property
    def spline(self):
        return CubicSpline(self.nodes, self.values)

    def interpolate(self, y):
        return self.spline(y)


# --------------------------------------------------------------------------
# Geometry and the combined function


@dataclass(frozen=True, eq=False)
class Geometry:
    """Zones: series on ``[0, sigma]``, outer grid ``[sigma, Y0]``, layer ``[0, L_c]``."""

    y_c: complex
    sigma: float = 0.1
    h: float = 1e-3
    y0: float = 40.0
    l_c: float = 1e-6
    n_inner: int = 2000
    n_series: int = 30

    def __post_init__(self):
        if not (self.sigma > 0 and self.h > 0 and self.y0 > self.sigma and self.l_c > 0):
            raise ValueError("geometry sizes must be positive and ordered")
        if self.l_c >= self.sigma:
            raise ValueError("critical layer must lie inside the series zone")
        if self.y_c.real >= self.sigma / 2:
            raise ValueError(f"Re y_c = {self.y_c.real:.3g} too close to sigma = {self.sigma}")

    @cached_property
    def outer_nodes(self) -> np.ndarray:
        n = int(round((self.y0 - self.sigma) / self.h))
        return self.sigma + self.h * np.arange(n + 1)

    @cached_property
    def inner_nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.l_c, self.n_inner + 1)

    @property
    def h_c(self) -> float:
        return self.l_c / self.n_inner

    def with_center(self, y_c) -> Geometry:
        return replace(self, y_c=complex(y_c))

    @cached_property
    def layer_quadrature(self):
        """Gauss-Legendre nodes and weights on ``[0, sigma]``.

        Panels follow the critical grid, then grow geometrically to sigma.
        """
        brk = list(self.inner_nodes)
        x = self.l_c
        dist = max(self.l_c - self.y_c.real, self.l_c / 2)
        while x < self.sigma:
            x = min(x + 0.25 * (x - self.l_c + dist), self.sigma)
            brk.append(x)
        brk = np.array(brk)
        gx, gw = np.polynomial.legendre.leggauss(6)
        a, b = brk[:-1, None], brk[1:, None]
        y = 0.5 * (a + b) + 0.5 * (b - a) * gx[None, :]
        w = 0.5 * (b - a) * gw[None, :]
        return y.ravel(), w.ravel()

    def to_dict(self):
        return {
            "y_c": [self.y_c.real, self.y_c.imag],
            "sigma": self.sigma,
            "h": self.h,
            "Y0": self.y0,
            "L_c": self.l_c,
            "n_inner": self.n_inner,
            "n_series": self.n_series,
        }


@dataclass(frozen=True)
class Tail:
    """Behaviour beyond ``Y0``: ``zero``, ``fast`` (negligible) or ``slow`` at ``rate``."""

    kind: str = "zero"
    rate: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "fast", "slow"):
            raise ValueError(f"unknown tail kind {self.kind!r}")

    def combine_sum(self, other):
        if self.kind == "slow" or other.kind == "slow":
            rates = [t.rate for t in (self, other) if t.kind == "slow"]
            return Tail("slow", min(rates))
        if "fast" in (self.kind, other.kind):
            return Tail("fast")
        return Tail("zero")

    def combine_product(self, other):
        if "zero" in (self.kind, other.kind):
            return Tail("zero")
        if self.kind == other.kind == "slow":
            return Tail("slow", self.rate + other.rate)
        return Tail("fast")


@dataclass(frozen=True, eq=False)
class MultiScaleFunction:
    """Slow part (series, outer grid, tail) plus fast part on the layer grid.

    Any of ``series``, ``outer`` and ``inner`` may be ``None`` for zero.
    """

    geom: Geometry
    series: SeriesRep | None = None
    outer: GridRep | None = None
    inner: GridRep | None = None
    tail: Tail = field(default_factory=Tail)

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, geom):
        return cls(geom)

    @classmethod
    def from_slow(cls, geom, series, outer_values, tail=Tail("zero"), outer_derivs=()):
        return cls(geom, series, GridRep(geom.outer_nodes, np.asarray(outer_values, complex), outer_derivs), None, tail)

    @classmethod
    def from_fast(cls, geom, values, derivs=()):
        vals = np.asarray(values, complex)
        return cls(geom, None, None, GridRep(geom.inner_nodes, vals, tuple(np.asarray(d, complex) for d in derivs)), Tail("fast"))

    @classmethod
    def from_analytic(cls, geom, taylor, fn, tail=Tail("zero")):
        """Slow function from normalized Taylor coefficients at ``y_c`` and a callable."""
        s = SeriesRep.from_taylor(geom.y_c, geom.sigma, taylor, geom.n_series)
        return cls.from_slow(geom, s, fn(geom.outer_nodes), tail)

    # -- parts -----------------------------------------------------------
    @property
    def slow(self) -> MultiScaleFunction:
        return replace(self, inner=None)

    @property
    def fast(self) -> MultiScaleFunction:
        return MultiScaleFunction(self.geom, None, None, self.inner, Tail("fast") if self.inner is not None else Tail("zero"))

    def slow_at(self, y):
        """Slow part at real points (series below sigma, outer grid above)."""
        y = np.asarray(y, float)
        out = np.zeros(y.shape, complex)
        lo = y < self.geom.sigma
        if self.series is not None and np.any(lo):
            out[lo] = self.series.evaluate(y[lo])
        mid = (~lo) & (y <= self.geom.outer_nodes[-1])
        if self.outer is not None and np.any(mid):
            out[mid] = self.outer.interpolate(y[mid])
        hi = y > self.geom.outer_nodes[-1]
        if np.any(hi) and self.tail.kind == "slow" and self.outer is not None:
            yend = self.geom.outer_nodes[-1]
            out[hi] = self.outer.values[-1] * np.exp(-self.tail.rate * (y[hi] - yend))
        return out

    def fast_at(self, y):
        y = np.asarray(y, float)
        out = np.zeros(y.shape, complex)
        if self.inner is not None:
            m = y <= self.geom.l_c
            if np.any(m):
                out[m] = self.inner.interpolate(y[m])
        return out

    def evaluate(self, y):
        y = np.asarray(y, float)
        if np.any(y < 0):
            raise ValueError("evaluation point below the wall")
        out = self.slow_at(y) + self.fast_at(y)
        return out[()] if out.ndim == 0 else out

    __call__ = evaluate

    def slow_on_inner(self, deriv=0):
        """Slow part (and derivatives) at the critical-grid nodes, via the series."""
        if self.series is None:
            return np.zeros(len(self.geom.inner_nodes), complex)
        return self.series.evaluate(self.geom.inner_nodes, deriv)

    def boundary(self, deriv=0) -> complex:
        """Value or derivative at ``y = 0``."""
        f = self
        for _ in range(deriv):
            f = f.differentiate()
        return complex(f.evaluate(0.0))

    # -- calculus and algebra --------------------------------------------
    def differentiate(self, times: int = 1) -> MultiScaleFunction:
        f = self
        for _ in range(times):
            f = MultiScaleFunction(
                f.geom,
                None if f.series is None else f.series.differentiate(),
                None if f.outer is None else f.outer.differentiate(),
                None if f.inner is None else f.inner.differentiate(),
                f.tail,
            )
        return f

    def __add__(self, other: MultiScaleFunction) -> MultiScaleFunction:
        def plus(a, b):
            if a is None:
                return b
            if b is None:
                return a
            return a + b

        return MultiScaleFunction(
            self.geom,
            plus(self.series, other.series),
            plus(self.outer, other.outer),
            plus(self.inner, other.inner),
            self.tail.combine_sum(other.tail),
        )

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, s) -> MultiScaleFunction:
        return MultiScaleFunction(
            self.geom,
            None if self.series is None else self.series.scale(s),
            None if self.outer is None else self.outer.scale(s),
            None if self.inner is None else self.inner.scale(s),
            self.tail,
        )

    __mul__ = lambda self, s: self.scale(s)  # noqa: E731
    __rmul__ = __mul__

    def multiply(self, other: MultiScaleFunction, floor: int = -2) -> MultiScaleFunction:
        """Pointwise product with basis bookkeeping in the series zone."""
        series = None
        if self.series is not None and other.series is not None:
            series = self.series.multiply(other.series, floor)
        outer = None
        if self.outer is not None and other.outer is not None:
            outer = GridRep(self.geom.outer_nodes, self.outer.values * other.outer.values)
        inner = None
        if self.inner is not None or other.inner is not None:
            a_s, b_s = self.slow_on_inner(), other.slow_on_inner()
            a_f = self.inner.values if self.inner is not None else 0.0
            b_f = other.inner.values if other.inner is not None else 0.0
            vals = a_f * b_s + a_s * b_f + a_f * b_f
            inner = GridRep(self.geom.inner_nodes, np.asarray(vals, complex) + 0j)
        return MultiScaleFunction(self.geom, series, outer, inner, self.tail.combine_product(other.tail))

    def vorticity(self, alpha: float) -> MultiScaleFunction:
        """``omega = -(d^2/dy^2 - alpha^2) psi``.

        A ``e^{-alpha y}`` tail is annihilated, so the result has no tail then.
        """
        w = self.scale(alpha**2) - self.differentiate(2)
        if self.tail.kind == "slow" and abs(self.tail.rate - abs(alpha)) <= 1e-12 * abs(alpha):
            w = replace(w, tail=Tail("zero"))
        return w

    def conjugate(self) -> MultiScaleFunction:
        """Pointwise complex conjugate on the real axis.

        The series is re-centred at ``conj(y_c)``, so the result only supports
        evaluation, differentiation and scaling (not products with
        functions centred at ``y_c``).
        """
        def cg(gr):
            if gr is None:
                return None
            return GridRep(gr.nodes, np.conj(gr.values), tuple(np.conj(d) for d in gr.derivs))

        return MultiScaleFunction(
            self.geom,
            None if self.series is None else self.series.conjugate(),
            cg(self.outer),
            cg(self.inner),
            self.tail,
        )

    # -- norms and quadrature -------------------------------------------
    def sup_norm(self) -> float:
        g = self.geom
        ys, _ = g.layer_quadrature
        v = [np.max(np.abs(self.evaluate(ys)))]
        if self.outer is not None:
            v.append(np.max(np.abs(self.outer.values)))
        return float(max(v))

    def to_dict(self):
        def grid(gr):
            if gr is None:
                return None
            return {"x0": float(gr.nodes[0]), "h": gr.h, "n": len(gr.nodes),
                    "re": gr.values.real.tolist(), "im": gr.values.imag.tolist()}

        return {
            "schema": "oscoeff.MultiScaleFunction",
            "version": SCHEMA_VERSION,
            "geometry": self.geom.to_dict(),
            "series": None if self.series is None else self.series.to_dict(),
            "outer": grid(self.outer),
            "inner": grid(self.inner),
            "tail": {"kind": self.tail.kind, "rate": self.tail.rate},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> MultiScaleFunction:
        d = json.loads(text)
        if d.get("schema") != "oscoeff.MultiScaleFunction" or d.get("version") != SCHEMA_VERSION:
            raise ValueError("unsupported document schema or version")
        gd = d["geometry"]
        geom = Geometry(complex(*gd["y_c"]), gd["sigma"], gd["h"], gd["Y0"], gd["L_c"], gd["n_inner"], gd["n_series"])

        def grid(g, nodes):
            if g is None:
                return None
            return GridRep(nodes, np.array(g["re"]) + 1j * np.array(g["im"]))

        return cls(
            geom,
            None if d["series"] is None else SeriesRep.from_dict(d["series"]),
            grid(d["outer"], geom.outer_nodes),
            grid(d["inner"], geom.inner_nodes),
            Tail(d["tail"]["kind"], d["tail"]["rate"]),
        )


# --------------------------------------------------------------------------
# Quadrature and scalar products


def integrate_pointwise(geom: Geometry, layer_fn, outer_values=None) -> complex:
    """``int_0^Y0`` of a function given pointwise on ``[0, sigma]`` and on the outer grid.

    ``layer_fn`` maps an array of points in ``[0, sigma)`` to values; the outer
    part is integrated by Simpson's rule on the outer nodes.
    """
    ys, ws = geom.layer_quadrature
    total = complex(np.sum(ws * layer_fn(ys)))
    if outer_values is not None:
        total += complex(simpson(outer_values, x=geom.outer_nodes))
    return total


def inner_product_psi(f: MultiScaleFunction, g: MultiScaleFunction) -> complex:
    """``int_0^inf f conj(g) dy``."""
    geom = f.geom
    total = integrate_pointwise(geom, lambda y: f.evaluate(y) * np.conj(g.evaluate(y)))
    nodes = geom.outer_nodes
    fo = f.slow_at(nodes) + f.fast_at(nodes)
    go = g.slow_at(nodes) + g.fast_at(nodes)
    total += complex(simpson(fo * np.conj(go), x=nodes))
    t = f.tail.combine_product(g.tail)
    if t.kind == "slow":
        if t.rate <= 0:
            raise ValueError("tail product does not decay; integral diverges")
        total += complex(fo[-1] * np.conj(go[-1])) / t.rate
    return total


def inner_product_v(f: MultiScaleFunction, g: MultiScaleFunction, alpha: float) -> complex:
    """``(f, g)_v = int omega_f conj(g) dy`` with ``omega_f = -(d^2 - alpha^2) f``."""
    return inner_product_psi(f.vorticity(alpha), g)
