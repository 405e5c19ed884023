"""Weighted 1-D integration: adaptive Gauss panels, periodic rules, running integrals.

The engine works on finite parameter intervals only; semi-infinite domains
enter through the rational transform t -> a + t/(1-t) which measures apply
when they normalize themselves to parameter space (see forms.Measure).
Integrands may be real or complex valued and must accept ndarray arguments
(scalar-only callables are wrapped transparently).
"""

from __future__ import annotations

import bisect
import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence

DEFAULT_REL_TOL = 1e-9
DEFAULT_ABS_TOL = 1e-12
PANEL_BUDGET = 4096
CIRCLE_MAX_NODES = 1 << 17

TWO_PI = 2.0 * math.pi

# low/high Gauss orders used for the embedded error estimate of each panel
_ORDER_LO = 10
_ORDER_HI = 20


@dataclass(frozen=True)
class Domain:
    """1-D integration domain: a finite interval, (a, +inf), or the unit circle."""

    kind: str  # "finite" | "semi_infinite" | "circle"
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind == "finite":
            if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
                raise ValueError(f"finite interval needs a < b, got ({self.a}, {self.b})")
        elif self.kind == "semi_infinite":
            if not math.isfinite(self.a):
                raise ValueError("semi-infinite interval needs a finite left endpoint")
        elif self.kind != "circle":
            raise ValueError(f"unknown domain kind {self.kind!r}")


def finite_interval(a: float, b: float) -> Domain:
    return Domain("finite", float(a), float(b))


def semi_infinite(a: float) -> Domain:
    return Domain("semi_infinite", float(a), math.inf)


def circle() -> Domain:
    return Domain("circle", 0.0, TWO_PI)


@dataclass(frozen=True)
class QuadratureRule:
    """Flattened composite rule: nodes in domain (or parameter-chart) coordinates."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int


_leg_cache: dict = {}


def gauss_legendre(order: int):
    """Cached Gauss-Legendre nodes/weights on [-1, 1]."""
    if order not in _leg_cache:
        _leg_cache[order] = np.polynomial.legendre.leggauss(order)
    return _leg_cache[order]


def _call_vec(f, x: np.ndarray) -> np.ndarray:
    """Evaluate f on an array, falling back to an elementwise loop."""
    with np.errstate(all="ignore"):
        try:
            y = np.asarray(f(x))
        except (TypeError, ValueError):
            y = np.asarray([f(float(t)) for t in x])
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape).copy()
    return y


def _panel_eval(p, a: float, b: float):
    """Integrate one panel at two Gauss orders; return (value, err, abs mass)."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x1, w1 = gauss_legendre(_ORDER_LO)
    x2, w2 = gauss_legendre(_ORDER_HI)
    with np.errstate(all="ignore"):
        y1 = _call_vec(p, mid + half * x1)
        y2 = _call_vec(p, mid + half * x2)
        i1 = half * np.sum(w1 * y1)
        i2 = half * np.sum(w2 * y2)
        absmass = half * float(np.sum(w2 * np.abs(y2)))
    val = complex(i2)
    err = abs(complex(i2) - complex(i1))
    if not (math.isfinite(val.real) and math.isfinite(val.imag) and math.isfinite(err)):
        err = math.inf
    return val, err, absmass


def _realify(value: complex):
    return value.real if value.imag == 0.0 else value


def adaptive_interval(
    p,
    a: float,
    b: float,
    *,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    budget: int = PANEL_BUDGET,
    breakpoints=None,
    min_panels: int = 8,
    collect_panels: bool = False,
):
    """Adaptively integrate p over [a, b] by bisecting the worst panel.

    Returns (value, error_estimate), or (value, error_estimate, edges) with
    the sorted final panel edges when collect_panels is set.  Raises
    NoConvergence when the panel budget is exhausted above tolerance.
    Deterministic: ties in the refinement queue break on creation order.
    """
    pts = [float(a), float(b)]
    if breakpoints:
        pts.extend(float(t) for t in breakpoints if a < t < b)
    pts = sorted(set(pts))
    # pad with uniform splits so narrow features are not missed by coarse panels
    while len(pts) - 1 < min_panels:
        mids = [(lo + hi) / 2 for lo, hi in zip(pts[:-1], pts[1:])]
        pts = sorted(set(pts) | set(mids))

    heap: list = []
    counter = 0
    vsum = 0.0 + 0.0j
    esum = 0.0
    msum = 0.0
    dirty = False  # a non-finite panel poisoned the running sums

    def push(lo, hi):
        nonlocal counter, vsum, esum, msum, dirty
        val, err, mass = _panel_eval(p, lo, hi)
        heapq.heappush(heap, (-err, counter, lo, hi, val, err, mass))
        counter += 1
        vsum += val
        esum += err
        msum += mass
        if err == math.inf:
            dirty = True

    def recompute():
        nonlocal vsum, esum, msum, dirty
        vsum = 0.0 + 0.0j
        esum = 0.0
        msum = 0.0
        for it in sorted(heap, key=lambda e: e[1]):
            vsum += it[4]
            esum += it[5]
            msum += it[6]
        dirty = any(it[5] == math.inf for it in heap)

    for lo, hi in zip(pts[:-1], pts[1:]):
        push(lo, hi)

    while True:
        if dirty:
            recompute()
        value = vsum
        floor = 60.0 * np.finfo(float).eps * msum
        tol = max(abs_tol, rel_tol * abs(value), floor)
        finite = math.isfinite(value.real) and math.isfinite(value.imag)
        if esum <= tol and finite:
            if collect_panels:
                edges = sorted({it[2] for it in heap} | {it[3] for it in heap})
                return _realify(value), esum, edges
            return _realify(value), esum
        if counter >= budget:
            raise NoConvergence(
                f"interval integration stalled at err={esum:.3e} (tol {tol:.3e}, "
                f"{counter} panels)",
                value=_realify(value),
                err=esum,
            )
        _, _, lo, hi, val, err, mass = heapq.heappop(heap)
        vsum -= val
        esum -= err
        msum -= mass
        if err == math.inf:
            dirty = True
        mid = 0.5 * (lo + hi)
        push(lo, mid)
        push(mid, hi)


def periodic_trapezoid(
    p,
    *,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    max_nodes: int = CIRCLE_MAX_NODES,
):
    """Equispaced rule with doubling for 2*pi-periodic integrands on [0, 2*pi).

    M equispaced nodes integrate trigonometric polynomials of degree < M
    exactly; doubling continues until successive values agree within tolerance.
    """
    m = 16
    x = TWO_PI * np.arange(m) / m
    with np.errstate(all="ignore"):
        total = np.sum(_call_vec(p, x))
    i_prev = TWO_PI * complex(total) / m
    while True:
        m2 = 2 * m
        xnew = TWO_PI * (2 * np.arange(m) + 1) / m2
        with np.errstate(all="ignore"):
            vals_new = _call_vec(p, xnew)
            total = total + np.sum(vals_new)
            scale = TWO_PI * float(np.sum(np.abs(vals_new))) / m
        i_cur = TWO_PI * complex(total) / m2
        err = abs(i_cur - i_prev)
        tol = max(abs_tol, rel_tol * abs(i_cur), 60.0 * np.finfo(float).eps * scale)
        if err <= tol and math.isfinite(err):
            return _realify(i_cur), err
        m, i_prev = m2, i_cur
        if m >= max_nodes:
            raise NoConvergence(
                f"circle rule stalled at err={err:.3e} with {m} nodes",
                value=_realify(i_cur),
                err=err,
            )


class RunningIntegral:
    """Cumulative integral G(t) = int_a^t p(s) ds on a finite parameter interval.

    Evaluation points are processed in sorted order and each new segment is
    integrated once from the nearest cached knot, so repeated calls (as in the
    skew-kernel pairing, which evaluates G inside an outer quadrature) never
    restart from the left endpoint.
    """

    def __init__(self, p, a, b, *, rel_tol=1e-11, abs_tol=1e-15, budget=2048):
        self._p = p
        self._a = float(a)
        self._b = float(b)
        self._rel = rel_tol
        self._abs = abs_tol
        self._budget = budget
        self._knots = [self._a]
        self._values = [0.0 + 0.0j]
        self._err = 0.0

    def __call__(self, t):
        arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty(arr.shape, dtype=complex)
        order = np.argsort(arr, kind="stable")
        for idx in order:
            x = float(min(max(arr[idx], self._a), self._b))
            pos = bisect.bisect_right(self._knots, x) - 1
            anchor_t = self._knots[pos]
            anchor_v = self._values[pos]
            if x > anchor_t:
                seg, err = adaptive_interval(
                    self._p, anchor_t, x,
                    rel_tol=self._rel, abs_tol=self._abs,
                    budget=self._budget, min_panels=2,
                )
                val = anchor_v + complex(seg)
                self._err += err
                ins = bisect.bisect_left(self._knots, x)
                self._knots.insert(ins, x)
                self._values.insert(ins, val)
            else:
                val = anchor_v
            out[idx] = val
        if np.all(out.imag == 0.0):
            out = out.real
        if np.ndim(t) == 0:
            return out.reshape(()).item()
        return out

    @property
    def err_estimate(self) -> float:
        return self._err


def integrate(f, mu, *, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL,
              budget=PANEL_BUDGET, breakpoints=None):
    """Integrate a function of the domain variable against a measure.

    f takes points of the measure's domain (real u on the line, complex points
    on the circle).  Returns (value, error_estimate) and raises NoConvergence
    per the engine contract.
    """
    return mu.integrate_point(
        f, rel_tol=rel_tol, abs_tol=abs_tol, budget=budget, breakpoints=breakpoints
    )


def cumulative(g, mu, *, rel_tol=1e-11, abs_tol=1e-15):
    """Running integral G(u) = int_{v <= u} g(v) mu(dv).

    On circle measures the argument of G is the angle x in [0, 2*pi) and g is
    likewise evaluated in the angle chart.  G is nondecreasing when g >= 0.
    """
    return mu.cumulative(g, rel_tol=rel_tol, abs_tol=abs_tol)
