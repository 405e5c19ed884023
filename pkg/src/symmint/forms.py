"""Measures on intervals and the circle, and the bilinear pairings built on them.

A Measure pairs a 1-D domain with a positive weight.  Internally every
measure is normalized to a *parameter chart*: a finite interval (or the
angle chart [0, 2*pi) for circle measures) together with a map to the domain
variable and the full log-density with respect to the parameter.  Measures
over (a, inf) are folded through t -> a + t/(1-t); user-supplied charts
(boost/angle substitutions from the symmetric-space reductions) compose the
same way.  All integration happens in parameter space, which keeps endpoint
singularities and heavy tails in the chart where they are mildest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import quadrature
from .quadrature import (
    Domain,
    RunningIntegral,
    TWO_PI,
    adaptive_interval,
    circle,
    finite_interval,
    periodic_trapezoid,
    semi_infinite,
)

__all__ = [
    "Chart", "Measure", "BasisFunction", "LinearCombo",
    "monomial", "circle_power",
    "moment", "form1", "form2", "form4",
    "uniform", "lebesgue", "exp_measure", "power_measure",
    "circle_uniform", "circle_cos", "cone_weight_measure",
    "parse_measure", "MEASURE_GRAMMAR",
]


@dataclass(frozen=True)
class Chart:
    """Reparametrization of a line measure: t in param_domain maps to u = to_u(t).

    log_density is the full log-density with respect to dt (Jacobian folded
    in).  from_u inverts to_u where available; increasing charts support
    running integrals.
    """

    param_domain: Domain
    to_u: Callable
    log_density: Callable
    from_u: Optional[Callable] = None
    increasing: bool = True


def _neg_inf_like(x):
    return np.full_like(np.asarray(x, dtype=float), -math.inf)


@dataclass(frozen=True)
class Measure:
    """Positive weight on an interval or the unit circle.

    log_weight maps a domain point to log w(u); for circle measures the point
    is complex (u on the unit circle) and the angle-chart density of
    mu-tilde(dx) is w(e^{ix}).  The normalized flag is informational: the
    pairings and identities are degree-N homogeneous in the measure, so
    nothing requires unit mass.
    """

    domain: Domain
    log_weight: Optional[Callable] = None
    chart: Optional[Chart] = None
    normalized: bool = False
    name: str = "measure"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if (self.log_weight is None) == (self.chart is None):
            raise ValueError("exactly one of log_weight / chart must be given")
        if self.chart is not None and self.domain.kind == "circle":
            raise ValueError("charts apply to line measures only")

    # -- parameter-space plumbing -------------------------------------------------

    def _params(self):
        """(a, b, to_u, log_density, from_u) in the flattened parameter chart."""
        key = "params"
        if key in self._cache:
            return self._cache[key]
        if self.domain.kind == "circle":
            lw = self.log_weight

            def dens(x):
                return lw(np.exp(1j * np.asarray(x)))

            val = (0.0, TWO_PI, lambda x: np.exp(1j * np.asarray(x)), dens, None)
        elif self.chart is None:
            lw = self.log_weight
            if self.domain.kind == "finite":
                val = (self.domain.a, self.domain.b, lambda t: t, lw,
                       lambda u: u)
            else:
                a = self.domain.a

                def to_u(t):
                    t = np.asarray(t, dtype=float)
                    return a + t / (1.0 - t)

                def dens(t):
                    t = np.asarray(t, dtype=float)
                    return lw(to_u(t)) - 2.0 * np.log1p(-t)

                def from_u(u):
                    u = np.asarray(u, dtype=float)
                    s = u - a
                    return s / (1.0 + s)

                val = (0.0, 1.0, to_u, dens, from_u)
        else:
            ch = self.chart
            if ch.param_domain.kind == "finite":
                val = (ch.param_domain.a, ch.param_domain.b, ch.to_u,
                       ch.log_density, ch.from_u if ch.increasing else None)
            else:
                a0 = ch.param_domain.a

                def to_s(t):
                    t = np.asarray(t, dtype=float)
                    return a0 + t / (1.0 - t)

                def to_u(t):
                    return ch.to_u(to_s(t))

                def dens(t):
                    t = np.asarray(t, dtype=float)
                    return ch.log_density(to_s(t)) - 2.0 * np.log1p(-t)

                from_u = None
                if ch.from_u is not None and ch.increasing:
                    def from_u(u):
                        s = np.asarray(ch.from_u(u), dtype=float) - a0
                        return s / (1.0 + s)

                val = (0.0, 1.0, to_u, dens, from_u)
        self._cache[key] = val
        return val

    def _density_vals(self, t):
        _, _, _, logdens, _ = self._params()
        with np.errstate(all="ignore"):
            ld = np.asarray(logdens(np.asarray(t)))
            return np.exp(ld)

    def param_integrand(self, f_param):
        """t -> f_param(t) * density(t), guarded so underflowed tails contribute 0.

        NaN log-densities (inf - inf in far tails, where a decaying weight
        beats polynomial chart growth) are treated as underflow; a genuinely
        divergent density stays +inf and surfaces as NoConvergence.
        """

        def p(t):
            t = np.asarray(t)
            dens = self._density_vals(t)
            dens = np.where(np.isnan(dens), 0.0, dens)
            with np.errstate(all="ignore"):
                fv = np.asarray(f_param(t))
            out = np.where(dens > 0.0, fv * dens, 0.0)
            return out

        return p

    def to_u(self, t):
        return self._params()[2](t)

    def param_interval(self):
        a, b, *_ = self._params()
        return a, b

    # -- integration entry points -------------------------------------------------

    def integrate_param(self, f_param, *, rel_tol=quadrature.DEFAULT_REL_TOL,
                        abs_tol=quadrature.DEFAULT_ABS_TOL,
                        budget=quadrature.PANEL_BUDGET, breakpoints=None):
        """Integrate f(t) mu(dt) in the parameter chart (angle chart on circles)."""
        a, b, *_ = self._params()
        return adaptive_interval(
            self.param_integrand(f_param), a, b,
            rel_tol=rel_tol, abs_tol=abs_tol, budget=budget,
            breakpoints=self._breakpoints(breakpoints),
        )

    def integrate_point(self, f, *, rel_tol=quadrature.DEFAULT_REL_TOL,
                        abs_tol=quadrature.DEFAULT_ABS_TOL,
                        budget=quadrature.PANEL_BUDGET, breakpoints=None):
        """Integrate f(u) mu(du); on circles f takes the point e^{ix} (periodic)."""
        a, b, to_u, _, _ = self._params()
        if self.domain.kind == "circle":
            p = self.param_integrand(lambda x: f(np.exp(1j * np.asarray(x))))
            return periodic_trapezoid(p, rel_tol=rel_tol, abs_tol=abs_tol)
        return self.integrate_param(
            lambda t: f(to_u(t)),
            rel_tol=rel_tol, abs_tol=abs_tol, budget=budget, breakpoints=breakpoints,
        )

    def _breakpoints(self, extra=None):
        pts = list(self._cache.get("breakpoints", ()))
        if extra:
            pts.extend(extra)
        return pts or None

    def with_breakpoints(self, pts):
        """Hint parameter-space breakpoints (narrow features) for the engine."""
        self._cache["breakpoints"] = tuple(float(t) for t in pts)
        return self

    def total_mass(self) -> float:
        if "mass" not in self._cache:
            val, err = self.integrate_point(lambda u: np.ones_like(np.real(u)))
            self._cache["mass"] = (float(np.real(val)), err)
        return self._cache["mass"][0]

    def cumulative(self, g, *, rel_tol=1e-11, abs_tol=1e-15):
        """Running integral of g in domain coordinates (angle chart on circles)."""
        a, b, to_u, _, from_u = self._params()
        if self.domain.kind != "circle" and from_u is None:
            raise ValueError("cumulative needs an increasing, invertible chart")
        if self.domain.kind == "circle":
            p = self.param_integrand(lambda x: g(np.asarray(x)))
            base = RunningIntegral(p, a, b, rel_tol=rel_tol, abs_tol=abs_tol)
            return base
        p = self.param_integrand(lambda t: g(to_u(t)))
        base = RunningIntegral(p, a, b, rel_tol=rel_tol, abs_tol=abs_tol)

        def G(u):
            return base(from_u(np.asarray(u, dtype=float)))

        G.err_estimate = lambda: base.err_estimate  # type: ignore[attr-defined]
        return G

    def cumulative_param(self, g_param, *, rel_tol=1e-11, abs_tol=1e-15):
        a, b, *_ = self._params()
        return RunningIntegral(
            self.param_integrand(g_param), a, b, rel_tol=rel_tol, abs_tol=abs_tol
        )

    # -- pushforwards & scalings ---------------------------------------------------

    def scaled_mass(self, c: float) -> "Measure":
        """Same shape, total mass multiplied by c > 0."""
        if c <= 0:
            raise ValueError("mass factor must be positive")
        logc = math.log(c)
        a, b, to_u, dens, from_u = self._params()
        if self.domain.kind == "circle":
            lw = self.log_weight
            return Measure(self.domain, log_weight=lambda u: lw(u) + logc,
                           name=f"{c}*{self.name}")
        ch = Chart(finite_interval(a, b), to_u, lambda t: dens(t) + logc, from_u)
        return Measure(self.domain, chart=ch, name=f"{c}*{self.name}")

    def translated(self, s: float) -> "Measure":
        """Pushforward along u -> u + s (line measures)."""
        if self.domain.kind == "circle":
            raise ValueError("translation applies to line measures")
        a, b, to_u, dens, from_u = self._params()
        dom = self.domain
        new_dom = (finite_interval(dom.a + s, dom.b + s) if dom.kind == "finite"
                   else semi_infinite(dom.a + s))
        ch = Chart(finite_interval(a, b), lambda t: to_u(t) + s, dens,
                   (lambda u: from_u(np.asarray(u) - s)) if from_u else None)
        return Measure(new_dom, chart=ch, name=f"{self.name}+{s}")

    def dilated(self, s: float) -> "Measure":
        """Pushforward along u -> s*u, s > 0 (line measures); mass is preserved."""
        if s <= 0:
            raise ValueError("dilation factor must be positive")
        if self.domain.kind == "circle":
            raise ValueError("dilation applies to line measures")
        a, b, to_u, dens, from_u = self._params()
        dom = self.domain
        new_dom = (finite_interval(dom.a * s, dom.b * s) if dom.kind == "finite"
                   else semi_infinite(dom.a * s))
        ch = Chart(finite_interval(a, b), lambda t: s * to_u(t), dens,
                   (lambda u: from_u(np.asarray(u) / s)) if from_u else None)
        return Measure(new_dom, chart=ch, name=f"{s}*id_*{self.name}")


# -- basis functions ---------------------------------------------------------------


@dataclass(frozen=True)
class BasisFunction:
    """Monomial u^k on the line, or x -> e^{i k x} in the circle angle chart.

    Exponents are kept as exact rationals; the circle families used by the
    skew pairings shift k by (N-1)/2 or (N-1), producing half-integer powers
    whose branch is fixed by the angle chart.
    """

    exponent: Fraction
    chart: str = "line"  # "line" | "circle"

    def __call__(self, x):
        e = self.exponent
        if self.chart == "circle":
            return np.exp(1j * float(e) * np.asarray(x))
        x = np.asarray(x)
        if e.denominator == 1:
            k = int(e)
            if k == 0:
                return np.ones_like(x, dtype=float)
            return x.astype(float) ** k
        return np.asarray(x, dtype=float) ** float(e)

    def derivative(self):
        """(coefficient, basis) with d/du u^k = k u^{k-1}.

        On the circle the derivative is taken with respect to the complex
        coordinate u itself, so the same monomial rule applies; in the angle
        chart the lowered power is evaluated as e^{i (k-1) x}.
        """
        k = self.exponent
        return float(k), BasisFunction(k - 1, self.chart)

    def label(self) -> str:
        return f"u^{self.exponent}"


def monomial(k) -> BasisFunction:
    return BasisFunction(Fraction(k), "line")


def circle_power(k) -> BasisFunction:
    return BasisFunction(Fraction(k), "circle")


class LinearCombo:
    """Finite linear combination of basis functions (pointwise evaluation)."""

    def __init__(self, terms):
        self.terms = [(float(c), bf) for c, bf in terms]
        if not self.terms:
            raise ValueError("empty combination")
        self.chart = self.terms[0][1].chart

    def __call__(self, x):
        out = None
        for c, bf in self.terms:
            v = c * bf(x)
            out = v if out is None else out + v
        return out

    def derivative_eval(self, x):
        out = None
        for c, bf in self.terms:
            k, lower = bf.derivative()
            v = (c * k) * lower(x) if k != 0.0 else np.zeros_like(np.asarray(x), dtype=complex)
            out = v if out is None else out + v
        return out


def _as_eval(h):
    """Normalize h to (eval_fn, deriv_eval_fn, is_single_monomial, bf_or_None)."""
    if isinstance(h, BasisFunction):
        def d_eval(x, h=h):
            k, lower = h.derivative()
            if k == 0.0:
                base = np.zeros_like(np.asarray(x, dtype=float))
                return base
            return k * lower(x)

        return h, d_eval, True, h
    if isinstance(h, LinearCombo):
        return h, h.derivative_eval, False, None
    raise TypeError(f"expected BasisFunction or LinearCombo, got {type(h)!r}")


# -- the three pairings -------------------------------------------------------------

_FORM1_CONVENTIONS = ("sgn", "step")


def moment(mu: Measure, j, *, rel_tol=1e-11, abs_tol=1e-14):
    """j-th moment: int u^j mu(du) on the line, int e^{ijx} mu~(dx) on the circle.

    j may be an integer or half-integer; circle moments are complex in
    general.  Divergent moments surface as NoConvergence from the engine.
    """
    j = Fraction(j)
    key = ("moment", j, rel_tol)
    if key in mu._cache:
        return mu._cache[key]
    if mu.domain.kind == "circle":
        if j.denominator == 1:
            val, _ = mu.integrate_point(lambda u: u ** int(j) if j != 0 else np.ones_like(np.real(u)),
                                        rel_tol=rel_tol, abs_tol=abs_tol)
        else:
            bf = circle_power(j)
            val, _ = mu.integrate_param(bf, rel_tol=rel_tol, abs_tol=abs_tol)
    else:
        bf = monomial(j) if j.denominator == 1 else BasisFunction(j, "line")
        val, _ = mu.integrate_point(bf, rel_tol=rel_tol, abs_tol=abs_tol)
    mu._cache[key] = val
    return val


def _moment_with_err(mu: Measure, j, rel_tol=1e-11, abs_tol=1e-14):
    j = Fraction(j)
    key = ("moment_err", j, rel_tol)
    if key in mu._cache:
        return mu._cache[key]
    if mu.domain.kind == "circle":
        if j.denominator == 1:
            out = mu.integrate_point(lambda u: u ** int(j) if j != 0 else np.ones_like(np.real(u)),
                                     rel_tol=rel_tol, abs_tol=abs_tol)
        else:
            out = mu.integrate_param(circle_power(j), rel_tol=rel_tol, abs_tol=abs_tol)
    else:
        out = mu.integrate_point(BasisFunction(j, "line"), rel_tol=rel_tol, abs_tol=abs_tol)
    mu._cache[key] = out
    return out


def form1_with_err(h, g, mu: Measure, *, convention="sgn", rel_tol=1e-10, abs_tol=1e-13):
    """Skew pairing and its error estimate; see form1."""
    if convention not in _FORM1_CONVENTIONS:
        raise ValueError(f"convention must be one of {_FORM1_CONVENTIONS}")
    h_eval, _, _, _ = _as_eval(h)
    g_eval, _, _, _ = _as_eval(g)
    a, b, to_u, _, _ = mu._params()
    if mu.domain.kind == "circle":
        hp = h_eval
        gp = g_eval
    else:
        hp = lambda t: h_eval(to_u(t))
        gp = lambda t: g_eval(to_u(t))
    G = mu.cumulative_param(gp, rel_tol=rel_tol * 1e-2, abs_tol=abs_tol * 1e-2)
    total, terr = mu.integrate_param(gp, rel_tol=rel_tol, abs_tol=abs_tol)
    if convention == "sgn":
        inner = lambda t: total - 2.0 * G(t)
    else:
        inner = lambda t: G(t)
    val, err = mu.integrate_param(
        lambda t: hp(t) * inner(t), rel_tol=rel_tol, abs_tol=abs_tol
    )
    return val, err + terr + G.err_estimate


def form1(h, g, mu: Measure, *, convention="sgn", rel_tol=1e-10, abs_tol=1e-13):
    """Skew-symmetrized pairing of h and g against mu x mu.

    Default convention pairs through the odd kernel sgn(v - u):

        (h, g) = int int h(u) sgn(v - u) g(v) mu(du) mu(dv)

    computed as int h(u) (G_total - 2 G(u)) mu(du) with G the running
    integral of g.  This is the unique sign for which the skew moment matrix
    has a positive Pfaffian equal to the brute-force interaction integral.
    convention="step" keeps the literal unit-step kernel eps(u - v) for
    auditing; it does not produce a skew pairing.

    On circle measures everything runs in the angle chart on [0, 2*pi).
    """
    val, _ = form1_with_err(h, g, mu, convention=convention,
                            rel_tol=rel_tol, abs_tol=abs_tol)
    return val


def form2_with_err(h, g, mu: Measure, *, rel_tol=1e-11, abs_tol=1e-14):
    h_eval, _, h_single, hbf = _as_eval(h)
    g_eval, _, g_single, gbf = _as_eval(g)
    if h_single and g_single and hbf.chart == gbf.chart:
        return _moment_with_err(mu, hbf.exponent + gbf.exponent, rel_tol=rel_tol)
    a, b, to_u, _, _ = mu._params()
    if mu.domain.kind == "circle":
        p = lambda x: h_eval(x) * g_eval(x)
    else:
        p = lambda t: h_eval(to_u(t)) * g_eval(to_u(t))
    return mu.integrate_param(p, rel_tol=rel_tol, abs_tol=abs_tol)


def form2(h, g, mu: Measure, *, rel_tol=1e-11, abs_tol=1e-14):
    """Plain product pairing int h(u) g(u) mu(du); no conjugation on the circle."""
    return form2_with_err(h, g, mu, rel_tol=rel_tol, abs_tol=abs_tol)[0]


def form4_with_err(h, g, mu: Measure, *, direct=False, rel_tol=1e-11, abs_tol=1e-14):
    h_eval, h_d, h_single, hbf = _as_eval(h)
    g_eval, g_d, g_single, gbf = _as_eval(g)
    if h_single and g_single and not direct:
        k, l = hbf.exponent, gbf.exponent
        if k == l:
            return 0.0, 0.0
        mval, merr = _moment_with_err(mu, k + l - 1, rel_tol=rel_tol)
        c = float(l - k)
        return c * mval, abs(c) * merr
    a, b, to_u, _, _ = mu._params()
    if mu.domain.kind == "circle":
        p = lambda x: h_eval(x) * g_d(x) - g_eval(x) * h_d(x)
    else:
        p = lambda t: (h_eval(to_u(t)) * g_d(to_u(t))
                       - g_eval(to_u(t)) * h_d(to_u(t)))
    return mu.integrate_param(p, rel_tol=rel_tol, abs_tol=abs_tol)


def form4(h, g, mu: Measure, *, direct=False, rel_tol=1e-11, abs_tol=1e-14):
    """Derivative pairing int (h g' - g h') dmu.

    Derivatives are the analytic monomial rule (u^k)' = k u^{k-1}; on the
    circle the derivative is with respect to the complex coordinate u, not
    the angle.  For monomial arguments this reduces to (l - k) times the
    (k + l - 1)-th moment, which is the default evaluation; direct=True
    forces quadrature of the full integrand (used to cross-check the shortcut).
    """
    return form4_with_err(h, g, mu, direct=direct, rel_tol=rel_tol, abs_tol=abs_tol)[0]


# -- measure builders ---------------------------------------------------------------


def uniform(a: float, b: float) -> Measure:
    """Uniform probability measure on (a, b)."""
    c = -math.log(b - a)
    return Measure(finite_interval(a, b),
                   log_weight=lambda u: np.full_like(np.asarray(u, dtype=float), c),
                   normalized=True, name=f"uniform({a:g},{b:g})")


def lebesgue(a: float, b: float) -> Measure:
    """Lebesgue measure du on (a, b)."""
    return Measure(finite_interval(a, b),
                   log_weight=lambda u: np.zeros_like(np.asarray(u, dtype=float)),
                   normalized=(b - a == 1.0), name=f"lebesgue({a:g},{b:g})")


def exp_measure(rate: float = 1.0) -> Measure:
    """exp(-rate*u) du on (0, inf); unit mass iff rate == 1."""
    if rate <= 0:
        raise ValueError("rate must be positive")
    return Measure(semi_infinite(0.0),
                   log_weight=lambda u: -rate * np.asarray(u, dtype=float),
                   normalized=(rate == 1.0), name=f"exp(rate={rate:g})")


def power_measure(p: float, a: float = 0.0, b: float = 1.0) -> Measure:
    """u^p du on (a, b) (a >= 0 when p is not an integer)."""

    def lw(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            return p * np.log(u)

    return Measure(finite_interval(a, b), log_weight=lw, name=f"u^{p:g} du({a:g},{b:g})")


def circle_uniform() -> Measure:
    """Haar probability measure dx / (2*pi) on the unit circle."""
    c = -math.log(TWO_PI)
    return Measure(circle(),
                   log_weight=lambda u: np.full_like(np.real(np.asarray(u)), c),
                   normalized=True, name="circle-uniform")


def circle_cos(amp: float = 0.5) -> Measure:
    """Probability density (1 + amp*cos x) / (2*pi) in the angle chart; |amp| < 1."""
    if not abs(amp) < 1.0:
        raise ValueError("|amp| must be < 1 for a positive weight")

    def lw(u):
        u = np.asarray(u)
        return np.log1p(amp * np.real(u)) - math.log(TWO_PI)

    return Measure(circle(), log_weight=lw, normalized=True,
                   name=f"circle-cos(amp={amp:g})")


def cone_weight_measure(beta: int, n: int, a: float, rate: float = 1.0) -> Measure:
    """Reduced cone measure for w(u) = u^a exp(-rate*u): density u^(a - N_beta) e^(-rate*u).

    N_beta = (beta/2)(n-1) + 1; requires a - N_beta > -1 for an integrable
    endpoint at zero.
    """
    n_beta = 0.5 * beta * (n - 1) + 1.0
    expo = a - n_beta
    if expo <= -1.0:
        raise ValueError(f"exponent {expo:g} <= -1: mass diverges at 0")

    def lw(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            return expo * np.log(u) - rate * u

    return Measure(semi_infinite(0.0), log_weight=lw,
                   name=f"cone-weight(beta={beta},n={n},a={a:g},rate={rate:g})")


# -- measure mini-language ----------------------------------------------------------

MEASURE_GRAMMAR = """\
SPEC      := FAMILY (';' MODIFIER)*
FAMILY    := name (':' key '=' value (',' key '=' value)*)?
MODIFIER  := 'powlog' ':' ('pow' '=' real)? (',' 'log' '=' int)?

families:
  uniform:a=<r>,b=<r>        uniform probability on (a, b)
  lebesgue:a=<r>,b=<r>       du on (a, b)
  exp:rate=<r>               exp(-rate*u) du on (0, inf)
  power:p=<r>,a=<r>,b=<r>    u^p du on (a, b)
  circle-uniform             dx/(2*pi) on the circle
  circle-cos:amp=<r>         (1 + amp*cos x)/(2*pi) on the circle
  cone-weight:beta=<i>,n=<i>,a=<r>,rate=<r>
                             u^(a - N_beta) e^(-rate*u) du on (0, inf)

the powlog modifier multiplies the weight by u^pow * |log u|^log (line only).
"""


def _parse_kv(body: str) -> dict:
    out = {}
    if body:
        for item in body.split(","):
            if "=" not in item:
                raise ValueError(f"expected key=value, got {item!r}")
            k, v = item.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def parse_measure(spec: str) -> Measure:
    """Build a Measure from the flat mini-language (see MEASURE_GRAMMAR)."""
    parts = [p.strip() for p in spec.strip().split(";") if p.strip()]
    if not parts:
        raise ValueError("empty measure spec")
    head, mods = parts[0], parts[1:]
    name, _, body = head.partition(":")
    kv = _parse_kv(body)
    try:
        if name == "uniform":
            mu = uniform(float(kv.get("a", 0)), float(kv.get("b", 1)))
        elif name == "lebesgue":
            mu = lebesgue(float(kv.get("a", 0)), float(kv.get("b", 1)))
        elif name == "exp":
            mu = exp_measure(float(kv.get("rate", 1)))
        elif name == "power":
            mu = power_measure(float(kv.get("p", 1)), float(kv.get("a", 0)),
                               float(kv.get("b", 1)))
        elif name == "circle-uniform":
            mu = circle_uniform()
        elif name == "circle-cos":
            mu = circle_cos(float(kv.get("amp", 0.5)))
        elif name == "cone-weight":
            mu = cone_weight_measure(int(kv["beta"]), int(kv["n"]),
                                     float(kv.get("a", 0)), float(kv.get("rate", 1)))
        else:
            raise ValueError(f"unknown measure family {name!r}")
    except KeyError as exc:
        raise ValueError(f"measure family {name!r} missing parameter {exc}") from exc

    for mod in mods:
        mname, _, mbody = mod.partition(":")
        if mname != "powlog":
            raise ValueError(f"unknown modifier {mname!r}")
        if mu.domain.kind == "circle":
            raise ValueError("powlog modifier applies to line measures only")
        mkv = _parse_kv(mbody)
        pw = float(mkv.get("pow", 0))
        lg = int(mkv.get("log", 0))
        base_lw = mu.log_weight

        def lw(u, base_lw=base_lw, pw=pw, lg=lg):
            u = np.asarray(u, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                extra = pw * np.log(u)
                if lg:
                    extra = extra + lg * np.log(np.abs(np.log(u)))
            return base_lw(u) + extra

        mu = Measure(mu.domain, log_weight=lw, name=f"{mu.name};powlog(pow={pw:g},log={lg})")
    return mu
