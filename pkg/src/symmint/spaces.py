"""Symmetric-space catalog: compile a family + dimensions + radial weight to a
1-D reduced measure, and evaluate invariant integrals up to the (irrelevant)
global constant.

Each family's invariant integral of a tensor-power weight prod_j w(coord_j)
collapses to the interaction integral of a reduced measure mu on an interval
or on the circle:

    cone              u in (0, inf)    density  w(u) * u^(-N_beta)
    cone_dual         unit circle      density  w(e^{ix}) / (2*pi)
    grassmann         u in (1, inf)    u = cosh(2*tau), boosts tau
    grassmann_dual    u in (-1, 1)     u = cos(2*theta), principal angles theta
    classical_domain  u in (1, inf)    u = cosh(2*lambda)

The Grassmann/domain Jacobians below are derived from sinh^2 t = (u-1)/2,
sinh(2t) = sqrt(u^2-1), du = 2 sinh(2t) dt (and the sin/cos analogues); they
are certified numerically by comparing against direct quadrature in the
original boost/angle chart (`original_chart_measure`), which keeps the two
routes independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import forms, oracle, zbeta
from .errors import DivisionByZeroMass, NoConvergence, NonIntegrableWeight
from .forms import Chart, Measure
from .quadrature import TWO_PI, circle, finite_interval, semi_infinite
from .zbeta import EvalResult, ZRequest

FAMILIES = ("cone", "cone_dual", "grassmann", "grassmann_dual", "classical_domain")

EXPECTED_CHART = {
    "cone": "eigenvalue",
    "cone_dual": "circle",
    "grassmann": "boost",
    "grassmann_dual": "angle",
    "classical_domain": "boost",
}


@dataclass(frozen=True)
class SpaceSpec:
    """A symmetric-space family with its interaction exponent and dimensions.

    cone / cone_dual / classical_domain use n; the Grassmann families use
    (p, q) with p <= q, and reduce to p points.  The root multiplicities
    beta*(q-p) and beta-1 of the Grassmann radial density are exposed in
    diagnostics(); keeping p and q split (rather than collapsing to derived
    exponents) is what makes that report possible.
    """

    family: str
    beta: int
    n: Optional[int] = None
    p: Optional[int] = None
    q: Optional[int] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.beta not in (1, 2, 4):
            raise ValueError(f"beta must be 1, 2 or 4, got {self.beta}")
        if self.family in ("grassmann", "grassmann_dual"):
            if self.p is None or self.q is None:
                raise ValueError(f"{self.family} needs p and q")
            if not (1 <= self.p <= self.q):
                raise ValueError(f"need 1 <= p <= q, got p={self.p}, q={self.q}")
        else:
            if self.n is None or self.n < 1:
                raise ValueError(f"{self.family} needs n >= 1")

    @property
    def points(self) -> int:
        return self.p if self.family.startswith("grassmann") else self.n

    def diagnostics(self) -> dict:
        out = {"family": self.family, "beta": self.beta, "points": self.points}
        if self.family == "cone":
            out["moment_shift"] = 0.5 * self.beta * (self.n - 1) + 1.0
        if self.family.startswith("grassmann"):
            out["root_multiplicity_long"] = self.beta * (self.q - self.p)
            out["root_multiplicity_short"] = self.beta - 1
        return out


@dataclass(frozen=True)
class WeightSpec:
    """Single-variable tensor-power weight factor and the chart it consumes.

    chart: "eigenvalue" (u), "boost" (tau or lambda), "angle" (theta), or
    "circle" (the point e^{i*theta}).  log_w, when given, is used instead of
    log(w(.)) so far tails keep full precision.
    """

    w: Callable
    chart: str
    log_w: Optional[Callable] = None
    name: str = "w"

    def __post_init__(self):
        if self.chart not in ("eigenvalue", "boost", "angle", "circle"):
            raise ValueError(f"unknown weight chart {self.chart!r}")

    def log_at(self, x):
        if self.log_w is not None:
            return self.log_w(x)
        with np.errstate(divide="ignore"):
            return np.log(self.w(x))


def _check_chart(space: SpaceSpec, w: WeightSpec):
    want = EXPECTED_CHART[space.family]
    if w.chart != want:
        raise ValueError(
            f"family {space.family} consumes a {want!r}-chart weight, got {w.chart!r}"
        )


def _log_sinh(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return x + np.log1p(-np.exp(-2.0 * x)) - math.log(2.0)


def reduced_log_density(space: SpaceSpec, w: WeightSpec) -> Callable:
    """Closed-form log-density of the reduced measure in the eigenvalue chart u.

    This is the Jacobian algebra under test in the change-of-variables
    certification; reduce() composes exactly this callable with a
    well-conditioned integration chart.  The optional keyword arguments let a
    chart supply cancellation-free evaluations of u -+ 1 and of the radial
    coordinate; they never change the formula, only its floating-point
    accuracy near the interval endpoints.
    """
    _check_chart(space, w)
    beta = space.beta
    if space.family == "cone":
        n_beta = 0.5 * beta * (space.n - 1) + 1.0

        def lw(u, w=w, n_beta=n_beta, **_):
            u = np.asarray(u, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                return w.log_at(u) - n_beta * np.log(u)

        return lw

    if space.family == "cone_dual":
        def lw(u, w=w, **_):
            return w.log_at(u) - math.log(TWO_PI)

        return lw

    if space.family == "grassmann":
        e_long = 0.5 * beta * (space.q - space.p)
        e_short = 0.5 * beta - 1.0

        def lw(u, u_minus_1=None, u_plus_1=None, coord=None,
               w=w, e_long=e_long, e_short=e_short):
            u = np.asarray(u, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                tau = np.arccosh(u) / 2.0 if coord is None else np.asarray(coord)
                um1 = u - 1.0 if u_minus_1 is None else np.asarray(u_minus_1)
                up1 = u + 1.0 if u_plus_1 is None else np.asarray(u_plus_1)
                return (w.log_at(tau)
                        + e_long * (np.log(um1) - math.log(2.0))
                        + e_short * (np.log(um1) + np.log(up1))
                        - math.log(2.0))

        return lw

    if space.family == "grassmann_dual":
        e_long = 0.5 * beta * (space.q - space.p)
        e_short = 0.5 * beta - 1.0

        def lw(u, one_minus_u=None, one_plus_u=None, coord=None,
               w=w, e_long=e_long, e_short=e_short):
            u = np.asarray(u, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                theta = (np.arccos(np.clip(u, -1.0, 1.0)) / 2.0 if coord is None
                         else np.asarray(coord))
                omu = 1.0 - u if one_minus_u is None else np.asarray(one_minus_u)
                opu = 1.0 + u if one_plus_u is None else np.asarray(one_plus_u)
                return (w.log_at(theta)
                        + e_long * (np.log(omu) - math.log(2.0))
                        + e_short * (np.log(omu) + np.log(opu))
                        - math.log(2.0))

        return lw

    # classical_domain
    def lw(u, coord=None, w=w, **_):
        u = np.asarray(u, dtype=float)
        with np.errstate(invalid="ignore"):
            lam = np.arccosh(u) / 2.0 if coord is None else np.asarray(coord)
            return w.log_at(lam)

    return lw


def reduce(space: SpaceSpec, w: WeightSpec):
    """Compile (space, weight) to the reduced measure; returns (Measure, N).

    The density is the closed-form eigenvalue-chart expression
    (reduced_log_density); for the substituted families it is integrated
    through the monotone boost/angle chart, where endpoint singularities of
    the u-density cancel against the chart Jacobian and Gaussian-type weights
    keep fast decay.
    """
    _check_chart(space, w)
    beta = space.beta
    lw = reduced_log_density(space, w)
    if space.family == "cone":
        mu = Measure(semi_infinite(0.0), log_weight=lw,
                     name=f"cone[beta={beta},n={space.n},{w.name}]")
        return mu, space.n

    if space.family == "cone_dual":
        mu = Measure(circle(), log_weight=lw,
                     name=f"cone_dual[beta={beta},n={space.n},{w.name}]")
        return mu, space.n

    if space.family == "grassmann":
        def to_u(t):
            with np.errstate(over="ignore"):
                return np.cosh(2.0 * np.asarray(t, dtype=float))

        def dens(t, lw=lw):
            t = np.asarray(t, dtype=float)
            with np.errstate(all="ignore"):
                sh = np.sinh(t)
                return (lw(to_u(t), u_minus_1=2.0 * sh * sh,
                           u_plus_1=2.0 * np.cosh(t) ** 2, coord=t)
                        + math.log(2.0) + _log_sinh(2.0 * t))

        ch = Chart(semi_infinite(0.0), to_u=to_u, log_density=dens,
                   from_u=lambda u: np.arccosh(np.asarray(u, dtype=float)) / 2.0,
                   increasing=True)
        mu = Measure(semi_infinite(1.0), chart=ch,
                     name=f"grassmann[beta={beta},p={space.p},q={space.q},{w.name}]")
        return mu, space.p

    if space.family == "grassmann_dual":
        # increasing chart: u = -cos(2*phi), phi in (0, pi/2), theta = pi/2 - phi
        def to_u(t):
            return -np.cos(2.0 * np.asarray(t, dtype=float))

        def dens(t, lw=lw):
            t = np.asarray(t, dtype=float)
            with np.errstate(all="ignore"):
                st, ct = np.sin(t), np.cos(t)
                return (lw(to_u(t), one_minus_u=2.0 * ct * ct,
                           one_plus_u=2.0 * st * st, coord=math.pi / 2.0 - t)
                        + np.log(2.0 * np.sin(2.0 * t)))

        ch = Chart(finite_interval(0.0, math.pi / 2.0), to_u=to_u, log_density=dens,
                   from_u=lambda u: np.arccos(-np.clip(np.asarray(u, dtype=float),
                                                       -1.0, 1.0)) / 2.0,
                   increasing=True)
        mu = Measure(finite_interval(-1.0, 1.0), chart=ch,
                     name=f"grassmann_dual[beta={beta},p={space.p},q={space.q},{w.name}]")
        return mu, space.p

    # classical_domain
    def to_u(t):
        with np.errstate(over="ignore"):
            return np.cosh(2.0 * np.asarray(t, dtype=float))

    def dens(t, lw=lw):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            return lw(to_u(t), coord=t) + math.log(2.0) + _log_sinh(2.0 * t)

    ch = Chart(semi_infinite(0.0), to_u=to_u, log_density=dens,
               from_u=lambda u: np.arccosh(np.asarray(u, dtype=float)) / 2.0,
               increasing=True)
    mu = Measure(semi_infinite(1.0), chart=ch,
                 name=f"classical_domain[beta={beta},n={space.n},{w.name}]")
    return mu, space.n


def original_chart_measure(space: SpaceSpec, w: WeightSpec) -> Measure:
    """The same measure parametrized in the original boost/angle chart.

    Built directly from the radial densities of the flat-coordinate integral
    (restricted to the positive fundamental chart), independently of the
    closed-form Jacobian algebra in reduce(); brute-force integration against
    this measure certifies that algebra.
    """
    _check_chart(space, w)
    beta = space.beta
    if space.family in ("cone", "cone_dual"):
        return reduce(space, w)[0]  # the eigenvalue chart is already original

    if space.family == "grassmann":
        m_long = beta * (space.q - space.p)
        m_short = beta - 1

        def dens(tau, w=w):
            tau = np.asarray(tau, dtype=float)
            return (w.log_at(tau) + m_long * _log_sinh(tau)
                    + m_short * _log_sinh(2.0 * tau))

        ch = Chart(semi_infinite(0.0),
                   to_u=lambda t: np.cosh(2.0 * np.asarray(t, dtype=float)),
                   log_density=dens,
                   from_u=lambda u: np.arccosh(np.asarray(u, dtype=float)) / 2.0,
                   increasing=True)
        return Measure(semi_infinite(1.0), chart=ch,
                       name=f"grassmann-orig[beta={beta},p={space.p},q={space.q}]")

    if space.family == "grassmann_dual":
        m_long = beta * (space.q - space.p)
        m_short = beta - 1

        def dens(th, w=w):
            th = np.asarray(th, dtype=float)
            with np.errstate(divide="ignore"):
                return (w.log_at(th) + m_long * np.log(np.sin(th))
                        + m_short * np.log(np.sin(2.0 * th)))

        ch = Chart(finite_interval(0.0, math.pi / 2.0),
                   to_u=lambda t: np.cos(2.0 * np.asarray(t, dtype=float)),
                   log_density=dens, from_u=None, increasing=False)
        return Measure(finite_interval(-1.0, 1.0), chart=ch,
                       name=f"grassmann_dual-orig[beta={beta},p={space.p},q={space.q}]")

    # classical_domain: lambda chart, density w(l) * sinh|2l| on (0, inf), doubled
    def dens(lam, w=w):
        lam = np.asarray(lam, dtype=float)
        return w.log_at(lam) + _log_sinh(2.0 * lam) + math.log(2.0)

    ch = Chart(semi_infinite(0.0),
               to_u=lambda t: np.cosh(2.0 * np.asarray(t, dtype=float)),
               log_density=dens,
               from_u=lambda u: np.arccosh(np.asarray(u, dtype=float)) / 2.0,
               increasing=True)
    return Measure(semi_infinite(1.0), chart=ch,
                   name=f"classical_domain-orig[beta={beta},n={space.n}]")


def integrate_invariant(space: SpaceSpec, w: WeightSpec, *,
                        stabilize: bool = False) -> EvalResult:
    """Invariant integral of the tensor-power weight, up to the global constant.

    Returns the interaction-integral value of the reduced measure; the
    multiplicative constant relating it to the actual volume integral is
    well defined but deliberately not computed, so only constant-free uses
    (ratios, identity checks) are meaningful.  The method string carries an
    explicit "constant excluded" marker.
    """
    mu, n = reduce(space, w)
    try:
        mu.total_mass()
    except NoConvergence as exc:
        raise NonIntegrableWeight(
            f"reduced measure for {space.family} has non-convergent mass: {exc}"
        ) from exc
    res = zbeta.zbeta(ZRequest(mu, space.beta, n, stabilize=stabilize))
    res.method += "; constant C~ excluded"
    return res


def expectation_ratio(space: SpaceSpec, w_num: WeightSpec, w_den: WeightSpec) -> float:
    """Ratio of two invariant integrals on the same space (constants cancel)."""
    num = integrate_invariant(space, w_num)
    den = integrate_invariant(space, w_den)
    if den.value == 0.0 or not math.isfinite(den.value):
        raise DivisionByZeroMass(
            f"denominator weight integrates to {den.value}; ratio undefined"
        )
    return num.value / den.value


def certify_change_of_variables(space: SpaceSpec, w: WeightSpec):
    """Both evaluation routes for one space: (determinantal, brute-force, err).

    Route A evaluates the matrix identity on the reduced eigenvalue-chart
    measure; route B brute-forces the original-chart integral on a tensor
    grid.  Agreement validates every Jacobian in reduce().
    """
    mu, n = reduce(space, w)
    res = zbeta.zbeta(ZRequest(mu, space.beta, n))
    orig = original_chart_measure(space, w)
    val, err = oracle.zbeta_bruteforce(
        oracle.OracleRequest(orig, space.beta, n)
    )
    return res.value, val, err


# -- weight mini-language -------------------------------------------------------

WEIGHT_GRAMMAR = """\
WSPEC := name (':' key '=' value (',' key '=' value)*)?

weights (chart they consume is set by the space family):
  one                      w = 1
  gauss:sigma=<r>          w(x) = exp(-x^2 / (2 sigma^2))   (boost/angle charts)
  sech:k=<r>               w(x) = sech(x)^k                 (boost chart)
  powexp:a=<r>,rate=<r>    w(u) = u^a exp(-rate*u)          (eigenvalue chart)
  circle-cos:amp=<r>       w(u) = 1 + amp*Re(u)             (circle chart)
"""


def parse_weight(spec: str, family: str) -> WeightSpec:
    """Build the WeightSpec for a family from the flat grammar above."""
    chart = EXPECTED_CHART[family]
    name, _, body = spec.strip().partition(":")
    kv = forms._parse_kv(body)
    if name == "one":
        return WeightSpec(
            w=lambda x: np.ones_like(np.real(np.asarray(x, dtype=complex))),
            chart=chart,
            log_w=lambda x: np.zeros_like(np.real(np.asarray(x, dtype=complex))),
            name="one",
        )
    if name == "gauss":
        sigma = float(kv.get("sigma", 1.0))
        if chart not in ("boost", "angle"):
            raise ValueError("gauss weight applies to boost/angle charts")
        c = 1.0 / (2.0 * sigma * sigma)
        return WeightSpec(
            w=lambda x: np.exp(-c * np.asarray(x, dtype=float) ** 2),
            chart=chart,
            log_w=lambda x: -c * np.asarray(x, dtype=float) ** 2,
            name=f"gauss(sigma={sigma:g})",
        )
    if name == "sech":
        k = float(kv.get("k", 4.0))
        if chart != "boost":
            raise ValueError("sech weight applies to the boost chart")

        def log_w(x, k=k):
            x = np.asarray(x, dtype=float)
            return k * (math.log(2.0) - x - np.log1p(np.exp(-2.0 * x)))

        return WeightSpec(
            w=lambda x: np.exp(log_w(x)), chart=chart, log_w=log_w,
            name=f"sech^{k:g}",
        )
    if name == "powexp":
        a = float(kv.get("a", 0.0))
        rate = float(kv.get("rate", 1.0))
        if chart != "eigenvalue":
            raise ValueError("powexp weight applies to the eigenvalue chart")

        def log_w(u, a=a, rate=rate):
            u = np.asarray(u, dtype=float)
            with np.errstate(divide="ignore"):
                return a * np.log(u) - rate * u

        return WeightSpec(
            w=lambda u: np.exp(log_w(u)), chart=chart, log_w=log_w,
            name=f"u^{a:g}e^-{rate:g}u",
        )
    if name == "circle-cos":
        amp = float(kv.get("amp", 0.5))
        if chart != "circle":
            raise ValueError("circle-cos weight applies to the circle chart")
        if not abs(amp) < 1.0:
            raise ValueError("|amp| must be < 1")
        return WeightSpec(
            w=lambda u: 1.0 + amp * np.real(np.asarray(u)), chart=chart,
            name=f"circle-cos(amp={amp:g})",
        )
    raise ValueError(f"unknown weight family {name!r}")
