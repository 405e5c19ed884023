"""Brute-force evaluation of the interaction integral straight from its definition.

This is the ground truth every matrix identity is checked against: either a
full tensor product of 1-D quadrature panels over domain^N (with panel-halving
refinement and power-law extrapolation, since the odd-beta integrand has
|u_i - u_j| creases across every pairwise diagonal), or seeded Monte Carlo
via inverse-CDF sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BudgetExceeded, NonSamplable
from .forms import Measure
from .quadrature import adaptive_interval, gauss_legendre

TENSOR_MAX_N = {1: 4, 2: 4, 4: 3}
LEVEL_FLOP_CAP = 8.0e10  # max grid work (M^n multiply-adds) per refinement level
RULE_ORDER = 8
MAX_LEVELS = 6
TENSOR_TARGET_REL = 2e-7
CDF_TABLE = 2048
DEFAULT_SAMPLES = 10 ** 6


@dataclass(frozen=True)
class OracleRequest:
    """Brute-force request; tensor grids are only allowed at small N."""

    mu: Measure
    beta: int
    n: int
    method: str = "tensor_quadrature"
    samples: int = DEFAULT_SAMPLES
    seed: Optional[int] = None

    def __post_init__(self):
        if self.beta not in (1, 2, 4):
            raise ValueError(f"beta must be 1, 2 or 4, got {self.beta}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.method not in ("tensor_quadrature", "monte_carlo"):
            raise ValueError(f"unknown method {self.method!r}")


def _base_layout(mu: Measure):
    """Panel edges from an adaptive pass over the measure's mass."""
    key = "oracle_layout"
    if key in mu._cache:
        return mu._cache[key]
    a, b, *_ = mu._params()
    p = mu.param_integrand(lambda t: np.ones_like(np.asarray(t, dtype=float)))
    _, _, edges = adaptive_interval(
        p, a, b, rel_tol=1e-10, abs_tol=1e-14,
        breakpoints=mu._breakpoints(), collect_panels=True, min_panels=4,
    )
    mu._cache[key] = edges
    return edges


def _flat_rule(mu: Measure, level: int):
    """Composite rule at refinement `level`: each base panel split 2^level ways."""
    edges = _base_layout(mu)
    splits = 1 << level
    xg, wg = gauss_legendre(RULE_ORDER)
    nodes = []
    weights = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sub = np.linspace(lo, hi, splits + 1)
        for s0, s1 in zip(sub[:-1], sub[1:]):
            mid, half = 0.5 * (s0 + s1), 0.5 * (s1 - s0)
            nodes.append(mid + half * xg)
            weights.append(half * wg)
    t = np.concatenate(nodes)
    qw = np.concatenate(weights)
    with np.errstate(all="ignore"):
        dens = mu._density_vals(t)
        dens = np.where(np.isnan(dens), 0.0, dens)
        u = np.asarray(mu.to_u(t))
        w = qw * dens
    # drop dead tail nodes so overflowed chart values never meet the grid
    keep = (w != 0.0) & np.isfinite(np.abs(u))
    return u[keep], w[keep]


def _interaction_sum(u: np.ndarray, w: np.ndarray, beta: int, n: int) -> float:
    """sum over the full tensor grid of prod_{i<j} |u_i - u_j|^beta, weighted.

    Axes are contracted symmetrically (one shared 1-D rule per factor), so the
    value is invariant under relabeling the grid axes by construction.
    """
    if n == 1:
        return float(np.sum(w))
    with np.errstate(all="ignore"):
        E = np.abs(u[:, None] - u[None, :]) ** beta
    if n == 2:
        return float(w @ E @ w)
    if n == 3:
        Ew = E * w[None, :]
        inner = np.einsum("ik,ik->i", Ew @ E, Ew)
        return float(w @ inner)
    if n == 4:
        m = u.shape[0]
        total = 0.0
        for i in range(m):
            xi = E * (E[i] * w)[None, :]  # xi[j, k] = E_jk E_ik w_k
            y = xi @ E
            row = np.einsum("jl,jl->j", y, xi)
            total += w[i] * float((w * E[i]) @ row)
        return total
    raise BudgetExceeded(f"tensor grids not supported for n = {n}")


def _romberg(values):
    """Cascade limit for sequences on halved panels with even-power error decay.

    The |u_i - u_j| creases of the odd-beta integrand leave a clean a*h^2 +
    b*h^4 + ... expansion (verified ratios of 4.00 between levels); each
    cascade stage removes the next even power.  Returns (value, err_estimate).
    """
    rows = [list(values)]
    for stage, power in enumerate((2, 4, 6, 8)):
        prev = rows[-1]
        if len(prev) < 2:
            break
        factor = float(2 ** power - 1)
        rows.append([prev[i + 1] + (prev[i + 1] - prev[i]) / factor
                     for i in range(len(prev) - 1)])
    value = rows[-1][-1]
    prev_best = rows[-2][-1] if len(rows) >= 2 else value
    err = 3.0 * abs(value - prev_best) + 2e-14 * abs(value)
    return value, err


def zbeta_bruteforce(req: OracleRequest):
    """Evaluate the interaction integral directly; returns (value, err_estimate)."""
    if req.method == "tensor_quadrature":
        return _tensor(req)
    return _monte_carlo(req)


def _tensor(req: OracleRequest):
    mu, beta, n = req.mu, req.beta, req.n
    if n > TENSOR_MAX_N[beta]:
        raise BudgetExceeded(
            f"tensor method limited to n <= {TENSOR_MAX_N[beta]} for beta={beta}"
        )
    key = ("oracle_tensor", beta, n)
    if key in mu._cache:
        return mu._cache[key]
    nfact = math.factorial(n)
    values = []
    out = None
    for level in range(MAX_LEVELS):
        m_next = len(_base_layout(mu)) - 1
        m_next = m_next * (1 << level) * RULE_ORDER
        if float(m_next) ** min(n, 4) > LEVEL_FLOP_CAP:
            if not values:
                raise BudgetExceeded(f"tensor grid {m_next}^{n} exceeds the work cap")
            break
        u, w = _flat_rule(mu, level)
        values.append(_interaction_sum(u, w, beta, n) / nfact)
        if len(values) < 2:
            continue
        diff = abs(values[-1] - values[-2])
        scale = max(abs(values[-1]), 1e-300)
        if diff <= 1e-12 * scale:
            out = (values[-1], diff + 1e-15 * scale)
            break
        if beta % 2 == 1:
            cand, cerr = _romberg(values)
            if cerr <= TENSOR_TARGET_REL * max(abs(cand), 1e-300) and len(values) >= 3:
                out = (cand, cerr)
                break
    if out is None:
        if beta % 2 == 1:
            out = _romberg(values)
        else:
            # smooth integrand: plain refinement, last difference as the estimate
            diff = abs(values[-1] - values[-2]) if len(values) >= 2 else abs(values[-1])
            out = (values[-1], diff + 1e-15 * abs(values[-1]))
    mu._cache[key] = out
    return out


def _sampler(mu: Measure):
    """Inverse-CDF sampler from a cached cumulative table (monotone cubic)."""
    key = "oracle_sampler"
    if key in mu._cache:
        return mu._cache[key]
    from scipy.interpolate import PchipInterpolator

    a, b, *_ = mu._params()
    edges = _base_layout(mu)
    grid = [a]
    per_panel = max(4, CDF_TABLE // max(len(edges) - 1, 1))
    for lo, hi in zip(edges[:-1], edges[1:]):
        grid.extend(np.linspace(lo, hi, per_panel + 1)[1:])
    t = np.array(grid)
    G = mu.cumulative_param(lambda s: np.ones_like(np.asarray(s, dtype=float)),
                            rel_tol=1e-11, abs_tol=1e-15)
    cdf = np.real(np.asarray(G(t), dtype=complex))
    mass = float(cdf[-1])
    if not (math.isfinite(mass) and mass > 0):
        raise NonSamplable(f"total mass {mass} not usable for sampling")
    keep = np.concatenate(([True], np.diff(cdf) > 0))
    tk, ck = t[keep], cdf[keep]
    if len(tk) < 4:
        raise NonSamplable("cumulative table is numerically flat")
    inv = PchipInterpolator(ck, tk, extrapolate=False)
    mu._cache[key] = (inv, mass, float(ck[0]), float(ck[-1]))
    return mu._cache[key]


def _monte_carlo(req: OracleRequest):
    mu, beta, n = req.mu, req.beta, req.n
    inv, mass, clo, chi = _sampler(mu)
    rng = np.random.default_rng(req.seed)
    total = 0.0
    total_sq = 0.0
    count = 0
    batch = 1 << 17
    log_norm = n * math.log(mass) - math.lgamma(n + 1)
    remaining = int(req.samples)
    while remaining > 0:
        size = min(batch, remaining)
        q = rng.uniform(clo, chi, size=(size, n))
        t = np.asarray(inv(q))
        u = np.asarray(mu.to_u(t))
        logv = np.zeros(size)
        for i in range(n):
            for j in range(i + 1, n):
                with np.errstate(divide="ignore"):
                    logv += np.log(np.abs(u[:, i] - u[:, j]))
        vals = np.exp(beta * logv + log_norm)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals * vals))
        count += size
        remaining -= size
    mean = total / count
    var = max(total_sq / count - mean * mean, 0.0)
    stderr = math.sqrt(var / count)
    return mean, 3.0 * stderr
