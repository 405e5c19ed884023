"""Moment-matrix assembly: the interaction integral as a determinant or Pfaffian.

For a weight mu and N points, the normalized interaction integral

    z_beta(mu) = (1/N!) * int ... int  prod_{i<j} |u_i - u_j|^beta  dmu^N

collapses to a single matrix functional of 1-D moments and pairings:

    beta=1, N even : Pfaffian of the N x N skew-kernel pairing matrix
    beta=1, N odd  : Pfaffian of that matrix bordered by plain moments
    beta=2         : determinant of the N x N moment matrix
                     (Hankel m_{k+l} on the line, Toeplitz c_{k-l} on the circle)
    beta=4         : Pfaffian of the 2N x 2N derivative-pairing matrix

Circle variants use the shifted power families u^{k-(N-1)/2} (beta=1) and
u^{k-(N-1)} (beta=4), plus an exact quarter-turn prefactor for beta=1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import forms, linalg
from .errors import DegenerateMeasure, ImagResidualTooLarge
from .forms import BasisFunction, Measure, circle_power, monomial

IMAG_TOL = 1e-8

FORM1_REL_TOL = 1e-10
FORM1_ABS_TOL = 1e-13
MOMENT_REL_TOL = 1e-11


@dataclass(frozen=True)
class ZRequest:
    """One evaluation request: measure, interaction exponent, point count."""

    mu: Measure
    beta: int
    n: int
    stabilize: bool = False

    def __post_init__(self):
        if self.beta not in (1, 2, 4):
            raise ValueError(f"beta must be 1, 2 or 4, got {self.beta}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")


@dataclass
class EvalResult:
    """Value plus evaluation metadata.

    imag_residual is the |imaginary part| discarded after circle evaluations
    (None on the real line); err_estimate propagates per-entry quadrature
    errors through a first-order determinant/Pfaffian sensitivity bound.
    """

    value: float
    imag_residual: Optional[float]
    matrix_dim: int
    method: str
    err_estimate: float


def _quarter_turn(r: int) -> complex:
    """(-i)^r evaluated exactly (integer quarter turns, no complex log)."""
    return (1.0 + 0.0j, -1.0j, -1.0 + 0.0j, 1.0j)[r % 4]


def _form1_block(mu: Measure, funcs):
    """Skew pairing matrix {(f_k, f_l)} with one running integral per column."""
    n = len(funcs)
    a, b, to_u, _, _ = mu._params()
    if mu.domain.kind == "circle":
        evals = list(funcs)
    else:
        evals = [lambda t, f=f: f(to_u(t)) for f in funcs]
    A = np.zeros((n, n), dtype=complex)
    E = np.zeros((n, n))
    for l in range(1, n):
        gp = evals[l]
        G = mu.cumulative_param(gp, rel_tol=FORM1_REL_TOL * 1e-2,
                                abs_tol=FORM1_ABS_TOL * 1e-2)
        total, terr = mu.integrate_param(gp, rel_tol=FORM1_REL_TOL,
                                         abs_tol=FORM1_ABS_TOL)
        for k in range(l):
            hp = evals[k]
            val, err = mu.integrate_param(
                lambda t: hp(t) * (total - 2.0 * G(t)),
                rel_tol=FORM1_REL_TOL, abs_tol=FORM1_ABS_TOL,
            )
            A[k, l] = val
            A[l, k] = -val
            tot_err = err + terr + G.err_estimate
            E[k, l] = E[l, k] = tot_err
    return A, E


def _moment_table(mu: Measure, exponents):
    vals, errs = {}, {}
    for e in exponents:
        v, err = forms._moment_with_err(mu, e, rel_tol=MOMENT_REL_TOL)
        vals[e] = v
        errs[e] = err
    return vals, errs


def _maybe_stabilize(A, E, mu, dim, req, border=0):
    """Congruence by the unit-triangular stabilized basis (line measures)."""
    if not req.stabilize or mu.domain.kind == "circle":
        return A, E, ""
    C = stabilized_basis(mu, dim)
    if border:
        C = np.block([
            [C, np.zeros((dim, border))],
            [np.zeros((border, dim)), np.eye(border)],
        ])
    A2 = C @ A @ C.T
    E2 = np.abs(C) @ E @ np.abs(C).T
    return A2, E2, ",stabilized"


def _finish(A, E, *, kind, prefactor=1.0 + 0.0j, method, extended=False,
            circle=False):
    if kind == "pf":
        raw = linalg.pfaffian(A, extended=extended, check=False)
    else:
        raw = linalg.det(A, extended=extended)
    raw = complex(raw) * prefactor
    err = linalg.first_order_error(A, E, abs(raw))
    if circle:
        imag = abs(raw.imag)
        if imag > IMAG_TOL * max(1.0, abs(raw.real)):
            raise ImagResidualTooLarge(
                f"imaginary residual {imag:.3e} too large for value {raw.real:.6e} "
                "(convention or quadrature bug)"
            )
        return EvalResult(float(raw.real), imag, A.shape[0], method, err)
    return EvalResult(float(raw.real), None, A.shape[0], method, err)


def zbeta_line(req: ZRequest, *, extended: bool = False) -> EvalResult:
    """Evaluate the interaction integral for a measure on a real interval."""
    mu, beta, n = req.mu, req.beta, req.n
    if mu.domain.kind == "circle":
        raise ValueError("zbeta_line needs a line measure; use zbeta_circle")
    if beta == 2:
        exps = [Fraction(k) for k in range(2 * n - 1)]
        vals, errs = _moment_table(mu, exps)
        A = np.array([[vals[Fraction(k + l)] for l in range(n)] for k in range(n)],
                     dtype=complex)
        E = np.array([[errs[Fraction(k + l)] for l in range(n)] for k in range(n)])
        A, E, suffix = _maybe_stabilize(A, E, mu, n, req)
        return _finish(A, E, kind="det", method="det[hankel]" + suffix,
                       extended=extended)
    if beta == 4:
        dim = 2 * n
        needed = sorted({Fraction(k + l - 1) for k in range(dim) for l in range(dim)
                         if k != l})
        vals, errs = _moment_table(mu, needed)
        A = np.zeros((dim, dim), dtype=complex)
        E = np.zeros((dim, dim))
        for k in range(dim):
            for l in range(dim):
                if k == l:
                    continue
                A[k, l] = (l - k) * vals[Fraction(k + l - 1)]
                E[k, l] = abs(l - k) * errs[Fraction(k + l - 1)]
        A, E, suffix = _maybe_stabilize(A, E, mu, dim, req)
        return _finish(A, E, kind="pf", method="pfaffian[derivative-kernel]" + suffix,
                       extended=extended)
    # beta == 1
    funcs = [monomial(k) for k in range(n)]
    A1, E1 = _form1_block(mu, funcs)
    if n % 2 == 0:
        A, E, suffix = _maybe_stabilize(A1, E1, mu, n, req)
        return _finish(A, E, kind="pf", method="pfaffian[skew-kernel,N even]" + suffix,
                       extended=extended)
    vals, errs = _moment_table(mu, [Fraction(k) for k in range(n)])
    A = np.zeros((n + 1, n + 1), dtype=complex)
    E = np.zeros((n + 1, n + 1))
    A[:n, :n] = A1
    E[:n, :n] = E1
    for k in range(n):
        A[k, n] = vals[Fraction(k)]
        A[n, k] = -vals[Fraction(k)]
        E[k, n] = E[n, k] = errs[Fraction(k)]
    A, E, suffix = _maybe_stabilize(A, E, mu, n, req, border=1)
    return _finish(A, E, kind="pf", method="pfaffian[bordered,N odd]" + suffix,
                   extended=extended)


def zbeta_circle(req: ZRequest, *, extended: bool = False) -> EvalResult:
    """Evaluate the interaction integral for a probability-type measure on the circle."""
    mu, beta, n = req.mu, req.beta, req.n
    if mu.domain.kind != "circle":
        raise ValueError("zbeta_circle needs a circle measure")
    if beta == 2:
        needed = sorted({Fraction(k - l) for k in range(n) for l in range(n)})
        vals, errs = _moment_table(mu, needed)
        A = np.array([[vals[Fraction(k - l)] for l in range(n)] for k in range(n)],
                     dtype=complex)
        E = np.array([[errs[Fraction(k - l)] for l in range(n)] for k in range(n)])
        return _finish(A, E, kind="det", method="det[toeplitz]", extended=extended,
                       circle=True)
    if beta == 4:
        dim = 2 * n
        shift = n - 1  # family u^{k - (N-1)}
        needed = sorted({Fraction(k + l - 2 * shift - 1)
                         for k in range(dim) for l in range(dim) if k != l})
        vals, errs = _moment_table(mu, needed)
        A = np.zeros((dim, dim), dtype=complex)
        E = np.zeros((dim, dim))
        for k in range(dim):
            for l in range(dim):
                if k == l:
                    continue
                A[k, l] = (l - k) * vals[Fraction(k + l - 2 * shift - 1)]
                E[k, l] = abs(l - k) * errs[Fraction(k + l - 2 * shift - 1)]
        return _finish(A, E, kind="pf", method="pfaffian[derivative-kernel]",
                       extended=extended, circle=True)
    # beta == 1: shifted family u^{k - (N-1)/2}, half-integer powers for even N
    shift = Fraction(n - 1, 2)
    funcs = [circle_power(Fraction(k) - shift) for k in range(n)]
    A1, E1 = _form1_block(mu, funcs)
    pref = _quarter_turn(n * (n - 1) // 2)
    if n % 2 == 0:
        return _finish(A1, E1, kind="pf", prefactor=pref,
                       method="pfaffian[skew-kernel,N even]", extended=extended,
                       circle=True)
    vals, errs = _moment_table(mu, [Fraction(k) - shift for k in range(n)])
    A = np.zeros((n + 1, n + 1), dtype=complex)
    E = np.zeros((n + 1, n + 1))
    A[:n, :n] = A1
    E[:n, :n] = E1
    for k in range(n):
        A[k, n] = vals[Fraction(k) - shift]
        A[n, k] = -vals[Fraction(k) - shift]
        E[k, n] = E[n, k] = errs[Fraction(k) - shift]
    return _finish(A, E, kind="pf", prefactor=pref,
                   method="pfaffian[bordered,N odd]", extended=extended, circle=True)


def zbeta(req: ZRequest, *, extended: bool = False) -> EvalResult:
    """Dispatch on the measure's domain."""
    if req.mu.domain.kind == "circle":
        return zbeta_circle(req, extended=extended)
    return zbeta_line(req, extended=extended)


def _gram_schmidt(mu: Measure, n: int):
    """Monic near-orthogonal basis under the product pairing; returns (C, norms).

    C is unit lower triangular; row k holds the monomial coefficients of the
    degree-k polynomial.  Raises DegenerateMeasure when a squared norm is
    numerically indistinguishable from cancellation noise (measure supported
    on fewer than n points, or moments beyond double-precision resolution).
    """
    if mu.domain.kind == "circle":
        raise ValueError("stabilized basis is defined for line measures")
    exps = [Fraction(k) for k in range(2 * n - 1)]
    vals, _ = _moment_table(mu, exps)
    H = np.array([[float(np.real(vals[Fraction(a + b)])) for b in range(n)]
                  for a in range(n)])
    Habs = np.abs(H)
    C = np.eye(n)
    norms = np.zeros(n)
    for k in range(n):
        c = C[k].copy()
        for _ in range(2):  # re-orthogonalization pass
            for j in range(k):
                proj = (c @ H @ C[j]) / norms[j]
                c = c - proj * C[j]
        h = float(c @ H @ c)
        scale = float(np.abs(c) @ Habs @ np.abs(c))
        if not np.isfinite(h) or h <= 1e-12 * scale:
            raise DegenerateMeasure(
                f"moment matrix numerically singular at degree {k} "
                f"(norm {h:.3e} vs cancellation scale {scale:.3e})"
            )
        C[k] = c
        norms[k] = h
    return C, norms


def stabilized_basis(mu: Measure, n: int) -> np.ndarray:
    """Unit-triangular coefficients of monic polynomials near-orthogonal under mu.

    Row k holds the monomial coefficients of p_k = u^k + lower order.  Used to
    precondition all matrix builds; being unit triangular it leaves both the
    determinant and the Pfaffian unchanged.
    """
    return _gram_schmidt(mu, n)[0]
