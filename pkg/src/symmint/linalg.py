"""Dense determinant and Pfaffian kernels for real and complex square matrices.

Both kernels are pivoted eliminations written generically over the entry
type, so the same code runs on float64/complex128 arrays and, when the
extended flag is set, on mpmath entries (useful once moment matrices grow
past dimension ~20 and their Hankel conditioning overwhelms doubles).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NotSkew, OddDimension

SKEW_TOL = 1e-12
_EXTENDED_DPS = 50


def _as_matrix(a, extended: bool):
    m = np.asarray(a)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if extended:
        import mpmath

        conv = (lambda z: mpmath.mpc(z)) if np.iscomplexobj(m) else (lambda z: mpmath.mpf(float(z)))
        out = np.empty(m.shape, dtype=object)
        for i in range(m.shape[0]):
            for j in range(m.shape[1]):
                out[i, j] = conv(m[i, j])
        return out
    if m.dtype == object:
        return m.copy()
    if np.iscomplexobj(m):
        return m.astype(np.complex128)
    return m.astype(np.float64)


def _finalize(value, extended: bool):
    if not extended:
        return value
    import mpmath

    if isinstance(value, mpmath.mpc) and value.imag == 0:
        return float(value.real)
    if isinstance(value, mpmath.mpc):
        return complex(value)
    return float(value)


def det(a, *, extended: bool = False):
    """Determinant via partially pivoted elimination.

    Returns 1 for the empty matrix and the sole entry for 1x1; singular
    matrices return 0 rather than raising.
    """
    m = _as_matrix(a, extended)
    n = m.shape[0]
    if n == 0:
        return 1.0
    if n == 1:
        return _finalize(m[0, 0], extended)
    ctx = None
    if extended:
        import mpmath

        ctx = mpmath.workdps(_EXTENDED_DPS)
        ctx.__enter__()
    try:
        sign = 1.0
        for k in range(n - 1):
            col = np.abs(m[k:, k])
            p = k + int(np.argmax([float(c) for c in col] if m.dtype == object else col))
            if (float(abs(m[p, k])) if m.dtype == object else abs(m[p, k])) == 0.0:
                return 0.0
            if p != k:
                m[[k, p], :] = m[[p, k], :]
                sign = -sign
            piv = m[k, k]
            factors = m[k + 1:, k] / piv
            m[k + 1:, k + 1:] -= np.outer(factors, m[k, k + 1:])
        value = sign
        for k in range(n):
            value = value * m[k, k]
        return _finalize(value, extended)
    finally:
        if ctx is not None:
            ctx.__exit__(None, None, None)


def check_skew(a, tol: float = SKEW_TOL) -> None:
    """Raise NotSkew unless A^T = -A within tol relative to the largest entry."""
    m = np.asarray(a)
    if m.size == 0:
        return
    scale = float(np.max(np.abs(m)))
    defect = float(np.max(np.abs(m + m.T)))
    if defect > tol * max(scale, 1e-300):
        raise NotSkew(
            f"matrix violates skew symmetry: max|A + A^T| = {defect:.3e} "
            f"vs scale {scale:.3e}"
        )


def pfaffian(a, *, extended: bool = False, check: bool = True):
    """Pfaffian of an even-dimensional skew-symmetric matrix.

    Pivoted skew tridiagonalization (congruence transforms, O(n^3)): at each
    step the largest remaining |entry| is brought into the leading 2x2 block
    by symmetric row/column swaps, whose signs are tracked exactly, and the
    trailing block is updated by a rank-two congruence.  Moment matrices here
    are Hankel-like and ill-conditioned, hence full rather than partial
    pivoting.
    """
    m0 = np.asarray(a)
    if m0.ndim != 2 or m0.shape[0] != m0.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m0.shape}")
    n = m0.shape[0]
    if n % 2 == 1:
        raise OddDimension(f"Pfaffian undefined for odd dimension {n}")
    if n == 0:
        return 1.0
    if check:
        check_skew(m0)
    m = _as_matrix(m0, extended)
    # enforce exact skewness so congruence updates preserve it
    m = 0.5 * (m - m.T)
    ctx = None
    if extended:
        import mpmath

        ctx = mpmath.workdps(_EXTENDED_DPS)
        ctx.__enter__()
    try:
        sign = 1.0
        value = None
        for k in range(0, n - 1, 2):
            sub = m[k:, k:]
            dim = sub.shape[0]
            if m.dtype == object:
                absval = np.array([[float(abs(sub[i, j])) for j in range(dim)]
                                   for i in range(dim)])
            else:
                absval = np.abs(sub)
            flat = int(np.argmax(absval))
            i_star, j_star = k + flat // dim, k + flat % dim
            if absval[i_star - k, j_star - k] == 0.0:
                return 0.0
            if i_star != k:
                m[[k, i_star], :] = m[[i_star, k], :]
                m[:, [k, i_star]] = m[:, [i_star, k]]
                sign = -sign
                if j_star == k:
                    j_star = i_star
            if j_star != k + 1:
                m[[k + 1, j_star], :] = m[[j_star, k + 1], :]
                m[:, [k + 1, j_star]] = m[:, [j_star, k + 1]]
                sign = -sign
            piv = m[k, k + 1]
            value = piv if value is None else value * piv
            if k + 2 < n:
                tau = m[k, k + 2:] / piv
                col = m[k + 2:, k + 1]
                m[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
        return _finalize(sign * value, extended)
    finally:
        if ctx is not None:
            ctx.__exit__(None, None, None)


def pfaffian_expansion(a):
    """Pfaffian by recursive perfect-matching expansion (O(n!!), test oracle only)."""
    m = np.asarray(a)
    n = m.shape[0]
    if n % 2 == 1:
        raise OddDimension(f"Pfaffian undefined for odd dimension {n}")
    if n == 0:
        return 1.0
    if n == 2:
        return m[0, 1]
    total = 0.0
    for j in range(1, n):
        keep = [i for i in range(1, n) if i != j]
        minor = m[np.ix_(keep, keep)]
        total += (-1) ** (j + 1) * m[0, j] * pfaffian_expansion(minor)
    return total


def first_order_error(matrix, entry_errors, value):
    """First-order |d value| bound from per-entry error estimates.

    Uses d(det A) = det A * tr(A^{-1} dA) (and the analogous Pfaffian
    derivative, which differs only by a factor absorbed into |value|); falls
    back to a crude product bound when the matrix is numerically singular.
    """
    m = np.asarray(matrix, dtype=complex)
    errs = np.asarray(entry_errors, dtype=float)
    n = m.shape[0]
    if n == 0:
        return 0.0
    try:
        inv = np.linalg.inv(m)
        sens = abs(value) * float(np.sum(np.abs(inv.T) * errs))
        return sens
    except np.linalg.LinAlgError:
        scale = float(np.max(np.abs(m))) if m.size else 0.0
        return float(n * np.max(errs) * max(scale, 1.0) ** max(n - 1, 0))
