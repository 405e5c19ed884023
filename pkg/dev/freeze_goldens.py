"""Symbolic oracle used to freeze expected values for the test suite.

Computes the normalized interaction integrals

    z_beta = integral over the ordered region a < u_1 < ... < u_N < b of
             prod_{i<j} (u_j - u_i)^beta  *  prod_i rho(u_i) du_i

(the ordered-region form equals the 1/N!-normalized full integral) for the
line test measures, plus angle-chart results for the circle measures at
small N.  Run once; results are frozen into tests/.
"""

import functools
import itertools
import sympy as sp


def zbeta_line_exact(rho, a, b, beta, n):
    us = sp.symbols(f"u0:{n}", positive=(a == 0))
    expr = sp.Integer(1)
    for i, j in itertools.combinations(range(n), 2):
        expr *= (us[j] - us[i]) ** beta
    for u in us:
        expr *= rho(u)
    # integrate innermost-last variable first: u_{n-1} from u_{n-2} to b, etc.
    for k in reversed(range(n)):
        lo = us[k - 1] if k > 0 else a
        expr = sp.integrate(expr, (us[k], lo, b))
        expr = sp.simplify(expr)
    return sp.nsimplify(expr)


def zbeta_circle_exact(dens, beta, n):
    xs = sp.symbols(f"x0:{n}", positive=True)
    expr = sp.Integer(1)
    for i, j in itertools.combinations(range(n), 2):
        # |e^{ix_i} - e^{ix_j}| = 2 sin((x_j - x_i)/2), positive when ordered
        expr *= (2 * sp.sin((xs[j] - xs[i]) / 2)) ** beta
    for x in xs:
        expr *= dens(x)
    for k in reversed(range(n)):
        lo = xs[k - 1] if k > 0 else 0
        expr = sp.integrate(expr, (xs[k], lo, 2 * sp.pi))
        expr = sp.simplify(expr)
    return sp.simplify(expr)


def main():
    one = lambda u: sp.Integer(1)
    ex = lambda u: sp.exp(-u)
    pw = lambda u: u

    measures = [("uniform01", one, 0, 1), ("exp1", ex, 0, sp.oo), ("u_du", pw, 0, 1)]
    for name, rho, a, b in measures:
        for beta, nmax in ((1, 4), (2, 4), (4, 3)):
            for n in range(1, nmax + 1):
                val = zbeta_line_exact(rho, a, b, beta, n)
                print(f"line {name} beta={beta} N={n}: {val} = {sp.N(val, 20)}")

    haar = lambda x: 1 / (2 * sp.pi)
    cosd = lambda x: (1 + sp.cos(x) / 2) / (2 * sp.pi)
    for name, dens in (("circle_uniform", haar), ("circle_cos_half", cosd)):
        for beta, nmax in ((1, 3), (2, 3), (4, 2)):
            for n in range(1, nmax + 1):
                val = zbeta_circle_exact(dens, beta, n)
                print(f"circle {name} beta={beta} N={n}: {val} = {sp.N(val, 20)}")


if __name__ == "__main__":
    main()
