#!/usr/bin/env python3
"""Computer-algebra cross-checks for the closed forms used by the C++ core.

1. The pair terms T^1, T^2, T^3 of the closed-form T statistic are compared
   with the exact integral of R_k(X_i) R_k(X_j) u^a over the unit square for
   random integer rows and rational parameters.
2. The brackets of D4..D6 and the third-order term h are compared with
   derivatives of the trivariate Poisson pgf.

Exits non-zero on any mismatch.
"""

import argparse
import random
import sys

import sympy as sp

u1, u2, u3 = sp.symbols("u1 u2 u3", positive=True)
EXPONENTS = [sp.Integer(0), sp.Integer(1), sp.Integer(2), sp.Rational(-1, 2), sp.Rational(1, 2), sp.Rational(3, 2)]


def ind(x):
    return 1 if x >= 1 else 0


def integrate_unit(expr, a1, a2):
    return sp.integrate(sp.integrate(sp.expand(expr) * u1**a1 * u2**a2, (u1, 0, 1)), (u2, 0, 1))


def residuals(x, t):
    """R_1, R_2, R_3 of one row as polynomials in u1, u2."""
    t1, t2, t3 = t
    f = t3 + (t2 + t3 * (u1 - 1)) * (t1 + t3 * (u2 - 1))
    r1 = x[0] * ind(x[0]) * u1 ** max(x[0] - 1, 0) - t1 * u1 ** x[0]
    r2 = x[1] * ind(x[1]) * u2 ** max(x[1] - 1, 0) - t2 * u2 ** x[1]
    r3 = (x[0] * x[1] * ind(x[0] * x[1]) * u1 ** max(x[0] - 1, 0) * u2 ** max(x[1] - 1, 0)
          - f * u1 ** x[0] * u2 ** x[1])
    return r1, r2, r3


def pair_marginal(xi, xj, th, ak, prefactor):
    s = xi + xj + ak
    return prefactor * (sp.Rational(xi * ind(xi) * xj * ind(xj)) / (s - 1) if xi * xj else 0) \
        - prefactor * th * (xi * ind(xi) + xj * ind(xj)) / s + prefactor * th**2 / (s + 1)


def pair_t3(xi, xj, t, a1, a2):
    """The dependence pair term, transcribed term by term."""
    t1, t2, t3 = t
    p1, p2 = t1 - t3, t2 - t3
    c0 = p1 * p2 + t3
    s1 = xi[0] + xj[0] + a1
    s2 = xi[1] + xj[1] + a2
    pi = xi[0] * ind(xi[0]) * xi[1] * ind(xi[1])
    pj = xj[0] * ind(xj[0]) * xj[1] * ind(xj[1])
    first = sp.Rational(pi * pj) / ((s1 - 1) * (s2 - 1)) if pi * pj else 0
    # The cross terms carry X_j only; symmetrize since the double sum runs over (i, j) and (j, i).
    def cross(p):
        return (-2 * c0 * p / (s1 * s2) - 2 * t3 * p2 * p / (s1 * (s2 + 1)) - 2 * t3 * p1 * p / ((s1 + 1) * s2)
                - 2 * t3**2 * p / ((s1 + 1) * (s2 + 1)))
    rest = (c0**2 / ((s1 + 1) * (s2 + 1))
            + 2 * t3 * c0 * p2 / ((s1 + 1) * (s2 + 2)) + 2 * t3 * c0 * p1 / ((s1 + 2) * (s2 + 1))
            + t3**2 * p2**2 / ((s1 + 1) * (s2 + 3)) + t3**2 * p1**2 / ((s1 + 3) * (s2 + 1))
            + 2 * t3**2 * (2 * p1 * p2 + t3) / ((s1 + 2) * (s2 + 2)) + t3**4 / ((s1 + 3) * (s2 + 3))
            + 2 * t3**3 * p2 / ((s1 + 2) * (s2 + 3)) + 2 * t3**3 * p1 / ((s1 + 3) * (s2 + 2)))
    return first + (cross(pj) + cross(pi)) / 2 + rest


def check_t_pairs(rng, trials=60):
    bad = 0
    swapped_prefactor_differs = False
    for _ in range(trials):
        t3 = sp.Rational(rng.randint(1, 9), 10)
        t = (t3 + sp.Rational(rng.randint(1, 20), 10), t3 + sp.Rational(rng.randint(1, 20), 10), t3)
        a1 = rng.choice(EXPONENTS)
        a2 = rng.choice(EXPONENTS)
        xi = (rng.randint(0, 4), rng.randint(0, 4))
        xj = (rng.randint(0, 4), rng.randint(0, 4))
        ri, rj = residuals(xi, t), residuals(xj, t)
        exact = [integrate_unit(ri[k] * rj[k], a1, a2) for k in range(3)]
        # Integrating D1 over u2 contributes 1/(a2+1); D2 over u1 contributes 1/(a1+1).
        got = [pair_marginal(xi[0], xj[0], t[0], a1, 1 / (a2 + 1)),
               pair_marginal(xi[1], xj[1], t[1], a2, 1 / (a1 + 1)),
               pair_t3(xi, xj, t, a1, a2)]
        for k in range(3):
            if sp.simplify(exact[k] - got[k]) != 0:
                bad += 1
                print(f"T^{k + 1} mismatch: x_i={xi} x_j={xj} theta={t} a=({a1},{a2}): "
                      f"exact {exact[k]} vs {got[k]}")
        same_index = pair_marginal(xi[0], xj[0], t[0], a1, 1 / (a1 + 1))
        if a1 != a2 and sp.simplify(exact[0] - same_index) != 0:
            swapped_prefactor_differs = True
    print(f"T pair terms: {trials} random pairs, {bad} mismatches")
    if swapped_prefactor_differs:
        print("note: the 1/(a_k+1) prefactor on T^1, T^2 is only right when a1 == a2; "
              "1/(a_(3-k)+1) is used instead")
    return bad


def check_trivariate():
    t1, t2, t3, t4 = sp.symbols("t1 t2 t3 t4", positive=True)
    g = sp.exp(t1 * (u1 - 1) + t2 * (u2 - 1) + t3 * (u3 - 1) + t4 * (u1 * u2 * u3 - u1 - u2 - u3 + 2))
    e1 = t1 + t4 * (u2 * u3 - 1)
    e2 = t2 + t4 * (u1 * u3 - 1)
    e3 = t3 + t4 * (u1 * u2 - 1)
    h = e1 * e2 * e3 + t4 * (1 + u1 * e1 + u2 * e2 + u3 * e3)
    checks = {
        "D4 bracket": (sp.diff(g, u1, u2), e1 * e2 + t4 * u3),
        "D5 bracket": (sp.diff(g, u1, u3), e1 * e3 + t4 * u2),
        "D6 bracket": (sp.diff(g, u2, u3), e2 * e3 + t4 * u1),
        "h": (sp.diff(g, u1, u2, u3), h),
        "D1": (sp.diff(g, u1).subs({u2: 1, u3: 1}), t1 * g.subs({u2: 1, u3: 1})),
    }
    bad = 0
    for name, (lhs, rhs) in checks.items():
        diff = sp.simplify(sp.expand(lhs / g - rhs)) if name != "D1" else sp.simplify(lhs - rhs)
        ok = diff == 0
        bad += not ok
        print(f"{name}: {'ok' if ok else 'MISMATCH ' + str(diff)}")
    return bad


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=60)
    args = ap.parse_args()
    rng = random.Random(20240613)
    bad = check_t_pairs(rng, args.trials) + check_trivariate()
    print("all checks passed" if bad == 0 else f"{bad} failures")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
