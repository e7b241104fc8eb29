"""Derive exact small-frequency Taylor coefficients of the dispersivity.

The coefficients are obtained from the cell problem itself rather than by
expanding the closed-form expressions, so they double as an independent
check on those expressions.  For a centered profile U on [0, L] with
q = 1/L and sigma = 1, the complex amplitude F of the cell problem

    F''/2 + i*omega*F = U,   F'(0) = F'(L) = 0

has the regular expansion F = sum_k (i*omega)**k F_k with

    F_0''/2 = U,   F_k''/2 = -F_{k-1},   every F_k of zero mean,

so that D(omega) = (1/2L) * integral |F'|**2 is a power series in omega**2
with rational coefficients.

Run ``python tools/derive_series.py`` to print the table stored in
``oscidisp/_series.py``.
"""

import sys

import sympy as sp

y = sp.symbols("y")

N_TERMS = 10


def centered(expr, length):
    return sp.expand(expr - sp.integrate(expr, (y, 0, length)) / length)


def antiderivative(expr):
    return sp.integrate(expr, (y, 0, y))


def series_coefficients(profile, length, n_terms=N_TERMS):
    """Return [c_0, c_1, ...] with D(omega) = sum_m c_m omega**(2m)."""
    u = centered(profile, length)
    grads = []
    f_prev = None
    for k in range(2 * n_terms - 1):
        if k == 0:
            grad = sp.expand(2 * antiderivative(u))
        else:
            grad = sp.expand(-2 * antiderivative(f_prev))
        f_k = centered(antiderivative(grad), length)
        grads.append(grad)
        f_prev = f_k

    gram = {}

    def inner(j, k):
        key = (min(j, k), max(j, k))
        if key not in gram:
            gram[key] = sp.integrate(sp.expand(grads[j] * grads[k]), (y, 0, length))
        return gram[key]

    coeffs = []
    for m in range(n_terms):
        total = sp.Integer(0)
        for j in range(0, 2 * m + 1):
            k = 2 * m - j
            sign = (-1) ** ((j - k) // 2) if (j - k) % 2 == 0 else 0
            if sign:
                total += sign * inner(j, k)
        coeffs.append(sp.nsimplify(total / (2 * length)))
    return coeffs


KINDS = {
    "shear": (y, sp.Integer(1)),
    "poiseuille": (y * (1 - y), sp.Integer(1)),
}
for _n in range(1, 7):
    # symmetric about y = 1/2: work on the half range [0, 1/2]
    KINDS[f"power{_n}"] = (-((sp.Rational(1, 2) - y) ** _n), sp.Rational(1, 2))


def main(out=sys.stdout):
    out.write("SERIES = {\n")
    for name, (profile, length) in KINDS.items():
        coeffs = series_coefficients(profile, length)
        out.write(f"    {name!r}: (\n")
        for c in coeffs:
            c = sp.Rational(c)
            out.write(f"        ({c.p}, {c.q}),\n")
        out.write("    ),\n")
    out.write("}\n")


if __name__ == "__main__":
    main()
