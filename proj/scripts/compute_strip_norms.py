#!/usr/bin/env python3
"""Compute the analyticity-strip sup-norms hard-coded in error_bounds.hpp.

The quadrature error bound for a T-periodic function analytic on the strip
|Im z| <= beta needs sup |f(z)| over one period of that strip.  For the two
built-in test functions

    f2(t) = 1/(2 - cos t),      T = 2*pi,  poles at +-i*ln(2+sqrt(3)) + 2*pi*k
    f3(t) = 1/(sin(t)^2 + 16),  T = pi,    poles at +-i*asinh(4) + pi*k/...

the strip half-width is taken 0.1% inside the nearest pole so f is analytic on
the closed strip.  This script maximizes |f(x+iy)| over a 2001 x 201 grid on
[0, T] x [-beta, beta].  For both functions the maximum sits on the boundary
at (x, y) = (0, +-beta), which is a grid corner, so the scan reproduces the
closed forms 1/(2 - cosh(beta)) and 1/(16 - sinh(beta)^2) to double precision.

Run:  python3 scripts/compute_strip_norms.py
and paste the printed constants into include/fips/error_bounds.hpp.
"""

import numpy as np

NX, NY = 2001, 201


def grid_max(f, T, beta):
    x = np.linspace(0.0, T, NX)
    y = np.linspace(-beta, beta, NY)
    zz = x[:, None] + 1j * y[None, :]
    vals = np.abs(f(zz))
    idx = np.unravel_index(np.argmax(vals), vals.shape)
    return vals[idx], x[idx[0]], y[idx[1]]


def main():
    margin = 0.999

    beta2 = margin * np.log(2.0 + np.sqrt(3.0))
    m2, x2, y2 = grid_max(lambda z: 1.0 / (2.0 - np.cos(z)), 2.0 * np.pi, beta2)
    closed2 = 1.0 / (2.0 - np.cosh(beta2))
    print(f"f2: beta = {beta2:.17g}")
    print(f"    grid max   = {m2:.17g} at (x, y) = ({x2:.6g}, {y2:.6g})")
    print(f"    closed form = {closed2:.17g}  (corner value 1/(2 - cosh(beta)))")

    beta3 = margin * np.arcsinh(4.0)
    m3, x3, y3 = grid_max(lambda z: 1.0 / (np.sin(z) ** 2 + 16.0), np.pi, beta3)
    closed3 = 1.0 / (16.0 - np.sinh(beta3) ** 2)
    print(f"f3: beta = {beta3:.17g}")
    print(f"    grid max   = {m3:.17g} at (x, y) = ({x3:.6g}, {y3:.6g})")
    print(f"    closed form = {closed3:.17g}  (corner value 1/(16 - sinh(beta)^2))")


if __name__ == "__main__":
    main()
