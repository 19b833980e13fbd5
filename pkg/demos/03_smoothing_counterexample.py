"""Convolution smoothing: harmless on lower sets, unbounded otherwise.

Smoothing the indicator h_P with a radial bump keeps the growth class
intact exactly when P is a lower set: the gap conv(h_P) - h_P is then
bounded by a vertex-evaluated constant A(delta). On the quadrilateral
hull{(0,0),(1,0),(0,1),(1,2)} the gap instead grows without bound along
points (x, y) with |x| tiny and |y| huge; counterexample_point constructs
a certified witness beyond any requested constant C.
"""

import math

import numpy as np

from plpot.convex_body import non_lower_quadrilateral, unit_simplex
from plpot.grids import Axis, GridSpec
from plpot.indicator import make_h_function
from plpot.regularize import (
    a_delta_bound,
    build_kernel,
    convolution_gap_scan,
    convolve,
    counterexample_point,
)


def main():
    simplex = unit_simplex(2)

    print("== kernel sanity ==")
    kern = build_kernel(2, 16)
    print(f"weights sum to {kern.weights.sum():.15f}, support radius {kern.support_radius}")
    h_simplex = make_h_function(simplex)
    out = convolve(h_simplex, kern, 0.5, (3.0 + 0j, 2.0 + 0j))
    print(f"conv(h_simplex)(3,2) = {out.value:.9f} (= log 3 on the harmonic region)")

    print("\n== lower set: bounded gap ==")
    region = GridSpec(axes=(Axis("m1", 1e-3, 0.09, 8), Axis("m2", 10.5, 500.0, 8)),
                      mode="moduli")
    field = convolution_gap_scan(simplex, 0.1, region, nodes=12)
    print(f"simplex, eps=0.1, mixed regime: max gap {float(np.max(field.values)):.2e}")
    print(f"analytic bound A(0.1) = {a_delta_bound(simplex, 0.1):.4f} (= log 11)")

    print("\n== quadrilateral: certified blow-up ==")
    for c in (1.0, 5.0, 20.0):
        rep = counterexample_point(0.5, c)
        print(f"C={c:4g}: witness log|x|={rep.log_x:8.2f} log|y|={rep.log_y:7.2f}  "
              f"gap = {rep.gap:7.3f} (>= 2C = {2*c:g}, quadrature error {rep.quadrature_error:.1e})")
    quad = non_lower_quadrilateral()
    print(f"for contrast, A(0.1) on the quadrilateral would be "
          f"{a_delta_bound(quad, 0.1):.4f}, but no finite bound applies")


if __name__ == "__main__":
    main()
