"""Weighted extremal values on two classical one-dimensional setups.

The scaled logarithm (1/n) log Phi_n approximates the extremal growth
function. For the unit circle it reproduces log+|z| almost exactly; for
Chebyshev points on [-1,1] it tracks the interval Green function
log|z + sqrt(z^2-1)| with a 1/n-size defect. Both have closed forms, so
the solver's certified bounds can be checked line by line.
"""

import math

import numpy as np

from plpot.convex_body import unit_simplex
from plpot.poly_extremal import check_submultiplicative, phi_n
from plpot.sets import chebyshev_interval_set, unit_circle_set


def main():
    segment = unit_simplex(1)

    print("== unit circle, n = 12 ==")
    circle = unit_circle_set(256)
    for r in (0.5, 1.0, 2.0, 4.0):
        est = phi_n(segment, circle, 12, (r + 0j,), tol=1e-6)
        want = max(0.0, math.log(r))
        rel = est.solver_gap / max(1.0, est.upper_bound)
        print(f"|z|={r:3g}: v = {est.v_estimate:9.6f}  log+|z| = {want:9.6f}  "
              f"certified relative gap {rel:.2e}")

    print("\n== Chebyshev interval, n = 16 ==")
    cheb = chebyshev_interval_set(257)
    for x in (1.5, 2.0, 3.0):
        est = phi_n(segment, cheb, 16, (x + 0j,), tol=1e-4)
        green = math.log(x + math.sqrt(x * x - 1.0))
        # finite n pays a (log 2)/n premium over the asymptotic value
        print(f"x={x:3g}: v = {est.v_estimate:.6f}  green = {green:.6f}  "
              f"defect {green - est.v_estimate:+.6f} (log2/16 = {math.log(2)/16:.6f})")

    print("\n== submultiplicativity audit ==")
    rng = np.random.default_rng(2)
    z_list = [(complex(rng.uniform(-3, 3), rng.uniform(-3, 3)),) for _ in range(5)]
    rep = check_submultiplicative(segment, circle, 3, 4, z_list, tol=1e-6)
    print(f"phi_3 * phi_4 <= phi_7 on {len(z_list)} random points: {rep.ok} "
          f"(worst log excess {rep.worst_excess:.2e})")


if __name__ == "__main__":
    main()
