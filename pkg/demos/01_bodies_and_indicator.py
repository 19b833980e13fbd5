"""Convex bodies, their lattice geometry, and the logarithmic indicator.

Walks through the two bodies used throughout the package: the unit
simplex (a lower set) and the quadrilateral hull{(0,0),(1,0),(0,1),(1,2)}
(not a lower set), then evaluates the growth indicator h_P and the
level-set separation that controls how much regularization a point can
absorb.
"""

import numpy as np

from plpot.convex_body import (
    build_body,
    check_sigma_in_kp,
    deg_p,
    is_lower_set,
    lattice_points,
    non_lower_quadrilateral,
    unit_simplex,
)
from plpot.indicator import LogPoint, check_lower_bound, h_p, level_set_distance


def main():
    simplex = unit_simplex(2)
    quad = non_lower_quadrilateral()

    print("== geometry ==")
    for name, body in (("simplex", simplex), ("quadrilateral", quad)):
        check = is_lower_set(body)
        verdict = "lower set" if check.ok else f"not a lower set, witness {check.witness}"
        print(f"{name}: {len(body.vertices)} vertices, {verdict}")
        print(f"  lattice points in 1P..4P: "
              f"{[len(lattice_points(body, n)) for n in range(1, 5)]}")
        print(f"  admissibility: Sigma fits inside {check_sigma_in_kp(body)}P")

    # deg_P measures the smallest dilation containing a monomial support
    print("\ndeg_P of z1*z2^2:", deg_p([(1, 2)], quad), "(quadrilateral),",
          deg_p([(1, 2)], simplex), "(simplex)")

    print("\n== indicator ==")
    z = (2.0 + 0j, 3.0 + 0j)
    print(f"h_quad(2,3) = {h_p(quad, z):.6f} (= log 18, vertex (1,2) active)")
    print(f"h_simplex(2,3) = {h_p(simplex, z):.6f} (= log 3)")
    chk = check_lower_bound(quad, (0.1 + 0j, 100.0 + 0j), 1)
    print(f"lower bound at (0.1, 100): h_P = {chk.lhs:.4f} >= "
          f"(1/{chk.k}) max log+ = {chk.rhs:.4f} -> {chk.ok}")

    print("\n== level-set separation ==")
    # on the quadrilateral the level surfaces through (1, R) pinch
    # together like R^-2 even though the levels differ by log 2
    for big_r in (10.0, 100.0):
        x = LogPoint.from_moduli([1.0, big_r])
        sep = level_set_distance(quad, x, 0.5)
        print(f"R={big_r:6g}: level {sep.level:8.4f}  dist {sep.estimate:.3e}  "
              f"dist*R^2 = {sep.estimate * big_r**2:.6f}")
    x = LogPoint.from_moduli([10.0, 10.0])
    sep = level_set_distance(unit_simplex(2), x, 1 / np.e)
    print(f"simplex at (10,10), c=1/e: dist = {sep.estimate:.4f} (= 10(e-1))")


if __name__ == "__main__":
    main()
