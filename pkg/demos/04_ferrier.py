"""The inf-convolution regularizer that works where smoothing fails.

u_t = -log( inf_y [ e^{-u(y)} + |y-x|/t ] ) dominates u, decreases to u
as t -> 0, and respects the growth class on every body, lower set or
not. The contract sweep checks monotonicity, the Lipschitz property, and
shell-wise boundedness of u_t - h_P on the quadrilateral where plain
smoothing has an unbounded gap.
"""

import numpy as np

from plpot.convex_body import non_lower_quadrilateral
from plpot.indicator import LogPoint, make_h_function
from plpot.regularize import ferrier, ferrier_contracts, usable_t_estimate


def shell_sample(rng, radii, per_shell):
    out = []
    for big_r in radii:
        w = rng.normal(size=(per_shell, 2)) + 1j * rng.normal(size=(per_shell, 2))
        w *= (big_r / np.linalg.norm(w, axis=1))[:, None]
        out.append(w)
    return np.concatenate(out)


def main():
    quad = non_lower_quadrilateral()
    h = make_h_function(quad)

    print("== pointwise values ==")
    x = (1.0 + 0j, 1.0 + 0j)
    for t in (1.0, 0.1, 0.01):
        res = ferrier(h, t, x, radial=True)
        print(f"t={t:5g}: u_t(1,1) = {res.u_t_value:.8f}  "
              f"search radius {res.search_radius:.3f}  grid error {res.grid_error:.1e}")
    print("u_t >= u = 0 and decreases toward it as t -> 0")

    print("\n== contract sweep across shells ==")
    rng = np.random.default_rng(4)
    sample = shell_sample(rng, (10.0, 100.0, 1000.0), 16)
    rep = ferrier_contracts(
        h, [1.0, 0.1, 0.01], sample, body=quad,
        shell_edges=[5.0, 50.0, 500.0, 5000.0], radial=True,
    )
    print(f"pool size {rep.pool_size}, lipschitz margin {rep.lipschitz_margin:.1e}")
    excess = rep.ut_table - rep.u_values[None, :]
    for i, t in enumerate(rep.t_list):
        print(f"t={t:5g}: max u_t - h_P over shells = {float(excess[i].max()):.3e}")
    print("all contract clauses hold (the sweep raises on violation)")

    print("\n== how large a t the geometry allows ==")
    probes = [LogPoint.from_moduli([1.0, r]) for r in (10.0, 100.0, 1000.0)]
    t_ok = usable_t_estimate(quad, 0.5, probes)
    print(f"quadrilateral, c=0.5: usable t up to {t_ok:.4f}")
    print("the level-set pinch (demo 01) keeps this finite; on the simplex")
    print("the same probes allow t in the hundreds")


if __name__ == "__main__":
    main()
