"""The cone inf-convolution identity and sub-mean-value probes.

hat_delta computes delta-hat_lambda(s) = inf_y [ delta(y) + lambda|y-s| ].
The identity check compares it against the distance formulation on a
sample, with both grid errors folded into a certified tolerance. The
sub-mean probes then confirm numerically that -log of the result (and
ferrier outputs) behave like plurisubharmonic functions on circles.
"""

import math

import numpy as np

from plpot.convex_body import non_lower_quadrilateral, unit_simplex
from plpot.indicator import make_h_function
from plpot.regularize import distance_identity_check, ferrier, hat_delta, submean_check


def main():
    h_seg = make_h_function(unit_simplex(1))

    print("== hat_delta on closed forms ==")
    cases = [
        ("constant 1", lambda s: np.ones(s.shape[:-1]), 1.0, 0.3 + 0.1j, 1.0),
        ("|s| at 0", lambda s: np.abs(s[..., 0]), 1.0, 0.0 + 0j, 0.0),
        ("|s| at 1", lambda s: np.abs(s[..., 0]), 1.0, 1.0 + 0j, 1.0),
        ("hinge at 0", lambda s: np.maximum(1 - np.abs(s[..., 0]), 0.0), 2.0, 0.0 + 0j, 1.0),
    ]
    for name, delta, lam, s0, want in cases:
        res = hat_delta(delta, lam, (s0,))
        print(f"{name:12s} lam={lam:g}: value {res.value:.8f} (exact {want:g})")

    print("\n== identity on a random sample ==")
    rng = np.random.default_rng(5)
    sample = (rng.uniform(-2, 2, size=40) + 1j * rng.uniform(-2, 2, size=40))[:, None]
    for lam in (0.5, 1.0, 2.0):
        rep = distance_identity_check(lambda s: np.exp(-h_seg(s)), lam, sample)
        print(f"lam={lam:3g}: worst |lhs-rhs| = {rep.worst_diff:.2e} "
              f"within tol {float(np.max(rep.combined_tol)):.2e} -> {rep.ok}")

    print("\n== sub-mean probes ==")
    chk = submean_check(lambda z: z[..., 0].real, (0.3 + 0.2j,), (1.0,), 0.5)
    print(f"harmonic Re z: lhs {chk.lhs:.6f} = rhs {chk.rhs:.6f} -> {chk.ok}")

    h_quad = make_h_function(non_lower_quadrilateral())

    def u_t(z):
        flat = z.reshape(-1, z.shape[-1])
        vals = [ferrier(h_quad, 0.1, tuple(row), grid=7, rounds=8, radial=True).u_t_value
                for row in flat]
        return np.array(vals).reshape(z.shape[:-1])

    chk = submean_check(u_t, (1.1 + 0.3j, 0.8 - 0.2j), (1.0, 0.5j), 0.4,
                        nodes=64, extra_tol=2e-3)
    print(f"ferrier output: lhs {chk.lhs:.6f} <= circle mean {chk.rhs:.6f} -> {chk.ok}")

    def neg_log_hat(z):
        flat = z.reshape(-1, 1)
        vals = [-math.log(hat_delta(lambda s: np.exp(-h_seg(s)), 1.0,
                                    (complex(row[0]),), grid=7, rounds=8).value)
                for row in flat]
        return np.array(vals).reshape(z.shape[:-1])

    chk = submean_check(neg_log_hat, (1.2 + 0.1j,), (1.0,), 0.3, nodes=64, extra_tol=2e-3)
    print(f"-log hat_delta: lhs {chk.lhs:.6f} <= circle mean {chk.rhs:.6f} -> {chk.ok}")


if __name__ == "__main__":
    main()
