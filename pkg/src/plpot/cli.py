"""Command line driver: config ingestion, task dispatch, artifact output.

Every task reads parameters from an optional JSON config (``--config``)
with command line flags overriding individual fields, writes CSV grids
through :class:`plpot.grids.GridField` (value files get a meta sidecar
sufficient to re-run the task) and prints a short report to stdout with
17 significant digits on headline numbers.

Exit codes: 0 success, 2 config error, 3 contract or tolerance
violation, 4 solver stall.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .convex_body import (
    ConvexBody,
    body_to_dict,
    build_body,
    check_sigma_in_kp,
    is_lower_set,
    non_lower_quadrilateral,
    unit_box,
    unit_simplex,
)
from .errors import ConfigError, PlpotError, ToleranceExceeded
from .grids import GridField, GridSpec
from .indicator import h_p, make_h_function
from .poly_extremal import check_submultiplicative, phi_n, v_estimate_grid
from .regularize import (
    convolution_gap_scan,
    counterexample_point,
    distance_identity_check,
    ferrier,
    ferrier_contracts,
    hat_delta,
)
from .sets import from_config as sample_from_config

_FMT = "%.17g"


def _fmt(x: float) -> str:
    return _FMT % (float(x) + 0.0)  # +0.0 folds -0.0 into 0


# ---------------------------------------------------------------------------
# config plumbing


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} line {exc.lineno}: {exc.msg}") from exc


def _merged(args: argparse.Namespace, keys: tuple[str, ...]) -> dict:
    """Config fields with non-None CLI flags overriding them."""
    cfg = _load_config(getattr(args, "config", None))
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if getattr(args, "vertices", None) is not None:
        try:
            cfg["body"] = {"vertices": json.loads(args.vertices)}
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--vertices is not valid JSON: {exc.msg}") from exc
    elif getattr(args, "body", None) is not None:
        cfg["body"] = {"name": args.body}
        if getattr(args, "dim", None) is not None:
            cfg["body"]["dim"] = args.dim
    return cfg


def _require(cfg: dict, key: str):
    if key not in cfg or cfg[key] is None:
        raise ConfigError(f"missing required field {key!r}")
    return cfg[key]


def _resolve_body(cfg: dict) -> ConvexBody:
    spec = _require(cfg, "body")
    if isinstance(spec, str):
        spec = {"name": spec}
    if "vertices" in spec:
        return build_body(spec["vertices"])
    name = spec.get("name")
    if name == "simplex":
        return unit_simplex(int(spec.get("dim", 1)))
    if name == "box":
        return unit_box(int(spec.get("dim", 1)))
    if name == "quadrilateral":
        return non_lower_quadrilateral()
    raise ConfigError(f"body spec needs vertices or a known name, got {spec!r}")


def _resolve_grid(cfg: dict) -> GridSpec:
    spec = _require(cfg, "grid")
    return GridSpec.from_dict(spec)


def _parse_complex_row(row) -> list[complex]:
    if isinstance(row, str):
        row = [tok for tok in row.replace(",", " ").split() if tok]
    out = []
    for c in row:
        if isinstance(c, str):
            out.append(complex(c.replace(" ", "")))
        elif isinstance(c, (list, tuple)) and len(c) == 2:
            out.append(complex(float(c[0]), float(c[1])))
        else:
            out.append(complex(c))
    return out


def _resolve_points(cfg: dict, key: str = "z") -> np.ndarray:
    raw = _require(cfg, key)
    if isinstance(raw, str):
        rows = [r for r in raw.split(";") if r.strip()]
    elif raw and isinstance(raw[0], (list, tuple, str)):
        rows = raw
    else:
        rows = [raw]
    try:
        parsed = [_parse_complex_row(r) for r in rows]
    except ValueError as exc:
        raise ConfigError(f"bad point list in field {key!r}: {exc}") from exc
    if len({len(p) for p in parsed}) > 1:
        raise ConfigError(f"points in field {key!r} have mixed dimensions")
    pts = np.array(parsed, dtype=complex)
    if pts.size == 0:
        raise ConfigError(f"field {key!r} contains no points")
    return pts


def _emit(report: dict, out: str | None, lines: list[str]) -> None:
    for line in lines:
        print(line)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
        print(f"report written to {out}")


# ---------------------------------------------------------------------------
# task handlers


def _cmd_body(args) -> int:
    cfg = _merged(args, ("tol",))
    body = _resolve_body(cfg)
    check = is_lower_set(body)
    if args.action == "lower-set":
        if check.ok:
            line = "true"
        else:
            a, b = check.witness
            fmt = lambda v: "(" + ",".join(str(c) for c in v) + ")"
            line = f"false, witness {fmt(a)}→{fmt(b)}"
        _emit({"task": "lower-set", "body": body_to_dict(body),
               "lower_set": check.ok,
               "witness": None if check.ok else [list(check.witness[0]), list(check.witness[1])]},
              args.out, [line])
        return 0
    sigma_k = check_sigma_in_kp(body)
    report = {
        "task": "body-check",
        "body": body_to_dict(body),
        "dim": body.dim,
        "n_vertices": len(body.vertices),
        "n_halfspaces": len(body.halfspaces),
        "lower_set": check.ok,
        "sigma_in_kp": sigma_k,
    }
    lines = [
        f"dim {body.dim}, {len(body.vertices)} vertices, {len(body.halfspaces)} halfspaces",
        f"lower set: {str(check.ok).lower()}",
        f"admissibility: sigma within {sigma_k}P" if sigma_k else "admissibility: not within 16P",
    ]
    _emit(report, args.out, lines)
    return 0


def _cmd_hp(args) -> int:
    cfg = _merged(args, ("tol", "z"))
    body = _resolve_body(cfg)
    if "grid" in cfg and cfg.get("grid") is not None and cfg.get("z") is None:
        grid = _resolve_grid(cfg)
        pts = grid.complex_points(body.dim)
        with np.errstate(divide="ignore"):
            vals = np.array([h_p(body, p) for p in pts])
        field_meta = {"task": "hp-eval", "body": body_to_dict(body)}
        field = GridField.from_spec(grid, vals.reshape(grid.shape), field_meta)
        out = args.out or _require(cfg, "out")
        field.write(out)
        print(f"grid written to {out}")
        return 0
    pts = _resolve_points(cfg)
    lines = []
    values = []
    for p in pts:
        val = h_p(body, p)
        values.append(val)
        lines.append(f"h_P({', '.join(str(c) for c in p)}) = {_fmt(val)}")
    _emit({"task": "hp-eval", "body": body_to_dict(body),
           "points": [[str(c) for c in p] for p in pts],
           "values": values}, args.out, lines)
    return 0


def _cmd_phi(args) -> int:
    cfg = _merged(args, ("tol", "n", "z"))
    body = _resolve_body(cfg)
    sample = sample_from_config(_require(cfg, "set"))
    n = int(_require(cfg, "n"))
    tol = float(cfg.get("tol", 1e-8))
    z0 = _resolve_points(cfg)[0]
    est = phi_n(body, sample, n, z0, tol=tol)
    report = {
        "task": "phi-n",
        "body": body_to_dict(body),
        "n": n,
        "tol": tol,
        "z0": [str(c) for c in est.z0],
        "phi_value": est.phi_value,
        "v_estimate": est.v_estimate,
        "upper_bound": est.upper_bound,
        "solver_gap": est.solver_gap,
        "sample": {"label": sample.label, "size": sample.size, "mesh": sample.mesh},
    }
    lines = [
        f"phi_{n} = {_fmt(est.phi_value)}",
        f"v_estimate = {_fmt(est.v_estimate)}",
        f"certified gap = {_fmt(est.solver_gap)}",
    ]
    _emit(report, args.out, lines)
    return 0


def _cmd_vgrid(args) -> int:
    cfg = _merged(args, ("tol", "n", "out"))
    body = _resolve_body(cfg)
    sample = sample_from_config(_require(cfg, "set"))
    n = int(_require(cfg, "n"))
    tol = float(cfg.get("tol", 1e-8))
    grid = _resolve_grid(cfg)
    field = v_estimate_grid(body, sample, n, grid, tol=tol)
    out = args.out or _require(cfg, "out")
    field.write(out)
    print(f"grid written to {out}")
    print(f"max relative solver gap = {_fmt(field.meta['max_relative_solver_gap'])}")
    return 0


def _cmd_submult(args) -> int:
    cfg = _merged(args, ("tol", "n", "m", "z"))
    body = _resolve_body(cfg)
    sample = sample_from_config(_require(cfg, "set"))
    n = int(_require(cfg, "n"))
    m = int(_require(cfg, "m"))
    tol = float(cfg.get("tol", 1e-8))
    z_list = _resolve_points(cfg)
    report = check_submultiplicative(body, sample, n, m, z_list, tol=tol)
    lines = [f"worst log excess = {_fmt(report.worst_excess)}",
             f"submultiplicative: {str(report.ok).lower()}"]
    payload = {
        "task": "submult",
        "body": body_to_dict(body),
        "n": n,
        "m": m,
        "tol": tol,
        "worst_excess": report.worst_excess,
        "ok": report.ok,
    }
    _emit(payload, args.out, lines)
    if not report.ok:
        raise ToleranceExceeded(f"submultiplicativity violated, excess {report.worst_excess:.3e}")
    return 0


def _cmd_convolve(args) -> int:
    cfg = _merged(args, ("tol", "eps", "out", "nodes"))
    body = _resolve_body(cfg)
    eps = float(_require(cfg, "eps"))
    nodes = int(cfg.get("nodes", 16))
    grid = _resolve_grid(cfg)
    field = convolution_gap_scan(body, eps, grid, nodes=nodes)
    out = args.out or _require(cfg, "out")
    field.write(out)
    gap_max = float(np.max(field.values))
    lines = [
        f"grid written to {out}",
        f"max smoothing gap = {_fmt(gap_max)}",
        f"analytic lower-set bound = {_fmt(field.meta['a_delta_bound'])}",
    ]
    for line in lines:
        print(line)
    return 0


def _cmd_counterexample(args) -> int:
    cfg = _merged(args, ("eps", "big_c", "nodes"))
    eps = float(_require(cfg, "eps"))
    big_c = float(cfg.get("big_c", cfg.get("C", 1.0)))
    nodes = int(cfg.get("nodes", 48))
    report = counterexample_point(eps, big_c, quad_nodes=nodes)
    payload = {"task": "counterexample", **report.to_dict()}
    lines = [
        f"gap = {_fmt(report.gap)}",
        f"a_eps = {_fmt(report.a_eps)}",
        f"log|x_C| = {_fmt(report.log_x)}",
        f"log|y_C| = {_fmt(report.log_y)}",
        f"quadrature error = {_fmt(report.quadrature_error)}",
        f"gap exceeds C={_fmt(big_c)}: {str(report.gap > big_c).lower()}",
    ]
    _emit(payload, args.out, lines)
    return 0


def _shell_sample(rng: np.random.Generator, shells, per_shell: int, d: int) -> np.ndarray:
    pts = []
    for radius in shells:
        m = np.abs(rng.normal(size=(per_shell, d)))
        norms = np.linalg.norm(m, axis=1, keepdims=True)
        m = np.where(norms > 0, m / norms, 1.0 / np.sqrt(d)) * radius
        phases = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=(per_shell, d)))
        pts.append(m * phases)
    return np.concatenate(pts, axis=0)


def _cmd_ferrier(args) -> int:
    cfg = _merged(args, ("tol", "t", "seed", "c", "z"))
    body = _resolve_body(cfg)
    h_fun = make_h_function(body)
    shift = float(cfg.get("c", 0.0) or 0.0)

    def u(pts):
        return shift + h_fun(pts)

    seed = int(cfg.get("seed", 0) or 0)
    if "t_list" in cfg and cfg["t_list"]:
        t_list = [float(t) for t in cfg["t_list"]]
        rng = np.random.default_rng(seed)
        shells = cfg.get("shells", [10.0, 100.0, 1000.0])
        per_shell = int(cfg.get("per_shell", 32))
        sample = _shell_sample(rng, shells, per_shell, body.dim)
        edges = [s / 2.0 for s in shells] + [shells[-1] * 2.0]
        rep = ferrier_contracts(
            u, t_list, sample, body=body,
            c=(shift if shift > 0 else None),
            shell_edges=edges, radial=True,
        )
        payload = {
            "task": "ferrier-contracts",
            "body": body_to_dict(body),
            "t_list": list(rep.t_list),
            "seed": seed,
            "shells": list(shells),
            "per_shell": per_shell,
            "lipschitz_margin": rep.lipschitz_margin,
            "pool_size": rep.pool_size,
            "shell_max_gap": None if rep.shell_max_gap is None else rep.shell_max_gap.tolist(),
        }
        lines = [
            f"contracts hold for t in {list(rep.t_list)}",
            f"lipschitz margin = {_fmt(rep.lipschitz_margin)}",
        ]
        _emit(payload, args.out, lines)
        return 0
    t = float(_require(cfg, "t"))
    x = _resolve_points(cfg, "z")[0]
    res = ferrier(u, t, x, radial=bool(cfg.get("radial", True)))
    payload = {
        "task": "ferrier",
        "body": body_to_dict(body),
        "t": t,
        "x": [str(c) for c in res.x],
        "u_t": res.u_t_value,
        "minimizer": [str(c) for c in res.minimizer],
        "search_radius": res.search_radius,
        "grid_error": res.grid_error,
    }
    lines = [f"u_t = {_fmt(res.u_t_value)}",
             f"search radius = {_fmt(res.search_radius)}",
             f"grid error = {_fmt(res.grid_error)}"]
    _emit(payload, args.out, lines)
    return 0


def _cmd_appendix(args) -> int:
    cfg = _merged(args, ("tol", "seed", "lam"))
    lam = float(cfg.get("lam", 1.0))
    seed = int(cfg.get("seed", 0) or 0)
    n_sample = int(cfg.get("n_sample", 24))
    kind = cfg.get("delta", "hinge")
    if kind == "const":
        def delta(pts):
            return np.ones(np.asarray(pts).shape[:-1])
    elif kind == "abs":
        def delta(pts):
            return np.linalg.norm(np.abs(np.asarray(pts, dtype=complex)), axis=-1)
    elif kind == "hinge":
        def delta(pts):
            r = np.linalg.norm(np.abs(np.asarray(pts, dtype=complex)), axis=-1)
            return np.maximum(1.0 - r, 0.0)
    elif kind == "exp_hp":
        body = _resolve_body(cfg)
        h_fun = make_h_function(body)

        def delta(pts):
            return np.exp(-h_fun(pts))
    else:
        raise ConfigError(f"unknown delta kind {kind!r}")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.5, 1.5, size=(n_sample, 2)) @ np.array([[1], [1j]])
    report = distance_identity_check(delta, lam, pts)
    probe = hat_delta(delta, lam, pts[0])
    payload = {
        "task": "appendix-check",
        "delta": kind,
        "lam": lam,
        "seed": seed,
        "n_sample": n_sample,
        "worst_diff": report.worst_diff,
        "ok": report.ok,
        "hat_delta_first": probe.value,
    }
    lines = [
        f"distance identity holds on {n_sample} samples: {str(report.ok).lower()}",
        f"worst difference = {_fmt(report.worst_diff)}",
    ]
    _emit(payload, args.out, lines)
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its fields")
    common.add_argument("--out", help="output path for the report or grid")
    common.add_argument("--tol", type=float, help="numeric tolerance")
    common.add_argument("--seed", type=int, help="seed for randomized sampling")
    common.add_argument("--vertices", help="JSON list of lattice vertices for the body")
    common.add_argument("--body", help="named body: simplex, box, quadrilateral")
    common.add_argument("--dim", type=int, help="dimension for named bodies")

    parser = argparse.ArgumentParser(
        prog="plpot",
        description="weighted polynomial extremal functions and regularization checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_body = sub.add_parser("body", parents=[common], help="validate a convex body")
    p_body.add_argument("action", choices=["check", "lower-set"])
    p_body.set_defaults(func=_cmd_body)

    p_hp = sub.add_parser("hp", parents=[common], help="evaluate the logarithmic indicator")
    p_hp.add_argument("--z", help="points, ';'-separated, coordinates comma-separated")
    p_hp.set_defaults(func=_cmd_hp)

    p_phi = sub.add_parser("phi", parents=[common], help="one-point extremal value")
    p_phi.add_argument("--n", type=int, help="polynomial degree scale")
    p_phi.add_argument("--z", help="evaluation point")
    p_phi.set_defaults(func=_cmd_phi)

    p_vgrid = sub.add_parser("vgrid", parents=[common], help="extremal function on a grid")
    p_vgrid.add_argument("--n", type=int, help="polynomial degree scale")
    p_vgrid.set_defaults(func=_cmd_vgrid)

    p_sub = sub.add_parser("submult", parents=[common], help="degree additivity audit")
    p_sub.add_argument("--n", type=int)
    p_sub.add_argument("--m", type=int)
    p_sub.add_argument("--z", help="audit points")
    p_sub.set_defaults(func=_cmd_submult)

    p_conv = sub.add_parser("convolve", parents=[common], help="smoothing gap scan")
    p_conv.add_argument("--eps", type=float, help="kernel radius")
    p_conv.add_argument("--nodes", type=int, help="radial quadrature nodes")
    p_conv.set_defaults(func=_cmd_convolve)

    p_cex = sub.add_parser("counterexample", parents=[common],
                           help="point where smoothing leaves the class")
    p_cex.add_argument("--eps", type=float, help="kernel radius")
    p_cex.add_argument("--big-c", dest="big_c", type=float, help="target gap constant")
    p_cex.add_argument("--nodes", type=int, help="radial quadrature nodes")
    p_cex.set_defaults(func=_cmd_counterexample)

    p_fer = sub.add_parser("ferrier", parents=[common], help="inf-convolution evaluation")
    p_fer.add_argument("--t", type=float, help="regularization scale")
    p_fer.add_argument("--z", help="evaluation point")
    p_fer.add_argument("--c", type=float, help="constant shift of the indicator")
    p_fer.set_defaults(func=_cmd_ferrier)

    p_app = sub.add_parser("appendix", parents=[common], help="cone inf-convolution identity")
    p_app.add_argument("--lam", type=float, help="cone slope")
    p_app.set_defaults(func=_cmd_appendix)

    return parser


def entry(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return int(args.func(args) or 0)
    except PlpotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(entry())
