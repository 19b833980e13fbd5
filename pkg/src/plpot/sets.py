"""Sampled compact sets with admissible weights.

The extremal problem only ever sees a compact set through finitely many
sample points with weight values.  A :class:`SampledWeightedSet` bundles
the points, the weights (``+inf`` marks points where the weight
effectively removes the constraint), and a mesh number recording how
finely the samples cover the underlying set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EmptyEffectiveSample, UnknownGenerator


@dataclass(frozen=True)
class SampledWeightedSet:
    """Finite sample of a weighted compact set in C^d.

    Attributes
    ----------
    points : complex array, shape (m, d)
    q_values : float array, shape (m,)
        Weight exponents; +inf allowed, NaN not.
    mesh : float
        Covering radius of the sample inside the set it discretizes.
    label : str
        Human-readable provenance used in metadata.
    """

    points: np.ndarray
    q_values: np.ndarray
    mesh: float
    label: str = ""

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=complex))
        q = np.asarray(self.q_values, dtype=float).reshape(-1)
        if pts.shape[0] != q.shape[0]:
            raise ConfigError("points and q_values length mismatch")
        if np.any(np.isnan(q)) or np.any(q == -np.inf):
            raise ConfigError("weights must be > -inf and not NaN")
        if not np.any(np.isfinite(q)):
            raise EmptyEffectiveSample("every sample weight is +inf")
        if not self.mesh > 0:
            raise ConfigError("mesh must be positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "q_values", q)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]


def _q_array(q, m: int) -> np.ndarray:
    if q is None:
        return np.zeros(m)
    q = np.asarray(q, dtype=float)
    if q.ndim == 0:
        return np.full(m, float(q))
    if q.shape != (m,):
        raise ConfigError(f"weight array has shape {q.shape}, expected ({m},)")
    return q


def unit_circle_set(m: int, radius: float = 1.0, q=None) -> SampledWeightedSet:
    """Equiangular sample of the circle |z| = radius in C^1.

    The covering radius of m equiangular points on a circle of radius R
    is the chord from a node to the farthest mid-arc point,
    2 R sin(pi / (2 m)).
    """
    if m < 1:
        raise ConfigError("need at least one sample")
    ang = 2.0 * np.pi * np.arange(m) / m
    pts = radius * np.exp(1j * ang)
    mesh = 2.0 * radius * math.sin(math.pi / (2 * m))
    return SampledWeightedSet(pts[:, None], _q_array(q, m), mesh, f"circle(m={m},r={radius:g})")


def chebyshev_interval_set(m: int, q=None) -> SampledWeightedSet:
    """Second-kind Chebyshev points on [-1, 1], endpoints included."""
    if m < 2:
        raise ConfigError("need at least two samples")
    x = np.cos(np.pi * np.arange(m) / (m - 1))[::-1].copy()
    mesh = float(np.max(np.diff(x)) / 2.0)
    return SampledWeightedSet(
        x.astype(complex)[:, None], _q_array(q, m), mesh, f"chebyshev(m={m})"
    )


def torus_set(m: int | tuple[int, ...], radii=(1.0, 1.0), q=None) -> SampledWeightedSet:
    """Product of equiangular circle samples, one per coordinate."""
    radii = tuple(float(r) for r in np.atleast_1d(radii))
    d = len(radii)
    ms = (m,) * d if isinstance(m, (int, np.integer)) else tuple(int(v) for v in m)
    if len(ms) != d:
        raise ConfigError("per-coordinate counts do not match radii")
    circles = [
        r * np.exp(2j * np.pi * np.arange(mk) / mk) for mk, r in zip(ms, radii)
    ]
    mesh_parts = [2.0 * r * math.sin(math.pi / (2 * mk)) for mk, r in zip(ms, radii)]
    grids = np.meshgrid(*circles, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    mesh = math.sqrt(sum(p * p for p in mesh_parts))
    label = f"torus(m={ms},r={radii})"
    return SampledWeightedSet(pts, _q_array(q, pts.shape[0]), mesh, label)


def point_list_set(points, q=None, mesh: float | None = None) -> SampledWeightedSet:
    """Explicit finite set; the samples are the set, so the mesh is exact.

    A strictly positive mesh is still recorded (one ulp) to keep the
    mesh-positivity invariant uniform across generators.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    eff_mesh = 2.0**-52 if mesh is None else float(mesh)
    return SampledWeightedSet(
        pts, _q_array(q, pts.shape[0]), eff_mesh, f"points(m={pts.shape[0]})"
    )


def from_config(cfg: dict) -> SampledWeightedSet:
    """Build a sample set from a config mapping.

    Expected keys: ``generator`` in {"circle", "chebyshev", "torus",
    "points"} plus the generator's arguments (``m``, ``radius``/``radii``,
    ``q``, ``points``, ``mesh``).
    """
    if "generator" not in cfg:
        raise ConfigError("sample config needs a 'generator' key")
    kind = cfg["generator"]
    q = cfg.get("q")
    try:
        if kind == "circle":
            return unit_circle_set(int(cfg["m"]), float(cfg.get("radius", 1.0)), q)
        if kind == "chebyshev":
            return chebyshev_interval_set(int(cfg["m"]), q)
        if kind == "torus":
            m = cfg["m"]
            m = tuple(m) if isinstance(m, (list, tuple)) else int(m)
            return torus_set(m, tuple(cfg.get("radii", (1.0, 1.0))), q)
        if kind == "points":
            pts = [[complex(c) if isinstance(c, str) else c for c in row] for row in cfg["points"]]
            return point_list_set(pts, q, cfg.get("mesh"))
    except KeyError as exc:
        raise ConfigError(f"sample config missing key {exc}") from exc
    raise UnknownGenerator(f"unknown sample generator {kind!r}")
