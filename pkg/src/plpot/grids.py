"""Evaluation grids and the on-disk field format.

A :class:`GridSpec` describes a tensor grid of evaluation points either
in real/imaginary parts (mode ``"reim"``, two axes per complex
coordinate) or in coordinate moduli (mode ``"moduli"``, one axis per
coordinate).  A :class:`GridField` is values on such a grid plus a
metadata dictionary; it round-trips through a CSV file with 17
significant digits and a deterministic JSON sidecar, so that rereading
and rewriting reproduces both files byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError

_FMT = "%.17g"


@dataclass(frozen=True)
class Axis:
    """One uniformly spaced grid axis."""

    name: str
    start: float
    stop: float
    num: int

    def __post_init__(self):
        if self.num < 1:
            raise ConfigError(f"axis {self.name!r} needs at least one point")

    def coords(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)

    def to_dict(self) -> dict:
        return {"name": self.name, "start": self.start, "stop": self.stop, "num": self.num}


@dataclass(frozen=True)
class GridSpec:
    """Tensor product of axes with an interpretation mode.

    mode "reim":   axes come in (real, imaginary) pairs per complex
                   coordinate, so a d-dimensional body needs 2d axes.
    mode "moduli": one axis of nonnegative moduli per coordinate.
    """

    axes: tuple[Axis, ...]
    mode: str = "reim"

    def __post_init__(self):
        if self.mode not in ("reim", "moduli"):
            raise ConfigError(f"unknown grid mode {self.mode!r}")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.num for ax in self.axes)

    def dim(self) -> int:
        if self.mode == "reim":
            if len(self.axes) % 2:
                raise ConfigError("reim grids need an even number of axes")
            return len(self.axes) // 2
        return len(self.axes)

    def complex_points(self, dim: int) -> np.ndarray:
        """Flattened evaluation points, shape (npoints, dim), complex dtype."""
        if self.dim() != dim:
            raise ConfigError(f"grid describes dimension {self.dim()}, expected {dim}")
        mesh = np.meshgrid(*(ax.coords() for ax in self.axes), indexing="ij")
        flat = np.stack([m.ravel() for m in mesh], axis=-1)
        if self.mode == "reim":
            return flat[:, 0::2] + 1j * flat[:, 1::2]
        if np.any(flat < 0):
            raise ConfigError("moduli grid contains negative values")
        return flat.astype(complex)

    def to_dict(self) -> dict:
        return {"mode": self.mode, "axes": [ax.to_dict() for ax in self.axes]}

    @classmethod
    def from_dict(cls, data: dict) -> "GridSpec":
        try:
            axes = tuple(
                Axis(a["name"], float(a["start"]), float(a["stop"]), int(a["num"]))
                for a in data["axes"]
            )
            return cls(axes=axes, mode=data.get("mode", "reim"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad grid description: {exc}") from exc


def meta_path(path) -> Path:
    return Path(str(path) + ".meta.json")


@dataclass
class GridField:
    """Values on a tensor grid plus run metadata.

    ``axes`` holds (name, coordinates) pairs; ``values`` has shape equal
    to the axis lengths in order.
    """

    axes: tuple[tuple[str, np.ndarray], ...]
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = tuple(len(c) for _, c in self.axes)
        if tuple(self.values.shape) != shape:
            raise ConfigError(
                f"values shape {self.values.shape} does not match axes {shape}"
            )

    @classmethod
    def from_spec(cls, spec: GridSpec, values: np.ndarray, meta: dict) -> "GridField":
        axes = tuple((ax.name, ax.coords()) for ax in spec.axes)
        meta = dict(meta)
        meta.setdefault("grid", spec.to_dict())
        return cls(axes=axes, values=np.asarray(values, dtype=float).reshape(spec.shape), meta=meta)

    def write(self, path) -> None:
        """Write CSV with 17 significant digits plus JSON meta sidecar."""
        path = Path(path)
        mesh = np.meshgrid(*(c for _, c in self.axes), indexing="ij")
        cols = [m.ravel() for m in mesh] + [self.values.ravel()]
        header = ",".join([name for name, _ in self.axes] + ["value"])
        data = np.stack(cols, axis=-1)
        np.savetxt(path, data, fmt=_FMT, delimiter=",", header=header, comments="")
        meta = dict(self.meta)
        meta["axes"] = [
            {"name": name, "coords": coords.tolist()} for name, coords in self.axes
        ]
        meta["shape"] = list(self.values.shape)
        meta_path(path).write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")

    @classmethod
    def read(cls, path) -> "GridField":
        """Rebuild a field from :meth:`write` output; the sidecar is required."""
        path = Path(path)
        side = meta_path(path)
        if not side.exists():
            raise ConfigError(f"missing meta sidecar {side}")
        meta = json.loads(side.read_text())
        axes = tuple(
            (a["name"], np.asarray(a["coords"], dtype=float)) for a in meta["axes"]
        )
        shape = tuple(meta["shape"])
        raw = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        values = raw[:, -1].reshape(shape)
        stored = {k: v for k, v in meta.items() if k not in ("axes", "shape")}
        return cls(axes=axes, values=values, meta=stored)
