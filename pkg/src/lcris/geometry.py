"""Array element positions and sampled user coverage areas.

Element indexing is row-major: element ``n = r * cols + c`` sits at row ``r``
and column ``c``. Columns run along the first axis of the array plane and rows
along the second (``YZ``: columns along y, rows along z). Every RIS phase
vector in the package is indexed in this order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite position {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_seq(cls, seq) -> "Position3D":
        x, y, z = (float(v) for v in seq)
        return cls(x, y, z)

    def distance(self, other: "Position3D") -> float:
        return float(np.linalg.norm(self.as_array() - other.as_array()))


class Plane(str, Enum):
    XY = "XY"
    YZ = "YZ"
    XZ = "XZ"


# (column axis, row axis) for each plane
_PLANE_AXES = {Plane.XY: (0, 1), Plane.YZ: (1, 2), Plane.XZ: (0, 2)}


@dataclass(frozen=True)
class ArraySpec:
    rows: int
    cols: int
    spacing: float
    center: Position3D = Position3D(0.0, 0.0, 0.0)
    plane: Plane = Plane.YZ

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"array needs rows >= 1 and cols >= 1, got {self.rows}x{self.cols}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        object.__setattr__(self, "plane", Plane(self.plane))

    @property
    def size(self) -> int:
        return self.rows * self.cols


def upa_coordinates(spec: ArraySpec) -> np.ndarray:
    """Element coordinates of a uniform planar array as an (rows*cols, 3) array."""
    col_axis, row_axis = _PLANE_AXES[spec.plane]
    r, c = np.meshgrid(np.arange(spec.rows), np.arange(spec.cols), indexing="ij")
    coords = np.zeros((spec.size, 3))
    coords[:, col_axis] = (c.ravel() - (spec.cols - 1) / 2) * spec.spacing
    coords[:, row_axis] = (r.ravel() - (spec.rows - 1) / 2) * spec.spacing
    return coords + spec.center.as_array()


def upa_positions(spec: ArraySpec) -> list[Position3D]:
    return [Position3D.from_seq(p) for p in upa_coordinates(spec)]


@dataclass(frozen=True)
class AreaSet:
    """Discrete sample of a disc of candidate user locations.

    The grid is anchored at ``center`` (always the first point) and lies in the
    horizontal plane ``z = center.z``; the disc is closed.
    """

    center: Position3D
    radius: float
    resolution: float
    points: tuple[Position3D, ...]

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError(f"radius must be >= 0, got {self.radius}")
        if not self.resolution > 0:
            raise ValueError(f"resolution must be > 0, got {self.resolution}")

    def __len__(self):
        return len(self.points)

    def coordinates(self) -> np.ndarray:
        return np.array([p.as_array() for p in self.points])


# slack for grid points that sit exactly on the boundary circle
_BOUNDARY_TOL = 1e-9


def sample_area(center: Position3D, radius: float, resolution: float) -> AreaSet:
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    if not resolution > 0:
        raise ValueError(f"resolution must be > 0, got {resolution}")
    n = int(math.floor(radius / resolution + _BOUNDARY_TOL))
    offsets = [(0, 0)]
    for i in range(-n, n + 1):
        for j in range(-n, n + 1):
            if (i, j) == (0, 0):
                continue
            if math.hypot(i * resolution, j * resolution) <= radius * (1 + _BOUNDARY_TOL):
                offsets.append((i, j))
    points = tuple(
        Position3D(center.x + i * resolution, center.y + j * resolution, center.z) for i, j in offsets
    )
    return AreaSet(center=center, radius=float(radius), resolution=float(resolution), points=points)
