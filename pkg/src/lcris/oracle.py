"""Exhaustive and closed-form references for small phase-design instances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from lcris.phase_opt import SnrQuadratic

MAX_GRID_POINTS = 10**7
_CHUNK = 1 << 16


@dataclass(frozen=True)
class GridSearchSpec:
    levels: int
    omega_max: float
    n: int

    def __post_init__(self):
        if self.levels < 2:
            raise ValueError(f"levels must be >= 2, got {self.levels}")
        if self.levels ** self.n > MAX_GRID_POINTS:
            raise ValueError(f"{self.levels}^{self.n} grid points exceed the {MAX_GRID_POINTS} guard")

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.omega_max, self.levels)


def brute_force_phases(quadratics: Sequence[SnrQuadratic], spec: GridSearchSpec) -> tuple[np.ndarray, float]:
    """Maximize ``min_p s^H A_p s`` over every phase vector on the uniform grid.

    Returns the first maximizer in lexicographic grid order and its value.
    """
    if quadratics and quadratics[0].dim != spec.n:
        raise ValueError(f"quadratics have dim {quadratics[0].dim}, spec says {spec.n}")
    grid = spec.grid()
    total = spec.levels ** spec.n
    shape = (spec.levels,) * spec.n
    best_val, best_idx = -math.inf, 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        digits = np.stack(np.unravel_index(idx, shape), axis=1)
        s = np.exp(1j * grid[digits])
        worst = np.min([qd.value(s) for qd in quadratics], axis=0)
        k = int(np.argmax(worst))
        if worst[k] > best_val:
            best_val, best_idx = float(worst[k]), int(idx[k])
    phases = grid[np.array(np.unravel_index(best_idx, shape))]
    return phases, best_val


def co_phasing_bound(v: np.ndarray, noise_w: float = 1.0, amplitude: float = 1.0) -> float:
    """``amplitude^2 (sum |v_n|)^2 / noise_w``: the full-range optimum of ``|v^H s|^2``."""
    v = np.asarray(v)
    if not np.any(v):
        raise ValueError("zero vector")
    return float(amplitude**2 * np.sum(np.abs(v)) ** 2 / noise_w)
