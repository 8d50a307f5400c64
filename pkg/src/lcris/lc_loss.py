"""Liquid-crystal phase shifter: length, phase range and insertion loss."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from lcris.channel import SPEED_OF_LIGHT

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class LcPhaseShifterSpec:
    length: float
    ref_length: float
    fom_deg_per_db: float = 75.0
    freq: float = 28e9
    birefringence: Optional[float] = None

    def __post_init__(self):
        if not 0 <= self.length <= self.ref_length:
            raise ValueError(f"need 0 <= length <= ref_length, got {self.length}, {self.ref_length}")
        if not self.fom_deg_per_db > 0:
            raise ValueError(f"FoM must be positive, got {self.fom_deg_per_db}")

    @property
    def omega_max(self) -> float:
        return max_phase_shift(self.length, self.ref_length)

    @property
    def insertion_loss_db(self) -> float:
        return insertion_loss_db(self.omega_max, self.fom_deg_per_db)

    @property
    def amplitude(self) -> float:
        return element_amplitude(self.insertion_loss_db)


def max_phase_shift_physical(l: float, delta_n: float, freq: float) -> float:
    """Differential phase range 2 pi l dn f / c of a delay-line shifter."""
    return TWO_PI * l * delta_n * freq / SPEED_OF_LIGHT


def max_phase_shift(l: float, l_r: float) -> float:
    """Phase range of a shifter of length ``l`` relative to the full-range length ``l_r``."""
    if l < 0:
        raise ValueError(f"length must be >= 0, got {l}")
    if l > l_r:
        raise ValueError(f"length {l} exceeds reference length {l_r}")
    return TWO_PI * l / l_r


def insertion_loss_db(omega_max: float, fom_deg_per_db: float) -> float:
    if not fom_deg_per_db > 0:
        raise ValueError(f"FoM must be positive, got {fom_deg_per_db}")
    return math.degrees(omega_max) / fom_deg_per_db


def element_amplitude(loss_db: float) -> float:
    """Reflection amplitude a with a**2 equal to the inverse linear loss."""
    if loss_db < 0:
        raise ValueError(f"loss must be >= 0 dB, got {loss_db}")
    return 10.0 ** (-loss_db / 20.0)
