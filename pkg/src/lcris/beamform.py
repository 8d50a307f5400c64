"""Effective channel, SNR, MRT beamformer and required transmit power."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from lcris.channel import ChannelMatrix

TWO_PI = 2 * math.pi
# phases within this of an arc endpoint count as on the arc
_PHASE_TOL = 1e-9


@dataclass(frozen=True)
class ReflectionConfig:
    """Per-element RIS phases with one uniform reflection amplitude.

    Phases lie in the closed arc ``[0, omega_max]`` and are stored reduced to
    ``[0, 2 pi)``.
    """

    phases: np.ndarray
    amplitude: float = 1.0
    omega_max: float = TWO_PI

    def __post_init__(self):
        phases = np.mod(np.asarray(self.phases, dtype=float).ravel(), TWO_PI)
        if not 0 < self.amplitude <= 1:
            raise ValueError(f"amplitude must be in (0, 1], got {self.amplitude}")
        if self.omega_max < TWO_PI - _PHASE_TOL:
            # values just below 2 pi are a wrapped 0
            wrapped = np.where(phases > TWO_PI - _PHASE_TOL, 0.0, phases)
            if np.any(wrapped > self.omega_max + _PHASE_TOL):
                raise ValueError("phase outside [0, omega_max]")
            phases = np.minimum(wrapped, self.omega_max)
        object.__setattr__(self, "phases", phases)

    @property
    def size(self) -> int:
        return self.phases.size

    def reflection(self) -> np.ndarray:
        """Diagonal of the reflection matrix, amplitude * exp(j phase)."""
        return self.amplitude * np.exp(1j * self.phases)


@dataclass(frozen=True)
class Beamformer:
    weights: np.ndarray
    power: float = field(init=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=complex).ravel()
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "power", float(np.vdot(w, w).real))


def _row(H_t) -> np.ndarray:
    return H_t.entries if isinstance(H_t, ChannelMatrix) else np.atleast_2d(np.asarray(H_t))


def effective_channel(h_r: np.ndarray, config: ReflectionConfig, H_t) -> np.ndarray:
    """Return h_eff with h_eff^H = h_r^H diag(a e^{j w}) H_t.

    ``h_r`` is the column RIS-to-user channel, so the user sees the row
    ``h_r.conj()``.
    """
    H = _row(H_t)
    h_r = np.asarray(h_r, dtype=complex).ravel()
    if h_r.size != H.shape[0] or config.size != H.shape[0]:
        raise ValueError(f"dimension mismatch: h_r {h_r.size}, phases {config.size}, H_t {H.shape}")
    row = (h_r.conj() * config.reflection()) @ H
    return row.conj()


def snr(h_eff: np.ndarray, q: Beamformer, noise_w: float) -> float:
    if not noise_w > 0:
        raise ValueError(f"noise power must be positive, got {noise_w}")
    return float(abs(np.vdot(h_eff, q.weights)) ** 2 / noise_w)


def mrt(h_eff: np.ndarray, power: float) -> Beamformer:
    """Matched-filter beamformer of the given power."""
    h_eff = np.asarray(h_eff, dtype=complex).ravel()
    norm = np.linalg.norm(h_eff)
    if norm == 0:
        raise ValueError("zero effective channel")
    if not power > 0:
        raise ValueError(f"power must be positive, got {power}")
    return Beamformer(h_eff / norm * math.sqrt(power))


def required_power(h_eff: np.ndarray, snr_thr: float, noise_w: float) -> float:
    """Transmit power at which MRT on ``h_eff`` just meets ``snr_thr``."""
    gain = float(np.vdot(h_eff, h_eff).real)
    if gain == 0:
        raise ValueError("zero effective channel: required power is infinite")
    return noise_w * snr_thr / gain


def required_power_area(h_effs: Sequence[np.ndarray], snr_thr: float, noise_w: float) -> float:
    """Worst case of the per-point required powers over an area sample."""
    return max(required_power(h, snr_thr, noise_w) for h in h_effs)


def rate(snr_value: float) -> float:
    """Spectral efficiency in bit/s/Hz."""
    if snr_value < 0:
        raise ValueError(f"snr must be >= 0, got {snr_value}")
    return math.log2(1 + snr_value)


def db(x: float) -> float:
    return 10 * math.log10(x)


def undb(x_db: float) -> float:
    return 10 ** (x_db / 10)
