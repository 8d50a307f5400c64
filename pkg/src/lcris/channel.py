"""Near-field line-of-sight channels, Rician perturbation and noise power."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from lcris.geometry import Position3D

SPEED_OF_LIGHT = 299_792_458.0


def wavelength(freq: float) -> float:
    return SPEED_OF_LIGHT / freq


@dataclass(frozen=True)
class ChannelMatrix:
    """Complex channel of shape (n_rx, n_tx) at a carrier frequency."""

    entries: np.ndarray
    carrier_freq: float

    def __post_init__(self):
        entries = np.atleast_2d(np.asarray(self.entries, dtype=complex))
        if not np.all(np.isfinite(entries)):
            raise ValueError("channel entries must be finite")
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def T(self) -> "ChannelMatrix":
        return ChannelMatrix(self.entries.T, self.carrier_freq)


@dataclass(frozen=True)
class PathLossParams:
    rho_db: float = -61.0
    d0: float = 1.0
    exponent: float = 2.0

    def __post_init__(self):
        if not self.d0 > 0:
            raise ValueError(f"d0 must be positive, got {self.d0}")


@dataclass(frozen=True)
class RicianParams:
    k_factor: float
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.k_factor) and self.k_factor >= 0):
            raise ValueError(f"k_factor must be finite and >= 0, got {self.k_factor}")


def pathloss_amplitude(d: float, params: PathLossParams) -> float:
    """Amplitude c0 with c0**2 = rho * (d0 / d)**exponent."""
    if not d > 0:
        raise ValueError(f"distance must be positive, got {d}")
    rho = 10.0 ** (params.rho_db / 10.0)
    return float(np.sqrt(rho * (params.d0 / d) ** params.exponent))


def _as_coords(points: Sequence[Position3D] | np.ndarray) -> np.ndarray:
    if isinstance(points, np.ndarray):
        return np.atleast_2d(points).astype(float)
    return np.array([p.as_array() for p in points], dtype=float).reshape(-1, 3)


def los_channel(tx, rx, c0: float, freq: float) -> ChannelMatrix:
    """[H]_{m,n} = c0 * exp(j k |u_rx,m - u_tx,n|) with wave number k = 2 pi / lambda."""
    tx_xyz, rx_xyz = _as_coords(tx), _as_coords(rx)
    if len(tx_xyz) == 0 or len(rx_xyz) == 0:
        raise ValueError("position lists must be nonempty")
    if not c0 > 0:
        raise ValueError(f"c0 must be positive, got {c0}")
    dist = np.linalg.norm(rx_xyz[:, None, :] - tx_xyz[None, :, :], axis=-1)
    if np.any(dist == 0):
        raise ValueError("coincident transmit and receive points")
    kappa = 2 * np.pi / wavelength(freq)
    return ChannelMatrix(c0 * np.exp(1j * kappa * dist), freq)


def link_channel(tx, rx, tx_center: Position3D, rx_center: Position3D,
                 pathloss: PathLossParams, freq: float) -> ChannelMatrix:
    """LOS channel whose single amplitude comes from the center-to-center distance."""
    c0 = pathloss_amplitude(tx_center.distance(rx_center), pathloss)
    return los_channel(tx, rx, c0, freq)


def rician_channel(los: ChannelMatrix, params: RicianParams) -> ChannelMatrix:
    """Mix the LOS matrix with i.i.d. CN scatter of equal per-entry power."""
    rng = np.random.default_rng(params.seed)
    H = los.entries
    power = np.abs(H) ** 2
    scatter = np.sqrt(power / 2) * (rng.standard_normal(H.shape) + 1j * rng.standard_normal(H.shape))
    k = params.k_factor
    return ChannelMatrix(np.sqrt(k / (k + 1)) * H + np.sqrt(1 / (k + 1)) * scatter, los.carrier_freq)


def noise_power(bandwidth: float, n0_dbm_per_hz: float = -174.0, noise_figure_db: float = 6.0) -> float:
    """Thermal noise W * N0 * NF in watts."""
    if not bandwidth > 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    dbm = n0_dbm_per_hz + 10 * np.log10(bandwidth) + noise_figure_db
    return float(10.0 ** ((dbm - 30.0) / 10.0))


def watts_to_dbm(p: float) -> float:
    return float(10 * np.log10(p) + 30)
