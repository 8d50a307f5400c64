"""Experiment description: arrays, users, link budget, LC device and optimizer knobs.

Scenarios round-trip through plain dicts (and so JSON). Every field is
optional on input; missing fields take the default 28 GHz setup with a 4x4
BS array at (20, 0, 10) m, a 10x10 RIS at the origin in the y-z plane and four
users at (10, y, -5) m for y in 0, 1, 2, 5.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np

from lcris.channel import PathLossParams, noise_power, wavelength
from lcris.geometry import AreaSet, ArraySpec, Plane, Position3D, sample_area

TWO_PI = 2 * math.pi


class ScenarioError(ValueError):
    """Invalid scenario field; ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class NoiseParams:
    bandwidth_hz: float = 20e6
    n0_dbm_per_hz: float = -174.0
    noise_figure_db: float = 6.0

    @property
    def power_w(self) -> float:
        return noise_power(self.bandwidth_hz, self.n0_dbm_per_hz, self.noise_figure_db)


@dataclass(frozen=True)
class OptimizerSettings:
    eps: Optional[float] = None
    i_max: int = 30
    eta0: Optional[float] = None
    tol: float = 1e-7
    extraction_grid: int = 360


@dataclass(frozen=True)
class SweepSettings:
    fom_values: tuple[float, ...] = (25.0, 75.0, 150.0)
    radii: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0)
    radius_user: int = 1


def omega_grid(points: int = 25) -> tuple[float, ...]:
    """``points`` equally spaced values from 0 to 2 pi inclusive."""
    return tuple(float(w) for w in np.linspace(0.0, TWO_PI, points))


@dataclass(frozen=True)
class Scenario:
    bs: ArraySpec
    ris: ArraySpec
    users: tuple[AreaSet, ...]
    snr_thr_db: float = 10.0
    fom_deg_per_db: float = 75.0
    omega_grid: tuple[float, ...] = field(default_factory=omega_grid)
    pathloss_bs_ris: PathLossParams = PathLossParams()
    pathloss_ris_user: PathLossParams = PathLossParams()
    pathloss_bs_user: PathLossParams = PathLossParams()
    rician_k: tuple[float, float, float] = (0.0, 10.0, 10.0)
    noise: NoiseParams = NoiseParams()
    freq: float = 28e9
    seed: int = 0
    ao_rounds: int = 2
    optimizer: OptimizerSettings = OptimizerSettings()
    sweeps: SweepSettings = SweepSettings()

    def __post_init__(self):
        if not self.users:
            raise ScenarioError("users", "at least one user is required")
        grid = list(self.omega_grid)
        if not grid:
            raise ScenarioError("omega_grid", "empty grid")
        if any(b < a for a, b in zip(grid, grid[1:])):
            raise ScenarioError("omega_grid", "must be sorted ascending")
        if grid[0] < 0 or grid[-1] > TWO_PI + 1e-12:
            raise ScenarioError("omega_grid", "values must lie in [0, 2 pi]")
        if not self.fom_deg_per_db > 0:
            raise ScenarioError("fom_deg_per_db", "must be positive")
        if self.ao_rounds < 1:
            raise ScenarioError("ao_rounds", "must be >= 1")
        if not self.freq > 0:
            raise ScenarioError("freq_hz", "must be positive")

    @property
    def snr_thr(self) -> float:
        return 10 ** (self.snr_thr_db / 10)

    @property
    def noise_w(self) -> float:
        return self.noise.power_w

    @property
    def wavelength(self) -> float:
        return wavelength(self.freq)

    def with_user_radius(self, k: int, radius: float) -> "Scenario":
        u = self.users[k]
        users = list(self.users)
        users[k] = sample_area(u.center, radius, u.resolution)
        return replace(self, users=tuple(users))


DEFAULT_USER_Y = (0.0, 1.0, 2.0, 5.0)


def default_dict() -> dict[str, Any]:
    return {
        "freq_hz": 28e9,
        "bs": {"rows": 4, "cols": 4, "spacing_m": None, "center_m": [20.0, 0.0, 10.0], "plane": "YZ"},
        "ris": {"rows": 10, "cols": 10, "spacing_m": None, "center_m": [0.0, 0.0, 0.0], "plane": "YZ"},
        "users": [{"center_m": [10.0, y, -5.0], "radius_m": 0.0, "resolution_m": 0.5} for y in DEFAULT_USER_Y],
        "snr_thr_db": 10.0,
        "fom_deg_per_db": 75.0,
        "omega_grid": 25,
        "pathloss": {link: {"rho_db": -61.0, "d0_m": 1.0, "exponent": 2.0}
                     for link in ("bs_ris", "ris_user", "bs_user")},
        "rician_k": {"bs_user": 0.0, "bs_ris": 10.0, "ris_user": 10.0},
        "noise": {"bandwidth_hz": 20e6, "n0_dbm_per_hz": -174.0, "noise_figure_db": 6.0},
        "seed": 0,
        "ao_rounds": 2,
        "optimizer": {"eps": None, "i_max": 30, "eta0": None, "tol": 1e-7, "extraction_grid": 360},
        "sweeps": {"fom_values": [25.0, 75.0, 150.0], "radii": [0.0, 0.5, 1.0, 2.0], "radius_user": 1},
    }


def _merge(base: dict, over: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        name = f"{path}{key}"
        if key not in base:
            raise ScenarioError(name, "unknown field")
        if isinstance(base[key], dict) and isinstance(val, dict):
            out[key] = _merge(base[key], val, name + ".")
        else:
            out[key] = copy.deepcopy(val)
    return out


def _number(d: dict, key: str, name: str, *, positive=False, nonneg=False) -> float:
    val = d[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ScenarioError(name, f"expected a number, got {val!r}")
    val = float(val)
    if not math.isfinite(val):
        raise ScenarioError(name, "must be finite")
    if positive and not val > 0:
        raise ScenarioError(name, f"must be positive, got {val}")
    if nonneg and val < 0:
        raise ScenarioError(name, f"must be >= 0, got {val}")
    return val


def _position(val, name: str) -> Position3D:
    try:
        return Position3D.from_seq(val)
    except (TypeError, ValueError):
        raise ScenarioError(name, f"expected three finite coordinates, got {val!r}") from None


def _int(d: dict, key: str, name: str, minimum: int) -> int:
    val = d[key]
    if isinstance(val, bool) or not isinstance(val, int) or val < minimum:
        raise ScenarioError(name, f"expected an integer >= {minimum}, got {val!r}")
    return val


def _array(d: dict, name: str, lam: float) -> ArraySpec:
    spacing = d["spacing_m"]
    spacing = lam / 2 if spacing is None else _number(d, "spacing_m", f"{name}.spacing_m", positive=True)
    try:
        plane = Plane(d["plane"])
    except ValueError:
        raise ScenarioError(f"{name}.plane", f"expected one of XY, YZ, XZ, got {d['plane']!r}") from None
    return ArraySpec(_int(d, "rows", f"{name}.rows", 1), _int(d, "cols", f"{name}.cols", 1),
                     spacing, _position(d["center_m"], f"{name}.center_m"), plane)


def resolve_dict(raw: Optional[dict] = None) -> dict[str, Any]:
    """Defaults merged with ``raw``; the result fully determines a scenario."""
    raw = {} if raw is None else raw
    if not isinstance(raw, dict):
        raise ScenarioError("<root>", "scenario must be a JSON object")
    d = _merge(default_dict(), raw)
    lam = wavelength(_number(d, "freq_hz", "freq_hz", positive=True))
    for name in ("bs", "ris"):
        if d[name]["spacing_m"] is None:
            d[name]["spacing_m"] = lam / 2
    users = d["users"]
    if not isinstance(users, list) or not users:
        raise ScenarioError("users", "expected a nonempty list")
    full = []
    for i, u in enumerate(users):
        if not isinstance(u, dict):
            raise ScenarioError(f"users[{i}]", "expected an object")
        full.append(_merge({"center_m": None, "radius_m": 0.0, "resolution_m": 0.5}, u, f"users[{i}]."))
    d["users"] = full
    if isinstance(d["omega_grid"], int) and not isinstance(d["omega_grid"], bool):
        if d["omega_grid"] < 1:
            raise ScenarioError("omega_grid", "need at least one grid point")
        d["omega_grid"] = list(omega_grid(d["omega_grid"]))
    return d


def scenario_from_dict(raw: Optional[dict] = None) -> Scenario:
    d = resolve_dict(raw)
    lam = wavelength(d["freq_hz"])
    users = []
    for i, u in enumerate(d["users"]):
        name = f"users[{i}]"
        if u["center_m"] is None:
            raise ScenarioError(f"{name}.center_m", "missing")
        users.append(sample_area(_position(u["center_m"], f"{name}.center_m"),
                                 _number(u, "radius_m", f"{name}.radius_m", nonneg=True),
                                 _number(u, "resolution_m", f"{name}.resolution_m", positive=True)))
    grid = d["omega_grid"]
    if not isinstance(grid, list) or not all(isinstance(w, (int, float)) for w in grid):
        raise ScenarioError("omega_grid", "expected a point count or a list of radians")
    pl = {}
    for link in ("bs_ris", "ris_user", "bs_user"):
        p = d["pathloss"][link]
        pl[link] = PathLossParams(_number(p, "rho_db", f"pathloss.{link}.rho_db"),
                                  _number(p, "d0_m", f"pathloss.{link}.d0_m", positive=True),
                                  _number(p, "exponent", f"pathloss.{link}.exponent"))
    n = d["noise"]
    noise = NoiseParams(_number(n, "bandwidth_hz", "noise.bandwidth_hz", positive=True),
                        _number(n, "n0_dbm_per_hz", "noise.n0_dbm_per_hz"),
                        _number(n, "noise_figure_db", "noise.noise_figure_db"))
    rk = d["rician_k"]
    rician = tuple(_number(rk, link, f"rician_k.{link}", nonneg=True) for link in ("bs_user", "bs_ris", "ris_user"))
    o = d["optimizer"]
    opt = OptimizerSettings(
        eps=None if o["eps"] is None else _number(o, "eps", "optimizer.eps", positive=True),
        i_max=_int(o, "i_max", "optimizer.i_max", 1),
        eta0=None if o["eta0"] is None else _number(o, "eta0", "optimizer.eta0", nonneg=True),
        tol=_number(o, "tol", "optimizer.tol", positive=True),
        extraction_grid=_int(o, "extraction_grid", "optimizer.extraction_grid", 1),
    )
    s = d["sweeps"]
    foms = s["fom_values"]
    radii = s["radii"]
    if not isinstance(foms, list) or not all(isinstance(f, (int, float)) and f > 0 for f in foms):
        raise ScenarioError("sweeps.fom_values", "expected a list of positive numbers")
    if not isinstance(radii, list) or not all(isinstance(r, (int, float)) and r >= 0 for r in radii):
        raise ScenarioError("sweeps.radii", "expected a list of numbers >= 0")
    sweeps = SweepSettings(tuple(float(f) for f in foms), tuple(float(r) for r in radii),
                           _int(s, "radius_user", "sweeps.radius_user", 1))
    if sweeps.radius_user > len(users):
        raise ScenarioError("sweeps.radius_user", f"only {len(users)} users defined")
    seed = _int(d, "seed", "seed", 0)
    return Scenario(
        bs=_array(d["bs"], "bs", lam),
        ris=_array(d["ris"], "ris", lam),
        users=tuple(users),
        snr_thr_db=_number(d, "snr_thr_db", "snr_thr_db"),
        fom_deg_per_db=_number(d, "fom_deg_per_db", "fom_deg_per_db", positive=True),
        omega_grid=tuple(float(w) for w in grid),
        pathloss_bs_ris=pl["bs_ris"],
        pathloss_ris_user=pl["ris_user"],
        pathloss_bs_user=pl["bs_user"],
        rician_k=rician,
        noise=noise,
        freq=d["freq_hz"],
        seed=seed,
        ao_rounds=_int(d, "ao_rounds", "ao_rounds", 1),
        optimizer=opt,
        sweeps=sweeps,
    )


def default_scenario(**changes) -> Scenario:
    return replace(scenario_from_dict({}), **changes)
