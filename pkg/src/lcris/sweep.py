"""Per-user sweep over the LC phase range: alternate MRT and phase design, pick the best range."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from lcris.beamform import Beamformer, ReflectionConfig, effective_channel, mrt, snr
from lcris.channel import ChannelMatrix, RicianParams, link_channel, rician_channel
from lcris.geometry import upa_coordinates
from lcris.lc_loss import element_amplitude, insertion_loss_db
from lcris.phase_opt import (InfeasibleError, PenaltyTrace, build_snr_quadratic, extract_phase_vector,
                             optimize_phases, rank_residual)
from lcris.scenario import Scenario

log = logging.getLogger(__name__)

# relative margin for "strictly better" when selecting the phase range
_TIE_RTOL = 1e-9


@dataclass
class UserChannels:
    """LOS channels of one user: BS-RIS matrix and one RIS-user column per area point."""

    H_t: ChannelMatrix
    h_r: list[np.ndarray]

    @classmethod
    def build(cls, scenario: Scenario, k: int) -> "UserChannels":
        bs_xyz = upa_coordinates(scenario.bs)
        ris_xyz = upa_coordinates(scenario.ris)
        H_t = link_channel(bs_xyz, ris_xyz, scenario.bs.center, scenario.ris.center,
                           scenario.pathloss_bs_ris, scenario.freq)
        h_r = []
        for p in scenario.users[k].points:
            row = link_channel(ris_xyz, p.as_array()[None, :], scenario.ris.center, p,
                               scenario.pathloss_ris_user, scenario.freq)
            h_r.append(row.entries[0].conj())
        return cls(H_t, h_r)

    def min_snr(self, config: ReflectionConfig, q: Beamformer, noise_w: float) -> float:
        return min(self.point_snrs(config, q, noise_w))

    def point_snrs(self, config: ReflectionConfig, q: Beamformer, noise_w: float) -> list[float]:
        return [snr(effective_channel(h, config, self.H_t), q, noise_w) for h in self.h_r]


@dataclass(frozen=True)
class RoundRecord:
    """Health of one relaxation solve inside an alternating-optimization round.

    ``sdp_alpha`` and ``extracted_alpha`` are measured on the same quadratics.
    """

    trace: PenaltyTrace
    sdp_alpha: float
    extracted_alpha: float
    hermitian_error: float
    min_eigenvalue: float
    diag_error: float
    rank_residual: float

    @classmethod
    def from_solve(cls, S: np.ndarray, trace: PenaltyTrace, sdp_alpha: float, extracted: float) -> "RoundRecord":
        Sh = (S + S.conj().T) / 2
        return cls(trace, sdp_alpha, extracted, float(np.abs(S - S.conj().T).max()),
                   float(np.linalg.eigvalsh(Sh).min()), float(np.abs(np.real(np.diag(S)) - 1).max()),
                   rank_residual(Sh))


@dataclass
class TradeoffPoint:
    """Outcome at one phase range.

    ``alpha`` is the worst-case SNR over the area at 1 W transmit power with
    the stored phases and unit-power beamformer direction, so the required
    power is ``snr_thr / alpha`` watts.
    """

    omega_max: float
    insertion_loss_db: float
    alpha: float
    required_power_w: float
    converged: bool
    amplitude: float = 1.0
    sdp_alpha: float = math.nan
    phases: Optional[ReflectionConfig] = None
    direction: Optional[Beamformer] = None
    rounds: list[RoundRecord] = field(default_factory=list, repr=False)

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.alpha) and self.alpha > 0

    @property
    def lossless_alpha(self) -> float:
        return self.alpha / self.amplitude**2


@dataclass
class UserSolution:
    user: int
    curve: list[TradeoffPoint]
    omega_star: float
    phases: ReflectionConfig
    beamformer: Beamformer
    per_point_snr: list[float]

    @property
    def best(self) -> TradeoffPoint:
        return next(p for p in self.curve if p.omega_max == self.omega_star)

    @property
    def required_power_w(self) -> float:
        return self.beamformer.power


def initial_beamformer(H_t: ChannelMatrix) -> Beamformer:
    """Unit-power BS beam along the dominant right singular vector of the BS-RIS channel.

    This is the beam that full-range co-phasing at the RIS favours; the RIS
    phases never enter it.
    """
    v = np.linalg.svd(H_t.entries)[2][0].conj()
    return Beamformer(v / np.linalg.norm(v))


def _seed(scenario: Scenario, k: int, j: int, r: int) -> int:
    return int(np.random.SeedSequence([scenario.seed, k, j, r]).generate_state(1)[0])


def solve_point(scenario: Scenario, k: int, j: int, chans: Optional[UserChannels] = None,
                fom: Optional[float] = None) -> TradeoffPoint:
    """Alternating optimization at the ``j``-th phase range of the grid for user ``k``."""
    chans = UserChannels.build(scenario, k) if chans is None else chans
    omega = scenario.omega_grid[j]
    loss = insertion_loss_db(omega, scenario.fom_deg_per_db if fom is None else fom)
    amp = element_amplitude(loss)
    noise_w = scenario.noise_w
    opt = scenario.optimizer
    points = scenario.users[k].points

    q = initial_beamformer(chans.H_t)
    best: Optional[tuple[float, ReflectionConfig, Beamformer, float]] = None
    rounds = []
    converged = True
    for r in range(scenario.ao_rounds):
        quads = [build_snr_quadratic(h, chans.H_t, q, noise_w, amp, p) for h, p in zip(chans.h_r, points)]
        try:
            S, sdp_alpha, trace = optimize_phases(quads, omega, _seed(scenario, k, j, r), opt.eps,
                                                  opt.i_max, opt.eta0, opt.tol)
        except InfeasibleError as exc:
            log.warning("user %d omega %.4g: %s", k, omega, exc)
            converged = False
            break
        converged = trace.converged
        cfg, alpha = extract_phase_vector(S, omega, quads, opt.extraction_grid)
        rounds.append(RoundRecord.from_solve(S, trace, sdp_alpha, alpha))
        candidates = [(alpha, q)]
        worst = int(np.argmin([qd.trace_with(S) for qd in quads]))
        h_eff = effective_channel(chans.h_r[worst], cfg, chans.H_t)
        if np.any(h_eff):
            q_new = mrt(h_eff, 1.0)
            candidates.append((chans.min_snr(cfg, q_new, noise_w), q_new))
        alpha, q = max(candidates, key=lambda c: c[0])
        if best is None or alpha > best[0]:
            best = (alpha, cfg, q, sdp_alpha)

    if best is None:
        return TradeoffPoint(omega, loss, math.nan, math.inf, False, amp, rounds=rounds)
    alpha, cfg, q, sdp_alpha = best
    power = scenario.snr_thr / alpha if alpha > 0 else math.inf
    return TradeoffPoint(omega, loss, alpha, power, converged, amp, sdp_alpha, cfg, q, rounds)


def select_best(curve: Sequence[TradeoffPoint], alphas: Optional[Sequence[float]] = None) -> int:
    """Index of the largest alpha among feasible points; ties go to the smaller range."""
    alphas = [p.alpha for p in curve] if alphas is None else list(alphas)
    best = None
    for i, (p, a) in enumerate(zip(curve, alphas)):
        if not p.feasible:
            continue
        if best is None or a > alphas[best] * (1 + _TIE_RTOL):
            best = i
    if best is None:
        raise InfeasibleError("no feasible point on the curve")
    return best


def assemble(scenario: Scenario, k: int, curve: list[TradeoffPoint],
             chans: Optional[UserChannels] = None) -> UserSolution:
    chans = UserChannels.build(scenario, k) if chans is None else chans
    star = curve[select_best(curve)]
    q = Beamformer(star.direction.weights * math.sqrt(star.required_power_w))
    snrs = chans.point_snrs(star.phases, q, scenario.noise_w)
    return UserSolution(k, curve, star.omega_max, star.phases, q, snrs)


def _map(fn, tasks, threads: int):
    if threads <= 1:
        return [fn(*t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: fn(*t), tasks))


def user_curve(scenario: Scenario, k: int, threads: int = 1) -> list[TradeoffPoint]:
    chans = UserChannels.build(scenario, k)
    return _map(solve_point, [(scenario, k, j, chans) for j in range(len(scenario.omega_grid))], threads)


def solve_user(scenario: Scenario, k: int, threads: int = 1) -> UserSolution:
    return assemble(scenario, k, user_curve(scenario, k, threads))


def run_curves(scenario: Scenario, threads: int = 1) -> list[list[TradeoffPoint]]:
    """Trade-off curve of every user, without selection."""
    chans = [UserChannels.build(scenario, k) for k in range(len(scenario.users))]
    tasks = [(scenario, k, j, chans[k]) for k in range(len(scenario.users))
             for j in range(len(scenario.omega_grid))]
    points = _map(solve_point, tasks, threads)
    n = len(scenario.omega_grid)
    return [points[k * n:(k + 1) * n] for k in range(len(scenario.users))]


def run(scenario: Scenario, threads: int = 1) -> list[UserSolution]:
    """Solve every user. Users are independent (one TDMA slot each)."""
    return [assemble(scenario, k, curve) for k, curve in enumerate(run_curves(scenario, threads))]


@dataclass(frozen=True)
class FomRow:
    fom: float
    user: int
    omega_star: float
    alpha: float
    required_power_w: float


def fom_sweep(scenario: Scenario, fom_values: Sequence[float],
              solutions: Optional[Sequence[UserSolution]] = None, threads: int = 1) -> list[FomRow]:
    """Re-select the best phase range for each figure of merit.

    The loss is one scalar per range, so the optimized phases do not depend
    on the FoM; each curve is rescored with the new amplitude instead of
    re-solved.
    """
    if any(not f > 0 for f in fom_values):
        raise ValueError("FoM values must be positive")
    solutions = run(scenario, threads) if solutions is None else solutions
    rows = []
    for fom in fom_values:
        for sol in solutions:
            amps = [element_amplitude(insertion_loss_db(p.omega_max, fom)) for p in sol.curve]
            alphas = [p.lossless_alpha * a**2 for p, a in zip(sol.curve, amps)]
            i = select_best(sol.curve, alphas)
            rows.append(FomRow(fom, sol.user, sol.curve[i].omega_max, alphas[i], scenario.snr_thr / alphas[i]))
    return rows


@dataclass(frozen=True)
class RadiusRow:
    radius: float
    omega_star: float
    required_power_w: float
    n_points: int


def radius_sweep(scenario: Scenario, radii: Sequence[float], k: int = 0,
                 threads: int = 1) -> tuple[list[RadiusRow], list[UserSolution]]:
    """Resample user ``k``'s area at each radius and solve it from scratch."""
    if any(r < 0 for r in radii):
        raise ValueError("radii must be >= 0")
    rows, sols = [], []
    for radius in radii:
        sc = scenario.with_user_radius(k, radius)
        sol = solve_user(sc, k, threads)
        rows.append(RadiusRow(radius, sol.omega_star, sol.required_power_w, len(sc.users[k])))
        sols.append(sol)
    return rows, sols


def rescore_rician(scenario: Scenario, solution: UserSolution, draws: int = 100, seed: int = 0) -> np.ndarray:
    """Worst-case area SNR of a fixed solution under Rician fading draws.

    Optimization only ever sees the LOS channels; this re-evaluates the chosen
    phases and beamformer with the scenario's K-factors.
    """
    chans = UserChannels.build(scenario, solution.user)
    _, k_bs_ris, k_ris_user = scenario.rician_k
    ss = np.random.SeedSequence([seed, solution.user])
    out = np.empty(draws)
    for d, child in enumerate(ss.spawn(draws)):
        seeds = child.generate_state(1 + len(chans.h_r))
        H_t = rician_channel(chans.H_t, RicianParams(k_bs_ris, int(seeds[0])))
        vals = []
        for h, s in zip(chans.h_r, seeds[1:]):
            row = rician_channel(ChannelMatrix(h.conj()[None, :], chans.H_t.carrier_freq),
                                 RicianParams(k_ris_user, int(s)))
            vals.append(snr(effective_channel(row.entries[0].conj(), solution.phases, H_t),
                            solution.beamformer, scenario.noise_w))
        out[d] = min(vals)
    return out
