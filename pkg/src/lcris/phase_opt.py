"""Restricted-range RIS phase design by penalized semidefinite relaxation.

The SNR at each sample point is a quadratic form ``s^H A s`` in the unit-modulus
reflection vector ``s``. Lifting ``S = s s^H`` gives a unit-diagonal SDP; the
phase-range restriction enters through linear constraints on the row sums of
``S`` and rank one is driven by a linearized nuclear-minus-spectral-norm
penalty whose weight grows fivefold per outer iteration.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from lcris import conic
from lcris.beamform import Beamformer, ReflectionConfig
from lcris.channel import ChannelMatrix
from lcris.geometry import Position3D

log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
PENALTY_GROWTH = 5.0
# omega_max this close to 0 or 2 pi is treated as the endpoint
_OMEGA_TOL = 1e-12


class InfeasibleError(RuntimeError):
    pass


@dataclass(frozen=True)
class SnrQuadratic:
    """SNR at one sample point as ``s^H A s`` with ``A = U U^H``."""

    A: np.ndarray
    point: Optional[Position3D] = None
    amplitude: float = 1.0
    factor: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        A = np.asarray(self.A, dtype=complex)
        A = (A + A.conj().T) / 2
        object.__setattr__(self, "A", A)
        if self.factor is None:
            w, V = np.linalg.eigh(A)
            keep = w > 1e-12 * max(w[-1], 0.0) if w[-1] > 0 else np.zeros_like(w, dtype=bool)
            object.__setattr__(self, "factor", V[:, keep] * np.sqrt(w[keep]))
        else:
            object.__setattr__(self, "factor", np.asarray(self.factor, dtype=complex).reshape(len(A), -1))

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def value(self, s: np.ndarray) -> np.ndarray:
        """``s^H A s`` for one vector or a stack of row vectors."""
        s = np.asarray(s)
        return np.sum(np.abs(s @ self.factor.conj()) ** 2, axis=-1)

    def trace_with(self, S: np.ndarray) -> float:
        return float(np.real(np.sum(self.A.conj() * S)))

    def cophasing_bound(self) -> float:
        """Largest ``s^H A s`` over unit-modulus ``s`` when A has rank one; an upper bound otherwise."""
        return float(np.sum(np.sum(np.abs(self.factor), axis=0) ** 2))


def build_snr_quadratic(h_r: np.ndarray, H_t, q: Beamformer, noise_w: float,
                        amplitude: float = 1.0, point: Optional[Position3D] = None) -> SnrQuadratic:
    """Quadratic form of the SNR in the reflection vector for a fixed beamformer.

    With ``a = amplitude * h_r * conj(H_t q) / sigma``, ``A = a a^H`` and
    ``s^H A s = |h_r^H diag(amplitude s) H_t q|^2 / sigma^2``.
    """
    H = H_t.entries if isinstance(H_t, ChannelMatrix) else np.atleast_2d(H_t)
    h_r = np.asarray(h_r, dtype=complex).ravel()
    if h_r.size != H.shape[0] or q.weights.size != H.shape[1]:
        raise ValueError(f"dimension mismatch: h_r {h_r.size}, H_t {H.shape}, q {q.weights.size}")
    if not 0 < amplitude <= 1:
        raise ValueError(f"amplitude must be in (0, 1], got {amplitude}")
    a = amplitude * h_r * np.conj(H @ q.weights) / math.sqrt(noise_w)
    return SnrQuadratic(np.outer(a, a.conj()), point, amplitude, a[:, None])


@dataclass(frozen=True)
class ArcConstraintSet:
    """Linear constraints on row sums ``r_n = sum_i S[n, i]`` for the arc ``[0, omega_max]``.

    For ``omega_max`` in ``(pi, 2 pi)`` each row reads
    ``Re(zeta r_n) + tan(omega_max / 2) Im(zeta r_n) <= 1``; for ``(0, pi]`` it
    reads ``2 cos(omega_max / 2) Im(zeta r_n / 2) <= Im(zeta r_n)``. Both are
    stored as ``Re(coef * r_n) <= bound``. The set is empty at 0 and 2 pi.
    """

    omega_max: float
    n: int
    zeta: Optional[complex]
    coef: complex = 0j
    bound: float = 0.0

    @property
    def rows(self) -> int:
        return 0 if self.zeta is None else self.n

    @property
    def branch(self) -> str:
        if self.zeta is None:
            return "none"
        return "wide" if self.omega_max > math.pi else "narrow"

    def row_values(self, S: np.ndarray) -> np.ndarray:
        """Left minus right side of every row, evaluated as written (feasible iff <= 0)."""
        if self.zeta is None:
            return np.zeros(0)
        r = self.zeta * np.sum(S, axis=1)
        if self.branch == "wide":
            return r.real + math.tan(self.omega_max / 2) * r.imag - 1.0
        return 2 * math.cos(self.omega_max / 2) * (r / 2).imag - r.imag

    def constraints(self) -> list[conic.LinearConstraint]:
        if self.zeta is None:
            return []
        ones = np.full(self.n, self.coef)
        eye = np.eye(self.n)
        return [conic.LinearConstraint(ones, eye[:, k], self.bound, "<=") for k in range(self.n)]


def arc_constraint_rows(omega_max: float, n: int) -> ArcConstraintSet:
    if not -_OMEGA_TOL <= omega_max <= TWO_PI + _OMEGA_TOL:
        raise ValueError(f"omega_max must lie in [0, 2 pi], got {omega_max}")
    if omega_max <= _OMEGA_TOL or omega_max >= TWO_PI - _OMEGA_TOL:
        return ArcConstraintSet(omega_max, n, None)
    zeta = 1j * omega_max / (n * (1 - np.exp(-1j * omega_max)))
    if omega_max > math.pi:
        coef = (1 - 1j * math.tan(omega_max / 2)) * zeta
        bound = 1.0
    else:
        # 2 cos(w/2) Im(zeta r / 2) - Im(zeta r) = Re(-j (cos(w/2) - 1) zeta r)
        coef = -1j * (math.cos(omega_max / 2) - 1) * zeta
        bound = 0.0
    return ArcConstraintSet(omega_max, n, complex(zeta), complex(coef), bound)


@dataclass
class PenaltyStep:
    iteration: int
    alpha: float
    rank_residual: float
    frobenius_step: float
    eta: float
    solver_status: str = ""
    solver_iterations: int = 0


@dataclass
class PenaltyTrace:
    steps: list[PenaltyStep] = field(default_factory=list)
    converged: bool = False

    CSV_COLUMNS = ("iteration", "alpha", "rank_residual", "frobenius_step", "eta")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.CSV_COLUMNS)
            for st in self.steps:
                writer.writerow([st.iteration, f"{st.alpha:.12g}", f"{st.rank_residual:.12g}",
                                 f"{st.frobenius_step:.12g}", f"{st.eta:.12g}"])


@dataclass
class PenaltyState:
    eta: float
    S_prev: np.ndarray
    iteration: int = 0

    def advance(self, S: np.ndarray) -> None:
        self.S_prev = S
        self.iteration += 1
        self.eta *= PENALTY_GROWTH


class PenaltyResult(NamedTuple):
    S: np.ndarray
    alpha: float
    trace: PenaltyTrace


def rank_residual(S: np.ndarray) -> float:
    """Nuclear minus spectral norm of a Hermitian matrix."""
    w = np.abs(np.linalg.eigvalsh(S))
    return float(w.sum() - w.max())


def min_trace(quadratics: Sequence[SnrQuadratic], S: np.ndarray) -> float:
    return min(qd.trace_with(S) for qd in quadratics)


def _principal(S: np.ndarray) -> np.ndarray:
    return np.linalg.eigh(S)[1][:, -1]


def optimize_phases(quadratics: Sequence[SnrQuadratic], omega_max: float, init_seed: int = 0,
                    eps: Optional[float] = None, i_max: int = 30, eta0: Optional[float] = None,
                    tol: float = 1e-7) -> PenaltyResult:
    """Penalized SDR for ``max_S min_p tr(A_p S)`` over the restricted arc.

    ``eta0`` defaults to 1e-3 times the smallest co-phasing bound among the
    quadratics and ``eps`` to ``1e-6 N^2``. Raises :class:`InfeasibleError`
    if a relaxation is reported infeasible.
    """
    if not quadratics:
        raise ValueError("need at least one quadratic")
    n = quadratics[0].dim
    trace = PenaltyTrace()
    arcs = arc_constraint_rows(omega_max, n)
    if omega_max <= _OMEGA_TOL:
        S = np.ones((n, n), dtype=complex)
        trace.converged = True
        return PenaltyResult(S, min_trace(quadratics, S), trace)

    bounds = np.array([qd.cophasing_bound() for qd in quadratics])
    scale = float(bounds.max())
    if scale == 0:
        S = np.ones((n, n), dtype=complex)
        trace.converged = True
        return PenaltyResult(S, 0.0, trace)
    eps = 1e-6 * n * n if eps is None else eps
    if eta0 is None:
        positive = bounds[bounds > 0]
        eta0 = 1e-3 * positive.min()
    eta_scaled = eta0 / scale

    rows = [conic.LinearConstraint(qd.factor / math.sqrt(scale), None, 0.0, ">=", 1.0)
            for qd in quadratics]
    rows += arcs.constraints()

    rng = np.random.default_rng(init_seed)
    s0 = np.exp(1j * omega_max * rng.random(n))
    state = PenaltyState(eta_scaled, np.outer(s0, s0.conj()))
    S = state.S_prev
    for i in range(1, i_max + 1):
        lam = _principal(state.S_prev)
        problem = conic.SdpProblem(state.eta * np.outer(lam, lam.conj()), rows, alpha_weight=1.0)
        sol = conic.solve(problem, tol=tol)
        if sol.status is conic.SolveStatus.INFEASIBLE:
            raise InfeasibleError(f"relaxation infeasible at omega_max={omega_max:.6g}, iteration {i}")
        S = sol.S
        step = float(np.linalg.norm(S - state.S_prev) ** 2)
        trace.steps.append(PenaltyStep(i, min_trace(quadratics, S), rank_residual(S), step,
                                       state.eta * scale, sol.status.value, sol.iterations))
        state.advance(S)
        if step < eps:
            trace.converged = True
            break
    if not trace.converged:
        log.info("penalty loop hit i_max=%d at omega_max=%.4g", i_max, omega_max)
    return PenaltyResult(S, min_trace(quadratics, S), trace)


def clamp_to_arc(phases: np.ndarray, omega_max: float) -> np.ndarray:
    """Map phases in ``[0, 2 pi)`` to the nearest point of the arc ``[0, omega_max]``."""
    phases = np.mod(phases, TWO_PI)
    if omega_max >= TWO_PI - _OMEGA_TOL:
        return phases
    outside = phases > omega_max
    to_top = phases - omega_max
    to_zero = TWO_PI - phases
    return np.where(outside, np.where(to_top <= to_zero, omega_max, 0.0), phases)


def extract_phase_vector(S: np.ndarray, omega_max: float, quadratics: Sequence[SnrQuadratic],
                         grid: int = 360) -> tuple[ReflectionConfig, float]:
    """Best rotated-and-clamped phase pattern of the principal eigenvector of ``S``.

    Candidate rotations are a uniform grid of ``grid`` angles plus, for every
    element, the rotation that puts that element at phase 0.
    """
    amplitude = quadratics[0].amplitude
    n = S.shape[0]
    if omega_max <= _OMEGA_TOL:
        zero = np.zeros(n)
        cfg = ReflectionConfig(zero, amplitude, 0.0)
        return cfg, min(float(qd.value(np.ones(n))) for qd in quadratics)
    base = np.angle(_principal(S))
    thetas = np.concatenate([TWO_PI * np.arange(grid) / grid, -base])
    cand = clamp_to_arc(base[None, :] + thetas[:, None], omega_max)
    s = np.exp(1j * cand)
    worst = np.min([qd.value(s) for qd in quadratics], axis=0)
    best = int(np.argmax(worst))
    cfg = ReflectionConfig(cand[best], amplitude, min(omega_max, TWO_PI))
    return cfg, float(worst[best])
