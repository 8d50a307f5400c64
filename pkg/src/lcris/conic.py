"""Unit-diagonal Hermitian semidefinite programs and an interior-point solver.

Problems have the form::

    maximize    Re tr(C S) + w * alpha
    subject to  Re sum_k w_k^H S u_k - a * alpha  (<= | >=)  b    (each constraint)
                diag(S) = d,  S PSD,  alpha >= 0

Every constraint functional is given through factor columns ``(u_k, w_k)``,
which keeps the Schur complement of the Newton system at O(N R^2) for R total
factor columns instead of one dense N x N matrix per constraint. Real
symmetric data is solved in real arithmetic; Hermitian data natively in
complex arithmetic.

The solver is a Mehrotra predictor-corrector primal-dual path-following
method with the HKM search direction and an infeasible start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import linalg


class SolveStatus(str, Enum):
    OPTIMAL = "Optimal"
    MAX_ITER = "MaxIter"
    INFEASIBLE = "Infeasible"


def _cols(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    return a.reshape(-1, 1) if a.ndim == 1 else a


@dataclass(frozen=True)
class LinearConstraint:
    """``Re sum_k w_k^H S u_k - alpha_coef * alpha  (sense)  bound``.

    ``w=None`` means ``w = u``, i.e. the functional ``tr(U U^H S)`` of a PSD
    matrix given by its factor.
    """

    u: np.ndarray
    w: Optional[np.ndarray] = None
    bound: float = 0.0
    sense: str = "<="
    alpha_coef: float = 0.0

    def __post_init__(self):
        if self.sense not in ("<=", ">="):
            raise ValueError(f"sense must be '<=' or '>=', got {self.sense!r}")
        u = _cols(self.u)
        object.__setattr__(self, "u", u)
        if self.w is not None:
            w = _cols(self.w)
            if w.shape != u.shape:
                raise ValueError(f"factor shapes differ: {u.shape} vs {w.shape}")
            object.__setattr__(self, "w", w)

    @property
    def symmetric(self) -> bool:
        return self.w is None

    def value(self, S: np.ndarray) -> float:
        w = self.u if self.w is None else self.w
        return float(np.real(np.sum(w.conj() * (S @ self.u))))

    def matrix(self) -> np.ndarray:
        """Dense Hermitian F with ``value(S) = Re tr(F S)``."""
        if self.w is None:
            return self.u @ self.u.conj().T
        G = self.u @ self.w.conj().T
        return (G + G.conj().T) / 2

    def violation(self, S: np.ndarray, alpha: float = 0.0) -> float:
        lhs = self.value(S) - self.alpha_coef * alpha
        return max(0.0, lhs - self.bound) if self.sense == "<=" else max(0.0, self.bound - lhs)


@dataclass
class SdpProblem:
    objective: np.ndarray
    constraints: list[LinearConstraint] = field(default_factory=list)
    alpha_weight: float = 0.0
    diag: Optional[np.ndarray] = None

    def __post_init__(self):
        C = np.asarray(self.objective)
        if C.ndim != 2 or C.shape[0] != C.shape[1]:
            raise ValueError(f"objective must be square, got {C.shape}")
        if not np.allclose(C, C.conj().T, atol=1e-12 * (1 + np.abs(C).max())):
            raise ValueError("objective must be Hermitian")
        self.objective = (C + C.conj().T) / 2
        n = C.shape[0]
        self.diag = np.ones(n) if self.diag is None else np.asarray(self.diag, dtype=float)
        if self.diag.shape != (n,):
            raise ValueError(f"diag must have length {n}")
        for c in self.constraints:
            if c.u.shape[0] != n:
                raise ValueError(f"constraint factor has {c.u.shape[0]} rows, problem dim is {n}")

    @property
    def dim(self) -> int:
        return self.objective.shape[0]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.objective) or any(
            np.iscomplexobj(c.u) or (c.w is not None and np.iscomplexobj(c.w)) for c in self.constraints
        )

    @property
    def has_alpha(self) -> bool:
        return self.alpha_weight != 0 or any(c.alpha_coef != 0 for c in self.constraints)

    def value(self, S: np.ndarray, alpha: float = 0.0) -> float:
        return float(np.real(np.sum(self.objective.conj() * S))) + self.alpha_weight * alpha

    def max_violation(self, S: np.ndarray, alpha: float = 0.0) -> float:
        worst = float(np.max(np.abs(np.real(np.diag(S)) - self.diag)))
        for c in self.constraints:
            worst = max(worst, c.violation(S, alpha))
        return worst

    def dump(self, path) -> None:
        """Write the problem as plain text.

        Layout: a header line ``sdp <dim> <n_constraints> <alpha_weight>``,
        then ``diag`` and ``objective`` blocks, then one block per constraint
        headed ``constraint <sense> <bound> <alpha_coef> <symmetric>`` followed
        by the real and imaginary parts of ``u`` (and ``w`` if not symmetric).
        Matrices are written row by row with ``%.17g``.
        """

        def block(fh, name, a):
            a = np.atleast_2d(a)
            fh.write(f"{name} {a.shape[0]} {a.shape[1]}\n")
            np.savetxt(fh, np.real(a), fmt="%.17g")
            fh.write(f"{name}_imag {a.shape[0]} {a.shape[1]}\n")
            np.savetxt(fh, np.imag(a), fmt="%.17g")

        with Path(path).open("w") as fh:
            fh.write(f"sdp {self.dim} {len(self.constraints)} {self.alpha_weight!r}\n")
            block(fh, "diag", self.diag[None, :])
            block(fh, "objective", self.objective)
            for c in self.constraints:
                fh.write(f"constraint {c.sense} {c.bound!r} {c.alpha_coef!r} {int(c.symmetric)}\n")
                block(fh, "u", c.u)
                if c.w is not None:
                    block(fh, "w", c.w)

    @classmethod
    def load(cls, path) -> "SdpProblem":
        """Read a problem written by :meth:`dump`."""
        lines = iter(Path(path).read_text().splitlines())

        def block(name):
            re_part, im_part = [], []
            for part in (re_part, im_part):
                tag, r, c = next(lines).split()
                if not tag.startswith(name):
                    raise ValueError(f"expected block {name!r}, got {tag!r}")
                part.extend(np.array(next(lines).split(), dtype=float) for _ in range(int(r)))
            a = np.array(re_part) + 1j * np.array(im_part)
            return a if np.any(a.imag) else a.real

        _, _, m, aw = next(lines).split()
        diag = block("diag")[0].real
        C = block("objective")
        cons = []
        for _ in range(int(m)):
            _, sense, bound, acoef, sym = next(lines).split()
            u = block("u")
            w = None if int(sym) else block("w")
            cons.append(LinearConstraint(u, w, float(bound), sense, float(acoef)))
        return cls(C, cons, float(aw), diag)


@dataclass
class SdpSolution:
    S: np.ndarray
    alpha: float
    status: SolveStatus
    primal_residual: float
    iterations: int
    objective: float = math.nan
    dual_objective: float = math.nan
    gap: float = math.nan

    @property
    def optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


def real_embedding(problem: SdpProblem) -> SdpProblem:
    """Equivalent real symmetric problem of twice the dimension.

    ``S`` maps to ``[[Re S, -Im S], [Im S, Re S]]``; each functional is
    averaged with its image under the rotation ``J`` so that the optimum can
    always be taken in the embedded form. Optimal values coincide.
    """
    n = problem.dim

    def emb(v):
        return np.vstack([v.real, v.imag])

    def rot(v):  # embedding of -j v
        return np.vstack([v.imag, -v.real])

    C = problem.objective
    C_r = 0.5 * np.block([[C.real, -C.imag], [C.imag, C.real]])
    constraints = []
    for c in problem.constraints:
        if c.w is None:
            u = np.hstack([emb(c.u), rot(c.u)]) / math.sqrt(2)
            constraints.append(LinearConstraint(u, None, c.bound, c.sense, c.alpha_coef))
        else:
            u = np.hstack([emb(c.u), rot(c.u)]) / 2
            w = np.hstack([emb(c.w), rot(c.w)])
            constraints.append(LinearConstraint(u, w, c.bound, c.sense, c.alpha_coef))
    diag = np.concatenate([problem.diag, problem.diag])
    if n and not np.iscomplexobj(C_r):
        C_r = C_r.real
    return SdpProblem(C_r, constraints, problem.alpha_weight, diag)


def embed_matrix(S: np.ndarray) -> np.ndarray:
    return np.block([[S.real, -S.imag], [S.imag, S.real]])


class _StandardForm:
    """min <Cm, S> + c.x  s.t.  A(S) + B x = b,  S PSD,  x >= 0 (scaled data)."""

    def __init__(self, problem: SdpProblem):
        self.problem = problem
        n = problem.dim
        cons = problem.constraints
        self.n = n
        self.q = len(cons)
        self.has_alpha = problem.has_alpha
        dtype = complex if problem.is_complex else float
        self.dtype = dtype

        # row scaling by the Frobenius norm of each functional
        row_scale = np.ones(self.q)
        for j, c in enumerate(cons):
            row_scale[j] = max(np.linalg.norm(c.matrix()), abs(c.alpha_coef), 1e-300)
        self.row_scale = row_scale

        xs, ys, gs, owner = [], [], [], []
        for j, c in enumerate(cons):
            s = row_scale[j]
            if c.w is None:
                xs.append(c.u / math.sqrt(s))
                ys.append(c.u / math.sqrt(s))
                gs.append(np.ones(c.u.shape[1]))
                owner.extend([j] * c.u.shape[1])
            else:
                xs.append(np.hstack([c.u, c.w]) / math.sqrt(s))
                ys.append(np.hstack([c.w, c.u]) / math.sqrt(s))
                gs.append(np.full(2 * c.u.shape[1], 0.5))
                owner.extend([j] * (2 * c.u.shape[1]))
        if cons:
            self.X = np.hstack(xs).astype(dtype)
            self.Y = np.hstack(ys).astype(dtype)
            self.g = np.concatenate(gs)
        else:
            self.X = np.zeros((n, 0), dtype)
            self.Y = np.zeros((n, 0), dtype)
            self.g = np.zeros(0)
        owner = np.asarray(owner, dtype=int)
        self.E = np.zeros((self.q, len(owner)))
        self.E[owner, np.arange(len(owner))] = 1.0
        self.gg = np.outer(self.g, self.g)

        self.m = n + self.q
        self.nl = int(self.has_alpha) + self.q
        B = np.zeros((self.m, self.nl))
        off = int(self.has_alpha)
        for j, c in enumerate(cons):
            if self.has_alpha:
                B[n + j, 0] = -c.alpha_coef / row_scale[j]
            B[n + j, off + j] = -1.0 if c.sense == ">=" else 1.0
        self.B = B
        self.b = np.concatenate([problem.diag, [c.bound / row_scale[j] for j, c in enumerate(cons)]])

        self.obj_scale = max(np.linalg.norm(problem.objective), abs(problem.alpha_weight), 1e-300)
        self.C = (-problem.objective / self.obj_scale).astype(dtype)
        self.c = np.zeros(self.nl)
        if self.has_alpha:
            self.c[0] = -problem.alpha_weight / self.obj_scale

    def A(self, M: np.ndarray) -> np.ndarray:
        out = np.empty(self.m)
        out[: self.n] = np.real(np.diag(M))
        if self.q:
            colvals = np.real(np.sum(self.Y.conj() * (M @ self.X), axis=0))
            out[self.n:] = self.E @ (self.g * colvals)
        return out

    def At(self, y: np.ndarray) -> np.ndarray:
        M = np.diag(y[: self.n]).astype(self.dtype)
        if self.q:
            d = self.g * (self.E.T @ y[self.n:])
            M = M + (self.X * d) @ self.Y.conj().T
        return (M + M.conj().T) / 2

    def schur(self, S: np.ndarray, Zinv: np.ndarray) -> np.ndarray:
        n = self.n
        M = np.empty((self.m, self.m))
        M[:n, :n] = np.real(S * Zinv.T)
        if self.q:
            SX = S @ self.X
            YZ = self.Y.conj().T @ Zinv
            T = np.real(SX * YZ.T) * self.g
            cross = T @ self.E.T
            M[:n, n:] = cross
            M[n:, :n] = cross.T
            Q1 = self.Y.conj().T @ SX
            Q2 = YZ @ self.X
            K = np.real(Q1 * Q2.T) * self.gg
            M[n:, n:] = self.E @ K @ self.E.T
        return (M + M.T) / 2


def _re_inner(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.real(np.vdot(a, b)))


def _psd_step(S: np.ndarray, dS: np.ndarray) -> float:
    """Largest t with S + t dS PSD (inf if unbounded)."""
    try:
        L = np.linalg.cholesky(S)
        T = linalg.solve_triangular(L, dS, lower=True)
        W = linalg.solve_triangular(L, T.conj().T, lower=True)
        lam = np.linalg.eigvalsh((W + W.conj().T) / 2)[0]
    except np.linalg.LinAlgError:
        lam = linalg.eigh(dS, S, eigvals_only=True)[0]
    return math.inf if lam >= 0 else -1.0 / lam


def _lin_step(x: np.ndarray, dx: np.ndarray) -> float:
    neg = dx < 0
    return float(np.min(-x[neg] / dx[neg])) if np.any(neg) else math.inf


def _factor(M: np.ndarray):
    reg = 0.0
    scale = max(np.max(np.abs(np.diag(M))), 1e-300)
    for _ in range(8):
        try:
            return linalg.cho_factor(M + reg * np.eye(len(M)), lower=True, check_finite=False)
        except linalg.LinAlgError:
            reg = scale * 1e-14 if reg == 0 else reg * 100
    raise np.linalg.LinAlgError("Schur complement not positive definite")


def solve(problem: SdpProblem, tol: float = 1e-7, max_iter: int = 100) -> SdpSolution:
    """Solve ``problem`` to relative residual and gap ``tol``.

    Returns the final iterate. ``Infeasible`` is reported when the primal
    residual fails to vanish while the dual objective diverges, or when the
    iteration stalls with a large primal residual.
    """
    n = problem.dim
    sf = _StandardForm(problem)
    dtype = sf.dtype
    nu = n + sf.nl

    S = np.eye(n, dtype=dtype) * max(1.0, float(np.max(problem.diag)))
    Z = np.eye(n, dtype=dtype) * max(1.0, math.sqrt(n))
    x = np.ones(sf.nl)
    z = np.ones(sf.nl)
    y = np.zeros(sf.m)

    norm_b = np.linalg.norm(sf.b)
    norm_c = np.linalg.norm(sf.C) + np.linalg.norm(sf.c)
    status = SolveStatus.MAX_ITER
    relp = math.inf
    it = 0
    stall = 0
    pobj = dobj = math.nan
    for it in range(1, max_iter + 1):
        Rp = sf.b - sf.A(S) - sf.B @ x
        Rd = sf.C - sf.At(y) - Z
        rd = sf.c - sf.B.T @ y - z
        pobj = _re_inner(sf.C, S) + sf.c @ x
        dobj = float(sf.b @ y)
        relp = np.linalg.norm(Rp) / (1 + norm_b)
        reld = math.sqrt(np.linalg.norm(Rd) ** 2 + np.linalg.norm(rd) ** 2) / (1 + norm_c)
        gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        if relp <= tol and reld <= tol and gap <= tol:
            status = SolveStatus.OPTIMAL
            break
        if dobj > 1e8 * (1 + abs(pobj)) and relp > math.sqrt(tol):
            status = SolveStatus.INFEASIBLE
            break
        mu = (_re_inner(S, Z) + x @ z) / nu

        try:
            Lz = linalg.cho_factor(Z, lower=True)
            Zinv = linalg.cho_solve(Lz, np.eye(n, dtype=dtype))
            Zinv = (Zinv + Zinv.conj().T) / 2
            cho = _factor(sf.schur(S, Zinv) + (sf.B * (x / z)) @ sf.B.T)
        except (np.linalg.LinAlgError, linalg.LinAlgError):
            break
        D = x / z
        SRdZ = S @ Rd @ Zinv
        base_rhs = Rp + sf.A(SRdZ) + sf.B @ (D * rd)

        def direction(tau, corr_S=None, corr_x=None):
            Rc = tau * Zinv - S
            rx = tau / z - x
            if corr_S is not None:
                Rc = Rc - corr_S
                rx = rx - corr_x
            rhs = base_rhs - sf.A(Rc) - sf.B @ rx
            dy = linalg.cho_solve(cho, rhs)
            dZ = Rd - sf.At(dy)
            dS = Rc - S @ dZ @ Zinv
            dS = (dS + dS.conj().T) / 2
            dz = rd - sf.B.T @ dy
            dx = rx - D * dz
            return dS, dy, dZ, dx, dz

        dS, dy, dZ, dx, dz = direction(0.0)
        ap = min(1.0, _psd_step(S, dS), _lin_step(x, dx))
        ad = min(1.0, _psd_step(Z, dZ), _lin_step(z, dz))
        mu_aff = (_re_inner(S + ap * dS, Z + ad * dZ) + (x + ap * dx) @ (z + ad * dz)) / nu
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3

        dS, dy, dZ, dx, dz = direction(sigma * mu, dS @ dZ @ Zinv, dx * dz / z)
        gamma = 0.9 + 0.09 * min(ap, ad)
        ap = min(1.0, gamma * _psd_step(S, dS), gamma * _lin_step(x, dx))
        ad = min(1.0, gamma * _psd_step(Z, dZ), gamma * _lin_step(z, dz))
        if max(ap, ad) < 1e-10:
            stall += 1
            if stall >= 3:
                break
        S = S + ap * dS
        S = (S + S.conj().T) / 2
        x = x + ap * dx
        y = y + ad * dy
        Z = Z + ad * dZ
        Z = (Z + Z.conj().T) / 2
        z = z + ad * dz

    if status is SolveStatus.MAX_ITER and relp > max(1e-3, math.sqrt(tol)):
        status = SolveStatus.INFEASIBLE
    alpha = float(x[0]) if sf.has_alpha else 0.0
    return SdpSolution(
        S=S,
        alpha=alpha,
        status=status,
        primal_residual=problem.max_violation(S, alpha),
        iterations=it,
        objective=problem.value(S, alpha),
        dual_objective=-dobj * sf.obj_scale,
        gap=abs(pobj - dobj) * sf.obj_scale,
    )
