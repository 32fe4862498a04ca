"""
Relaxed SDP for the two-AP beamforming problem, solved through its dual.

The primal relaxation is

    maximize    trace(M W)
    subject to  trace(B1 W) <= p1,  trace(B2 W) <= p2,  W >= 0

and its dual is the two-variable program

    minimize    p1 y1 + p2 y2
    subject to  Z(y) = y1 B1 + y2 B2 - M >= 0,  y >= 0.

`solve_dual` bisects on the dual level ``t = p1 y1 + p2 y2``. Each level
line is parameterized by ``u`` in [0, 1] with ``p1 y1 = u t`` and
``p2 y2 = (1 - u) t``; ``min_eig(Z)`` is concave along the line, so a
golden-section search decides feasibility of the level. The search stops
early on a feasible point, or once the supergradient bound proves that the
level is infeasible.

`recover_primal` builds the rank-one primal ``W = w w^H`` from the null
space of the optimal ``Z``, then certifies duality gap, complementary
slackness and numerical rank.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .exceptions import (CertificateViolation, DegenerateInstanceError,
                         SolverFailure)
from .metrics import BeamformerPair
from .scenario import StackedProblem

TAU_DUAL = 1e-9
TAU_NULL = 1e-7
TAU_RANK = 1e-6
TAU_GAP = 1e-7
TAU_COMP = 1e-7
TAU_FEAS = 1e-9
TAU_LINE = 1e-15

# sum of squared ranks is bounded by the number of trace constraints
N_CONSTRAINTS = 2
N_VARIABLES = 1

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class DualPoint:
    y1: float
    y2: float
    Z: np.ndarray
    value: float
    min_eig: float
    bisection_steps: int = 0
    eig_evaluations: int = 0

    def is_feasible(self, tol: float = linalg.TAU_PSD) -> bool:
        scale = max(linalg.op_norm(self.Z), 1e-300)
        return self.y1 >= 0 and self.y2 >= 0 and self.min_eig >= -tol * scale


@dataclass(frozen=True)
class RankCertificate:
    """Leading eigenvalues of ``W*`` and the declared numerical rank.

    `ratio` is an upper bound on ``lambda2 / lambda1``: the measured
    ``|lambda2|`` plus the eigensolver rounding floor ``n * eps * ||W||``.
    """

    lambda1: float
    lambda2: float
    ratio: float
    rank: int
    tau_rank: float

    def as_dict(self) -> dict:
        return {"lambda1": self.lambda1, "lambda2": self.lambda2,
                "ratio": self.ratio, "rank": self.rank, "tau_rank": self.tau_rank}


@dataclass(frozen=True)
class SdpSolution:
    W_star: np.ndarray
    w_star: BeamformerPair
    primal_value: float
    dual_value: float
    gap: float
    rank_certificate: RankCertificate
    complementarity_residual: float
    dual: DualPoint
    null_dim: int
    polish_iterations: int = 0
    block_traces: tuple = field(default=(0.0, 0.0))

    def diagnostics(self) -> dict:
        """Solver record suitable for JSON emission."""
        return {
            "y1": self.dual.y1,
            "y2": self.dual.y2,
            "primal_value": self.primal_value,
            "dual_value": self.dual_value,
            "gap": self.gap,
            "complementarity_residual": self.complementarity_residual,
            "block_traces": list(self.block_traces),
            "null_dim": self.null_dim,
            "rank_certificate": self.rank_certificate.as_dict(),
            "bisection_steps": self.dual.bisection_steps,
            "eig_evaluations": self.dual.eig_evaluations,
            "polish_iterations": self.polish_iterations,
        }

    def to_json(self) -> str:
        return json.dumps(self.diagnostics(), indent=2, sort_keys=True)


def dual_slack(p: StackedProblem, y1: float, y2: float) -> np.ndarray:
    """``Z(y) = y1 B1 + y2 B2 - M``."""
    return np.diag(np.repeat([y1, y2], p.n).astype(complex)) - p.M


def _level_point(p: StackedProblem, t: float, u: float) -> tuple[float, float]:
    p1, p2 = p.caps
    return u * t / p1, (1.0 - u) * t / p2


class _LevelOracle:
    """min_eig(Z) and its supergradient along level lines of the dual objective."""

    def __init__(self, p: StackedProblem):
        self.p = p
        self.n = p.n
        self.neg_M = -np.asarray(p.M)
        self.evals = 0

    def __call__(self, t: float, u: float) -> tuple[float, float]:
        y1, y2 = _level_point(self.p, t, u)
        Z = self.neg_M.copy()
        idx = np.arange(2 * self.n)
        Z[idx, idx] += np.repeat([y1, y2], self.n)
        w, V = np.linalg.eigh(Z)
        self.evals += 1
        v = V[:, 0]
        mass = np.abs(v) ** 2
        p1, p2 = self.p.caps
        slope = t * (mass[: self.n].sum() / p1 - mass[self.n:].sum() / p2)
        return float(w[0]), float(slope)


def _upper_bound(points) -> float:
    """Maximum over [0, 1] of the two tightest supergradient lines."""
    left = [q for q in points if q[2] >= 0]
    right = [q for q in points if q[2] <= 0]
    if not right:
        return min(f + s * (1.0 - u) for u, f, s in left)
    if not left:
        return min(f - s * u for u, f, s in right)
    ul, fl, sl = max(left, key=lambda q: q[0])
    ur, fr, sr = min(right, key=lambda q: q[0])
    if sl == sr:
        # both slopes are zero: each point attains the maximum
        return max(fl, fr)
    x = (fr - fl + sl * ul - sr * ur) / (sl - sr)
    x = min(max(x, 0.0), 1.0)
    return min(fl + sl * (x - ul), fr + sr * (x - ur))


def _search_level(oracle: _LevelOracle, t: float, tol: float = TAU_LINE):
    """Golden-section search for a feasible point on the level line ``t``.

    Returns ``(u, min_eig)`` of the first feasible point, or ``None`` when
    the level is infeasible (certified by concavity, or unresolved at the
    resolution floor).
    """
    points = []
    for u in (0.0, 1.0):
        f, s = oracle(t, u)
        if f >= 0:
            return u, f
        points.append((u, f, s))
    a, b = 0.0, 1.0
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, sc = oracle(t, c)
    if fc >= 0:
        return c, fc
    fd, sd = oracle(t, d)
    if fd >= 0:
        return d, fd
    points += [(c, fc, sc), (d, fd, sd)]
    while b - a > tol:
        if _upper_bound(points) < 0:
            return None
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc, sc = oracle(t, c)
            if fc >= 0:
                return c, fc
            points.append((c, fc, sc))
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd, sd = oracle(t, d)
            if fd >= 0:
                return d, fd
            points.append((d, fd, sd))
    return None


def _block_normalize(p: StackedProblem, w: np.ndarray, fill=None) -> np.ndarray:
    """Scale each block of `w` to its power cap; empty blocks take `fill`."""
    out = np.array(w, dtype=complex)
    scale = max(np.linalg.norm(w), 1e-300)
    for i, cap in enumerate(p.caps):
        sl = slice(0, p.n) if i == 0 else slice(p.n, 2 * p.n)
        nb = np.linalg.norm(out[sl])
        if nb <= 1e-12 * scale:
            e = np.zeros(p.n, dtype=complex)
            e[0] = 1.0
            out[sl] = e if fill is None or fill[i] is None else fill[i]
            nb = np.linalg.norm(out[sl])
        out[sl] *= math.sqrt(cap) / nb
    return out


def _quadratic(M: np.ndarray, w: np.ndarray) -> float:
    return float(np.real(np.vdot(w, M @ w)))


def _polish(p: StackedProblem, w: np.ndarray, max_iter: int = 2000) -> tuple[np.ndarray, int]:
    """Block-wise ascent ``w_i <- sqrt(p_i) (M w)_i / ||(M w)_i||``.

    Each step maximizes the linearization of the convex objective over the
    power spheres, so the objective never decreases. Fixed points satisfy
    ``Z(y) w = 0`` with ``y_i = w_i^H (M w)_i / p_i``.
    """
    M = np.asarray(p.M)
    f = _quadratic(M, w)
    for it in range(1, max_iter + 1):
        g = M @ w
        gn = np.linalg.norm(g)
        new = w.copy()
        for i, cap in enumerate(p.caps):
            sl = slice(0, p.n) if i == 0 else slice(p.n, 2 * p.n)
            nb = np.linalg.norm(g[sl])
            if nb > 1e-13 * gn:
                new[sl] = math.sqrt(cap) * g[sl] / nb
        fn = _quadratic(M, new)
        if fn < f:
            return w, it
        step = np.linalg.norm(new - w)
        w, f = new, fn
        if step <= 1e-14 * np.linalg.norm(w):
            return w, it
    return w, max_iter


def _fix_phase(w: np.ndarray) -> np.ndarray:
    """Rotate so that the first non-negligible entry is real positive."""
    mags = np.abs(w)
    k = int(np.argmax(mags > 1e-12 * mags.max()))
    out = w * (np.conj(w[k]) / mags[k])
    out[k] = mags[k]
    return out


def rank_certificate(W, tau_rank: float = TAU_RANK) -> RankCertificate:
    values = linalg.eigh(W).values
    lam1 = float(values[0])
    lam2 = float(values[1]) if values.size > 1 else 0.0
    floor = values.size * np.finfo(float).eps * float(np.max(np.abs(values)))
    ratio = (abs(lam2) + floor) / lam1 if lam1 > 0 else math.inf
    if ratio <= tau_rank:
        rank = 1
    else:
        rank = max(2, int(np.sum(values > tau_rank * max(lam1, 0.0))))
    return RankCertificate(lam1, lam2, float(ratio), rank, tau_rank)


def solve_dual(p: StackedProblem, tau_dual: float = TAU_DUAL) -> DualPoint:
    """
    Minimize ``p1 y1 + p2 y2`` subject to ``y1 B1 + y2 B2 - M >= 0``.

    The returned point is always verified dual-feasible; its value is within
    `tau_dual` (absolute) of the optimum.

    Raises
    ------
    DegenerateInstanceError
        If ``M`` is zero.
    """
    M = linalg.as_hermitian(p.M)
    top = linalg.eigh(M)
    lam_max = float(top.values[0])
    if lam_max <= 0:
        raise DegenerateInstanceError("objective matrix is zero; the optimum is trivially 0")
    p1, p2 = p.caps
    oracle = _LevelOracle(p)

    # y1 = y2 = lambda_max(M) is feasible; any normalized beamformer bounds from below
    hi = (p1 + p2) * lam_max
    u_hi = p1 / (p1 + p2)
    f_hi = oracle(hi, u_hi)[0]
    lo = _quadratic(M, _block_normalize(p, top.vectors[:, 0]))
    steps = 0
    while hi - lo > tau_dual:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        steps += 1
        found = _search_level(oracle, mid)
        if found is None:
            lo = mid
        else:
            hi = mid
            u_hi, f_hi = found
    y1, y2 = _level_point(p, hi, u_hi)
    Z = dual_slack(p, y1, y2)
    return DualPoint(y1, y2, Z, p1 * y1 + p2 * y2, float(f_hi), steps, oracle.evals)


def _two_dim_candidate(p: StackedProblem, U: np.ndarray) -> np.ndarray:
    """Null-space combination whose block powers match the caps' ratio."""
    p1, p2 = p.caps
    U1, U2 = U[: p.n], U[p.n:]
    Q = (U1.conj().T @ U1) / p1 - (U2.conj().T @ U2) / p2
    q, E = np.linalg.eigh(0.5 * (Q + Q.conj().T))
    if q[0] <= 0 <= q[1]:
        x = math.sqrt(q[1]) * E[:, 0] + math.sqrt(-q[0]) * E[:, 1]
    else:
        x = E[:, int(np.argmin(np.abs(q)))]
    return U @ x


def _inactive_fill(p: StackedProblem, Z: np.ndarray, i: int, thr: float) -> np.ndarray:
    """First canonical direction projected onto the block's null space of Z."""
    sl = slice(0, p.n) if i == 0 else slice(p.n, 2 * p.n)
    e, V = np.linalg.eigh(Z[sl, sl])
    null = V[:, e <= thr]
    first = np.zeros(p.n, dtype=complex)
    first[0] = 1.0
    if null.shape[1] == 0:
        return first
    proj = null @ (null.conj().T @ first)
    if np.linalg.norm(proj) <= 1e-8:
        return null[:, 0]
    return proj


def recover_primal(p: StackedProblem, d: DualPoint, tau_null: float = TAU_NULL,
                   tau_rank: float = TAU_RANK) -> SdpSolution:
    """
    Rank-one primal solution from the null space of the dual slack ``Z``.

    A block whose multiplier vanishes carries no objective weight; it is
    filled with a deterministic full-power direction. The candidate is then
    refined by monotone block ascent and its global phase fixed so that the
    first nonzero entry is real positive.

    Raises
    ------
    SolverFailure
        If ``Z`` is not PSD within tolerance or has no null space.
    DegenerateInstanceError
        If the null space has dimension greater than two.
    """
    M = np.asarray(p.M)
    Z = linalg.as_hermitian(d.Z)
    evals, V = np.linalg.eigh(Z)
    m_norm = linalg.op_norm(M)
    scale = max(float(np.max(np.abs(evals))), m_norm)
    if evals[0] < -linalg.TAU_PSD * scale or d.y1 < 0 or d.y2 < 0:
        raise SolverFailure(f"dual point is infeasible (min_eig {evals[0]:.3e})")
    thr = tau_null * scale
    t = d.value
    p1, p2 = p.caps
    active = (d.y1 * p1 > tau_null * t, d.y2 * p2 > tau_null * t)

    if all(active):
        null = V[:, evals <= thr]
        null_dim = null.shape[1]
        if null_dim == 0:
            raise SolverFailure("dual slack has no null space; the dual point is not optimal")
        if null_dim > 2:
            raise DegenerateInstanceError(
                f"dual slack null space has dimension {null_dim} > 2 "
                f"(eigenvalues {np.array2string(evals[:null_dim], precision=3)})")
        candidates = [_block_normalize(p, null[:, 0])]
        if null_dim == 2:
            candidates.append(_block_normalize(p, _two_dim_candidate(p, null)))
    elif any(active):
        j = active.index(True)
        i = 1 - j
        sl = slice(0, p.n) if j == 0 else slice(p.n, 2 * p.n)
        e, U = np.linalg.eigh(Z[sl, sl])
        null_dim = int(np.sum(e <= thr))
        if null_dim == 0:
            raise SolverFailure("active block of the dual slack has no null space")
        w = np.zeros(2 * p.n, dtype=complex)
        w[sl] = U[:, 0]
        fill = [None, None]
        fill[i] = _inactive_fill(p, Z, i, thr)
        candidates = [_block_normalize(p, w, fill)]
    else:
        raise SolverFailure("both dual multipliers vanish at a nonzero optimum")

    w = max(candidates, key=lambda c: _quadratic(M, c))
    w, iters = _polish(p, w)
    w = _fix_phase(w)
    W = linalg.outer(w)
    primal = linalg.trace_product(M, W)
    traces = (float(np.real(np.vdot(w[: p.n], w[: p.n]))),
              float(np.real(np.vdot(w[p.n:], w[p.n:]))))
    return SdpSolution(
        W_star=W,
        w_star=BeamformerPair.from_stacked(w),
        primal_value=primal,
        dual_value=d.value,
        gap=d.value - primal,
        rank_certificate=rank_certificate(W, tau_rank),
        complementarity_residual=linalg.trace_product(W, Z),
        dual=d,
        null_dim=null_dim,
        polish_iterations=iters,
        block_traces=traces,
    )


def verify_rank_bound(sol: SdpSolution, tau_rank: float | None = None) -> RankCertificate:
    """
    Certify that ``W*`` is numerically rank one.

    With one matrix variable and two trace constraints the squared rank of
    some optimal solution is at most 2, hence the rank is 1. The certificate
    is recomputed from ``sol.W_star``.

    Raises
    ------
    CertificateViolation
        If the numerical rank is not one.
    """
    tau = sol.rank_certificate.tau_rank if tau_rank is None else tau_rank
    cert = rank_certificate(sol.W_star, tau)
    bound = math.isqrt(N_CONSTRAINTS // N_VARIABLES)
    if cert.rank > bound:
        raise CertificateViolation(
            f"numerical rank {cert.rank} exceeds the bound {bound} "
            f"(lambda2/lambda1 <= {cert.ratio:.3e}, tau_rank {tau:.1e})")
    return cert


def optimality_failures(sol: SdpSolution, p: StackedProblem) -> list[str]:
    """Names of the optimality certificates that `sol` fails."""
    failed = []
    if not (-TAU_GAP <= sol.gap <= TAU_GAP * max(1.0, sol.dual_value)):
        failed.append("duality_gap")
    if abs(sol.complementarity_residual) > TAU_COMP:
        failed.append("complementarity")
    p1, p2 = p.caps
    t1, t2 = sol.block_traces
    if t1 > p1 + TAU_FEAS or t2 > p2 + TAU_FEAS or linalg.min_eig(sol.W_star) < -linalg.TAU_PSD * max(t1 + t2, 1.0):
        failed.append("feasibility")
    if sol.rank_certificate.rank != 1:
        failed.append("rank")
    return failed


def solve(p: StackedProblem, tau_rank: float = TAU_RANK) -> SdpSolution:
    """Dual solve, rank-one recovery, and rank certificate in one call."""
    sol = recover_primal(p, solve_dual(p), tau_rank=tau_rank)
    verify_rank_bound(sol)
    return sol
