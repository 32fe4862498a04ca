"""
Closed-form benchmark beamformers and a brute-force optimality oracle.

The oracle never touches the stacked objective matrix: it evaluates the
scalarized objective directly from the four channels, so it stays an
independent check of the semidefinite solver.
"""

from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .exceptions import BaselineUndefined
from .metrics import BeamformerPair
from .scenario import Scenario


@dataclass(frozen=True)
class BaselineResult:
    name: str
    pair: BeamformerPair
    snr_c: float
    snr_s: float
    objective: float
    extra: dict = field(default_factory=dict)


def _unit(v: np.ndarray, what: str) -> np.ndarray:
    nv = np.linalg.norm(v)
    if nv == 0:
        raise BaselineUndefined(f"{what} is zero")
    return v / nv


def _result(name: str, s: Scenario, pair: BeamformerPair, **extra) -> BaselineResult:
    return BaselineResult(name, pair, metrics.snr_comm(s, pair), metrics.snr_sense(s, pair),
                          metrics.objective(s, pair), extra)


def mrt_comm(s: Scenario) -> BaselineResult:
    """Maximum ratio transmission towards the UE (the alpha = 1 optimum)."""
    p1, p2 = s.config.caps
    pair = BeamformerPair(np.sqrt(p1) * _unit(s.h1, "h1"), np.sqrt(p2) * _unit(s.h2, "h2"))
    return _result("mrt_comm", s, pair)


def mrt_sense(s: Scenario) -> BaselineResult:
    """Maximum ratio transmission towards the target (the alpha = 0 optimum)."""
    p1, p2 = s.config.caps
    pair = BeamformerPair(np.sqrt(p1) * _unit(s.g1, "g1"), np.sqrt(p2) * _unit(s.g2, "g2"))
    return _result("mrt_sense", s, pair)


def standalone(s: Scenario) -> BaselineResult:
    """
    AP1 serves the UE, AP2 illuminates the target.

    ``snr_c`` and ``snr_s`` follow the task-separated accounting in which
    each AP only counts towards its own task: ``p1 ||h1||^2 / sigma1^2`` and
    ``p2 ||g2||^4 / sigma2^2``. The literal evaluation of the same pair,
    including the cross contributions ``h2^H w2`` and ``g1^H w1``, is kept
    in ``extra["snr_c_literal"]`` and ``extra["snr_s_literal"]``.
    """
    cfg = s.config
    p1, p2 = cfg.caps
    pair = BeamformerPair(np.sqrt(p1) * _unit(s.h1, "h1"), np.sqrt(p2) * _unit(s.g2, "g2"))
    h1_sq = float(np.real(np.vdot(s.h1, s.h1)))
    g2_sq = float(np.real(np.vdot(s.g2, s.g2)))
    snr_c = p1 * h1_sq / cfg.sigma1_sq
    snr_s = p2 * g2_sq**2 / cfg.sigma2_sq
    literal_c = metrics.snr_comm(s, pair)
    literal_s = metrics.snr_sense(s, pair)
    return BaselineResult(
        "standalone", pair, snr_c, snr_s,
        cfg.alpha * snr_c + (1 - cfg.alpha) * snr_s,
        {"snr_c_literal": literal_c, "snr_s_literal": literal_s,
         "objective_literal": metrics.objective(s, pair)},
    )


def _reject(v: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Component of `v` orthogonal to `u`."""
    return v - u * (np.vdot(u, v) / np.vdot(u, u))


def zero_forcing(s: Scenario) -> BaselineResult:
    """Per-AP projections with ``w1 ⟂ h2`` and ``w2 ⟂ h1``."""
    if s.n < 2:
        raise BaselineUndefined("zero forcing needs at least two antennas per AP")
    h1, h2 = s.h1, s.h2
    if not (np.any(h1) and np.any(h2)):
        raise BaselineUndefined("zero forcing needs nonzero h1 and h2")
    scale = np.linalg.norm(h1) * np.linalg.norm(h2)
    if np.linalg.norm(_reject(h1, h2)) * np.linalg.norm(h2) <= 1e-12 * scale:
        raise BaselineUndefined("h1 and h2 are parallel")
    p1, p2 = s.config.caps
    w1 = np.sqrt(p1) * _unit(_reject(h1, h2), "projection of h1")
    w2 = np.sqrt(p2) * _unit(_reject(h2, h1), "projection of h2")
    return _result("zero_forcing", s, BeamformerPair(w1, w2))


def all_baselines(s: Scenario) -> list[BaselineResult]:
    """Every baseline that is defined for `s`, in a fixed order."""
    out = []
    for fn in (mrt_comm, mrt_sense, zero_forcing, standalone):
        try:
            out.append(fn(s))
        except BaselineUndefined:
            continue
    return out


# -- oracle ------------------------------------------------------------------

def _weights(s: Scenario) -> tuple[float, float]:
    cfg = s.config
    g2_sq = float(np.real(np.vdot(s.g2, s.g2)))
    return cfg.alpha / cfg.sigma1_sq, (1 - cfg.alpha) * g2_sq / cfg.sigma2_sq


def _eval_batch(s: Scenario, W1: np.ndarray, W2: np.ndarray) -> np.ndarray:
    """Objective for rows of W1, W2 (shape (R, N))."""
    a, b = _weights(s)
    comm = W1 @ s.h1.conj() + W2 @ s.h2.conj()
    sense = W1 @ s.g1.conj() + W2 @ s.g2.conj()
    return a * np.abs(comm) ** 2 + b * np.abs(sense) ** 2


def _project(W: np.ndarray, cap: float) -> np.ndarray:
    nrm = np.linalg.norm(W, axis=1, keepdims=True)
    nrm[nrm == 0] = 1.0
    return np.sqrt(cap) * W / nrm


def projected_gradient(s: Scenario, restarts: int = 100, iters: int = 200,
                       seed: int = 0) -> tuple[float, BeamformerPair]:
    """Multi-start projected gradient ascent on the two power spheres."""
    rng = np.random.default_rng(seed)
    n = s.n
    p1, p2 = s.config.caps
    a, b = _weights(s)

    def draw(shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    W1 = _project(draw((restarts, n)), p1)
    W2 = _project(draw((restarts, n)), p2)
    f = _eval_batch(s, W1, W2)
    curvature = a * (np.vdot(s.h1, s.h1) + np.vdot(s.h2, s.h2)).real \
        + b * (np.vdot(s.g1, s.g1) + np.vdot(s.g2, s.g2)).real
    step = np.full(restarts, 4.0 / max(curvature, 1e-300))
    for _ in range(iters):
        comm = W1 @ s.h1.conj() + W2 @ s.h2.conj()
        sense = W1 @ s.g1.conj() + W2 @ s.g2.conj()
        # Wirtinger gradient of a|h^H w|^2 + b|g^H w|^2
        G1 = a * comm[:, None] * s.h1 + b * sense[:, None] * s.g1
        G2 = a * comm[:, None] * s.h2 + b * sense[:, None] * s.g2
        N1 = _project(W1 + step[:, None] * G1, p1)
        N2 = _project(W2 + step[:, None] * G2, p2)
        fn = _eval_batch(s, N1, N2)
        ok = fn >= f
        W1[ok], W2[ok], f[ok] = N1[ok], N2[ok], fn[ok]
        step[~ok] *= 0.5
    k = int(np.argmax(f))
    return float(f[k]), BeamformerPair(W1[k], W2[k])


def _span_basis(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of span{x, y}; at least one column."""
    cols = []
    for v in (x, y):
        r = v.astype(complex)
        for c in cols:
            r = r - c * np.vdot(c, r)
        nr = np.linalg.norm(r)
        if nr > 1e-10 * max(np.linalg.norm(x), np.linalg.norm(y), 1e-300):
            cols.append(r / nr)
    if not cols:
        e = np.zeros(x.size, dtype=complex)
        e[0] = 1.0
        cols.append(e)
    return np.column_stack(cols)


def _grid_directions(basis: np.ndarray, resolution: int) -> np.ndarray:
    """Unit vectors ``cos(th) e1 + sin(th) exp(i ph) e2`` over a grid (rows)."""
    if basis.shape[1] == 1:
        return basis.T.copy()
    th = np.linspace(0.0, np.pi / 2, resolution)
    ph = np.linspace(0.0, 2 * np.pi, resolution, endpoint=False)
    T, P = np.meshgrid(th, ph, indexing="ij")
    c = np.cos(T).ravel()[:, None]
    sn = (np.sin(T) * np.exp(1j * P)).ravel()[:, None]
    return c * basis[:, 0] + sn * basis[:, 1]


def subspace_grid(s: Scenario, resolution: int = 200, sweeps: int = 6) -> tuple[float, BeamformerPair]:
    """
    Exhaustive grid search over the per-AP subspaces span{h_i, g_i}.

    Components orthogonal to both channels of an AP change no term of the
    objective, so each block is a unit vector in a 2-D complex subspace,
    parameterized by magnitude split and relative phase. The phase between
    the two blocks is optimized in closed form. The two block grids are
    searched alternately (block-coordinate), from several starting pairs.
    """
    p1, p2 = s.config.caps
    a, b = _weights(s)
    D1 = np.sqrt(p1) * _grid_directions(_span_basis(s.h1, s.g1), resolution)
    D2 = np.sqrt(p2) * _grid_directions(_span_basis(s.h2, s.g2), resolution)
    # received amplitudes per grid point
    A1, S1 = D1 @ s.h1.conj(), D1 @ s.g1.conj()
    A2, S2 = D2 @ s.h2.conj(), D2 @ s.g2.conj()

    def pair_value(a1, s1, a2, s2):
        base = a * (np.abs(a1) ** 2 + np.abs(a2) ** 2) + b * (np.abs(s1) ** 2 + np.abs(s2) ** 2)
        return base + 2 * np.abs(a * np.conj(a1) * a2 + b * np.conj(s1) * s2)

    best, best_pair = -np.inf, None
    starts = {0, len(D2) - 1, len(D2) // 2, len(D2) // 4, 3 * len(D2) // 4}
    for j in sorted(starts):
        i = 0
        for _ in range(sweeps):
            i = int(np.argmax(pair_value(A1, S1, A2[j], S2[j])))
            j = int(np.argmax(pair_value(A1[i], S1[i], A2, S2)))
        val = float(pair_value(A1[i], S1[i], A2[j], S2[j]))
        if val > best:
            cross = a * np.conj(A1[i]) * A2[j] + b * np.conj(S1[i]) * S2[j]
            phase = np.exp(-1j * np.angle(cross)) if cross != 0 else 1.0
            best, best_pair = val, BeamformerPair(D1[i], phase * D2[j])
    return best, best_pair


def oracle(s: Scenario, restarts: int = 100, seed: int = 0, iters: int = 200,
           resolution: int = 200) -> float:
    """Best objective found by gradient multi-start and subspace grid search."""
    if restarts < 1:
        raise ValueError("oracle needs at least one restart")
    v_grad, _ = projected_gradient(s, restarts=restarts, iters=iters, seed=seed)
    v_grid, _ = subspace_grid(s, resolution=resolution)
    return max(v_grad, v_grid)
