"""
Performance functionals of a beamformer pair.

All functions take the channels from a :class:`~cfjsac.scenario.Scenario`
and divide by the configured noise powers explicitly.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .exceptions import DegenerateSensingError, DimensionError
from .scenario import Scenario

TAU_FEAS = 1e-9


@dataclass(frozen=True)
class BeamformerPair:
    w1: np.ndarray
    w2: np.ndarray

    def __post_init__(self):
        w1 = linalg.as_vector(self.w1)
        w2 = linalg.as_vector(self.w2)
        if w1.shape != w2.shape:
            raise DimensionError(f"w1 and w2 lengths differ: {w1.size} vs {w2.size}")
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)

    @classmethod
    def from_stacked(cls, w) -> "BeamformerPair":
        w = linalg.as_vector(w)
        if w.size % 2:
            raise DimensionError("stacked beamformer must have even length")
        n = w.size // 2
        return cls(w[:n], w[n:])

    @property
    def stacked(self) -> np.ndarray:
        return np.concatenate([self.w1, self.w2])

    @property
    def powers(self) -> tuple[float, float]:
        return (float(np.real(np.vdot(self.w1, self.w1))),
                float(np.real(np.vdot(self.w2, self.w2))))

    def is_feasible(self, caps=(1.0, 1.0), tol: float = TAU_FEAS) -> bool:
        p1, p2 = self.powers
        return p1 <= caps[0] + tol and p2 <= caps[1] + tol

    def scaled(self, c: complex) -> "BeamformerPair":
        return BeamformerPair(c * self.w1, c * self.w2)


def _check(s: Scenario, b: BeamformerPair):
    if b.w1.size != s.n:
        raise DimensionError(f"beamformer length {b.w1.size} does not match N={s.n}")


def comm_amplitude(s: Scenario, b: BeamformerPair) -> complex:
    """Received UE amplitude ``h1^H w1 + h2^H w2``."""
    _check(s, b)
    return complex(np.vdot(s.h1, b.w1) + np.vdot(s.h2, b.w2))


def sensing_amplitude(s: Scenario, b: BeamformerPair) -> complex:
    """Target illumination ``g1^H w1 + g2^H w2``."""
    _check(s, b)
    return complex(np.vdot(s.g1, b.w1) + np.vdot(s.g2, b.w2))


def snr_comm(s: Scenario, b: BeamformerPair) -> float:
    return abs(comm_amplitude(s, b)) ** 2 / s.config.sigma1_sq


def sensing_rx_beamformer(s: Scenario, b: BeamformerPair) -> np.ndarray:
    """
    Unit-norm receive combiner at AP2 aligned with the reflected signal.

    Returns ``g2 * conj(g1^H w1 + g2^H w2)`` normalized to unit norm.

    Raises
    ------
    DegenerateSensingError
        If the illumination amplitude or ``g2`` is zero.
    """
    a = sensing_amplitude(s, b)
    v = s.g2 * np.conj(a)
    nv = np.linalg.norm(v)
    if a == 0 or nv == 0:
        raise DegenerateSensingError("sensing receive beamformer undefined "
                                     "(zero illumination or zero g2)")
    return v / nv


def snr_sense(s: Scenario, b: BeamformerPair) -> float:
    """``||g2||^2 |g1^H w1 + g2^H w2|^2 / sigma2^2``; zero when nothing is illuminated."""
    g2_sq = float(np.real(np.vdot(s.g2, s.g2)))
    return g2_sq * abs(sensing_amplitude(s, b)) ** 2 / s.config.sigma2_sq


def objective(s: Scenario, b: BeamformerPair) -> float:
    alpha = s.config.alpha
    return alpha * snr_comm(s, b) + (1.0 - alpha) * snr_sense(s, b)


@dataclass(frozen=True)
class MultiUserLayout:
    """
    K users served jointly by both APs while one target is sensed.

    Parameters
    ----------
    h1, h2 : sequence of K vectors
        Channels from AP1 and AP2 to each user.
    w1, w2 : sequence of K vectors
        Per-user beamformers at AP1 and AP2.
    g1, g2 : vector
        Target channels from AP1 and AP2.
    sigma1_sq, sigma2_sq : float
        Noise powers at the users and at the sensing receiver.
    """

    h1: Sequence[np.ndarray]
    h2: Sequence[np.ndarray]
    w1: Sequence[np.ndarray]
    w2: Sequence[np.ndarray]
    g1: np.ndarray
    g2: np.ndarray
    sigma1_sq: float = 1.0
    sigma2_sq: float = 1.0

    def __post_init__(self):
        k = len(self.h1)
        if k < 1:
            raise DimensionError("need at least one user")
        if not len(self.h2) == len(self.w1) == len(self.w2) == k:
            raise DimensionError("per-user sequences must all have length K")
        g1 = linalg.as_vector(self.g1)
        n = g1.size
        for name in ("h1", "h2", "w1", "w2"):
            vecs = tuple(linalg.as_vector(v) for v in getattr(self, name))
            if any(v.size != n for v in vecs):
                raise DimensionError(f"all {name} vectors must have length {n}")
            object.__setattr__(self, name, vecs)
        g2 = linalg.as_vector(self.g2)
        if g2.size != n:
            raise DimensionError(f"g2 must have length {n}")
        object.__setattr__(self, "g1", g1)
        object.__setattr__(self, "g2", g2)

    @property
    def n_users(self) -> int:
        return len(self.h1)

    def _amplitude(self, k: int) -> complex:
        return complex(np.vdot(self.h1[k], self.w1[k]) + np.vdot(self.h2[k], self.w2[k]))


def multiuser_sinr_comm(m: MultiUserLayout, k: int) -> float:
    """SINR at user `k` (0-based), treating the other users' streams as interference."""
    if not 0 <= k < m.n_users:
        raise IndexError(f"user index {k} out of range for K={m.n_users}")
    interference = sum(abs(m._amplitude(l)) ** 2 for l in range(m.n_users) if l != k)
    return abs(m._amplitude(k)) ** 2 / (m.sigma1_sq + interference)


def multiuser_snr_sense(m: MultiUserLayout) -> float:
    total = sum(np.vdot(m.g1, m.w1[k]) + np.vdot(m.g2, m.w2[k]) for k in range(m.n_users))
    g2_sq = float(np.real(np.vdot(m.g2, m.g2)))
    return g2_sq * abs(total) ** 2 / m.sigma2_sq
