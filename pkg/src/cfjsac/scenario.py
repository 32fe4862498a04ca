"""
Problem instances for the two-AP joint sensing and communication model.

A :class:`Scenario` holds the four channel vectors (AP1->UE ``h1``,
AP2->UE ``h2``, AP1->target ``g1``, AP2->target ``g2``) together with its
:class:`ScenarioConfig`. :func:`stack` builds the stacked quantities used by
the relaxed semidefinite program: ``h = (h1, h2)``, ``g = (g1, g2)`` and the
weighted objective matrix

    M = (alpha / sigma1^2) h h^H + ((1 - alpha) ||g2||^2 / sigma2^2) g g^H

so that ``trace(M w w^H)`` equals the scalarized objective of a beamformer
pair ``w = (w1, w2)``.

Channel stream
--------------
Channels are drawn from numpy's Philox4x64-10 bit generator keyed with
``key = (seed, 0)`` and counter zero. Raw 64-bit outputs ``r`` are mapped to
doubles ``u = (r >> 11) * 2**-53`` and consumed in pairs ``(u1, u2)``; each
pair yields one complex entry by Box-Muller,

    z = sqrt(-2 ln(1 - u1)) * exp(2j pi u2) / sqrt(2),

which is circularly-symmetric Gaussian with ``E|z|^2 = 1``. Entries are
consumed in the order h1, h2, g1, g2, each of length N.
"""

import csv
import json
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import linalg
from .exceptions import ConfigError, DimensionError

CSV_COLUMNS = ("h1_re", "h1_im", "h2_re", "h2_im", "g1_re", "g1_im", "g2_re", "g2_im")


@dataclass(frozen=True)
class ScenarioConfig:
    n_antennas: int
    seed: int = 0
    sigma1_sq: float = 1.0
    sigma2_sq: float = 1.0
    p1_max: float = 1.0
    p2_max: float = 1.0
    alpha: float = 0.5

    def __post_init__(self):
        if isinstance(self.n_antennas, bool) or not isinstance(self.n_antennas, (int, np.integer)):
            raise ConfigError("n_antennas must be an integer")
        if self.n_antennas < 1:
            raise ConfigError(f"n_antennas must be >= 1, got {self.n_antennas}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must fit in 64 unsigned bits")
        for name in ("sigma1_sq", "sigma2_sq", "p1_max", "p2_max"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigError(f"{name} must be finite and > 0, got {value}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "n_antennas" not in data:
            raise ConfigError("config requires n_antennas")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path) -> "ScenarioConfig":
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def to_dict(self) -> dict:
        return asdict(self)

    def replace(self, **changes) -> "ScenarioConfig":
        return type(self)(**{**self.to_dict(), **changes})

    @property
    def caps(self) -> tuple[float, float]:
        return (float(self.p1_max), float(self.p2_max))


def _frozen(v) -> np.ndarray:
    v = linalg.as_vector(v).copy()
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class Scenario:
    h1: np.ndarray
    h2: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    config: ScenarioConfig

    def __post_init__(self):
        for name in ("h1", "h2", "g1", "g2"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        n = self.config.n_antennas
        for name in ("h1", "h2", "g1", "g2"):
            if getattr(self, name).size != n:
                raise DimensionError(f"{name} has length {getattr(self, name).size}, expected {n}")
        if not (np.any(self.h1) or np.any(self.h2)):
            raise ConfigError("at least one of h1, h2 must be nonzero")
        if not (np.any(self.g1) or np.any(self.g2)):
            raise ConfigError("at least one of g1, g2 must be nonzero")

    @property
    def n(self) -> int:
        return self.config.n_antennas

    def with_alpha(self, alpha: float) -> "Scenario":
        return Scenario(self.h1, self.h2, self.g1, self.g2, self.config.replace(alpha=alpha))

    def with_config(self, config: ScenarioConfig) -> "Scenario":
        return Scenario(self.h1, self.h2, self.g1, self.g2, config)


def complex_gaussian_stream(seed: int, count: int) -> np.ndarray:
    """`count` unit-variance circular complex Gaussians from the seeded stream."""
    bitgen = np.random.Philox(key=int(seed))
    raw = bitgen.random_raw(2 * count)
    u = (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53
    u1, u2 = u[0::2], u[1::2]
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    return radius * np.exp(2j * np.pi * u2) / np.sqrt(2.0)


def generate(config: ScenarioConfig) -> Scenario:
    """Draw an i.i.d. Rayleigh scenario, deterministic in ``config.seed``."""
    n = config.n_antennas
    z = complex_gaussian_stream(config.seed, 4 * n)
    return Scenario(z[:n], z[n:2 * n], z[2 * n:3 * n], z[3 * n:], config)


def load_channels_csv(path, config: ScenarioConfig) -> Scenario:
    """Load channels from a CSV with interleaved real/imag columns.

    One row per antenna index; the header must be
    ``h1_re,h1_im,h2_re,h2_im,g1_re,g1_im,g2_re,g2_im``.
    """
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = tuple(next(reader))
        if header != CSV_COLUMNS:
            raise ConfigError(f"unexpected channel CSV header {header}")
        rows = np.array([[float(x) for x in row] for row in reader if row])
    if rows.ndim != 2 or rows.shape[1] != 8:
        raise ConfigError("channel CSV must have 8 numeric columns")
    z = rows[:, 0::2] + 1j * rows[:, 1::2]
    config = config.replace(n_antennas=int(z.shape[0]))
    return Scenario(z[:, 0], z[:, 1], z[:, 2], z[:, 3], config)


def save_channels_csv(s: Scenario, path) -> None:
    cols = []
    for v in (s.h1, s.h2, s.g1, s.g2):
        cols += [v.real, v.imag]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in np.column_stack(cols):
            writer.writerow([repr(float(x)) for x in row])


@dataclass(frozen=True)
class StackedProblem:
    """Stacked vectors and matrices of the relaxed program.

    ``M = comm_weight * h h^H + alpha_tilde * g g^H``; `caps` are the per-AP
    power limits that bound ``trace(B1 W)`` and ``trace(B2 W)``.
    """

    h: np.ndarray
    g: np.ndarray
    M: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    alpha: float
    comm_weight: float
    alpha_tilde: float
    caps: tuple[float, float]
    n: int

    def block(self, w, i: int) -> np.ndarray:
        w = np.asarray(w)
        return w[: self.n] if i == 0 else w[self.n:]


def stack(s: Scenario) -> StackedProblem:
    cfg = s.config
    n = s.n
    h = np.concatenate([s.h1, s.h2])
    g = np.concatenate([s.g1, s.g2])
    g2_sq = float(np.real(np.vdot(s.g2, s.g2)))
    a_comm = cfg.alpha / cfg.sigma1_sq
    alpha_tilde = (1.0 - cfg.alpha) * g2_sq / cfg.sigma2_sq
    M = a_comm * linalg.outer(h) + alpha_tilde * linalg.outer(g)
    B1 = np.zeros((2 * n, 2 * n), dtype=complex)
    B1[:n, :n] = np.eye(n)
    B2 = np.eye(2 * n, dtype=complex) - B1
    for arr in (h, g, M, B1, B2):
        arr.setflags(write=False)
    return StackedProblem(h, g, M, B1, B2, float(cfg.alpha), float(a_comm),
                          float(alpha_tilde), cfg.caps, n)


def objective_matrix_value(p: StackedProblem, W) -> float:
    """``trace(M W)`` for a Hermitian 2N x 2N matrix `W`."""
    W = linalg.as_hermitian(W)
    if W.shape != p.M.shape:
        raise DimensionError(f"W has shape {W.shape}, expected {p.M.shape}")
    return linalg.trace_product(p.M, W)
