"""
Trade-off sweeps, certificate runs and CSV emission.

A sweep solves the relaxed program for a grid of weights alpha (from 1 down
to 0) on one fixed scenario and attaches the closed-form baselines. The
emitted CSV files use a fixed number format so that two runs with the same
configuration are byte-identical.
"""

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import baselines, metrics, scenario, sdp
from .exceptions import CfjsacError
from .scenario import Scenario, ScenarioConfig

SENTINEL_DB = -300.0
MONOTONE_SLACK = 1e-8
ENDPOINT_DB_TOL = 1e-6
ORACLE_RTOL = 1e-4


def to_db(x: float) -> float:
    """``10 log10(x)`` for power ratios; non-positive values map to the sentinel."""
    return 10.0 * math.log10(x) if x > 0 else SENTINEL_DB


def from_db(x: float) -> float:
    return 0.0 if x <= SENTINEL_DB else 10.0 ** (x / 10.0)


@dataclass(frozen=True)
class TradeoffPoint:
    alpha: float
    snr_c: float
    snr_s: float
    snr_c_db: float
    snr_s_db: float
    diagnostics: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_linear(cls, alpha, snr_c, snr_s, diagnostics=None) -> "TradeoffPoint":
        return cls(float(alpha), float(snr_c), float(snr_s), to_db(snr_c), to_db(snr_s),
                   diagnostics or {})


@dataclass(frozen=True)
class SweepReport:
    config: ScenarioConfig
    points: tuple
    baselines: tuple
    certificates: dict

    def frontier_points(self) -> list[TradeoffPoint]:
        """Sweep points with consecutive duplicates removed."""
        out = []
        for pt in self.points:
            if out and abs(pt.snr_c - out[-1].snr_c) <= 1e-9 * max(1.0, pt.snr_c) \
                    and abs(pt.snr_s - out[-1].snr_s) <= 1e-9 * max(1.0, pt.snr_s):
                continue
            out.append(pt)
        return out


def alpha_grid(alphas) -> list[float]:
    """Weights in descending order from a count (uniform on [0, 1]) or a list."""
    if isinstance(alphas, (int, np.integer)):
        if alphas < 2:
            raise ValueError("alpha count must be at least 2")
        return [float(a) for a in np.linspace(1.0, 0.0, int(alphas))]
    values = sorted({float(a) for a in alphas}, reverse=True)
    if not values or any(not 0.0 <= a <= 1.0 for a in values):
        raise ValueError("alphas must be a non-empty list of values in [0, 1]")
    return values


def parse_alphas(text: str):
    """``"101"`` -> 101; ``"1,0.5,0"`` -> [1.0, 0.5, 0.0]."""
    text = text.strip()
    if "," in text or "." in text:
        return [float(x) for x in text.split(",") if x.strip()]
    return int(text)


def _solve_point(args) -> TradeoffPoint:
    s, alpha = args
    sa = s.with_alpha(alpha)
    sol = sdp.solve(scenario.stack(sa))
    return TradeoffPoint.from_linear(alpha, metrics.snr_comm(sa, sol.w_star),
                                     metrics.snr_sense(sa, sol.w_star), sol.diagnostics())


def run_sweep(config: ScenarioConfig, alphas=101, out_dir=None, workers: int = 1,
              s: Scenario | None = None, diagnostics: bool = False) -> SweepReport:
    """
    Solve the relaxed program along an alpha grid and collect baselines.

    Points are assembled in alpha order regardless of worker completion
    order. When `out_dir` is given the CSV artifacts are written there.
    """
    s = scenario.generate(config) if s is None else s
    grid = alpha_grid(alphas)
    jobs = [(s, a) for a in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = tuple(pool.map(_solve_point, jobs))
    else:
        points = tuple(map(_solve_point, jobs))
    certs = {
        "solves": len(points),
        "max_gap": max(pt.diagnostics["gap"] for pt in points),
        "max_complementarity": max(abs(pt.diagnostics["complementarity_residual"]) for pt in points),
        "max_rank_ratio": max(pt.diagnostics["rank_certificate"]["ratio"] for pt in points),
        "all_rank_one": all(pt.diagnostics["rank_certificate"]["rank"] == 1 for pt in points),
    }
    report = SweepReport(s.config, points, tuple(baselines.all_baselines(s)), certs)
    if out_dir is not None:
        emit_csv(report, out_dir, diagnostics=diagnostics)
    return report


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def emit_csv(report: SweepReport, out_dir, diagnostics: bool = False) -> dict:
    """
    Write ``region.csv``, ``points.csv`` and ``baselines.csv`` into `out_dir`.

    ``region.csv`` has every sweep point (alpha descending), ``points.csv``
    the distinct frontier points, both with header ``snr_c_db,snr_s_db``.
    ``baselines.csv`` has header ``name,snr_c_db,snr_s_db``; the standalone
    scheme appears twice, as ``standalone`` (task-separated accounting) and
    ``standalone_literal``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / f"{name}.csv" for name in ("region", "points", "baselines")}

    def write_points(path, pts):
        lines = ["snr_c_db,snr_s_db"] + [f"{_fmt(p.snr_c_db)},{_fmt(p.snr_s_db)}" for p in pts]
        path.write_text("\n".join(lines) + "\n", newline="\n")

    write_points(paths["region"], report.points)
    write_points(paths["points"], report.frontier_points())
    lines = ["name,snr_c_db,snr_s_db"]
    for b in report.baselines:
        lines.append(f"{b.name},{_fmt(to_db(b.snr_c))},{_fmt(to_db(b.snr_s))}")
        if b.name == "standalone":
            lines.append(f"standalone_literal,{_fmt(to_db(b.extra['snr_c_literal']))},"
                         f"{_fmt(to_db(b.extra['snr_s_literal']))}")
    paths["baselines"].write_text("\n".join(lines) + "\n", newline="\n")
    if diagnostics:
        paths["diagnostics"] = out / "diagnostics.json"
        record = [{"alpha": p.alpha, **p.diagnostics} for p in report.points]
        paths["diagnostics"].write_text(json.dumps(record, indent=1, sort_keys=True) + "\n")
    return paths


def read_points_csv(path) -> list[tuple[float, float]]:
    """Parse a points/region CSV back into linear ``(snr_c, snr_s)`` pairs."""
    rows = Path(path).read_text().splitlines()[1:]
    return [tuple(from_db(float(x)) for x in row.split(",")) for row in rows if row]


# -- frontier geometry ---------------------------------------------------------

def monotonicity_violations(points: Sequence[TradeoffPoint], slack: float = MONOTONE_SLACK) -> list[int]:
    """Indices where snr_c increases or snr_s decreases as alpha decreases."""
    bad = []
    for k in range(1, len(points)):
        prev, cur = points[k - 1], points[k]
        if cur.snr_c > prev.snr_c + slack * max(1.0, prev.snr_c) \
                or cur.snr_s < prev.snr_s - slack * max(1.0, prev.snr_s):
            bad.append(k)
    return bad


def dominated_by_frontier(snr_c: float, snr_s: float, points: Sequence[TradeoffPoint],
                          rtol: float = 1e-9) -> bool:
    """
    True if ``(snr_c, snr_s)`` lies on or below the sampled frontier.

    A point is dominated when some sweep point is at least as good in both
    coordinates, or when it lies under the chord joining two consecutive
    sweep points (linear units).
    """
    def ge(a, b):
        return a >= b - rtol * max(1.0, abs(b))

    if any(ge(p.snr_c, snr_c) and ge(p.snr_s, snr_s) for p in points):
        return True
    pts = sorted(points, key=lambda p: p.snr_c)
    for lo, hi in zip(pts, pts[1:]):
        if lo.snr_c <= snr_c <= hi.snr_c and hi.snr_c > lo.snr_c:
            lam = (snr_c - lo.snr_c) / (hi.snr_c - lo.snr_c)
            if ge(lo.snr_s + lam * (hi.snr_s - lo.snr_s), snr_s):
                return True
    return False


# -- certificate runs ----------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    seed: int
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  seed={self.seed:<6d} {self.name:<20s} {self.detail}"


@dataclass(frozen=True)
class VerifyReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def seed_summary(self) -> tuple[int, int]:
        seeds = sorted({c.seed for c in self.checks})
        ok = sum(all(c.passed for c in self.checks if c.seed == sd) for sd in seeds)
        return ok, len(seeds)


def parse_seed_range(text: str) -> list[int]:
    """``"1..100"`` -> [1, ..., 100]; ``"7"`` -> [7]; ``"1,5,9"`` -> [1, 5, 9]."""
    if ".." in text:
        a, b = (int(x) for x in text.split("..", 1))
        if b < a:
            raise ValueError(f"empty seed range {text!r}")
        return list(range(a, b + 1))
    return [int(x) for x in text.split(",") if x.strip()]


def _verify_seed(config: ScenarioConfig, tau_rank: float, oracle_restarts: int) -> list[CheckResult]:
    s = scenario.generate(config)
    seed = config.seed
    checks = []
    sols = {}
    for alpha in sorted({config.alpha, 0.0, 1.0}, reverse=True):
        sa = s.with_alpha(alpha)
        p = scenario.stack(sa)
        try:
            sol = sdp.recover_primal(p, sdp.solve_dual(p), tau_rank=tau_rank)
        except CfjsacError as exc:
            checks.append(CheckResult("solve", seed, False, f"alpha={alpha:g}: {exc}"))
            continue
        sols[alpha] = (sa, sol)
        failed = sdp.optimality_failures(sol, p)
        rc = sol.rank_certificate
        details = {
            "duality_gap": f"alpha={alpha:g} gap={sol.gap:.3e}",
            "complementarity": f"alpha={alpha:g} tr(WZ)={sol.complementarity_residual:.3e}",
            "feasibility": f"alpha={alpha:g} traces=({sol.block_traces[0]:.12f}, {sol.block_traces[1]:.12f})",
            "rank": f"alpha={alpha:g} lambda2/lambda1<={rc.ratio:.3e} tau={rc.tau_rank:.1e}",
        }
        for name, detail in details.items():
            checks.append(CheckResult(name, seed, name not in failed, detail))

    if config.alpha in sols:
        sa, sol = sols[config.alpha]
        ref = baselines.oracle(sa, restarts=oracle_restarts, seed=seed)
        rel = abs(ref - sol.primal_value) / max(sol.primal_value, 1e-300)
        checks.append(CheckResult("oracle_agreement", seed, rel <= ORACLE_RTOL,
                                  f"alpha={config.alpha:g} sdp={sol.primal_value:.10g} "
                                  f"oracle={ref:.10g} rel={rel:.2e}"))
    cfg = s.config
    if 1.0 in sols:
        sa, sol = sols[1.0]
        p1, p2 = cfg.caps
        closed = (math.sqrt(p1) * np.linalg.norm(s.h1) + math.sqrt(p2) * np.linalg.norm(s.h2)) ** 2 / cfg.sigma1_sq
        rel = abs(sol.primal_value - closed) / closed
        checks.append(CheckResult("endpoint_comm", seed, rel <= 1e-8, f"rel={rel:.2e}"))
    if 0.0 in sols:
        sa, sol = sols[0.0]
        p1, p2 = cfg.caps
        g2 = np.linalg.norm(s.g2)
        closed = g2**2 * (math.sqrt(p1) * np.linalg.norm(s.g1) + math.sqrt(p2) * g2) ** 2 / cfg.sigma2_sq
        rel = abs(sol.primal_value - closed) / closed
        checks.append(CheckResult("endpoint_sense", seed, rel <= 1e-8, f"rel={rel:.2e}"))
    return checks


def run_verify(config: ScenarioConfig, seeds: Sequence[int] | None = None,
               tau_rank: float = sdp.TAU_RANK, oracle_restarts: int = 100) -> VerifyReport:
    """
    Run every optimality certificate for each seed.

    Per seed: duality gap, complementary slackness, feasibility and rank at
    the configured alpha and at both endpoints; agreement with the
    brute-force oracle at the configured alpha; closed-form MRT values at
    alpha = 1 and alpha = 0.
    """
    seeds = [config.seed] if seeds is None else list(seeds)
    checks = []
    for sd in seeds:
        checks += _verify_seed(config.replace(seed=sd), tau_rank, oracle_restarts)
    return VerifyReport(tuple(checks))
