"""Command line interface: ``cfjsac {solve,sweep,baselines,verify}``."""

import argparse
import json
import sys

from . import baselines, metrics, scenario, sdp, sweep
from .exceptions import CfjsacError
from .scenario import ScenarioConfig

DEFAULT_CONFIG = ScenarioConfig(n_antennas=3, seed=42, alpha=0.5)


def _load_config(args) -> ScenarioConfig:
    return DEFAULT_CONFIG if args.config is None else ScenarioConfig.from_json(args.config)


def _load_scenario(args, cfg: ScenarioConfig):
    if getattr(args, "channels", None):
        return scenario.load_channels_csv(args.channels, cfg)
    return scenario.generate(cfg)


def _complex_list(v):
    return [[float(z.real), float(z.imag)] for z in v]


def cmd_solve(args) -> int:
    cfg = _load_config(args)
    if args.alpha is not None:
        cfg = cfg.replace(alpha=args.alpha)
    s = _load_scenario(args, cfg)
    sol = sdp.solve(scenario.stack(s), tau_rank=args.tau_rank)
    snr_c = metrics.snr_comm(s, sol.w_star)
    snr_s = metrics.snr_sense(s, sol.w_star)
    record = {
        "config": s.config.to_dict(),
        "snr_c": snr_c,
        "snr_s": snr_s,
        "snr_c_db": sweep.to_db(snr_c),
        "snr_s_db": sweep.to_db(snr_s),
        "objective": metrics.objective(s, sol.w_star),
        "w1": _complex_list(sol.w_star.w1),
        "w2": _complex_list(sol.w_star.w2),
        "diagnostics": sol.diagnostics(),
    }
    print(json.dumps(record, indent=2, sort_keys=True))
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    s = _load_scenario(args, cfg)
    report = sweep.run_sweep(s.config, sweep.parse_alphas(args.alphas), out_dir=args.out,
                             workers=args.workers, s=s, diagnostics=args.diagnostics)
    bad = sweep.monotonicity_violations(report.points)
    print(f"{len(report.points)} trade-off points written to {args.out}")
    print(json.dumps(report.certificates, sort_keys=True))
    if bad:
        print(f"warning: frontier not monotone at indices {bad}", file=sys.stderr)
    return 0


def cmd_baselines(args) -> int:
    cfg = _load_config(args)
    s = _load_scenario(args, cfg)
    print("name,snr_c_db,snr_s_db,objective")
    for b in baselines.all_baselines(s):
        print(f"{b.name},{sweep.to_db(b.snr_c):.6f},{sweep.to_db(b.snr_s):.6f},{b.objective:.6f}")
        if b.name == "standalone":
            print(f"standalone_literal,{sweep.to_db(b.extra['snr_c_literal']):.6f},"
                  f"{sweep.to_db(b.extra['snr_s_literal']):.6f},{b.extra['objective_literal']:.6f}")
    return 0


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    seeds = sweep.parse_seed_range(args.seeds) if args.seeds else None
    report = sweep.run_verify(cfg, seeds, tau_rank=args.tau_rank,
                              oracle_restarts=args.restarts)
    for c in report.checks:
        if args.verbose or not c.passed:
            print(c.line())
    ok, total = report.seed_summary()
    print(f"{ok}/{total} seeds pass all certificates")
    for name in sorted({c.name for c in report.failed}):
        print(f"failed certificate: {name}")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cfjsac", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="scenario config JSON")
        p.add_argument("--channels", help="channel CSV overriding the seeded draw")

    p = sub.add_parser("solve", help="solve the relaxed program for one alpha")
    common(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--tau-rank", type=float, default=sdp.TAU_RANK)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="trace the trade-off frontier and write CSV files")
    common(p)
    p.add_argument("--alphas", default="101", help="point count or comma-separated list")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--diagnostics", action="store_true", help="also write diagnostics.json")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("baselines", help="print MRT, zero-forcing and standalone points")
    common(p)
    p.set_defaults(func=cmd_baselines)

    p = sub.add_parser("verify", help="run all optimality certificates")
    p.add_argument("--config", help="scenario config JSON")
    p.add_argument("--seeds", help="seed range a..b or list")
    p.add_argument("--tau-rank", type=float, default=sdp.TAU_RANK)
    p.add_argument("--restarts", type=int, default=100, help="oracle restarts")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CfjsacError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
