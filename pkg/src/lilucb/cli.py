"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 the LIL bound was
exceeded in ``verify-lil``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .algorithms import KINDS, AlgorithmSpec
from .bandits import ScenarioSpec, hardness_h1, hardness_h3, make_scenario
from .confidence import strict_delta_limit, validate_params, LilParams, Variant
from . import harness

log = logging.getLogger("lilucb")

EXIT_OK, EXIT_USAGE, EXIT_BOUND = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _scenario_arg(text: str) -> dict[str, Any]:
    """``one-sparse:10``, ``alpha:100:0.3`` or a JSON object."""
    text = text.strip()
    if text.startswith("{"):
        return json.loads(text)
    parts = text.split(":")
    d: dict[str, Any] = {"kind": parts[0]}
    if len(parts) > 1:
        d["n"] = int(parts[1])
    if len(parts) > 2:
        d["alpha"] = float(parts[2])
    return d


def _algorithm_arg(text: str) -> dict[str, Any]:
    """``kind``, ``kind+ls``, ``kind-nols`` or a JSON object."""
    text = text.strip()
    if text.startswith("{"):
        return json.loads(text)
    if text.endswith("+ls"):
        return {"kind": text[:-3], "ls": True}
    if text.endswith("-nols"):
        return {"kind": text[:-5], "ls": False}
    return {"kind": text}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lilucb", description="Best-arm identification experiments with lil'UCB.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-q", "--quiet", action="store_true", help="suppress progress messages")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sc = sub.add_parser("scenarios", help="show means, gaps and hardness of scenarios")
    sc.add_argument("--kind", choices=["one-sparse", "alpha", "explicit"])
    sc.add_argument("--n", type=int)
    sc.add_argument("--alpha", type=float)
    sc.add_argument("--means", type=_floats)
    sc.add_argument("--scale", type=float, default=0.5)
    sc.add_argument("--config", type=Path, help="JSON scenario object, list, or experiment config")
    sc.add_argument("--format", choices=["table", "json"], default="table")

    for name, helptext in (("run-stopping", "stopping-time experiment"),
                           ("run-anytime", "anytime error-probability experiment")):
        r = sub.add_parser(name, help=helptext)
        r.add_argument("--config", type=Path, help="experiment config JSON")
        r.add_argument("--scenario", dest="scenarios", action="append", type=_scenario_arg,
                       help="e.g. one-sparse:10, alpha:100:0.3 or a JSON object (repeatable)")
        r.add_argument("--algorithm", dest="algorithms", action="append", type=_algorithm_arg,
                       help=f"one of {', '.join(KINDS)}, optionally +ls / -nols, or JSON (repeatable)")
        r.add_argument("--trials", type=int)
        r.add_argument("--nu", type=float)
        r.add_argument("--master-seed", "--seed", dest="master_seed", type=int)
        r.add_argument("--max-pulls", dest="max_pulls", type=lambda s: int(float(s)))
        r.add_argument("--checkpoints", type=_ints)
        r.add_argument("--workers", type=int)
        r.add_argument("--timing", dest="timing", action="store_true", default=None)
        r.add_argument("--no-timing", dest="timing", action="store_false",
                       help="leave wall_ms empty so reruns are byte-identical")
        r.add_argument("--out", type=Path, help="output file (default: standard output)")
        r.add_argument("--meta", type=Path, help="metadata sidecar (default: OUT.meta.json)")
        r.add_argument("--format", choices=["csv", "json"], default="csv")

    v = sub.add_parser("verify-lil", help="Monte-Carlo check of the finite LIL bound")
    v.add_argument("--eps", type=_floats, default=[1.0])
    v.add_argument("--delta", type=_floats, default=[0.05])
    v.add_argument("--sigma", type=float, default=1.0)
    v.add_argument("--horizon", type=lambda s: int(float(s)), default=10**5)
    v.add_argument("--walks", type=lambda s: int(float(s)), default=10**4)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--slack", type=float, default=None,
                   help="allowed excess over the bound (default: 3 binomial standard errors)")

    pr = sub.add_parser("presets", help="print resolved algorithm parameters")
    pr.add_argument("--n", type=int, required=True, help="number of arms")
    pr.add_argument("--nu", type=float, default=0.1)
    pr.add_argument("--scale", type=float, default=0.5)
    pr.add_argument("--algorithm", dest="algorithms", action="append", type=_algorithm_arg)
    return p


def _load_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}")


def _scenario_specs(args) -> list[ScenarioSpec]:
    if args.config is not None:
        data = _load_json(args.config)
        if isinstance(data, dict) and "scenarios" in data:
            data = data["scenarios"]
        items = data if isinstance(data, list) else [data]
        return [ScenarioSpec.from_dict(d) for d in items]
    if args.kind is None:
        raise UsageError("give --kind or --config")
    return [ScenarioSpec(kind=args.kind, n=args.n, alpha=args.alpha,
                         means=tuple(args.means) if args.means else None, scale=args.scale)]


def cmd_scenarios(args, out) -> int:
    specs = _scenario_specs(args)
    reports = []
    for spec in specs:
        inst = make_scenario(spec)
        try:
            h3 = hardness_h3(inst)
        except ValueError:
            h3 = None
        reports.append({"scenario": spec.to_dict(), "label": spec.label, "n_arms": inst.n_arms,
                        "best_arm": inst.best_arm, "means": inst.means.tolist(),
                        "gaps": inst.gaps.tolist(), "h1": hardness_h1(inst), "h3": h3})
    if args.format == "json":
        out.write(json.dumps(reports, indent=2) + "\n")
        return EXIT_OK
    for rep in reports:
        out.write(f"# {rep['label']}  n_arms={rep['n_arms']}  best_arm={rep['best_arm']}\n")
        out.write(f"{'arm':>6} {'mean':>12} {'gap':>12}\n")
        for i, (m, g) in enumerate(zip(rep["means"], rep["gaps"])):
            out.write(f"{i:>6} {m:>12.5f} {g:>12.5f}\n")
        h3 = "n/a (gap > 1)" if rep["h3"] is None else f"{rep['h3']:.6g}"
        out.write(f"H1 = {rep['h1']:.6g}\nH3 = {h3}\n\n")
    return EXIT_OK


def _experiment_config(args) -> harness.ExperimentConfig:
    data: dict[str, Any] = {}
    if args.config is not None:
        data = _load_json(args.config)
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
    for key in ("scenarios", "algorithms", "trials", "nu", "master_seed", "max_pulls",
                "checkpoints", "workers", "timing"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    data.setdefault("workers", harness.default_workers())
    if "scenarios" not in data or "algorithms" not in data:
        raise UsageError("need scenarios and algorithms (from --config or flags)")
    return harness.ExperimentConfig.from_dict(data)


def _write(path: Path | None, text: str, out) -> None:
    if path is None:
        out.write(text)
        return
    try:
        path.write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}")


def cmd_run(args, out, anytime: bool) -> int:
    cfg = _experiment_config(args)
    name = "anytime" if anytime else "stopping"
    log.info("running %s experiment: %d scenario(s) x %d algorithm(s) x %d trial(s), %d worker(s)",
             name, len(cfg.scenarios), len(cfg.algorithms), cfg.trials, cfg.workers)
    meta = harness.run_metadata(cfg, name)
    if anytime:
        result = harness.run_anytime_experiment(cfg)
        meta["stop_times"] = [{"scenario": c.scenario, "n": c.n, "algorithm": c.algorithm,
                               "mean_stop": c.mean_stop, "stopped": c.stopped, "trials": c.trials}
                              for c in result.curves]
    else:
        result = harness.run_stopping_time_experiment(cfg)
        meta["aggregates"] = result.aggregates
    text = result.to_csv() if args.format == "csv" else result.to_json() + "\n"
    _write(args.out, text, out)
    meta_text = json.dumps(meta, indent=2, sort_keys=True) + "\n"
    meta_path = args.meta
    if meta_path is None and args.out is not None:
        meta_path = args.out.with_name(args.out.name + ".meta.json")
    if meta_path is not None:
        _write(meta_path, meta_text, out)
    else:
        sys.stderr.write(meta_text)
    log.info("done")
    return EXIT_OK


def cmd_verify_lil(args, out) -> int:
    if args.walks < 1 or args.horizon < 1:
        raise UsageError("--walks and --horizon must be positive")
    if args.sigma <= 0:
        raise UsageError("--sigma must be positive")
    grid = [(e, d) for e in args.eps for d in args.delta]
    for e, d in grid:
        msg = validate_params(LilParams(eps=e, delta=d, scale=args.sigma, variant=Variant.STRICT))
        if msg is not None:
            limit = f"(0, {strict_delta_limit(e):.3g})" if e > 0 else "empty"
            raise UsageError(f"eps={e:g}, delta={d:g} rejected: {msg}; valid delta range {limit}")
    status = EXIT_OK
    out.write(f"{'eps':>8} {'delta':>8} {'walks':>8} {'horizon':>9} {'empirical':>10} "
              f"{'bound':>10} {'allowed':>10}  result\n")
    for e, d in grid:
        log.info("simulating eps=%g delta=%g", e, d)
        chk = harness.verify_lil_bound(e, d, args.sigma, args.horizon, args.walks, args.seed)
        slack = args.slack if args.slack is not None else 3.0 * (chk.bound / chk.walks) ** 0.5
        ok = chk.rate <= chk.bound + slack
        if not ok:
            status = EXIT_BOUND
        out.write(f"{e:>8g} {d:>8g} {chk.walks:>8d} {chk.horizon:>9d} {chk.rate:>10.5f} "
                  f"{chk.bound:>10.5f} {chk.bound + slack:>10.5f}  {'ok' if ok else 'EXCEEDED'}\n")
    return status


def cmd_presets(args, out) -> int:
    specs = [AlgorithmSpec.from_dict(a) for a in args.algorithms] if args.algorithms \
        else [AlgorithmSpec(k) for k in KINDS]
    resolved = [s.with_default_nu(args.nu).resolve(args.n, args.scale) for s in specs]
    out.write(json.dumps(resolved, indent=2) + "\n")
    return EXIT_OK


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    try:
        if args.command == "scenarios":
            return cmd_scenarios(args, out)
        if args.command == "run-stopping":
            return cmd_run(args, out, anytime=False)
        if args.command == "run-anytime":
            return cmd_run(args, out, anytime=True)
        if args.command == "verify-lil":
            return cmd_verify_lil(args, out)
        return cmd_presets(args, out)
    except (UsageError, ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"lilucb {args.command}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
