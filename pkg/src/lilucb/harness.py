"""Deterministic Monte-Carlo experiment runner.

Trials are the unit of parallel work.  Every trial's randomness is derived
from ``(master_seed, scenario, trial)`` for rewards and additionally the
algorithm id for algorithm-internal draws, so results do not depend on the
worker count or scheduling order.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__
from .algorithms import AlgorithmSpec, ContractViolation, make_sampler
from .bandits import BanditInstance, RewardStream, ScenarioSpec, hardness_h1, make_scenario
from .confidence import LilParams, Variant, lil_failure_probability, validate_params

log = logging.getLogger(__name__)

DEFAULT_MAX_PULLS = 10**9
DEFAULT_CHECKPOINT_RATIO = 1.25
WORKERS_ENV = "LILUCB_WORKERS"

TRIAL_FIELDS = ("scenario", "n", "algorithm", "trial", "seed", "total_pulls",
                "stopped", "recommended", "correct", "wall_ms")
CURVE_FIELDS = ("scenario", "n", "algorithm", "checkpoint", "error_rate", "trials")


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    return max(1, int(value)) if value else 1


def _mix(*parts: Any) -> int:
    text = "\x1f".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "little")


def derive_trial_seed(master_seed: int, scenario_id: str, algorithm_id: str, trial_index: int) -> int:
    """64-bit seed for one (scenario, algorithm, trial) cell."""
    return _mix("trial", master_seed, scenario_id, algorithm_id, trial_index)


def derive_reward_seed(master_seed: int, scenario_id: str, trial_index: int) -> int:
    """Reward seed shared by all algorithms on the same scenario and trial."""
    return _mix("rewards", master_seed, scenario_id, trial_index)


def geometric_checkpoints(start: int, stop: int, ratio: float = DEFAULT_CHECKPOINT_RATIO) -> tuple[int, ...]:
    """Strictly increasing integer grid from ``start`` to ``stop`` (both included)."""
    if start < 1 or stop < start:
        raise ValueError(f"bad checkpoint range [{start}, {stop}]")
    if ratio <= 1:
        raise ValueError("checkpoint ratio must exceed 1")
    points = []
    x = float(start)
    while True:
        c = math.ceil(x - 1e-9)
        if c >= stop:
            break
        if not points or c > points[-1]:
            points.append(c)
        x *= ratio
    points.append(stop)
    return tuple(points)


@dataclass
class TrialResult:
    algorithm: str
    scenario: str
    n: int
    trial: int
    seed: int
    total_pulls: int
    stopped: bool
    recommended: int | None
    correct: bool | None
    checkpoints: tuple[int, ...] = ()
    anytime_errors: tuple[bool, ...] = ()
    wall_time: float | None = None
    stop_reason: str | None = None
    diagnostic: str | None = None

    def row(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "n": self.n,
            "algorithm": self.algorithm,
            "trial": self.trial,
            "seed": self.seed,
            "total_pulls": self.total_pulls,
            "stopped": self.stopped,
            "recommended": self.recommended,
            "correct": self.correct,
            "wall_ms": None if self.wall_time is None else round(self.wall_time * 1000.0, 3),
        }


def run_trial(algorithm: AlgorithmSpec, instance: BanditInstance, seed: int,
              max_pulls: int = DEFAULT_MAX_PULLS, checkpoints: Sequence[int] = (),
              reward_seed: int | None = None, timing: bool = True,
              labels: tuple[str, int, int] = ("", 0, 0)) -> TrialResult:
    """Drive one sampler until it stops or ``max_pulls`` is reached.

    At each checkpoint the anytime recommendation (the empirical leader, or
    the final answer once stopped) is compared with the true best arm.  A
    checkpoint that comes before every arm has been pulled counts as an
    error.  ``labels`` is ``(scenario label, n, trial index)``.
    """
    start = time.perf_counter()
    reward_seed = seed if reward_seed is None else reward_seed
    source = RewardStream(instance, reward_seed)
    sampler = make_sampler(algorithm, instance.n_arms, instance.scale,
                           np.random.default_rng(seed))
    target = instance.best_arm
    cps = tuple(int(c) for c in checkpoints)
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    errors: list[bool] = []
    diagnostic = None

    def wrong_now() -> bool:
        if sampler.recommendation is not None:
            return sampler.recommendation != target
        if min(sampler.stats.pulls) < 1:
            return True
        return sampler.anytime_best() != target

    done = 0
    try:
        for c in cps:
            if c > max_pulls:
                break
            if sampler.recommendation is None and c > done:
                done += sampler.advance(source, c - done)
            errors.append(wrong_now())
        if sampler.recommendation is None and done < max_pulls:
            done += sampler.advance(source, max_pulls - done)
    except ContractViolation as exc:
        diagnostic = f"contract violation: {exc}"
        log.error("trial %s/%s aborted: %s", algorithm.label, labels, exc)
    # checkpoints past the cap keep the state reached at the cap
    while len(errors) < len(cps):
        errors.append(True if diagnostic else wrong_now())

    stopped = sampler.recommendation is not None and diagnostic is None
    rec = sampler.recommendation if stopped else None
    scenario, n, trial = labels
    return TrialResult(
        algorithm=algorithm.label,
        scenario=scenario,
        n=n,
        trial=trial,
        seed=seed,
        total_pulls=sampler.stats.total,
        stopped=stopped,
        recommended=rec,
        correct=(rec == target) if stopped else None,
        checkpoints=cps,
        anytime_errors=tuple(errors),
        wall_time=(time.perf_counter() - start) if timing else None,
        stop_reason=sampler.stop_reason if stopped else None,
        diagnostic=diagnostic,
    )


@dataclass
class ExperimentConfig:
    scenarios: list[ScenarioSpec]
    algorithms: list[AlgorithmSpec]
    trials: int = 40
    nu: float = 0.1
    master_seed: int = 0
    max_pulls: int = DEFAULT_MAX_PULLS
    checkpoints: list[int] | None = None
    workers: int = 1
    timing: bool = True

    def __post_init__(self):
        self.scenarios = [s if isinstance(s, ScenarioSpec) else ScenarioSpec.from_dict(s)
                          for s in self.scenarios]
        self.algorithms = [a if isinstance(a, AlgorithmSpec) else AlgorithmSpec.from_dict(a)
                           for a in self.algorithms]
        if not self.scenarios or not self.algorithms:
            raise ValueError("config needs at least one scenario and one algorithm")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 < self.nu < 1:
            raise ValueError(f"nu must lie in (0, 1), got {self.nu}")
        if self.max_pulls < 1:
            raise ValueError("max_pulls must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.checkpoints is not None:
            cps = [int(c) for c in self.checkpoints]
            if not cps or cps[0] < 1 or any(b <= a for a, b in zip(cps, cps[1:])):
                raise ValueError("checkpoints must be positive and strictly increasing")
            self.checkpoints = cps
        self.algorithms = [a.with_default_nu(self.nu) for a in self.algorithms]

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenarios": [s.to_dict() for s in self.scenarios],
            "algorithms": [a.to_dict() for a in self.algorithms],
            "trials": self.trials,
            "nu": self.nu,
            "master_seed": self.master_seed,
            "max_pulls": self.max_pulls,
            "checkpoints": self.checkpoints,
            "workers": self.workers,
            "timing": self.timing,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentConfig":
        d = dict(d)
        if "parallelism" in d:
            d.setdefault("workers", d.pop("parallelism"))
        known = {"scenarios", "algorithms", "trials", "nu", "master_seed", "max_pulls",
                 "checkpoints", "workers", "timing"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))


def checkpoints_for(cfg: ExperimentConfig, instance: BanditInstance) -> tuple[int, ...]:
    if cfg.checkpoints is not None:
        return tuple(cfg.checkpoints)
    start = min(instance.n_arms, cfg.max_pulls)
    return geometric_checkpoints(start, cfg.max_pulls)


def _run_task(task: tuple) -> TrialResult:
    return run_trial(*task[:-1], labels=task[-1])


def _tasks(cfg: ExperimentConfig, anytime: bool) -> list[tuple]:
    tasks = []
    for scen in cfg.scenarios:
        instance = make_scenario(scen)
        cps = checkpoints_for(cfg, instance) if anytime else ()
        for alg in cfg.algorithms:
            for trial in range(cfg.trials):
                seed = derive_trial_seed(cfg.master_seed, scen.ident, alg.ident, trial)
                rseed = derive_reward_seed(cfg.master_seed, scen.ident, trial)
                tasks.append((alg, instance, seed, cfg.max_pulls, cps, rseed, cfg.timing,
                              (scen.label, scen.n, trial)))
    return tasks


def run_trials(tasks: list[tuple], workers: int = 1) -> list[TrialResult]:
    """Execute trial tasks; output order equals task order for any worker count."""
    if workers <= 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    chunk = max(1, len(tasks) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_task, tasks, chunksize=chunk))


def resolved_parameters(cfg: ExperimentConfig) -> list[dict[str, Any]]:
    """Concrete algorithm parameters for every (scenario, algorithm) cell."""
    out = []
    for scen in cfg.scenarios:
        instance = make_scenario(scen)
        for alg in cfg.algorithms:
            out.append({"scenario": scen.label, "n": scen.n, "n_arms": instance.n_arms,
                        **alg.resolve(instance.n_arms, instance.scale)})
    return out


def _cells(rows: Iterable[TrialResult]) -> dict[tuple[str, int, str], list[TrialResult]]:
    cells: dict[tuple[str, int, str], list[TrialResult]] = {}
    for r in rows:
        cells.setdefault((r.scenario, r.n, r.algorithm), []).append(r)
    return cells


def aggregate(rows: Sequence[TrialResult], hardness: dict[tuple[str, int], float]) -> list[dict[str, Any]]:
    """Per-cell summary of stopping times.

    Pull statistics cover stopped trials only; ``error_rate`` is the share of
    stopped trials that recommended a wrong arm.
    """
    out = []
    for (scen, n, alg), cell in _cells(rows).items():
        stopped = [r for r in cell if r.stopped]
        pulls = [r.total_pulls for r in stopped]
        h1 = hardness[(scen, n)]
        mean = statistics.fmean(pulls) if pulls else None
        median = statistics.median(pulls) if pulls else None
        out.append({
            "scenario": scen,
            "n": n,
            "algorithm": alg,
            "trials": len(cell),
            "stopped": len(stopped),
            "mean_pulls": mean,
            "median_pulls": median,
            "stdev_pulls": statistics.stdev(pulls) if len(pulls) > 1 else (0.0 if pulls else None),
            "error_rate": (sum(not r.correct for r in stopped) / len(stopped)) if stopped else None,
            "h1": h1,
            "mean_pulls_over_h1": mean / h1 if mean is not None else None,
            "median_pulls_over_h1": median / h1 if median is not None else None,
        })
    return out


@dataclass
class StoppingTimeResult:
    rows: list[TrialResult]
    aggregates: list[dict[str, Any]]

    def cell(self, scenario: str, n: int, algorithm: str) -> list[TrialResult]:
        return [r for r in self.rows if (r.scenario, r.n, r.algorithm) == (scenario, n, algorithm)]

    def to_csv(self) -> str:
        return _csv(TRIAL_FIELDS, (r.row() for r in self.rows))

    def to_json(self) -> str:
        return json.dumps({"rows": [r.row() for r in self.rows], "aggregates": self.aggregates},
                          indent=2, sort_keys=True)


@dataclass
class ErrorCurve:
    scenario: str
    n: int
    algorithm: str
    checkpoints: tuple[int, ...]
    error_rates: tuple[float, ...]
    trials: int
    mean_stop: float | None = None
    stopped: int = 0

    def first_below(self, level: float) -> int | None:
        """First checkpoint whose error rate is strictly below ``level``."""
        for c, e in zip(self.checkpoints, self.error_rates):
            if e < level:
                return c
        return None

    def rows(self) -> list[dict[str, Any]]:
        return [{"scenario": self.scenario, "n": self.n, "algorithm": self.algorithm,
                 "checkpoint": c, "error_rate": e, "trials": self.trials}
                for c, e in zip(self.checkpoints, self.error_rates)]


@dataclass
class AnytimeResult:
    curves: list[ErrorCurve]
    rows: list[TrialResult] = field(repr=False, default_factory=list)

    def curve(self, scenario: str, n: int, algorithm: str) -> ErrorCurve:
        for c in self.curves:
            if (c.scenario, c.n, c.algorithm) == (scenario, n, algorithm):
                return c
        raise KeyError((scenario, n, algorithm))

    def to_csv(self) -> str:
        return _csv(CURVE_FIELDS, (row for c in self.curves for row in c.rows()))

    def to_json(self) -> str:
        return json.dumps({"curves": [row for c in self.curves for row in c.rows()],
                           "stop_times": [{"scenario": c.scenario, "n": c.n, "algorithm": c.algorithm,
                                           "mean_stop": c.mean_stop, "stopped": c.stopped,
                                           "trials": c.trials} for c in self.curves]},
                          indent=2, sort_keys=True)


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv(fields: Sequence[str], rows: Iterable[dict[str, Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_fmt(row[f]) for f in fields])
    return buf.getvalue()


def run_stopping_time_experiment(cfg: ExperimentConfig) -> StoppingTimeResult:
    rows = run_trials(_tasks(cfg, anytime=False), cfg.workers)
    hardness = {(s.label, s.n): hardness_h1(make_scenario(s)) for s in cfg.scenarios}
    return StoppingTimeResult(rows, aggregate(rows, hardness))


def error_curves(rows: Sequence[TrialResult]) -> list[ErrorCurve]:
    curves = []
    for (scen, n, alg), cell in _cells(rows).items():
        cps = cell[0].checkpoints
        wrong = np.array([r.anytime_errors for r in cell], dtype=float).reshape(len(cell), len(cps))
        stops = [r.total_pulls for r in cell if r.stopped]
        curves.append(ErrorCurve(
            scenario=scen, n=n, algorithm=alg, checkpoints=cps,
            error_rates=tuple(float(x) for x in wrong.mean(axis=0)),
            trials=len(cell),
            mean_stop=statistics.fmean(stops) if stops else None,
            stopped=len(stops),
        ))
    return curves


def run_anytime_experiment(cfg: ExperimentConfig) -> AnytimeResult:
    rows = run_trials(_tasks(cfg, anytime=True), cfg.workers)
    return AnytimeResult(error_curves(rows), rows)


@dataclass(frozen=True)
class LilCheck:
    eps: float
    delta: float
    sigma: float
    horizon: int
    walks: int
    failures: int
    bound: float

    @property
    def rate(self) -> float:
        return self.failures / self.walks


def lil_envelope(horizon: int, eps: float, delta: float, sigma: float = 1.0) -> np.ndarray:
    """Partial-sum envelope ``(1+sqrt(eps)) sqrt(2 sigma^2 (1+eps) t log(log((1+eps)t)/delta))``."""
    t = np.arange(1, horizon + 1, dtype=float)
    base = (1.0 + math.sqrt(eps)) * np.sqrt(
        2.0 * (1.0 + eps) * t * np.log(np.log((1.0 + eps) * t) / delta))
    return sigma * base


def verify_lil_bound(eps: float, delta: float, sigma: float = 1.0, horizon: int = 10**5,
                     num_walks: int = 10**4, seed: int = 0, chunk: int = 64) -> LilCheck:
    """Monte-Carlo estimate of how often a Gaussian walk crosses the LIL envelope.

    Walks are simulated in fixed chunks with one seed per chunk, so the count
    only depends on ``seed``.
    """
    msg = validate_params(LilParams(eps=eps, delta=delta, scale=sigma, variant=Variant.STRICT))
    if msg is not None:
        raise ValueError(msg)
    if horizon < 1 or num_walks < 1:
        raise ValueError("horizon and num_walks must be positive")
    envelope = lil_envelope(horizon, eps, delta, sigma)
    n_chunks = -(-num_walks // chunk)
    seeds = np.random.SeedSequence(seed).spawn(n_chunks)
    failures = 0
    for i, ss in enumerate(seeds):
        size = min(chunk, num_walks - i * chunk)
        walks = np.random.default_rng(ss).standard_normal((size, horizon))
        np.cumsum(walks, axis=1, out=walks)
        walks *= sigma
        failures += int(np.count_nonzero((walks > envelope).any(axis=1)))
    return LilCheck(eps, delta, sigma, horizon, num_walks, failures,
                    lil_failure_probability(eps, delta))


def run_metadata(cfg: ExperimentConfig, experiment: str) -> dict[str, Any]:
    return {
        "experiment": experiment,
        "version": __version__,
        "config": cfg.to_dict(),
        "master_seed": cfg.master_seed,
        "resolved": resolved_parameters(cfg),
    }
