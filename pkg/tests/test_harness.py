import csv
import io
import json

import numpy as np
import pytest

from lilucb.algorithms import AlgorithmSpec
from lilucb.bandits import BanditInstance, ScenarioSpec, make_scenario
from lilucb.confidence import lil_failure_probability
from lilucb.harness import (
    CURVE_FIELDS,
    TRIAL_FIELDS,
    ExperimentConfig,
    derive_reward_seed,
    derive_trial_seed,
    geometric_checkpoints,
    lil_envelope,
    run_anytime_experiment,
    run_stopping_time_experiment,
    run_trial,
    verify_lil_bound,
)


class TestSeeds:
    def test_stable_and_distinct(self):
        a = derive_trial_seed(0, "s", "alg", 3)
        assert a == derive_trial_seed(0, "s", "alg", 3)
        assert 0 <= a < 2**64
        others = {derive_trial_seed(1, "s", "alg", 3), derive_trial_seed(0, "t", "alg", 3),
                  derive_trial_seed(0, "s", "alh", 3), derive_trial_seed(0, "s", "alg", 4)}
        assert a not in others and len(others) == 4

    def test_reward_seed_ignores_algorithm(self):
        assert derive_reward_seed(0, "s", 1) != derive_reward_seed(0, "s", 2)
        assert derive_reward_seed(0, "s", 1) != derive_trial_seed(0, "s", "", 1)


class TestCheckpoints:
    def test_grid(self):
        cps = geometric_checkpoints(10, 1000)
        assert cps[0] == 10 and cps[-1] == 1000
        assert all(b > a for a, b in zip(cps, cps[1:]))
        assert all(b <= 1.25 * a + 1 for a, b in zip(cps, cps[1:]))

    def test_degenerate(self):
        assert geometric_checkpoints(5, 5) == (5,)
        with pytest.raises(ValueError):
            geometric_checkpoints(0, 5)
        with pytest.raises(ValueError):
            geometric_checkpoints(5, 10, ratio=1.0)


class TestRunTrial:
    def test_easy_instance_stops(self):
        inst = BanditInstance.from_means([1.0, 0.0])
        r = run_trial(AlgorithmSpec("nonadaptive", nu=0.1), inst, seed=0)
        assert r.stopped and r.correct and r.total_pulls <= 500
        assert r.stop_reason == "lil-stopping"

    def test_cap(self):
        inst = make_scenario(ScenarioSpec("one-sparse", n=10))
        r = run_trial(AlgorithmSpec("lil_ucb_theory"), inst, seed=0, max_pulls=5)
        assert not r.stopped and r.total_pulls == 5
        assert r.recommended is None and r.correct is None

    def test_checkpoints_before_full_sweep_are_errors(self):
        inst = make_scenario(ScenarioSpec("one-sparse", n=10))
        r = run_trial(AlgorithmSpec("lil_ucb_heuristic"), inst, seed=0, checkpoints=(3, 9, 10, 5000))
        assert r.anytime_errors[:2] == (True, True)
        assert r.anytime_errors[-1] is False

    def test_frozen_after_stop(self):
        inst = BanditInstance.from_means([3.0, 0.0])
        r = run_trial(AlgorithmSpec("lil_ucb_heuristic"), inst, seed=1, checkpoints=(2, 10**6))
        assert r.stopped and r.total_pulls < 10**6
        assert r.anytime_errors[-1] is False

    def test_rejects_unsorted_checkpoints(self):
        inst = BanditInstance.from_means([1.0, 0.0])
        with pytest.raises(ValueError):
            run_trial(AlgorithmSpec("ucb1"), inst, 0, checkpoints=(5, 5))

    def test_deterministic(self):
        inst = make_scenario(ScenarioSpec("alpha", n=10, alpha=0.3))
        spec = AlgorithmSpec("lil_ucb_theory")
        a = run_trial(spec, inst, seed=42, timing=False)
        b = run_trial(spec, inst, seed=42, timing=False)
        assert a == b


def small_config(**kw):
    base = dict(scenarios=[ScenarioSpec("one-sparse", n=5)],
                algorithms=[AlgorithmSpec("lil_ucb_heuristic"), AlgorithmSpec("successive_elimination")],
                trials=6, timing=False)
    base.update(kw)
    return ExperimentConfig(**base)


class TestExperiments:
    def test_stopping_csv(self):
        res = run_stopping_time_experiment(small_config())
        rows = list(csv.DictReader(io.StringIO(res.to_csv())))
        assert tuple(rows[0].keys()) == TRIAL_FIELDS
        assert len(rows) == 12
        assert {r["stopped"] for r in rows} == {"true"}
        assert {r["wall_ms"] for r in rows} == {""}
        agg = {a["algorithm"]: a for a in res.aggregates}
        assert agg["lil_ucb_heuristic"]["h1"] == pytest.approx(16.0)
        assert agg["lil_ucb_heuristic"]["trials"] == 6
        assert json.loads(res.to_json())["aggregates"]

    def test_workers_do_not_change_results(self):
        one = run_stopping_time_experiment(small_config(workers=1))
        two = run_stopping_time_experiment(small_config(workers=2))
        assert one.to_csv() == two.to_csv()

    def test_anytime_curve(self):
        cfg = small_config(max_pulls=2000)
        res = run_anytime_experiment(cfg)
        text = res.to_csv()
        rows = list(csv.DictReader(io.StringIO(text)))
        assert tuple(rows[0].keys()) == CURVE_FIELDS
        curve = res.curve("one-sparse", 5, "lil_ucb_heuristic")
        assert curve.checkpoints[0] == 5 and curve.checkpoints[-1] == 2000
        assert curve.error_rates[-1] == 0.0
        with pytest.raises(KeyError):
            res.curve("one-sparse", 5, "ucb1")

    def test_early_error_near_symmetric(self):
        # nearly tied arms: at the first checkpoint the leader is close to uniform
        n = 5
        scen = ScenarioSpec("explicit", means=(1e-3,) + (0.0,) * (n - 1))
        cfg = ExperimentConfig([scen], [AlgorithmSpec("lil_ucb_heuristic")], trials=2000,
                               checkpoints=[n], max_pulls=n, timing=False)
        err = run_anytime_experiment(cfg).curves[0].error_rates[0]
        expected = (n - 1) / n
        assert abs(err - expected) < 4 * np.sqrt(expected * (1 - expected) / 2000)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            small_config(trials=0)
        with pytest.raises(ValueError):
            small_config(checkpoints=[5, 3])
        with pytest.raises(ValueError):
            ExperimentConfig.from_dict({"scenarios": [], "algorithms": [{"kind": "ucb1"}]})
        with pytest.raises(ValueError):
            ExperimentConfig.from_dict({"scenarios": [{"kind": "one-sparse", "n": 3}],
                                        "algorithms": [{"kind": "ucb1"}], "bogus": 1})

    def test_config_round_trip(self):
        cfg = small_config(nu=0.05, master_seed=7)
        again = ExperimentConfig.from_json(json.dumps(cfg.to_dict()))
        assert again.to_dict() == cfg.to_dict()
        assert all(a.nu == 0.05 for a in again.algorithms)
        alias = ExperimentConfig.from_dict({**cfg.to_dict(), "parallelism": 3})
        assert alias.workers == cfg.workers
        d = cfg.to_dict()
        del d["workers"]
        assert ExperimentConfig.from_dict({**d, "parallelism": 3}).workers == 3


class TestVerifyLil:
    def test_envelope(self):
        env = lil_envelope(3, 1.0, 0.05, 2.0)
        t = np.arange(1, 4)
        expected = 2.0 * 2 * np.sqrt(4 * t * np.log(np.log(2 * t) / 0.05))
        np.testing.assert_allclose(env, expected, rtol=1e-14)

    def test_sigma_scaling(self):
        a = verify_lil_bound(1.0, 0.05, sigma=1.0, horizon=2000, num_walks=300, seed=3)
        b = verify_lil_bound(1.0, 0.05, sigma=2.0, horizon=2000, num_walks=300, seed=3)
        assert a.failures == b.failures
        assert a.bound == pytest.approx(lil_failure_probability(1.0, 0.05))

    def test_deterministic(self):
        a = verify_lil_bound(0.5, 0.1, horizon=500, num_walks=200, seed=9)
        b = verify_lil_bound(0.5, 0.1, horizon=500, num_walks=200, seed=9)
        assert a == b

    def test_invalid_params(self):
        with pytest.raises(ValueError, match="delta"):
            verify_lil_bound(0.01, 0.1, horizon=10, num_walks=10)
        with pytest.raises(ValueError):
            verify_lil_bound(1.0, 0.05, horizon=0)
