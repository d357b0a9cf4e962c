import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banditorch.encoding import ActionSpace, ActionVector, ContextVector
from banditorch.gp import ContractError
from banditorch.sim import (
    BUILTIN_SCENARIOS,
    InterferenceProcess,
    ScenarioConfig,
    SimEnv,
    SpotPriceProcess,
    builtin_scenario,
    load_trace,
)

SPACE = ActionSpace()
# network contended in every zone
CONTENDED = ContextVector(0.6, 0.1, 0.1, 0.8, 15, 0.3)
X = ActionVector((2, 2, 2, 2), 1000, 2048, 200)


def env(name="public-batch", seed=0, **kw):
    return SimEnv(builtin_scenario(name, **kw), seed=seed)


def actions():
    pods = st.lists(st.integers(0, 8), min_size=4, max_size=4)
    return st.builds(lambda p, c, r, n: ActionVector(tuple(p), 100 * c, 128 * r, 10 * n),
                     pods, st.integers(1, 40), st.integers(1, 64), st.integers(1, 100))


class TestContext:
    def test_idle_baseline(self):
        e = env(interference=dict(enabled=False))
        c = e.sample_context(0)
        assert np.allclose(c.utilization, 0.1)
        assert c.contention_code == 0

    def test_private_has_no_spot(self):
        e = env("private-batch", seed=3)
        for _ in range(30):
            assert e.sample_context().spot_price_factor == 0.0
            e.advance()
        assert e.context_dim == 5 and not e.include_spot

    def test_same_seed_same_context(self):
        a, b = env(seed=9), env(seed=9)
        assert [a.sample_context(t) for t in range(20)] == [b.sample_context(t) for t in range(20)]
        assert a.sample_context(5) != env(seed=10).sample_context(5)

    def test_contention_follows_net_utilization(self):
        e = env(seed=4)
        for t in range(60):
            s = e._state(t)
            util = np.clip(s.background, 0, 1)
            assert e.sample_context(t).contended_zones == {z for z in range(4) if util[2, z] > 0.7}

    def test_footprint_feeds_next_context_when_enabled(self):
        e = env(interference=dict(enabled=False), context_includes_footprint=True)
        big = ActionVector((8, 8, 8, 8), 4000, 8192, 1000)
        e.evaluate(big)
        assert np.all(e.sample_context().utilization > 0.1)

    def test_negative_t(self):
        with pytest.raises(ContractError):
            env().sample_context(-1)


class TestPerf:
    def test_zero_workload_is_best(self):
        for name in ("public-batch", "public-microservice"):
            e = env(name)
            assert e.true_perf(X, ContextVector(0.0, 0.1, 0.1, 0.1, 0, 0.3)) == 0.0

    def test_no_pods_is_worst(self):
        e = env()
        assert e.true_perf(ActionVector((0, 0, 0, 0), 1000, 1024, 100), CONTENDED) == -1.0

    def test_ram_below_knee_helps(self):
        e = env()
        lo = ActionVector((2, 2, 2, 2), 1000, 1024, 200)
        hi = ActionVector((2, 2, 2, 2), 1000, 2048, 200)
        assert e.true_perf(hi, CONTENDED) > e.true_perf(lo, CONTENDED)

    def test_ram_above_knee_hurts_when_spread_and_contended(self):
        e = env()
        at_knee = ActionVector((2, 2, 2, 2), 1000, 4096, 200)
        above = ActionVector((2, 2, 2, 2), 1000, 8192, 200)
        assert e.true_perf(above, CONTENDED) < e.true_perf(at_knee, CONTENDED)

    @pytest.mark.parametrize("name", ["public-batch", "public-microservice"])
    def test_colocated_beats_spread(self, name):
        e = env(name)
        ctx = ContextVector(0.6, 0.1, 0.1, 0.1, 0, 0.3)
        together = ActionVector((8, 0, 0, 0), 2000, 4096, 200)
        spread = ActionVector((2, 2, 2, 2), 2000, 4096, 200)
        assert e.true_perf(together, ctx) >= e.true_perf(spread, ctx)

    def test_out_of_bounds(self):
        with pytest.raises(ContractError):
            env().true_perf(ActionVector((9, 0, 0, 0), 1000, 1024, 100), CONTENDED)

    @given(actions(), st.floats(0, 1), st.floats(0, 1), st.integers(0, 15),
           st.sampled_from(["public-batch", "public-microservice", "private-batch", "private-planted"]))
    @settings(max_examples=60)
    def test_ranges(self, x, w, u, code, name):
        e = env(name)
        ctx = ContextVector(w, u, u, u, code, 0.3)
        assert -1.0 <= e.true_perf(x, ctx) <= 0.0
        assert 0.0 <= e.cost(x, ctx) <= 1.0
        assert np.all(e.true_usage(x, ctx) <= e.capacity * 2.5)


class TestUsage:
    def test_zero_pods_is_background(self):
        e = env(seed=2)
        assert np.array_equal(e.true_usage(ActionVector((0, 0, 0, 0), 1000, 1024, 100)), e.background_usage())

    def test_footprint_additive(self):
        e = env(seed=2)
        u = lambda p: e.true_usage(ActionVector((p, 0, 0, 0), 1000, 1024, 100))
        assert np.allclose(u(4) - u(0), 2 * (u(2) - u(0)))

    @given(actions(), st.integers(0, 6))
    def test_monotone_in_allocation(self, x, dim):
        e = env(seed=2)
        a = x.as_array()
        b = a.copy()
        b[dim] = min(b[dim] + SPACE.steps[dim], SPACE.hi[dim])
        assert np.all(e.true_usage(ActionVector.from_array(b)) >= e.true_usage(ActionVector.from_array(a)))


class TestCost:
    def test_zero_allocation(self):
        assert env().cost(ActionVector((0, 0, 0, 0), 1000, 1024, 100), CONTENDED) == 0.0

    def test_on_demand_arithmetic(self):
        e = env()
        x = ActionVector((1, 0, 0, 0), 1000, 1024, 100)
        unit = 0.031611 * 1.0 + 0.004237 * 1.0 + 0.012 * 0.1
        top = 32 * (0.031611 * 4.0 + 0.004237 * 8.0 + 0.012 * 1.0)
        assert e.cost(x, CONTENDED, coverage=0.0) == pytest.approx(unit / top, rel=1e-12)

    def test_spot_saving(self):
        e = env()
        ctx = ContextVector(0.5, 0.1, 0.1, 0.1, 0, 1 / 6)
        ratio = e.cost(X, ctx, coverage=0.0) / e.cost(X, ctx, coverage=1.0)
        assert ratio == pytest.approx(6.0)

    def test_spot_never_dearer(self):
        e = env(seed=5)
        for _ in range(50):
            ctx = e.sample_context()
            assert e.cost(X, ctx) <= e.cost(X, ctx, coverage=0.0)
            e.advance()


class TestEvaluate:
    def test_noise_free(self):
        e = env(perf_noise=0.0, usage_noise=0.0)
        ctx = e.sample_context()
        want = e.true_perf(X, ctx)
        ev = e.evaluate(X, ctx)
        assert ev.perf == want and np.array_equal(ev.usage, ev.true_usage)

    def test_oom(self):
        e = env()
        ctx = ContextVector(1.0, 0.1, 0.1, 0.1, 0, 0.3)
        ev = e.evaluate(ActionVector((2, 2, 2, 2), 1000, 128, 100), ctx)
        assert ev.oom and ev.starved and ev.true_perf == -1.0

    def test_cap_oom_in_private(self):
        e = env("private-batch", interference=dict(enabled=False))
        big = ActionVector((8, 8, 8, 8), 1000, 8192, 100)
        ev = e.evaluate(big)
        assert ev.oom and not ev.starved and ev.true_perf == -1.0

    def test_same_seed_same_noise(self):
        def run(seed):
            e = env(seed=seed)
            return [(ev.perf, tuple(ev.usage), ev.oom) for ev in (e.evaluate(X) for _ in range(20))]
        assert run(1) == run(1)
        assert run(1) != run(2)

    def test_clock(self):
        e = env()
        for k in range(1, 6):
            e.evaluate(X)
            assert e.t == k and e.clock == 60.0 * k

    def test_pod_utilization(self):
        e = env(interference=dict(enabled=False))
        ctx = e.sample_context()
        x = ActionVector((2, 0, 2, 0), 1000, 2048, 100)
        u = e.pod_utilization(x, ctx)
        per_pod = 24000.0 * ctx.workload_intensity / 4 / (1000 * (1 - 0.5 * 0.1))
        assert np.isnan(u[1]) and np.isnan(u[3])
        assert u[0] == pytest.approx(min(per_pod, 1.0))


class TestProcesses:
    def test_interference_rate(self):
        proc = InterferenceProcess()
        rng = np.random.default_rng(0)
        lam = proc.expected_events(60.0)
        assert lam == 5.0
        counts = [proc.sample(rng, 60.0, 4)[1] for _ in range(10_000)]
        assert abs(np.mean(counts) - lam) <= 0.05 * lam

    def test_interference_intensity_range(self):
        rng = np.random.default_rng(1)
        proc = InterferenceProcess(baseline=0.0)
        for _ in range(500):
            bg, k = proc.sample(rng, 60.0, 4)
            # overlapping events add up, then clamp
            assert bg.min() >= 0 and bg.max() <= 1.0 and bg.sum() <= 0.5 * k

    def test_spot_walk_bounded(self):
        e = env(seed=8)
        for _ in range(500):
            s = e.state
            assert 0.1 <= s.spot_factor <= 0.5 and 0.10 <= s.coverage <= 0.30
            e.advance()

    def test_spot_step(self):
        rng = np.random.default_rng(0)
        proc = SpotPriceProcess(step_sd=1.0)
        f = 0.3
        for _ in range(100):
            f, cov = proc.step(f, rng)
            assert 0.1 <= f <= 0.5

    def test_workload_nonnegative(self):
        for name in BUILTIN_SCENARIOS:
            e = env(name)
            assert all(0 <= e.sample_context(t).workload_intensity <= 1 for t in range(100))

    def test_trace_replay(self, tmp_path):
        p = tmp_path / "trace.txt"
        p.write_text("interval=60\n10\n20\n40\n")
        vals, interval = load_trace(p)
        assert interval == 60.0 and list(vals) == [0.25, 0.5, 1.0]
        e = env(workload=dict(generator="file-replay", path=str(p)), interference=dict(enabled=False))
        assert [e.sample_context(t).workload_intensity for t in range(3)] == [0.25, 0.5, 1.0]
        with pytest.raises(ContractError):
            e.sample_context(3)

    def test_bad_trace(self, tmp_path):
        p = tmp_path / "trace.txt"
        p.write_text("10\n20\n")
        with pytest.raises(ContractError):
            load_trace(p)


class TestConfig:
    @pytest.mark.parametrize("name", sorted(BUILTIN_SCENARIOS))
    def test_round_trip(self, name):
        cfg = builtin_scenario(name)
        again = ScenarioConfig.from_dict(json.loads(cfg.to_json()))
        assert again.to_dict() == cfg.to_dict()

    def test_defaults(self):
        cfg = ScenarioConfig()
        assert np.array_equal(cfg.capacities.totals(), [120000.0, 460800.0, 15000.0])
        assert cfg.decision_period == 60.0 and cfg.limits.ram_fraction == 0.65
        assert builtin_scenario("public-batch").mode == "quasi-online"
        assert builtin_scenario("public-microservice").mode == "online"

    def test_rejects(self):
        with pytest.raises(ContractError):
            ScenarioConfig(scenario="hybrid")
        with pytest.raises(ContractError):
            ScenarioConfig.from_dict({"scenario": "public-batch", "colour": 1})
        with pytest.raises(ContractError):
            ScenarioConfig.from_dict({"model": {"kind": "batch", "bogus": 2}})
        with pytest.raises(ContractError):
            builtin_scenario("nope")
        with pytest.raises(ContractError):
            ScenarioConfig(perf_noise=-1.0)

    def test_load_file(self, tmp_path):
        p = tmp_path / "s.json"
        p.write_text(builtin_scenario("private-batch").to_json())
        assert ScenarioConfig.load(p).to_dict() == builtin_scenario("private-batch").to_dict()

    def test_private_limits(self):
        e = env("private-batch")
        assert np.allclose(e.limits(), e.capacity * [1.0, 0.65, 1.0])
