"""Seeded simulator of a shared, zoned container cluster.

The environment hides three ground-truth functions of (action, context):
application performance, resource usage and monetary cost. Contexts are driven
by a workload trace, zonal interference events and a spot-price walk. All
randomness flows from one seed; process trajectories and observation noise
use separate streams so that every agent sees the same cloud for a given seed.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .encoding import (
    N_ZONES,
    ActionSpace,
    ActionVector,
    ContextVector,
    encode_contention,
    normalize_actions,
)
from .gp import ContractError

SCENARIO_KINDS = ("public-batch", "public-microservice", "private-batch", "private-microservice")
CONTENTION_THRESHOLD = 0.7
WORST_PERF = -1.0


@dataclass
class WorkloadTrace:
    """Workload intensity in [0, 1] per decision period.

    generator: ``diurnal`` (sinusoid), ``recurring-batch`` (a seeded repeating
    pattern of job sizes), ``alternating`` (cycles through ``levels``),
    ``constant`` or ``file-replay`` (``path``).
    """

    generator: str = "diurnal"
    baseline: float = 0.5
    amplitude: float = 0.3
    period: int = 24
    jitter: float = 0.0
    levels: list = field(default_factory=list)
    path: str | None = None
    interval: float = 60.0

    def __post_init__(self):
        allowed = ("diurnal", "recurring-batch", "alternating", "constant", "file-replay")
        if self.generator not in allowed:
            raise ContractError(f"unknown workload generator {self.generator!r}")
        if self.generator == "alternating" and not self.levels:
            raise ContractError("alternating workload needs levels")
        if self.generator == "file-replay" and self.path is None:
            raise ContractError("file-replay workload needs a path")
        self._replay = None
        self._pattern = None

    def replay_values(self) -> np.ndarray:
        if self._replay is None:
            self._replay, self.interval = load_trace(self.path)
        return self._replay

    def intensity(self, t: int, rng: np.random.Generator, pattern_seed: int = 0) -> float:
        g = self.generator
        if g == "constant":
            base = self.baseline
        elif g == "diurnal":
            base = self.baseline + self.amplitude * math.sin(2 * math.pi * t / self.period)
        elif g == "recurring-batch":
            if self._pattern is None:
                prng = np.random.default_rng(pattern_seed)
                self._pattern = prng.uniform(-1.0, 1.0, size=max(int(self.period), 1))
            base = self.baseline + self.amplitude * self._pattern[t % len(self._pattern)]
        elif g == "alternating":
            base = self.levels[t % len(self.levels)]
        else:
            vals = self.replay_values()
            if t >= len(vals):
                raise ContractError(f"replay trace has {len(vals)} samples, step {t} requested")
            base = vals[t]
        if self.jitter > 0:
            base += self.jitter * rng.standard_normal()
        return float(np.clip(base, 0.0, 1.0))


def load_trace(path) -> tuple[np.ndarray, float]:
    """Read a replay trace: header ``interval=<seconds>``, then one intensity per line.

    Values are scaled by the trace maximum so they land in [0, 1].
    """
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ContractError(f"empty trace file {path}")
    header = lines[0].lstrip("#").strip()
    key, _, val = header.partition("=")
    if key.strip() != "interval":
        raise ContractError(f"trace header must be 'interval=<seconds>', got {lines[0]!r}")
    values = np.array([float(v) for v in lines[1:]])
    if values.size == 0 or np.any(values < 0):
        raise ContractError("trace needs at least one non-negative intensity")
    peak = values.max()
    return (values / peak if peak > 0 else values), float(val)


@dataclass
class InterferenceProcess:
    """Poisson interference events; each hits one resource in one zone with an
    intensity drawn uniformly from [0, max_intensity] of that zone's capacity."""

    enabled: bool = True
    rate_per_second: float = 0.5
    max_events: int = 5
    max_intensity: float = 0.5
    baseline: float = 0.1

    def expected_events(self, period: float) -> float:
        return min(self.rate_per_second * period, float(self.max_events))

    def sample(self, rng: np.random.Generator, period: float, n_zones: int) -> tuple[np.ndarray, int]:
        """Background utilization (resource x zone) and the number of events drawn."""
        bg = np.full((3, n_zones), self.baseline)
        if not self.enabled:
            return bg, 0
        k = int(rng.poisson(self.expected_events(period)))
        res = rng.integers(0, 3, size=k)
        zone = rng.integers(0, n_zones, size=k)
        amount = rng.uniform(0.0, self.max_intensity, size=k)
        np.add.at(bg, (res, zone), amount)
        return np.clip(bg, 0.0, 1.0), k


@dataclass
class SpotPriceProcess:
    """Spot price as a fraction of on-demand (bounded random walk) and the
    fraction of the bill covered by spot capacity, redrawn every step."""

    enabled: bool = True
    factor_low: float = 0.1
    factor_high: float = 0.5
    factor_init: float = 0.3
    step_sd: float = 0.05
    coverage_low: float = 0.10
    coverage_high: float = 0.30

    def step(self, factor: float, rng: np.random.Generator) -> tuple[float, float]:
        f = float(np.clip(factor + self.step_sd * rng.standard_normal(), self.factor_low, self.factor_high))
        cov = float(rng.uniform(self.coverage_low, self.coverage_high))
        return f, cov


@dataclass
class Capacities:
    workers: int = 15
    cpu_per_worker: float = 8000.0
    ram_per_worker: float = 30720.0
    net_per_worker: float = 1000.0

    def totals(self) -> np.ndarray:
        return self.workers * np.array([self.cpu_per_worker, self.ram_per_worker, self.net_per_worker])


@dataclass
class Prices:
    """On-demand prices per hour (resource-based billing)."""

    cpu_core_hour: float = 0.031611
    ram_gib_hour: float = 0.004237
    net_gbps_hour: float = 0.012


@dataclass
class PerfModel:
    """Parameters of the hidden performance function.

    ``batch``: elapsed time = compute + shuffle + inter-zone latency, where
    compute saturates in RAM at ``ram_knee`` and shuffle grows with pod spread,
    per-pod RAM (partition size) and network contention.
    ``microservice``: per-pod M/M/1 P90 sojourn time plus inter-zone hops.
    ``planted``: context-free quadratic bowl around ``target`` (normalized
    coords), shifted down by ``planted_floor``.
    """

    kind: str = "batch"
    work_scale: float = 1.0
    ram_knee: float = 4096.0
    cpu_exp: float = 0.7
    pod_exp: float = 0.85
    cpu_slowdown: float = 0.5
    net_slowdown: float = 0.5
    shuffle_coeff: float = 0.05
    contention_penalty: float = 2.0
    net_ref: float = 500.0
    interzone_latency_ms: float = 5.0
    latency_coeff: float = 0.01
    time_ref: float = 0.2
    peak_rps: float = 2000.0
    service_rate_per_core: float = 100.0
    latency_ref_ms: float = 100.0
    max_latency_ms: float = 5000.0
    contention_latency_ms: float = 10.0
    target: list = field(default_factory=list)
    target_weights: list = field(default_factory=list)
    planted_floor: float = 0.0
    ram_demand_mib: float = 512.0
    oom_safety: float = 0.9
    cpu_demand_mc: float = 24000.0

    def __post_init__(self):
        if self.kind not in ("batch", "microservice", "planted"):
            raise ContractError(f"unknown performance model {self.kind!r}")


@dataclass
class Limits:
    """Private-cloud caps as fractions of cluster capacity."""

    cpu_fraction: float = 1.0
    ram_fraction: float = 0.65
    net_fraction: float = 1.0
    cap_oom: bool = True


@dataclass
class ScenarioConfig:
    scenario: str = "public-batch"
    name: str = ""
    seed: int = 0
    horizon: int = 200
    decision_period: float = 60.0
    mode: str = ""
    alpha: float = 0.5
    beta: float = 0.5
    perf_noise: float = 0.01
    usage_noise: float = 0.005
    static_context: bool = False
    context_includes_footprint: bool = False
    capacities: Capacities = field(default_factory=Capacities)
    prices: Prices = field(default_factory=Prices)
    model: PerfModel = field(default_factory=PerfModel)
    workload: WorkloadTrace = field(default_factory=WorkloadTrace)
    interference: InterferenceProcess = field(default_factory=InterferenceProcess)
    spot: SpotPriceProcess = field(default_factory=SpotPriceProcess)
    limits: Limits = field(default_factory=Limits)
    space: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario not in SCENARIO_KINDS:
            raise ContractError(f"scenario must be one of {SCENARIO_KINDS}, got {self.scenario!r}")
        if not self.name:
            self.name = self.scenario
        if not self.mode:
            self.mode = "quasi-online" if self.is_batch else "online"
        if self.perf_noise < 0 or self.usage_noise < 0:
            raise ContractError("noise levels must be >= 0")
        if np.any(self.capacities.totals() <= 0):
            raise ContractError("capacities must be > 0")
        if self.decision_period <= 0:
            raise ContractError("decision period must be > 0")

    @property
    def is_private(self) -> bool:
        return self.scenario.startswith("private")

    @property
    def is_batch(self) -> bool:
        return self.scenario.endswith("batch")

    def action_space(self) -> ActionSpace:
        return ActionSpace(**self.space) if self.space else ActionSpace()

    def to_dict(self) -> dict:
        d = asdict(self)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        return _from_dict(cls, d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _from_dict(cls, d):
    if not isinstance(d, dict):
        raise ContractError(f"expected a mapping for {cls.__name__}")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(d) - known)
    if unknown:
        raise ContractError(f"unknown keys for {cls.__name__}: {', '.join(unknown)}")
    nested = _NESTED.get(cls, {})
    kwargs = {k: _from_dict(nested[k], v) if k in nested else v for k, v in d.items()}
    return cls(**kwargs)


_NESTED = {
    ScenarioConfig: {"capacities": Capacities, "prices": Prices, "model": PerfModel,
                     "workload": WorkloadTrace, "interference": InterferenceProcess,
                     "spot": SpotPriceProcess, "limits": Limits},
}


@dataclass
class Evaluation:
    perf: float
    usage: np.ndarray
    cost: float
    oom: bool
    starved: bool
    true_perf: float
    true_usage: np.ndarray
    pod_utilization: np.ndarray | None = None


@dataclass
class _State:
    workload: float
    background: np.ndarray
    spot_factor: float
    coverage: float
    events: int


class SimEnv:
    """One simulated cluster. ``t`` counts decision periods from 0."""

    def __init__(self, config: ScenarioConfig | None = None, seed: int | None = None):
        self.config = copy.deepcopy(config) if config is not None else ScenarioConfig()
        self.seed = self.config.seed if seed is None else int(seed)
        self.space = self.config.action_space()
        self.n_zones = self.space.n_zones
        self.capacity = self.config.capacities.totals()
        self.zone_capacity = self.capacity / self.n_zones
        proc_ss, noise_ss = np.random.SeedSequence(self.seed).spawn(2)
        self._proc_rng = np.random.default_rng(proc_ss)
        self._noise_rng = np.random.default_rng(noise_ss)
        self._states: list[_State] = []
        self.t = 0
        self.clock = 0.0
        self.prev_action: ActionVector | None = None
        self._max_cost = self._raw_cost(self.space.snap(self.space.hi)[None, :])[0]

    # ------------------------------------------------------------------ processes
    @property
    def is_private(self) -> bool:
        return self.config.is_private

    @property
    def include_spot(self) -> bool:
        return not self.is_private

    @property
    def context_dim(self) -> int:
        return 6 if self.include_spot else 5

    def _state(self, t: int) -> _State:
        if t < 0:
            raise ContractError("t must be >= 0")
        cfg = self.config
        while len(self._states) <= t:
            k = len(self._states)
            if cfg.static_context and self._states:
                self._states.append(self._states[0])
                continue
            w = cfg.workload.intensity(k, self._proc_rng, pattern_seed=self.seed)
            bg, events = cfg.interference.sample(self._proc_rng, cfg.decision_period, self.n_zones)
            prev = self._states[-1].spot_factor if self._states else cfg.spot.factor_init
            if cfg.spot.enabled:
                factor, cov = cfg.spot.step(prev, self._proc_rng)
            else:
                factor, cov = prev, 0.5 * (cfg.spot.coverage_low + cfg.spot.coverage_high)
            if self.is_private:
                cov = 0.0
            self._states.append(_State(w, bg, factor, cov, events))
        return self._states[t]

    @property
    def state(self) -> _State:
        return self._state(self.t)

    def _zone_footprint(self, action: ActionVector | None) -> np.ndarray:
        """Per-zone fraction of zone capacity taken by ``action``'s pods (resource x zone)."""
        if action is None or not self.config.context_includes_footprint:
            return np.zeros((3, self.n_zones))
        pods = np.asarray(action.pods_per_zone, dtype=float)
        return action.per_pod[:, None] * pods[None, :] / self.zone_capacity[:, None]

    def zone_utilization(self, t: int | None = None) -> np.ndarray:
        t = self.t if t is None else t
        return np.clip(self._state(t).background + self._zone_footprint(self.prev_action), 0.0, 1.0)

    def sample_context(self, t: int | None = None) -> ContextVector:
        t = self.t if t is None else t
        s = self._state(t)
        util = self.zone_utilization(t)
        contended = {z for z in range(self.n_zones) if util[2, z] > CONTENTION_THRESHOLD}
        cpu, ram, net = util.mean(axis=1)
        return ContextVector(
            workload_intensity=s.workload,
            cpu_util=float(cpu), ram_util=float(ram), net_util=float(net),
            contention_code=encode_contention(contended, self.n_zones),
            spot_price_factor=0.0 if self.is_private else s.spot_factor,
            n_zones=self.n_zones,
        )

    def advance(self) -> "SimEnv":
        self.t += 1
        self.clock += self.config.decision_period
        self._state(self.t)
        return self

    # ------------------------------------------------------------------ hidden functions
    def _arr(self, x) -> np.ndarray:
        A = x.as_array()[None, :] if isinstance(x, ActionVector) else np.atleast_2d(np.asarray(x, dtype=float))
        if np.any(A < self.space.lo - 1e-9) or np.any(A > self.space.hi + 1e-9):
            raise ContractError("action outside the action space bounds")
        return A

    def true_perf_many(self, A, ctx: ContextVector) -> np.ndarray:
        A = self._arr(A)
        kind = self.config.model.kind
        if kind == "planted":
            return self._planted_perf(A)
        if kind == "batch":
            return self._batch_perf(A, ctx)
        return self._microservice_perf(A, ctx)

    def true_perf(self, x: ActionVector, ctx: ContextVector) -> float:
        return float(self.true_perf_many(x, ctx)[0])

    def _split(self, A):
        m = self.n_zones
        pods = A[:, :m]
        n = pods.sum(axis=1)
        safe_n = np.where(n > 0, n, 1.0)
        frac = pods / safe_n[:, None]
        spread = 1.0 - np.sum(frac**2, axis=1)
        return pods, n, safe_n, frac, spread

    def _zone_efficiency(self, A, ctx: ContextVector, frac) -> np.ndarray:
        """Pod-weighted throughput factor from zones pushed past their CPU capacity."""
        m = self.n_zones
        load = ctx.cpu_util + A[:, :m] * A[:, m : m + 1] / self.zone_capacity[0]
        return np.sum(frac / np.maximum(1.0, load), axis=1)

    def _batch_perf(self, A, ctx: ContextVector) -> np.ndarray:
        p = self.config.model
        m = self.n_zones
        pods, n, safe_n, frac, spread = self._split(A)
        cores, ram, net = A[:, m] / 1000.0, A[:, m + 1], A[:, m + 2]
        work = p.work_scale * ctx.workload_intensity
        contended = sorted(ctx.contended_zones)
        cont = frac[:, contended].sum(axis=1) if contended else np.zeros(len(A))

        rate = (cores * (1 - p.cpu_slowdown * ctx.cpu_util)) ** p.cpu_exp * np.minimum(1.0, ram / p.ram_knee)
        with np.errstate(divide="ignore", invalid="ignore"):  # zero-pod rows are overwritten below
            compute = work / (safe_n**p.pod_exp * rate * self._zone_efficiency(A, ctx, frac))
            net_eff = net * (1 - p.net_slowdown * ctx.net_util)
            shuffle = (work * p.shuffle_coeff * spread * (ram / p.ram_knee)
                       * (1 + p.contention_penalty * cont) * p.net_ref / net_eff)
            latency = work * spread * p.interzone_latency_ms * p.latency_coeff
            T = compute + shuffle + latency
            perf = -T / (T + p.time_ref)
        return np.where(n > 0, perf, WORST_PERF)

    def _microservice_perf(self, A, ctx: ContextVector) -> np.ndarray:
        p = self.config.model
        m = self.n_zones
        pods, n, safe_n, frac, spread = self._split(A)
        cores, ram = A[:, m] / 1000.0, A[:, m + 1]
        w = ctx.workload_intensity
        if w == 0:
            return np.where(n > 0, 0.0, WORST_PERF)
        contended = sorted(ctx.contended_zones)
        cont = frac[:, contended].sum(axis=1) if contended else np.zeros(len(A))

        mu = (p.service_rate_per_core * cores * (1 - p.cpu_slowdown * ctx.cpu_util)
              * np.minimum(1.0, ram / p.ram_knee) * self._zone_efficiency(A, ctx, frac))
        lam = p.peak_rps * w / safe_n
        slack = mu - lam
        with np.errstate(divide="ignore"):
            p90 = np.where(slack > 1e-9, 1000.0 * math.log(10.0) / np.where(slack > 1e-9, slack, 1.0),
                           p.max_latency_ms)
        p90 = np.minimum(p90, p.max_latency_ms)
        # calls between pods in different zones pay the inter-zone latency
        net_ms = spread * p.interzone_latency_ms * 2 + cont * p.contention_latency_ms * (1 + ctx.net_util)
        L = p90 + net_ms
        perf = -L / (L + p.latency_ref_ms)
        return np.where(n > 0, perf, WORST_PERF)

    def _planted_perf(self, A) -> np.ndarray:
        p = self.config.model
        xn = normalize_actions(A, self.space)
        target = np.asarray(p.target, dtype=float)
        wts = np.asarray(p.target_weights or [1.0] * len(target), dtype=float)
        d = np.sum(wts * (xn - target) ** 2, axis=1)
        n = A[:, : self.n_zones].sum(axis=1)
        return np.where(n > 0, -np.minimum(p.planted_floor + d, 1.0), WORST_PERF)

    def background_usage(self, t: int | None = None) -> np.ndarray:
        """Usage by other tenants, in raw units (cpu millicores, ram MiB, net Mbps)."""
        bg = self._state(self.t if t is None else t).background
        return (bg * self.zone_capacity[:, None]).sum(axis=1)

    def true_usage_many(self, A, ctx: ContextVector | None = None) -> np.ndarray:
        A = self._arr(A)
        m = self.n_zones
        n = A[:, :m].sum(axis=1)
        return n[:, None] * A[:, m:] + self.background_usage()[None, :]

    def true_usage(self, x: ActionVector, ctx: ContextVector | None = None) -> np.ndarray:
        return self.true_usage_many(x, ctx)[0]

    def _raw_cost(self, A) -> np.ndarray:
        pr = self.config.prices
        m = self.n_zones
        n = A[:, :m].sum(axis=1)
        hourly = (pr.cpu_core_hour * A[:, m] / 1000.0 + pr.ram_gib_hour * A[:, m + 1] / 1024.0
                  + pr.net_gbps_hour * A[:, m + 2] / 1000.0)
        return n * hourly * self.config.decision_period / 3600.0

    def cost_many(self, A, ctx: ContextVector, coverage: float | None = None) -> np.ndarray:
        """Normalized bill: a ``coverage`` share is charged at the spot price."""
        A = self._arr(A)
        cov = self.state.coverage if coverage is None else coverage
        factor = (1.0 - cov) + cov * ctx.spot_price_factor
        return self._raw_cost(A) * factor / self._max_cost

    def cost(self, x: ActionVector, ctx: ContextVector, coverage: float | None = None) -> float:
        return float(self.cost_many(x, ctx, coverage)[0])

    def limits(self) -> np.ndarray:
        lim = self.config.limits
        return self.capacity * np.array([lim.cpu_fraction, lim.ram_fraction, lim.net_fraction])

    def ram_demand(self, ctx: ContextVector) -> float:
        return self.config.model.ram_demand_mib * (0.5 + 0.5 * ctx.workload_intensity)

    def starved_many(self, A, ctx: ContextVector) -> np.ndarray:
        A = self._arr(A)
        ram = A[:, self.n_zones + 1]
        return ram * self.config.model.oom_safety < self.ram_demand(ctx)

    def oom_many(self, A, ctx: ContextVector) -> np.ndarray:
        oom = self.starved_many(A, ctx)
        if self.is_private and self.config.limits.cap_oom:
            oom = oom | (self.true_usage_many(A, ctx)[:, 1] > self.limits()[1])
        return oom

    def violation_many(self, A, ctx: ContextVector | None = None) -> np.ndarray:
        return np.any(self.true_usage_many(A, ctx) > self.limits()[None, :], axis=1)

    def realized_perf_many(self, A, ctx: ContextVector) -> np.ndarray:
        return np.where(self.oom_many(A, ctx), WORST_PERF, self.true_perf_many(A, ctx))

    def true_reward_many(self, A, ctx: ContextVector) -> np.ndarray:
        """Noiseless objective: alpha*perf - beta*cost (public) or perf (private)."""
        perf = self.realized_perf_many(A, ctx)
        if self.is_private:
            return perf
        return self.config.alpha * perf - self.config.beta * self.cost_many(A, ctx)

    def true_reward(self, x: ActionVector, ctx: ContextVector) -> float:
        return float(self.true_reward_many(x, ctx)[0])

    def is_safe(self, x: ActionVector) -> bool:
        return not bool(self.violation_many(x)[0])

    def pod_utilization(self, x: ActionVector, ctx: ContextVector) -> np.ndarray:
        """CPU utilization of the application's pods in each zone (NaN where a zone has none).

        Batch demand is ``cpu_demand_mc * workload`` spread over all pods;
        microservice demand follows the request rate. Co-tenant CPU load in a
        zone shrinks the effective allocation."""
        p = self.config.model
        A = self._arr(x)
        m = self.n_zones
        pods, n = A[0, :m], max(A[0, :m].sum(), 1.0)
        w = ctx.workload_intensity
        if p.kind == "microservice":
            per_pod = 1000.0 * p.peak_rps * w / n / p.service_rate_per_core
        else:
            per_pod = p.cpu_demand_mc * w / n
        effective = A[0, m] * (1.0 - p.cpu_slowdown * self.state.background[0])
        util = np.clip(per_pod / effective, 0.0, 1.0)
        return np.where(pods > 0, util, np.nan)

    # ------------------------------------------------------------------ interaction
    def evaluate(self, x: ActionVector, ctx: ContextVector | None = None) -> Evaluation:
        """Run ``x`` for one decision period, observe noisy metrics, advance the clock."""
        ctx = self.sample_context() if ctx is None else ctx
        A = self._arr(x)
        starved = bool(self.starved_many(A, ctx)[0])
        oom = bool(self.oom_many(A, ctx)[0])
        perf = WORST_PERF if oom else float(self.true_perf_many(A, ctx)[0])
        usage = self.true_usage_many(A, ctx)[0]
        cost = float(self.cost_many(A, ctx)[0])
        pod_util = self.pod_utilization(x, ctx)
        noisy_perf = perf + self.config.perf_noise * self._noise_rng.standard_normal()
        noisy_usage = usage + self.config.usage_noise * self.capacity * self._noise_rng.standard_normal(3)
        self.prev_action = x
        self.advance()
        return Evaluation(noisy_perf, noisy_usage, cost, oom, starved, perf, usage, pod_util)


# ---------------------------------------------------------------------- built-in scenarios
BUILTIN_SCENARIOS: dict[str, dict] = {
    "public-batch": dict(
        scenario="public-batch",
        workload=dict(generator="recurring-batch", baseline=0.6, amplitude=0.15, period=7, jitter=0.02),
    ),
    "public-microservice": dict(
        scenario="public-microservice",
        model=dict(kind="microservice", ram_knee=2048.0),
        workload=dict(generator="diurnal", baseline=0.5, amplitude=0.35, period=360),
    ),
    "private-batch": dict(
        scenario="private-batch",
        model=dict(kind="batch", ram_knee=8192.0, shuffle_coeff=0.02),
        workload=dict(generator="recurring-batch", baseline=0.6, amplitude=0.15, period=7, jitter=0.02),
    ),
    "private-microservice": dict(
        scenario="private-microservice",
        model=dict(kind="microservice", ram_knee=4096.0),
        workload=dict(generator="diurnal", baseline=0.5, amplitude=0.35, period=360),
    ),
    "public-alternating": dict(
        scenario="public-batch",
        name="public-alternating",
        workload=dict(generator="alternating", levels=[0.1, 1.0]),
        interference=dict(enabled=False),
        spot=dict(enabled=False),
        context_includes_footprint=False,
    ),
    "private-planted": dict(
        scenario="private-batch",
        name="private-planted",
        model=dict(kind="planted", ram_demand_mib=0.0,
                   target=[1.0, 1.0, 1.0, 1.0, 0.5, 1.0, 0.5],
                   target_weights=[0.05, 0.05, 0.05, 0.05, 0.1, 0.5, 0.1], planted_floor=0.3),
        limits=dict(ram_fraction=0.35),
        workload=dict(generator="constant", baseline=0.5),
        interference=dict(enabled=False),
        spot=dict(enabled=False),
        static_context=True,
        context_includes_footprint=False,
    ),
}


def builtin_scenario(name: str, **overrides) -> ScenarioConfig:
    if name not in BUILTIN_SCENARIOS:
        raise ContractError(f"unknown scenario {name!r}; known: {', '.join(sorted(BUILTIN_SCENARIOS))}")
    d = copy.deepcopy(BUILTIN_SCENARIOS[name])
    d.update(overrides)
    return ScenarioConfig.from_dict(d)
