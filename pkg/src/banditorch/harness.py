"""Experiment wiring: agents, start-up and recovery heuristics, seeded runs, CSV output."""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .encoding import ActionSpace, ActionVector
from .gp import ContractError
from .metrics import (
    RegretRecord,
    cost_saving,
    csv_text,
    record_step,
    records_to_rows,
    regret_totals,
    violation_stats,
)
from .private import ResourceLimit, SafeBandit, performance_kernel, usage_kernel
from .public import GpBandit, PublicBandit, RewardWeights, ZetaSchedule, default_kernel
from .sim import BUILTIN_SCENARIOS, ScenarioConfig, SimEnv, builtin_scenario

AGENTS = ("drone-public", "drone-private", "gp-ucb-nocontext", "ei-nocontext", "rule-based")
RECOVERING_AGENTS = ("drone-public", "drone-private")
ONLINE_FAILURE_STREAK = 3
SCALE_UP, SCALE_DOWN = 0.7, 0.3

# agent_params keys and the defaults each agent falls back to
AGENT_PARAM_KEYS = (
    "zeta_mode", "zeta_c", "B", "delta", "action_lengthscale", "context_lengthscale",
    "signal_variance", "noise_variance", "window", "budget", "prior_mean", "explore_steps",
    "usage_prior", "usage_action_lengthscale", "usage_context_lengthscale",
    "usage_signal_variance", "usage_noise_variance",
)


class ConfigError(ValueError):
    """Invalid experiment configuration; ``problems`` lists the offending keys."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid experiment config: " + "; ".join(self.problems))


class RunError(RuntimeError):
    pass


# ---------------------------------------------------------------------- config
@dataclass
class ExperimentConfig:
    scenario: str = "public-batch"
    agent: str = "drone-public"
    horizon: int = 200
    seeds: list = field(default_factory=lambda: list(range(10)))
    mode: str | None = None
    output: str | None = None
    scenario_overrides: dict = field(default_factory=dict)
    agent_params: dict = field(default_factory=dict)
    compare_rule_based: bool = True

    def problems(self) -> list[str]:
        out = []
        if self.agent not in AGENTS:
            out.append(f"agent: unknown agent {self.agent!r}")
        if not isinstance(self.horizon, int) or isinstance(self.horizon, bool) or self.horizon < 1:
            out.append("horizon: must be an integer >= 1")
        if not isinstance(self.seeds, list) or not self.seeds:
            out.append("seeds: must be a non-empty list")
        elif not all(isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in self.seeds):
            out.append("seeds: entries must be non-negative integers")
        if self.mode not in (None, "online", "quasi-online"):
            out.append(f"mode: unknown mode {self.mode!r}")
        if not isinstance(self.agent_params, dict):
            out.append("agent_params: must be a mapping")
        else:
            out += [f"agent_params.{k}: unknown parameter" for k in self.agent_params if k not in AGENT_PARAM_KEYS]
        if not isinstance(self.scenario_overrides, dict):
            out.append("scenario_overrides: must be a mapping")
            return out
        try:
            scn = self.scenario_config()
        except (ContractError, OSError, ValueError, TypeError) as e:
            out.append(f"scenario: {e}")
        else:
            if self.agent == "drone-private" and not scn.is_private:
                out.append(f"agent: drone-private needs a private scenario, got {scn.scenario!r}")
        return out

    def validate(self) -> "ExperimentConfig":
        problems = self.problems()
        if problems:
            raise ConfigError(problems)
        return self

    def scenario_config(self) -> ScenarioConfig:
        if self.scenario in BUILTIN_SCENARIOS:
            cfg = builtin_scenario(self.scenario, **self.scenario_overrides)
        else:
            path = Path(self.scenario)
            if not path.is_file():
                raise ContractError(f"{self.scenario!r} is neither a built-in scenario nor a file")
            d = json.loads(path.read_text())
            d.update(self.scenario_overrides)
            cfg = ScenarioConfig.from_dict(d)
        if self.mode is not None:
            d = cfg.to_dict()
            d["mode"] = self.mode
            cfg = ScenarioConfig.from_dict(d)
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError(["<root>: config must be a JSON object"])
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError([f"{k}: unknown key" for k in unknown])
        d = dict(d)
        if "seeds" in d and isinstance(d["seeds"], tuple):
            d["seeds"] = list(d["seeds"])
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            d = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise ConfigError([f"<file>: not valid JSON ({e})"]) from e
        return cls.from_dict(d)


# ---------------------------------------------------------------------- heuristics
def initial_action(env: SimEnv) -> ActionVector:
    """Half of what is currently free, per resource; equal pods per zone, at least one each."""
    space = env.space
    m = space.n_zones
    free = 0.5 * (1.0 - env.sample_context().utilization)
    pods = max(1, int(round(float(free.min()) * space.hi[:m].max())))
    a = np.concatenate([np.full(m, pods, dtype=float), free * space.hi[m:]])
    return ActionVector.from_array(space.snap(a))


def safe_initial_action(env: SimEnv) -> ActionVector:
    """``initial_action`` shrunk toward the lower bounds until it respects the caps."""
    x = initial_action(env)
    space = env.space
    for _ in range(32):
        if env.is_safe(x):
            return x
        a = x.as_array()
        a = space.snap(np.maximum(space.lo, a / 2.0))
        a[: space.n_zones] = np.maximum(a[: space.n_zones], 1)
        x = ActionVector.from_array(a)
    raise RunError("no safe starting action: the caps are below the smallest deployable allocation")


def recover(failed: ActionVector, space: ActionSpace) -> ActionVector:
    """Restart configuration after a failure: halfway from ``failed`` to the maximum on the
    allocation dimensions, rounded up to the grid. Pod counts are kept unless there are none."""
    if not space.contains(failed):
        raise ContractError("failed action outside the action space")
    m = space.n_zones
    a = failed.as_array()
    top = space.snap(space.hi)
    k = np.ceil(((a + top) / 2.0 - space.lo) / space.steps - 1e-9)
    up = np.minimum(space.lo + k * space.steps, top)
    out = a.copy()
    out[m:] = up[m:]
    if a[:m].sum() == 0:
        out[:m] = up[:m]
    return ActionVector.from_array(out)


def rule_based_step(action: ActionVector, pod_utilization, space: ActionSpace,
                    up: float = SCALE_UP, down: float = SCALE_DOWN) -> ActionVector:
    """Threshold autoscaler: one pod more in a zone whose pods run hotter than ``up``,
    one fewer below ``down``; allocations untouched, never fewer than one pod overall."""
    m = space.n_zones
    util = np.asarray(pod_utilization, dtype=float)
    pods = np.array(action.pods_per_zone, dtype=int)
    for z in range(m):
        u = util[z]
        if not math.isfinite(u):
            continue
        if u > up:
            pods[z] = min(pods[z] + 1, int(space.hi[z]))
        elif u < down and pods[z] > 0 and pods.sum() > 1:
            pods[z] -= 1
    return ActionVector(tuple(pods), action.cpu_per_pod, action.ram_per_pod, action.net_bw_per_pod)


# ---------------------------------------------------------------------- agents
class RuleBasedAgent:
    name = "rule-based"

    def __init__(self, start: ActionVector, space: ActionSpace, constraint=None, candidates=None,
                 budget: int = 500, seed: int = 0):
        from .encoding import candidate_matrix, enumerate_candidates
        self.action = start
        self.space = space
        self.constraint = constraint
        self._C = candidate_matrix(candidates or enumerate_candidates(space, budget, seed))
        self.records: list[RegretRecord] = []

    def step(self, env, action: ActionVector | None = None, phase: str = "exploit") -> RegretRecord:
        ctx = env.sample_context()
        x = self.action if action is None else action
        rec, ev = record_step(env, ctx, self._C, x, phase, constraint=self.constraint)
        rec.observed = ev.perf
        rec.extra["evaluation"] = ev
        self.action = rule_based_step(x, ev.pod_utilization, self.space)
        self.records.append(rec)
        return rec


def _zeta(params: dict, default_c: float) -> ZetaSchedule:
    return ZetaSchedule(mode=params.get("zeta_mode", "practical"), B=params.get("B", 1.0),
                        delta=params.get("delta", 0.1), c=params.get("zeta_c", default_c))


def make_agent(name: str, env: SimEnv, seed: int, start: ActionVector, params: dict | None = None):
    params = dict(params or {})
    space = env.space
    private = env.is_private
    weights = RewardWeights(1.0, 0.0) if private else RewardWeights(env.config.alpha, env.config.beta)
    common = dict(window=params.get("window", 30), budget=params.get("budget", 500), seed=seed)
    if name == "rule-based":
        return RuleBasedAgent(start, space, ResourceLimit.from_env(env) if private else None,
                              budget=common["budget"], seed=seed)
    if name == "drone-private":
        kern = performance_kernel(12, params.get("action_lengthscale", 2.0), params.get("context_lengthscale", 2.0),
                                  params.get("signal_variance", 0.05), params.get("noise_variance", 1e-4))
        ukern = usage_kernel(12, params.get("usage_action_lengthscale", 2.0),
                             params.get("usage_context_lengthscale", 0.5),
                             params.get("usage_signal_variance", 1e-4), params.get("usage_noise_variance", 1e-4))
        return SafeBandit(space, ResourceLimit.from_env(env), env.capacity, [start],
                          explore_steps=params.get("explore_steps", 10), kernel=kern,
                          usage_kernel_params=ukern, beta_schedule=_zeta(params, 0.02),
                          usage_prior=params.get("usage_prior", "footprint"),
                          prior_mean=params.get("prior_mean", "floor"), **common)
    use_context = name == "drone-public"
    include_spot = not private
    dim = 7 + ((6 if include_spot else 5) if use_context else 0)
    kern = default_kernel(dim, params.get("action_lengthscale", 4.0), params.get("context_lengthscale", 2.0),
                          params.get("signal_variance", 0.05), params.get("noise_variance", 1e-4))
    cls = PublicBandit if use_context else GpBandit
    agent = cls(space, kern, weights, _zeta(params, 0.02), include_spot=include_spot, use_context=use_context,
                acquisition="ei" if name == "ei-nocontext" else "ucb",
                prior_mean=params.get("prior_mean", "floor"), extra_candidates=[start], **common)
    agent.name = name
    return agent


# ---------------------------------------------------------------------- runs
def _failed(rec: RegretRecord, streak: int, batch: bool) -> bool:
    if batch:
        return rec.oom
    return streak >= ONLINE_FAILURE_STREAK


def run_seed(cfg: ExperimentConfig, scenario: ScenarioConfig, seed: int, agent_name: str | None = None):
    """One (env, agent) pair for ``horizon`` steps; returns the records."""
    agent_name = agent_name or cfg.agent
    env = SimEnv(scenario, seed=seed)
    start = safe_initial_action(env) if env.is_private else initial_action(env)
    agent = make_agent(agent_name, env, seed, start, cfg.agent_params)
    batch = scenario.mode == "quasi-online"
    records, streak, pending = [], 0, None
    for t in range(cfg.horizon):
        if t == 0 and not isinstance(agent, SafeBandit):
            rec = agent.step(env, action=start, phase="exploit")
        elif pending is not None:
            rec = agent.step(env, action=pending, phase="recovery")
        else:
            rec = agent.step(env)
        pending = None
        streak = streak + 1 if rec.oom else 0
        if agent_name in RECOVERING_AGENTS and _failed(rec, streak, batch):
            x = recover(rec.action, env.space)
            admissible = x != rec.action
            if isinstance(agent, SafeBandit):
                admissible = admissible and agent.phase == "exploit" and agent.is_admissible(x, env.sample_context())
            if admissible:
                pending, streak = x, 0
        records.append(rec)
    return records


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: dict  # seed -> list[RegretRecord]
    csv: dict  # seed -> str
    summary: dict


def _seed_summary(records, baseline) -> dict:
    regrets = np.array([r.regret for r in records])
    T = len(records)
    vs = violation_stats(records)
    exploit = [r for r in records if r.phase != "explore"]
    out = {
        "R_T": float(regrets.sum()),
        "R_T_over_T": float(regrets.sum() / T),
        "R_T_excluding_exploration": regret_totals(records)["exclusive"],
        "violations": vs["count"],
        "violation_rate": vs["rate"],
        "exploit_violation_rate": (sum(r.violation for r in exploit) / len(exploit)) if exploit else 0.0,
        "oom": vs["oom"],
        "recoveries": sum(r.phase == "recovery" for r in records),
        "total_cost": float(sum(r.cost for r in records)),
    }
    if baseline is not None:
        out["rule_based_cost"] = float(sum(r.cost for r in baseline))
        try:
            out["cost_saving_vs_rule_based"] = cost_saving(records, baseline)
        except ZeroDivisionError:
            out["cost_saving_vs_rule_based"] = None
    return out


def _aggregate(per_seed: dict) -> dict:
    keys = next(iter(per_seed.values())).keys()
    agg = {}
    for k in keys:
        vals = [v[k] for v in per_seed.values() if v[k] is not None]
        if vals:
            agg[k] = {"mean": float(np.mean(vals)), "min": float(np.min(vals)), "max": float(np.max(vals))}
    return agg


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> ExperimentResult:
    cfg.validate()
    scenario = cfg.scenario_config()
    records, csvs, per_seed = {}, {}, {}
    for seed in cfg.seeds:
        recs = run_seed(cfg, scenario, seed)
        base = None
        if cfg.compare_rule_based:
            base = recs if cfg.agent == "rule-based" else run_seed(cfg, scenario, seed, "rule-based")
        records[seed] = recs
        csvs[seed] = csv_text(records_to_rows(recs, scenario.name, cfg.agent, seed))
        per_seed[str(seed)] = _seed_summary(recs, base)
    summary = {"scenario": scenario.name, "agent": cfg.agent, "horizon": cfg.horizon,
               "seeds": list(cfg.seeds), "mode": scenario.mode,
               "per_seed": per_seed, "aggregate": _aggregate(per_seed)}
    result = ExperimentResult(cfg, records, csvs, summary)
    if write and cfg.output:
        write_outputs(result)
    return result


def output_stem(cfg: ExperimentConfig, scenario_name: str) -> str:
    return f"{scenario_name}_{cfg.agent}"


def _atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + ".partial")
    tmp.write_text(text, newline="")
    os.replace(tmp, path)


def write_outputs(result: ExperimentResult) -> list[Path]:
    """Write one CSV per seed and a JSON summary. A failed write leaves ``*.partial`` behind."""
    out = Path(result.config.output)
    stem = output_stem(result.config, result.summary["scenario"])
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for seed, text in result.csv.items():
            p = out / f"{stem}_seed{seed}.csv"
            _atomic_write(p, text)
            written.append(p)
        p = out / f"{stem}_summary.json"
        _atomic_write(p, json.dumps(result.summary, indent=2, sort_keys=True) + "\n")
        written.append(p)
    except OSError as e:
        raise RunError(f"writing results to {out} failed: {e}") from e
    return written
