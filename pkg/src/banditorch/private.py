"""Two-phase safe contextual bandit for resource-capped clouds.

Phase one draws uniformly from a set of actions known to respect the caps and
records both performance and resource usage. Phase two keeps one GP for
performance and one per resource; an action is admissible when the lower
confidence bound of each usage GP stays within its cap, and the admissible
action with the highest performance UCB is played.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gp
from .encoding import ActionSpace, ActionVector, ContextVector, RESOURCES
from .gp import ContractError, DataWindow, KernelParams
from .metrics import RegretRecord, record_step
from .public import GpBandit, RewardWeights, ZetaSchedule, default_kernel, window_prior_mean, zeta

EXPLORATION = "explore"
EXPLOITATION = "exploit"


@dataclass(frozen=True)
class ResourceLimit:
    """Cluster-wide caps in raw units: millicores, MiB, Mbps."""

    cpu: float
    ram: float
    net: float

    def __post_init__(self):
        if min(self.cpu, self.ram, self.net) <= 0:
            raise ContractError("every resource cap must be > 0")

    def as_array(self) -> np.ndarray:
        return np.array([self.cpu, self.ram, self.net], dtype=float)

    @classmethod
    def from_env(cls, env) -> "ResourceLimit":
        return cls(*env.limits())


def performance_kernel(dim: int = 12, action_lengthscale: float = 2.0, context_lengthscale: float = 2.0,
                       signal_variance: float = 0.05, noise_variance: float = 1e-4) -> KernelParams:
    return default_kernel(dim, action_lengthscale, context_lengthscale, signal_variance, noise_variance)


def usage_kernel(dim: int = 12, action_lengthscale: float = 2.0, context_lengthscale: float = 0.5,
                 signal_variance: float = 1e-4, noise_variance: float = 1e-4) -> KernelParams:
    """Kernel for the usage residual left after the footprint-plus-context mean."""
    return default_kernel(dim, action_lengthscale, context_lengthscale, signal_variance, noise_variance)


class SafeBandit(GpBandit):
    """Safe two-phase bandit.

    Usage GPs work in fractions of ``capacity``. With ``usage_prior="footprint"``
    each usage GP's prior mean is the action's requested allocation (known to
    the orchestrator) plus the utilization reported in the context, and the GP
    learns what that misses. ``"constant"`` drops the structured mean and uses
    the window average alone.
    """

    name = "drone-private"

    def __init__(self, space: ActionSpace | None = None, limit: ResourceLimit | None = None,
                 capacity=None, initial_safe_set: list[ActionVector] | None = None,
                 explore_steps: int = 10, kernel: KernelParams | None = None,
                 usage_kernel_params: KernelParams | None = None,
                 beta_schedule: ZetaSchedule = ZetaSchedule(c=0.02), window: int = 30,
                 budget: int = 500, seed: int = 0, usage_prior: str = "footprint",
                 prior_mean: str = "floor", candidates=None):
        if limit is None or capacity is None:
            raise ContractError("safe bandit needs a resource limit and the cluster capacity")
        if not initial_safe_set:
            raise ContractError("initial safe set must be non-empty")
        if explore_steps < 0:
            raise ContractError("exploration duration must be >= 0")
        if usage_prior not in ("footprint", "constant"):
            raise ContractError(f"unknown usage prior {usage_prior!r}")
        super().__init__(space, kernel or performance_kernel(), weights=RewardWeights(1.0, 0.0), zeta_schedule=beta_schedule,
                         window=window, budget=budget, seed=seed, include_spot=False,
                         use_context=True, acquisition="ucb", prior_mean=prior_mean,
                         candidates=candidates, extra_candidates=initial_safe_set)
        self.limit = limit
        self.capacity = np.asarray(capacity, dtype=float)
        self._limit_frac = limit.as_array() / self.capacity
        self.initial_safe_set = list(initial_safe_set)
        self.explore_steps = int(explore_steps)
        self.usage_prior = usage_prior
        self.usage_kernel = usage_kernel_params or usage_kernel(self.dim)
        if self.usage_kernel.dim != self.dim:
            raise ContractError("usage kernel dimension does not match the joint dimension")
        self.usage_windows = [DataWindow(window) for _ in RESOURCES]
        self.usage_posteriors = [gp.fit(w, self.usage_kernel) for w in self.usage_windows]
        self._anchor = np.zeros(len(self.candidates), dtype=bool)
        anchor_keys = {x.key() for x in self.initial_safe_set}
        for i, c in enumerate(self.candidates):
            self._anchor[i] = c.key() in anchor_keys
        self._rng = np.random.default_rng(seed)

    # ------------------------------------------------------------------ state
    @property
    def phase(self) -> str:
        return EXPLORATION if self.t < self.explore_steps else EXPLOITATION

    def beta_t(self) -> float:
        return zeta(self.t + 1, self.zeta_schedule, self.dim)

    def _footprint_frac(self, A) -> np.ndarray:
        A = np.atleast_2d(A)
        m = self.space.n_zones
        return A[:, :m].sum(axis=1)[:, None] * A[:, m:] / self.capacity[None, :]

    def _usage_offset(self, A, context: ContextVector) -> np.ndarray:
        if self.usage_prior == "footprint":
            return self._footprint_frac(A) + context.utilization[None, :]
        return np.zeros((len(np.atleast_2d(A)), len(RESOURCES)))

    def refit_usage(self):
        self.usage_posteriors = [gp.fit(w, self.usage_kernel, prior_mean=window_prior_mean(w, "mean"))
                                 for w in self.usage_windows]

    # ------------------------------------------------------------------ safe set
    def usage_bounds(self, A, context: ContextVector) -> tuple[np.ndarray, np.ndarray]:
        """Posterior usage mean and sd (fractions of capacity) per candidate row and resource."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        Z = self._joint_rows(A, context)
        mean = np.empty((len(A), len(RESOURCES)))
        sd = np.empty_like(mean)
        for r, post in enumerate(self.usage_posteriors):
            m, v = gp.predict_many(post, Z)
            mean[:, r], sd[:, r] = m, np.sqrt(v)
        return mean + self._usage_offset(A, context), sd

    def _joint_rows(self, A, context):
        from .encoding import joint_points, normalize_actions
        return joint_points(normalize_actions(A, self.space), context, include_spot=False)

    def usage_lcb(self, x, context: ContextVector) -> np.ndarray:
        """``mean - sqrt(beta_t) * sd`` per resource, as fractions of capacity."""
        A = x.as_array()[None, :] if isinstance(x, ActionVector) else x
        mean, sd = self.usage_bounds(A, context)
        lcb = mean - math.sqrt(self.beta_t()) * sd
        return lcb[0] if isinstance(x, ActionVector) else lcb

    def _safe_mask(self, context: ContextVector) -> np.ndarray:
        mean, sd = self.usage_bounds(self._C, context)
        lcb = mean - math.sqrt(self.beta_t()) * sd
        return np.all(lcb <= self._limit_frac[None, :], axis=1) | self._anchor

    def compute_safe_set(self, context: ContextVector, candidates=None) -> list[ActionVector]:
        if candidates is None:
            return [c for c, ok in zip(self.candidates, self._safe_mask(context)) if ok]
        candidates = list(candidates)
        if not candidates:
            raise ContractError("candidate list is empty")
        A = np.vstack([c.as_array() for c in candidates])
        lcb = self.usage_lcb(A, context)
        anchor = {x.key() for x in self.initial_safe_set}
        ok = np.all(lcb <= self._limit_frac[None, :], axis=1)
        return [c for c, k in zip(candidates, ok) if k or c.key() in anchor]

    # ------------------------------------------------------------------ actions
    def select_safe_action(self, context: ContextVector) -> ActionVector:
        if self.phase != EXPLOITATION:
            raise ContractError("safe selection is only valid after the exploration phase")
        return self.candidates[self._argmax(self.scores(context, mask=self._safe_mask(context)))]

    def select_action(self, context: ContextVector) -> ActionVector:
        if self.phase == EXPLORATION:
            return self.initial_safe_set[int(self._rng.integers(len(self.initial_safe_set)))]
        return self.select_safe_action(context)

    def is_admissible(self, x: ActionVector, context: ContextVector) -> bool:
        return bool(np.all(self.usage_lcb(x, context) <= self._limit_frac))

    def observe(self, action: ActionVector, context: ContextVector, y: float, usage=None) -> "SafeBandit":
        if usage is None:
            raise ContractError("safe bandit observations need the measured resource usage")
        usage = np.asarray(usage, dtype=float)
        if not (math.isfinite(y) and np.all(np.isfinite(usage))):
            raise ContractError("observations must be finite")
        z = self.joint(action, context)
        resid = usage / self.capacity - self._usage_offset(action.as_array(), context)[0]
        for w, v in zip(self.usage_windows, resid):
            w.push(z, v)
        self.refit_usage()
        return super().observe(action, context, y)

    def _play(self, env, x: ActionVector, ctx: ContextVector, phase: str) -> RegretRecord:
        rec, ev = record_step(env, ctx, self._C, x, phase, constraint=self.limit)
        rec.observed = ev.perf
        rec.extra["evaluation"] = ev
        self.observe(x, ctx, ev.perf, ev.usage)
        self.records.append(rec)
        return rec

    def explore_step(self, env) -> RegretRecord:
        if self.phase != EXPLORATION:
            raise ContractError("exploration phase is over")
        ctx = env.sample_context()
        return self._play(env, self.select_action(ctx), ctx, EXPLORATION)

    def step(self, env, action: ActionVector | None = None, phase: str | None = None) -> RegretRecord:
        if action is None and self.phase == EXPLORATION:
            return self.explore_step(env)
        ctx = env.sample_context()
        x = self.select_safe_action(ctx) if action is None else action
        return self._play(env, x, ctx, phase or self.phase)
