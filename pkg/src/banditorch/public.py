"""Contextual GP-UCB for clouds without a hard resource cap.

Each round the agent sees a context, scores every candidate action joined with
that context by ``mean + sqrt(zeta_t) * sd`` under the reward GP, runs the
argmax, and adds the noisy reward ``alpha * perf - beta * cost`` to a sliding
window. The same class, with ``use_context=False`` and/or EI acquisition,
backs the context-free baselines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gp
from .encoding import (
    ActionSpace,
    ActionVector,
    ContextVector,
    candidate_matrix,
    enumerate_candidates,
    joint_points,
    normalize,
    normalize_actions,
)
from .gp import ContractError, DataWindow, KernelParams
from .metrics import RegretRecord, record_step

TIE_TOL = 1e-12


@dataclass(frozen=True)
class RewardWeights:
    alpha: float = 0.5
    beta: float = 0.5

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or self.alpha + self.beta <= 0:
            raise ContractError("reward weights must be non-negative with a positive sum")


def reward(perf: float, cost: float, w: RewardWeights = RewardWeights()) -> float:
    if not (math.isfinite(perf) and math.isfinite(cost)):
        raise ContractError("reward inputs must be finite")
    return w.alpha * perf - w.beta * cost


@dataclass(frozen=True)
class ZetaSchedule:
    """Exploration weight ``zeta_t``.

    ``theoretical``: ``2 B^2 + 300 gamma_t log^3(t / delta)`` with ``gamma_t``
    either ``gamma_scale * log(t + 1)`` or the constant ``gamma_value``;
    ``gamma_scale=None`` means the joint input dimension.
    ``practical``: ``c * log(t + 1)``.
    """

    mode: str = "practical"
    B: float = 1.0
    delta: float = 0.1
    c: float = 0.02
    gamma_scale: float | None = None
    gamma_value: float | None = None

    def __post_init__(self):
        if self.mode not in ("theoretical", "practical"):
            raise ContractError(f"unknown zeta mode {self.mode!r}")
        if not 0 < self.delta < 1:
            raise ContractError("delta must lie in (0, 1)")
        if self.B <= 0 or self.c <= 0:
            raise ContractError("B and c must be > 0")

    def gamma(self, t: int, dim: int = 13) -> float:
        if self.gamma_value is not None:
            return self.gamma_value
        scale = dim if self.gamma_scale is None else self.gamma_scale
        return scale * math.log(t + 1)


def zeta(t: int, sched: ZetaSchedule, dim: int = 13) -> float:
    if t < 1:
        raise ContractError("zeta is defined for t >= 1")
    if sched.mode == "practical":
        return sched.c * math.log(t + 1)
    return 2 * sched.B**2 + 300 * sched.gamma(t, dim) * math.log(t / sched.delta) ** 3


def default_kernel(dim: int, action_lengthscale: float = 4.0, context_lengthscale: float = 2.0,
                   signal_variance: float = 0.05, noise_variance: float = 1e-4) -> KernelParams:
    ls = [action_lengthscale] * 7 + [context_lengthscale] * (dim - 7)
    return KernelParams(tuple(ls), signal_variance=signal_variance, noise_variance=noise_variance)


def window_prior_mean(window: DataWindow, rule: str) -> float:
    if rule == "zero" or not len(window):
        return 0.0
    y = window.y
    return float(np.mean(y) if rule == "mean" else np.min(y))


class GpBandit:
    """GP bandit over a fixed candidate set: observe context, score, act, learn.

    Parameters
    ----------
    space : ActionSpace
    kernel : KernelParams, optional
        Must match the joint dimension (7 action coordinates plus 6 context
        coordinates, 5 without the spot dimension, none when context-free).
    weights : RewardWeights
        ``alpha=1, beta=0`` optimizes performance alone.
    zeta_schedule : ZetaSchedule
    acquisition : {"ucb", "ei"}
    use_context : bool
        False drops the context from the GP input (context-free baselines).
    prior_mean : {"zero", "mean", "min", "floor"}
        Constant GP prior mean: zero, the window's mean or minimum reward, or
        ``floor``, the lowest reward observed so far (kept after the point
        itself has left the window). The pessimistic rules stop the agent from
        re-exploring regions merely because the window forgot them.
    """

    name = "gp-bandit"

    def __init__(self, space: ActionSpace | None = None, kernel: KernelParams | None = None,
                 weights: RewardWeights = RewardWeights(), zeta_schedule: ZetaSchedule = ZetaSchedule(),
                 window: int = 30, budget: int = 500, seed: int = 0, include_spot: bool = True,
                 use_context: bool = True, acquisition: str = "ucb", prior_mean: str = "floor",
                 candidates: list[ActionVector] | None = None, extra_candidates=()):
        self.space = space or ActionSpace()
        self.include_spot = include_spot
        self.use_context = use_context
        self.dim = 7 + ((6 if include_spot else 5) if use_context else 0)
        self.kernel = kernel or default_kernel(self.dim)
        if self.kernel.dim != self.dim:
            raise ContractError(f"kernel has {self.kernel.dim} lengthscales, joint dimension is {self.dim}")
        if acquisition not in ("ucb", "ei"):
            raise ContractError(f"unknown acquisition {acquisition!r}")
        self.acquisition = acquisition
        self.weights = weights
        self.zeta_schedule = zeta_schedule
        if prior_mean not in ("zero", "mean", "min", "floor"):
            raise ContractError(f"unknown prior mean rule {prior_mean!r}")
        self.prior_mean = prior_mean
        self.seed = seed
        self.t = 0
        self.y_floor = math.inf
        self.window = DataWindow(window)
        self.posterior = gp.fit(self.window, self.kernel)
        cands = list(candidates) if candidates is not None else enumerate_candidates(self.space, budget, seed)
        keys = {c.key() for c in cands}
        for x in extra_candidates:
            if x.key() not in keys:
                cands.append(x)
                keys.add(x.key())
        if not cands:
            raise ContractError("empty candidate set")
        self.candidates = cands
        self._C = candidate_matrix(cands)
        self._Cn = normalize_actions(self._C, self.space)
        self._tiebreak = np.lexsort(self._C.T[::-1])  # lexicographic rank
        rank = np.empty(len(cands), dtype=int)
        rank[self._tiebreak] = np.arange(len(cands))
        self._lex_rank = rank
        self._modeled_cost = self.space.modeled_cost(self._C)
        self.records: list[RegretRecord] = []

    # ------------------------------------------------------------------ model
    def _ctx(self, context):
        return context if self.use_context else None

    def joint(self, action: ActionVector, context: ContextVector | None) -> np.ndarray:
        return normalize(action, self._ctx(context), self.space, self.include_spot)

    def candidate_points(self, context: ContextVector | None) -> np.ndarray:
        return joint_points(self._Cn, self._ctx(context), self.include_spot)

    def _prior_mean(self) -> float:
        if self.prior_mean == "floor":
            return self.y_floor if len(self.window) else 0.0
        return window_prior_mean(self.window, self.prior_mean)

    def refit(self):
        self.posterior = gp.fit(self.window, self.kernel, prior_mean=self._prior_mean())

    def zeta_t(self) -> float:
        return zeta(self.t + 1, self.zeta_schedule, self.dim)

    def scores(self, context: ContextVector | None, mask=None) -> np.ndarray:
        Z = self.candidate_points(context)
        if self.acquisition == "ucb":
            s = gp.ucb_scores(self.posterior, Z, self.zeta_t())
        else:
            best = float(np.max(self.window.y)) if len(self.window) else 0.0
            s = gp.ei_scores(self.posterior, Z, best)
        if mask is not None:
            s = np.where(mask, s, -np.inf)
        return s

    def _argmax(self, scores: np.ndarray) -> int:
        top = np.max(scores)
        if not np.isfinite(top):
            raise ContractError("no admissible candidate")
        tied = np.flatnonzero(scores >= top - TIE_TOL * max(1.0, abs(top)))
        order = np.lexsort((self._lex_rank[tied], self._modeled_cost[tied]))
        return int(tied[order[0]])

    # ------------------------------------------------------------------ loop
    def select_action(self, context: ContextVector | None) -> ActionVector:
        return self.candidates[self._argmax(self.scores(context))]

    def observe(self, action: ActionVector, context: ContextVector | None, y: float) -> "GpBandit":
        if not math.isfinite(y):
            raise ContractError("observed reward must be finite")
        self.window.push(self.joint(action, context), y)
        self.y_floor = min(self.y_floor, y)
        self.refit()
        self.t += 1
        return self

    def objective(self, perf: float, cost: float) -> float:
        return reward(perf, cost, self.weights)

    def step(self, env, action: ActionVector | None = None, phase: str = "exploit") -> RegretRecord:
        """One round: observe context, choose (unless ``action`` is forced), run, learn."""
        ctx = env.sample_context()
        x = self.select_action(ctx) if action is None else action
        rec, ev = record_step(env, ctx, self._C, x, phase)
        rec.observed = self.objective(ev.perf, ev.cost)
        rec.extra["evaluation"] = ev
        self.observe(x, ctx, rec.observed)
        self.records.append(rec)
        return rec


class PublicBandit(GpBandit):
    name = "drone-public"
