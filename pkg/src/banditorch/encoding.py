"""Numeric encoding of orchestration decisions and cloud context.

An action is a 7-vector: pods per zone (4 zones) followed by per-pod CPU
(millicores), RAM (MiB) and network bandwidth (Mbps). A context is a 6-vector:
workload intensity, CPU/RAM/network utilization, a zone contention bitmask and
the spot price factor. Both are mapped into the unit cube before they reach
the GP.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gp import ContractError

N_ZONES = 4
ACTION_DIM = N_ZONES + 3
CONTEXT_DIM = 6
RESOURCES = ("cpu", "ram", "net")


@dataclass(frozen=True, order=True)
class ActionVector:
    pods_per_zone: tuple[int, ...]
    cpu_per_pod: int
    ram_per_pod: int
    net_bw_per_pod: int

    def __post_init__(self):
        object.__setattr__(self, "pods_per_zone", tuple(int(p) for p in self.pods_per_zone))
        for name in ("cpu_per_pod", "ram_per_pod", "net_bw_per_pod"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if any(p < 0 for p in self.pods_per_zone):
            raise ContractError("pod counts must be non-negative")

    @property
    def total_pods(self) -> int:
        return sum(self.pods_per_zone)

    @property
    def per_pod(self) -> np.ndarray:
        return np.array([self.cpu_per_pod, self.ram_per_pod, self.net_bw_per_pod], dtype=float)

    def footprint(self) -> np.ndarray:
        """Total allocated cpu, ram, net across all pods."""
        return self.total_pods * self.per_pod

    def as_array(self) -> np.ndarray:
        return np.array([*self.pods_per_zone, self.cpu_per_pod, self.ram_per_pod,
                         self.net_bw_per_pod], dtype=float)

    @classmethod
    def from_array(cls, a) -> "ActionVector":
        a = np.rint(np.asarray(a, dtype=float)).astype(int)
        m = len(a) - 3
        return cls(tuple(a[:m]), a[m], a[m + 1], a[m + 2])

    def key(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self.as_array())


@dataclass(frozen=True)
class ContextVector:
    workload_intensity: float
    cpu_util: float
    ram_util: float
    net_util: float
    contention_code: int = 0
    spot_price_factor: float = 0.0
    n_zones: int = N_ZONES

    def __post_init__(self):
        for name in ("workload_intensity", "cpu_util", "ram_util", "net_util", "spot_price_factor"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise ContractError(f"{name}={v} outside [0, 1]")
            object.__setattr__(self, name, v)
        if not 0 <= self.contention_code < 2**self.n_zones:
            raise ContractError(f"contention_code {self.contention_code} outside [0, 2^{self.n_zones})")

    @property
    def utilization(self) -> np.ndarray:
        return np.array([self.cpu_util, self.ram_util, self.net_util])

    @property
    def contended_zones(self) -> set[int]:
        return decode_contention(self.contention_code, self.n_zones)

    def as_array(self) -> np.ndarray:
        return np.array([self.workload_intensity, self.cpu_util, self.ram_util, self.net_util,
                         self.contention_code, self.spot_price_factor], dtype=float)


@dataclass(frozen=True)
class ActionSpace:
    """Box bounds and grid steps for the seven action dimensions."""

    lower: tuple[float, ...] = (0, 0, 0, 0, 100, 128, 10)
    upper: tuple[float, ...] = (8, 8, 8, 8, 4000, 8192, 1000)
    step: tuple[float, ...] = (1, 1, 1, 1, 100, 128, 10)
    n_zones: int = N_ZONES

    def __post_init__(self):
        lo, hi, st = (np.asarray(v, dtype=float) for v in (self.lower, self.upper, self.step))
        if not (lo.shape == hi.shape == st.shape == (self.n_zones + 3,)):
            raise ContractError("bounds and steps must have n_zones + 3 entries")
        if np.any(lo >= hi):
            raise ContractError("lower bound must be < upper bound in every dimension")
        if np.any(st <= 0):
            raise ContractError("grid steps must be > 0")
        for name in ("lower", "upper", "step"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))

    @property
    def lo(self) -> np.ndarray:
        return np.asarray(self.lower)

    @property
    def hi(self) -> np.ndarray:
        return np.asarray(self.upper)

    @property
    def steps(self) -> np.ndarray:
        return np.asarray(self.step)

    @property
    def grid_sizes(self) -> np.ndarray:
        return np.floor((self.hi - self.lo) / self.steps + 1e-9).astype(int) + 1

    def contains(self, action: ActionVector) -> bool:
        a = action.as_array()
        return len(a) == len(self.lower) and bool(np.all(a >= self.lo) and np.all(a <= self.hi))

    def snap(self, values) -> np.ndarray:
        """Round to the nearest grid point, clipping into bounds."""
        v = np.asarray(values, dtype=float)
        k = np.clip(np.rint((v - self.lo) / self.steps), 0, self.grid_sizes - 1)
        return self.lo + k * self.steps

    def midpoint(self) -> ActionVector:
        return ActionVector.from_array(self.snap((self.lo + self.hi) / 2))

    def maximum(self) -> ActionVector:
        return ActionVector.from_array(self.snap(self.hi))

    def modeled_cost(self, A) -> np.ndarray:
        """Allocation-proportional cost proxy in [0, 1], used only for tie-breaking."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        m = self.n_zones
        pods = A[:, :m].sum(axis=1) / self.hi[:m].sum()
        return pods * (A[:, m:] / self.hi[m:]).mean(axis=1)


def encode_contention(contended_zones, m: int = N_ZONES) -> int:
    if not 1 <= m <= 16:
        raise ContractError("zone count must be in [1, 16]")
    code = 0
    for i in contended_zones:
        if not 0 <= int(i) < m:
            raise ContractError(f"zone index {i} outside [0, {m})")
        code |= 1 << int(i)
    return code


def decode_contention(code: int, m: int = N_ZONES) -> set[int]:
    if not 0 <= int(code) < 2**m:
        raise ContractError(f"contention code {code} outside [0, 2^{m})")
    return {i for i in range(m) if (int(code) >> i) & 1}


def normalize_actions(A, space: ActionSpace) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if np.any(A < space.lo - 1e-9) or np.any(A > space.hi + 1e-9):
        raise ContractError("action outside the action space bounds")
    return (A - space.lo) / (space.hi - space.lo)


def normalize_context(context: ContextVector, include_spot: bool = True) -> np.ndarray:
    c = context.as_array()
    c[4] = c[4] / (2**context.n_zones - 1)
    return c if include_spot else c[:5]


def normalize(action: ActionVector, context: ContextVector | None, space: ActionSpace,
              include_spot: bool = True) -> np.ndarray:
    """Joint unit-cube point: 7 action coordinates then 6 (or 5) context coordinates."""
    a = normalize_actions(action.as_array(), space)[0]
    if context is None:
        return a
    return np.concatenate([a, normalize_context(context, include_spot)])


def joint_points(A_norm: np.ndarray, context: ContextVector | None, include_spot: bool = True) -> np.ndarray:
    """Append one context to every row of pre-normalized actions."""
    if context is None:
        return A_norm
    c = normalize_context(context, include_spot)
    return np.hstack([A_norm, np.broadcast_to(c, (len(A_norm), len(c)))])


def _corners(space: ActionSpace) -> np.ndarray:
    d = len(space.lower)
    bits = (np.arange(2**d)[:, None] >> np.arange(d)[None, :]) & 1
    return space.lo + bits * (space.snap(space.hi) - space.lo)


def enumerate_candidates(space: ActionSpace, budget: int = 500, seed: int = 0) -> list[ActionVector]:
    """Deterministic candidate set: grid midpoint, then (shuffled) grid corners,
    then Latin-hypercube samples snapped to the grid. Actions with zero pods are
    not deployable and are skipped; duplicates are dropped."""
    if budget < 1:
        raise ContractError("candidate budget must be >= 1")
    rng = np.random.default_rng(seed)
    m = space.n_zones
    out: list[np.ndarray] = []
    seen: set[tuple] = set()

    def add(a):
        key = tuple(a)
        if len(out) < budget and key not in seen and a[:m].sum() >= 1:
            seen.add(key)
            out.append(a)

    add(space.snap((space.lo + space.hi) / 2))
    corners = _corners(space)
    for a in corners[rng.permutation(len(corners))]:
        add(a)

    d = len(space.lower)
    for _ in range(20):
        k = budget - len(out)
        if k <= 0:
            break
        strata = np.stack([rng.permutation(k) for _ in range(d)], axis=1)
        u = (strata + rng.random((k, d))) / k
        for a in space.snap(space.lo + u * (space.hi - space.lo)):
            add(a)
    return [ActionVector.from_array(a) for a in out]


def candidate_matrix(candidates) -> np.ndarray:
    return np.vstack([c.as_array() for c in candidates])
