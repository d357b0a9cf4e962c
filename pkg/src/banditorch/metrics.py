"""Regret accounting, brute-force oracles and summary statistics."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .encoding import ActionVector, ContextVector, candidate_matrix
from .gp import ContractError

CSV_COLUMNS = ("t", "scenario", "agent", "seed", "achieved", "oracle", "regret",
               "cum_regret", "cost", "violation", "oom", "phase")


class InfeasibleError(RuntimeError):
    """No candidate satisfies the resource constraint."""


@dataclass
class RegretRecord:
    t: int
    context: ContextVector
    action: ActionVector
    achieved: float
    oracle: float
    regret: float
    cost: float
    usage: np.ndarray
    violation: bool
    oom: bool
    phase: str
    oracle_action: ActionVector | None = None
    observed: float = float("nan")
    extra: dict = field(default_factory=dict)


def _as_matrix(candidates) -> np.ndarray:
    if isinstance(candidates, np.ndarray):
        return np.atleast_2d(candidates)
    candidates = list(candidates)
    if not candidates:
        raise ContractError("oracle needs at least one candidate")
    return candidate_matrix(candidates)


def oracle_best(env, context: ContextVector, candidates, constraint=None) -> tuple[ActionVector, float]:
    """Exhaustive noiseless argmax of the environment's reward over ``candidates``.

    With a ``constraint`` (anything exposing ``as_array()`` in raw resource
    units) only candidates whose true usage stays within it are eligible.
    Ties go to the first candidate in list order.
    """
    A = _as_matrix(candidates)
    if len(A) == 0:
        raise ContractError("oracle needs at least one candidate")
    r = env.true_reward_many(A, context)
    if constraint is not None:
        cap = np.asarray(constraint.as_array(), dtype=float)
        ok = np.all(env.true_usage_many(A, context) <= cap[None, :], axis=1)
        if not ok.any():
            raise InfeasibleError("no candidate satisfies the resource constraint")
        r = np.where(ok, r, -np.inf)
    i = int(np.argmax(r))
    return ActionVector.from_array(A[i]), float(r[i])


def record_step(env, context: ContextVector, candidates, action: ActionVector, phase: str,
                constraint=None) -> tuple[RegretRecord, "object"]:
    """Score ``action`` against the oracle, then run it in ``env``.

    The oracle is evaluated on ``candidates`` plus the executed action, before
    the environment clock moves.
    """
    A = np.vstack([_as_matrix(candidates), action.as_array()[None, :]])
    oracle_x, oracle_v = oracle_best(env, context, A, constraint)
    achieved = env.true_reward(action, context)
    ev = env.evaluate(action, context)
    violation = bool(np.any(ev.true_usage > env.limits())) if env.is_private else False
    rec = RegretRecord(
        t=env.t,  # already advanced: records are 1-indexed
        context=context, action=action, achieved=achieved, oracle=oracle_v,
        regret=oracle_v - achieved, cost=ev.cost, usage=ev.true_usage,
        violation=violation, oom=ev.oom, phase=phase, oracle_action=oracle_x,
    )
    return rec, ev


def cumulative_regret(records: Sequence) -> np.ndarray:
    """Prefix sums of instantaneous regret. Accepts records or raw numbers."""
    vals = [r.regret if isinstance(r, RegretRecord) else float(r) for r in records]
    return np.cumsum(np.asarray(vals, dtype=float))


def regret_totals(records: Sequence[RegretRecord], exploration_phase: str = "explore") -> dict:
    """Total regret with and without the exploration-phase steps."""
    total = float(sum(r.regret for r in records))
    explore = float(sum(r.regret for r in records if r.phase == exploration_phase))
    return {"inclusive": total, "exclusive": total - explore, "exploration": explore}


def violation_stats(records: Sequence[RegretRecord]) -> dict:
    n = len(records)
    count = sum(r.violation for r in records)
    by_phase: dict[str, dict] = {}
    for r in records:
        p = by_phase.setdefault(r.phase, {"steps": 0, "violations": 0, "oom": 0})
        p["steps"] += 1
        p["violations"] += int(r.violation)
        p["oom"] += int(r.oom)
    for p in by_phase.values():
        p["rate"] = p["violations"] / p["steps"]
    return {
        "count": int(count),
        "rate": count / n if n else 0.0,
        "oom": int(sum(r.oom for r in records)),
        "by_phase": by_phase,
    }


def cost_saving(records_agent: Sequence, records_baseline: Sequence) -> float:
    """``1 - sum(agent cost) / sum(baseline cost)`` over equal horizons."""
    if len(records_agent) != len(records_baseline):
        raise ContractError("cost saving needs equal horizons")
    a = sum(r.cost if isinstance(r, RegretRecord) else float(r) for r in records_agent)
    b = sum(r.cost if isinstance(r, RegretRecord) else float(r) for r in records_baseline)
    if b == 0:
        raise ZeroDivisionError("baseline cost is zero; saving ratio undefined")
    return 1.0 - a / b


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def records_to_rows(records: Sequence[RegretRecord], scenario: str, agent: str, seed: int) -> list[dict]:
    cum = cumulative_regret(records)
    return [
        {"t": r.t, "scenario": scenario, "agent": agent, "seed": seed, "achieved": r.achieved,
         "oracle": r.oracle, "regret": r.regret, "cum_regret": float(c), "cost": r.cost,
         "violation": r.violation, "oom": r.oom, "phase": r.phase}
        for r, c in zip(records, cum)
    ]


def write_csv(rows: Iterable[dict], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])


def csv_text(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()
