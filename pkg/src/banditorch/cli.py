"""Command-line entry point: ``banditorch run | list-scenarios | validate``."""

from __future__ import annotations

import argparse
import json
import sys

from .gp import ContractError, NumericalError
from .harness import AGENTS, ConfigError, ExperimentConfig, RunError, run_experiment
from .metrics import InfeasibleError
from .sim import BUILTIN_SCENARIOS, builtin_scenario

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="banditorch", description="Contextual-bandit cloud orchestration experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment from a JSON config")
    run.add_argument("--config", required=True)
    run.add_argument("--seed-override", type=int, default=None, help="run only this seed")
    run.add_argument("--output", default=None, help="directory for CSV and summary files")
    run.add_argument("--agent", default=None, choices=AGENTS)
    sub.add_parser("list-scenarios", help="print the built-in scenarios")
    val = sub.add_parser("validate", help="check a config without running it")
    val.add_argument("--config", required=True)
    return p


def _load(path: str, agent=None, seed=None, output=None) -> ExperimentConfig:
    try:
        cfg = ExperimentConfig.load(path)
    except OSError as e:
        raise ConfigError([f"<file>: cannot read {path} ({e.strerror})"]) from e
    if agent is not None:
        cfg.agent = agent
    if seed is not None:
        cfg.seeds = [seed]
    if output is not None:
        cfg.output = output
    return cfg.validate()


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    out, err = sys.stdout, sys.stderr
    if args.command == "list-scenarios":
        for name in sorted(BUILTIN_SCENARIOS):
            s = builtin_scenario(name)
            out.write(f"{name}\t{s.scenario}\t{s.mode}\t{s.model.kind}\n")
        return EXIT_OK
    try:
        cfg = _load(args.config, getattr(args, "agent", None), getattr(args, "seed_override", None),
                    getattr(args, "output", None))
    except ConfigError as e:
        for p in e.problems:
            err.write(f"invalid: {p}\n")
        return EXIT_INVALID
    if args.command == "validate":
        out.write("ok\n")
        return EXIT_OK
    try:
        result = run_experiment(cfg)
    except (RunError, ContractError, NumericalError, InfeasibleError, OSError) as e:
        err.write(f"error: {e}\n")
        return EXIT_RUNTIME
    if cfg.output is None:
        for text in result.csv.values():
            out.write(text)
    out.write(json.dumps(result.summary["aggregate"], indent=2, sort_keys=True) + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
