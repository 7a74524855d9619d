#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import argparse
import os
import sys
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from loguru import logger
from pydantic import ValidationError

from energyshare.analysis.pareto import egalitarian_solution, pareto_sweep
from energyshare.analysis.runner import SimulationJob, SimulationRunner
from energyshare.errors import ConfigError, EnergyShareError, ModelError, TraceError
from energyshare.models.model import SharingConfig, c_max, validate_model
from energyshare.presets import preset_names
from energyshare.serializers.experiment import ExperimentConfig, default_horizon, load_experiment
from energyshare.serializers.tables import (
    FrontierSerializer,
    SimulationSerializer,
    TrajectorySerializer,
    write_frontier_csv,
)
from energyshare.simulator.coupling import coupled_simulate, pathwise_check
from energyshare.simulator.state import DEFAULT_WARMUP_FRACTION, SimulationParams

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

DEFAULT_LOG_LEVEL = "INFO"


def setup_logging(level: Optional[str] = None):
    load_dotenv(override=True)
    level = level or os.getenv("ENERGYSHARE_LOG_LEVEL", DEFAULT_LOG_LEVEL)
    logger.remove()
    logger.add(sys.stderr, level=level.upper())


def _provenance(command: str, experiment: ExperimentConfig, **settings: Any) -> Dict[str, Any]:
    provenance = {"command": command, "experiment": experiment.model_dump(mode="json", exclude_none=True)}
    provenance.update(settings)
    return provenance


def _print_config(provenance: Dict[str, Any]):
    print("config:")
    for key, value in provenance.items():
        print(f"  {key}: {value}")


def _run_settings(args, experiment: ExperimentConfig, model) -> Dict[str, Any]:
    horizon = args.horizon if getattr(args, "horizon", None) is not None else default_horizon(experiment, model)
    warmup = args.warmup if getattr(args, "warmup", None) is not None else experiment.warmup
    seed = args.seed if getattr(args, "seed", None) is not None else experiment.seed
    if warmup is None:
        warmup = DEFAULT_WARMUP_FRACTION * horizon
    if warmup >= horizon:
        raise ModelError(f"horizon {horizon:g} must exceed warmup {warmup:g}")
    return {"horizon": horizon, "warmup": warmup, "seed": seed}


def cmd_validate(args) -> int:
    experiment, model = load_experiment(args.config)
    report = validate_model(model)
    _print_config(_provenance("validate", experiment))
    print(report)
    print(f"c1max: {c_max(model, 1):g} {model.units.power}")
    print(f"c2max: {c_max(model, 2):g} {model.units.power}")
    return EXIT_OK if report.valid else EXIT_FAILURE


def cmd_simulate(args) -> int:
    experiment, model = load_experiment(args.config)
    settings = _run_settings(args, experiment, model)

    batch = []
    for index, config in enumerate(experiment.configs):
        params = SimulationParams(
            horizon=settings["horizon"],
            warmup=settings["warmup"],
            seed=settings["seed"],
            trajectory=bool(args.trajectory) and index == 0,
        )
        batch.append(SimulationJob(model=model, config=config, params=params, label="shared"))
    if args.standalone:
        params = SimulationParams(horizon=settings["horizon"], warmup=settings["warmup"], seed=settings["seed"])
        batch.append(SimulationJob(model=model, config=SharingConfig(), params=params, sharing=False, label="standalone"))

    results = SimulationRunner(jobs=args.jobs).run(batch)
    rows = [(job.label, job.config, result) for job, result in zip(batch, results)]
    provenance = _provenance("simulate", experiment, **settings)

    out = args.out or experiment.outputs.result
    serializer = SimulationSerializer()
    if out:
        serializer.write(rows, out, provenance)
        logger.info(f"Wrote {len(rows)} result rows to {out}")
    else:
        sys.stdout.write(serializer.serialize(rows, provenance))

    trajectory_out = args.trajectory or experiment.outputs.trajectory
    if trajectory_out and results[0].trajectory is not None:
        TrajectorySerializer().write(results[0].trajectory, trajectory_out, provenance)
        logger.info(f"Wrote {len(results[0].trajectory)} trajectory rows to {trajectory_out}")

    for label, config, result in rows:
        logger.info(f"{label} {config}: llr1={result.llr1:.6g} (se {result.se1:.2g}), llr2={result.llr2:.6g} (se {result.se2:.2g})")
    return EXIT_OK


def _sweep(args, experiment: ExperimentConfig, model):
    settings = _run_settings(args, experiment, model)
    grid_step = args.grid_step if args.grid_step is not None else experiment.grid_step
    frontier, llr_sa = pareto_sweep(
        model,
        grid_step,
        settings["horizon"],
        warmup=settings["warmup"],
        seed=settings["seed"],
        jobs=args.jobs,
    )
    settings["grid_step"] = grid_step
    return frontier, llr_sa, settings


def cmd_sweep(args) -> int:
    experiment, model = load_experiment(args.config)
    frontier, llr_sa, settings = _sweep(args, experiment, model)
    provenance = _provenance("sweep", experiment, llr_sa=list(llr_sa), **settings)

    out = args.out or experiment.outputs.frontier
    if out:
        write_frontier_csv(frontier, out, provenance)
        logger.info(f"Wrote {len(frontier)} frontier points to {out}")
    else:
        sys.stdout.write(FrontierSerializer().serialize(frontier, provenance))
    return EXIT_OK


def cmd_egalitarian(args) -> int:
    experiment, model = load_experiment(args.config)
    frontier, llr_sa, settings = _sweep(args, experiment, model)
    point = egalitarian_solution(frontier, llr_sa)

    _print_config(_provenance("egalitarian", experiment, **settings))
    print(f"standalone: llr1={llr_sa[0]:.6g} llr2={llr_sa[1]:.6g} {model.units.power}")
    print(f"egalitarian: c1={point.config.c1:g} c2={point.config.c2:g}")
    print(f"llr: llr1={point.llr1:.6g} llr2={point.llr2:.6g} {model.units.power}")
    print(f"benefit: benefit1={point.benefit1:.6g} benefit2={point.benefit2:.6g} min={point.min_benefit:.6g}")
    for agent, (benefit, baseline) in enumerate(zip((point.benefit1, point.benefit2), llr_sa), start=1):
        reduction = 100.0 * benefit / baseline if baseline > 0 else 0.0
        print(f"reduction{agent}: {reduction:.1f}%")
    return EXIT_OK


def cmd_couple(args) -> int:
    experiment, model = load_experiment(args.config)
    settings = _run_settings(args, experiment, model)
    base = experiment.configs[0]
    agent = args.agent
    epsilon = args.epsilon if args.epsilon is not None else experiment.epsilon

    room = c_max(model, agent) - base.get(agent)
    if epsilon > room:
        logger.warning(f"epsilon {epsilon:g} pushes c{agent} past c{agent}max = {c_max(model, agent):g}, clipped to {room:g}")
        epsilon = max(room, 0.0)
    perturbed = (
        SharingConfig(c1=base.c1 + epsilon, c2=base.c2)
        if agent == 1
        else SharingConfig(c1=base.c1, c2=base.c2 + epsilon)
    )

    report = coupled_simulate(model, base, perturbed, settings["horizon"], seed=settings["seed"])
    pathwise = pathwise_check(report, agent=agent)

    _print_config(_provenance("couple", experiment, agent=agent, epsilon=epsilon, **settings))
    print(f"original: {base}  perturbed: {perturbed}  merged event instants: {len(report.times)}")
    print(pathwise)
    horizon = settings["horizon"]
    d1 = (report.final_b.lost1 - report.final_a.lost1) / horizon
    d2 = (report.final_b.lost2 - report.final_a.lost2) / horizon
    print(f"d_llr1={d1:+.6g} d_llr2={d2:+.6g} d_sum={d1 + d2:+.6g}")
    return EXIT_OK if pathwise.passed else EXIT_FAILURE


def _add_run_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--horizon", type=float, help="Simulated time (default: from the experiment)")
    parser.add_argument("--warmup", type=float, help="Discarded initial time (default: 1%% of the horizon)")
    parser.add_argument("--seed", type=int, help="Background sample path seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="energyshare",
        description="Dynamic energy sharing between two agents with batteries.",
    )
    parser.add_argument("--log-level", help="Log level (default: $ENERGYSHARE_LOG_LEVEL or INFO)")
    parser.add_argument("--jobs", type=int, default=1, help="Parallel simulation workers")
    subparsers = parser.add_subparsers(dest="command", required=True)

    config_help = f"Experiment JSON file or preset ({', '.join(preset_names())})"

    validate = subparsers.add_parser("validate", help="Check the model assumptions")
    validate.add_argument("config", help=config_help)
    validate.set_defaults(func=cmd_validate)

    simulate = subparsers.add_parser("simulate", help="Estimate both agents' loss of load rates")
    simulate.add_argument("config", help=config_help)
    _add_run_arguments(simulate)
    simulate.add_argument("--out", help="Result CSV (default: stdout)")
    simulate.add_argument("--trajectory", help="Event log CSV of the first configuration")
    simulate.add_argument("--standalone", action="store_true", help="Also run both agents standalone")
    simulate.set_defaults(func=cmd_simulate)

    sweep = subparsers.add_parser("sweep", help="Simulate the flattened Pareto frontier")
    sweep.add_argument("config", help=config_help)
    _add_run_arguments(sweep)
    sweep.add_argument("--grid-step", type=float, help="Frontier grid step")
    sweep.add_argument("--out", help="Frontier CSV (default: stdout)")
    sweep.set_defaults(func=cmd_sweep)

    egalitarian = subparsers.add_parser("egalitarian", help="Find the egalitarian sharing configuration")
    egalitarian.add_argument("config", help=config_help)
    _add_run_arguments(egalitarian)
    egalitarian.add_argument("--grid-step", type=float, help="Frontier grid step")
    egalitarian.set_defaults(func=cmd_egalitarian)

    couple = subparsers.add_parser("couple", help="Check the pathwise coupling inequalities")
    couple.add_argument("config", help=config_help)
    _add_run_arguments(couple)
    couple.add_argument("--epsilon", type=float, help="Increase of the perturbed agent's c_i")
    couple.add_argument("--agent", type=int, choices=(1, 2), default=1, help="Perturbed agent")
    couple.set_defaults(func=cmd_couple)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)

    if args.jobs < 1:
        logger.error(f"--jobs must be >= 1, got {args.jobs}")
        return EXIT_USAGE

    try:
        return args.func(args)
    except (ConfigError, TraceError, ModelError, ValidationError, OSError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except EnergyShareError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
