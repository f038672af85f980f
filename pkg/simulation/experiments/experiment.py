import argparse
import json
import os
import sys
import uuid
from pathlib import Path

import yaml
from dotenv import load_dotenv

from simulation import configure_logging, logger
from simulation.config import ExperimentConfig
from simulation.errors import PowerGameError
from simulation.experiments.emit import emit, load_csv, load_json, write_summary
from simulation.experiments.runner import run_experiment
from simulation.experiments.summary import render_text, summarize
from simulation.experiments.validate import validate
from simulation.network.scenario import Scenario
from simulation.utils import exception_details

DEV_CONFIG_PATH = "experiment.yml"


def _split(text):
    return [item.strip() for item in text.split(",") if item.strip()]


def _int_list(text):
    return [int(item) for item in _split(text)]


def get_parser():
    parser = argparse.ArgumentParser(prog="powergame", description="Energy-efficient power control games in multi-hop CDMA networks.")
    parser.add_argument("--log-level", default="INFO", help="Minimum level written to stdout.")
    parser.add_argument("--events-file", default=None, help="Also write serialized log records to this file.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Run the experiment grid and write result files.")
    run.add_argument("--spec", default=None, help="Experiment spec file (JSON, or YAML by suffix).")
    run.add_argument("--seed", type=int, default=None, help="Master seed.")
    run.add_argument("--out-dir", default=None, help="Output directory.")
    run.add_argument("--format", type=_split, default=None, help="csv, json or csv,json.")
    run.add_argument("--receivers", type=_split, default=None, help="Comma-separated subset of mf,de,mmse.")
    run.add_argument("--modes", type=_split, default=None, help="Comma-separated subset of nc,so.")
    run.add_argument("--gains", type=_int_list, default=None, help="Comma-separated processing gains.")
    run.add_argument("--repetitions", type=int, default=None, help="Monte Carlo repetitions per cell.")
    run.add_argument("--workers", type=int, default=None, help="Repetitions solved in parallel.")
    run.add_argument("--no-plot", action="store_true", help="Skip the gnuplot data file.")
    run.add_argument("--dev", action=argparse.BooleanOptionalAction, help=f"Read overrides from {DEV_CONFIG_PATH}, or write it when missing.")

    summary = subparsers.add_parser("summarize", help="Summarize a results.csv or results.json file.")
    summary.add_argument("results", help="Path to results.csv or results.json.")
    summary.add_argument("--out-dir", default=None, help="Also write summary.txt and summary.json here.")

    check = subparsers.add_parser("validate", help="Run the property and oracle suites.")
    check.add_argument("--seed", type=int, default=0, help="Seed for the randomized instances.")
    check.add_argument("--instances", type=int, default=100, help="Randomized instances per property suite.")
    check.add_argument("--scenario", default=None, help="Stored scenario JSON to run the suites on.")
    check.add_argument("--full", action="store_true", help="Add the 100-node reference runs and the table1 check.")
    return parser


def get_config(args) -> ExperimentConfig:
    config = ExperimentConfig(spec_path=args.spec).load_and_get_config_values()
    config.apply_overrides(
        master_seed=args.seed,
        output_dir=args.out_dir,
        formats=args.format,
        receivers=args.receivers,
        modes=args.modes,
        processing_gains=args.gains,
        repetitions=args.repetitions,
        workers=args.workers,
        plot=False if args.no_plot else None,
    )

    if args.dev:
        if os.path.exists(DEV_CONFIG_PATH):
            with open(DEV_CONFIG_PATH, 'r') as f:
                dev_config = yaml.safe_load(f.read()) or {}
            config.apply_overrides(**dev_config)
        else:
            with open(DEV_CONFIG_PATH, 'w') as f:
                yaml.safe_dump({key: value for key, value in config.dump_values().items() if key not in ("config_cache", "spec_path")}, f)

    logger.info('config', config=json.loads(config.to_spec().json()))
    return config


def command_run(args) -> int:
    spec = get_config(args).to_spec()
    results = run_experiment(spec)
    emit(results, spec.formats, spec.output_dir, plot=spec.plot)
    write_summary(summarize(results.rows), spec.output_dir)
    return 0


def load_rows(path):
    path = Path(path)
    if path.suffix == ".json":
        return load_json(path).rows
    return load_csv(path)


def command_summarize(args) -> int:
    rows = load_rows(args.results)
    summary = summarize(rows)
    sys.stdout.write(render_text(summary))
    if args.out_dir:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        write_summary(summary, args.out_dir)
    return 0


def command_validate(args) -> int:
    scenario = Scenario.load(args.scenario) if args.scenario else None
    report = validate(seed=args.seed, instances=args.instances, full=args.full, scenario=scenario)
    sys.stdout.write(report.render())
    return 0 if report.passed else 1


COMMANDS = {
    "run": command_run,
    "summarize": command_summarize,
    "validate": command_validate,
}


def main(argv=None) -> int:
    load_dotenv()
    args = get_parser().parse_args(argv)
    configure_logging(args.log_level, args.events_file, run_id=uuid.uuid4().hex[:12])
    try:
        return COMMANDS[args.command](args)
    except PowerGameError as e:
        logger.error("Command failed", command=args.command, error=exception_details(e))
        return 2


if __name__ == "__main__":
    sys.exit(main())
