import csv
import json
import subprocess
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np

from powergame import __version__
from powergame.protocol import CSV_HEADER, ReceiverKind, ResultRow, ResultSet, RunStatus
from simulation import logger
from simulation.errors import OutputError
from simulation.experiments.summary import Summary, render_text

REPO_ROOT = Path(__file__).resolve().parents[2]


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "value"):
        return value.value
    return str(value)


def _parse_optional(text: str, parse):
    return None if text == "" else parse(text)


def csv_lines(rows: Sequence[ResultRow]) -> List[List[str]]:
    return [CSV_HEADER] + [[_format_value(getattr(row, column)) for column in CSV_HEADER] for row in rows]


def write_csv(rows: Sequence[ResultRow], path) -> Path:
    """One row per line under the documented header; floats are written with repr so they reload exactly."""
    path = Path(path)
    try:
        with open(path, "w", newline="") as f:
            csv.writer(f, lineterminator="\n").writerows(csv_lines(rows))
    except OSError as e:
        raise OutputError(path, e)
    return path


def load_csv(path) -> List[ResultRow]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"Unexpected CSV header in {path}: {reader.fieldnames}")
        return [
            ResultRow(
                N=int(record["N"]),
                receiver=record["receiver"],
                mode=record["mode"],
                mean_utility=_parse_optional(record["mean_utility"], float),
                target_sinr=_parse_optional(record["target_sinr"], float),
                capped_fraction=_parse_optional(record["capped_fraction"], float),
                converged=_parse_optional(record["converged"], lambda text: text == "true"),
                seed=int(record["seed"]),
                repetition=int(record["repetition"]),
                status=record["status"],
            )
            for record in reader
        ]


def git_hash() -> str:
    try:
        completed = subprocess.run(["git", "rev-parse", "HEAD"], cwd=REPO_ROOT, capture_output=True, text=True, timeout=10)
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return completed.stdout.strip() if completed.returncode == 0 else "unknown"


def provenance(results: ResultSet) -> Dict:
    return {
        "git_hash": git_hash(),
        "master_seed": results.spec.master_seed,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "version": results.spec.version,
        "package_version": __version__,
    }


def write_json(results: ResultSet, path) -> Path:
    """Full spec for replay, every row and the run's provenance."""
    path = Path(path)
    document = {
        "spec": json.loads(results.spec.json()),
        "rows": [json.loads(row.json()) for row in results.rows],
        "provenance": provenance(results),
    }
    try:
        path.write_text(json.dumps(document, indent=2))
    except OSError as e:
        raise OutputError(path, e)
    return path


def load_json(path) -> ResultSet:
    document = json.loads(Path(path).read_text())
    return ResultSet(spec=document["spec"], rows=document["rows"])


def write_plot_data(results: ResultSet, path) -> Path:
    """Gnuplot data: one block per receiver kind, columns N, mode, mean utility and its std, blocks split by two blank lines."""
    path = Path(path)
    blocks = []
    for kind in ReceiverKind:
        rows = [row for row in results.rows if row.receiver == kind and row.status == RunStatus.OK]
        if not rows:
            continue
        lines = [f"# receiver {kind.value}", "# N mode mean_utility std_utility"]
        for n in sorted({row.N for row in rows}):
            for mode in sorted({row.mode.value for row in rows if row.N == n}):
                values = [row.mean_utility for row in rows if row.N == n and row.mode.value == mode]
                lines.append(f"{n} {mode} {float(np.mean(values))!r} {float(np.std(values))!r}")
        blocks.append("\n".join(lines))
    try:
        path.write_text("\n\n\n".join(blocks) + "\n")
    except OSError as e:
        raise OutputError(path, e)
    return path


def write_summary(summary: Summary, directory) -> List[Path]:
    directory = Path(directory)
    text_path, json_path = directory / "summary.txt", directory / "summary.json"
    try:
        text_path.write_text(render_text(summary))
        json_path.write_text(summary.json(indent=2))
    except OSError as e:
        raise OutputError(directory, e)
    return [text_path, json_path]


def emit(results: ResultSet, formats: Sequence[str], directory, plot: bool = False) -> List[Path]:
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(directory, e)

    written = []
    for output_format in formats:
        if output_format == "csv":
            written.append(write_csv(results.rows, directory / "results.csv"))
        elif output_format == "json":
            written.append(write_json(results, directory / "results.json"))
        else:
            raise ValueError(f"Unsupported format: {output_format}")
    if plot:
        written.append(write_plot_data(results, directory / "utility_vs_n.dat"))
    logger.success("Results written", files=[str(path) for path in written])
    return written
