from collections import defaultdict
from typing import Dict, List, Sequence

import numpy as np
from pydantic import BaseModel, Field

from powergame.protocol import Mode, ReceiverKind, ResultRow, RunStatus
from simulation import logger


class TableCell(BaseModel):
    mean: float
    std: float
    count: int


class Summary(BaseModel):
    # receiver -> N -> mode -> mean utility over repetitions
    utilities: Dict[str, Dict[int, Dict[str, TableCell]]] = Field(default_factory=dict)
    # receiver -> N -> socially optimal SINR over repetitions
    socially_optimal_sinrs: Dict[str, Dict[int, TableCell]] = Field(default_factory=dict)
    inapplicable: List[str] = Field(default_factory=list)
    failed: int = 0
    ordering_violations: List[str] = Field(default_factory=list)


def _cell(values) -> TableCell:
    values = np.asarray(values, dtype=float)
    return TableCell(mean=float(np.mean(values)), std=float(np.std(values)), count=int(values.size))


def ordering_violations(rows: Sequence[ResultRow]) -> List[str]:
    """Completed scenarios where mean utility is not ordered MMSE >= DE >= MF."""
    by_scenario = defaultdict(dict)
    for row in rows:
        if row.status == RunStatus.OK:
            by_scenario[(row.N, row.mode, row.repetition)][row.receiver] = row.mean_utility
    violations = []
    chain = [ReceiverKind.MMSE, ReceiverKind.DE, ReceiverKind.MF]
    for (n, mode, repetition), values in sorted(by_scenario.items(), key=lambda item: (item[0][0], item[0][1].value, item[0][2])):
        present = [kind for kind in chain if kind in values]
        for better, worse in zip(present, present[1:]):
            if values[better] < values[worse]:
                violations.append(f"N={n} mode={mode.value} repetition={repetition}: {better.value} < {worse.value}")
    return violations


def summarize(rows: Sequence[ResultRow]) -> Summary:
    rows = list(rows)
    if not rows:
        raise ValueError("summarize needs at least one result row")

    utilities = defaultdict(lambda: defaultdict(lambda: defaultdict(list)))
    sinrs = defaultdict(lambda: defaultdict(list))
    inapplicable = set()
    failed = 0
    for row in rows:
        if row.status == RunStatus.INAPPLICABLE:
            inapplicable.add(f"{row.receiver.value} N={row.N}")
            continue
        if row.status == RunStatus.FAILED:
            failed += 1
            continue
        utilities[row.receiver.value][row.N][row.mode.value].append(row.mean_utility)
        if row.mode == Mode.SOCIAL_OPTIMAL:
            sinrs[row.receiver.value][row.N].append(row.target_sinr)

    summary = Summary(
        utilities={
            receiver: {n: {mode: _cell(values) for mode, values in modes.items()} for n, modes in by_n.items()}
            for receiver, by_n in utilities.items()
        },
        socially_optimal_sinrs={receiver: {n: _cell(values) for n, values in by_n.items()} for receiver, by_n in sinrs.items()},
        inapplicable=sorted(inapplicable),
        failed=failed,
        ordering_violations=ordering_violations(rows),
    )
    for violation in summary.ordering_violations:
        logger.warning("Receiver ordering violated", violation=violation)
    return summary


def _processing_gains(table) -> List[int]:
    return sorted({n for by_n in table.values() for n in by_n})


def render_text(summary: Summary) -> str:
    """Mean utilities (receiver x N x mode) and socially optimal SINRs (receiver x N), as plain text."""
    lines = ["Mean utility (bits/J), mean +- std over repetitions"]
    gains = _processing_gains(summary.utilities)
    lines.append("receiver mode " + " ".join(f"{'N=' + str(n):>24}" for n in gains))
    for receiver in [kind.value for kind in ReceiverKind if kind.value in summary.utilities]:
        for mode in [m.value for m in Mode]:
            cells = []
            for n in gains:
                cell = summary.utilities[receiver].get(n, {}).get(mode)
                cells.append(f"{cell.mean:.4e} +- {cell.std:.2e}" if cell else "-")
            lines.append(f"{receiver:<8} {mode:<4} " + " ".join(f"{c:>24}" for c in cells))

    lines.append("")
    lines.append("Socially optimal SINR")
    gains = _processing_gains(summary.socially_optimal_sinrs)
    lines.append("receiver " + " ".join(f"{'N=' + str(n):>18}" for n in gains))
    for receiver in [kind.value for kind in ReceiverKind if kind.value in summary.socially_optimal_sinrs]:
        cells = []
        for n in gains:
            cell = summary.socially_optimal_sinrs[receiver].get(n)
            cells.append(f"{cell.mean:.4f} +- {cell.std:.1e}" if cell else "-")
        lines.append(f"{receiver:<8} " + " ".join(f"{c:>18}" for c in cells))

    if summary.inapplicable:
        lines.append("")
        lines.append("inapplicable: " + ", ".join(summary.inapplicable))
    if summary.failed:
        lines.append(f"failed runs: {summary.failed}")
    return "\n".join(lines) + "\n"
