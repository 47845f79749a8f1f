"""CSV / JSON writers. Every file starts with the provenance header of its run."""
import csv
import json
import math
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Sequence, TextIO, Union

import numpy as np

from lattice_mcts.models.schemas import ExperimentRow, TrialRecord

PROVENANCE_BANNER = "# lattice-mcts provenance"

RECORD_COLUMNS = [
    "trial",
    "strategy",
    "seed",
    "target_x",
    "target_y",
    "steps_taken",
    "optimal_steps",
    "excess",
    "capped",
]
ROW_COLUMNS = list(ExperimentRow.model_fields)


def provenance_lines(flat_config: Mapping[str, str]) -> List[str]:
    """Comment header: banner, then one `# key=value` line per resolved key."""
    return [PROVENANCE_BANNER] + [f"# {key}={value}" for key, value in flat_config.items()]


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.10g}"
    return str(value)


Destination = Union[Path, TextIO]


@contextmanager
def _open(dest: Destination) -> Iterator[TextIO]:
    if isinstance(dest, Path):
        dest.parent.mkdir(parents=True, exist_ok=True)
        with dest.open("w", newline="", encoding="utf-8") as f:
            yield f
    else:
        yield dest


def _write_table(dest: Destination, header: Sequence[str], columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with _open(dest) as f:
        for line in header:
            f.write(line + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_records_csv(dest: Destination, records: Sequence[TrialRecord], header: Sequence[str]) -> None:
    """One line per trial; wall-clock time is left out so reruns are byte-identical."""
    _write_table(
        dest,
        header,
        RECORD_COLUMNS,
        (
            [
                r.trial,
                r.strategy,
                r.seed,
                r.target.x,
                r.target.y,
                r.steps_taken,
                r.optimal_steps,
                r.excess,
                r.capped,
            ]
            for r in records
        ),
    )


def write_rows_csv(dest: Destination, rows: Sequence[ExperimentRow], header: Sequence[str]) -> None:
    _write_table(dest, header, ROW_COLUMNS, ([getattr(r, c) for c in ROW_COLUMNS] for r in rows))


def write_matrix_csv(dest: Destination, matrix: np.ndarray, header: Sequence[str]) -> None:
    """N x N grid indexed [x - 1, y - 1], written one line per y with x across."""
    with _open(dest) as f:
        for line in header:
            f.write(line + "\n")
        writer = csv.writer(f, lineterminator="\n")
        for row in np.asarray(matrix).T:
            writer.writerow([int(v) for v in row])


def write_json(
    path: Path,
    flat_config: Mapping[str, str],
    rows: Sequence[ExperimentRow],
    records: Sequence[TrialRecord] = (),
) -> None:
    """JSON mirror: the same field names as the CSV outputs plus wall-clock times."""
    payload: Dict[str, Any] = {
        "config": dict(flat_config),
        "rows": [r.model_dump(mode="json") for r in rows],
    }
    if records:
        payload["records"] = [r.model_dump(mode="json", exclude={"path"}) for r in records]
    with _open(path) as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


def sibling(path: Path, suffix: str) -> Path:
    """`out/run.csv` -> `out/run<suffix>`."""
    return path.with_name(path.stem + suffix)
