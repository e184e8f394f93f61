"""
File management for campaign outputs.

Handles run directories, atomic CSV / JSON writes, result tables and
dataset serialization.
"""
import csv
import io
import json
import math
import os
import tempfile
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np

from .config import RESULT_CSV_HEADER, RESULTS_DIR
from .datagen import Dataset
from .models import ResultRow


def prepare_output_dir(out_dir: Optional[Path] = None, label: str = "run") -> Path:
    """
    Create (if needed) and return the output directory of a run.

    Args:
        out_dir: Explicit directory. If None, uses results/{date}/{label}_{timestamp}/
        label: Prefix of the generated directory name

    Returns:
        Path to the existing directory
    """
    if out_dir is None:
        now = datetime.now()
        out_dir = RESULTS_DIR / now.strftime("%Y-%m-%d") / f"{label}_{now.strftime('%H%M%S')}"
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def atomic_write_text(path: Path, text: str) -> Path:
    """
    Write text to path through a temporary file in the same directory and a rename.

    Readers never observe a partially written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path


def save_json(data: Any, path: Path) -> Path:
    """Save a JSON document atomically (indent 2, UTF-8)."""
    return atomic_write_text(path, json.dumps(data, indent=2, ensure_ascii=False) + "\n")


def load_json(path: Path) -> Optional[Any]:
    """
    Load a JSON document.

    Returns:
        Parsed data or None if the file does not exist
    """
    path = Path(path)
    if not path.exists():
        return None
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _format_number(value: float) -> str:
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return repr(value)


def save_result_rows(rows: Iterable[ResultRow], path: Path) -> Path:
    """Save result rows as CSV with the fixed header."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(RESULT_CSV_HEADER)
    for row in rows:
        values = row.model_dump()
        writer.writerow([
            _format_number(values[column]) if isinstance(values[column], float) else values[column]
            for column in RESULT_CSV_HEADER
        ])
    return atomic_write_text(path, buffer.getvalue())


def load_result_rows(path: Path) -> List[ResultRow]:
    """
    Load a results CSV written by save_result_rows.

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If the header is not the result header
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != RESULT_CSV_HEADER:
            raise ValueError(f"{path} is not a results table (header {reader.fieldnames})")
        return [ResultRow.model_validate(record) for record in reader]


def save_dataset_csv(data: Dataset, path: Path) -> Path:
    """Save a dataset as CSV with header x0,...,x{d-1},y (17 significant digits)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([f"x{k}" for k in range(data.dim)] + ["y"])
    for x, label in zip(data.X, data.y):
        writer.writerow([f"{value:.17g}" for value in x] + [int(label)])
    return atomic_write_text(path, buffer.getvalue())


def load_dataset_csv(path: Path) -> Dataset:
    """
    Load a dataset saved by save_dataset_csv.

    Raises:
        ValueError: If the header or labels are malformed
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        dim = len(header) - 1
        if dim < 1 or header != [f"x{k}" for k in range(dim)] + ["y"]:
            raise ValueError(f"Unexpected dataset header: {header}")
        records = [record for record in reader if record]

    X = np.array([[float(v) for v in record[:dim]] for record in records], dtype=float).reshape(-1, dim)
    y = np.array([int(record[dim]) for record in records])
    if not np.all(np.isin(y, (-1, 1))):
        raise ValueError("Labels must be -1 or +1")
    return Dataset.from_classes(X[y > 0], X[y < 0])


def list_runs(results_dir: Path = RESULTS_DIR) -> Dict[str, List[str]]:
    """
    List run directories grouped by date.

    Returns:
        Dictionary mapping YYYY-MM-DD to run directory names (newest first)
    """
    runs: Dict[str, List[str]] = {}
    if not Path(results_dir).exists():
        return runs
    for date_dir in sorted(Path(results_dir).iterdir(), reverse=True):
        if date_dir.is_dir():
            names = sorted((p.name for p in date_dir.iterdir() if p.is_dir()), reverse=True)
            if names:
                runs[date_dir.name] = names
    return runs
