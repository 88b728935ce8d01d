"""
tables.py

Purpose:
--------
Delimiter-separated tables in and out, and BinSpec sidecars.

This module:
- Reads integer tables into a FeatureMatrix (alphabets = max + 1)
- Reads real-valued tables ahead of discretization
- Writes discretized tables
- Saves and loads BinSpec sidecars with full float precision

It does NOT:
- Discretize (see core.dataset)

Parse errors name the 1-based data row and the column header.
"""

import json
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from core.dataset import BinSpec, DatasetError, FeatureMatrix, make_matrix

PathLike = Union[str, Path]

SIDECAR_VERSION = 1


def _read_frame(path: PathLike, label_column: str, delimiter: str) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, sep=delimiter, dtype=str, keep_default_na=False)
    except FileNotFoundError:
        raise DatasetError(f"table not found: {path}")
    except pd.errors.EmptyDataError:
        raise DatasetError(f"table is empty: {path}")
    if frame.empty:
        raise DatasetError(f"table has no data rows: {path}")
    if label_column not in frame.columns:
        raise DatasetError(f"label column '{label_column}' not in header {list(frame.columns)}")
    return frame


def _parse_column(frame: pd.DataFrame, name: str, integral: bool) -> np.ndarray:
    parsed = pd.to_numeric(frame[name].str.strip(), errors="coerce")
    bad = parsed.isna()
    if integral:
        bad |= parsed.notna() & (parsed != parsed.round())
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        kind = "an integer" if integral else "a number"
        raise DatasetError(
            f"row {row + 1}, column '{name}': {frame[name].iloc[row]!r} is not {kind}"
        )
    return parsed.to_numpy(dtype=np.int64 if integral else float)


def load_table(path: PathLike, label_column: str, delimiter: str = ",") -> FeatureMatrix:
    """Integer table -> FeatureMatrix; every non-label column is a feature."""
    frame = _read_frame(path, label_column, delimiter)
    names = [c for c in frame.columns if c != label_column]
    if not names:
        raise DatasetError("table has no feature columns")
    values = np.stack([_parse_column(frame, name, integral=True) for name in names], axis=1)
    labels = _parse_column(frame, label_column, integral=True)
    return make_matrix(values, labels, feature_names=names)


def load_raw_table(
    path: PathLike,
    label_column: str,
    delimiter: str = ",",
) -> Tuple[np.ndarray, np.ndarray, List[str]]:
    """Real-valued table -> (values, integer labels, feature names)."""
    frame = _read_frame(path, label_column, delimiter)
    names = [c for c in frame.columns if c != label_column]
    if not names:
        raise DatasetError("table has no feature columns")
    values = np.stack([_parse_column(frame, name, integral=False) for name in names], axis=1)
    labels = _parse_column(frame, label_column, integral=True)
    return values, labels, names


def write_table(matrix: FeatureMatrix, path: PathLike, label_column: str = "label", delimiter: str = ",") -> None:
    frame = pd.DataFrame(matrix.values, columns=list(matrix.feature_names))
    frame[label_column] = matrix.labels
    frame.to_csv(path, sep=delimiter, index=False, lineterminator="\n")


# -----------------------------------------------------------------------------
# BinSpec sidecars
# -----------------------------------------------------------------------------

def save_bin_specs(specs: Sequence[BinSpec], names: Sequence[str], path: PathLike) -> None:
    """JSON sidecar; floats are written with repr precision so they reload bit-exactly."""
    if len(specs) != len(names):
        raise DatasetError(f"{len(specs)} bin specs for {len(names)} names")
    document = {
        "version": SIDECAR_VERSION,
        "columns": [
            {"name": name, "levels": spec.levels, "edges": list(spec.edges)}
            for name, spec in zip(names, specs)
        ],
    }
    Path(path).write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")


def load_bin_specs(path: PathLike) -> Tuple[List[BinSpec], List[str]]:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DatasetError(f"bin spec sidecar not found: {path}")
    except json.JSONDecodeError as exc:
        raise DatasetError(f"bin spec sidecar {path} is not valid JSON: {exc}")
    if document.get("version") != SIDECAR_VERSION:
        raise DatasetError(f"unsupported sidecar version: {document.get('version')!r}")

    specs, names = [], []
    for column in document.get("columns", []):
        specs.append(BinSpec(edges=tuple(float(e) for e in column["edges"]), levels=int(column["levels"])))
        names.append(str(column["name"]))
    return specs, names
