"""
reports.py

Purpose:
--------
Writes the structured artifacts of the command-line stages: JSON reports
(solutions with their reduction traces, sparsification summaries,
resource estimates), the heavy-hex layout text and benchmark CSV tables.

JSON is written with sorted keys and a trailing newline so identical
inputs give byte-identical files.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence, Union

import numpy as np
import pandas as pd

from core.sparsify import Layout, SparsifyReport

PathLike = Union[str, Path]


def _plain(value: Any) -> Any:
    """numpy scalars/arrays and tuples -> JSON-native values."""
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def dumps_report(document: Mapping[str, Any]) -> str:
    return json.dumps(_plain(document), indent=2, sort_keys=True) + "\n"


def write_report(document: Mapping[str, Any], path: PathLike) -> None:
    Path(path).write_text(dumps_report(document), encoding="utf-8")


def solution_report(
    *,
    spins: Sequence[int],
    energy: float,
    feature_names: Sequence[str] = (),
) -> Dict[str, Any]:
    """Spin vector, bit vector, selected indices and (when known) names."""
    spins = [int(s) for s in spins]
    bits = [(1 - s) // 2 for s in spins]
    selected = [i for i, b in enumerate(bits) if b]
    report: Dict[str, Any] = {"energy": float(energy), "spins": spins, "bits": bits, "selected": selected}
    if feature_names:
        report["selected_names"] = [feature_names[i] for i in selected]
    return report


def sparsify_summary(report: SparsifyReport) -> Dict[str, Any]:
    return {
        "kept_by_order": report.kept_by_order,
        "dropped_by_order": report.dropped_by_order,
        "ratio_by_order": report.ratio_by_order(),
        "retained_weight_fraction": report.retained_weight_fraction,
        "surrogate_insertions": report.surrogate_insertions,
    }


def format_layout(layout: Layout) -> str:
    """
    placement <variable> <node>        one line per variable
    term <i,j,k> nodes <a,b,c> cost <r> retained <0|1>
    """
    rows, cols = layout.graph.dimensions
    lines: List[str] = [
        f"heavy-hex {rows}x{cols} max_swap_cost {layout.max_swap_cost} depth {layout.depth_estimate}"
    ]
    for variable in sorted(layout.placement):
        lines.append(f"placement {variable} {layout.placement[variable]}")
    for mapped in layout.mapped_terms:
        lines.append(
            f"term {','.join(map(str, mapped.term))} nodes {','.join(map(str, mapped.nodes))} "
            f"cost {mapped.routing_cost} retained {int(mapped.retained)}"
        )
    return "\n".join(lines) + "\n"


def write_table_csv(table: pd.DataFrame, path: PathLike) -> None:
    table.to_csv(path, index=False, lineterminator="\n")
