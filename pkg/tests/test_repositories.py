# tests/test_repositories.py

import json

import numpy as np
import pandas as pd
import pytest

from core.dataset import BinSpec, DatasetError, discretize_matrix
from core.errors import DataError
from core.heavy_hex import heavy_hex_graph
from core.pcbo import PolyBinaryProblem, SpinHamiltonian
from core.sparsify import SparsifyReport, map_heavy_hex
from repositories.problem_files import (
    ProblemFileError,
    format_problem,
    parse_problem,
    read_problem,
    write_problem,
)
from repositories.reports import (
    dumps_report,
    format_layout,
    solution_report,
    sparsify_summary,
    write_table_csv,
)
from repositories.tables import load_bin_specs, load_raw_table, load_table, save_bin_specs, write_table


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


#14.1 Tables
def test_integer_table_loads_with_inferred_alphabets(tmp_path):
    path = _write(tmp_path, "m.csv", "a,b,label\n0,2,1\n1,0,0\n0,1,1\n")

    matrix = load_table(path, "label")

    assert matrix.feature_names == ("a", "b")
    assert matrix.alphabets == (2, 3)
    assert matrix.label_alphabet == 2
    assert matrix.values.tolist() == [[0, 2], [1, 0], [0, 1]]


def test_label_column_may_sit_anywhere(tmp_path):
    path = _write(tmp_path, "m.tsv", "y\ta\n1\t0\n0\t1\n")

    matrix = load_table(path, "y", delimiter="\t")

    assert matrix.feature_names == ("a",)
    assert matrix.labels.tolist() == [1, 0]


def test_parse_error_names_row_and_column(tmp_path):
    path = _write(tmp_path, "m.csv", "a,b,label\n0,1,0\n2,x,1\n")

    with pytest.raises(DatasetError, match=r"row 2, column 'b': 'x' is not an integer"):
        load_table(path, "label")


def test_fractional_values_are_not_integers(tmp_path):
    path = _write(tmp_path, "m.csv", "a,label\n1.5,0\n")

    with pytest.raises(DatasetError, match="row 1, column 'a'"):
        load_table(path, "label")


def test_table_level_errors(tmp_path):
    with pytest.raises(DatasetError, match="not found"):
        load_table(tmp_path / "missing.csv", "label")
    with pytest.raises(DatasetError):
        load_table(_write(tmp_path, "empty.csv", ""), "label")
    with pytest.raises(DatasetError, match="label column"):
        load_table(_write(tmp_path, "nolabel.csv", "a,b\n0,1\n"), "label")
    with pytest.raises(DatasetError, match="no feature columns"):
        load_table(_write(tmp_path, "onlylabel.csv", "label\n0\n"), "label")


def test_errors_are_data_errors(tmp_path):
    with pytest.raises(DataError):
        load_table(tmp_path / "missing.csv", "label")


def test_written_table_reloads_identically(tmp_path, planted_matrix):
    matrix, _ = planted_matrix
    path = tmp_path / "out.csv"

    write_table(matrix, path)
    reloaded = load_table(path, "label")

    assert reloaded.feature_names == matrix.feature_names
    assert np.array_equal(reloaded.values, matrix.values)
    assert np.array_equal(reloaded.labels, matrix.labels)


def test_raw_table_keeps_reals(tmp_path):
    path = _write(tmp_path, "raw.csv", "x,label\n0.25,1\n-3e2,0\n")

    values, labels, names = load_raw_table(path, "label")

    assert values[:, 0].tolist() == [0.25, -300.0]
    assert labels.tolist() == [1, 0]
    assert names == ["x"]


#14.2 BinSpec sidecars
def test_sidecar_reloads_bit_exact(tmp_path):
    specs = [BinSpec(edges=(0.1 + 0.2, 1 / 3), levels=3), BinSpec(edges=(2.0,), levels=2)]
    path = tmp_path / "bins.json"

    save_bin_specs(specs, ["a", "b"], path)
    reloaded, names = load_bin_specs(path)

    assert names == ["a", "b"]
    assert reloaded == specs


def test_frozen_bins_reproduce_training_levels(tmp_path):
    raw = np.random.default_rng(0).normal(size=(50, 2))
    labels = np.arange(50) % 2
    matrix, specs = discretize_matrix(raw, labels, ["a", "b"], levels=4)
    path = tmp_path / "bins.json"

    save_bin_specs(specs, ["a", "b"], path)
    frozen, _ = load_bin_specs(path)
    again, _ = discretize_matrix(raw, labels, ["a", "b"], specs=frozen)

    assert np.array_equal(again.values, matrix.values)


def test_sidecar_errors(tmp_path):
    with pytest.raises(DatasetError, match="not found"):
        load_bin_specs(tmp_path / "missing.json")
    with pytest.raises(DatasetError, match="version"):
        load_bin_specs(_write(tmp_path, "v2.json", json.dumps({"version": 2, "columns": []})))
    with pytest.raises(DatasetError):
        load_bin_specs(_write(tmp_path, "bad.json", "{not json"))
    with pytest.raises(DatasetError):
        save_bin_specs([BinSpec(edges=(0.0,), levels=2)], ["a", "b"], tmp_path / "x.json")


#14.3 Problem files
def test_spin_problem_text():
    hamiltonian = SpinHamiltonian(num_vars=3, terms={(2, 0): -0.5, (1,): 0.1, (0, 1, 2): 2.0}, offset=1.25)

    assert format_problem(hamiltonian) == (
        "vars 3 offset 1.25 kind spin\n"
        "1 0.1\n"
        "0,2 -0.5\n"
        "0,1,2 2.0\n"
    )


def test_binary_problem_keeps_cardinality(tmp_path):
    problem = PolyBinaryProblem(num_vars=4, terms={(0, 3): 0.1 + 0.2}, constant=-1.0, cardinality=2)
    path = tmp_path / "p.txt"

    write_problem(problem, path)
    reloaded = read_problem(path)

    assert isinstance(reloaded, PolyBinaryProblem)
    assert reloaded.cardinality == 2
    assert reloaded.constant == -1.0
    assert reloaded.terms == {(0, 3): 0.1 + 0.2}


def test_comments_blank_lines_and_unsorted_indices():
    problem = parse_problem("# built by hand\n\nvars 3 offset 0.0 kind spin\n  # a comment\n2,0 1.5\n")

    assert problem.terms == {(0, 2): 1.5}


@pytest.mark.parametrize(
    "text, message",
    [
        ("", "empty"),
        ("# only a comment\n", "empty"),
        ("variables 3 offset 0 kind spin\n", "line 1"),
        ("vars 3 offset 0 kind ising\n", "unknown kind"),
        ("vars 3 offset 0 kind spin cardinality 1\n", "cardinality"),
        ("vars 3 offset zero kind spin\n", "non-numeric"),
        ("vars 3 offset 0 kind spin\n0 1.0\n0 2.0\n", "line 3: duplicate"),
        ("vars 3 offset 0 kind spin\n0,1 1.0\n1,0 2.0\n", "duplicate"),
        ("vars 3 offset 0 kind spin\n0 one\n", "line 2"),
        ("vars 3 offset 0 kind spin\n0 1.0 2.0\n", "line 2"),
        ("vars 3 offset 0 kind spin\n0,5 1.0\n", "invalid problem"),
    ],
)
def test_malformed_problem_files(text, message):
    with pytest.raises(ProblemFileError, match=message):
        parse_problem(text)


def test_missing_problem_file(tmp_path):
    with pytest.raises(ProblemFileError, match="not found"):
        read_problem(tmp_path / "nothing.txt")


#14.4 Reports
def test_solution_report_maps_spins_to_selection():
    report = solution_report(spins=np.array([-1, 1, -1]), energy=np.float64(-2.5), feature_names=("a", "b", "c"))

    assert report == {
        "energy": -2.5,
        "spins": [-1, 1, -1],
        "bits": [1, 0, 1],
        "selected": [0, 2],
        "selected_names": ["a", "c"],
    }
    assert "selected_names" not in solution_report(spins=[1], energy=0.0)


def test_report_json_is_sorted_and_plain():
    text = dumps_report({"b": np.int64(3), "a": (np.float64(0.5), np.bool_(True)), "c": {1: np.arange(2)}})

    assert text.endswith("}\n")
    assert json.loads(text) == {"a": [0.5, True], "b": 3, "c": {"1": [0, 1]}}
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')


def test_sparsify_summary_fields():
    summary = sparsify_summary(SparsifyReport(kept_by_order={2: 1}, dropped_by_order={2: 1}, retained_weight_fraction=0.75))

    assert summary["ratio_by_order"] == {2: 0.5}
    assert summary["surrogate_insertions"] == 0
    assert summary["retained_weight_fraction"] == 0.75


def test_layout_text():
    hamiltonian = SpinHamiltonian(num_vars=2, terms={(0,): 1.0, (0, 1): 1.0})
    layout, _, _ = map_heavy_hex(hamiltonian, heavy_hex_graph(1, 1), max_swap_cost=0)

    lines = format_layout(layout).splitlines()

    assert lines[0] == f"heavy-hex 1x1 max_swap_cost 0 depth {layout.depth_estimate}"
    assert lines[1] == f"placement 0 {layout.placement[0]}"
    assert lines[2] == f"placement 1 {layout.placement[1]}"
    assert lines[-1].startswith("term 0,1 nodes ")
    assert lines[-1].endswith("cost 0 retained 1")


def test_csv_table(tmp_path):
    path = tmp_path / "bench.csv"

    write_table_csv(pd.DataFrame({"size": [4], "time": [0.5]}), path)

    assert path.read_text(encoding="utf-8") == "size,time\n4,0.5\n"
