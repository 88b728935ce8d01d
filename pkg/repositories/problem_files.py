"""
problem_files.py

Purpose:
--------
Line-oriented text format for PolyBinaryProblem and SpinHamiltonian, the
interchange format between command-line stages.

Format:
-------
    vars <N> offset <C> kind <binary|spin> [cardinality <n>]
    <i>[,<j>[,<k>...]] <coefficient>
    ...

The offset field holds the binary constant for kind binary. Coefficients
and offsets are written with repr precision, so a file re-read yields
bit-identical floats. Lines starting with '#' and blank lines are ignored.
Terms are written in canonical order (term order, then indices).
"""

from pathlib import Path
from typing import Optional, Union

from core.errors import DataError
from core.pcbo import PolyBinaryProblem, ProblemError, SpinHamiltonian

PathLike = Union[str, Path]
Problem = Union[PolyBinaryProblem, SpinHamiltonian]

KINDS = ("binary", "spin")


class ProblemFileError(DataError):
    """Raised when a problem file is malformed; the message names the line."""
    pass


def format_problem(problem: Problem) -> str:
    if isinstance(problem, SpinHamiltonian):
        header = f"vars {problem.num_vars} offset {problem.offset!r} kind spin"
    else:
        header = f"vars {problem.num_vars} offset {problem.constant!r} kind binary"
        if problem.cardinality is not None:
            header += f" cardinality {problem.cardinality}"

    lines = [header]
    for term, coefficient in problem.terms.items():
        lines.append(f"{','.join(str(i) for i in term)} {float(coefficient)!r}")
    return "\n".join(lines) + "\n"


def write_problem(problem: Problem, path: PathLike) -> None:
    Path(path).write_text(format_problem(problem), encoding="utf-8")


def _parse_header(line: str, number: int):
    fields = line.split()
    if len(fields) % 2 or fields[:1] != ["vars"]:
        raise ProblemFileError(f"line {number}: expected 'vars N offset C kind K', got {line!r}")
    header = dict(zip(fields[::2], fields[1::2]))
    unknown = set(header) - {"vars", "offset", "kind", "cardinality"}
    if unknown or "offset" not in header:
        raise ProblemFileError(f"line {number}: bad header fields in {line!r}")

    kind = header.get("kind", "spin")
    if kind not in KINDS:
        raise ProblemFileError(f"line {number}: unknown kind '{kind}'. Allowed: {list(KINDS)}")
    try:
        num_vars = int(header["vars"])
        offset = float(header["offset"])
        cardinality: Optional[int] = int(header["cardinality"]) if "cardinality" in header else None
    except ValueError:
        raise ProblemFileError(f"line {number}: non-numeric header value in {line!r}")
    if cardinality is not None and kind == "spin":
        raise ProblemFileError(f"line {number}: cardinality is only valid for kind binary")
    return num_vars, offset, kind, cardinality


def parse_problem(text: str) -> Problem:
    lines = [
        (number, line.strip())
        for number, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not lines:
        raise ProblemFileError("problem file is empty")

    num_vars, offset, kind, cardinality = _parse_header(lines[0][1], lines[0][0])
    terms = {}
    for number, line in lines[1:]:
        fields = line.split()
        if len(fields) != 2:
            raise ProblemFileError(f"line {number}: expected '<indices> <coefficient>', got {line!r}")
        try:
            term = tuple(int(i) for i in fields[0].split(","))
            coefficient = float(fields[1])
        except ValueError:
            raise ProblemFileError(f"line {number}: cannot parse {line!r}")
        key = tuple(sorted(term))
        if key in terms:
            raise ProblemFileError(f"line {number}: duplicate term {fields[0]}")
        terms[key] = coefficient

    try:
        if kind == "spin":
            return SpinHamiltonian(num_vars=num_vars, terms=terms, offset=offset)
        return PolyBinaryProblem(num_vars=num_vars, terms=terms, constant=offset, cardinality=cardinality)
    except ProblemError as exc:
        raise ProblemFileError(f"invalid problem: {exc}")


def read_problem(path: PathLike) -> Problem:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ProblemFileError(f"problem file not found: {path}")
    return parse_problem(text)

