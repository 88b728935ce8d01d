"""
errors.py

Purpose:
--------
Root of every domain exception raised by the toolkit.

Each module declares its own exceptions next to its code and derives them
from one of the three bases below. The base decides the process exit code
used by the command-line surface:

- UsageError        -> 2  (contract violated by the caller)
- DataError         -> 3  (input data malformed or inconsistent)
- ResourceCapError  -> 4  (problem too large for an exact method)

This file must NEVER contain logic beyond the hierarchy itself.
"""


class PipelineError(Exception):
    """Base exception for all toolkit failures."""

    exit_code = 1


class UsageError(PipelineError):
    """
    Raised when an operation is called outside its contract.

    Examples: levels < 2, an empty column list, d_s >= N.
    """

    exit_code = 2


class DataError(PipelineError):
    """
    Raised when input data cannot be interpreted.

    Examples: a non-integer cell, a missing label column, a malformed
    problem file.
    """

    exit_code = 3


class ResourceCapError(PipelineError):
    """
    Raised when an exact method would exceed its configured size cap.

    Examples: a 30-qubit statevector, brute force over 2^30 assignments.
    """

    exit_code = 4
