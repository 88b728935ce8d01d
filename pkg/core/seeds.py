"""
seeds.py

Purpose:
--------
The single seed-splitting scheme used by every stage.

A run is driven by ONE root seed. Every sub-stage (a round, a donor, a
restart, a benchmark instance) receives a seed derived from the root and a
path of labels describing where it sits in the run:

    derive_seed(root, "hrqaoa", round_index, "donor", donor_index)

The derivation is numpy's SeedSequence with the path as its spawn key.
String labels are mapped to integers with CRC-32 so that the scheme is
stable across processes and platforms (Python's hash() is salted).

Invariants:
-----------
1. Same root + same path -> same seed, always.
2. Different paths give statistically independent streams.
3. No wall-clock seeding anywhere.
"""

import zlib
from typing import Union

import numpy as np

from core.errors import UsageError

PathLabel = Union[int, str]


def _label_to_int(label: PathLabel) -> int:
    if isinstance(label, str):
        return zlib.crc32(label.encode("utf-8"))
    if label < 0:
        raise UsageError(f"Seed path labels must be non-negative, got {label}")
    return int(label)


def derive_seed(root: int, *path: PathLabel) -> int:
    """
    Derive a reproducible 32-bit seed for the sub-stage named by `path`.

    Parameters:
    -----------
    root : int
        Top-level seed of the run.
    path : int | str
        Labels locating the sub-stage.

    Returns:
    --------
    int
        Seed in [0, 2^32).
    """
    sequence = np.random.SeedSequence(
        entropy=int(root),
        spawn_key=tuple(_label_to_int(label) for label in path),
    )
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def make_rng(root: int, *path: PathLabel) -> np.random.Generator:
    """PCG64 generator for the sub-stage named by `path`."""
    return np.random.default_rng(derive_seed(root, *path))
