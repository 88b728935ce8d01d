"""
database.py

Purpose:
--------
SQLite store for benchmark rows: opening the store, atomic write blocks,
and the insert/fetch pair the harness and its tests use.

Design Principles:
------------------
1. Storage plumbing only. Solvers, instances and timeouts are unknown here.
2. Writers decide the unit of atomicity; this module only supplies the block.

The harness groups the rows of one (size, seed) instance in one
`transaction` block, so an interrupted benchmark leaves whole instances.
"""

import logging
import sqlite3
from contextlib import contextmanager
from typing import Dict, Iterator, Iterable, List, Mapping

logger = logging.getLogger(__name__)

BENCH_COLUMNS = (
    "size",
    "seed",
    "solver",
    "time",
    "energy",
    "gap",
    "gap_absolute",
    "timeout_hit",
)

_SCHEMA = """
CREATE TABLE IF NOT EXISTS bench_results (
    size INTEGER NOT NULL,
    seed INTEGER NOT NULL,
    solver TEXT NOT NULL,
    time REAL NOT NULL,
    energy REAL NOT NULL,
    gap REAL,
    gap_absolute INTEGER,
    timeout_hit INTEGER NOT NULL,
    PRIMARY KEY (size, seed, solver)
)
"""


# -----------------------------------------------------------------------------
# Store
# -----------------------------------------------------------------------------

def get_connection(db_path: str) -> sqlite3.Connection:
    """
    Open (or create) a result store with `bench_results` in place.

    Parameters:
    -----------
    db_path : str
        File path, or ':memory:' for a throwaway store.

    Notes:
    ------
    - Rows come back as sqlite3.Row, so columns are addressable by name
    - Autocommit mode (isolation_level=None): BEGIN/COMMIT are issued
      explicitly by `transaction`, never implicitly by the driver
    """
    conn = sqlite3.connect(db_path, isolation_level=None)
    conn.row_factory = sqlite3.Row
    conn.execute(_SCHEMA)
    return conn


@contextmanager
def transaction(conn: sqlite3.Connection) -> Iterator[sqlite3.Connection]:
    """
    All-or-nothing block of writes.

        with transaction(conn) as tx:
            insert_rows(tx, rows)

    The block is committed when it exits normally and rolled back when it
    raises; the exception propagates.
    """
    conn.execute("BEGIN")
    try:
        yield conn
    except BaseException:
        conn.execute("ROLLBACK")
        logger.warning("Rolled back result-store transaction")
        raise
    conn.execute("COMMIT")


# -----------------------------------------------------------------------------
# Result rows
# -----------------------------------------------------------------------------

def insert_rows(conn: sqlite3.Connection, rows: Iterable[Mapping]) -> None:
    """Insert (or replace) result rows inside the caller's transaction."""
    placeholders = ", ".join("?" for _ in BENCH_COLUMNS)
    conn.executemany(
        f"INSERT OR REPLACE INTO bench_results ({', '.join(BENCH_COLUMNS)}) VALUES ({placeholders})",
        [tuple(row[column] for column in BENCH_COLUMNS) for row in rows],
    )


def fetch_rows(conn: sqlite3.Connection) -> List[Dict]:
    cursor = conn.execute(
        f"SELECT {', '.join(BENCH_COLUMNS)} FROM bench_results ORDER BY size, seed, solver"
    )
    return [dict(row) for row in cursor.fetchall()]
