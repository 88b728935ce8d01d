"""
config.py

Purpose:
--------
RunConfig: every stage parameter of the command-line surface in one
validated model.

Values come from (lowest to highest precedence) the model defaults, an
optional JSON config file, and the flags passed on the command line.
Every seed is explicit; nothing is seeded from the clock.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from core.errors import UsageError

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class ConfigError(UsageError):
    """Raised when a config file or flag combination is invalid."""
    pass


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    # -- shared ---------------------------------------------------------------
    seed: int = Field(default=0, ge=0)
    threads: int = Field(default=1, ge=1)
    log_level: str = "WARNING"

    # -- tables ---------------------------------------------------------------
    label_column: str = "label"
    delimiter: str = ","
    levels: int = Field(default=5, ge=2)

    # -- build ----------------------------------------------------------------
    formulation: Literal["mrmr", "miqubo", "full-qubo", "entropy-cubo"] = "entropy-cubo"
    lam: Optional[float] = None
    alpha: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    k: Optional[int] = Field(default=None, ge=1)

    # -- solve ----------------------------------------------------------------
    method: Literal["brute", "tabu", "rqaoa", "hrqaoa", "random-fix"] = "hrqaoa"
    finisher: Literal["brute", "tabu"] = "brute"
    lambda_c: float = Field(default=5.0, gt=0)
    d_s: int = Field(default=4, ge=1)
    n_s: int = Field(default=5, ge=1)
    p: int = Field(default=1, ge=1)
    rounds: Optional[int] = Field(default=None, ge=0)
    cutoff: Optional[int] = Field(default=None, ge=1)
    elimination: Literal["random", "smallest"] = "random"
    reuse_donors: bool = False
    maxiter: int = Field(default=5000, ge=1)
    optimizer_restarts: Optional[int] = Field(default=None, ge=1)
    tabu_restarts: int = Field(default=20, ge=1)

    # -- sparsify -------------------------------------------------------------
    sparsify_method: Literal["truncate", "randomized-tail", "heavy-hex"] = "truncate"
    keep: Union[int, float] = 0.5
    threshold: float = Field(default=0.1, gt=0)
    budget: int = Field(default=0, ge=0)
    surrogate_angle: Optional[float] = None
    rows: int = Field(default=2, ge=1)
    cols: int = Field(default=2, ge=1)
    max_swap_cost: int = Field(default=0, ge=0)
    sweep: List[int] = Field(default_factory=list)

    # -- bench ----------------------------------------------------------------
    sizes: List[int] = Field(default_factory=lambda: [10, 12, 14, 16])
    seeds: List[int] = Field(default_factory=lambda: [0, 1, 2])
    solvers: List[Literal["brute", "tabu"]] = Field(default_factory=lambda: ["brute", "tabu"])
    instance_kind: Literal["entropy-cubo", "random-cubic"] = "entropy-cubo"
    improvement_timeout: float = Field(default=10.0, gt=0)
    db: Optional[str] = None

    # -- resources ------------------------------------------------------------
    t_g: float = Field(default=1e-7, ge=0)
    t_p: float = Field(default=1e-4, ge=0)
    t_opt: float = Field(default=1.0, ge=0)
    epsilon: float = Field(default=0.1, gt=0, lt=1)
    delta: float = Field(default=0.05, gt=0, lt=1)
    fit: Optional[Tuple[float, float, float]] = None
    fit_from: Optional[str] = None
    fit_solver: Literal["brute", "tabu"] = "brute"
    reduction_rounds: int = Field(default=6, ge=1)

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in LOG_LEVELS:
            raise ValueError(f"log_level must be one of {list(LOG_LEVELS)}")
        return value

    @field_validator("keep")
    @classmethod
    def _keep_count_or_fraction(cls, value: Union[int, float]) -> Union[int, float]:
        if isinstance(value, int) and value < 1:
            raise ValueError("a keep count must be >= 1")
        if isinstance(value, float) and not 0.0 < value <= 1.0:
            raise ValueError("a keep fraction must lie in (0, 1]")
        return value

    @field_validator("sweep", "sizes")
    @classmethod
    def _non_negative(cls, values: List[int]) -> List[int]:
        if any(v < 0 for v in values):
            raise ValueError("values must be >= 0")
        return values


def load_config(path: Optional[str], overrides: Dict[str, Any]) -> RunConfig:
    """
    Defaults <- JSON file (if any) <- explicitly passed flags.

    Raises:
    -------
    ConfigError
        If the file is missing or malformed, or a value fails validation.
    """
    values: Dict[str, Any] = {}
    if path is not None:
        try:
            values = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}")
        if not isinstance(values, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
    values.update(overrides)
    try:
        return RunConfig.model_validate(values)
    except ValidationError as exc:
        raise ConfigError(str(exc))
