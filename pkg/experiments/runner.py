"""
Monte Carlo experiment runner
Expands a config into (model, m, n, property) cells, runs the missing
trials on a process pool and appends the records in submission order.
"""

import hashlib
import json
import logging
import re
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterator, List, Optional, Tuple, Union

import pandas as pd
from pydantic import BaseModel, Field, field_validator, model_validator

from config.settings import get_results_dir, get_threads
from experiments.properties import EXPERIMENT_MODELS, PROPERTIES, AlgorithmParams, Cell, run_trial
from experiments.store import ExperimentStore, TrialRecord
from graphs.errors import CellExecutionError
from graphs.generate import derive_seed

logger = logging.getLogger(__name__)

Task = Tuple[Cell, int, int, AlgorithmParams, str]

EXPERIMENT_NAME = re.compile(r"^[A-Za-z0-9_.-]+$")


def check_experiment_name(name: str) -> str:
    """Experiment names become one directory under the results dir."""
    if not EXPERIMENT_NAME.match(name) or name in (".", ".."):
        raise ValueError(f"Experiment name must use letters, digits, '_', '-' or '.', got {name!r}")
    return name


def experiment_dir(name: str) -> Path:
    return Path(get_results_dir()) / check_experiment_name(name)


class ExperimentConfig(BaseModel):
    name: str = "experiment"
    model: Union[str, List[str]]
    m: Optional[int] = Field(None, ge=0)
    m1: Optional[int] = Field(None, ge=0)
    m2: Optional[int] = Field(None, ge=0)
    n: List[int]
    trials: int = Field(..., ge=1)
    property: Union[str, List[str]]
    seed: int = Field(0, ge=0, lt=2**64)
    params: AlgorithmParams = Field(default_factory=AlgorithmParams)

    @field_validator("name")
    @classmethod
    def _safe_name(cls, value: str) -> str:
        return check_experiment_name(value)

    @field_validator("model", "property", mode="before")
    @classmethod
    def _as_list(cls, value):
        return [value] if isinstance(value, str) else value

    @field_validator("model")
    @classmethod
    def _known_models(cls, value: List[str]) -> List[str]:
        unknown = [v for v in value if v not in EXPERIMENT_MODELS]
        if unknown or not value:
            raise ValueError(f"Unknown model(s): {unknown}")
        return value

    @field_validator("property")
    @classmethod
    def _known_properties(cls, value: List[str]) -> List[str]:
        unknown = [v for v in value if v not in PROPERTIES]
        if unknown or not value:
            raise ValueError(f"Unknown property: {', '.join(unknown) or '(none)'}")
        return value

    @field_validator("n")
    @classmethod
    def _positive_sizes(cls, value: List[int]) -> List[int]:
        if not value or any(v < 1 for v in value):
            raise ValueError("n values must be at least 1")
        return value

    @model_validator(mode="after")
    def _split(self) -> "ExperimentConfig":
        if self.m1 is None and self.m is None:
            raise ValueError("Give m or the split (m1, m2)")
        if self.m1 is None:
            self.m1, self.m2 = self.m, 0
        elif self.m2 is None:
            self.m2 = 0
        if self.m is not None and self.m != self.m1 + self.m2:
            raise ValueError(f"m={self.m} does not match m1 + m2 = {self.m1 + self.m2}")
        return self

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "ExperimentConfig":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")
        with open(path, "r") as f:
            return cls.model_validate(json.load(f))

    def config_hash(self) -> str:
        canonical = json.dumps(self.model_dump(), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    def cells(self) -> List[Cell]:
        return [
            Cell(model=model, m1=self.m1, m2=self.m2, n=n, property=prop)
            for prop in self.property
            for model in self.model
            for n in self.n
        ]


def trial_seed(master: int, cell: Cell, trial: int) -> int:
    return derive_seed(master, cell.key, trial)


def execute_trial(task: Task) -> TrialRecord:
    cell, trial, seed, params, config_hash = task
    started = time.perf_counter()
    try:
        success, outcome = run_trial(cell, seed, params)
    except Exception as e:
        raise CellExecutionError(f"Cell {cell.key} trial {trial} (seed {seed}) failed: {e}") from e
    return TrialRecord(
        config_hash=config_hash,
        cell={"model": cell.model, "m1": cell.m1, "m2": cell.m2, "n": cell.n, "property": cell.property},
        cell_key=cell.key,
        trial=trial,
        seed=seed,
        success=success,
        outcome=outcome,
        elapsed=time.perf_counter() - started,
    )


def _pending(cfg: ExperimentConfig, config_hash: str, done) -> Iterator[Tuple[Cell, List[Task]]]:
    for cell in cfg.cells():
        tasks = [
            (cell, trial, trial_seed(cfg.seed, cell, trial), cfg.params, config_hash)
            for trial in range(cfg.trials)
            if (cell.key, trial) not in done
        ]
        if tasks:
            yield cell, tasks
        else:
            logger.info("Cell %s already complete, skipping", cell.key)


def run_experiment(
    cfg: ExperimentConfig,
    out_dir: Optional[Union[str, Path]] = None,
    workers: Optional[int] = None,
) -> pd.DataFrame:
    """Run every missing trial and return the per-cell result table."""
    store = ExperimentStore(str(out_dir or experiment_dir(cfg.name)))
    config_hash = cfg.config_hash()
    store.write_manifest(cfg.model_dump(), config_hash)
    done = store.completed(config_hash)
    workers = workers or get_threads()

    pending = list(_pending(cfg, config_hash, done))
    if workers == 1:
        for cell, tasks in pending:
            store.append([execute_trial(task) for task in tasks])
    elif pending:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for cell, tasks in pending:
                chunk = max(1, len(tasks) // (4 * workers))
                store.append(list(pool.map(execute_trial, tasks, chunksize=chunk)))
                logger.info("Cell %s: %d trials written", cell.key, len(tasks))

    return store.results_frame()
