"""
Result storage for Monte Carlo experiments
Keeps one directory per experiment: the manifest, the append-only trial
records and the derived tables.
"""

import datetime
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple

import pandas as pd
from scipy.stats import norm

logger = logging.getLogger(__name__)

STORE_VERSION = "1.0.0"
CELL_COLUMNS = ["property", "model", "m1", "m2", "n"]


@dataclass
class TrialRecord:
    """One finished trial."""
    config_hash: str
    cell: Dict
    cell_key: str
    trial: int
    seed: int
    success: bool
    outcome: Dict = field(default_factory=dict)
    elapsed: float = 0.0

    def reproducible(self) -> Dict:
        """Every field except the wall-clock time."""
        payload = asdict(self)
        payload.pop("elapsed")
        return payload


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    z = norm.ppf(0.5 + confidence / 2)
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


class ExperimentStore:
    """Reads and writes one experiment directory."""

    def __init__(self, out_dir: str):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.manifest_file = self.out_dir / "manifest.json"
        self.records_file = self.out_dir / "records.jsonl"

    def write_manifest(self, config: Dict, config_hash: str) -> None:
        """Record the config; a directory holding a different config is refused."""
        existing = self.load_manifest()
        if existing and existing.get("config_hash") != config_hash:
            raise ValueError(
                f"{self.out_dir} holds experiment {existing.get('config_hash')}, not {config_hash}"
            )
        if existing:
            return
        manifest = {
            "config": config,
            "config_hash": config_hash,
            "created": datetime.datetime.now().isoformat(),
            "version": STORE_VERSION,
        }
        with open(self.manifest_file, "w") as f:
            json.dump(manifest, f, indent=2)

    def load_manifest(self) -> Dict:
        try:
            with open(self.manifest_file, "r") as f:
                return json.load(f)
        except (FileNotFoundError, json.JSONDecodeError):
            return {}

    def append(self, records: List[TrialRecord]) -> None:
        with open(self.records_file, "a") as f:
            for record in records:
                f.write(json.dumps(asdict(record), sort_keys=True) + "\n")
            f.flush()

    def load_records(self) -> List[TrialRecord]:
        if not self.records_file.exists():
            return []
        records = []
        with open(self.records_file, "r") as f:
            for number, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    records.append(TrialRecord(**json.loads(line)))
                except (json.JSONDecodeError, TypeError) as e:
                    logger.warning("Skipping corrupt record on line %d of %s: %s", number, self.records_file, e)
        return records

    def completed(self, config_hash: str) -> Set[Tuple[str, int]]:
        return {(r.cell_key, r.trial) for r in self.load_records() if r.config_hash == config_hash}

    def get_cell_stats(self) -> List[Dict]:
        """Per-cell success frequency with a Wilson 95% interval."""
        records = self.load_records()
        if not records:
            return []

        cells: Dict[str, Dict] = {}
        for record in records:
            row = cells.setdefault(record.cell_key, {
                **{name: record.cell[name] for name in CELL_COLUMNS},
                "trials": 0,
                "successes": 0,
                "elapsed": 0.0,
            })
            row["trials"] += 1
            row["successes"] += int(record.success)
            row["elapsed"] += record.elapsed

        table = []
        for row in cells.values():
            low, high = wilson_interval(row["successes"], row["trials"])
            table.append({
                **{name: row[name] for name in CELL_COLUMNS},
                "trials": row["trials"],
                "successes": row["successes"],
                "frequency": round(row["successes"] / row["trials"], 6),
                "ci_low": round(low, 6),
                "ci_high": round(high, 6),
                "mean_elapsed": round(row["elapsed"] / row["trials"], 4),
            })
        return table

    def results_frame(self) -> pd.DataFrame:
        columns = CELL_COLUMNS + ["trials", "successes", "frequency", "ci_low", "ci_high", "mean_elapsed"]
        frame = pd.DataFrame(self.get_cell_stats(), columns=columns)
        return frame.sort_values(CELL_COLUMNS).reset_index(drop=True)

    def export_csv(self, filename: Optional[str] = None) -> str:
        export_path = self.out_dir / (filename or "results.csv")
        self.results_frame().to_csv(export_path, index=False)
        return str(export_path)

    def export_markdown(self, filename: Optional[str] = None) -> str:
        if not filename:
            timestamp = datetime.datetime.now().strftime("%Y%m%d_%H%M%S")
            filename = f"results_{timestamp}.md"
        export_path = self.out_dir / filename
        with open(export_path, "w") as f:
            f.write(self.results_frame().to_markdown(index=False) + "\n")
        return str(export_path)
