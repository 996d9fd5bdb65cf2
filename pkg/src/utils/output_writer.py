"""Report, CSV and manifest output."""

import csv
import hashlib
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .. import __version__
from ..models.manifest import RunManifest

REPORT_FILE = "report.json"
TRACE_FILE = "trace.csv"
MANIFEST_FILE = "manifest.json"


def format_float(value: float) -> str:
    """17 significant digits, '.' decimal, locale independent."""
    return format(float(value), ".17g")


def to_jsonable(value: Any) -> Any:
    """
    Convert numpy values and containers into plain JSON types.

    Non-finite floats become the strings "inf", "-inf" and "nan".
    """
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


class OutputWriter:
    """Writes one run's outputs into a directory, all tagged with the manifest hash."""

    def __init__(self, manifest: RunManifest):
        self.manifest = manifest
        self.output_dir = Path(manifest.output_dir)
        self.manifest_hash = manifest.content_hash()

    def _track(self, path: Path) -> str:
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        self.manifest.files[path.name] = digest
        return str(path)

    def write_report(self, result: Dict[str, Any], name: str = REPORT_FILE) -> str:
        """
        Write a JSON report.

        Args:
            result: Report body
            name: File name inside the output directory

        Returns:
            Path of the written file
        """
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.output_dir / name
        payload = {
            "manifest_hash": self.manifest_hash,
            "command": self.manifest.command,
            "result": to_jsonable(result),
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
        return self._track(path)

    def write_csv(self, header: Sequence[str], rows: Iterable[Sequence[Any]], name: str = TRACE_FILE) -> str:
        """
        Write rows as CSV; floats use 17 significant digits.

        The first line is a comment carrying the manifest hash.
        """
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.output_dir / name
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(f"# manifest_hash={self.manifest_hash}\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(value) for value in row])
        return self._track(path)

    def write_manifest(self) -> str:
        """Write manifest.json with the digests of every file written so far."""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.output_dir / MANIFEST_FILE
        with open(path, "w", encoding="utf-8") as f:
            json.dump(to_jsonable(self.manifest.to_dict()), f, indent=2, sort_keys=True)
            f.write("\n")
        return str(path)


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def build_manifest(
    command: str,
    output_dir: str,
    seeds: List[int],
    config_path: Optional[str] = None,
    arguments: Optional[Dict[str, Any]] = None,
) -> RunManifest:
    """Manifest of a run started now."""
    return RunManifest(
        command=command,
        config_path=config_path,
        seeds=list(seeds),
        output_dir=str(output_dir),
        version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        arguments=to_jsonable(arguments or {}),
    )
