"""Run manifest model."""

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional


@dataclass
class RunManifest:
    """Provenance of one CLI run."""

    command: str
    config_path: Optional[str]
    seeds: List[int]
    output_dir: str
    version: str
    timestamp: str
    arguments: Dict[str, object] = field(default_factory=dict)
    files: Dict[str, str] = field(default_factory=dict)

    def content_hash(self) -> str:
        """
        SHA-256 over the run inputs.

        The timestamp and the output digests are excluded so outputs can
        embed the hash and stay byte-identical across repeated runs.
        """
        payload = asdict(self)
        payload.pop("timestamp")
        payload.pop("files")
        encoded = json.dumps(payload, sort_keys=True, default=str).encode("utf-8")
        return hashlib.sha256(encoded).hexdigest()

    def to_dict(self) -> dict:
        """Convert to dictionary format, hash included."""
        data = asdict(self)
        data["manifest_hash"] = self.content_hash()
        return data
