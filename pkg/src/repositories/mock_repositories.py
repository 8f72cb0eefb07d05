"""
In-memory Repository Implementation.
Used by the test suite and by dry runs that should leave no files behind.
"""

import json
import threading
from typing import Any, Dict, List, Sequence

import numpy as np

from src.repositories.interfaces import IArtifactRepository
from src.repositories.serialization import array_bytes, canonical_json, csv_bytes, sha256_hex


class InMemoryArtifactRepository(IArtifactRepository):
    """Dict-backed artifact repository."""

    def __init__(self) -> None:
        self.files: Dict[str, bytes] = {}
        self._lock = threading.Lock()

    def _write(self, name: str, data: bytes) -> str:
        with self._lock:
            self.files[name] = data
        return sha256_hex(data)

    def write_json(self, name: str, payload: Any) -> str:
        return self._write(name, canonical_json(payload))

    def write_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        return self._write(name, csv_bytes(header, rows))

    def write_array(self, name: str, array: np.ndarray) -> str:
        header, raw = array_bytes(array)
        self._write(f"{name}.json", header)
        return self._write(f"{name}.bin", raw)

    def read_json(self, name: str) -> Any:
        return json.loads(self.files[name].decode("utf-8"))

    def list_artifacts(self) -> List[str]:
        return sorted(self.files)

    def digests(self) -> Dict[str, str]:
        with self._lock:
            return {name: sha256_hex(data) for name, data in self.files.items()}
