"""
Filesystem artifact repository.
Every file is written to a temporary sibling and moved into place with
os.replace, so concurrent runs never observe a partial artifact.
"""

import json
import os
import tempfile
import threading
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from src.repositories.interfaces import IArtifactRepository
from src.repositories.serialization import array_bytes, canonical_json, csv_bytes, sha256_hex
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

TEMP_PREFIX = ".tmp-"


class FileArtifactRepository(IArtifactRepository):
    """Artifact repository rooted at an output directory."""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._digests: Dict[str, str] = {}
        self._lock = threading.Lock()
        logger.info("Initialized FileArtifactRepository", root=str(self.root))

    def _path(self, name: str) -> Path:
        path = (self.root / name).resolve()
        if self.root.resolve() not in path.parents:
            raise ValueError(f"artifact name escapes the output directory: {name}")
        return path

    def _write(self, name: str, data: bytes) -> str:
        path = self._path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        handle = tempfile.NamedTemporaryFile(
            dir=path.parent, prefix=TEMP_PREFIX, delete=False
        )
        try:
            with handle:
                handle.write(data)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(handle.name, path)
        except Exception as e:
            logger.error("Artifact write failed", name=name, error=str(e), exc_info=True)
            Path(handle.name).unlink(missing_ok=True)
            raise

        digest = sha256_hex(data)
        with self._lock:
            self._digests[name] = digest
        logger.debug("Wrote artifact", name=name, bytes=len(data), sha256=digest)
        return digest

    def write_json(self, name: str, payload: Any) -> str:
        return self._write(name, canonical_json(payload))

    def write_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        return self._write(name, csv_bytes(header, rows))

    def write_array(self, name: str, array: np.ndarray) -> str:
        header, raw = array_bytes(array)
        self._write(f"{name}.json", header)
        return self._write(f"{name}.bin", raw)

    def read_json(self, name: str) -> Any:
        return json.loads(self._path(name).read_text(encoding="utf-8"))

    def list_artifacts(self) -> List[str]:
        return sorted(
            str(p.relative_to(self.root))
            for p in self.root.rglob("*")
            if p.is_file() and not p.name.startswith(TEMP_PREFIX)
        )

    def digests(self) -> Dict[str, str]:
        with self._lock:
            return dict(self._digests)
