"""
Repository interfaces (Abstract Base Classes).
These define the contract for experiment artifact storage.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Sequence

import numpy as np


class IArtifactRepository(ABC):
    """Interface for an experiment output store."""

    @abstractmethod
    def write_json(self, name: str, payload: Any) -> str:
        """Write canonical JSON; returns the sha256 of the bytes written."""
        pass

    @abstractmethod
    def write_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        """Write a CSV table; returns the sha256 of the bytes written."""
        pass

    @abstractmethod
    def write_array(self, name: str, array: np.ndarray) -> str:
        """Write raw column-major bytes plus a JSON header."""
        pass

    @abstractmethod
    def read_json(self, name: str) -> Any:
        """Read back a JSON artifact."""
        pass

    @abstractmethod
    def list_artifacts(self) -> List[str]:
        """Names of all stored artifacts, sorted."""
        pass

    @abstractmethod
    def digests(self) -> Dict[str, str]:
        """sha256 of every artifact written through this repository."""
        pass
