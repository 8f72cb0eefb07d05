"""
Test artifact repositories, byte-stable encoders and the run manifest.
"""

import hashlib

import numpy as np
import pytest

from src.repositories.filesystem_repository import TEMP_PREFIX, FileArtifactRepository
from src.repositories.manifest import MANIFEST_NAME, write_manifest
from src.repositories.mock_repositories import InMemoryArtifactRepository
from src.repositories.serialization import canonical_json, csv_bytes


def test_canonical_json_bytes():
    """Sorted keys, no spaces, trailing newline; numpy scalars and complex values encode."""
    # Assertions
    assert canonical_json({"b": 1, "a": [1.5, True]}) == b'{"a":[1.5,true],"b":1}\n'
    assert canonical_json({"x": np.float64(0.25), "z": 1 + 2j}) == b'{"x":0.25,"z":[1.0,2.0]}\n'
    assert canonical_json(np.array([True, False]) == np.array([True, True])) == b"[true,false]\n"


def test_canonical_json_rejects_nan():
    with pytest.raises(ValueError):
        canonical_json({"x": float("nan")})


def test_csv_bytes():
    """LF line endings and round-trip float text."""
    # Assertions
    assert csv_bytes(["a", "b"], [[1, 0.1]]) == b"a,b\n1,0.1\n"
    with pytest.raises(ValueError):
        csv_bytes(["a", "b"], [[1]])


def test_file_repository_writes_atomically(tmp_path):
    """Digests match the bytes on disk and no temporary files remain."""
    repository = FileArtifactRepository(tmp_path / "out")
    digest = repository.write_json("report.json", {"value": 1})
    repository.write_csv("tables/gaps.csv", ["n", "gamma"], [[1, 0.5], [2, 0.25]])

    data = (tmp_path / "out" / "report.json").read_bytes()

    # Assertions
    assert digest == hashlib.sha256(data).hexdigest()
    assert repository.read_json("report.json") == {"value": 1}
    assert repository.list_artifacts() == ["report.json", "tables/gaps.csv"]
    assert not any(p.name.startswith(TEMP_PREFIX) for p in (tmp_path / "out").rglob("*"))


def test_file_repository_rejects_escaping_names(tmp_path):
    repository = FileArtifactRepository(tmp_path)

    with pytest.raises(ValueError):
        repository.write_json("../outside.json", {})


def test_write_array_is_column_major(tmp_path):
    """Raw bytes use Fortran order and the header records shape and dtype."""
    repository = FileArtifactRepository(tmp_path)
    array = np.arange(6, dtype=float).reshape(2, 3)
    repository.write_array("grid", array)

    header = repository.read_json("grid.json")
    raw = np.frombuffer((tmp_path / "grid.bin").read_bytes(), dtype=float)

    # Assertions
    assert header == {"dtype": "<f8", "layout": "F", "shape": [2, 3]}
    assert np.array_equal(raw, array.ravel(order="F"))


def test_manifest_lists_artifacts_but_not_itself():
    """The manifest covers earlier artifacts with their digests."""
    repository = InMemoryArtifactRepository()
    repository.write_json("report.json", {"ok": True})
    write_manifest(repository, "forward", {"q": 0.5}, {"tol_gap": 1e-8}, seed=3)

    manifest = repository.read_json(MANIFEST_NAME)

    # Assertions
    assert manifest["command"] == "forward"
    assert manifest["seed"] == 3
    assert list(manifest["artifacts"]) == ["report.json"]
    assert set(manifest["versions"]) == {"numpy", "scipy", "pydantic"}


def test_manifest_is_deterministic():
    """Identical runs give identical manifest bytes."""
    outputs = []
    for _ in range(2):
        repository = InMemoryArtifactRepository()
        repository.write_csv("gaps.csv", ["n", "gamma"], [[1, 0.5]])
        write_manifest(repository, "forward", {"q": 0.5}, {"tol_gap": 1e-8}, seed=0)
        outputs.append(repository.files[MANIFEST_NAME])

    # Assertions
    assert outputs[0] == outputs[1]
