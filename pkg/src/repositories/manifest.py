"""
Run manifest: inputs, library versions, seed, tolerances and artifact digests.
No timestamps, so identical runs produce identical manifests.
"""

from importlib import metadata
from typing import Any, Dict

from src.repositories.interfaces import IArtifactRepository

MANIFEST_NAME = "manifest.json"
TRACKED_PACKAGES = ("numpy", "scipy", "pydantic")


def package_versions() -> Dict[str, str]:
    versions = {}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def write_manifest(
    repository: IArtifactRepository,
    command: str,
    inputs: Dict[str, Any],
    tolerances: Dict[str, float],
    seed: int,
) -> str:
    """Write manifest.json covering every artifact written so far."""
    artifacts = {
        name: digest
        for name, digest in sorted(repository.digests().items())
        if name != MANIFEST_NAME
    }
    manifest = {
        "command": command,
        "inputs": inputs,
        "versions": package_versions(),
        "seed": seed,
        "tolerances": tolerances,
        "artifacts": artifacts,
    }
    return repository.write_json(MANIFEST_NAME, manifest)
