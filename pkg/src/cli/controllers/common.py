"""
Shared helpers for the experiment controllers: input loading and the worker pool.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, List, Optional, Sequence, TypeVar

import numpy as np

from src.cli.dtos import DatumParams
from src.dependencies import get_inverse_service_instance, get_settings
from src.domain.errors import ConfigError
from src.domain.models import BirkhoffState, RealField
from src.services.birkhoff_service import state_from_gaps
from src.services.spectral_core import one_gap_potential

T = TypeVar("T")
R = TypeVar("R")


def read_json_file(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"input file not found: {path}", {"path": path}) from e
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"input file is not valid JSON: {path}", {"path": path, "line": e.lineno}
        ) from e


def state_from_pairs(pairs: Any, c: float = 0.0) -> BirkhoffState:
    """BirkhoffState from a JSON list of (gamma_n, phi_n) pairs."""
    try:
        data = np.asarray(pairs, dtype=float).reshape(-1, 2)
    except (TypeError, ValueError) as e:
        raise ConfigError("gap file must hold a list of [gamma, phi] pairs") from e
    return state_from_gaps(data[:, 0], data[:, 1], c)


def one_gap_state(q: float, c: float = 0.0) -> BirkhoffState:
    """Coordinates of u_{0,q}: gamma_1 = q^2/(1 - q^2) with zeta_1 real negative."""
    return state_from_gaps([q * q / (1.0 - q * q)], [np.pi], c)


def resolve_state(params: DatumParams) -> Optional[BirkhoffState]:
    """Finite-gap state named by the parameters, or None when the datum is a field file."""
    if params.field is not None:
        return None
    if params.state is not None:
        return BirkhoffState.from_payload(read_json_file(params.state))
    if params.gaps is not None:
        return state_from_pairs(read_json_file(params.gaps), params.c)
    if params.gamma is not None:
        return state_from_gaps(params.gamma, params.phases, params.c)
    if params.epsilon != 1.0:
        return None
    return one_gap_state(params.q, params.c)


def resolve_field(params: DatumParams, N: int) -> RealField:
    """Initial potential on modes -N..N."""
    if params.field is not None:
        return RealField.from_payload(read_json_file(params.field)).with_modes(N)
    state = resolve_state(params)
    if state is None:
        return one_gap_potential(params.q, params.epsilon, N).plus_constant(params.c)
    return get_inverse_service_instance().reconstruct(state, N)


def run_modes(modes: Optional[int]) -> int:
    return modes or get_settings().modes


def parallel_map(fn: Callable[[T], R], items: Sequence[T], jobs: int) -> List[R]:
    """Ordered map over a thread pool; results keep the input order."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))
