"""
Main command-line application.
Entry point for the bo experiment runner: ``bo <command> [flags]``.
"""

import argparse
import sys
from typing import Any, Callable, Dict, List, Optional

import structlog
from pydantic import ValidationError

from src.cli.controllers import flow_controller, illposed_controller, probe_controller, spectral_controller
from src.cli.controllers.common import read_json_file
from src.cli.dtos import Command, ExperimentConfig
from src.config import settings
from src.dependencies import configure_services, get_artifact_repository, tolerances
from src.domain.errors import BirkhoffError, ConfigError
from src.repositories.interfaces import IArtifactRepository
from src.repositories.manifest import write_manifest
from src.repositories.serialization import canonical_json
from src.utils.logging_config import get_logger, setup_logging

logger = get_logger(__name__)

Handler = Callable[[ExperimentConfig, IArtifactRepository], Dict[str, Any]]

HANDLERS: Dict[Command, Handler] = {
    Command.FORWARD: spectral_controller.forward,
    Command.INVERSE: spectral_controller.inverse,
    Command.SPECTRUM: spectral_controller.spectrum,
    Command.GENFUN: spectral_controller.genfun,
    Command.ROUNDTRIP: spectral_controller.roundtrip,
    Command.EVOLVE: flow_controller.evolve,
    Command.COMPARE: flow_controller.compare,
    Command.ILLPOSED_HALF: illposed_controller.illposed_half,
    Command.ILLPOSED_DEEP: illposed_controller.illposed_deep,
    Command.STABILITY: probe_controller.stability,
    Command.RECURRENCE: probe_controller.recurrence,
    Command.NORMTRACK: probe_controller.normtrack,
}

GLOBAL_KEYS = ("modes", "tol", "out_dir", "jobs", "seed")
RUN_KEYS = ("command", "config", "log_level")


# ============ Parser ============

def _global_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("global flags")
    group.add_argument("--modes", type=int, default=argparse.SUPPRESS, help="truncation order N")
    group.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="acceptance tolerance of the report")
    group.add_argument("--out", dest="out_dir", default=argparse.SUPPRESS, help="output directory")
    group.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker threads")
    group.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed of randomized fixtures")
    group.add_argument("--config", default=None, help="JSON experiment config; flags override it")
    group.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    return common


def _datum_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("initial datum")
    group.add_argument("--q", type=float, default=argparse.SUPPRESS, help="one-gap parameter in (0, 1)")
    group.add_argument("--eps", dest="epsilon", type=float, default=argparse.SUPPRESS, help="amplitude in (0, 1]")
    group.add_argument("--field", default=argparse.SUPPRESS, help="RealField JSON file")
    group.add_argument("--state", default=argparse.SUPPRESS, help="BirkhoffState JSON file")
    group.add_argument("--gaps", default=argparse.SUPPRESS, help="JSON list of [gamma, phi] pairs")
    group.add_argument("--gamma", type=float, nargs="+", default=argparse.SUPPRESS, help="inline actions")
    group.add_argument("--phases", type=float, nargs="+", default=argparse.SUPPRESS, help="inline angles")
    group.add_argument("--c", type=float, default=argparse.SUPPRESS, help="mean of the potential")


def _flag(parser: argparse.ArgumentParser, name: str, **kwargs: Any) -> None:
    parser.add_argument(name, default=argparse.SUPPRESS, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    """Parser for ``bo <command> [flags]``."""
    parser = argparse.ArgumentParser(prog="bo", description="Benjamin-Ono Birkhoff coordinate experiments.")
    commands = parser.add_subparsers(dest="command", required=True, metavar="<command>")
    common = [_global_flags()]

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        return commands.add_parser(name, parents=common, help=help_text)

    forward = command("forward", "Birkhoff coordinates of a potential")
    _datum_flags(forward)
    _flag(forward, "--n-trust", dest="n_trust", type=int)

    inverse = command("inverse", "potential of a finite-gap state")
    _datum_flags(inverse)

    spectrum = command("spectrum", "spectrum of the truncated Lax operator")
    _datum_flags(spectrum)
    _flag(spectrum, "--n-trust", dest="n_trust", type=int)
    _flag(spectrum, "--backend", choices=["auto", "dense", "lanczos"])
    _flag(spectrum, "--vectors", action="store_true", help="write eigenvectors as column-major bytes")

    genfun = command("genfun", "generating function, resolvent against product")
    _datum_flags(genfun)
    _flag(genfun, "--points", type=int)
    _flag(genfun, "--radius", type=float)

    for name, help_text in (("evolve", "evolve a potential"), ("compare", "quadrature against direct flow")):
        flow = command(name, help_text)
        _datum_flags(flow)
        _flag(flow, "--tmax", type=float)
        _flag(flow, "--dt", type=float)
        _flag(flow, "--samples", type=int)
        _flag(flow, "--s-list", dest="s_list", type=float, nargs="+")
        _flag(flow, "--diagnostic-gaps", dest="diagnostic_gaps", type=int)
        if name == "evolve":
            _flag(flow, "--method", choices=["quadrature", "direct"])
            _flag(flow, "--no-fields", dest="save_fields", action="store_false")
        else:
            _flag(flow, "--s", type=float)

    half = command("illposed-half", "deep ground-state sequence and its xi series")
    _flag(half, "--k", type=int)
    _flag(half, "--eps", type=float)
    _flag(half, "--interval", type=float, nargs=2)
    _flag(half, "--points-per-period", dest="points_per_period", type=int)
    _flag(half, "--f-grid", dest="f_grid", action="store_true")

    deep = command("illposed-deep", "two-gap divergence family")
    _flag(deep, "--gamma", type=float, nargs="+")
    _flag(deep, "--t", type=float)
    _flag(deep, "--coefficients", type=int)

    stability = command("stability", "orbital stability probe")
    _flag(stability, "--q", type=float)
    _flag(stability, "--delta", type=float)
    _flag(stability, "--s", type=float)
    _flag(stability, "--tmax", type=float)
    _flag(stability, "--samples", type=int)
    _flag(stability, "--shift", type=float)

    recurrence = command("recurrence", "almost-periodicity probe")
    _datum_flags(recurrence)
    _flag(recurrence, "--horizon", type=float)
    _flag(recurrence, "--return-tol", dest="eps", type=float)
    _flag(recurrence, "--s", type=float)
    _flag(recurrence, "--count", type=int)

    normtrack = command("normtrack", "Sobolev norms along the flow")
    _datum_flags(normtrack)
    _flag(normtrack, "--s-list", dest="s_list", type=float, nargs="+")
    _flag(normtrack, "--tmax", type=float)
    _flag(normtrack, "--direct-tmax", dest="direct_tmax", type=float)
    _flag(normtrack, "--direct-modes", dest="direct_modes", type=int)

    roundtrip = command("roundtrip", "forward/inverse consistency on seeded states")
    _flag(roundtrip, "--gaps", type=int, help="largest number of open gaps")
    _flag(roundtrip, "--states", type=int)
    _flag(roundtrip, "--gamma-min", dest="gamma_min", type=float)
    _flag(roundtrip, "--gamma-max", dest="gamma_max", type=float)

    return parser


# ============ Config assembly ============

def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Settings defaults, then the JSON config file, then the flags."""
    values = vars(args)
    merged: Dict[str, Any] = {
        "seed": settings.seed,
        "out_dir": settings.out_dir,
        "jobs": settings.jobs,
    }
    params: Dict[str, Any] = {}

    if values.get("config"):
        document = read_json_file(values["config"])
        if not isinstance(document, dict):
            raise ConfigError("config file must hold a JSON object", {"path": values["config"]})
        file_command = document.get("command")
        if file_command is not None and file_command != values["command"]:
            raise ConfigError(
                "config file names a different command",
                {"file": file_command, "flags": values["command"]},
            )
        params.update(document.get("params") or {})
        merged.update({key: document[key] for key in GLOBAL_KEYS if key in document})

    merged.update({key: values[key] for key in GLOBAL_KEYS if key in values})
    params.update({key: value for key, value in values.items() if key not in GLOBAL_KEYS + RUN_KEYS})

    try:
        return ExperimentConfig.model_validate({**merged, "command": values["command"], "params": params})
    except ValidationError as e:
        raise ConfigError(
            "invalid experiment configuration",
            {"errors": [{"loc": list(err["loc"]), "msg": err["msg"]} for err in e.errors()]},
        ) from e


# ============ Runner ============

def _fail(error: BirkhoffError) -> int:
    sys.stderr.write(canonical_json(error.to_payload()).decode("utf-8"))
    return error.exit_code


def run_command(cfg: ExperimentConfig, repository: Optional[IArtifactRepository] = None) -> int:
    """Dispatch one experiment, write report.json and manifest.json; returns the exit status."""
    configure_services({"modes": cfg.modes or settings.modes, "seed": cfg.seed})
    structlog.contextvars.bind_contextvars(command=cfg.command.value, seed=cfg.seed)
    try:
        logger.info("Running command", out_dir=cfg.out_dir, jobs=cfg.jobs)
        repository = repository or get_artifact_repository(cfg.out_dir)
        result = HANDLERS[cfg.command](cfg, repository)

        judged = {**tolerances(), "tol": cfg.tol}
        report = {"command": cfg.command.value, "result": result, "tolerances": judged}
        repository.write_json("report.json", report)
        write_manifest(repository, cfg.command.value, cfg.inputs(), judged, cfg.seed)

        sys.stdout.write(canonical_json(report).decode("utf-8"))
        logger.info("Command finished", artifacts=len(repository.digests()))
        return 0

    except BirkhoffError as e:
        logger.error("Command failed", code=e.code, error=e.message, exc_info=True)
        return _fail(e)
    except ValueError as e:
        logger.error("Invalid input", error=str(e), exc_info=True)
        return _fail(ConfigError(str(e)))
    finally:
        structlog.contextvars.clear_contextvars()


def main(argv: Optional[List[str]] = None) -> int:
    """Console entry point; argparse exits with status 2 on usage errors."""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level or settings.log_level, settings.log_dir)
    try:
        cfg = build_config(args)
    except ConfigError as e:
        logger.error("Configuration rejected", error=e.message)
        return _fail(e)
    return run_command(cfg)


if __name__ == "__main__":
    sys.exit(main())
