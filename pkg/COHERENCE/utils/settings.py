import dataclasses
import logging
import os
from dataclasses import dataclass
from typing import Any, Mapping, Optional

import yaml

logger = logging.getLogger(__name__)

LOG_LEVELS = {
    "error": logging.ERROR,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


@dataclass(frozen=True)
class Settings:
    """Numerical tolerances and run options shared by every module."""

    validation_tol: float = 1e-8
    violation_tol: float = 1e-9
    jacobi_threshold: float = 1e-12
    jacobi_max_sweeps: int = 100
    eigen_solver: str = "jacobi"
    zero_eigenvalue_cutoff: float = 1e-12
    bruteforce_budget: int = 100_000
    bruteforce_restarts: int = 20
    workers: int = 1
    log_level: str = "info"

    def __post_init__(self):
        if self.eigen_solver not in ("jacobi", "lapack"):
            raise ValueError(
                f"eigen_solver must be 'jacobi' or 'lapack', got {self.eigen_solver!r}"
            )
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")

    @property
    def logging_level(self) -> int:
        return LOG_LEVELS.get(self.log_level, logging.INFO)


_active: Optional[Settings] = None


def load_settings(
    config_path: Optional[str] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> Settings:
    """
    Build settings from an optional YAML file and the environment.

    Parameters
    ----------
    config_path : str, optional
        Path to a YAML mapping of setting names to values. Falls back to
        the COHERENCE_CONFIG environment variable.
    environ : Mapping[str, str], optional
        Environment to read (default: os.environ)

    Returns
    -------
    Settings
        Settings with file values applied first and environment values last
    """
    env = os.environ if environ is None else environ
    values: dict[str, Any] = {}

    path = config_path or env.get("COHERENCE_CONFIG")
    if path:
        values.update(_read_yaml_config(path))

    log_level = env.get("COHERENCE_LOG")
    if log_level:
        log_level = log_level.strip().lower()
        if log_level in LOG_LEVELS:
            values["log_level"] = log_level
        else:
            logger.warning(
                f"Unknown COHERENCE_LOG value {log_level!r}, using 'info'"
            )
            values["log_level"] = "info"

    workers = env.get("COHERENCE_WORKERS")
    if workers:
        try:
            values["workers"] = int(workers)
        except ValueError:
            logger.warning(f"Ignoring non-integer COHERENCE_WORKERS={workers!r}")

    return Settings(**values)


def _read_yaml_config(path: str) -> dict[str, Any]:
    """
    Read a YAML configuration file and keep only known setting names.

    Parameters
    ----------
    path : str
        Path to the YAML file

    Returns
    -------
    dict[str, Any]
        Known keys with values coerced to the field types
    """
    with open(path, "r") as f:
        content = yaml.safe_load(f) or {}

    if not isinstance(content, dict):
        raise ValueError(f"Configuration file {path} must contain a mapping")

    fields = {field.name: field for field in dataclasses.fields(Settings)}
    result: dict[str, Any] = {}
    for key, value in content.items():
        field = fields.get(key)
        if field is None:
            logger.warning(f"Ignoring unknown configuration key {key!r} in {path}")
            continue
        default = field.default
        result[key] = type(default)(value)

    logger.info(f"Loaded configuration from: {path}")
    return result


def get_settings() -> Settings:
    """Return the active settings, loading them from the environment once."""
    global _active
    if _active is None:
        _active = load_settings()
    return _active


def configure(settings: Optional[Settings]) -> None:
    """Install settings as the active ones; None reloads on next access."""
    global _active
    _active = settings
