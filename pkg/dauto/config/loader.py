"""Configuration loading utilities.

Config files are plain text, one ``key=value`` per line. Dotted keys address
nested sections (``train.max_epochs=50``), lists are comma separated, ``#``
starts a comment line, and dashes in keys read as underscores.
"""

from __future__ import annotations

from collections.abc import Mapping
from pathlib import Path
from typing import Any

from loguru import logger
from pydantic import BaseModel, ValidationError

from dauto.config.schema import ExperimentConfig


class ConfigValidationError(ValueError):
    """Raised with every problem found in a configuration, not just the first."""

    def __init__(self, problems: list[str]) -> None:
        super().__init__("invalid configuration:\n  " + "\n  ".join(problems))
        self.problems = problems


def normalize_key(key: str) -> str:
    """Convert a file or flag key to the schema's snake_case form."""
    return key.strip().replace("-", "_").lower()


def set_dotted(data: dict[str, Any], key: str, value: Any) -> None:
    """Assign `value` at a dotted path, creating nested sections as needed."""
    parts = [normalize_key(p) for p in key.split(".")]
    node = data
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigValidationError([f"{key}: '{part}' is a value, not a section"])
        node = child
    node[parts[-1]] = value


def parse_config_text(text: str, source: str = "<config>") -> dict[str, Any]:
    """Parse key=value lines into a nested dict of raw strings."""
    data: dict[str, Any] = {}
    problems: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep or not key.strip():
            problems.append(f"{source}:{lineno}: expected key=value, got {stripped!r}")
            continue
        set_dotted(data, key, value.strip())
    if problems:
        raise ConfigValidationError(problems)
    return data


def _format_errors(error: ValidationError) -> list[str]:
    problems = []
    for err in error.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        problems.append(f"{loc}: {err['msg']}")
    return problems


def load_config(
    config_path: Path | None = None, overrides: Mapping[str, Any] | None = None
) -> ExperimentConfig:
    """
    Build an ExperimentConfig from a file, flag overrides and the environment.

    Precedence is overrides > file > DAUTO_* environment > defaults.

    Args:
        config_path: Optional key=value file.
        overrides: Dotted keys to values, typically from CLI flags; None values are ignored.

    Raises:
        FileNotFoundError: `config_path` does not exist.
        ConfigValidationError: Every syntax and schema problem found.
    """
    data: dict[str, Any] = {}
    if config_path is not None:
        path = Path(config_path)
        if not path.is_file():
            raise FileNotFoundError(f"config file not found: {path}")
        data = parse_config_text(path.read_text(encoding="utf-8"), str(path))
        logger.debug(f"Loaded config from {path}")
    for key, value in (overrides or {}).items():
        if value is not None:
            set_dotted(data, key, value)
    train = data.get("train")
    if (overrides or {}).get("seed") is not None and isinstance(train, dict) and "seed" in train:
        # an echoed config carries train.seed; --seed moves both
        train["seed"] = overrides["seed"]
    try:
        return ExperimentConfig(**data)
    except ValidationError as e:
        raise ConfigValidationError(_format_errors(e)) from None


def _render(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_render(v) for v in value)
    return str(value)


def flatten(data: Mapping[str, Any], prefix: str = "") -> list[tuple[str, str]]:
    """Nested dict to sorted-by-section (dotted key, rendered value) pairs; None is omitted."""
    items: list[tuple[str, str]] = []
    nested: list[tuple[str, Mapping[str, Any]]] = []
    for key, value in data.items():
        if value is None:
            continue
        if isinstance(value, Mapping):
            nested.append((f"{prefix}{key}.", value))
        else:
            items.append((f"{prefix}{key}", _render(value)))
    for sub_prefix, sub in nested:
        items.extend(flatten(sub, sub_prefix))
    return items


def config_text(config: BaseModel) -> str:
    """Fully resolved key=value echo; floats use repr so reloading is exact."""
    data = config.model_dump(mode="python", by_alias=True)
    lines = [f"{k}={v}" for k, v in flatten(data)]
    return "\n".join(lines) + "\n"


def save_config(config: ExperimentConfig, config_path: Path) -> Path:
    """Write the config echo to `config_path`."""
    config_path.parent.mkdir(parents=True, exist_ok=True)
    config_path.write_text(config_text(config), encoding="utf-8")
    return config_path


def _data_problems(cfg: ExperimentConfig, command: str) -> list[str]:
    problems: list[str] = []
    if cfg.dataset == "synthetic":
        return problems
    if cfg.data_dir is None:
        return [f"data_dir: required for dataset {cfg.dataset}"]
    root = Path(cfg.data_dir)
    if not root.is_dir():
        return [f"data_dir: {root} is not a directory"]

    if cfg.dataset == "mnist_binary":
        from dauto.data.digits import TEST_FILES, TRAIN_FILES

        for name in (*TRAIN_FILES, *TEST_FILES):
            if not (root / name).is_file():
                problems.append(f"data_dir: missing IDX file {name}")
        for field_name in ("digits", "excluded_digits"):
            bad = [d for d in getattr(cfg, field_name) if not 0 <= d <= 9]
            if bad:
                problems.append(f"{field_name}: not digits: {bad}")
        if command == "matrix" and not cfg.digits:
            problems.append("digits: at least one digit is required")
        if command != "matrix":
            for field_name in ("source", "target"):
                value = getattr(cfg, field_name)
                if not value.isdigit() or not 0 <= int(value) <= 9:
                    problems.append(f"{field_name}: expected a digit 0-9, got {value!r}")
        return problems

    names = cfg.domains if command == "matrix" else [cfg.source, cfg.target]
    if command == "matrix" and not names:
        problems.append("domains: at least one domain is required")
    for name in names:
        path = root / name
        exists = path.is_dir() if cfg.dataset == "idx_multiclass" else path.is_file()
        if not exists:
            problems.append(f"domain {name!r}: {path} not found")
    return problems


def validate_experiment(cfg: ExperimentConfig, command: str = "run") -> list[str]:
    """
    Semantic checks beyond the schema, all collected before any training starts.

    Args:
        command: "run", "sweep" or "matrix"; decides which domain selectors matter.

    Returns:
        Every problem found; empty when the config is runnable.
    """
    problems: list[str] = []
    if not cfg.modes:
        problems.append("modes: at least one method is required")
    for name in ("lambda_grid", "mu_grid"):
        grid = getattr(cfg, name)
        if not grid:
            problems.append(f"{name}: must not be empty")
        elif any(v < 0 for v in grid):
            problems.append(f"{name}: weights must be >= 0")
    if not cfg.fractions:
        problems.append("fractions: must not be empty")
    elif any(not 0.0 < f <= 1.0 for f in cfg.fractions):
        problems.append(f"fractions: every value must lie in (0, 1], got {cfg.fractions}")
    elif any(a >= b for a, b in zip(cfg.fractions, cfg.fractions[1:])):
        problems.append(f"fractions: must be strictly ascending, got {cfg.fractions}")
    if command == "matrix" and cfg.dataset == "synthetic":
        problems.append("dataset: the matrix command needs mnist_binary, idx_multiclass or sparse")
    if cfg.outdir.exists() and not cfg.outdir.is_dir():
        problems.append(f"outdir: {cfg.outdir} exists and is not a directory")
    problems.extend(_data_problems(cfg, command))
    return problems


def resolve_config(
    config_path: Path | None = None,
    overrides: Mapping[str, Any] | None = None,
    command: str = "run",
) -> ExperimentConfig:
    """load_config followed by validate_experiment; raises with the full problem list."""
    cfg = load_config(config_path, overrides)
    problems = validate_experiment(cfg, command)
    if problems:
        raise ConfigValidationError(problems)
    return cfg
