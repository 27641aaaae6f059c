"""Configuration schema using Pydantic."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

Mode = Literal["no_adapt", "dann", "ae_only", "dauto"]
ALL_MODES: tuple[Mode, ...] = ("no_adapt", "ae_only", "dann", "dauto")

# λ, μ ∈ {1e-8, ..., 1e2}
DEFAULT_WEIGHT_GRID: list[float] = [10.0 ** k for k in range(-8, 3)]


def _split_csv(value: Any) -> Any:
    """Accept "a,b,c" wherever a list is expected."""
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class TrainConfig(BaseModel):
    """Optimization and objective settings for one training run."""

    model_config = ConfigDict(populate_by_name=True, validate_assignment=True)

    mode: Mode = "dauto"
    lam: float = Field(0.0, alias="lambda", ge=0.0)  # reconstruction weight
    mu: float = Field(0.0, ge=0.0)  # adversarial weight
    lr: float = Field(1.0, gt=0.0)
    rho: float = Field(0.95, gt=0.0, lt=1.0)
    epsilon: float = Field(1e-6, gt=0.0)
    batch_size: int = Field(64, ge=2)
    max_epochs: int = Field(50, ge=1)
    patience: int = Field(10, ge=0)  # 0 disables early stopping
    seed: int = Field(0, ge=0)
    weight_decay: float = Field(0.0, ge=0.0)
    recon_norm: Literal["squared_l2", "l1"] = "squared_l2"
    pretrain_epochs: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check_mode(self) -> TrainConfig:
        if self.mode == "no_adapt" and (self.lam != 0.0 or self.mu != 0.0):
            raise ValueError("mode no_adapt requires lambda=0 and mu=0")
        if self.mode == "dann" and self.lam != 0.0:
            raise ValueError("mode dann requires lambda=0")
        if self.mode == "ae_only" and self.mu != 0.0:
            raise ValueError("mode ae_only requires mu=0")
        return self

    def with_weights(self, lam: float, mu: float, seed: int | None = None) -> TrainConfig:
        """Copy with new (λ, μ), validated against the mode."""
        data = self.model_dump()
        data.update(lam=lam, mu=mu)
        if seed is not None:
            data["seed"] = seed
        return TrainConfig.model_validate(data)

    def for_mode(self, mode: Mode) -> TrainConfig:
        """Copy switched to `mode`, zeroing the weights the mode forbids."""
        data = self.model_dump()
        data["mode"] = mode
        if mode in ("no_adapt", "dann"):
            data["lam"] = 0.0
        if mode in ("no_adapt", "ae_only"):
            data["mu"] = 0.0
        return TrainConfig.model_validate(data)


class ArchitectureConfig(BaseModel):
    """Layer topology shared by every method in a controlled comparison."""

    hidden_dims: list[int] = Field(default_factory=lambda: [500, 200, 100])
    dropout: float = Field(0.0, ge=0.0, lt=1.0)
    init_std: float | None = Field(None, gt=0.0)  # None means 1/sqrt(fan_in)

    @field_validator("hidden_dims", mode="before")
    @classmethod
    def _parse_dims(cls, value: Any) -> Any:
        return _split_csv(value)

    @field_validator("hidden_dims")
    @classmethod
    def _positive_dims(cls, value: list[int]) -> list[int]:
        if not value or any(d <= 0 for d in value):
            raise ValueError("hidden_dims must be a non-empty list of positive sizes")
        return value


class SyntheticSpec(BaseModel):
    """Desk-scale domain pair: a base distribution and a rotated or shifted copy."""

    generator: Literal["two_moons_rotation", "gaussian_blobs_shift"] = "two_moons_rotation"
    angle: float = 30.0  # degrees, two_moons_rotation
    shift: list[float] = Field(default_factory=lambda: [0.0, 0.0])  # gaussian_blobs_shift
    samples_per_domain: int = Field(500, ge=4)
    noise: float = Field(0.1, ge=0.0)
    seed: int = Field(0, ge=0)

    @field_validator("shift", mode="before")
    @classmethod
    def _parse_shift(cls, value: Any) -> Any:
        return _split_csv(value)

    @field_validator("shift")
    @classmethod
    def _two_dims(cls, value: list[float]) -> list[float]:
        if len(value) != 2:
            raise ValueError(f"shift must have 2 components, got {len(value)}")
        return value


class ExperimentConfig(BaseSettings):
    """Root configuration for a dauto experiment."""

    model_config = SettingsConfigDict(
        env_prefix="DAUTO_",
        env_nested_delimiter="__",
        populate_by_name=True,
    )

    task: str = "synthetic"
    dataset: Literal["synthetic", "mnist_binary", "idx_multiclass", "sparse"] = "synthetic"
    data_dir: Path | None = None
    source: str = "source"
    target: str = "target"
    digits: list[int] = Field(default_factory=lambda: [3, 7, 8, 9])
    excluded_digits: list[int] = Field(default_factory=lambda: [3, 7, 8, 9])
    domains: list[str] = Field(default_factory=list)  # idx_multiclass / sparse matrix
    sparse_dim: int = Field(5000, ge=1)
    tf_normalize: bool = False
    synthetic: SyntheticSpec = SyntheticSpec()
    architecture: ArchitectureConfig = ArchitectureConfig()
    train: TrainConfig = TrainConfig()
    modes: list[Mode] = Field(default_factory=lambda: list(ALL_MODES))
    lambda_grid: list[float] = Field(default_factory=lambda: list(DEFAULT_WEIGHT_GRID))
    mu_grid: list[float] = Field(default_factory=lambda: list(DEFAULT_WEIGHT_GRID))
    fractions: list[float] = Field(default_factory=lambda: [0.2, 0.5, 0.8, 1.0])
    outdir: Path = Path("runs")
    seed: int = Field(0, ge=0)
    jobs: int = Field(1, ge=1)

    @field_validator(
        "digits", "excluded_digits", "domains", "modes", "lambda_grid", "mu_grid", "fractions",
        mode="before",
    )
    @classmethod
    def _parse_lists(cls, value: Any) -> Any:
        return _split_csv(value)

    @model_validator(mode="after")
    def _sync_train_seed(self) -> ExperimentConfig:
        if "seed" in self.train.model_fields_set and self.train.seed != self.seed:
            raise ValueError(
                f"train.seed={self.train.seed} differs from seed={self.seed}; "
                "the experiment seed drives training, set seed instead"
            )
        self.train = self.train.model_copy(update={"seed": self.seed})
        return self

    @property
    def task_dir(self) -> Path:
        return self.outdir / self.task

    def train_config(self, mode: Mode) -> TrainConfig:
        """Training settings for `mode`; `train.seed` always equals the experiment seed."""
        cfg = self.train.for_mode(mode)
        return cfg.model_copy(update={"seed": self.seed})
