"""Grid search over (λ, μ) with selection on target-dev accuracy."""

from __future__ import annotations

import asyncio
from collections.abc import Sequence
from dataclasses import dataclass, field

from loguru import logger

from dauto.config.schema import ArchitectureConfig, Mode, TrainConfig
from dauto.data import DomainPairDataset
from dauto.eval.metrics import accuracy
from dauto.model.network import DautoModel
from dauto.model.trainer import TrainTrace, train
from dauto.tensor import Rng


@dataclass
class GridCell:
    """One (λ, μ) training run. `error` is set instead of scores when the run failed."""

    index: int
    lam: float
    mu: float
    seed: int
    dev_accuracy: float | None = None
    trace: TrainTrace | None = None
    error: str | None = None
    model: DautoModel | None = field(default=None, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class GridSearchResult:
    cells: list[GridCell]
    best_index: int | None = None
    best_cfg: TrainConfig | None = None
    test_accuracy: float | None = None  # selected cell only

    @property
    def best(self) -> GridCell | None:
        return None if self.best_index is None else self.cells[self.best_index]

    @property
    def failures(self) -> list[GridCell]:
        return [c for c in self.cells if not c.ok]


def grids_for_mode(
    mode: Mode, lambda_grid: Sequence[float], mu_grid: Sequence[float]
) -> tuple[list[float], list[float]]:
    """The part of the (λ, μ) grid a method may use; forbidden weights collapse to {0}."""
    lams = [0.0] if mode in ("no_adapt", "dann") else list(lambda_grid)
    mus = [0.0] if mode in ("no_adapt", "ae_only") else list(mu_grid)
    return lams, mus


def init_model(data: DomainPairDataset, arch: ArchitectureConfig, seed: int) -> DautoModel:
    """Fresh model for `data`; the initialization stream depends on `seed` only."""
    return DautoModel.build(data.dim, data.num_classes, arch, Rng(seed).child("init"))


def _run_cell(
    cell: GridCell, data: DomainPairDataset, cfg: TrainConfig, arch: ArchitectureConfig
) -> GridCell:
    try:
        model, trace = train(init_model(data, arch, cell.seed), data, cfg)
    except Exception as e:
        logger.warning(f"Grid cell {cell.index} (λ={cell.lam:g}, μ={cell.mu:g}) failed: {e}")
        cell.error = f"{type(e).__name__}: {e}"
        cell.trace = getattr(e, "trace", None)
        return cell
    cell.model = model
    cell.trace = trace
    cell.dev_accuracy = trace.best_dev_accuracy
    return cell


async def _run_concurrently(
    jobs: int,
    cells: list[GridCell],
    cfgs: list[TrainConfig],
    data: DomainPairDataset,
    arch: ArchitectureConfig,
) -> list[GridCell]:
    semaphore = asyncio.Semaphore(jobs)

    async def run_one(cell: GridCell, cfg: TrainConfig) -> GridCell:
        async with semaphore:
            return await asyncio.to_thread(_run_cell, cell, data, cfg, arch)

    return list(await asyncio.gather(*(run_one(c, cfg) for c, cfg in zip(cells, cfgs))))


def grid_search(
    data: DomainPairDataset,
    base_cfg: TrainConfig,
    lambda_grid: Sequence[float],
    mu_grid: Sequence[float],
    arch: ArchitectureConfig | None = None,
    jobs: int = 1,
) -> GridSearchResult:
    """
    Train one model per (λ, μ) cell and select by target-dev accuracy.

    Cells are enumerated λ-major; cell i trains with seed `base_cfg.seed + i`, so
    serial and concurrent runs (`jobs > 1`) give identical numbers. A failing cell is
    recorded and the search continues. Ties in dev accuracy go to the first cell.
    Only the selected cell is scored on the held-out target test split.

    Raises:
        ValueError: An empty grid, or a (λ, μ) pair the base mode forbids.
    """
    if not lambda_grid or not mu_grid:
        raise ValueError("lambda_grid and mu_grid must be non-empty")
    arch = arch or ArchitectureConfig()

    cells: list[GridCell] = []
    cfgs: list[TrainConfig] = []
    for lam in lambda_grid:
        for mu in mu_grid:
            i = len(cells)
            seed = base_cfg.seed + i
            cfgs.append(base_cfg.with_weights(float(lam), float(mu), seed=seed))
            cells.append(GridCell(index=i, lam=float(lam), mu=float(mu), seed=seed))

    logger.info(f"Grid search ({base_cfg.mode}): {len(cells)} cells, jobs={jobs}")
    if jobs <= 1:
        cells = [_run_cell(c, data, cfg, arch) for c, cfg in zip(cells, cfgs)]
    else:
        cells = asyncio.run(_run_concurrently(jobs, cells, cfgs, data, arch))

    result = GridSearchResult(cells=cells)
    scored = [c for c in cells if c.ok]
    if not scored:
        logger.error(f"Grid search ({base_cfg.mode}): every cell failed")
        return result
    best = max(scored, key=lambda c: (c.dev_accuracy, -c.index))
    result.best_index = best.index
    result.best_cfg = cfgs[best.index]
    result.test_accuracy = accuracy(best.model.predict(data.target_test.x), data.target_test.y)
    for cell in cells:
        if cell.index != best.index:
            cell.model = None
    logger.info(f"Selected λ={best.lam:g}, μ={best.mu:g}: dev={best.dev_accuracy:.4f} "
                f"test={result.test_accuracy:.4f}")
    return result
