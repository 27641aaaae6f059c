"""Controlled experiment runs: methods share seeds, architecture and data.

Output layout under ``<outdir>/<task>/``::

    config.txt                 resolved configuration echo
    accuracy.csv               one row per method
    <method>/trace.csv         per-epoch losses and dev accuracy of the selected cell
    <method>/report.csv        key,value summary of the selected cell
    <method>/grid.csv          dev accuracy of every (λ, μ) cell
    <method>/model.bin         DAUTO1 checkpoint
    <method>/embed.tsv         2-D PCA of the final representation, both domains
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from loguru import logger

from dauto import __version__
from dauto.config import ExperimentConfig, Mode, save_config
from dauto.data import (
    DomainPairDataset,
    digit_domain_pair,
    load_idx_split,
    make_synthetic,
    multiclass_domain_pair,
    sparse_domain_pair,
    subsample_labels,
)
from dauto.eval import (
    paired_t_test,
    pca2,
    pvalue_matrix,
    representation_a_distance,
    write_embedding_tsv,
    write_pvalue_csv,
    write_table,
)
from dauto.model import GridSearchResult, TrainTrace, grid_search, grids_for_mode, save_checkpoint
from dauto.utils import ensure_dir, safe_filename, validate_output_path

TRACE_HEADER = ("epoch", "loss_y", "loss_r", "loss_d", "total", "dev_accuracy")


@dataclass
class MethodResult:
    """Selected grid cell of one method, or the reason there is none."""

    method: Mode
    search: GridSearchResult
    lam: float | None = None
    mu: float | None = None
    dev_accuracy: float | None = None
    test_accuracy: float | None = None
    a_distance: float | None = None
    trace: TrainTrace | None = None

    @property
    def failed_cells(self) -> list[str]:
        return [
            f"{self.method} cell {c.index} (λ={c.lam:g}, μ={c.mu:g}): {c.error}"
            for c in self.search.failures
        ]


@dataclass
class RunReport:
    """
    What a run produced. Every number here also lives in a file under `outdir`.

    Attributes:
        task: Task name (the output sub-directory).
        methods: Per-method selected results.
        a_distance_input: Proxy 𝒜-distance of the raw input features, before training.
        rows: Long-format rows of sweeps and matrices (empty for single runs).
        files: Every file written.
    """

    task: str
    seed: int
    version: str = __version__
    methods: list[MethodResult] = field(default_factory=list)
    a_distance_input: float | None = None
    rows: list[tuple] = field(default_factory=list)
    files: list[Path] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def absorb(self, other: RunReport) -> None:
        self.methods.extend(other.methods)
        self.files.extend(other.files)
        self.failures.extend(other.failures)


class _Writer:
    """Resolves every output path inside the output directory before writing."""

    def __init__(self, outdir: Path, report: RunReport) -> None:
        self.outdir = outdir
        self.report = report

    def path(self, *parts: str) -> Path:
        target = validate_output_path(Path(*parts), self.outdir)
        ensure_dir(target.parent)
        self.report.files.append(target)
        return target


def build_dataset(
    cfg: ExperimentConfig,
    source: str | None = None,
    target: str | None = None,
    digit_splits: tuple | None = None,
) -> DomainPairDataset:
    """
    Resolve the configured data source into a domain pair.

    Args:
        source/target: Domain selectors overriding `cfg.source` / `cfg.target`.
        digit_splits: Preloaded (train, test) IDX arrays for mnist_binary.
    """
    source = source or cfg.source
    target = target or cfg.target
    if cfg.dataset == "synthetic":
        return make_synthetic(cfg.synthetic)
    root = Path(cfg.data_dir)
    if cfg.dataset == "mnist_binary":
        train, test = digit_splits or (load_idx_split(root, "train"), load_idx_split(root, "test"))
        return digit_domain_pair(
            train, test, int(source), int(target), cfg.excluded_digits, cfg.seed
        )
    if cfg.dataset == "idx_multiclass":
        return multiclass_domain_pair(root / source, root / target, cfg.seed)
    return sparse_domain_pair(
        root / source, root / target, cfg.sparse_dim, cfg.seed, cfg.tf_normalize
    )


def _trace_rows(trace: TrainTrace) -> list[tuple]:
    return [
        (e.epoch, e.loss_y, e.loss_r, e.loss_d, e.total, e.dev_accuracy) for e in trace.epochs
    ]


def _run_method(
    mode: Mode,
    data: DomainPairDataset,
    cfg: ExperimentConfig,
    writer: _Writer,
    task: str,
) -> MethodResult:
    lams, mus = grids_for_mode(mode, cfg.lambda_grid, cfg.mu_grid)
    search = grid_search(data, cfg.train_config(mode), lams, mus, cfg.architecture, cfg.jobs)
    result = MethodResult(method=mode, search=search)
    method_dir = (task, mode)

    write_table(
        writer.path(*method_dir, "grid.csv"),
        ("lambda", "mu", "seed", "dev_accuracy", "error"),
        [(c.lam, c.mu, c.seed, c.dev_accuracy, c.error) for c in search.cells],
    )
    best = search.best
    if best is None:
        return result

    model = best.model
    z_source = model.represent(data.source_unlabeled)
    z_target = model.represent(data.target_unlabeled)
    result.lam, result.mu = best.lam, best.mu
    result.dev_accuracy = best.dev_accuracy
    result.test_accuracy = search.test_accuracy
    result.trace = best.trace
    result.a_distance = representation_a_distance(z_source, z_target, cfg.seed)

    write_table(writer.path(*method_dir, "trace.csv"), TRACE_HEADER, _trace_rows(best.trace))
    write_table(
        writer.path(*method_dir, "report.csv"),
        ("key", "value"),
        [
            ("method", mode),
            ("lambda", best.lam),
            ("mu", best.mu),
            ("seed", best.seed),
            ("best_epoch", best.trace.best_epoch),
            ("epochs_run", len(best.trace.epochs)),
            ("stop_reason", best.trace.stop_reason),
            ("dev_accuracy", result.dev_accuracy),
            ("test_accuracy", result.test_accuracy),
            ("a_distance", result.a_distance),
            ("init_scheme", best.trace.init_scheme),
            ("version", __version__),
        ],
    )
    save_checkpoint(model, writer.path(*method_dir, "model.bin"))
    tags = np.concatenate([np.zeros(len(z_source), dtype=np.int64),
                           np.ones(len(z_target), dtype=np.int64)])
    z = np.vstack([z_source, z_target])
    if z.shape[0] >= 3 and z.shape[1] >= 2:
        write_embedding_tsv(writer.path(*method_dir, "embed.tsv"), pca2(z, tags))
    return result


def _run_methods(
    data: DomainPairDataset, cfg: ExperimentConfig, task: str, outdir: Path
) -> RunReport:
    report = RunReport(task=task, seed=cfg.seed)
    writer = _Writer(outdir, report)
    logger.info(f"Task {task}: {data.summary()}")
    save_config(cfg, writer.path(task, "config.txt"))
    report.a_distance_input = representation_a_distance(
        data.source_unlabeled, data.target_unlabeled, cfg.seed
    )

    for mode in cfg.modes:
        result = _run_method(mode, data, cfg, writer, task)
        report.methods.append(result)
        report.failures.extend(result.failed_cells)
        if result.search.best is None:
            report.failures.append(f"{task}/{mode}: no grid cell completed")

    write_table(
        writer.path(task, "accuracy.csv"),
        ("method", "lambda", "mu", "dev_accuracy", "test_accuracy", "a_distance"),
        [(m.method, m.lam, m.mu, m.dev_accuracy, m.test_accuracy, m.a_distance)
         for m in report.methods],
    )
    return report


def run_experiment(cfg: ExperimentConfig, data: DomainPairDataset | None = None) -> RunReport:
    """
    Train every requested method on one domain pair and write the task directory.

    Each method runs its own grid search from the experiment seed on the shared
    architecture. Cell failures are collected in the report.
    """
    data = data or build_dataset(cfg)
    return _run_methods(data, cfg, safe_filename(cfg.task), cfg.outdir)


def run_fraction_sweep(cfg: ExperimentConfig, fractions: list[float] | None = None) -> RunReport:
    """
    Repeat the experiment on nested label fractions of the source.

    Each fraction writes its own task directory `<task>-frac<f>`; the long-format
    `<task>/sweep.csv` holds one (method, fraction, accuracy) row per method and fraction.
    """
    fractions = list(fractions or cfg.fractions)
    if any(not 0.0 < f <= 1.0 for f in fractions) or fractions != sorted(fractions):
        raise ValueError(f"fractions must be ascending values in (0, 1], got {fractions}")
    task = safe_filename(cfg.task)
    data = build_dataset(cfg)
    report = RunReport(task=task, seed=cfg.seed)
    writer = _Writer(cfg.outdir, report)
    save_config(cfg, writer.path(task, "config.txt"))

    for fraction in fractions:
        sub = subsample_labels(data, fraction, cfg.seed)
        sub_report = _run_methods(sub, cfg, f"{task}-frac{fraction:g}", cfg.outdir)
        report.absorb(sub_report)
        for m in sub_report.methods:
            report.rows.append((m.method, fraction, m.test_accuracy))

    write_table(writer.path(task, "sweep.csv"), ("method", "fraction", "accuracy"), report.rows)
    return report


def _matrix_domains(cfg: ExperimentConfig) -> list[str]:
    if cfg.dataset == "mnist_binary":
        return [str(d) for d in cfg.digits]
    return list(cfg.domains)


def run_digit_matrix(cfg: ExperimentConfig) -> RunReport:
    """
    Train every source x target pair of the configured domains.

    Writes `matrix-<method>.csv` (rows are sources, columns targets, diagonal cells are
    in-domain references) and, with at least two methods and two cells, `pvalues.csv`
    of pairwise paired t-tests over the per-cell test accuracies.
    """
    domains = _matrix_domains(cfg)
    task = safe_filename(cfg.task)
    report = RunReport(task=task, seed=cfg.seed)
    writer = _Writer(cfg.outdir, report)
    save_config(cfg, writer.path(task, "config.txt"))
    digit_splits = None
    if cfg.dataset == "mnist_binary":
        root = Path(cfg.data_dir)
        digit_splits = (load_idx_split(root, "train"), load_idx_split(root, "test"))

    scores: dict[str, dict[tuple[str, str], float | None]] = {m: {} for m in cfg.modes}
    for source in domains:
        for target in domains:
            data = build_dataset(cfg, source, target, digit_splits)
            cell_task = f"{task}/{safe_filename(source)}-{safe_filename(target)}"
            sub_report = _run_methods(data, cfg, cell_task, cfg.outdir)
            report.absorb(sub_report)
            for m in sub_report.methods:
                scores[m.method][(source, target)] = m.test_accuracy
                report.rows.append((m.method, source, target, m.test_accuracy))

    for mode in cfg.modes:
        write_table(
            writer.path(task, f"matrix-{mode}.csv"),
            ("source", *domains),
            [(s, *(scores[mode].get((s, t)) for t in domains)) for s in domains],
        )

    complete = {m: [scores[m][(s, t)] for s in domains for t in domains] for m in cfg.modes}
    complete = {m: v for m, v in complete.items() if all(x is not None for x in v)}
    if len(complete) >= 2 and len(domains) ** 2 >= 2:
        methods, pvalues = pvalue_matrix(complete)
        write_pvalue_csv(writer.path(task, "pvalues.csv"), methods, pvalues)
        for i, a in enumerate(methods):
            for b in methods[i + 1:]:
                t = paired_t_test(complete[a], complete[b])
                logger.info(f"{a} vs {b}: t={t.t:.3f} p={t.p:.4f} over {len(complete[a])} tasks")
    else:
        logger.warning("Skipping p-value matrix: need two methods with every cell scored")
    return report
