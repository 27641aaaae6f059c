"""Dataset ingestion, synthetic domain pairs, splits and subsampling."""

from dauto.data.dataset import (
    DomainPairDataset,
    InsufficientDataError,
    LabeledSplit,
    labeled,
    split_target,
    stratified_indices,
    subsample_labels,
)
from dauto.data.digits import (
    binary_digit_task,
    digit_domain_pair,
    load_idx_split,
    multiclass_domain_pair,
)
from dauto.data.idx import IdxFormatError, load_idx, write_idx
from dauto.data.sparse import (
    SparseFormatError,
    binarize_labels,
    load_sparse_text,
    sparse_domain_pair,
)
from dauto.data.synthetic import domain_transform, make_synthetic, rotation_matrix

__all__ = [
    "DomainPairDataset",
    "IdxFormatError",
    "InsufficientDataError",
    "LabeledSplit",
    "SparseFormatError",
    "binarize_labels",
    "binary_digit_task",
    "digit_domain_pair",
    "domain_transform",
    "labeled",
    "load_idx",
    "load_idx_split",
    "load_sparse_text",
    "make_synthetic",
    "multiclass_domain_pair",
    "rotation_matrix",
    "sparse_domain_pair",
    "split_target",
    "stratified_indices",
    "subsample_labels",
    "write_idx",
]
