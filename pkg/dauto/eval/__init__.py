"""Accuracy, proxy 𝒜-distance, PCA embeddings, paired t-tests and report exports."""

from dauto.eval.export import read_table, write_embedding_tsv, write_pvalue_csv, write_table
from dauto.eval.metrics import (
    accuracy,
    balanced_error,
    proxy_a_distance,
    representation_a_distance,
)
from dauto.eval.pca import PcaProjection, pca2, power_iteration
from dauto.eval.stats import TTestResult, paired_t_test, pvalue_matrix, student_t_two_sided

__all__ = [
    "PcaProjection",
    "TTestResult",
    "accuracy",
    "balanced_error",
    "paired_t_test",
    "pca2",
    "power_iteration",
    "proxy_a_distance",
    "pvalue_matrix",
    "read_table",
    "representation_a_distance",
    "student_t_two_sided",
    "write_embedding_tsv",
    "write_pvalue_csv",
    "write_table",
]
