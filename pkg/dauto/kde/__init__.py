"""Transformed kernel density estimation and the reconstruction bound."""

from dauto.kde.estimator import (
    BoundReport,
    BoundViolationError,
    Kernel,
    KdeError,
    TransformedKde,
    bound_reports,
    identity_transform,
    kde_bound_check,
    kde_bound_check_l1,
    kde_log_density,
)

__all__ = [
    "BoundReport",
    "BoundViolationError",
    "KdeError",
    "Kernel",
    "TransformedKde",
    "bound_reports",
    "identity_transform",
    "kde_bound_check",
    "kde_bound_check_l1",
    "kde_log_density",
]
