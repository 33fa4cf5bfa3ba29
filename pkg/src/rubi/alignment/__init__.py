"""Alignment between embedding spaces: Procrustes, Wasserstein-Procrustes, RCSLS."""

from .models import (
    AlignMethod,
    AlignmentMap,
    Constraint,
    ConvergenceLog,
    InitMethod,
    RcslsConfig,
    WProcConfig,
    load_alignment,
    orthogonality_error,
    save_alignment,
)
from .procrustes import procrustes, project_orthogonal, project_spectral_ball
from .rcsls import (
    RcslsRefiner,
    rcsls_gradient,
    rcsls_loss,
    rcsls_neighborhoods,
    rcsls_refine,
)
from .wasserstein import seed_alignment, similarity_profiles, wasserstein_procrustes

__all__ = [
    "AlignMethod",
    "AlignmentMap",
    "Constraint",
    "ConvergenceLog",
    "InitMethod",
    "RcslsConfig",
    "RcslsRefiner",
    "WProcConfig",
    "load_alignment",
    "orthogonality_error",
    "procrustes",
    "project_orthogonal",
    "project_spectral_ball",
    "rcsls_gradient",
    "rcsls_loss",
    "rcsls_neighborhoods",
    "rcsls_refine",
    "save_alignment",
    "seed_alignment",
    "similarity_profiles",
    "wasserstein_procrustes",
]
