"""Closed-form Procrustes and projections onto the orthogonal group / spectral ball."""

import numpy as np
from scipy.linalg import LinAlgError, orthogonal_procrustes, svd

from ..errors import InputError, NumericalError
from .models import AlignMethod, AlignmentMap


def _svd(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    matrix = np.asarray(matrix, dtype=np.float64)
    if not np.all(np.isfinite(matrix)):
        raise NumericalError("cannot decompose a matrix with non-finite entries")
    try:
        return svd(matrix, full_matrices=False, lapack_driver="gesvd")
    except LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from None


def procrustes(
    X: np.ndarray,
    Y: np.ndarray,
    source_lang: str = "src",
    target_lang: str = "tgt",
) -> AlignmentMap:
    """Orthogonal W minimising ||XW - Y||_F for paired rows of X and Y.

    W = U V^T with U S V^T = svd(X^T Y).
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.ndim != 2 or X.shape != Y.shape:
        raise InputError(f"procrustes needs equal 2-D shapes, got {X.shape} and {Y.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        raise NumericalError("procrustes inputs contain non-finite values")
    try:
        W, _ = orthogonal_procrustes(X, Y)
    except (LinAlgError, ValueError) as exc:
        raise NumericalError(f"procrustes SVD failed: {exc}") from None
    return AlignmentMap(W, source_lang, target_lang, AlignMethod.PROCRUSTES, orthogonal=True)


def project_orthogonal(M: np.ndarray) -> np.ndarray:
    """Nearest orthogonal matrix: U V^T from svd(M)."""
    U, _, Vt = _svd(M)
    return U @ Vt


def project_spectral_ball(M: np.ndarray) -> np.ndarray:
    """Clamp singular values at 1 (projection onto the unit spectral-norm ball)."""
    U, s, Vt = _svd(M)
    return (U * np.minimum(s, 1.0)) @ Vt
