"""Refinement of a supervised map against the relaxed CSLS (RCSLS) loss."""

import logging
from typing import Optional, Sequence

import numpy as np

from ..embeddings import EmbeddingSpace
from ..errors import InputError, NumericalError
from .models import AlignMethod, AlignmentMap, Constraint, RcslsConfig, orthogonality_error
from .procrustes import project_orthogonal, project_spectral_ball

logger = logging.getLogger(__name__)

Neighborhoods = tuple[np.ndarray, np.ndarray]

MAX_HALVINGS = 20


def _top_k_indices(scores: np.ndarray, k: int) -> np.ndarray:
    """Column indices of the k largest entries per row, ties to the lower index."""
    part = np.argpartition(-scores, k - 1, axis=1)[:, :k]
    return np.sort(part, axis=1)


def rcsls_neighborhoods(
    M: np.ndarray,
    Xp: np.ndarray,
    Yp: np.ndarray,
    Xpool: np.ndarray,
    Ypool: np.ndarray,
    k: int,
) -> Neighborhoods:
    """k nearest targets of every mapped x_i and k nearest mapped sources of every y_i."""
    near_y = _top_k_indices((Xp @ M) @ Ypool.T, k)
    near_x = _top_k_indices(Yp @ (Xpool @ M).T, k)
    return near_y, near_x


def rcsls_loss(
    M: np.ndarray,
    Xp: np.ndarray,
    Yp: np.ndarray,
    Xpool: np.ndarray,
    Ypool: np.ndarray,
    k: int,
    neighborhoods: Optional[Neighborhoods] = None,
) -> float:
    """Mean over pairs of -2 x_i M y_i + mean top-k (x_i M . Y) + mean top-k (X M . y_i).

    With ``neighborhoods`` given, the top-k sets are held fixed, which makes
    the loss linear in M.
    """
    if neighborhoods is None:
        neighborhoods = rcsls_neighborhoods(M, Xp, Yp, Xpool, Ypool, k)
    near_y, near_x = neighborhoods
    mapped = Xp @ M
    paired = np.einsum("ij,ij->i", mapped, Yp)
    to_targets = np.einsum("ij,ikj->i", mapped, Ypool[near_y]) / k
    to_sources = np.einsum("ikj,ij->i", Xpool[near_x] @ M, Yp) / k
    return float(np.mean(-2.0 * paired + to_targets + to_sources))


def rcsls_gradient(
    M: np.ndarray,
    Xp: np.ndarray,
    Yp: np.ndarray,
    Xpool: np.ndarray,
    Ypool: np.ndarray,
    k: int,
    neighborhoods: Optional[Neighborhoods] = None,
) -> np.ndarray:
    """Subgradient of :func:`rcsls_loss` with the neighbourhoods held fixed."""
    if neighborhoods is None:
        neighborhoods = rcsls_neighborhoods(M, Xp, Yp, Xpool, Ypool, k)
    near_y, near_x = neighborhoods
    y_bar = Ypool[near_y].mean(axis=1)
    x_bar = Xpool[near_x].mean(axis=1)
    n = Xp.shape[0]
    return (-2.0 * Xp.T @ Yp + Xp.T @ y_bar + x_bar.T @ Yp) / n


class RcslsRefiner:
    """Projected subgradient descent on the RCSLS loss.

    A step that would raise the loss is halved until it does not, so
    ``history`` is non-increasing.
    """

    def __init__(self, cfg: RcslsConfig):
        self.cfg = cfg
        self.history: list[float] = []

    def _project(self, M: np.ndarray) -> np.ndarray:
        if self.cfg.constraint is Constraint.ORTHOGONAL:
            return project_orthogonal(M)
        return project_spectral_ball(M)

    def refine(
        self,
        Xsrc: EmbeddingSpace,
        Ytgt: EmbeddingSpace,
        pairs: Sequence[tuple[int, int]],
        Q0: AlignmentMap,
    ) -> AlignmentMap:
        cfg = self.cfg
        if not pairs:
            raise InputError("rcsls_refine needs at least one aligned pair")
        if Q0.dim != Xsrc.dim or Xsrc.dim != Ytgt.dim:
            raise InputError("map and embedding dimensions disagree")
        src_rows = np.array([s for s, _ in pairs], dtype=np.int64)
        tgt_rows = np.array([t for _, t in pairs], dtype=np.int64)
        pool = cfg.pool_size
        Xpool = Xsrc.vectors[:pool] if pool else Xsrc.vectors
        Ypool = Ytgt.vectors[:pool] if pool else Ytgt.vectors
        k = cfg.k_neighbors
        if k >= min(len(Xpool), len(Ypool)):
            raise InputError(
                f"k_neighbors={k} must be smaller than the candidate pools "
                f"({len(Xpool)} source, {len(Ypool)} target)"
            )
        Xp, Yp = Xsrc.vectors[src_rows], Ytgt.vectors[tgt_rows]

        M = np.array(Q0.matrix)
        loss = rcsls_loss(M, Xp, Yp, Xpool, Ypool, k)
        self.history = [loss]
        step = cfg.step_size

        for iteration in range(cfg.iterations):
            G = rcsls_gradient(M, Xp, Yp, Xpool, Ypool, k)
            if not np.all(np.isfinite(G)):
                raise NumericalError(f"non-finite RCSLS gradient at iteration {iteration}")
            if not np.any(G):
                break
            for _ in range(MAX_HALVINGS):
                candidate = self._project(M - step * G)
                candidate_loss = rcsls_loss(candidate, Xp, Yp, Xpool, Ypool, k)
                if candidate_loss <= loss:
                    break
                step /= 2.0
            else:
                logger.debug("RCSLS: no descent step found at iteration %d", iteration)
                break
            M, loss = candidate, candidate_loss
            self.history.append(loss)

        logger.info(
            "RCSLS refinement: loss %.5f -> %.5f over %d step(s)",
            self.history[0], self.history[-1], len(self.history) - 1,
        )
        return AlignmentMap(
            matrix=M,
            source_lang=Q0.source_lang,
            target_lang=Q0.target_lang,
            method=AlignMethod.RCSLS,
            orthogonal=orthogonality_error(M) <= 1e-6,
        )


def rcsls_refine(
    Xsrc: EmbeddingSpace,
    Ytgt: EmbeddingSpace,
    pairs: Sequence[tuple[int, int]],
    Q0: AlignmentMap,
    cfg: RcslsConfig,
) -> AlignmentMap:
    """Refine ``Q0`` on supervised ``pairs`` (source row, target row)."""
    return RcslsRefiner(cfg).refine(Xsrc, Ytgt, pairs, Q0)
