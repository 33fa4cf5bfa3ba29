"""Unsupervised alignment: stochastic Wasserstein-Procrustes."""

import logging

import numpy as np
from scipy.stats import ortho_group

from ..assignment import solve_assignment
from ..embeddings import EmbeddingSpace, Normalization
from ..errors import InputError, NumericalError
from .models import AlignMethod, AlignmentMap, ConvergenceLog, InitMethod, WProcConfig
from .procrustes import procrustes, project_orthogonal

logger = logging.getLogger(__name__)


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return matrix / norms


def similarity_profiles(X: np.ndarray) -> np.ndarray:
    """Rotation- and permutation-invariant description of every row of X.

    Each row of sqrt(X X^T) is sorted, then the profiles are unit-normalised,
    centred and unit-normalised again.
    """
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    sim = (U * s) @ U.T
    sim = -np.sort(-sim, axis=1)
    sim = _unit_rows(sim)
    sim = sim - sim.mean(axis=0, keepdims=True)
    return _unit_rows(sim)


def seed_alignment(X: np.ndarray, Y: np.ndarray, max_rounds: int = 100) -> np.ndarray:
    """Orthogonal seed map from two unpaired slices of equal size.

    Rows are first matched through their similarity profiles, then the
    assignment / Procrustes alternation runs until the matching is stable.
    """
    if X.shape != Y.shape:
        raise InputError(f"seed slices must have equal shapes, got {X.shape} and {Y.shape}")
    profile_sim = similarity_profiles(X) @ similarity_profiles(Y).T
    perm = solve_assignment(-profile_sim)

    Q = procrustes(X, Y[perm.mapping]).matrix
    for round_no in range(1, max_rounds + 1):
        matched = solve_assignment(-(X @ Q) @ Y.T)
        if np.array_equal(matched.mapping, perm.mapping):
            logger.debug("seed matching stable after %d round(s)", round_no)
            break
        perm = matched
        Q = procrustes(X, Y[perm.mapping]).matrix
    else:
        logger.info("seed matching still moving after %d rounds", max_rounds)
    return Q


def _initial_map(X: np.ndarray, Y: np.ndarray, cfg: WProcConfig) -> np.ndarray:
    d = X.shape[1]
    if cfg.init is InitMethod.IDENTITY:
        return np.eye(d)
    if cfg.init is InitMethod.RANDOM_ORTHOGONAL:
        if d == 1:
            return np.eye(1)
        return np.asarray(ortho_group.rvs(d, random_state=cfg.seed), dtype=np.float64)
    size = min(2 * cfg.batch_size, X.shape[0], Y.shape[0])
    return seed_alignment(X[:size], Y[:size], cfg.seed_rounds)


def wasserstein_procrustes(
    Xsrc: EmbeddingSpace,
    Ytgt: EmbeddingSpace,
    cfg: WProcConfig,
) -> tuple[AlignmentMap, ConvergenceLog]:
    """Alternate batched exact assignment with projected gradient steps on Q.

    Each iteration samples ``batch_size`` rows from the most frequent
    ``sample_top`` words of each space independently, matches them by
    minimising -(X_b Q) Y_b^T, and moves Q along X_b^T P_b Y_b before
    projecting back onto the orthogonal group. The learning rate is constant
    within an epoch and halves between epochs.
    """
    if Xsrc.normalized is Normalization.RAW or Ytgt.normalized is Normalization.RAW:
        raise InputError("wasserstein_procrustes expects normalised embedding spaces")
    if Xsrc.dim != Ytgt.dim:
        raise InputError(f"dimension mismatch: {Xsrc.dim} vs {Ytgt.dim}")
    X, Y = Xsrc.vectors, Ytgt.vectors
    pool_x = min(len(Xsrc), cfg.sample_top)
    pool_y = min(len(Ytgt), cfg.sample_top)
    b = cfg.batch_size
    if b > min(pool_x, pool_y):
        raise InputError(
            f"batch size {b} exceeds the sampling pool ({pool_x} source, {pool_y} target words)"
        )

    Q = _initial_map(X, Y, cfg)
    rng = np.random.default_rng(cfg.seed)
    log = ConvergenceLog()
    lr = cfg.learning_rate
    window: list[float] = []
    iteration = 0

    for epoch in range(cfg.epochs):
        for _ in range(cfg.iters_per_epoch):
            Xb = X[rng.choice(pool_x, size=b, replace=False)]
            Yb = Y[rng.choice(pool_y, size=b, replace=False)]
            XbQ = Xb @ Q
            perm = solve_assignment(-(XbQ @ Yb.T))
            PYb = Yb[perm.mapping]
            objective = float(np.sum((XbQ - PYb) ** 2)) / b
            if not np.isfinite(objective):
                raise NumericalError(
                    f"non-finite batch objective at iteration {iteration} (epoch {epoch})",
                    stage="align",
                )
            Q = project_orthogonal(Q + (lr / b) * (Xb.T @ PYb))
            window.append(objective)
            iteration += 1
            if iteration % cfg.log_every == 0:
                log.record(iteration, float(np.mean(window)))
                window = []
        logger.info(
            "%s->%s epoch %d/%d done, lr=%.4g, last objective %.5f",
            Xsrc.lang_tag, Ytgt.lang_tag, epoch + 1, cfg.epochs, lr,
            log.objectives[-1] if log.objectives else float("nan"),
        )
        lr /= 2.0
    if window:
        log.record(iteration, float(np.mean(window)))

    alignment = AlignmentMap(
        matrix=project_orthogonal(Q),
        source_lang=Xsrc.lang_tag,
        target_lang=Ytgt.lang_tag,
        method=AlignMethod.WPROC,
        orthogonal=True,
    )
    return alignment, log
