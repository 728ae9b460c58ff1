"""Particle swarm optimization selective ensemble (PSOSEN).

Each component learner gets a weight on the probability simplex. The
weights are evolved by global-best PSO against a validation-set fitness,
learners whose weight clears a threshold are kept, and the kept learners
are combined by plain averaging (regression) or plurality vote
(classification). The weights steer selection only; they never enter the
final combination, which avoids overfitting the combination itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._rng import seed_sequence
from .exceptions import (
    DimensionMismatchError,
    EmptySelectionError,
    IllConditionedError,
)
from .linalg import as_matrix

# Condition estimate above which the closed-form weight solve is refused.
ANALYTIC_COND_LIMIT = 1e10

# Floor under validation errors so fitness 1/error stays finite.
_ERROR_FLOOR = 1e-12

__all__ = [
    "ANALYTIC_COND_LIMIT",
    "PsoConfig",
    "PsoResult",
    "SelectionResult",
    "SelectiveEnsemble",
    "analytic_weights",
    "bootstrap_indices",
    "clamp_to_simplex",
    "combine_classification",
    "combine_regression",
    "correlation_matrix",
    "ensemble_error",
    "pso_optimize",
    "psosen_standalone",
    "select_members",
    "weighted_vote_labels",
]


@dataclass(frozen=True)
class PsoConfig:
    """Swarm hyperparameters. Defaults are the classic
    constriction-equivalent constants."""

    swarm_size: int = 30
    iterations: int = 200
    inertia: float = 0.729
    cognitive_coeff: float = 1.49445
    social_coeff: float = 1.49445
    velocity_clamp: float = 0.5
    seed: int | np.random.SeedSequence = 0

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 <= self.inertia <= 1.0:
            raise ValueError("inertia must lie in [0, 1]")
        if self.velocity_clamp <= 0:
            raise ValueError("velocity_clamp must be > 0")


@dataclass(frozen=True)
class PsoResult:
    """Best-ever feasible weights plus the best-so-far fitness after
    initialization and after each iteration (length iterations + 1)."""

    weights: np.ndarray
    fitness_trace: np.ndarray


@dataclass(frozen=True)
class SelectionResult:
    """Evolved weights, the surviving member indices, and the PSO trace."""

    best_weights: np.ndarray
    selected: tuple[int, ...]
    fitness_trace: np.ndarray


def clamp_to_simplex(w) -> np.ndarray:
    """Project onto the feasible set: clamp to [0, 1], renormalize to sum 1.

    An all-zero vector after clamping falls back to uniform weights.
    """
    w = np.clip(np.asarray(w, dtype=np.float64), 0.0, 1.0)
    total = w.sum()
    if total <= 0.0:
        return np.full(w.shape, 1.0 / w.size)
    return w / total


def _clamp_rows(positions: np.ndarray) -> np.ndarray:
    positions = np.clip(positions, 0.0, 1.0)
    totals = positions.sum(axis=1, keepdims=True)
    dead = totals[:, 0] <= 0.0
    if np.any(dead):
        positions[dead] = 1.0 / positions.shape[1]
        totals = positions.sum(axis=1, keepdims=True)
    return positions / totals


def bootstrap_indices(n_samples: int, rounds: int, seed) -> list[np.ndarray]:
    """Row indices of `rounds` bootstrap resamples, each of size n_samples,
    drawn with replacement. Deterministic under the seed."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    rng = np.random.default_rng(seed_sequence(seed))
    return [rng.integers(0, n_samples, size=n_samples) for _ in range(rounds)]


def correlation_matrix(preds: Sequence[np.ndarray], targets) -> np.ndarray:
    """Pairwise residual-product matrix over a validation set.

    C[i, j] averages (f_i(x) - d(x)) (f_j(x) - d(x)) over validation
    samples and output coordinates; each diagonal entry is that learner's
    empirical squared error. Symmetric by construction.
    """
    targets = as_matrix(targets, "targets")
    if targets.shape[0] == 0:
        raise DimensionMismatchError("validation set is empty")
    residuals = []
    for i, p in enumerate(preds):
        p = as_matrix(p, f"preds[{i}]")
        if p.shape != targets.shape:
            raise DimensionMismatchError(
                f"preds[{i}] has shape {p.shape}, targets {targets.shape}"
            )
        residuals.append((p - targets).ravel())
    r = np.asarray(residuals)
    c = (r @ r.T) / r.shape[1]
    return (c + c.T) / 2.0


def ensemble_error(w, c) -> float:
    """Quadratic-form generalization error of weighted combination: w^T C w."""
    w = np.asarray(w, dtype=np.float64).ravel()
    c = as_matrix(c, "C")
    if c.shape[0] != c.shape[1] or c.shape[0] != w.size:
        raise DimensionMismatchError(
            f"weights of size {w.size} incompatible with C of shape {c.shape}"
        )
    return float(w @ c @ w)


def analytic_weights(c) -> np.ndarray:
    """Closed-form minimizer of w^T C w under sum(w) = 1.

    Solves via the Lagrange condition: weights proportional to the row
    sums of C^-1. Entries are clamped to [0, 1] and renormalized if the
    unconstrained solution leaves the box. Refuses matrices whose
    condition estimate reaches ANALYTIC_COND_LIMIT, since near-duplicate
    learners make C practically singular.
    """
    c = as_matrix(c, "C")
    n = c.shape[0]
    if c.shape[1] != n:
        raise DimensionMismatchError(f"C must be square, got {c.shape}")
    cond = np.linalg.cond(c)
    if not np.isfinite(cond) or cond >= ANALYTIC_COND_LIMIT:
        raise IllConditionedError(
            f"correlation matrix condition estimate {cond:.3e} "
            f"exceeds {ANALYTIC_COND_LIMIT:.0e}"
        )
    row_sums = np.linalg.solve(c, np.ones(n))
    total = row_sums.sum()
    if total == 0.0 or not np.all(np.isfinite(row_sums / total)):
        raise IllConditionedError("weight normalization is degenerate")
    w = row_sums / total
    if np.any(w < 0.0) or np.any(w > 1.0):
        w = clamp_to_simplex(w)
    return w


def pso_optimize(
    fitness: Callable[[np.ndarray], float], n: int, config: PsoConfig
) -> PsoResult:
    """Maximize a fitness over the n-simplex with global-best PSO.

    Positions are re-projected onto the feasible set after every move, so
    all evaluated candidates satisfy the weight constraints. Returns the
    best-ever feasible position; the fitness trace is non-decreasing.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed_sequence(config.seed))
    s = config.swarm_size

    positions = _clamp_rows(rng.uniform(0.0, 1.0, size=(s, n)))
    velocities = np.zeros_like(positions)
    fits = np.array([fitness(p) for p in positions], dtype=np.float64)

    pbest = positions.copy()
    pbest_fits = fits.copy()
    g = int(np.argmax(pbest_fits))
    gbest = pbest[g].copy()
    gbest_fit = float(pbest_fits[g])
    trace = [gbest_fit]

    for _ in range(config.iterations):
        r1 = rng.uniform(size=(s, n))
        r2 = rng.uniform(size=(s, n))
        velocities = (
            config.inertia * velocities
            + config.cognitive_coeff * r1 * (pbest - positions)
            + config.social_coeff * r2 * (gbest - positions)
        )
        np.clip(
            velocities, -config.velocity_clamp, config.velocity_clamp,
            out=velocities,
        )
        positions = _clamp_rows(positions + velocities)
        fits = np.array([fitness(p) for p in positions], dtype=np.float64)

        improved = fits > pbest_fits
        pbest[improved] = positions[improved]
        pbest_fits[improved] = fits[improved]
        b = int(np.argmax(pbest_fits))
        if pbest_fits[b] > gbest_fit:
            gbest_fit = float(pbest_fits[b])
            gbest = pbest[b].copy()
        trace.append(gbest_fit)

    return PsoResult(weights=gbest, fitness_trace=np.asarray(trace))


def select_members(w, lambda_w: float) -> list[int]:
    """Indices with weight strictly above the threshold.

    Falls back to the single heaviest member when nothing clears the bar,
    so the selection is never empty.
    """
    if not 0.0 <= lambda_w < 1.0:
        raise ValueError("lambda_w must lie in [0, 1)")
    w = np.asarray(w, dtype=np.float64).ravel()
    chosen = np.flatnonzero(w > lambda_w)
    if chosen.size == 0:
        return [int(np.argmax(w))]
    return [int(i) for i in chosen]


def combine_regression(outputs: Sequence[np.ndarray], selected) -> np.ndarray:
    """Unweighted mean of the selected members' outputs."""
    selected = list(selected)
    if not selected:
        raise EmptySelectionError("no members selected")
    picked = [np.asarray(outputs[i], dtype=np.float64) for i in selected]
    shape = picked[0].shape
    for i, p in zip(selected, picked):
        if p.shape != shape:
            raise DimensionMismatchError(
                f"output {i} has shape {p.shape}, expected {shape}"
            )
    return np.mean(picked, axis=0)


def combine_classification(labels: Sequence[np.ndarray], selected) -> np.ndarray:
    """Per-sample plurality vote over selected members' label vectors.

    Ties resolve to the smallest class index, independent of any seed.
    """
    selected = list(selected)
    if not selected:
        raise EmptySelectionError("no members selected")
    picked = np.asarray([np.asarray(labels[i], dtype=np.int64) for i in selected])
    n_classes = int(picked.max()) + 1
    counts = np.zeros((picked.shape[1], n_classes), dtype=np.int64)
    for row in picked:
        counts[np.arange(row.size), row] += 1
    return np.argmax(counts, axis=1)


def weighted_vote_labels(labels: Sequence[np.ndarray], w, n_classes: int) -> np.ndarray:
    """Labels of the weight-scored vote: argmax_y sum_i w_i [label_i = y].

    Used as the classification surrogate for the weighted-ensemble error
    during weight evolution. Ties resolve to the smallest class index.
    """
    w = np.asarray(w, dtype=np.float64).ravel()
    stacked = np.asarray([np.asarray(l, dtype=np.int64) for l in labels])
    if stacked.shape[0] != w.size:
        raise DimensionMismatchError(
            f"{stacked.shape[0]} label vectors but {w.size} weights"
        )
    scores = np.zeros((stacked.shape[1], n_classes))
    for wi, row in zip(w, stacked):
        scores[np.arange(row.size), row] += wi
    return np.argmax(scores, axis=1)


@dataclass(frozen=True)
class SelectiveEnsemble:
    """Trained bootstrap learners plus the evolved selection."""

    members: tuple
    weights: np.ndarray
    selected: tuple[int, ...]
    classification: bool
    fitness_trace: np.ndarray = field(repr=False, default=None)

    def member_outputs(self, x) -> list[np.ndarray]:
        return [m.predict(x) for m in self.members]

    def predict(self, x) -> np.ndarray:
        """Combined prediction: averaged outputs for regression, voted
        class labels for classification."""
        outputs = self.member_outputs(x)
        if not self.classification:
            return combine_regression(outputs, self.selected)
        labels = [np.argmax(o, axis=1) for o in outputs]
        return combine_classification(labels, self.selected)


def regression_fitness(preds: Sequence[np.ndarray], targets) -> Callable:
    """Fitness 1 / (w^T C w) from validation residual products."""
    c = correlation_matrix(preds, targets)

    def fitness(w: np.ndarray) -> float:
        return 1.0 / max(ensemble_error(w, c), _ERROR_FLOOR)

    return fitness


def classification_fitness(labels: Sequence[np.ndarray], target_labels, n_classes: int) -> Callable:
    """Fitness 1 / (weighted-vote misclassification rate on validation)."""
    target_labels = np.asarray(target_labels, dtype=np.int64).ravel()

    def fitness(w: np.ndarray) -> float:
        voted = weighted_vote_labels(labels, w, n_classes)
        err = float(np.mean(voted != target_labels))
        return 1.0 / max(err, _ERROR_FLOOR)

    return fitness


def psosen_standalone(
    x,
    t,
    trainer: Callable,
    rounds: int,
    *,
    classification: bool = False,
    lambda_w: float | None = None,
    pso: PsoConfig | None = None,
    seed=0,
) -> SelectiveEnsemble:
    """Train a selective ensemble from scratch on one training set.

    `trainer(x, t, seed)` must return a fitted object with a
    ``predict(x)`` method; it is called once per bootstrap resample.
    Validation data are the pooled out-of-bag rows (those rows the
    training set holds that a learner's resample missed). Weights are
    evolved by PSO with fitness 1/error on that validation pool, and
    members above `lambda_w` (default 1/rounds) survive.
    """
    if rounds < 2:
        raise ValueError("rounds must be >= 2")
    x = as_matrix(x, "x")
    t = as_matrix(t, "t")
    if x.shape[0] != t.shape[0]:
        raise DimensionMismatchError(
            f"x has {x.shape[0]} rows but t has {t.shape[0]}"
        )

    root = seed_sequence(seed)
    boot_seed, pso_seed, *member_seeds = root.spawn(2 + rounds)
    index_sets = bootstrap_indices(x.shape[0], rounds, boot_seed)
    members = tuple(
        trainer(x[idx], t[idx], ms) for idx, ms in zip(index_sets, member_seeds)
    )

    # Pooled out-of-bag rows; degenerate tiny sets fall back to all rows.
    oob = np.zeros(x.shape[0], dtype=bool)
    for idx in index_sets:
        mask = np.ones(x.shape[0], dtype=bool)
        mask[idx] = False
        oob |= mask
    val_rows = np.flatnonzero(oob)
    if val_rows.size == 0:
        val_rows = np.arange(x.shape[0])
    xv, tv = x[val_rows], t[val_rows]

    outputs = [m.predict(xv) for m in members]
    if classification:
        labels = [np.argmax(o, axis=1) for o in outputs]
        fitness = classification_fitness(labels, np.argmax(tv, axis=1), tv.shape[1])
    else:
        fitness = regression_fitness(outputs, tv)

    config = pso if pso is not None else PsoConfig(seed=pso_seed)
    result = pso_optimize(fitness, rounds, config)
    threshold = lambda_w if lambda_w is not None else 1.0 / rounds
    selected = tuple(select_members(result.weights, threshold))
    return SelectiveEnsemble(
        members=members,
        weights=result.weights,
        selected=selected,
        classification=classification,
        fitness_trace=result.fitness_trace,
    )
