"""Online sequential ELM: recursive least-squares updates per data chunk.

A state is initialized from a seed chunk with at least as many rows as
hidden nodes, then refined chunk by chunk. Each update is exact recursive
least squares, so streaming any partition of a dataset reproduces the
batch solution over the same rows. Chunks may be discarded once learned.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .elm import HiddenLayer, hidden_output
from .exceptions import DimensionMismatchError, InsufficientInitDataError
from .linalg import as_matrix, spd_inverse, woodbury_update

__all__ = ["OselmState", "oselm_init", "oselm_update"]


@dataclass(frozen=True)
class OselmState:
    """One online learner: frozen hidden layer, output weights beta,
    inverse Gram matrix P and the number of completed updates k."""

    layer: HiddenLayer
    beta: np.ndarray  # (n_tilde, m)
    p: np.ndarray  # (n_tilde, n_tilde)
    k: int

    @property
    def m(self) -> int:
        return self.beta.shape[1]

    def predict(self, x) -> np.ndarray:
        return hidden_output(self.layer, x) @ self.beta


def oselm_init(layer: HiddenLayer, x0, t0) -> OselmState:
    """Initialize from a seed chunk: P = (H0^T H0)^-1, beta = P H0^T T0.

    Requires at least n_tilde rows so the initial Gram matrix can be
    positive definite.
    """
    x0 = as_matrix(x0, "X0")
    t0 = as_matrix(t0, "T0")
    if x0.shape[0] != t0.shape[0]:
        raise DimensionMismatchError(
            f"X0 has {x0.shape[0]} rows but T0 has {t0.shape[0]}"
        )
    if x0.shape[0] < layer.n_tilde:
        raise InsufficientInitDataError(
            f"init chunk has {x0.shape[0]} rows, need >= {layer.n_tilde}"
        )
    h0 = hidden_output(layer, x0)
    p = spd_inverse(h0.T @ h0)
    beta = p @ (h0.T @ t0)
    return OselmState(layer=layer, beta=beta, p=p, k=0)


def oselm_update(state: OselmState, x_next, t_next) -> OselmState:
    """Learn one arriving chunk and return the updated state.

    P is refreshed through the Woodbury form and beta through
    beta + P H^T (T - H beta); the chunk itself is not retained.
    """
    x_next = as_matrix(x_next, "X_next")
    t_next = as_matrix(t_next, "T_next")
    if x_next.shape[0] == 0:
        raise DimensionMismatchError("update chunk is empty")
    if x_next.shape[0] != t_next.shape[0]:
        raise DimensionMismatchError(
            f"X_next has {x_next.shape[0]} rows but T_next has {t_next.shape[0]}"
        )
    if t_next.shape[1] != state.m:
        raise DimensionMismatchError(
            f"T_next has {t_next.shape[1]} outputs, state expects {state.m}"
        )
    h = hidden_output(state.layer, x_next)
    p_next = woodbury_update(state.p, h)
    innovation = t_next - h @ state.beta
    beta_next = state.beta + p_next @ (h.T @ innovation)
    return replace(state, beta=beta_next, p=p_next, k=state.k + 1)
