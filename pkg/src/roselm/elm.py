"""Single-hidden-layer random-feature networks.

A hidden layer is drawn once at random and frozen; only the linear output
weights are ever fitted. Batch training solves the least-squares problem
H beta = T through the left pseudoinverse of the hidden output matrix H.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import expit

from .exceptions import DimensionMismatchError
from .linalg import as_matrix, left_pseudoinverse

# Widths much below this make exp(-d^2/b) underflow into dead hidden
# columns, which turns H^T H numerically singular at initialization.
RBF_WIDTH_MIN = 0.1

__all__ = [
    "Activation",
    "HiddenLayer",
    "ElmModel",
    "RBF_WIDTH_MIN",
    "init_hidden",
    "hidden_output",
    "train_batch",
    "predict",
]


class Activation(str, Enum):
    """Hidden-node kinds: additive sigmoid or Gaussian RBF."""

    SIGMOID = "sigmoid"
    RBF = "rbf"


@dataclass(frozen=True)
class HiddenLayer:
    """Frozen random hidden-node parameters.

    For sigmoid nodes ``a`` holds input weights and ``b`` biases; for RBF
    nodes ``a`` holds centers and ``b`` strictly positive widths.
    """

    activation: Activation
    a: np.ndarray  # (n_tilde, n)
    b: np.ndarray  # (n_tilde,)

    def __post_init__(self):
        if self.a.ndim != 2 or self.b.ndim != 1:
            raise DimensionMismatchError("a must be 2-D and b 1-D")
        if self.a.shape[0] != self.b.shape[0]:
            raise DimensionMismatchError(
                f"a has {self.a.shape[0]} nodes but b has {self.b.shape[0]}"
            )
        if self.activation == Activation.RBF and np.any(self.b <= 0):
            raise ValueError("RBF widths must be strictly positive")

    @property
    def n(self) -> int:
        return self.a.shape[1]

    @property
    def n_tilde(self) -> int:
        return self.a.shape[0]


@dataclass(frozen=True)
class ElmModel:
    """A hidden layer plus fitted output weights beta of shape (n_tilde, m)."""

    layer: HiddenLayer
    beta: np.ndarray

    def __post_init__(self):
        if self.beta.ndim != 2 or self.beta.shape[0] != self.layer.n_tilde:
            raise DimensionMismatchError(
                f"beta must be ({self.layer.n_tilde}, m), got {self.beta.shape}"
            )

    @property
    def m(self) -> int:
        return self.beta.shape[1]

    def predict(self, x) -> np.ndarray:
        return predict(self, x)


def init_hidden(n, n_tilde, activation, seed) -> HiddenLayer:
    """Draw a random hidden layer; identical seeds give identical layers.

    Sigmoid weights and biases are uniform on [-1, 1]. RBF centers are
    uniform on [-1, 1] and widths uniform on [RBF_WIDTH_MIN, 1].
    """
    if n < 1 or n_tilde < 1:
        raise ValueError("n and n_tilde must be >= 1")
    activation = Activation(activation)
    rng = np.random.default_rng(seed)
    a = rng.uniform(-1.0, 1.0, size=(n_tilde, n))
    if activation == Activation.SIGMOID:
        b = rng.uniform(-1.0, 1.0, size=n_tilde)
    else:
        b = rng.uniform(RBF_WIDTH_MIN, 1.0, size=n_tilde)
    return HiddenLayer(activation=activation, a=a, b=b)


def hidden_output(layer: HiddenLayer, x) -> np.ndarray:
    """Hidden layer output matrix H of shape (n_samples, n_tilde).

    H[j, i] = G(a_i, b_i, x_j) with G the sigmoid 1/(1+exp(-(a.x+b)))
    or the Gaussian RBF exp(-||x-a||^2 / b).
    """
    x = as_matrix(x, "X")
    if x.shape[1] != layer.n:
        raise DimensionMismatchError(
            f"X has {x.shape[1]} features, layer expects {layer.n}"
        )
    if layer.activation == Activation.SIGMOID:
        return expit(x @ layer.a.T + layer.b)
    d2 = cdist(x, layer.a, "sqeuclidean")
    return np.exp(-d2 / layer.b)


def train_batch(layer: HiddenLayer, x, t) -> ElmModel:
    """Fit output weights by least squares: beta = pinv(H) T."""
    x = as_matrix(x, "X")
    t = as_matrix(t, "T")
    if x.shape[0] != t.shape[0]:
        raise DimensionMismatchError(
            f"X has {x.shape[0]} rows but T has {t.shape[0]}"
        )
    h = hidden_output(layer, x)
    beta = left_pseudoinverse(h) @ t
    return ElmModel(layer=layer, beta=beta)


def predict(model: ElmModel, x) -> np.ndarray:
    """Network output H(x) beta, shape (n_samples, m)."""
    return hidden_output(model.layer, x) @ model.beta
