"""Smooth approximation of discrete if-else logic via a shifted multinomial
logit OR-gate, plus the RASHS/CSC AND-gate comparators.

The gate evaluates a disjunction "any predicate > 0" in four stages:
normalize the raw predicates, take a soft maximum (log-sum-exp), squash
through a sigmoid, then shift vertically so the gate is exact at a chosen
anchor predicate vector.  A single sharpness parameter beta controls how
closely the result tracks the Boolean value; beta is driven by the
continuation schedule.

The softmax and sigmoid stages are kept separate (rather than fused into
one logistic expression) for numerical stability at large beta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logsumexp


def normalize(g: np.ndarray, g_max: float) -> np.ndarray:
    """Scale raw predicate values by the expected maximum magnitude."""
    if g_max <= 0.0:
        raise ValueError("g_max must be positive")
    return np.asarray(g, dtype=float) / g_max


def softmax(g_hat: np.ndarray, beta: float) -> float:
    """Smooth maximum of the normalized predicates: log-sum-exp / beta."""
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    g_hat = np.atleast_1d(np.asarray(g_hat, dtype=float))
    return float(logsumexp(beta * g_hat) / beta)


def softmax_weights(g_hat: np.ndarray, beta: float) -> np.ndarray:
    """Gradient of softmax w.r.t. each normalized predicate (sums to 1)."""
    g_hat = np.atleast_1d(np.asarray(g_hat, dtype=float))
    z = beta * g_hat
    z = z - np.max(z)
    e = np.exp(z)
    return e / np.sum(e)


def sigmoid(w: float, beta: float) -> float:
    """1 - (1 + exp(beta*w))^-1, overflow-safe on both tails."""
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    return float(expit(beta * w))


def sigmoid_slope(w: float, beta: float) -> float:
    """d sigmoid / d w, underflow-safe (returns 0.0 on saturated tails)."""
    s = expit(beta * w)
    return float(beta * s * (1.0 - s))


def sigmoid_curvature(w: float, beta: float) -> float:
    """d2 sigmoid / d w2."""
    s = expit(beta * w)
    return float(beta * beta * s * (1.0 - s) * (1.0 - 2.0 * s))


@dataclass(frozen=True)
class SmoothOrGate:
    """Shifted multinomial-logit smoothing of "any g_i > 0".

    g_max normalizes the raw predicates; g_c is the anchor predicate vector
    at which the gate is exact (at least one element must be positive so the
    true OR value there is 1); beta is the homotopy sharpness.
    """

    g_max: float
    g_c: np.ndarray
    beta: float

    def __post_init__(self):
        object.__setattr__(
            self, "g_c", np.atleast_1d(np.asarray(self.g_c, dtype=float))
        )
        if self.g_max <= 0.0:
            raise ValueError("g_max must be positive")
        if self.beta <= 0.0:
            raise ValueError("beta must be positive")
        if not np.any(self.g_c > 0.0):
            raise ValueError("anchor g_c needs at least one positive element")

    @property
    def n_g(self) -> int:
        return self.g_c.size

    def _anchor_sigmoid(self) -> float:
        return sigmoid(softmax(normalize(self.g_c, self.g_max), self.beta), self.beta)

    @property
    def shift(self) -> float:
        """Vertical shift 1 - sigma_beta(softmax(normalized anchor))."""
        return 1.0 - self._anchor_sigmoid()


@dataclass(frozen=True)
class GateEval:
    """Gate value and its gradient with respect to the raw predicates."""

    value: float
    grad: np.ndarray


def or_gate(g: np.ndarray, gate: SmoothOrGate) -> GateEval:
    """Evaluate the shifted OR-gate and its raw-predicate gradient.

    The value is ordered as 1 + (sigma - sigma_anchor) so that evaluating
    at the anchor returns exactly 1.0.
    """
    g_hat = normalize(np.atleast_1d(np.asarray(g, dtype=float)), gate.g_max)
    if g_hat.size != gate.n_g:
        raise ValueError("predicate length does not match gate arity")
    m = softmax(g_hat, gate.beta)
    s = sigmoid(m, gate.beta)
    value = 1.0 + (s - gate._anchor_sigmoid())
    grad = (
        sigmoid_slope(m, gate.beta)
        * softmax_weights(g_hat, gate.beta)
        / gate.g_max
    )
    return GateEval(value=value, grad=grad)


def or_gate_curvature(g: float, gate: SmoothOrGate) -> float:
    """Second derivative of the gate value w.r.t. a scalar raw predicate.

    Only defined for single-predicate gates, where softmax is the identity.
    """
    if gate.n_g != 1:
        raise ValueError("curvature is only available for single-predicate gates")
    g_hat = float(g) / gate.g_max
    return sigmoid_curvature(g_hat, gate.beta) / gate.g_max**2


def rashs_and(g_hat: np.ndarray, beta: float) -> float:
    """RASHS smooth AND of "all g_i <= 0": product of 1/(1+exp(beta*g_i))."""
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    g_hat = np.atleast_1d(np.asarray(g_hat, dtype=float))
    return float(np.prod(expit(-beta * g_hat)))


def csc_and(g_hat: np.ndarray, beta: float) -> float:
    """CSC smooth AND: product of (1 - tanh(beta*g_i)) / 2."""
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    g_hat = np.atleast_1d(np.asarray(g_hat, dtype=float))
    return float(np.prod(0.5 * (1.0 - np.tanh(beta * g_hat))))


def smooth_implication(
    f_if: np.ndarray, f_else: np.ndarray, r_hat: float
) -> np.ndarray:
    """Blend the if/else constraint branches: (1-R)*f_if + R*f_else."""
    f_if = np.atleast_1d(np.asarray(f_if, dtype=float))
    f_else = np.atleast_1d(np.asarray(f_else, dtype=float))
    if f_if.shape != f_else.shape:
        raise ValueError("branch constraint vectors must have equal length")
    return (1.0 - r_hat) * f_if + r_hat * f_else
