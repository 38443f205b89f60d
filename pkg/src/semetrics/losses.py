"""Training-loss family combining literal and semantic correctness.

* :func:`cross_entropy` - weighted token-level softmax cross-entropy with
  its analytic gradient, the conventional sequence-model training loss.
* :func:`semantic_loss` - batch mean of the embedding distance between
  reference and hypothesis sentences.
* :func:`semantix_sum` / :func:`semantix_prod` - the combined losses
  ``alpha * sd + beta * ce`` and ``(gamma + sd) * ce``.
* :func:`sem_dist_grad` - analytic gradient of the embedding distance,
  used by the finite-difference self-check.

The semantic term is exposed value-only: differentiating it end to end
would require backpropagation through the sentence encoder, which lives
outside this package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedders import embed
from .semdist import sem_dist, validate_embedding_pair

__all__ = [
    "IGNORE_INDEX",
    "LossParams",
    "cross_entropy",
    "semantic_loss",
    "semantix_sum",
    "semantix_prod",
    "sem_dist_grad",
]

#: Label id marking padding positions excluded from the loss.
IGNORE_INDEX = -100


@dataclass(frozen=True)
class LossParams:
    """Weights of the combined losses.

    alpha scales the semantic term and beta the cross-entropy term of the
    sum variant; gamma offsets the semantic factor of the product variant.
    All default to 1 and are configuration, not constants.
    """

    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")

    def require_sum_wellposed(self) -> None:
        """The sum variant needs alpha + beta > 0 to be a usable loss."""
        if self.alpha + self.beta == 0:
            raise ValueError("sum variant requires alpha + beta > 0")


def cross_entropy(
    logits: np.ndarray,
    labels: np.ndarray,
    class_weights: np.ndarray | None = None,
    ignore_index: int = IGNORE_INDEX,
) -> tuple[float, np.ndarray]:
    """Weighted softmax cross-entropy over a batch of token logits.

    Args:
        logits: Real tensor of shape (N, T, C) - batch, positions, classes.
        labels: Integer array of shape (N, T); entries equal to
            ``ignore_index`` are excluded from the loss.
        class_weights: Optional per-class weights of shape (C,), default
            all ones.

    Returns:
        (value, gradient): the mean over the M non-ignored positions of
        ``w[label] * -log softmax(logits)[label]``, and its gradient with
        respect to the logits (zero rows at ignored positions).

    Raises:
        ValueError: On shape disagreement, non-finite logits, invalid label
            ids, or when every position is ignored.
    """
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels)
    if logits.ndim != 3:
        raise ValueError(f"logits must have shape (N, T, C), got {logits.shape}")
    n, t, c = logits.shape
    if c < 2:
        raise ValueError(f"need at least 2 classes, got {c}")
    if labels.shape != (n, t):
        raise ValueError(f"labels shape {labels.shape} does not match logits {(n, t)}")
    if not np.all(np.isfinite(logits)):
        raise ValueError("logits contain non-finite values")
    if class_weights is None:
        class_weights = np.ones(c, dtype=np.float64)
    else:
        class_weights = np.asarray(class_weights, dtype=np.float64)
        if class_weights.shape != (c,):
            raise ValueError(f"class_weights must have shape ({c},)")

    mask = labels != ignore_index
    counted = int(mask.sum())
    if counted == 0:
        raise ValueError("all positions are ignored; cross-entropy undefined")
    ids = labels[mask]
    if ids.min() < 0 or ids.max() >= c:
        raise ValueError("labels contain ids outside [0, C)")

    flat = logits[mask]                                   # (M, C)
    shifted = flat - flat.max(axis=1, keepdims=True)      # max-shift for stability
    exp = np.exp(shifted)
    softmax = exp / exp.sum(axis=1, keepdims=True)
    log_probs = shifted - np.log(exp.sum(axis=1, keepdims=True))

    rows = np.arange(counted)
    weights = class_weights[ids]
    value = float(-(weights * log_probs[rows, ids]).sum() / counted)

    grad_flat = softmax * weights[:, None]
    grad_flat[rows, ids] -= weights
    grad = np.zeros_like(logits)
    grad[mask] = grad_flat / counted
    return value, grad


def semantic_loss(references, hypotheses, provider) -> float:
    """Mean embedding distance between paired reference/hypothesis texts.

    Args:
        references: Reference sentences.
        hypotheses: Hypothesis sentences, same length.
        provider: Embedding provider (see :mod:`semetrics.embedders`).

    Raises:
        ValueError: On length mismatch or empty input; provider errors
            propagate unchanged.
    """
    references = list(references)
    hypotheses = list(hypotheses)
    if len(references) != len(hypotheses):
        raise ValueError(
            f"got {len(references)} references but {len(hypotheses)} hypotheses"
        )
    if not references:
        raise ValueError("semantic loss undefined for an empty batch")
    vectors = embed(references + hypotheses, provider)
    n = len(references)
    distances = [sem_dist(vectors[i], vectors[n + i]) for i in range(n)]
    return float(np.mean(distances))


def semantix_sum(sd: float, ce: float, params: LossParams) -> float:
    """Sum-form combined loss ``alpha * sd + beta * ce``."""
    _check_terms(sd, ce)
    params.require_sum_wellposed()
    return params.alpha * sd + params.beta * ce


def semantix_prod(sd: float, ce: float, params: LossParams) -> float:
    """Product-form combined loss ``(gamma + sd) * ce``."""
    _check_terms(sd, ce)
    return (params.gamma + sd) * ce


def _check_terms(sd: float, ce: float) -> None:
    for name, value in (("sd", sd), ("ce", ce)):
        if not np.isfinite(value) or value < 0:
            raise ValueError(f"{name} must be finite and >= 0, got {value}")


def sem_dist_grad(x, y) -> np.ndarray:
    """Gradient of :func:`semetrics.semdist.sem_dist` with respect to ``x``.

    Closed form ``-(y / (|x||y|) - (x.y) x / (|x|^3 |y|))``; the gradient
    with respect to ``y`` follows by swapping the arguments. Vanishes when
    x and y point in the same direction.
    """
    xv, yv = validate_embedding_pair(x, y)
    nx = float(np.linalg.norm(xv))
    ny = float(np.linalg.norm(yv))
    dot = float(xv @ yv)
    return -(yv / (nx * ny) - dot * xv / (nx ** 3 * ny))
