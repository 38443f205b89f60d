"""Semantic distance between sentence embeddings.

The distance is one minus the cosine similarity of two embedding vectors:
0 for identical directions, 1 for orthogonal, 2 for opposite. It is
invariant under positive rescaling of either vector, so providers are free
to return normalized or unnormalized embeddings.
"""

from __future__ import annotations

import numpy as np

__all__ = ["sem_dist", "validate_embedding", "validate_embedding_pair"]


def validate_embedding(vector, name: str = "embedding") -> np.ndarray:
    """Coerce to a float64 1-D array, rejecting zero or non-finite vectors."""
    arr = np.asarray(vector, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} has dimension 0")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if not np.any(arr):
        raise ValueError(f"{name} is the zero vector; cosine distance undefined")
    return arr


def validate_embedding_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Validate two embeddings and check they share a dimension."""
    xv = validate_embedding(x, "x")
    yv = validate_embedding(y, "y")
    if xv.shape != yv.shape:
        raise ValueError(f"dimension mismatch: {xv.shape[0]} vs {yv.shape[0]}")
    return xv, yv


def sem_dist(x, y) -> float:
    """Cosine distance ``1 - x.y / (|x| |y|)`` between two embeddings.

    Args:
        x: Vector of the reference sentence embedding.
        y: Vector of the hypothesis sentence embedding, same dimension.

    Returns:
        Distance in [0, 2] (up to floating round-off).

    Raises:
        ValueError: On dimension mismatch, zero vectors or non-finite input.
    """
    xv, yv = validate_embedding_pair(x, y)
    # Rescale by the largest component before squaring: exact by scale
    # invariance, and keeps norms of extreme vectors (subnormal or huge
    # entries) from under/overflowing.
    xv = xv / np.max(np.abs(xv))
    yv = yv / np.max(np.abs(yv))
    cosine = float(xv @ yv) / (float(np.linalg.norm(xv)) * float(np.linalg.norm(yv)))
    return 1.0 - cosine
