"""Sentence- and corpus-level BLEU on whitespace tokens.

Modified (clipped) n-gram precisions for orders 1..max combined by
geometric mean, times the brevity penalty, scaled to [0, 100]. Corpus
scoring pools n-gram match/total counts and lengths across all pairs
before computing precisions, so one bad sentence cannot zero the corpus.

Orders for which the hypothesis side has no n-grams at all (every
hypothesis shorter than the order) are excluded from the geometric mean,
so an identical-but-short pair scores 100 rather than hitting a 0/0
precision.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = ["BleuConfig", "sentence_bleu", "corpus_bleu"]


@dataclass(frozen=True)
class BleuConfig:
    """BLEU configuration.

    smoothing_epsilon=None is unsmoothed BLEU: any order with zero matches
    zeroes the score. A positive epsilon applies additive smoothing
    (matches + eps) / (total + eps) per order.
    """

    max_ngram_order: int = 4
    smoothing_epsilon: float | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.max_ngram_order <= 9:
            raise ValueError(f"max_ngram_order must be in [1, 9], got {self.max_ngram_order}")
        if self.smoothing_epsilon is not None and not self.smoothing_epsilon > 0:
            raise ValueError("smoothing_epsilon must be positive when given")


def _ngram_counts(tokens: Sequence[str], order: int) -> Counter:
    return Counter(tuple(tokens[i:i + order]) for i in range(len(tokens) - order + 1))


class _PooledCounts:
    """Clipped match / total n-gram counts and lengths, summed over pairs."""

    def __init__(self, max_order: int):
        self.max_order = max_order
        self.matches = [0] * max_order
        self.totals = [0] * max_order
        self.ref_length = 0
        self.hyp_length = 0

    def add(self, reference: str, hypothesis: str) -> None:
        ref_tokens = reference.split()
        hyp_tokens = hypothesis.split()
        if not ref_tokens:
            raise ValueError("BLEU undefined: reference contains no tokens")
        self.ref_length += len(ref_tokens)
        self.hyp_length += len(hyp_tokens)
        for order in range(1, self.max_order + 1):
            hyp_counts = _ngram_counts(hyp_tokens, order)
            if not hyp_counts:
                continue
            ref_counts = _ngram_counts(ref_tokens, order)
            self.totals[order - 1] += sum(hyp_counts.values())
            self.matches[order - 1] += sum(
                min(count, ref_counts[gram]) for gram, count in hyp_counts.items()
            )

    def score(self, epsilon: float | None) -> float:
        if self.hyp_length == 0:
            return 0.0
        log_sum = 0.0
        effective_orders = 0
        for matched, total in zip(self.matches, self.totals):
            if total == 0:
                # No hypothesis n-grams of this order anywhere (all
                # hypotheses shorter than the order): skip it, so that an
                # identical short pair still scores 100.
                continue
            effective_orders += 1
            if epsilon is not None:
                precision = (matched + epsilon) / (total + epsilon)
            elif matched == 0:
                return 0.0
            else:
                precision = matched / total
            log_sum += math.log(precision)
        if effective_orders == 0:
            return 0.0
        brevity = 1.0
        if self.hyp_length < self.ref_length:
            brevity = math.exp(1.0 - self.ref_length / self.hyp_length)
        return 100.0 * brevity * math.exp(log_sum / effective_orders)


def sentence_bleu(reference: str, hypothesis: str, config: BleuConfig | None = None) -> float:
    """BLEU of a single hypothesis against a single reference, in [0, 100].

    An empty hypothesis scores 0; an empty reference raises ValueError.
    """
    if config is None:
        config = BleuConfig()
    counts = _PooledCounts(config.max_ngram_order)
    counts.add(reference, hypothesis)
    return counts.score(config.smoothing_epsilon)


def corpus_bleu(pairs: Iterable, config: BleuConfig | None = None) -> float:
    """Corpus BLEU over (reference, hypothesis) pair objects, in [0, 100].

    Counts are pooled across the corpus before precisions are taken; the
    brevity penalty uses total reference/hypothesis lengths. A single-pair
    corpus therefore scores exactly like :func:`sentence_bleu`.

    Args:
        pairs: Objects with ``reference`` and ``hypothesis`` attributes.
    """
    if config is None:
        config = BleuConfig()
    counts = _PooledCounts(config.max_ngram_order)
    n = 0
    for pair in pairs:
        counts.add(pair.reference, pair.hypothesis)
        n += 1
    if n == 0:
        raise ValueError("corpus BLEU undefined for an empty corpus")
    return counts.score(config.smoothing_epsilon)
