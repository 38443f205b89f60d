"""Word and character error rates via Levenshtein alignment.

WER = 100 * (S + I + D) / reference-word-count, CER is the character-level
analogue. Metric functions never normalize their inputs; callers that want
normalized rates normalize first (see :mod:`semetrics.normalize`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = ["EditStats", "levenshtein", "wer", "cer", "corpus_error_rate"]


@dataclass(frozen=True)
class EditStats:
    """Minimal-cost edit decomposition between two token sequences.

    substitutions + insertions + deletions equals the Levenshtein distance;
    reference_length is the unit count of the reference (words for WER,
    characters for CER).
    """

    substitutions: int
    insertions: int
    deletions: int
    reference_length: int

    @property
    def distance(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    def error_rate(self) -> float:
        """Distance over reference length, as a percentage (may exceed 100)."""
        if self.reference_length == 0:
            raise ValueError("error rate undefined for an empty reference")
        return 100.0 * self.distance / self.reference_length


def levenshtein(a: Sequence, b: Sequence) -> EditStats:
    """Align two token sequences with unit-cost substitution/insertion/deletion.

    Classic dynamic program over (distance, subs, ins, dels) tuples; rows
    are swapped so memory stays O(len(b)). Insertions turn ``a`` into ``b``
    (tokens present only in ``b``), deletions remove tokens of ``a``.
    """
    if len(a) < len(b):
        # Transposing keeps the inner loop over the shorter sequence cheap;
        # swap the ins/del roles back afterwards.
        stats = levenshtein(b, a)
        return EditStats(stats.substitutions, stats.deletions,
                         stats.insertions, len(a))

    # prev[j] = (distance, subs, ins, dels) for a[:i] -> b[:j]
    prev = [(j, 0, j, 0) for j in range(len(b) + 1)]
    for i, token_a in enumerate(a, start=1):
        cur = [(i, 0, 0, i)]
        for j, token_b in enumerate(b, start=1):
            if token_a == token_b:
                cur.append(prev[j - 1])
                continue
            sub = prev[j - 1]
            dele = prev[j]
            ins = cur[j - 1]
            best = min(sub[0], dele[0], ins[0])
            if sub[0] == best:
                cur.append((sub[0] + 1, sub[1] + 1, sub[2], sub[3]))
            elif dele[0] == best:
                cur.append((dele[0] + 1, dele[1], dele[2], dele[3] + 1))
            else:
                cur.append((ins[0] + 1, ins[1], ins[2] + 1, ins[3]))
        prev = cur
    distance, subs, ins, dels = prev[len(b)]
    assert subs + ins + dels == distance
    return EditStats(subs, ins, dels, len(a))


def _word_stats(reference: str, hypothesis: str) -> EditStats:
    ref_words = reference.split()
    if not ref_words:
        raise ValueError("WER undefined: reference contains no words")
    return levenshtein(ref_words, hypothesis.split())


def _char_stats(reference: str, hypothesis: str) -> EditStats:
    # Characters include spaces; runs of whitespace count once, matching
    # the word splitting above.
    ref = " ".join(reference.split())
    hyp = " ".join(hypothesis.split())
    if not ref:
        raise ValueError("CER undefined: reference is empty")
    return levenshtein(ref, hyp)


def wer(reference: str, hypothesis: str) -> float:
    """Word error rate in percent, words split on whitespace runs.

    Raises:
        ValueError: If the reference has no words.
    """
    return _word_stats(reference, hypothesis).error_rate()


def cer(reference: str, hypothesis: str) -> float:
    """Character error rate in percent over whitespace-collapsed text.

    Raises:
        ValueError: If the reference is empty.
    """
    return _char_stats(reference, hypothesis).error_rate()


def corpus_error_rate(pairs: Iterable, level: str = "word") -> float:
    """Pooled corpus error rate: 100 * sum(distances) / sum(reference lengths).

    Pooling (rather than averaging per-utterance rates) weights every
    reference token equally, the standard ASR convention.

    Args:
        pairs: Objects with ``reference`` and ``hypothesis`` text attributes
            (e.g. :class:`semetrics.corpus.EvalPair`).
        level: "word" or "char".
    """
    if level not in ("word", "char"):
        raise ValueError(f"level must be 'word' or 'char', got {level!r}")
    stats_fn = _word_stats if level == "word" else _char_stats
    total_distance = 0
    total_length = 0
    n = 0
    for pair in pairs:
        stats = stats_fn(pair.reference, pair.hypothesis)
        total_distance += stats.distance
        total_length += stats.reference_length
        n += 1
    if n == 0:
        raise ValueError("corpus error rate undefined for an empty corpus")
    return 100.0 * total_distance / total_length
