"""Corpus-level metric reports and correlation analysis.

:func:`build_report` computes the requested per-pair metrics, pools them
into corpus blocks (optionally per group) and correlates every pair of
computed metrics. Reports serialize deterministically: fixed key order,
floats at 6 significant digits, no timestamps, so identical inputs yield
byte-identical files.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.special import betainc

from ._version import __version__ as _version
from .bleu import BleuConfig, corpus_bleu, sentence_bleu
from .corpus import EvalPair, group_by
from .edit import EditStats, levenshtein
from .normalize import NormalizationConfig, normalize_with_warnings
from .semdist import sem_dist

__all__ = [
    "KNOWN_METRICS",
    "PairMetrics",
    "CorpusMetrics",
    "CorrelationEntry",
    "MetricReport",
    "ReportError",
    "build_report",
    "pearson_with_p",
    "report_to_dict",
    "render_text",
]

KNOWN_METRICS = ("wer", "cer", "bleu", "semdist")


class ReportError(ValueError):
    """Per-pair metric failure; the message names the offending pair id."""


@dataclass(frozen=True)
class PairMetrics:
    """Metric values for one utterance pair.

    Unrequested metrics are None. Edit counts and reference lengths are
    kept alongside the rates so corpus pooling is recomputable from
    per-pair data (corpus BLEU is the documented exception: pooled n-gram
    counts cannot be reconstructed from per-pair scores).
    """

    id: str
    wer: float | None = None
    cer: float | None = None
    bleu_sentence: float | None = None
    semdist: float | None = None
    semdist_x100: float | None = None
    word_edits: int | None = None
    word_count: int | None = None
    char_edits: int | None = None
    char_count: int | None = None


@dataclass(frozen=True)
class CorpusMetrics:
    """Pooled corpus block: WER/CER pooled over edits, mean semantic distance."""

    pairs: int
    wer: float | None = None
    cer: float | None = None
    bleu_corpus: float | None = None
    mean_semdist: float | None = None
    mean_semdist_x100: float | None = None


@dataclass(frozen=True)
class CorrelationEntry:
    metric_a: str
    metric_b: str
    pearson_r: float
    p_value: float
    n: int
    significant: bool


@dataclass(frozen=True)
class MetricReport:
    metadata: dict
    per_pair: list[PairMetrics]
    corpus: CorpusMetrics
    groups: dict[str, CorpusMetrics] | None
    correlations: list[CorrelationEntry] = field(default_factory=list)


def pearson_with_p(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Pearson r with a two-sided p-value from the Student-t statistic.

    The statistic ``t = r * sqrt((n-2) / (1-r^2))`` is referred to a
    t distribution with n-2 degrees of freedom; the two-sided tail equals
    the regularized incomplete beta ``I_{nu/(nu+t^2)}(nu/2, 1/2)``.

    Raises:
        ValueError: If lengths differ, n < 3, or either input has zero
            variance (correlation undefined).
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"inputs must be equal-length 1-D sequences, got {x.shape} vs {y.shape}")
    n = x.size
    if n < 3:
        raise ValueError(f"need at least 3 points, got {n}")
    xc = x - x.mean()
    yc = y - y.mean()
    sx = float(xc @ xc)
    sy = float(yc @ yc)
    if sx == 0.0 or sy == 0.0:
        raise ValueError("correlation undefined: an input has zero variance")
    r = float(xc @ yc) / math.sqrt(sx * sy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    nu = n - 2
    t_squared = r * r * nu / (1.0 - r * r)
    p = float(betainc(nu / 2.0, 0.5, nu / (nu + t_squared)))
    return r, p


@dataclass
class _Texts:
    reference: str
    hypothesis: str


def build_report(
    pairs: Sequence[EvalPair],
    metrics: Sequence[str] = KNOWN_METRICS,
    provider=None,
    normalization: NormalizationConfig | None = None,
    group_key: str | None = None,
    bleu_config: BleuConfig | None = None,
    significance: float = 0.05,
    corpus_path: str | None = None,
    jobs: int = 1,
) -> MetricReport:
    """Compute a full metric report over a corpus.

    WER/CER/BLEU are computed on normalized text when ``normalization`` is
    given, on raw text otherwise. The semantic distance is always computed
    on raw text: the embedding model consumes natural sentences, where
    casing and punctuation carry meaning. Both choices are stamped into
    the report metadata.

    Args:
        pairs: Non-empty corpus.
        metrics: Subset of ``("wer", "cer", "bleu", "semdist")``.
        provider: Embedding provider; required iff "semdist" is requested.
        normalization: Normalization config for the error-rate metrics, or
            None to score raw text.
        group_key: Optional "dialect" or "dataset" for per-group blocks.
        significance: p-value threshold recorded on correlation entries.
        jobs: Worker threads for per-pair metric computation; results are
            ordered by input index regardless.

    Raises:
        ReportError: On a per-pair metric failure, naming the pair id.
        ValueError: On empty corpus or inconsistent arguments. Provider
            failures propagate as :class:`semetrics.embedders.EmbeddingError`.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("cannot build a report over an empty corpus")
    metrics = list(dict.fromkeys(metrics))
    unknown = [m for m in metrics if m not in KNOWN_METRICS]
    if unknown:
        raise ValueError(f"unknown metrics: {unknown}; choose from {KNOWN_METRICS}")
    if not metrics:
        raise ValueError("at least one metric must be requested")
    if ("semdist" in metrics) != (provider is not None):
        raise ValueError("an embedding provider is required iff 'semdist' is requested")
    if bleu_config is None:
        bleu_config = BleuConfig()

    norm_warnings = 0
    effective: list[_Texts] = []
    for pair in pairs:
        if normalization is not None:
            ref, w_ref = normalize_with_warnings(pair.reference, normalization)
            hyp, w_hyp = normalize_with_warnings(pair.hypothesis, normalization)
            norm_warnings += w_ref + w_hyp
            effective.append(_Texts(ref, hyp))
        else:
            effective.append(_Texts(pair.reference, pair.hypothesis))

    distances: list[float | None] = [None] * len(pairs)
    if "semdist" in metrics:
        texts = [p.reference for p in pairs] + [p.hypothesis for p in pairs]
        vectors = np.asarray(provider.transform(texts), dtype=np.float64)
        if vectors.shape[0] != len(texts):
            raise ReportError(
                f"provider returned {vectors.shape[0]} vectors for {len(texts)} texts"
            )
        for i, pair in enumerate(pairs):
            try:
                distances[i] = sem_dist(vectors[i], vectors[len(pairs) + i])
            except ValueError as err:
                raise ReportError(f"pair {pair.id!r}: semdist failed: {err}") from err

    def compute_one(index: int) -> PairMetrics:
        pair = pairs[index]
        texts = effective[index]
        values: dict = {"id": pair.id}
        try:
            if "wer" in metrics:
                stats = _split_stats(texts, level="word")
                values.update(wer=stats.error_rate(), word_edits=stats.distance,
                              word_count=stats.reference_length)
            if "cer" in metrics:
                stats = _split_stats(texts, level="char")
                values.update(cer=stats.error_rate(), char_edits=stats.distance,
                              char_count=stats.reference_length)
            if "bleu" in metrics:
                values["bleu_sentence"] = sentence_bleu(
                    texts.reference, texts.hypothesis, bleu_config)
        except ValueError as err:
            raise ReportError(f"pair {pair.id!r}: {err}") from err
        if distances[index] is not None:
            values["semdist"] = distances[index]
            values["semdist_x100"] = 100.0 * distances[index]
        return PairMetrics(**values)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_pair = list(pool.map(compute_one, range(len(pairs))))
    else:
        per_pair = [compute_one(i) for i in range(len(pairs))]

    corpus_block = _pool(per_pair, [effective[i] for i in range(len(pairs))],
                         metrics, bleu_config)

    groups_block: dict[str, CorpusMetrics] | None = None
    if group_key is not None:
        index_of = {id(p): i for i, p in enumerate(pairs)}
        groups_block = {}
        for value, members in sorted(group_by(pairs, group_key).items()):
            idx = [index_of[id(p)] for p in members]
            groups_block[value] = _pool([per_pair[i] for i in idx],
                                        [effective[i] for i in idx],
                                        metrics, bleu_config)

    correlations = _correlate(per_pair, metrics, significance)

    metadata = {
        "tool": "semetrics",
        "version": _version,
        "metrics": metrics,
        "normalize": _normalization_metadata(normalization),
        "semdist_text": "raw",
        "normalizer_warnings": norm_warnings,
        "embedder": _provider_metadata(provider),
        "correlation": {
            "method": "pearson",
            "p_value": "two-sided t-test",
            "significance_threshold": significance,
        },
        "group_by": group_key,
        "corpus_path": corpus_path,
        "pairs": len(pairs),
    }
    return MetricReport(metadata=metadata, per_pair=per_pair, corpus=corpus_block,
                        groups=groups_block, correlations=correlations)


def _split_stats(texts: _Texts, level: str) -> EditStats:
    if level == "word":
        ref = texts.reference.split()
        if not ref:
            raise ValueError("reference contains no words (empty after normalization?)")
        return levenshtein(ref, texts.hypothesis.split())
    ref = " ".join(texts.reference.split())
    if not ref:
        raise ValueError("reference is empty (after normalization?)")
    return levenshtein(ref, " ".join(texts.hypothesis.split()))


def _pool(per_pair: list[PairMetrics], effective: list[_Texts],
          metrics: list[str], bleu_config: BleuConfig) -> CorpusMetrics:
    values: dict = {"pairs": len(per_pair)}
    if "wer" in metrics:
        values["wer"] = 100.0 * sum(p.word_edits for p in per_pair) \
            / sum(p.word_count for p in per_pair)
    if "cer" in metrics:
        values["cer"] = 100.0 * sum(p.char_edits for p in per_pair) \
            / sum(p.char_count for p in per_pair)
    if "bleu" in metrics:
        values["bleu_corpus"] = corpus_bleu(effective, bleu_config)
    if "semdist" in metrics:
        mean = float(np.mean([p.semdist for p in per_pair]))
        values["mean_semdist"] = mean
        values["mean_semdist_x100"] = 100.0 * mean
    return CorpusMetrics(**values)


def _correlate(per_pair: list[PairMetrics], metrics: list[str],
               significance: float) -> list[CorrelationEntry]:
    columns = {
        "wer": [p.wer for p in per_pair],
        "cer": [p.cer for p in per_pair],
        "bleu": [p.bleu_sentence for p in per_pair],
        "semdist": [p.semdist for p in per_pair],
    }
    out: list[CorrelationEntry] = []
    present = [m for m in KNOWN_METRICS if m in metrics]
    for a, b in combinations(present, 2):
        try:
            r, p = pearson_with_p(columns[a], columns[b])
        except ValueError:
            continue  # fewer than 3 pairs or a constant column: no entry
        out.append(CorrelationEntry(metric_a=a, metric_b=b, pearson_r=r,
                                    p_value=p, n=len(per_pair),
                                    significant=p < significance))
    return out


def _normalization_metadata(config: NormalizationConfig | None):
    if config is None:
        return "off"
    return {
        "lowercase": config.lowercase,
        "allowed_charset": (
            None if config.allowed_charset is None
            else "".join(sorted(config.allowed_charset))
        ),
        "spell_numbers": config.spell_numbers,
        "collapse_whitespace": config.collapse_whitespace,
    }


def _provider_metadata(provider):
    if provider is None:
        return None
    try:
        dim = provider.dim
    except Exception:
        dim = None
    return {"name": getattr(provider, "name", provider.__class__.__name__), "dim": dim}


# -- serialization -----------------------------------------------------------

def _round6(value):
    if isinstance(value, float):
        return float(f"{value:.6g}")
    return value


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def report_to_dict(report: MetricReport) -> dict:
    """Report as JSON-ready primitives, floats at 6 significant digits."""
    def pair_dict(p: PairMetrics) -> dict:
        return {
            "id": p.id,
            "wer": _round6(p.wer), "cer": _round6(p.cer),
            "bleu_sentence": _round6(p.bleu_sentence),
            "semdist": _round6(p.semdist), "semdist_x100": _round6(p.semdist_x100),
            "word_edits": p.word_edits, "word_count": p.word_count,
            "char_edits": p.char_edits, "char_count": p.char_count,
        }

    def corpus_dict(c: CorpusMetrics) -> dict:
        return {
            "pairs": c.pairs,
            "wer": _round6(c.wer), "cer": _round6(c.cer),
            "bleu_corpus": _round6(c.bleu_corpus),
            "mean_semdist": _round6(c.mean_semdist),
            "mean_semdist_x100": _round6(c.mean_semdist_x100),
        }

    return {
        "metadata": report.metadata,
        "per_pair": [pair_dict(p) for p in report.per_pair],
        "corpus": corpus_dict(report.corpus),
        "groups": (None if report.groups is None
                   else {k: corpus_dict(v) for k, v in report.groups.items()}),
        "correlations": [
            {"metric_a": e.metric_a, "metric_b": e.metric_b,
             "pearson_r": _round6(e.pearson_r), "p_value": _round6(e.p_value),
             "n": e.n, "significant": e.significant}
            for e in report.correlations
        ],
    }


def render_text(report: MetricReport) -> str:
    """Human-readable aligned-column rendering of a report."""
    lines: list[str] = []
    meta = report.metadata
    lines.append(f"semetrics report  (pairs: {meta['pairs']}, metrics: {', '.join(meta['metrics'])})")
    norm = meta["normalize"]
    lines.append(f"normalize: {'off' if norm == 'off' else 'on'}    "
                 f"semdist text: {meta['semdist_text']}")
    if meta["embedder"]:
        lines.append(f"embedder: {meta['embedder']['name']} (dim {meta['embedder']['dim']})")
    if meta["normalizer_warnings"]:
        lines.append(f"unspelled numerals: {meta['normalizer_warnings']}")
    lines.append("")

    headers = ["id", "wer", "cer", "bleu", "semdist", "semdist_x100"]
    rows = [[p.id, _fmt(p.wer), _fmt(p.cer), _fmt(p.bleu_sentence),
             _fmt(p.semdist), _fmt(p.semdist_x100)] for p in report.per_pair]
    lines.extend(_table(headers, rows))

    lines.append("")
    lines.append("corpus:")
    lines.extend(_corpus_lines(report.corpus, indent="  "))

    if report.groups:
        lines.append("")
        lines.append(f"groups (by {meta['group_by']}):")
        for name, block in report.groups.items():
            lines.append(f"  {name}:")
            lines.extend(_corpus_lines(block, indent="    "))

    if report.correlations:
        lines.append("")
        threshold = meta["correlation"]["significance_threshold"]
        lines.append(f"correlations (pearson, two-sided p, alpha={_fmt(threshold)}):")
        for e in report.correlations:
            flag = "significant" if e.significant else "not significant"
            lines.append(f"  {e.metric_a} ~ {e.metric_b}: r={_fmt(e.pearson_r)} "
                         f"p={_fmt(e.p_value)} n={e.n} ({flag})")
    return "\n".join(lines) + "\n"


def _corpus_lines(block: CorpusMetrics, indent: str) -> list[str]:
    parts = []
    for label, value in (("wer", block.wer), ("cer", block.cer),
                         ("bleu", block.bleu_corpus),
                         ("mean semdist", block.mean_semdist),
                         ("mean semdist x100", block.mean_semdist_x100)):
        if value is not None:
            parts.append(f"{indent}{label}: {_fmt(value)}")
    parts.append(f"{indent}pairs: {block.pairs}")
    return parts


def _table(headers: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    def fmt_row(cells):
        return "  ".join(cell.ljust(width) for cell, width in zip(cells, widths)).rstrip()
    out = [fmt_row(headers)]
    out.append("  ".join("-" * w for w in widths))
    out.extend(fmt_row(r) for r in rows)
    return out
