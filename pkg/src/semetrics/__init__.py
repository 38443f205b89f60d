"""Semantic-aware ASR evaluation toolkit.

Classical transcript metrics (WER, CER, BLEU), an embedding-based semantic
distance with pluggable sentence-embedding providers, the combined
training-loss family built on both, a reproducible German normalization
pipeline, and corpus-level reporting with correlation statistics.
"""

from ._version import __version__
from .bleu import BleuConfig, corpus_bleu, sentence_bleu
from .corpus import (
    CorpusFormatError,
    EvalPair,
    group_by,
    load_corpus,
    save_corpus,
    split_corpus,
)
from .edit import EditStats, cer, corpus_error_rate, levenshtein, wer
from .embedders import (
    CachedSentenceEncoder,
    CacheCorruptError,
    CacheMissError,
    EmbeddingError,
    HashingSentenceEncoder,
    RemoteRequestError,
    RemoteSentenceEncoder,
    RemoteUnavailableError,
    embed,
    test_hash_embed,
)
from .losses import (
    LossParams,
    cross_entropy,
    sem_dist_grad,
    semantic_loss,
    semantix_prod,
    semantix_sum,
)
from .normalize import (
    GERMAN_EVAL_CHARSET,
    NormalizationConfig,
    TextNormalizer,
    normalize,
    normalize_with_warnings,
    spell_number_de,
)
from .report import (
    CorpusMetrics,
    CorrelationEntry,
    MetricReport,
    PairMetrics,
    ReportError,
    build_report,
    pearson_with_p,
    render_text,
    report_to_dict,
)
from .semdist import sem_dist

__all__ = [
    "__version__",
    "BleuConfig", "sentence_bleu", "corpus_bleu",
    "EvalPair", "CorpusFormatError", "load_corpus", "save_corpus",
    "group_by", "split_corpus",
    "EditStats", "levenshtein", "wer", "cer", "corpus_error_rate",
    "EmbeddingError", "RemoteRequestError", "RemoteUnavailableError",
    "CacheCorruptError", "CacheMissError",
    "HashingSentenceEncoder", "CachedSentenceEncoder", "RemoteSentenceEncoder",
    "embed", "test_hash_embed",
    "LossParams", "cross_entropy", "semantic_loss",
    "semantix_sum", "semantix_prod", "sem_dist_grad",
    "GERMAN_EVAL_CHARSET", "NormalizationConfig", "TextNormalizer",
    "normalize", "normalize_with_warnings", "spell_number_de",
    "MetricReport", "PairMetrics", "CorpusMetrics", "CorrelationEntry",
    "ReportError", "build_report", "pearson_with_p",
    "render_text", "report_to_dict",
    "sem_dist",
]
