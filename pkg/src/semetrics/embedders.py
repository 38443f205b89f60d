"""Sentence-embedding providers behind a common sklearn transformer surface.

Three interchangeable backends:

* :class:`HashingSentenceEncoder` - deterministic, dependency-free test
  embedder (character 3-grams hashed into a 256-dim count vector).
* :class:`RemoteSentenceEncoder` - client for the HTTP embedding service
  (``POST /embed`` with ``{"texts": [...]}``).
* :class:`CachedSentenceEncoder` - persistent binary cache, optionally
  wrapping another provider for misses.

Every provider is deterministic: the same text maps to the same vector
within one provider instance. ``transform(texts)`` returns one row per
input text, in input order.
"""

from __future__ import annotations

import json
import os
import struct
import threading
import time
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

__all__ = [
    "EmbeddingError",
    "RemoteRequestError",
    "RemoteUnavailableError",
    "CacheCorruptError",
    "CacheMissError",
    "HashingSentenceEncoder",
    "RemoteSentenceEncoder",
    "CachedSentenceEncoder",
    "embed",
    "test_hash_embed",
    "fnv1a64",
]

CACHE_MAGIC = b"SMXE"
CACHE_VERSION = 1
_HEADER_FIXED = struct.Struct("<4sII")  # magic, version, provider-name length
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_FNV_MASK = 0xFFFFFFFFFFFFFFFF

HASH_DIM = 256


class EmbeddingError(Exception):
    """Base class for provider failures."""


class RemoteUnavailableError(EmbeddingError):
    """Transient failure (network, 5xx); the request may be retried."""


class RemoteRequestError(EmbeddingError):
    """Permanent failure (bad request or protocol violation); do not retry."""


class CacheCorruptError(EmbeddingError):
    """The cache file cannot be parsed; the message names the file."""


class CacheMissError(EmbeddingError):
    """A text is absent from a cache that has no backing provider."""


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash (the fixed hash of the cache and test embedder)."""
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _FNV_MASK
    return h


def test_hash_embed(text: str) -> np.ndarray:
    """Deterministic stand-in embedding: hashed character 3-grams.

    Every character 3-gram of the text (including spaces) is hashed with
    64-bit FNV-1a over its UTF-8 bytes and counted into bucket
    ``hash % 256``; the count vector is L2-normalized. Texts shorter than
    3 characters have no 3-grams and map to the first basis vector.
    """
    counts = np.zeros(HASH_DIM, dtype=np.float64)
    for i in range(len(text) - 2):
        counts[fnv1a64(text[i:i + 3].encode("utf-8")) % HASH_DIM] += 1.0
    norm = np.linalg.norm(counts)
    if norm == 0.0:
        counts[0] = 1.0
        return counts
    return counts / norm


class HashingSentenceEncoder(BaseEstimator, TransformerMixin):
    """Offline test embedder; see :func:`test_hash_embed`.

    Stable across runs and platforms, so frozen test vectors and cache
    files remain valid anywhere.
    """

    name = "test-hash"

    @property
    def dim(self) -> int:
        return HASH_DIM

    def fit(self, X, y=None):
        return self

    def transform(self, X: Sequence[str]) -> np.ndarray:
        return np.stack([test_hash_embed(text) for text in X])


class RemoteSentenceEncoder(BaseEstimator, TransformerMixin):
    """Client for the embedding service protocol.

    Sends ``POST {base_url}/embed`` with JSON ``{"texts": [...]}`` and
    expects ``{"dim": int, "embeddings": [[...], ...]}`` in request order.
    Large inputs are chunked into batches of ``batch_size`` texts with at
    most ``max_in_flight`` requests outstanding. Connection errors and 5xx
    responses are retried ``retries`` times with exponential backoff, then
    surface as :class:`RemoteUnavailableError`; 4xx responses raise
    :class:`RemoteRequestError` immediately.
    """

    def __init__(self, base_url: str, batch_size: int = 64, max_in_flight: int = 4,
                 timeout: float = 30.0, retries: int = 2, backoff: float = 0.25,
                 name: str | None = None):
        self.base_url = base_url
        self.batch_size = batch_size
        self.max_in_flight = max_in_flight
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.name = name if name is not None else base_url
        self._dim: int | None = None

    @property
    def dim(self) -> int:
        if self._dim is None:
            raise EmbeddingError("remote dimension unknown before the first request")
        return self._dim

    def fit(self, X, y=None):
        return self

    def _post_batch(self, texts: list[str]) -> np.ndarray:
        url = self.base_url.rstrip("/") + "/embed"
        body = json.dumps({"texts": texts}).encode("utf-8")
        request = urllib.request.Request(
            url, data=body, headers={"Content-Type": "application/json"}, method="POST"
        )
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            try:
                with urllib.request.urlopen(request, timeout=self.timeout) as response:
                    payload = json.loads(response.read().decode("utf-8"))
                return self._parse_payload(payload, len(texts))
            except urllib.error.HTTPError as err:
                detail = self._error_detail(err)
                if 400 <= err.code < 500:
                    raise RemoteRequestError(
                        f"embedding service rejected the request ({err.code}): {detail}"
                    ) from err
                last_error = err
            except (urllib.error.URLError, TimeoutError, ConnectionError, OSError) as err:
                last_error = err
        raise RemoteUnavailableError(
            f"embedding service unreachable at {self.base_url}: {last_error}"
        ) from last_error

    @staticmethod
    def _error_detail(err: urllib.error.HTTPError) -> str:
        try:
            return json.loads(err.read().decode("utf-8")).get("error", str(err))
        except Exception:
            return str(err)

    def _parse_payload(self, payload, expected: int) -> np.ndarray:
        try:
            dim = int(payload["dim"])
            rows = payload["embeddings"]
        except (TypeError, KeyError, ValueError) as err:
            raise RemoteRequestError(f"malformed embedding response: {err}") from err
        if len(rows) != expected:
            raise RemoteRequestError(
                f"embedding count mismatch: sent {expected} texts, got {len(rows)} vectors"
            )
        matrix = np.asarray(rows, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] != dim:
            raise RemoteRequestError("embedding rows do not match the declared dimension")
        if self._dim is None:
            self._dim = dim
        elif self._dim != dim:
            raise RemoteRequestError(
                f"embedding dimension changed mid-session: {self._dim} -> {dim}"
            )
        return matrix

    def transform(self, X: Sequence[str]) -> np.ndarray:
        texts = list(X)
        if not texts:
            return np.empty((0, self._dim or 0), dtype=np.float64)
        batches = [texts[i:i + self.batch_size] for i in range(0, len(texts), self.batch_size)]
        if len(batches) == 1:
            return self._post_batch(batches[0])
        with ThreadPoolExecutor(max_workers=max(1, self.max_in_flight)) as pool:
            results = list(pool.map(self._post_batch, batches))
        return np.vstack(results)


class CachedSentenceEncoder(BaseEstimator, TransformerMixin):
    """Persistent embedding cache, optionally backed by another provider.

    Vectors are stored as float32 in a binary file (see
    :func:`read_cache_file` for the exact layout) keyed by the exact text.
    Texts missing from the cache are fetched from ``base`` and appended;
    without a base provider a miss raises :class:`CacheMissError`.
    Record appends are serialized through a lock and flushed one record at
    a time, so a run interrupted between records leaves a valid cache.
    """

    def __init__(self, cache_path: str, base=None):
        self.cache_path = cache_path
        self.base = base
        self._lock = threading.Lock()
        self._entries: dict[str, np.ndarray] = {}
        self._name: str | None = None
        self._dim: int | None = None
        if os.path.exists(cache_path) and os.path.getsize(cache_path) > 0:
            self._name, self._dim, self._entries = read_cache_file(cache_path)
            if base is not None and getattr(base, "name", self._name) != self._name:
                raise EmbeddingError(
                    f"cache {cache_path!r} was written by provider {self._name!r}, "
                    f"not {base.name!r}"
                )

    @property
    def name(self) -> str:
        if self._name is not None:
            return self._name
        if self.base is not None:
            return self.base.name
        raise EmbeddingError("empty cache has no provider name")

    @property
    def dim(self) -> int:
        if self._dim is not None:
            return self._dim
        if self.base is not None:
            return self.base.dim
        raise EmbeddingError("empty cache has no dimension")

    def __contains__(self, text: str) -> bool:
        return text in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def fit(self, X, y=None):
        return self

    def transform(self, X: Sequence[str]) -> np.ndarray:
        texts = list(X)
        missing = sorted({t for t in texts if t not in self._entries})
        if missing:
            if self.base is None:
                raise CacheMissError(
                    f"{len(missing)} text(s) not present in cache {self.cache_path!r} "
                    "and no backing provider configured"
                )
            fetched = np.asarray(self.base.transform(missing), dtype=np.float64)
            self._append(missing, fetched)
        rows = [self._entries[t] for t in texts]
        return np.stack(rows) if rows else np.empty((0, self._dim or 0))

    def _append(self, texts: list[str], vectors: np.ndarray) -> None:
        with self._lock:
            created = self._dim is None
            if created:
                self._name = self.base.name
                self._dim = int(vectors.shape[1])
            with open(self.cache_path, "ab") as fh:
                if created and fh.tell() == 0:
                    fh.write(_encode_header(self._name, self._dim))
                for text, vector in zip(texts, vectors):
                    # One write per record keeps partially-written caches
                    # impossible under normal interruption between texts.
                    fh.write(_encode_record(text, vector))
                    fh.flush()
                    self._entries[text] = vector.astype(np.float32).astype(np.float64)


def _encode_header(name: str, dim: int) -> bytes:
    name_bytes = name.encode("utf-8")
    return _HEADER_FIXED.pack(CACHE_MAGIC, CACHE_VERSION, len(name_bytes)) + name_bytes + _U32.pack(dim)


def _encode_record(text: str, vector: np.ndarray) -> bytes:
    text_bytes = text.encode("utf-8")
    payload = vector.astype("<f4").tobytes()
    return _U64.pack(fnv1a64(text_bytes)) + _U32.pack(len(text_bytes)) + text_bytes + payload


def read_cache_file(path: str) -> tuple[str, int, dict[str, np.ndarray]]:
    """Parse a cache file into (provider name, dim, text -> float64 vector).

    Layout (all integers little-endian): magic ``SMXE``, u32 version,
    u32 name length, name bytes (UTF-8), u32 dim; then records of
    u64 FNV-1a text hash, u32 text length, text bytes, dim float32 values.

    Raises:
        CacheCorruptError: On any structural violation, naming the file.
    """
    def corrupt(reason: str) -> CacheCorruptError:
        return CacheCorruptError(f"embedding cache {path!r} is corrupt: {reason}")

    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER_FIXED.size:
        raise corrupt("truncated header")
    magic, version, name_len = _HEADER_FIXED.unpack_from(data, 0)
    if magic != CACHE_MAGIC:
        raise corrupt(f"bad magic {magic!r}")
    if version != CACHE_VERSION:
        raise corrupt(f"unsupported version {version}")
    offset = _HEADER_FIXED.size
    if len(data) < offset + name_len + _U32.size:
        raise corrupt("truncated provider name")
    name = data[offset:offset + name_len].decode("utf-8")
    offset += name_len
    (dim,) = _U32.unpack_from(data, offset)
    offset += _U32.size
    if dim == 0:
        raise corrupt("dimension 0")

    entries: dict[str, np.ndarray] = {}
    record_tail = 4 * dim
    while offset < len(data):
        if len(data) < offset + _U64.size + _U32.size:
            raise corrupt(f"truncated record at byte {offset}")
        (text_hash,) = _U64.unpack_from(data, offset)
        offset += _U64.size
        (text_len,) = _U32.unpack_from(data, offset)
        offset += _U32.size
        if len(data) < offset + text_len + record_tail:
            raise corrupt(f"truncated record at byte {offset}")
        text = data[offset:offset + text_len].decode("utf-8")
        offset += text_len
        if fnv1a64(text.encode("utf-8")) != text_hash:
            raise corrupt(f"hash mismatch for text {text[:40]!r}")
        vector = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).astype(np.float64)
        offset += record_tail
        entries[text] = vector
    return name, dim, entries


def embed(texts: Sequence[str], provider) -> np.ndarray:
    """Embed texts through any provider, one row per text in input order.

    Raises:
        ValueError: If ``texts`` is empty or a provider returns a zero vector.
    """
    texts = list(texts)
    if not texts:
        raise ValueError("embed requires at least one text")
    matrix = np.asarray(provider.transform(texts), dtype=np.float64)
    if matrix.shape[0] != len(texts):
        raise EmbeddingError(
            f"provider returned {matrix.shape[0]} vectors for {len(texts)} texts"
        )
    zero_rows = np.flatnonzero(~matrix.any(axis=1))
    if zero_rows.size:
        raise ValueError(f"provider returned a zero vector for text index {zero_rows[0]}")
    return matrix
