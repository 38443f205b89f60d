"""Evaluation-text normalization for German ASR transcripts.

Maps transcripts to a restricted character set (lowercase a-z, umlauts and
spaces by default), removes punctuation and spells digit sequences out as
German cardinals, so that error-rate metrics compare spoken content rather
than orthography.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field

from sklearn.base import BaseEstimator, TransformerMixin

__all__ = [
    "GERMAN_EVAL_CHARSET",
    "MAX_SPELLABLE",
    "NormalizationConfig",
    "TextNormalizer",
    "normalize",
    "normalize_with_warnings",
    "spell_number_de",
]

#: Characters kept by the default evaluation config: a-z, ä, ö, ü and space.
GERMAN_EVAL_CHARSET = frozenset("abcdefghijklmnopqrstuvwxyzäöü ")

#: Largest integer spell_number_de accepts.
MAX_SPELLABLE = 999_999

_UNITS = ["null", "eins", "zwei", "drei", "vier", "fünf", "sechs", "sieben", "acht", "neun"]
_TEENS = ["zehn", "elf", "zwölf", "dreizehn", "vierzehn", "fünfzehn",
          "sechzehn", "siebzehn", "achtzehn", "neunzehn"]
_TENS = [None, None, "zwanzig", "dreißig", "vierzig", "fünfzig",
         "sechzig", "siebzig", "achtzig", "neunzig"]

# Digit runs joined by . or , with digits on both sides (decimals, dates,
# clock times) have no defined cardinal reading; their digits pass through
# unspelled and a warning is recorded.
_NUMERIC_CLUSTER = re.compile(r"\d+(?:[.,]\d+)+")
_DIGIT_RUN = re.compile(r"\d+")


def spell_number_de(n: int) -> str:
    """Spell a non-negative integer as a German cardinal number word.

    Uses standard compound spelling (units and tens fused, e.g.
    ``52 -> "zweiundfünfzig"``, ``101 -> "einhunderteins"``). The result is
    a single lowercase word; note that multiples of 30 contain "ß".

    Args:
        n: Integer in [0, 999999].

    Raises:
        ValueError: If n is negative, non-integral or above 999999.
    """
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError(f"expected an integer, got {type(n).__name__}")
    if n < 0 or n > MAX_SPELLABLE:
        raise ValueError(f"number out of spellable range [0, {MAX_SPELLABLE}]: {n}")
    if n == 0:
        return "null"
    thousands, rest = divmod(n, 1000)
    word = ""
    if thousands:
        word += _spell_below_1000(thousands, final=False) + "tausend"
    if rest:
        word += _spell_below_1000(rest, final=True)
    return word


def _spell_below_1000(n: int, final: bool) -> str:
    hundreds, rest = divmod(n, 100)
    word = ""
    if hundreds:
        word += ("ein" if hundreds == 1 else _UNITS[hundreds]) + "hundert"
    if rest:
        word += _spell_below_100(rest, final)
    return word


def _spell_below_100(n: int, final: bool) -> str:
    # "eins" only in word-final position ("einhunderteins" but "eintausend").
    if n == 1:
        return "eins" if final else "ein"
    if n < 10:
        return _UNITS[n]
    if n < 20:
        return _TEENS[n - 10]
    tens, unit = divmod(n, 10)
    if unit == 0:
        return _TENS[tens]
    return ("ein" if unit == 1 else _UNITS[unit]) + "und" + _TENS[tens]


@dataclass(frozen=True)
class NormalizationConfig:
    """Knobs of the normalization pipeline.

    The default configuration is the German evaluation convention:
    lowercase, keep only a-z/ä/ö/ü/space, spell numbers out, collapse
    whitespace. ``allowed_charset=None`` disables character filtering
    entirely; with every flag disabled normalization is the identity.

    Attributes:
        lowercase: Lowercase the text first.
        allowed_charset: Characters kept in the output (must include the
            space character), or None for no restriction.
        spell_numbers: Replace integer digit runs with German cardinals.
        collapse_whitespace: Collapse whitespace runs and strip the ends.
    """

    lowercase: bool = True
    allowed_charset: frozenset[str] | None = field(default=GERMAN_EVAL_CHARSET)
    spell_numbers: bool = True
    collapse_whitespace: bool = True

    def __post_init__(self) -> None:
        if self.allowed_charset is not None:
            charset = frozenset(self.allowed_charset)
            if " " not in charset:
                raise ValueError("allowed_charset must contain the space character")
            object.__setattr__(self, "allowed_charset", charset)

    @classmethod
    def identity(cls) -> "NormalizationConfig":
        """Config under which normalize(text) == text for every text."""
        return cls(lowercase=False, allowed_charset=None,
                   spell_numbers=False, collapse_whitespace=False)


def normalize_with_warnings(text: str, config: NormalizationConfig | None = None) -> tuple[str, int]:
    """Normalize text and count numerals that could not be spelled out.

    Returns:
        (normalized text, number of digit runs left unspelled). Unspelled
        runs are out-of-range integers or decimal/date-like clusters; their
        digits survive to the charset filter, which drops them under the
        default config.
    """
    if config is None:
        config = NormalizationConfig()
    warnings = 0

    if config.allowed_charset is not None:
        # Canonical composition so "ä" matches the charset in either
        # encoding form. Skipped when no filtering happens, keeping the
        # identity config an exact identity.
        text = unicodedata.normalize("NFC", text)

    if config.lowercase:
        text = text.lower()

    if config.spell_numbers:
        def _skip_cluster(match: re.Match[str]) -> str:
            nonlocal warnings
            warnings += 1
            return match.group()

        def _spell_run(match: re.Match[str]) -> str:
            nonlocal warnings
            value = int(match.group())
            if value > MAX_SPELLABLE:
                warnings += 1
                return match.group()
            return spell_number_de(value)

        # Two passes: mark unspellable clusters first so their digit runs
        # are not spelled piecewise, then spell the plain runs.
        pieces: list[str] = []
        last = 0
        for cluster in _NUMERIC_CLUSTER.finditer(text):
            pieces.append(_DIGIT_RUN.sub(_spell_run, text[last:cluster.start()]))
            pieces.append(_skip_cluster(cluster))
            last = cluster.end()
        pieces.append(_DIGIT_RUN.sub(_spell_run, text[last:]))
        text = "".join(pieces)

    if config.allowed_charset is not None:
        charset = config.allowed_charset
        if "ß" not in charset:
            # Swiss High German writes ss; dropping ß would corrupt words.
            text = text.replace("ß", "ss")
        # Disallowed whitespace degrades to the (always allowed) space;
        # anything else unmappable is dropped.
        text = "".join(
            ch if ch in charset else " " if ch.isspace() else ""
            for ch in text
        )

    if config.collapse_whitespace:
        text = re.sub(r"\s+", " ", text).strip()

    return text, warnings


def normalize(text: str, config: NormalizationConfig | None = None) -> str:
    """Normalize one text under the given config (default: German eval rules).

    Total function: never raises on text content; unmappable characters are
    dropped. Idempotent for any fixed config.
    """
    return normalize_with_warnings(text, config)[0]


class TextNormalizer(BaseEstimator, TransformerMixin):
    """Stateless sklearn-style transformer over sequences of strings.

    Wraps :func:`normalize` so normalization slots into sklearn pipelines
    ahead of vectorizers or encoders. ``fit`` is a no-op.

    >>> TextNormalizer().transform(["Hallo, Welt!"])
    ['hallo welt']
    """

    def __init__(self, lowercase: bool = True,
                 allowed_charset: frozenset[str] | None = GERMAN_EVAL_CHARSET,
                 spell_numbers: bool = True,
                 collapse_whitespace: bool = True):
        self.lowercase = lowercase
        self.allowed_charset = allowed_charset
        self.spell_numbers = spell_numbers
        self.collapse_whitespace = collapse_whitespace

    def _config(self) -> NormalizationConfig:
        return NormalizationConfig(
            lowercase=self.lowercase,
            allowed_charset=self.allowed_charset,
            spell_numbers=self.spell_numbers,
            collapse_whitespace=self.collapse_whitespace,
        )

    def fit(self, X, y=None):  # noqa: N803 - sklearn signature
        self._config()  # validate parameters
        return self

    def transform(self, X) -> list[str]:  # noqa: N803 - sklearn signature
        config = self._config()
        return [normalize(text, config) for text in X]
