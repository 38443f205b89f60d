"""Normalizer: German number spelling, charset filtering, idempotence."""

import random
import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semetrics import (
    GERMAN_EVAL_CHARSET,
    NormalizationConfig,
    TextNormalizer,
    normalize,
    normalize_with_warnings,
    spell_number_de,
)

# Cross-checked against a published German numeral table.
GERMAN_NUMBERS = {
    0: "null", 1: "eins", 2: "zwei", 3: "drei", 4: "vier", 5: "fünf",
    6: "sechs", 7: "sieben", 8: "acht", 9: "neun", 10: "zehn", 11: "elf",
    12: "zwölf", 13: "dreizehn", 14: "vierzehn", 15: "fünfzehn",
    16: "sechzehn", 17: "siebzehn", 18: "achtzehn", 19: "neunzehn",
    20: "zwanzig", 21: "einundzwanzig", 22: "zweiundzwanzig",
    30: "dreißig", 31: "einunddreißig", 40: "vierzig", 50: "fünfzig",
    52: "zweiundfünfzig", 60: "sechzig", 70: "siebzig", 80: "achtzig",
    90: "neunzig", 99: "neunundneunzig", 100: "einhundert",
    101: "einhunderteins", 110: "einhundertzehn", 111: "einhundertelf",
    121: "einhunderteinundzwanzig", 200: "zweihundert",
    345: "dreihundertfünfundvierzig", 999: "neunhundertneunundneunzig",
    1000: "eintausend", 1001: "eintausendeins", 1100: "eintausendeinhundert",
    2023: "zweitausenddreiundzwanzig",
    9999: "neuntausendneunhundertneunundneunzig", 10000: "zehntausend",
    52000: "zweiundfünfzigtausend", 100000: "einhunderttausend",
    101000: "einhunderteintausend",
    654321: "sechshundertvierundfünfzigtausenddreihunderteinundzwanzig",
    999999: "neunhundertneunundneunzigtausendneunhundertneunundneunzig",
}


@pytest.mark.parametrize("n,expected", sorted(GERMAN_NUMBERS.items()))
def test_spell_number_de_table(n, expected):
    assert spell_number_de(n) == expected


@pytest.mark.parametrize("bad", [-1, 1_000_000, 10**9])
def test_spell_number_de_range(bad):
    with pytest.raises(ValueError):
        spell_number_de(bad)


def test_spell_number_de_rejects_non_integers():
    with pytest.raises(ValueError):
        spell_number_de(1.5)
    with pytest.raises(ValueError):
        spell_number_de(True)


def test_spell_number_de_injective_full_enumeration():
    spellings = [spell_number_de(n) for n in range(10_000)]
    assert len(set(spellings)) == 10_000


def test_spell_number_de_injective_sampled_full_range():
    rng = random.Random(7)
    sample = {rng.randrange(1_000_000) for _ in range(20_000)}
    spellings = {n: spell_number_de(n) for n in sample}
    assert len(set(spellings.values())) == len(sample)


def test_normalize_sentence_examples():
    assert normalize("Boeing lehnte eine Stellungnahme ab.") == \
        "boeing lehnte eine stellungnahme ab"
    assert normalize("Inzwischen ist es kurz vor 22 Uhr.") == \
        "inzwischen ist es kurz vor zweiundzwanzig uhr"
    assert normalize("") == ""
    assert normalize("52") == "zweiundfünfzig"


def test_normalize_eszett_becomes_ss():
    assert normalize("Straße") == "strasse"
    # a spelled number containing ß also ends up as ss
    assert normalize("30") == "dreissig"


def test_normalize_drops_unmappable_characters():
    assert normalize("naïve — quote «x»") == "nave quote x"


def test_normalize_ordinal_marker():
    assert normalize("Am 22. Dezember") == "am zweiundzwanzig dezember"


def test_normalize_decimals_and_dates_strip_digits_with_warning():
    text, warnings = normalize_with_warnings("Pi ist 3,14 am 22.03.2023")
    assert text == "pi ist am"
    assert warnings == 2


def test_normalize_out_of_range_number_warns():
    text, warnings = normalize_with_warnings("1234567 Dinge")
    assert text == "dinge"
    assert warnings == 1


def test_normalize_whitespace_collapse():
    assert normalize("  viel \t Platz\n hier  ") == "viel platz hier"


def test_normalize_decomposed_umlaut():
    composed = "bär"          # ä as one code point
    decomposed = "bär"       # a + combining diaeresis
    assert normalize(composed) == normalize(decomposed) == "bär"


def test_identity_config_is_exact_identity():
    config = NormalizationConfig.identity()
    for text in ["", "MiXeD 42 ß!", "tабs\there", "bär decomposed"]:
        assert normalize(text, config) == text


def test_config_requires_space_in_charset():
    with pytest.raises(ValueError):
        NormalizationConfig(allowed_charset=frozenset("abc"))


def test_custom_charset_keeps_digits():
    config = NormalizationConfig(
        allowed_charset=frozenset("abcdefghijklmnopqrstuvwxyz0123456789 "),
        spell_numbers=False,
    )
    assert normalize("Anruf 112!", config) == "anruf 112"


FUZZ_ALPHABET = (
    string.ascii_letters + string.digits + string.punctuation +
    "äöüÄÖÜß \t\n «»—éñç"
)


def _fuzz_corpus(count: int, seed: int = 1234) -> list[str]:
    rng = random.Random(seed)
    return [
        "".join(rng.choice(FUZZ_ALPHABET) for _ in range(rng.randrange(0, 60)))
        for _ in range(count)
    ]


def test_fuzz_idempotence_and_charset_closure():
    config = NormalizationConfig()
    for text in _fuzz_corpus(2_000):
        once = normalize(text, config)
        assert set(once) <= GERMAN_EVAL_CHARSET
        assert normalize(once, config) == once
        assert not once.startswith(" ") and not once.endswith(" ")
        assert "  " not in once


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=80))
def test_idempotence_property(text):
    config = NormalizationConfig()
    once = normalize(text, config)
    assert normalize(once, config) == once
    assert set(once) <= GERMAN_EVAL_CHARSET


def test_transformer_matches_function_and_sklearn_api():
    texts = ["Hallo, Welt!", "52 Dinge", ""]
    transformer = TextNormalizer()
    assert transformer.fit(texts) is transformer
    assert transformer.transform(texts) == [normalize(t) for t in texts]
    params = transformer.get_params()
    assert params["lowercase"] is True
    clone = TextNormalizer(**params)
    assert clone.transform(texts) == transformer.transform(texts)


def test_transformer_identity_params():
    transformer = TextNormalizer(lowercase=False, allowed_charset=None,
                                 spell_numbers=False, collapse_whitespace=False)
    assert transformer.transform(["AsIs 42 ß"]) == ["AsIs 42 ß"]
