"""English suffix-stripping stemmer (Porter2 / Snowball English rules)."""

from __future__ import annotations

from functools import lru_cache

VOWELS = frozenset("aeiouy")
DOUBLES = ("bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt")
LI_ENDINGS = frozenset("cdeghkmnrt")

EXCEPTIONS = {
    "skis": "ski",
    "skies": "sky",
    "dying": "die",
    "lying": "lie",
    "tying": "tie",
    "idly": "idl",
    "gently": "gentl",
    "ugly": "ugli",
    "early": "earli",
    "only": "onli",
    "singly": "singl",
    "sky": "sky",
    "news": "news",
    "howe": "howe",
    "atlas": "atlas",
    "cosmos": "cosmos",
    "bias": "bias",
    "andes": "andes",
}
POST_1A_EXCEPTIONS = frozenset(
    ["inning", "outing", "canning", "herring", "earring", "proceed", "exceed", "succeed"]
)

STEP2 = (
    ("ization", "ize"),
    ("ational", "ate"),
    ("fulness", "ful"),
    ("ousness", "ous"),
    ("iveness", "ive"),
    ("tional", "tion"),
    ("biliti", "ble"),
    ("lessli", "less"),
    ("entli", "ent"),
    ("ation", "ate"),
    ("alism", "al"),
    ("aliti", "al"),
    ("ousli", "ous"),
    ("iviti", "ive"),
    ("fulli", "ful"),
    ("enci", "ence"),
    ("anci", "ance"),
    ("abli", "able"),
    ("izer", "ize"),
    ("ator", "ate"),
    ("alli", "al"),
    ("bli", "ble"),
    ("ogi", "og"),
    ("li", ""),
)
STEP3 = (
    ("ational", "ate"),
    ("tional", "tion"),
    ("alize", "al"),
    ("icate", "ic"),
    ("iciti", "ic"),
    ("ative", ""),
    ("ical", "ic"),
    ("ness", ""),
    ("ful", ""),
)
STEP4 = (
    "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent", "ism", "ate",
    "iti", "ous", "ive", "ize", "ion", "al", "er", "ic",
)


def _is_vowel(ch):
    return ch in VOWELS


def _regions(word):
    def region_after(start):
        for i in range(start + 1, len(word)):
            if not _is_vowel(word[i]) and _is_vowel(word[i - 1]):
                return i + 1
        return len(word)

    for prefix in ("gener", "commun", "arsen"):
        if word.startswith(prefix):
            r1 = len(prefix)
            break
    else:
        r1 = region_after(0)
    r2 = region_after(r1) if r1 < len(word) else len(word)
    return r1, r2


def _ends_short_syllable(word):
    n = len(word)
    if n == 2:
        return _is_vowel(word[0]) and not _is_vowel(word[1])
    if n >= 3:
        return (
            not _is_vowel(word[-3])
            and _is_vowel(word[-2])
            and not _is_vowel(word[-1])
            and word[-1] not in "wxY"
        )
    return False


def _is_short(word, r1):
    return r1 >= len(word) and _ends_short_syllable(word)


def _step1a(word):
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith(("ied", "ies")):
        return word[:-2] if len(word) > 4 else word[:-1]
    if word.endswith(("us", "ss")):
        return word
    if word.endswith("s"):
        if any(_is_vowel(c) for c in word[:-2]):
            return word[:-1]
    return word


def _step1b(word, r1):
    for suffix in ("eedly", "eed"):
        if word.endswith(suffix):
            if len(word) - len(suffix) >= r1:
                return word[: -len(suffix)] + "ee"
            return word
    for suffix in ("ingly", "edly", "ing", "ed"):
        if word.endswith(suffix):
            stem = word[: -len(suffix)]
            if not any(_is_vowel(c) for c in stem):
                return word
            if stem.endswith(("at", "bl", "iz")):
                return stem + "e"
            if stem.endswith(DOUBLES):
                return stem[:-1]
            if _is_short(stem, r1):
                return stem + "e"
            return stem
    return word


def _step1c(word):
    if len(word) > 2 and word[-1] in "yY" and not _is_vowel(word[-2]):
        return word[:-1] + "i"
    return word


def _step2(word, r1):
    for suffix, repl in STEP2:
        if word.endswith(suffix):
            if len(word) - len(suffix) < r1:
                return word
            if suffix == "ogi" and not word[:-3].endswith("l"):
                return word
            if suffix == "li" and word[-3:-2] not in LI_ENDINGS:
                return word
            return word[: -len(suffix)] + repl
    return word


def _step3(word, r1, r2):
    for suffix, repl in STEP3:
        if word.endswith(suffix):
            start = len(word) - len(suffix)
            if start < r1:
                return word
            if suffix == "ative" and start < r2:
                return word
            return word[:start] + repl
    return word


def _step4(word, r2):
    for suffix in STEP4:
        if word.endswith(suffix):
            start = len(word) - len(suffix)
            if start < r2:
                return word
            if suffix == "ion" and word[start - 1 : start] not in ("s", "t"):
                return word
            return word[:start]
    return word


def _step5(word, r1, r2):
    if word.endswith("e"):
        start = len(word) - 1
        if start >= r2 or (start >= r1 and not _ends_short_syllable(word[:-1])):
            return word[:-1]
    elif word.endswith("l"):
        if len(word) - 1 >= r2 and word.endswith("ll"):
            return word[:-1]
    return word


def porter2(word: str) -> str:
    """One pass of the Porter2 stemmer over a lowercase word."""
    if len(word) <= 2:
        return word
    if word in EXCEPTIONS:
        return EXCEPTIONS[word]
    if word[0] == "y":
        word = "Y" + word[1:]
    chars = list(word)
    for i in range(1, len(chars)):
        if chars[i] == "y" and _is_vowel(chars[i - 1]):
            chars[i] = "Y"
    word = "".join(chars)

    r1, r2 = _regions(word)
    word = _step1a(word)
    if word in POST_1A_EXCEPTIONS:
        return word
    word = _step1b(word, r1)
    word = _step1c(word)
    word = _step2(word, r1)
    word = _step3(word, r1, r2)
    word = _step4(word, r2)
    word = _step5(word, r1, r2)
    return word.replace("Y", "y")


@lru_cache(maxsize=65536)
def stem(word: str) -> str:
    """Stem ``word``, iterating Porter2 to a fixed point so that the result is idempotent."""
    for _ in range(8):
        nxt = porter2(word)
        if nxt == word:
            break
        word = nxt
    return word
