"""Word-to-phoneme mapping via a CMUdict-format pronouncing dictionary.

A transcript is lowercased, stripped of punctuation (apostrophes inside
words survive), and each word is mapped to its preferred pronunciation
variant. ARPABET phones convert to IPA through a fixed 39-row table
shipped as package data, so the mapping is reviewable and swappable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import IO, Iterable

from .phonemes import (
    ARPABET_PHONES,
    ARPABET_VOWELS,
    CmuSequence,
    CmuToken,
    EmptyCanonical,
    IpaSequence,
    IpaToken,
    UnknownPhone,
)


class LexiconParseError(ValueError):
    """Malformed dictionary line; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


_WORD_RE = re.compile(r"^(\S+?)(?:\((\d+)\))?$")
_PHONE_FIELD_RE = re.compile(r"^([A-Z]{1,2})([0-2])?$")
_TRANSCRIPT_WORD_RE = re.compile(r"[a-z]+(?:'[a-z]+)*")


@dataclass(frozen=True)
class OovReport:
    """Transcript words that had no dictionary entry, with their word index."""

    oov_words: tuple[tuple[str, int], ...] = ()
    # Parallel to oov_words; True when a fallback pronunciation was substituted
    # rather than the word being skipped. The current policy always skips.
    fallback_used: tuple[bool, ...] = ()

    def __post_init__(self):
        positions = [pos for _, pos in self.oov_words]
        if positions != sorted(set(positions)):
            raise ValueError("OOV positions must be strictly increasing")


class Lexicon:
    """Case-insensitive word lookup; first variant is the preferred one."""

    def __init__(self, entries: dict[str, list[CmuSequence]]):
        for word, variants in entries.items():
            if not variants or any(len(v) == 0 for v in variants):
                raise ValueError(f"lexicon entry {word!r} has an empty variant")
        self._entries = entries

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._entries

    def lookup(self, word: str) -> list[CmuSequence]:
        """All pronunciation variants for ``word`` (empty list if OOV)."""
        return list(self._entries.get(word.lower(), ()))


def _parse_phone_field(field: str, line_number: int) -> CmuToken:
    m = _PHONE_FIELD_RE.match(field)
    if m is None or m.group(1) not in ARPABET_PHONES:
        raise LexiconParseError(f"unknown phone {field!r}", line_number)
    phone, stress = m.group(1), m.group(2)
    if stress is not None and phone not in ARPABET_VOWELS:
        raise LexiconParseError(f"stress digit on non-vowel {field!r}", line_number)
    return CmuToken(phone=phone, stress=int(stress) if stress is not None else None)


def load_lexicon(source: str | Path | IO[str] | IO[bytes] | Iterable[str]) -> Lexicon:
    """Load a CMUdict-format dictionary.

    Lines are ``WORD  PH1 PH2 ...``; ``WORD(n)`` marks the n-th alternate
    pronunciation; ``;;;`` lines are comments. Alternates are ordered by
    their ``(n)`` index after the base form regardless of file order.
    """
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError:
            text = data.decode("latin-1")
        lines: Iterable[str] = text.splitlines()
    elif hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            try:
                text = data.decode("utf-8")
            except UnicodeDecodeError:
                text = data.decode("latin-1")
        else:
            text = data
        lines = text.splitlines()
    else:
        lines = source

    staged: dict[str, list[tuple[int, CmuSequence]]] = {}
    for line_number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith(";;;"):
            continue
        fields = line.split()
        if len(fields) < 2:
            raise LexiconParseError("expected a word followed by phones", line_number)
        m = _WORD_RE.match(fields[0])
        if m is None:
            raise LexiconParseError(f"bad word field {fields[0]!r}", line_number)
        word = m.group(1).lower()
        index = int(m.group(2)) if m.group(2) is not None else 0
        tokens = tuple(_parse_phone_field(f, line_number) for f in fields[1:])
        staged.setdefault(word, []).append((index, CmuSequence(tokens)))

    entries = {
        word: [seq for _, seq in sorted(variants, key=lambda pair: pair[0])]
        for word, variants in staged.items()
    }
    return Lexicon(entries)


def default_lexicon() -> Lexicon:
    """The compact dictionary shipped with the package."""
    ref = resources.files("phonoscore.data").joinpath("lexicon_en_us.dict")
    return load_lexicon(ref.read_text(encoding="utf-8").splitlines())


def _load_conversion_table() -> dict[str, tuple[str, ...]]:
    ref = resources.files("phonoscore.data").joinpath("arpabet_to_ipa.tsv")
    table: dict[str, tuple[str, ...]] = {}
    for raw in ref.read_text(encoding="utf-8").splitlines():
        raw = raw.strip()
        if not raw or raw.startswith("#"):
            continue
        phone, ipa = raw.split("\t")
        table[phone] = tuple(ipa.split())
    missing = ARPABET_PHONES - table.keys()
    if missing:
        raise RuntimeError(f"conversion table misses phones: {sorted(missing)}")
    return table


_ARPABET_TO_IPA = _load_conversion_table()


def arpabet_to_ipa(token: CmuToken) -> list[IpaToken]:
    """Convert one ARPABET phone to its IPA token(s); stress digits are dropped."""
    try:
        symbols = _ARPABET_TO_IPA[token.phone]
    except KeyError:
        raise UnknownPhone(f"no conversion row for phone {token.phone!r}") from None
    return [IpaToken(s) for s in symbols]


def transcript_words(transcript: str) -> list[str]:
    return _TRANSCRIPT_WORD_RE.findall(transcript.lower())


def transcript_to_canonical(
    transcript: str,
    lexicon: Lexicon,
    target: str = "ipa",
) -> tuple[IpaSequence | CmuSequence, OovReport]:
    """Map a transcript to its canonical phoneme sequence.

    Each in-vocabulary word contributes its preferred variant; sequences
    concatenate in word order. OOV words are skipped and reported. Raises
    :class:`EmptyCanonical` when no word maps at all.
    """
    if target not in ("ipa", "cmu"):
        raise ValueError(f"target must be 'ipa' or 'cmu', got {target!r}")
    words = transcript_words(transcript)
    cmu_tokens: list[CmuToken] = []
    oov: list[tuple[str, int]] = []
    for position, word in enumerate(words):
        variants = lexicon.lookup(word)
        if not variants:
            oov.append((word, position))
            continue
        cmu_tokens.extend(variants[0].tokens)
    if not cmu_tokens:
        raise EmptyCanonical(f"no transcript word maps to phonemes: {transcript!r}")
    report = OovReport(tuple(oov), tuple(False for _ in oov))
    if target == "cmu":
        return CmuSequence(tuple(cmu_tokens)), report
    ipa_tokens: list[IpaToken] = []
    for tok in cmu_tokens:
        ipa_tokens.extend(arpabet_to_ipa(tok))
    return IpaSequence(tuple(ipa_tokens)), report
