"""Tokenization, parsing, and rendering of textual phoneme sequences.

Two notations are supported:

* IPA: one token per base symbol plus any attached diacritics or length
  marks, e.g. ``m eɪ b iː``.
* ARPABET (CMUdict style): uppercase phones with optional stress digits,
  optionally interleaved with pause annotations such as
  ``D (0.12s pause) G``, meaning a 0.12-second silence before ``G``.

All types are immutable and all functions are pure, so everything here is
safe for unrestricted concurrent use.
"""

from __future__ import annotations

import math
import re
import unicodedata
from dataclasses import dataclass

# The 39-phone ARPABET set used by CMUdict (stress digits excluded).
ARPABET_VOWELS = frozenset(
    "AA AE AH AO AW AY EH ER EY IH IY OW OY UH UW".split()
)
ARPABET_CONSONANTS = frozenset(
    "B CH D DH F G HH JH K L M N NG P R S SH T TH V W Y Z ZH".split()
)
ARPABET_PHONES = ARPABET_VOWELS | ARPABET_CONSONANTS

# Word-stress marks are dropped from IPA; recognizers emit unstressed phones.
_STRESS_MARKS = {"ˈ", "ˌ"}  # ˈ ˌ

# Spacing modifier letters that attach to the preceding base symbol when
# tokenizing contiguous IPA (combining marks are detected via unicodedata).
_ATTACHING_MODIFIERS = {
    "ː",  # ː length
    "ˑ",  # ˑ half-length
    "˞",  # ˞ rhoticity
    "ʰ",  # ʰ aspiration
    "ʷ",  # ʷ labialization
    "ʲ",  # ʲ palatalization
    "ˠ",  # ˠ velarization
    "ˤ",  # ˤ pharyngealization
}

_TIE_BARS = {"͡", "͜"}


class PhonemeParseError(ValueError):
    """Base for located parse errors; ``offset`` is a byte offset into the input."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class MalformedPause(PhonemeParseError):
    """A parenthesized annotation that is not a valid ``(Xs pause)``."""


class UnknownPhone(PhonemeParseError):
    """A token outside the 39-phone ARPABET set (or invalid stress placement)."""


class TrailingPause(PhonemeParseError):
    """A pause annotation not immediately followed by a phone."""


class EmptyCanonical(ValueError):
    """No canonical phoneme sequence could be produced for an utterance.

    Signals that a match score must be reported as missing, never as zero.
    """


@dataclass(frozen=True)
class IpaToken:
    """One base IPA symbol plus attached modifiers, Unicode-composed."""

    symbol: str

    def __post_init__(self):
        if not self.symbol:
            raise ValueError("IPA token must be non-empty")
        if any(ch.isspace() for ch in self.symbol):
            raise ValueError(f"IPA token contains whitespace: {self.symbol!r}")
        if any(ch in _STRESS_MARKS for ch in self.symbol):
            raise ValueError(f"IPA token contains a stress mark: {self.symbol!r}")


@dataclass(frozen=True)
class IpaSequence:
    tokens: tuple[IpaToken, ...] = ()

    def symbols(self) -> list[str]:
        return [t.symbol for t in self.tokens]

    def render(self) -> str:
        """Space-separated rendering; round-trips through tokenize_ipa."""
        return " ".join(self.symbols())

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class CmuToken:
    """An ARPABET phone with optional stress and optional preceding pause."""

    phone: str
    stress: int | None = None
    pause_before_s: float | None = None

    def __post_init__(self):
        if self.phone not in ARPABET_PHONES:
            raise ValueError(f"not an ARPABET phone: {self.phone!r}")
        if self.stress is not None:
            if self.phone not in ARPABET_VOWELS:
                raise ValueError(f"stress digit on non-vowel phone {self.phone}")
            if self.stress not in (0, 1, 2):
                raise ValueError(f"stress must be 0-2, got {self.stress}")
        if self.pause_before_s is not None:
            if not (math.isfinite(self.pause_before_s) and self.pause_before_s >= 0.0):
                raise ValueError(f"pause must be finite and >= 0, got {self.pause_before_s}")


@dataclass(frozen=True)
class CmuSequence:
    tokens: tuple[CmuToken, ...] = ()

    def phones(self, with_stress: bool = False) -> list[str]:
        if with_stress:
            return [
                t.phone + (str(t.stress) if t.stress is not None else "")
                for t in self.tokens
            ]
        return [t.phone for t in self.tokens]

    def __len__(self) -> int:
        return len(self.tokens)


def _normalize_ipa_text(raw: str) -> str:
    # ASCII ":" is a common stand-in for the IPA length mark.
    return unicodedata.normalize("NFC", raw).replace(":", "ː")


def tokenize_ipa(raw: str, mode: str = "space_separated") -> IpaSequence:
    """Tokenize IPA text into an :class:`IpaSequence`.

    In ``space_separated`` mode tokens are the whitespace-split fields. In
    ``contiguous`` mode each base symbol plus its immediately following
    combining diacritics and length marks forms one token. Both modes
    compose the text (NFC), map ASCII ``:`` to ``ː``, and drop word-stress
    marks. Unknown symbols become single-symbol tokens; empty input yields
    an empty sequence.
    """
    if mode not in ("space_separated", "contiguous"):
        raise ValueError(f"unknown tokenization mode: {mode!r}")
    text = _normalize_ipa_text(raw)
    if mode == "space_separated":
        symbols = []
        for chunk in text.split():
            stripped = "".join(ch for ch in chunk if ch not in _STRESS_MARKS)
            if stripped:
                symbols.append(stripped)
        return IpaSequence(tuple(IpaToken(s) for s in symbols))

    symbols = []
    current = ""
    tie_pending = False
    for ch in text:
        if ch.isspace() or ch in _STRESS_MARKS:
            if current:
                symbols.append(current)
                current = ""
            tie_pending = False
            continue
        attaches = bool(current) and (
            tie_pending
            or unicodedata.combining(ch) != 0
            or ch in _ATTACHING_MODIFIERS
        )
        if attaches:
            current += ch
        else:
            if current:
                symbols.append(current)
            current = ch
        tie_pending = ch in _TIE_BARS
    if current:
        symbols.append(current)
    return IpaSequence(tuple(IpaToken(s) for s in symbols))


_PAREN_RE = re.compile(r"\(([^)]*)\)")
_PAUSE_BODY_RE = re.compile(r"^(\d+(?:\.\d+)?)s pause$")
_PHONE_RE = re.compile(r"[^\s()]+")
_PHONE_TOKEN_RE = re.compile(r"^([A-Z]+)([0-2])?$")


def _byte_offset(raw: str, pos: int) -> int:
    return len(raw[:pos].encode("utf-8"))


def parse_cmu_with_pauses(raw: str) -> CmuSequence:
    """Parse ARPABET text with inline ``(Xs pause)`` annotations.

    A pause attaches to the phone that follows it. Raises
    :class:`MalformedPause`, :class:`UnknownPhone`, or
    :class:`TrailingPause`, each carrying the byte offset of the offending
    token.
    """
    tokens: list[CmuToken] = []
    pending_pause: float | None = None
    pending_pos: int | None = None
    pos = 0
    n = len(raw)
    while pos < n:
        ch = raw[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch == "(":
            m = _PAREN_RE.match(raw, pos)
            if m is None:
                raise MalformedPause("unterminated pause annotation", _byte_offset(raw, pos))
            body = _PAUSE_BODY_RE.match(m.group(1))
            if body is None:
                raise MalformedPause(
                    f"not a valid pause annotation: {m.group(0)!r}", _byte_offset(raw, pos)
                )
            if pending_pause is not None:
                raise TrailingPause(
                    "pause annotation not followed by a phone", _byte_offset(raw, pending_pos or pos)
                )
            pending_pause = float(body.group(1))
            pending_pos = pos
            pos = m.end()
            continue
        m = _PHONE_RE.match(raw, pos)
        assert m is not None
        tok = _PHONE_TOKEN_RE.match(m.group(0))
        if tok is None or tok.group(1) not in ARPABET_PHONES:
            raise UnknownPhone(f"unknown phone token: {m.group(0)!r}", _byte_offset(raw, pos))
        phone, stress_str = tok.group(1), tok.group(2)
        stress = int(stress_str) if stress_str is not None else None
        if stress is not None and phone not in ARPABET_VOWELS:
            raise UnknownPhone(
                f"stress digit on non-vowel phone: {m.group(0)!r}", _byte_offset(raw, pos)
            )
        tokens.append(CmuToken(phone=phone, stress=stress, pause_before_s=pending_pause))
        pending_pause = None
        pending_pos = None
        pos = m.end()
    if pending_pause is not None:
        raise TrailingPause(
            "pause annotation not followed by a phone", _byte_offset(raw, pending_pos or 0)
        )
    return CmuSequence(tuple(tokens))


def render_cmu_with_pauses(seq: CmuSequence) -> str:
    """Inverse of :func:`parse_cmu_with_pauses`; durations render at two decimals."""
    parts: list[str] = []
    for tok in seq.tokens:
        if tok.pause_before_s is not None:
            parts.append(f"({tok.pause_before_s:.2f}s pause)")
        parts.append(tok.phone + (str(tok.stress) if tok.stress is not None else ""))
    return " ".join(parts)
