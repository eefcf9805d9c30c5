"""Hashtag text normalization shared by the lexicon and corpus layers."""
from __future__ import annotations

import unicodedata


class InvalidHashtagError(ValueError):
    pass


def normalize_hashtag(raw: str) -> str:
    """Strip one leading '#', lowercase and NFC-normalize a hashtag.

    Raises InvalidHashtagError when the result is empty or still contains
    whitespace or '#' (hashtags are single tokens).
    """
    if raw is None:
        raise InvalidHashtagError("hashtag is None")
    text = raw[1:] if raw.startswith("#") else raw
    text = unicodedata.normalize("NFC", text).lower()
    if not text:
        raise InvalidHashtagError(f"empty hashtag: {raw!r}")
    if any(ch.isspace() for ch in text) or "#" in text:
        raise InvalidHashtagError(f"invalid hashtag: {raw!r}")
    return text


def is_valid_term_text(text: str) -> bool:
    """Term text rule: non-empty, no whitespace, no '#'."""
    return bool(text) and not any(ch.isspace() for ch in text) and "#" not in text
