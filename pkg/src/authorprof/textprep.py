"""Tokenization, word-pattern filters and emoji extraction."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field

FILTER_MODES = ("all", "handles_only", "exclude_handles", "uppercase_only", "lowercase_only")

_TOKEN_RE = re.compile(r"\b\w\w+\b")


@dataclass(frozen=True)
class PrepConfig:
    lowercase: bool = True
    filter_mode: str = "all"
    emoji_only: bool = False
    emoji_vocab: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.filter_mode not in FILTER_MODES:
            raise ValueError(f"unknown filter mode {self.filter_mode!r}")
        if self.emoji_only and self.filter_mode != "all":
            raise ValueError("emoji_only cannot be combined with a word-pattern filter")
        if self.emoji_only and not self.emoji_vocab:
            raise ValueError("emoji_only requires a non-empty emoji vocabulary")


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    """Runs of two or more word characters; everything else separates."""
    if lowercase:
        text = text.lower()
    return _TOKEN_RE.findall(text)


def _keep(word: str, mode: str) -> bool:
    if mode == "all":
        return True
    if mode == "handles_only":
        return word.startswith("@")
    if mode == "exclude_handles":
        return not word.startswith("@")
    first = word[0]
    if mode == "uppercase_only":
        return first.isupper()
    if mode == "lowercase_only":
        return first.islower()
    raise ValueError(f"unknown filter mode {mode!r}")


def filter_text(text: str, mode: str) -> str:
    """Keep the whitespace-delimited words selected by ``mode``."""
    if mode == "all":
        return text
    return " ".join(w for w in text.split() if _keep(w, mode))


class EmojiMatcher:
    """Greedy longest-match scanner over a fixed emoji vocabulary."""

    def __init__(self, vocab):
        vocab = {v for v in vocab if v}
        if not vocab:
            raise ValueError("emoji vocabulary is empty")
        self._by_first: dict[str, list[str]] = {}
        for item in vocab:
            self._by_first.setdefault(item[0], []).append(item)
        for items in self._by_first.values():
            items.sort(key=lambda s: (-len(s), s))

    def findall(self, text: str) -> list[str]:
        out = []
        i, n = 0, len(text)
        while i < n:
            for cand in self._by_first.get(text[i], ()):
                if text.startswith(cand, i):
                    out.append(cand)
                    i += len(cand)
                    break
            else:
                i += 1
        return out


def extract_emoji(text: str, emoji_vocab) -> list[str]:
    return EmojiMatcher(emoji_vocab).findall(text)


def load_emoji_vocab(path: str | os.PathLike) -> frozenset[str]:
    """One emoji per line; ``#`` starts a comment line."""
    vocab = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                vocab.add(line)
    if not vocab:
        raise ValueError(f"{path}: empty emoji vocabulary")
    return frozenset(vocab)
