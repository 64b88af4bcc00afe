"""tf-idf features over word and character n-gram blocks.

Each :class:`NgramSpec` gets its own vocabulary, document frequencies and
idf weights. Blocks are weighted and L2-normalized independently, then
concatenated into one :class:`SparseVector` per author.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .corpus import AuthorRecord, Corpus
from .textprep import PrepConfig, filter_text, extract_emoji, tokenize


class EmptyVocabularyError(ValueError):
    pass


@dataclass(frozen=True)
class NgramSpec:
    analyzer: str
    n_min: int
    n_max: int

    def __post_init__(self) -> None:
        if self.analyzer not in ("word", "char"):
            raise ValueError(f"unknown analyzer {self.analyzer!r}")
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError(f"need 1 <= n_min <= n_max, got {self.n_min}, {self.n_max}")


WORD_1_2 = NgramSpec("word", 1, 2)
CHAR_3_5 = NgramSpec("char", 3, 5)


@dataclass(frozen=True)
class TfidfConfig:
    specs: tuple[NgramSpec, ...] = (WORD_1_2, CHAR_3_5)
    lowercase: bool = True
    min_df: int = 2
    max_df: float | None = None
    use_idf: bool = True
    sublinear_tf: bool = True
    l2_normalize: bool = True

    def __post_init__(self) -> None:
        if not self.specs:
            raise ValueError("at least one n-gram block is required")
        if self.min_df < 1:
            raise ValueError("min_df must be >= 1")
        if self.max_df is not None and not 0.0 < self.max_df <= 1.0:
            raise ValueError("max_df must lie in (0, 1]")


@dataclass(frozen=True)
class SparseVector:
    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self) -> None:
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values differ in length")
        if len(self.indices) and (np.any(np.diff(self.indices) <= 0) or self.indices[-1] >= self.dim):
            raise ValueError("indices must be strictly increasing and < dim")

    @classmethod
    def from_dict(cls, entries: dict[int, float], dim: int) -> "SparseVector":
        items = sorted((i, v) for i, v in entries.items() if v != 0)
        idx = np.array([i for i, _ in items], dtype=np.int64)
        val = np.array([v for _, v in items], dtype=np.float64)
        return cls(idx, val, dim)

    def to_dict(self) -> dict[int, float]:
        return dict(zip(self.indices.tolist(), self.values.tolist()))

    def toarray(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclass
class Block:
    """One fitted n-gram block: sorted terms with their dfs and idf weights."""

    spec: NgramSpec
    terms: list[str]
    df: np.ndarray
    idf: np.ndarray
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.index = {t: i for i, t in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)


@dataclass
class TfidfModel:
    config: TfidfConfig
    blocks: list[Block]
    n_train_docs: int
    prep: PrepConfig = field(default_factory=PrepConfig)

    @property
    def dim(self) -> int:
        return sum(len(b) for b in self.blocks)


def author_document(author: AuthorRecord, prep: PrepConfig | None = None) -> str:
    """Tweets joined by newlines, each passed through the word-pattern filter."""
    mode = prep.filter_mode if prep is not None else "all"
    return "\n".join(filter_text(d, mode) for d in author.documents)


def word_ngrams(tokens: Sequence[str], n_min: int, n_max: int) -> Counter:
    if n_min < 1:
        raise ValueError("n_min must be >= 1")
    grams: Counter = Counter()
    for n in range(n_min, n_max + 1):
        if n == 1:
            grams.update(tokens)
        else:
            grams.update(" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
    return grams


def char_ngrams(text: str, n_min: int, n_max: int) -> Counter:
    grams: Counter = Counter()
    for n in range(n_min, n_max + 1):
        grams.update(text[i : i + n] for i in range(len(text) - n + 1))
    return grams


def analyze(text: str, spec: NgramSpec, lowercase: bool, prep: PrepConfig) -> Counter:
    """Raw term counts of one block for an already filtered author document."""
    if prep.emoji_only:
        if spec.analyzer != "word":
            raise ValueError("character n-grams are undefined in emoji_only mode")
        return word_ngrams(extract_emoji(text, prep.emoji_vocab), spec.n_min, spec.n_max)
    if spec.analyzer == "word":
        return word_ngrams(tokenize(text, lowercase), spec.n_min, spec.n_max)
    return char_ngrams(text.lower() if lowercase else text, spec.n_min, spec.n_max)


def count_author(author: AuthorRecord, config: TfidfConfig, prep: PrepConfig) -> list[Counter]:
    text = author_document(author, prep)
    return [analyze(text, spec, config.lowercase, prep) for spec in config.specs]


def _check_prep(config: TfidfConfig, prep: PrepConfig) -> None:
    if config.lowercase != prep.lowercase:
        raise ValueError("TfidfConfig.lowercase and PrepConfig.lowercase disagree")


def max_df_count(max_df: float | None, n_docs: int) -> int:
    if max_df is None:
        return n_docs
    # round() absorbs float noise such as 0.1 * 30 = 3.0000000000000004
    return math.ceil(round(max_df * n_docs, 9))


def fit_counts(counts: Sequence[Sequence[Counter]], config: TfidfConfig, prep: PrepConfig) -> TfidfModel:
    """Fit vocabularies from per-author block counts (as built by :func:`count_author`)."""
    n = len(counts)
    if n == 0:
        raise ValueError("cannot fit on an empty corpus")
    hi = max_df_count(config.max_df, n)
    blocks = []
    for b, spec in enumerate(config.specs):
        df: Counter = Counter()
        for author_counts in counts:
            df.update(author_counts[b].keys())
        terms = sorted(t for t, d in df.items() if config.min_df <= d <= hi)
        if not terms:
            raise EmptyVocabularyError(
                f"empty vocabulary (min_df/max_df too strict) in {spec.analyzer} block"
            )
        dfs = np.array([df[t] for t in terms], dtype=np.int64)
        if config.use_idf:
            idf = np.log((1.0 + n) / (1.0 + dfs)) + 1.0
        else:
            idf = np.ones(len(terms))
        blocks.append(Block(spec, terms, dfs, idf))
    return TfidfModel(config, blocks, n, prep)


def fit(corpus: Corpus, config: TfidfConfig, prep: PrepConfig | None = None) -> TfidfModel:
    prep = prep if prep is not None else PrepConfig(lowercase=config.lowercase)
    _check_prep(config, prep)
    if len(corpus) == 0:
        raise ValueError("cannot fit on an empty corpus")
    return fit_counts([count_author(a, config, prep) for a in corpus], config, prep)


def transform_counts(model: TfidfModel, counts: Sequence[Counter]) -> SparseVector:
    cfg = model.config
    all_idx, all_val = [], []
    offset = 0
    for block, block_counts in zip(model.blocks, counts):
        pairs = sorted(
            (block.index[t], c) for t, c in block_counts.items() if t in block.index
        )
        if pairs:
            idx = np.fromiter((p[0] for p in pairs), dtype=np.int64, count=len(pairs))
            tf = np.fromiter((p[1] for p in pairs), dtype=np.float64, count=len(pairs))
            if cfg.sublinear_tf:
                tf = 1.0 + np.log(tf)
            val = tf * block.idf[idx]
            if cfg.l2_normalize:
                norm = math.sqrt(float(np.dot(val, val)))
                if norm > 0:
                    val = val / norm
            all_idx.append(idx + offset)
            all_val.append(val)
        offset += len(block)
    if all_idx:
        return SparseVector(np.concatenate(all_idx), np.concatenate(all_val), offset)
    return SparseVector(np.zeros(0, dtype=np.int64), np.zeros(0), offset)


def transform(model: TfidfModel, author: AuthorRecord, prep: PrepConfig | None = None) -> SparseVector:
    prep = prep if prep is not None else model.prep
    return transform_counts(model, count_author(author, model.config, prep))


def fit_transform_corpus(
    corpus: Corpus, config: TfidfConfig, prep: PrepConfig | None = None
) -> tuple[TfidfModel, list[SparseVector]]:
    prep = prep if prep is not None else PrepConfig(lowercase=config.lowercase)
    _check_prep(config, prep)
    counts = [count_author(a, config, prep) for a in corpus]
    model = fit_counts(counts, config, prep)
    return model, [transform_counts(model, c) for c in counts]


def to_csr(vectors: Sequence[SparseVector], dim: int | None = None) -> sp.csr_matrix:
    """Stack sparse vectors row-wise."""
    if dim is None:
        if not vectors:
            raise ValueError("dimension unknown for an empty vector list")
        dim = vectors[0].dim
    for v in vectors:
        if v.dim != dim:
            raise ValueError(f"dimension mismatch: {v.dim} != {dim}")
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(v.indices) for v in vectors])
    if vectors:
        indices = np.concatenate([v.indices for v in vectors])
        data = np.concatenate([v.values for v in vectors])
    else:
        indices, data = np.zeros(0, dtype=np.int64), np.zeros(0)
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))
