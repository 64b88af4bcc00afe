"""PAN-style author profiling corpora: truth files, author XML, label tasks.

A corpus directory holds ``truth.txt`` (``id:::gender:::variety`` per line)
and one ``<id>.xml`` per author. Directories without a truth file load as
unlabeled corpora.
"""

from __future__ import annotations

import logging
import os
import random
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

logger = logging.getLogger(__name__)

SEP = ":::"
LANGUAGES = ("en", "es", "pt", "ar")
GENDERS = ("female", "male")
TASKS = ("gender", "variety", "joint")

# Variety labels per language, lowercased.
VARIETIES: dict[str, frozenset[str]] = {
    "en": frozenset({"australia", "canada", "great britain", "ireland", "new zealand", "united states"}),
    "es": frozenset({"argentina", "chile", "colombia", "mexico", "peru", "spain", "venezuela"}),
    "pt": frozenset({"brazil", "portugal"}),
    "ar": frozenset({"egypt", "gulf", "levant", "maghreb"}),
}
# Spellings used by the distributed truth files for the same varieties.
_VARIETY_ALIASES = {"levantine": "levant", "maghrebi": "maghreb"}


class CorpusError(ValueError):
    """Malformed or inconsistent corpus input."""


@dataclass(frozen=True)
class AuthorRecord:
    id: str
    lang: str
    documents: tuple[str, ...]
    gender: str | None = None
    variety: str | None = None

    def label(self, task: str) -> str:
        """Gold label of this author for ``task``; raises if unlabeled."""
        if task == "gender":
            value = self.gender
        elif task == "variety":
            value = self.variety
        elif task == "joint":
            if self.gender is None or self.variety is None:
                value = None
            else:
                value = merge_labels(self.gender, self.variety)
        else:
            raise ValueError(f"unknown task {task!r}")
        if value is None:
            raise CorpusError(f"author {self.id} has no {task} label")
        return value


@dataclass(frozen=True)
class Corpus:
    lang: str
    authors: tuple[AuthorRecord, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        ids = [a.id for a in self.authors]
        if len(set(ids)) != len(ids):
            raise CorpusError("author ids are not unique")
        for a in self.authors:
            if a.lang != self.lang:
                raise CorpusError(f"author {a.id} has lang {a.lang}, corpus is {self.lang}")

    def __len__(self) -> int:
        return len(self.authors)

    def __iter__(self):
        return iter(self.authors)

    @property
    def ids(self) -> list[str]:
        return [a.id for a in self.authors]

    def labels(self, task: str) -> list[str]:
        return [a.label(task) for a in self.authors]

    def is_labeled(self, task: str) -> bool:
        try:
            self.labels(task)
        except CorpusError:
            return False
        return True

    def subset(self, indices: Iterable[int]) -> "Corpus":
        return Corpus(self.lang, tuple(self.authors[i] for i in indices))


def is_legal_variety(lang: str, variety: str) -> bool:
    v = variety.strip().lower()
    v = _VARIETY_ALIASES.get(v, v)
    return v in VARIETIES[lang]


def parse_truth(text: str) -> dict[str, tuple[str, str]]:
    """Parse a truth file into ``{id: (gender, variety)}``.

    Gender is lowercased, variety is kept verbatim. Blank lines are skipped;
    CRLF line endings are accepted.
    """
    out: dict[str, tuple[str, str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip("\r")
        if not line.strip():
            continue
        parts = line.split(SEP)
        if len(parts) != 3:
            raise CorpusError(f"line {lineno}: expected 3 fields, got {len(parts)}")
        author_id, gender, variety = parts
        author_id = author_id.strip()
        gender = gender.strip().lower()
        if gender not in GENDERS:
            raise CorpusError(f"line {lineno}: unknown gender {gender!r}")
        if author_id in out:
            raise CorpusError(f"line {lineno}: duplicate id {author_id!r}")
        out[author_id] = (gender, variety)
    return out


def load_author_xml(text: str | bytes, id: str) -> AuthorRecord:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise CorpusError(f"{id}: malformed XML: {exc}") from exc
    if root.tag != "author":
        raise CorpusError(f"{id}: unexpected root element <{root.tag}>")
    lang = root.get("lang")
    if lang not in LANGUAGES:
        raise CorpusError(f"{id}: unknown lang attribute {lang!r}")
    docs = []
    container = root.find("documents")
    if container is not None:
        docs = [d.text or "" for d in container.findall("document")]
    return AuthorRecord(id=id, lang=lang, documents=tuple(docs))


def load_corpus(directory: str | os.PathLike, lang: str, strict: bool = True) -> Corpus:
    """Load a corpus directory.

    With ``strict`` every variety label must belong to the language's
    variety set.
    """
    if lang not in LANGUAGES:
        raise CorpusError(f"unknown language {lang!r}")
    directory = Path(directory)
    if not directory.is_dir():
        raise CorpusError(f"no such corpus directory: {directory}")
    xml_files = {p.stem: p for p in directory.glob("*.xml")}
    truth_path = directory / "truth.txt"
    truth = None
    if truth_path.exists():
        truth = parse_truth(truth_path.read_text(encoding="utf-8"))
        missing = sorted(set(truth) - set(xml_files))
        if missing:
            raise CorpusError(f"missing XML for truth ids: {', '.join(missing)}")

    authors = []
    for author_id in sorted(xml_files):
        if truth is not None and author_id not in truth:
            logger.warning("author %s has no truth entry; excluded", author_id)
            continue
        rec = load_author_xml(xml_files[author_id].read_bytes(), author_id)
        if rec.lang != lang:
            raise CorpusError(f"{author_id}: lang {rec.lang} does not match corpus lang {lang}")
        if truth is not None:
            gender, variety = truth[author_id]
            if not is_legal_variety(lang, variety):
                msg = f"{author_id}: variety {variety!r} is not a {lang} variety"
                if strict:
                    raise CorpusError(msg)
                logger.warning(msg)
            rec = replace(rec, gender=gender, variety=variety)
        authors.append(rec)
    return Corpus(lang, tuple(authors))


def resolve_corpus_dir(root: str | os.PathLike, lang: str) -> Path:
    """``<root>/<lang>/`` when it exists, else ``root`` itself (flat layout)."""
    root = Path(root)
    nested = root / lang
    return nested if nested.is_dir() else root


def dump_corpus(corpus: Corpus, directory: str | os.PathLike) -> None:
    """Write ``corpus`` in PAN layout. Labels are written only if every author has both."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for a in corpus:
        docs = "".join(f"<document>{escape(d)}</document>\n" for d in a.documents)
        xml = f'<author lang="{a.lang}">\n<documents>\n{docs}</documents>\n</author>\n'
        (directory / f"{a.id}.xml").write_text(xml, encoding="utf-8")
    if corpus.is_labeled("joint"):
        lines = "".join(f"{a.id}{SEP}{a.gender}{SEP}{a.variety}\n" for a in corpus)
        (directory / "truth.txt").write_text(lines, encoding="utf-8")


def merge_labels(gender: str, variety: str) -> str:
    for label in (gender, variety):
        if not label:
            raise ValueError("labels must be non-empty")
        if SEP in label:
            raise ValueError(f"label {label!r} contains the reserved separator {SEP!r}")
    joint = f"{gender}{SEP}{variety}"
    # "a:" + ":::" + "b" cannot be split back unambiguously
    if joint.find(SEP) != joint.rfind(SEP):
        raise ValueError(f"labels {gender!r}, {variety!r} make an ambiguous joint label")
    return joint


def split_joint(joint: str) -> tuple[str, str]:
    pos = joint.find(SEP)
    if pos < 0 or pos != joint.rfind(SEP):
        raise ValueError(f"joint label {joint!r} must contain {SEP!r} exactly once")
    return joint[:pos], joint[pos + len(SEP):]


def generate_synthetic(
    n_authors: int,
    docs_per_author: int,
    classes: Sequence[tuple[str, Sequence[str]]],
    vocab_size: int,
    signal_rate: float,
    seed: int,
    *,
    tokens_per_doc: int = 12,
    label_field: str = "variety",
    lang: str = "en",
) -> Corpus:
    """Planted-signal corpus with balanced classes.

    Every token slot holds, with probability ``signal_rate``, one of the
    author's class tokens, otherwise a background token ``w<i>``. Class
    labels go to ``label_field``; with ``"joint"`` they must be merged
    ``gender:::variety`` labels.
    """
    if not classes:
        raise ValueError("class list is empty")
    if not 0.0 <= signal_rate <= 1.0:
        raise ValueError("signal_rate must lie in [0, 1]")
    if n_authors % len(classes):
        raise ValueError("n_authors must be divisible by the number of classes")
    if vocab_size == 0 and signal_rate < 1.0:
        raise ValueError("vocab_size=0 requires signal_rate=1")
    if label_field not in TASKS:
        raise ValueError(f"unknown label_field {label_field!r}")
    rng = random.Random(seed)
    width = len(str(n_authors - 1))
    authors = []
    for i in range(n_authors):
        label, planted = classes[i % len(classes)]
        if signal_rate > 0 and not planted:
            raise ValueError(f"class {label!r} has no planted tokens")
        docs = []
        for _ in range(docs_per_author):
            words = []
            for _ in range(tokens_per_doc):
                if rng.random() < signal_rate:
                    words.append(rng.choice(list(planted)))
                else:
                    words.append(f"w{rng.randrange(vocab_size)}")
            docs.append(" ".join(words))
        if label_field == "joint":
            gender, variety = split_joint(label)
        elif label_field == "gender":
            gender, variety = label, None
        else:
            gender, variety = None, label
        authors.append(AuthorRecord(f"a{i:0{width}d}", lang, tuple(docs), gender, variety))
    return Corpus(lang, tuple(authors))
