"""Versioned JSON model files and atomic output writes."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus
from .features import Block, NgramSpec, TfidfConfig, TfidfModel
from .svm import LinearModel, SvmConfig
from .textprep import PrepConfig

FORMAT = "authorprof-model"
VERSION = 1


@dataclass
class ModelFile:
    language: str
    task: str
    tfidf: TfidfModel
    classifier: LinearModel
    fingerprint: dict


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def corpus_fingerprint(corpus: Corpus, task: str) -> dict:
    h = hashlib.sha256()
    for a in corpus:
        h.update(json.dumps([a.id, a.label(task), list(a.documents)], ensure_ascii=False).encode("utf-8"))
    return {
        "n_authors": len(corpus),
        "labels": sorted(set(corpus.labels(task))),
        "sha256": h.hexdigest(),
    }


def _prep_to_json(prep: PrepConfig) -> dict:
    return {
        "lowercase": prep.lowercase,
        "filter_mode": prep.filter_mode,
        "emoji_only": prep.emoji_only,
        "emoji_vocab": sorted(prep.emoji_vocab),
    }


def _prep_from_json(d: dict) -> PrepConfig:
    return PrepConfig(d["lowercase"], d["filter_mode"], d["emoji_only"], frozenset(d["emoji_vocab"]))


def to_json(mf: ModelFile) -> str:
    cfg = mf.tfidf.config
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "language": mf.language,
        "task": mf.task,
        "prep": _prep_to_json(mf.tfidf.prep),
        "tfidf": {
            "config": {**asdict(cfg), "specs": [asdict(s) for s in cfg.specs]},
            "n_train_docs": mf.tfidf.n_train_docs,
            "blocks": [
                {
                    "spec": asdict(b.spec),
                    "terms": b.terms,
                    "df": b.df.tolist(),
                    "idf": b.idf.tolist(),
                }
                for b in mf.tfidf.blocks
            ],
        },
        "svm": {
            "config": asdict(mf.classifier.config),
            "classes": mf.classifier.classes,
            "weights": mf.classifier.weights.tolist(),
            "intercepts": mf.classifier.intercepts.tolist(),
        },
        "fingerprint": mf.fingerprint,
    }
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, separators=(",", ":"), allow_nan=False) + "\n"


def from_json(text: str) -> ModelFile:
    doc = json.loads(text)
    if doc.get("format") != FORMAT:
        raise ValueError("not an authorprof model file")
    if doc.get("version") != VERSION:
        raise ValueError(f"unsupported model file version {doc.get('version')}")
    t = doc["tfidf"]
    cfg = dict(t["config"])
    cfg["specs"] = tuple(NgramSpec(**s) for s in cfg["specs"])
    config = TfidfConfig(**cfg)
    blocks = [
        Block(NgramSpec(**b["spec"]), list(b["terms"]), np.array(b["df"], dtype=np.int64), np.array(b["idf"], dtype=np.float64))
        for b in t["blocks"]
    ]
    tfidf = TfidfModel(config, blocks, t["n_train_docs"], _prep_from_json(doc["prep"]))
    s = doc["svm"]
    dim = tfidf.dim
    weights = np.array(s["weights"], dtype=np.float64).reshape(-1, dim)
    clf = LinearModel(list(s["classes"]), weights, np.array(s["intercepts"], dtype=np.float64), SvmConfig(**s["config"]))
    return ModelFile(doc["language"], doc["task"], tfidf, clf, doc["fingerprint"])


def save_model(path: str | os.PathLike, mf: ModelFile) -> None:
    write_atomic(path, to_json(mf))


def load_model(path: str | os.PathLike) -> ModelFile:
    return from_json(Path(path).read_text(encoding="utf-8"))
