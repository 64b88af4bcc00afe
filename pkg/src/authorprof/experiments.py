"""Experimental harness: stratified CV, grid search, ablations, joint labels,
the lexicon gender baseline and term-association export."""

from __future__ import annotations

import itertools
import logging
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .corpus import Corpus, CorpusError, split_joint
from .features import (
    EmptyVocabularyError,
    NgramSpec,
    TfidfConfig,
    TfidfModel,
    count_author,
    fit_counts,
    to_csr,
    transform_counts,
)
from .svm import LinearModel, SvmConfig, predict_many, train_ovr
from .textprep import PrepConfig, tokenize

logger = logging.getLogger(__name__)

DEFAULT_GRID = dict(
    lowercase=(True, False),
    max_df=(0.01, None),
    min_df=(1, 2, 3),
    use_idf=(True, False),
    sublinear_tf=(True, False),
    C=(0.1, 0.5, 1.0, 1.5, 5.0),
)
GRID_KEYS = tuple(DEFAULT_GRID)


# --------------------------------------------------------------------- folds


@dataclass(frozen=True)
class FoldAssignment:
    folds: tuple[int, ...]
    k: int
    seed: int

    def split(self, fold: int) -> tuple[list[int], list[int]]:
        train = [i for i, f in enumerate(self.folds) if f != fold]
        test = [i for i, f in enumerate(self.folds) if f == fold]
        return train, test


def stratified_kfold(labels: Sequence[str], k: int, seed: int) -> FoldAssignment:
    """Shuffle each label's members with ``seed`` and deal them round-robin.

    The dealing position carries over between labels so fold totals stay
    balanced too.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    counts = Counter(labels)
    for label in sorted(counts):
        if counts[label] < k:
            raise ValueError(f"label {label} has fewer than k members")
    rng = np.random.default_rng(seed)
    folds = [0] * len(labels)
    pos = 0
    for label in sorted(counts):
        members = [i for i, l in enumerate(labels) if l == label]
        for i in rng.permutation(members):
            folds[int(i)] = pos % k
            pos += 1
    return FoldAssignment(tuple(folds), k, seed)


# ----------------------------------------------------------------- counting


class CountCache:
    """Per-author block term counts, memoized by (spec, lowercase, prep).

    Counting dominates the cost of fitting, and grid points or folds that
    share preprocessing can reuse it.
    """

    def __init__(self, corpus: Corpus):
        self.corpus = corpus
        self._cache: dict[tuple, list[Counter]] = {}

    def counts(self, config: TfidfConfig, prep: PrepConfig) -> list[list[Counter]]:
        per_block = []
        for spec in config.specs:
            key = (spec, config.lowercase, prep)
            if key not in self._cache:
                single = replace(config, specs=(spec,))
                self._cache[key] = [count_author(a, single, prep)[0] for a in self.corpus]
            per_block.append(self._cache[key])
        return [list(blocks) for blocks in zip(*per_block)]


def _prep_for(config: TfidfConfig, prep: PrepConfig | None) -> PrepConfig:
    if prep is None:
        return PrepConfig(lowercase=config.lowercase)
    return replace(prep, lowercase=config.lowercase)


def train_fold(
    counts: Sequence[Sequence[Counter]],
    labels: Sequence[str],
    train_idx: Sequence[int],
    tfidf_config: TfidfConfig,
    prep: PrepConfig,
    svm_config: SvmConfig,
) -> tuple[TfidfModel, LinearModel]:
    """Fit features and classifier on the training rows only."""
    train_counts = [counts[i] for i in train_idx]
    model = fit_counts(train_counts, tfidf_config, prep)
    X = to_csr([transform_counts(model, c) for c in train_counts], model.dim)
    clf = train_ovr(X, [labels[i] for i in train_idx], svm_config)
    return model, clf


# ----------------------------------------------------------------- reports


@dataclass
class CvReport:
    task: str
    language: str
    fold_accuracies: list[float]
    config: dict
    predictions: dict[str, str] = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return sum(self.fold_accuracies) / len(self.fold_accuracies)


@dataclass
class EvalReport:
    # language -> task -> accuracy, tasks among gender/variety/joint
    per_language: dict[str, dict[str, float]]

    @property
    def averages(self) -> dict[str, float]:
        tasks = sorted({t for row in self.per_language.values() for t in row})
        out = {}
        for t in tasks:
            vals = [row[t] for row in self.per_language.values() if t in row]
            if len(vals) == len(self.per_language):
                out[t] = sum(vals) / len(vals)
        return out


@dataclass
class GridReport:
    cells: list[str]
    rows: list[dict]

    @property
    def scored_rows(self) -> list[dict]:
        return [r for r in self.rows if r["status"] == "ok"]


def config_echo(tfidf_config: TfidfConfig, prep: PrepConfig, svm_config: SvmConfig, **extra) -> dict:
    echo = {
        "tfidf.specs": ",".join(f"{s.analyzer}{s.n_min}-{s.n_max}" for s in tfidf_config.specs),
        "tfidf.lowercase": tfidf_config.lowercase,
        "tfidf.min_df": tfidf_config.min_df,
        "tfidf.max_df": tfidf_config.max_df,
        "tfidf.use_idf": tfidf_config.use_idf,
        "tfidf.sublinear_tf": tfidf_config.sublinear_tf,
        "tfidf.l2_normalize": tfidf_config.l2_normalize,
        "prep.filter_mode": prep.filter_mode,
        "prep.emoji_only": prep.emoji_only,
        "svm.C": svm_config.C,
        "svm.loss": svm_config.loss,
        "svm.tol": svm_config.tol,
        "svm.max_passes": svm_config.max_passes,
        "svm.seed": svm_config.seed,
    }
    echo.update(extra)
    return echo


# ----------------------------------------------------------- cross-validation


def cross_validate(
    corpus: Corpus,
    task: str,
    tfidf_config: TfidfConfig | None = None,
    prep: PrepConfig | None = None,
    svm_config: SvmConfig | None = None,
    k: int = 5,
    seed: int = 0,
    *,
    cache: CountCache | None = None,
) -> CvReport:
    tfidf_config = tfidf_config or TfidfConfig()
    svm_config = svm_config or SvmConfig(seed=seed)
    prep = _prep_for(tfidf_config, prep)
    labels = corpus.labels(task)
    assignment = stratified_kfold(labels, k, seed)
    cache = cache if cache is not None and cache.corpus is corpus else CountCache(corpus)
    counts = cache.counts(tfidf_config, prep)

    accuracies = []
    predictions: dict[str, str] = {}
    for fold in range(k):
        train_idx, test_idx = assignment.split(fold)
        model, clf = train_fold(counts, labels, train_idx, tfidf_config, prep, svm_config)
        X = to_csr([transform_counts(model, counts[i]) for i in test_idx], model.dim)
        pred = predict_many(clf, X)
        correct = sum(p == labels[i] for p, i in zip(pred, test_idx))
        accuracies.append(correct / len(test_idx))
        for p, i in zip(pred, test_idx):
            predictions[corpus.authors[i].id] = p
    echo = config_echo(tfidf_config, prep, svm_config, k=k, seed=seed)
    predictions = {a: predictions[a] for a in corpus.ids}
    return CvReport(task, corpus.lang, accuracies, echo, predictions)


# ------------------------------------------------------------- grid search


@dataclass(frozen=True)
class GridSpec:
    lowercase: tuple[bool, ...] = DEFAULT_GRID["lowercase"]
    max_df: tuple[float | None, ...] = DEFAULT_GRID["max_df"]
    min_df: tuple[int, ...] = DEFAULT_GRID["min_df"]
    use_idf: tuple[bool, ...] = DEFAULT_GRID["use_idf"]
    sublinear_tf: tuple[bool, ...] = DEFAULT_GRID["sublinear_tf"]
    C: tuple[float, ...] = DEFAULT_GRID["C"]

    def __post_init__(self) -> None:
        for key in GRID_KEYS:
            if not getattr(self, key):
                raise ValueError(f"grid dimension {key} is empty")

    def points(self) -> list[dict]:
        values = [getattr(self, key) for key in GRID_KEYS]
        return [dict(zip(GRID_KEYS, combo)) for combo in itertools.product(*values)]

    def __len__(self) -> int:
        return math.prod(len(getattr(self, key)) for key in GRID_KEYS)


def point_configs(point: dict, base_tfidf: TfidfConfig, base_svm: SvmConfig) -> tuple[TfidfConfig, SvmConfig]:
    tfidf = replace(
        base_tfidf,
        lowercase=point["lowercase"],
        max_df=point["max_df"],
        min_df=point["min_df"],
        use_idf=point["use_idf"],
        sublinear_tf=point["sublinear_tf"],
    )
    return tfidf, replace(base_svm, C=point["C"])


def _score_point(cells, point, base_tfidf, base_prep, base_svm, k, seed, caches=None) -> dict:
    tfidf, svm_cfg = point_configs(point, base_tfidf, base_svm)
    row = dict(point)
    row["status"] = "ok"
    accs = []
    for c, (corpus, task) in enumerate(cells):
        cache = caches[c] if caches is not None else None
        try:
            rep = cross_validate(corpus, task, tfidf, base_prep, svm_cfg, k, seed, cache=cache)
        except EmptyVocabularyError as exc:
            row["status"] = "failed"
            row["error"] = str(exc)
            accs = []
            break
        accs.append(rep.mean)
    row["cells"] = accs
    row["mean"] = sum(accs) / len(accs) if accs else float("nan")
    return row


def _score_point_job(args):
    return _score_point(*args)


def _cell_name(corpus: Corpus, task: str) -> str:
    return f"{corpus.lang}/{task}"


def grid_search_cells(
    cells: Sequence[tuple[Corpus, str]],
    grid: GridSpec,
    k: int = 5,
    seed: int = 0,
    *,
    base_tfidf: TfidfConfig | None = None,
    base_prep: PrepConfig | None = None,
    base_svm: SvmConfig | None = None,
    jobs: int = 1,
) -> tuple[dict, GridReport]:
    """Score every grid point by mean CV accuracy over all (corpus, task) cells.

    Points whose vocabulary comes out empty stay in the report with status
    ``failed``. Best point: highest mean, then smaller C, then larger
    min_df, then grid order.
    """
    if not cells:
        raise ValueError("no (corpus, task) cells to search over")
    base_tfidf = base_tfidf or TfidfConfig()
    base_prep = base_prep or PrepConfig()
    base_svm = base_svm or SvmConfig(seed=seed)
    points = grid.points()
    if jobs > 1:
        args = [(cells, p, base_tfidf, base_prep, base_svm, k, seed) for p in points]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_score_point_job, args, chunksize=max(1, len(args) // (4 * jobs))))
    else:
        caches = [CountCache(corpus) for corpus, _ in cells]
        rows = [_score_point(cells, p, base_tfidf, base_prep, base_svm, k, seed, caches) for p in points]

    scored = [(i, r) for i, r in enumerate(rows) if r["status"] == "ok"]
    if not scored:
        raise EmptyVocabularyError("every grid point produced an empty vocabulary")
    best_i, best = min(scored, key=lambda ir: (-ir[1]["mean"], ir[1]["C"], -ir[1]["min_df"], ir[0]))
    report = GridReport([_cell_name(c, t) for c, t in cells], rows)
    return {key: best[key] for key in GRID_KEYS}, report


def grid_search(
    corpus: Corpus, task: str, grid: GridSpec, k: int = 5, seed: int = 0, **kwargs
) -> tuple[dict, GridReport]:
    return grid_search_cells([(corpus, task)], grid, k, seed, **kwargs)


# ---------------------------------------------------------------- evaluation


def _accuracy(pred: dict[str, str], gold: dict[str, str]) -> float:
    if set(pred) != set(gold):
        raise ValueError("prediction and gold id sets differ")
    if not gold:
        raise ValueError("no items to evaluate")
    return sum(pred[i] == gold[i] for i in gold) / len(gold)


def _split_joint_map(joint: dict[str, str]) -> tuple[dict[str, str], dict[str, str]]:
    g, v = {}, {}
    for i, label in joint.items():
        g[i], v[i] = split_joint(label)
    return g, v


def evaluate_language(predictions: dict[str, dict[str, str]], gold: dict[str, dict[str, str]]) -> dict[str, float]:
    """Accuracy per task for one language; ``joint`` counts ids with both parts right.

    Predictions under ``joint`` alone are split into gender and variety.
    """
    predictions = dict(predictions)
    gold = dict(gold)
    for side in (predictions, gold):
        if "joint" in side and "gender" not in side and "variety" not in side:
            side["gender"], side["variety"] = _split_joint_map(side["joint"])
    out = {}
    for task in ("gender", "variety"):
        if task in predictions:
            if task not in gold:
                raise CorpusError(f"no gold labels for task {task}")
            out[task] = _accuracy(predictions[task], gold[task])
    if "gender" in out and "variety" in out:
        pg, pv, gg, gv = predictions["gender"], predictions["variety"], gold["gender"], gold["variety"]
        if set(pg) != set(pv):
            raise ValueError("gender and variety predictions cover different ids")
        out["joint"] = sum(pg[i] == gg[i] and pv[i] == gv[i] for i in gg) / len(gg)
    return out


def evaluate(
    predictions: dict[str, dict[str, dict[str, str]]],
    gold: dict[str, dict[str, dict[str, str]]],
) -> EvalReport:
    """``predictions[lang][task][id] -> label``, gold in the same shape."""
    if set(predictions) != set(gold):
        raise ValueError("prediction and gold languages differ")
    return EvalReport({lang: evaluate_language(predictions[lang], gold[lang]) for lang in sorted(gold)})


def gold_labels(corpus: Corpus, tasks: Iterable[str] = ("gender", "variety")) -> dict[str, dict[str, str]]:
    return {t: dict(zip(corpus.ids, corpus.labels(t))) for t in tasks}


# ----------------------------------------------------------------- joint task


def run_joint(
    corpus: Corpus,
    tfidf_config: TfidfConfig | None = None,
    prep: PrepConfig | None = None,
    svm_config: SvmConfig | None = None,
    k: int = 5,
    seed: int = 0,
) -> CvReport:
    """CV of a single classifier over merged ``gender:::variety`` labels.

    The report's config echo carries the marginal accuracies derived from
    the same out-of-fold predictions.
    """
    rep = cross_validate(corpus, "joint", tfidf_config, prep, svm_config, k, seed)
    marg = evaluate_language({"joint": rep.predictions}, gold_labels(corpus))
    rep.config.update({"marginal.gender": marg["gender"], "marginal.variety": marg["variety"], "marginal.joint": marg["joint"]})
    return rep


# ------------------------------------------------------------- lexicon baseline


def load_lexicon(path: str | os.PathLike) -> dict[str, tuple[int, int]]:
    """TSV ``word<TAB>male_count<TAB>female_count``; blank and ``#`` lines skipped."""
    lex = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
            male, female = int(parts[1]), int(parts[2])
            if male < 0 or female < 0:
                raise ValueError(f"{path}:{lineno}: negative count")
            lex[parts[0]] = (male, female)
    return lex


def lexicon_vote(text: str, lexicon: dict[str, tuple[int, int]], lowercase: bool = True, fallback: str = "female") -> str:
    male = female = 0
    for tok in tokenize(text, lowercase):
        counts = lexicon.get(tok)
        if counts is None:
            continue
        if counts[0] > counts[1]:
            male += 1
        elif counts[1] > counts[0]:
            female += 1
    if male > female:
        return "male"
    if female > male:
        return "female"
    return fallback


def lexicon_baseline(corpus: Corpus, lexicon: dict[str, tuple[int, int]], lowercase: bool = True) -> dict[str, str]:
    if not lexicon:
        raise ValueError("lexicon is empty")
    return {a.id: lexicon_vote("\n".join(a.documents), lexicon, lowercase) for a in corpus}


# ----------------------------------------------------------------- ablations

UNIGRAM_CONFIG = TfidfConfig(specs=(NgramSpec("word", 1, 1),))


def ablation_run(
    corpus: Corpus,
    task: str,
    modes: Sequence[str],
    k: int = 5,
    seed: int = 0,
    tfidf_config: TfidfConfig = UNIGRAM_CONFIG,
    svm_config: SvmConfig | None = None,
) -> list[tuple[str, CvReport | None]]:
    """Word-unigram CV over each word-pattern filter mode.

    A mode that leaves no usable vocabulary (e.g. ``uppercase_only`` on
    all-lowercase text) yields ``None`` instead of a report.
    """
    rows = []
    for mode in modes:
        prep = PrepConfig(lowercase=tfidf_config.lowercase, filter_mode=mode)
        try:
            rep = cross_validate(corpus, task, tfidf_config, prep, svm_config, k, seed)
        except EmptyVocabularyError as exc:
            logger.warning("ablation mode %s failed: %s", mode, exc)
            rep = None
        rows.append((mode, rep))
    return rows


# --------------------------------------------------------- term association


@dataclass(frozen=True)
class TermScore:
    term: str
    df_a: int
    df_b: int
    rel_df_a: float
    rel_df_b: float
    score: float


def term_association(
    corpus: Corpus,
    task: str = "gender",
    classes: tuple[str, str] | None = None,
    alpha: float = 1.0,
    lowercase: bool = True,
) -> list[TermScore]:
    """Word-unigram document frequencies per class and ``ln((df_a+alpha)/(df_b+alpha))``.

    Sorted by descending score, then term.
    """
    labels = corpus.labels(task)
    if classes is None:
        present = sorted(set(labels))
        if len(present) != 2:
            raise ValueError(f"term association needs exactly two classes, found {len(present)}")
        classes = (present[0], present[1])
    a_cls, b_cls = classes
    df_a: Counter = Counter()
    df_b: Counter = Counter()
    n_a = n_b = 0
    for author, label in zip(corpus, labels):
        terms = set(tokenize("\n".join(author.documents), lowercase))
        if label == a_cls:
            df_a.update(terms)
            n_a += 1
        elif label == b_cls:
            df_b.update(terms)
            n_b += 1
    rows = []
    for term in set(df_a) | set(df_b):
        da, db = df_a[term], df_b[term]
        rows.append(
            TermScore(
                term, da, db,
                da / n_a if n_a else 0.0,
                db / n_b if n_b else 0.0,
                math.log((da + alpha) / (db + alpha)),
            )
        )
    rows.sort(key=lambda r: (-r.score, r.term))
    return rows
