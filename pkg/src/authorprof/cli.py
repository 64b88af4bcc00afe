"""Command-line front end.

    authorprof train --data DIR --lang en --task gender --out model.json
    authorprof predict --model model.json --data DIR --out preds.tsv
    authorprof evaluate --data DIR --lang en --pred gender=g.tsv --pred variety=v.tsv --out eval.tsv
    authorprof cv --data ROOT --lang en es --task gender variety --out cv.tsv
    authorprof gridsearch --data ROOT --lang en es --task gender variety --out grid.tsv
    authorprof ablate --data DIR --lang en --task gender --out ablation.tsv
    authorprof analyze --data DIR --lang en --out terms.tsv [--lexicon words.tsv]

Exit codes: 0 success, 1 internal error, 2 user or input error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import experiments as ex
from .config import ConfigError, RunConfig, load_config
from .corpus import LANGUAGES, TASKS, Corpus, CorpusError, load_corpus, resolve_corpus_dir
from .features import EmptyVocabularyError, fit_transform_corpus, to_csr, transform
from .modelfile import ModelFile, corpus_fingerprint, load_model, save_model
from .reports import read_predictions, write_predictions, write_report
from .svm import predict_many, train_ovr
from .textprep import FILTER_MODES

logger = logging.getLogger("authorprof")


class UserError(Exception):
    pass


def _load(args, lang: str, cfg: RunConfig) -> Corpus:
    if not Path(args.data).is_dir():
        raise UserError(f"data directory not found: {args.data}")
    return load_corpus(resolve_corpus_dir(args.data, lang), lang, strict=cfg["run.strict"])


def _header(cfg: RunConfig, command: str, **extra) -> dict:
    head = {"command": command}
    head.update(extra)
    head.update(cfg.echo())
    return head


def cmd_train(args, cfg: RunConfig) -> None:
    corpus = _load(args, args.lang, cfg)
    if not corpus.is_labeled(args.task):
        raise UserError(f"corpus has no {args.task} labels")
    tfidf, prep = cfg.tfidf(), cfg.prep()
    model, vectors = fit_transform_corpus(corpus, tfidf, prep)
    clf = train_ovr(to_csr(vectors, model.dim), corpus.labels(args.task), cfg.svm())
    save_model(args.out, ModelFile(corpus.lang, args.task, model, clf, corpus_fingerprint(corpus, args.task)))
    print(
        f"trained {args.task} model on {len(corpus)} {corpus.lang} authors: "
        f"{len(clf.classes)} classes, {model.dim} features -> {args.out}"
    )


def cmd_predict(args, cfg: RunConfig) -> None:
    mf = load_model(args.model)
    lang = args.lang or mf.language
    if lang != mf.language:
        logger.warning("model language %s differs from corpus language %s", mf.language, lang)
    corpus = _load(args, lang, cfg)
    X = to_csr([transform(mf.tfidf, a) for a in corpus], mf.tfidf.dim)
    labels = predict_many(mf.classifier, X) if len(corpus) else []
    write_predictions(args.out, dict(zip(corpus.ids, labels)))
    print(f"wrote {len(labels)} predictions -> {args.out}")


def _parse_pred_specs(specs, default_lang):
    out: dict[str, dict[str, str]] = {}
    for spec in specs:
        target, sep, path = spec.partition("=")
        if not sep:
            raise UserError(f"--pred expects [LANG:]TASK=FILE, got {spec!r}")
        lang, _, task = target.rpartition(":")
        lang = lang or default_lang
        if lang is None:
            raise UserError(f"--pred {spec!r} needs a language (prefix LANG: or pass one --lang)")
        if task not in TASKS:
            raise UserError(f"unknown task {task!r} in --pred")
        out.setdefault(lang, {})[task] = path
    return out


def cmd_evaluate(args, cfg: RunConfig) -> None:
    default = args.lang[0] if len(args.lang) == 1 else None
    specs = _parse_pred_specs(args.pred, default)
    predictions, gold = {}, {}
    for lang, tasks in sorted(specs.items()):
        corpus = _load(args, lang, cfg)
        predictions[lang] = {t: read_predictions(p) for t, p in tasks.items()}
        gold[lang] = ex.gold_labels(corpus, [t for t in ("gender", "variety") if corpus.is_labeled(t)])
    report = ex.evaluate(predictions, gold)
    tasks = ["gender", "variety", "joint"]
    rows = [[lang] + [r.get(t) for t in tasks] for lang, r in report.per_language.items()]
    avg = report.averages
    rows.append(["average"] + [avg.get(t) for t in tasks])
    write_report(args.out, _header(cfg, "evaluate"), ["language"] + tasks, rows)
    print("average " + " ".join(f"{t}={avg[t]:.4f}" for t in tasks if t in avg))


def cmd_cv(args, cfg: RunConfig) -> None:
    rows = []
    k, seed = cfg["run.k"], cfg.seed
    for lang in args.lang:
        corpus = _load(args, lang, cfg)
        for task in args.task:
            if task == "joint":
                rep = ex.run_joint(corpus, cfg.tfidf(), cfg.prep(), cfg.svm(), k, seed)
            else:
                rep = ex.cross_validate(corpus, task, cfg.tfidf(), cfg.prep(), cfg.svm(), k, seed)
            marginals = [rep.config.get("marginal.gender"), rep.config.get("marginal.variety")]
            rows.append([lang, task, rep.mean] + marginals + rep.fold_accuracies)
            print(f"{lang}\t{task}\t{rep.mean:.4f}")
    columns = ["language", "task", "mean", "joint_gender", "joint_variety"] + [f"fold{i}" for i in range(k)]
    write_report(args.out, _header(cfg, "cv"), columns, rows)


def _grid_rows(report: ex.GridReport, prefix=()):
    for r in report.rows:
        yield list(prefix) + [r[key] for key in ex.GRID_KEYS] + [r["status"], r["mean"]] + (
            r["cells"] if r["status"] == "ok" else [float("nan")] * len(report.cells)
        )


def cmd_gridsearch(args, cfg: RunConfig) -> None:
    corpora = {lang: _load(args, lang, cfg) for lang in args.lang}
    kwargs = dict(base_tfidf=cfg.tfidf(), base_prep=cfg.prep(), base_svm=cfg.svm(), jobs=cfg["run.jobs"])
    k, seed = cfg["run.k"], cfg.seed
    grid = cfg.grid()
    if cfg["run.per_language"]:
        rows, bests = [], {}
        for lang, corpus in corpora.items():
            cells = [(corpus, t) for t in args.task]
            best, report = ex.grid_search_cells(cells, grid, k, seed, **kwargs)
            bests[f"best.{lang}"] = " ".join(f"{key}={best[key]}" for key in ex.GRID_KEYS)
            rows.extend(_grid_rows(report, [lang]))
        cell_cols = [f"cell:{t}" for t in args.task]
        columns = ["language", *ex.GRID_KEYS, "status", "mean", *cell_cols]
        write_report(args.out, _header(cfg, "gridsearch", **bests), columns, rows)
        for key, value in bests.items():
            print(f"{key}: {value}")
        return
    cells = [(corpora[lang], t) for lang in args.lang for t in args.task]
    best, report = ex.grid_search_cells(cells, grid, k, seed, **kwargs)
    best_str = " ".join(f"{key}={best[key]}" for key in ex.GRID_KEYS)
    columns = [*ex.GRID_KEYS, "status", "mean", *[f"cell:{c}" for c in report.cells]]
    write_report(args.out, _header(cfg, "gridsearch", best=best_str), columns, _grid_rows(report))
    print(f"best: {best_str} ({len(report.scored_rows)}/{len(report.rows)} points scored)")


def cmd_ablate(args, cfg: RunConfig) -> None:
    rows = []
    k, seed = cfg["run.k"], cfg.seed
    # word unigrams with the resolved weighting settings
    unigram = replace(cfg.tfidf(), specs=ex.UNIGRAM_CONFIG.specs)
    for lang in args.lang:
        corpus = _load(args, lang, cfg)
        for task in args.task:
            for mode, rep in ex.ablation_run(corpus, task, args.modes, k, seed, unigram, cfg.svm()):
                if rep is None:
                    rows.append([lang, task, mode, "failed", float("nan")] + [float("nan")] * k)
                    print(f"{lang}\t{task}\t{mode}\tfailed (empty vocabulary)")
                    continue
                rows.append([lang, task, mode, "ok", rep.mean] + rep.fold_accuracies)
                print(f"{lang}\t{task}\t{mode}\t{rep.mean:.4f}")
    columns = ["language", "task", "mode", "status", "mean"] + [f"fold{i}" for i in range(k)]
    write_report(args.out, _header(cfg, "ablate"), columns, rows)


def cmd_analyze(args, cfg: RunConfig) -> None:
    lang = args.lang[0]
    corpus = _load(args, lang, cfg)
    lowercase = cfg["tfidf.lowercase"]
    if args.lexicon:
        lexicon = ex.load_lexicon(args.lexicon)
        preds = ex.lexicon_baseline(corpus, lexicon, lowercase)
        rows = [[a.id, preds[a.id], a.gender] for a in corpus]
        head = _header(cfg, "analyze", lexicon=args.lexicon)
        if corpus.is_labeled("gender"):
            acc = ex.evaluate_language({"gender": preds}, ex.gold_labels(corpus, ["gender"]))["gender"]
            head["lexicon.accuracy"] = acc
            print(f"lexicon baseline accuracy: {acc:.4f}")
        write_report(args.out, head, ["id", "predicted", "gold"], rows)
        return
    task = args.task[0]
    scores = ex.term_association(corpus, task, lowercase=lowercase)
    classes = sorted(set(corpus.labels(task)))
    head = _header(cfg, "analyze", **{"class.a": classes[0], "class.b": classes[1], "alpha": 1.0})
    rows = [[s.term, s.df_a, s.df_b, s.rel_df_a, s.rel_df_b, s.score] for s in scores]
    write_report(args.out, head, ["term", "df_a", "df_b", "rel_df_a", "rel_df_b", "score"], rows)
    print(f"wrote {len(rows)} terms -> {args.out}")


def _common(p: argparse.ArgumentParser, multi_lang: bool, multi_task: bool, need_data: bool = True) -> None:
    p.add_argument("--data", required=need_data, help="corpus root (<root>/<lang>/) or flat corpus directory")
    if multi_lang:
        p.add_argument("--lang", nargs="+", choices=LANGUAGES, required=True)
    else:
        p.add_argument("--lang", choices=LANGUAGES)
    if multi_task:
        p.add_argument("--task", nargs="+", choices=TASKS, default=["gender"])
    else:
        p.add_argument("--task", choices=TASKS, default="gender")
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--k", type=int, help="cross-validation folds")
    p.add_argument("--C", type=float, help="SVM penalty")
    p.add_argument("--min-df", type=int)
    p.add_argument("--no-strict", action="store_true", help="accept unknown variety labels")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any config key")
    p.add_argument("--out", required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="authorprof", description="N-gram author profiling")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit features and classifier on a labeled corpus")
    _common(p, multi_lang=False, multi_task=False)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="label a (possibly unlabeled) corpus")
    _common(p, multi_lang=False, multi_task=False)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score prediction files against gold labels")
    _common(p, multi_lang=True, multi_task=False)
    p.set_defaults(func=cmd_evaluate)
    p.add_argument("--pred", action="append", required=True, metavar="[LANG:]TASK=FILE")

    p = sub.add_parser("cv", help="k-fold cross-validation")
    _common(p, multi_lang=True, multi_task=True)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("gridsearch", help="grid search over tf-idf and SVM settings")
    _common(p, multi_lang=True, multi_task=True)
    p.add_argument("--per-language", action="store_true")
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("ablate", help="word-pattern filter ablation")
    _common(p, multi_lang=True, multi_task=True)
    p.add_argument("--modes", nargs="+", choices=FILTER_MODES, default=list(FILTER_MODES))
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("analyze", help="term association export or lexicon baseline")
    _common(p, multi_lang=True, multi_task=True)
    p.add_argument("--lexicon", help="word<TAB>male<TAB>female counts; runs the lexicon baseline")
    p.set_defaults(func=cmd_analyze)
    return parser


def _flags(args) -> dict[str, str]:
    flags = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        flags[key.strip()] = value.strip()
    named = {"seed": "run.seed", "jobs": "run.jobs", "k": "run.k", "C": "svm.C", "min_df": "tfidf.min_df"}
    for attr, key in named.items():
        value = getattr(args, attr, None)
        if value is not None:
            flags[key] = str(value)
    if args.no_strict:
        flags["run.strict"] = "false"
    if getattr(args, "per_language", False):
        flags["run.per_language"] = "true"
    return flags


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.command == "train" and not args.lang:
            raise UserError("train requires --lang")
        cfg = load_config(args.config, _flags(args))
        args.func(args, cfg)
    except (UserError, ConfigError, CorpusError, EmptyVocabularyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        logger.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
