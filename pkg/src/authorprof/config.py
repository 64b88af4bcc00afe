"""Run configuration: flat ``section.key = value`` files plus command-line overrides.

Precedence is built-in defaults < config file < command-line flags. Unknown
keys and unparsable values are fatal.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Any, Callable, Mapping

from .experiments import GridSpec
from .features import NgramSpec, TfidfConfig
from .svm import LOSSES, SvmConfig
from .textprep import FILTER_MODES, PrepConfig, load_emoji_vocab


class ConfigError(ValueError):
    pass


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("true", "yes", "on", "1"):
        return True
    if v in ("false", "no", "off", "0"):
        return False
    raise ValueError("expected a boolean")


def _opt_float(s: str) -> float | None:
    return None if s.strip().lower() == "none" else float(s)


def _range(s: str) -> tuple[int, int] | None:
    s = s.strip().lower()
    if s == "none":
        return None
    lo, sep, hi = s.partition("-")
    lo_i = int(lo)
    return lo_i, int(hi) if sep else lo_i


def _choice(options) -> Callable[[str], str]:
    def parse(s: str) -> str:
        s = s.strip()
        if s not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return s

    return parse


def _list(item: Callable[[str], Any]) -> Callable[[str], tuple]:
    def parse(s: str) -> tuple:
        parts = [p for p in s.split(",") if p.strip()]
        if not parts:
            raise ValueError("expected a non-empty comma-separated list")
        return tuple(item(p.strip()) for p in parts)

    return parse


def _path(s: str) -> str:
    return s.strip()


def _fmt(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    return str(value)


# key -> (parser, default as text, description)
SCHEMA: dict[str, tuple[Callable[[str], Any], str, str]] = {
    "tfidf.word_ngram": (_range, "1-2", "word n-gram range, or none"),
    "tfidf.char_ngram": (_range, "3-5", "character n-gram range, or none"),
    "tfidf.lowercase": (_bool, "true", "lowercase text before counting"),
    "tfidf.min_df": (int, "2", "drop terms used by fewer authors"),
    "tfidf.max_df": (_opt_float, "none", "drop terms above this author fraction, or none"),
    "tfidf.use_idf": (_bool, "true", "smoothed idf weighting"),
    "tfidf.sublinear_tf": (_bool, "true", "replace tf with 1 + ln(tf)"),
    "tfidf.l2_normalize": (_bool, "true", "L2-normalize each block"),
    "prep.filter_mode": (_choice(FILTER_MODES), "all", "word-pattern filter"),
    "prep.emoji_vocab": (_path, "", "emoji vocabulary file; enables the emoji-only model"),
    "svm.C": (float, "1.0", "SVM penalty"),
    "svm.loss": (_choice(LOSSES), "squared_hinge", "SVM loss"),
    "svm.tol": (float, "0.0001", "projected-gradient stopping tolerance"),
    "svm.max_passes": (int, "1000", "maximum passes over the data"),
    "grid.lowercase": (_list(_bool), "true,false", "grid values for tfidf.lowercase"),
    "grid.max_df": (_list(_opt_float), "0.01,none", "grid values for tfidf.max_df"),
    "grid.min_df": (_list(int), "1,2,3", "grid values for tfidf.min_df"),
    "grid.use_idf": (_list(_bool), "true,false", "grid values for tfidf.use_idf"),
    "grid.sublinear_tf": (_list(_bool), "true,false", "grid values for tfidf.sublinear_tf"),
    "grid.C": (_list(float), "0.1,0.5,1.0,1.5,5.0", "grid values for svm.C"),
    "run.seed": (int, "0", "seed for folds and solver order"),
    "run.k": (int, "5", "cross-validation folds"),
    "run.jobs": (int, "1", "parallel grid-search workers"),
    "run.strict": (_bool, "true", "reject variety labels outside the language's set"),
    "run.per_language": (_bool, "false", "grid search: select a config per language"),
}


def _parse(key: str, raw: str) -> Any:
    if key not in SCHEMA:
        raise ConfigError(f"unknown key {key}")
    parser = SCHEMA[key][0]
    try:
        return parser(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None


@dataclass(frozen=True)
class RunConfig:
    values: Mapping[str, Any]

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def echo(self) -> dict[str, str]:
        out = {}
        for k in sorted(self.values):
            v = self.values[k]
            if SCHEMA[k][0] is _range and v is not None:
                out[k] = f"{v[0]}-{v[1]}"
            else:
                out[k] = _fmt(v)
        return out

    @property
    def seed(self) -> int:
        return self.values["run.seed"]

    def prep(self) -> PrepConfig:
        path = self.values["prep.emoji_vocab"]
        vocab = load_emoji_vocab(path) if path else frozenset()
        return PrepConfig(
            lowercase=self.values["tfidf.lowercase"],
            filter_mode=self.values["prep.filter_mode"],
            emoji_only=bool(vocab),
            emoji_vocab=vocab,
        )

    def tfidf(self) -> TfidfConfig:
        v = self.values
        specs = []
        if v["tfidf.word_ngram"] is not None:
            specs.append(NgramSpec("word", *v["tfidf.word_ngram"]))
        # character n-grams have no meaning over an emoji-only token stream
        if v["tfidf.char_ngram"] is not None and not v["prep.emoji_vocab"]:
            specs.append(NgramSpec("char", *v["tfidf.char_ngram"]))
        try:
            return TfidfConfig(
                specs=tuple(specs),
                lowercase=v["tfidf.lowercase"],
                min_df=v["tfidf.min_df"],
                max_df=v["tfidf.max_df"],
                use_idf=v["tfidf.use_idf"],
                sublinear_tf=v["tfidf.sublinear_tf"],
                l2_normalize=v["tfidf.l2_normalize"],
            )
        except ValueError as exc:
            raise ConfigError(f"tfidf: {exc}") from None

    def svm(self) -> SvmConfig:
        v = self.values
        try:
            return SvmConfig(C=v["svm.C"], loss=v["svm.loss"], tol=v["svm.tol"], max_passes=v["svm.max_passes"], seed=v["run.seed"])
        except ValueError as exc:
            raise ConfigError(f"svm: {exc}") from None

    def grid(self) -> GridSpec:
        v = self.values
        return GridSpec(
            lowercase=v["grid.lowercase"],
            max_df=v["grid.max_df"],
            min_df=v["grid.min_df"],
            use_idf=v["grid.use_idf"],
            sublinear_tf=v["grid.sublinear_tf"],
            C=v["grid.C"],
        )


def parse_config_text(text: str, source: str = "<config>") -> dict[str, Any]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, raw = line.partition("=")
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key = key.strip()
        out[key] = _parse(key, raw.strip())
    return out


def load_config(path: str | os.PathLike | None = None, flags: Mapping[str, str] | None = None) -> RunConfig:
    values = {key: spec[0](spec[1]) for key, spec in SCHEMA.items()}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read(), str(path)))
    for key, raw in (flags or {}).items():
        values[key] = _parse(key, raw)
    cfg = RunConfig(values)
    if cfg["run.k"] < 2:
        raise ConfigError("run.k must be >= 2")
    if cfg["run.jobs"] < 1:
        raise ConfigError("run.jobs must be >= 1")
    cfg.tfidf()
    cfg.svm()
    return cfg
