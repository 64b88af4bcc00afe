import pytest

from authorprof.config import SCHEMA, ConfigError, load_config, parse_config_text
from authorprof.experiments import GridSpec
from authorprof.features import CHAR_3_5, WORD_1_2, TfidfConfig
from authorprof.svm import SvmConfig


def test_defaults(tmp_path):
    p = tmp_path / "empty.cfg"
    p.write_text("")
    cfg = load_config(p, {})
    assert cfg.tfidf() == TfidfConfig()
    assert cfg.tfidf().specs == (WORD_1_2, CHAR_3_5)
    assert cfg.svm() == SvmConfig()
    assert cfg.grid() == GridSpec()
    assert len(cfg.grid()) == 240
    assert cfg["run.k"] == 5 and cfg.seed == 0


def test_precedence(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# comment\nsvm.C = 0.5\ntfidf.min_df = 3\n")
    assert load_config(p, {}).svm().C == 0.5
    cfg = load_config(p, {"svm.C": "5"})
    assert cfg.svm().C == 5.0 and cfg.tfidf().min_df == 3


def test_unknown_key(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("min_fd: 2\n")
    with pytest.raises(ConfigError, match="expected 'key = value'"):
        load_config(p)
    p.write_text("tfidf.min_fd = 2\n")
    with pytest.raises(ConfigError, match="unknown key tfidf.min_fd"):
        load_config(p)


@pytest.mark.parametrize(
    "key, value",
    [("tfidf.min_df", "two"), ("tfidf.lowercase", "maybe"), ("svm.loss", "log"), ("grid.C", ""), ("svm.C", "-1")],
)
def test_type_mismatch(key, value):
    with pytest.raises(ConfigError, match=key.split(".")[0]):
        load_config(None, {key: value})


def test_values_parse():
    vals = parse_config_text("tfidf.max_df = none\ngrid.max_df = 0.01, none\ntfidf.char_ngram = none\ngrid.lowercase = yes\n")
    assert vals["tfidf.max_df"] is None
    assert vals["grid.max_df"] == (0.01, None)
    assert vals["tfidf.char_ngram"] is None
    assert vals["grid.lowercase"] == (True,)


def test_echo_roundtrips(tmp_path):
    cfg = load_config(None, {"grid.min_df": "1,2", "tfidf.word_ngram": "1-1"})
    echo = cfg.echo()
    assert echo["grid.min_df"] == "1,2" and echo["tfidf.word_ngram"] == "1-1"
    p = tmp_path / "echo.cfg"
    p.write_text("".join(f"{k} = {v}\n" for k, v in echo.items()))
    assert load_config(p).values == cfg.values
    assert set(echo) == set(SCHEMA)
