"""Author profiling with word and character n-gram tf-idf and a linear SVM."""

from .corpus import AuthorRecord, Corpus, generate_synthetic, load_corpus, merge_labels, split_joint
from .features import NgramSpec, SparseVector, TfidfConfig, TfidfModel, fit, fit_transform_corpus, transform
from .svm import LinearModel, SvmConfig, predict, train_binary, train_ovr
from .textprep import PrepConfig, filter_text, tokenize

__all__ = [
    "AuthorRecord",
    "Corpus",
    "LinearModel",
    "NgramSpec",
    "PrepConfig",
    "SparseVector",
    "SvmConfig",
    "TfidfConfig",
    "TfidfModel",
    "filter_text",
    "fit",
    "fit_transform_corpus",
    "generate_synthetic",
    "load_corpus",
    "merge_labels",
    "predict",
    "split_joint",
    "tokenize",
    "train_binary",
    "train_ovr",
    "transform",
]
__version__ = "0.1.0"
