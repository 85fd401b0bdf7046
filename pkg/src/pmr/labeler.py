"""Perceptron relevance labeling over term-frequency features.

Features are bag-of-word and phrase match frequencies of the profile's
disease, gene (variants included) and drug/treatment term classes in
title, abstract and keywords: 18 numbers plus a constant bias.  The
classifier is a plain perceptron whose misclassification gradient is fed
to a pluggable per-weight optimizer (sgd, adagrad or adadelta).
"""

from __future__ import annotations

import json

import numpy as np
from sklearn.base import BaseEstimator

from .index import Article, tokenize
from .profile import ExpandedProfile

TERM_CLASSES = ("disease", "gene", "drug")
FEATURE_FIELDS = ("title", "abstract", "keywords")

FEATURE_NAMES = tuple(
    f"{cls}_{fld}_{kind}"
    for cls in TERM_CLASSES
    for fld in FEATURE_FIELDS
    for kind in ("token", "phrase")
) + ("bias",)

N_FEATURES = len(FEATURE_NAMES)  # 19

MODEL_FORMAT = "pmr-perceptron"
MODEL_VERSION = 1


def _phrase_count(tokens: list[str], phrase: tuple[str, ...]) -> int:
    if not phrase or len(phrase) > len(tokens):
        return 0
    n = len(phrase)
    return sum(1 for i in range(len(tokens) - n + 1) if tuple(tokens[i : i + n]) == phrase)


def class_term_sets(ep: ExpandedProfile) -> dict[str, frozenset[str]]:
    return {
        "disease": ep.disease_terms,
        "gene": ep.gene_class_terms(),
        "drug": frozenset(set(ep.drug_terms) | set(ep.treatment_keywords)),
    }


def extract_features(article: Article, ep: ExpandedProfile) -> np.ndarray:
    """Feature vector for one (article, expanded profile) pair.

    Per class and field: (tokens belonging to the class's token set) and
    (whole-phrase occurrences of any class term), both normalized by the
    field's token count; empty fields contribute zeros.  The final entry
    is the constant bias 1.0.
    """
    classes = class_term_sets(ep)
    class_phrases = {
        cls: [tuple(tokenize(t)) for t in sorted(terms) if tokenize(t)]
        for cls, terms in classes.items()
    }
    class_tokens = {
        cls: {tok for phrase in phrases for tok in phrase}
        for cls, phrases in class_phrases.items()
    }

    values = []
    for cls in TERM_CLASSES:
        for fld in FEATURE_FIELDS:
            tokens = tokenize(article.field_text(fld))
            n = len(tokens)
            if n == 0:
                values.extend((0.0, 0.0))
                continue
            token_hits = sum(1 for t in tokens if t in class_tokens[cls])
            phrase_hits = sum(_phrase_count(tokens, p) for p in class_phrases[cls])
            values.extend((token_hits / n, phrase_hits / n))
    values.append(1.0)
    return np.asarray(values, dtype=np.float64)


class _Sgd:
    def __init__(self, lr: float, dim: int):
        self.lr = lr

    def step(self, g: np.ndarray) -> np.ndarray:
        return -self.lr * g

    def state(self) -> dict:
        return {}


class _Adagrad:
    """Accumulated squared gradients; step = -lr * g / sqrt(G + eps)."""

    def __init__(self, lr: float, dim: int, eps: float = 1e-8):
        self.lr = lr
        self.eps = eps
        self.g2 = np.zeros(dim)

    def step(self, g: np.ndarray) -> np.ndarray:
        self.g2 = self.g2 + g * g
        return -self.lr * g / np.sqrt(self.g2 + self.eps)

    def state(self) -> dict:
        return {"g2": self.g2.copy()}


class _Adadelta:
    """Decaying averages of squared gradients and squared steps.

    eg <- rho*eg + (1-rho)*g^2
    step = g * sqrt(ed + eps) / sqrt(eg + eps)
    ed <- rho*ed + (1-rho)*step^2
    update = -lr * step
    """

    def __init__(self, lr: float, dim: int, rho: float = 0.95, eps: float = 1e-6):
        self.lr = lr
        self.rho = rho
        self.eps = eps
        self.eg = np.zeros(dim)
        self.ed = np.zeros(dim)

    def step(self, g: np.ndarray) -> np.ndarray:
        self.eg = self.rho * self.eg + (1.0 - self.rho) * g * g
        delta = g * np.sqrt(self.ed + self.eps) / np.sqrt(self.eg + self.eps)
        self.ed = self.rho * self.ed + (1.0 - self.rho) * delta * delta
        return -self.lr * delta

    def state(self) -> dict:
        return {"eg": self.eg.copy(), "ed": self.ed.copy()}


OPTIMIZERS = ("sgd", "adagrad", "adadelta")


def make_optimizer(name: str, lr: float, dim: int, rho: float = 0.95,
                   adadelta_eps: float = 1e-6, adagrad_eps: float = 1e-8):
    if name == "sgd":
        return _Sgd(lr, dim)
    if name == "adagrad":
        return _Adagrad(lr, dim, eps=adagrad_eps)
    if name == "adadelta":
        return _Adadelta(lr, dim, rho=rho, eps=adadelta_eps)
    raise ValueError(f"unknown optimizer {name!r}; expected one of {OPTIMIZERS}")


class PerceptronLabeler(BaseEstimator):
    """Binary relevance perceptron with pluggable per-weight optimizers.

    fit() takes relevance grades (0/1/2, or already-signed +-1 targets);
    anything >= 1 trains as relevant.  Examples are visited in
    seeded-shuffle order each epoch, and a misclassified example
    (target * (w.x) <= 0) hands the gradient -target*x to the optimizer.
    Training is deterministic: the same data, settings and seed always
    produce bitwise-identical weights.
    """

    def __init__(self, optimizer: str = "adadelta", learning_rate: float = 0.01,
                 epochs: int = 10, seed: int = 42, rho: float = 0.95,
                 adadelta_eps: float = 1e-6, adagrad_eps: float = 1e-8):
        self.optimizer = optimizer
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.seed = seed
        self.rho = rho
        self.adadelta_eps = adadelta_eps
        self.adagrad_eps = adagrad_eps

    def fit(self, X, y) -> "PerceptronLabeler":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        if X.ndim != 2 or len(X) == 0:
            raise ValueError("need a non-empty 2d feature matrix")
        if len(X) != len(y):
            raise ValueError("X and y length mismatch")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        bad = np.flatnonzero(~np.isfinite(X).all(axis=1))
        if bad.size:
            raise ValueError(f"non-finite feature in example {bad[0]}")

        targets = np.where(y >= 1, 1.0, -1.0)
        n, dim = X.shape
        w = np.zeros(dim)
        opt = make_optimizer(
            self.optimizer, self.learning_rate, dim,
            rho=self.rho, adadelta_eps=self.adadelta_eps, adagrad_eps=self.adagrad_eps,
        )
        rng = np.random.default_rng(self.seed)
        updates = 0
        for _ in range(self.epochs):
            for i in rng.permutation(n):
                x = X[i]
                t = targets[i]
                if t * float(w @ x) <= 0.0:
                    w = w + opt.step(-t * x)
                    updates += 1
        self.weights_ = w
        self.n_features_in_ = dim
        self.n_updates_ = updates
        return self

    def decision_function(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return X @ self.weights_

    def predict(self, X) -> np.ndarray:
        """+1 (relevant) iff w.x > 0; the boundary itself counts as irrelevant."""
        return np.where(self.decision_function(X) > 0.0, 1, -1)

    def training_accuracy(self, X, y) -> float:
        targets = np.where(np.asarray(y) >= 1, 1, -1)
        return float(np.mean(self.predict(X) == targets))


def save_model(model: PerceptronLabeler, path) -> None:
    """Persist weights and training metadata as a versioned JSON text file."""
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "optimizer": model.optimizer,
        "learning_rate": model.learning_rate,
        "epochs": model.epochs,
        "seed": model.seed,
        "rho": model.rho,
        "adadelta_eps": model.adadelta_eps,
        "adagrad_eps": model.adagrad_eps,
        "feature_names": list(FEATURE_NAMES),
        "weights": [float(v) for v in model.weights_],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> PerceptronLabeler:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != MODEL_FORMAT:
        raise ValueError("not a perceptron model file")
    if payload.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {payload.get('version')!r}")
    model = PerceptronLabeler(
        optimizer=payload["optimizer"],
        learning_rate=payload["learning_rate"],
        epochs=payload["epochs"],
        seed=payload["seed"],
        rho=payload.get("rho", 0.95),
        adadelta_eps=payload.get("adadelta_eps", 1e-6),
        adagrad_eps=payload.get("adagrad_eps", 1e-8),
    )
    model.weights_ = np.asarray(payload["weights"], dtype=np.float64)
    model.n_features_in_ = len(model.weights_)
    return model
