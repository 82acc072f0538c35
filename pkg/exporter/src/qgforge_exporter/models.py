"""Small classifier selectors plus a randomly initialized variant per family."""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.ensemble import RandomForestClassifier
from sklearn.linear_model import LogisticRegression
from sklearn.neural_network import MLPClassifier
from sklearn.pipeline import Pipeline
from sklearn.preprocessing import StandardScaler

MODELS = ("logistic", "forest", "mlp")


def make_model(selector: str, seed: int):
    if selector == "logistic":
        return Pipeline([
            ("scale", StandardScaler()),
            ("clf", LogisticRegression(max_iter=2000, random_state=seed)),
        ])
    if selector == "forest":
        return RandomForestClassifier(
            n_estimators=40, max_depth=6, random_state=seed, n_jobs=1
        )
    if selector == "mlp":
        return Pipeline([
            ("scale", StandardScaler()),
            ("clf", MLPClassifier(hidden_layer_sizes=(16,), max_iter=600, random_state=seed)),
        ])
    raise ValueError(f"unknown model selector {selector!r}; pick one of {MODELS}")


def fit_model(selector: str, seed: int, x: np.ndarray, y: np.ndarray):
    model = make_model(selector, seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        model.fit(x, y)
    return model


def random_init_model(selector: str, seed: int, x: np.ndarray):
    """An untrained model of the same family.

    logistic: coefficients drawn at random. mlp: the initial random weights
    (a single near-zero-rate step so scikit-learn materializes them).
    forest: trees grown on uniformly random labels, which leaves no learned
    structure in the parameters.
    """
    rng = np.random.default_rng(seed)
    n, d = x.shape
    if selector == "logistic":
        model = make_model(selector, seed)
        stub_y = np.zeros(n)
        stub_y[: n // 2] = 1.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            model.fit(x, stub_y)
        clf = model.named_steps["clf"]
        clf.coef_ = rng.standard_normal(clf.coef_.shape)
        clf.intercept_ = rng.standard_normal(clf.intercept_.shape)
        return model
    if selector == "mlp":
        model = Pipeline([
            ("scale", StandardScaler()),
            ("clf", MLPClassifier(
                hidden_layer_sizes=(16,),
                max_iter=1,
                learning_rate_init=1e-12,
                random_state=seed,
            )),
        ])
        stub_y = np.zeros(n)
        stub_y[: n // 2] = 1.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            model.fit(x, stub_y)
        return model
    if selector == "forest":
        noise_y = rng.integers(0, 2, size=n).astype(np.float64)
        if noise_y.min() == noise_y.max():
            noise_y[0] = 1.0 - noise_y[0]
        model = RandomForestClassifier(
            n_estimators=40, max_depth=6, random_state=seed, n_jobs=1
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            model.fit(x, noise_y)
        return model
    raise ValueError(f"unknown model selector {selector!r}; pick one of {MODELS}")


def positive_class_probability(model, x: np.ndarray) -> np.ndarray:
    return model.predict_proba(x)[:, 1]
