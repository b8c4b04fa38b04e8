"""One-vs-rest L2-regularised logistic regression over character n-grams.

Each language gets an independent binary problem

    minimise  0.5 * ||w||^2 + C * sum_i log(1 + exp(-y_i (w . x_i + b)))

with the bias left unregularised.  Per-language sigmoid scores are
normalised by their sum to form the content distribution.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from .corpus import LANGUAGES, LabelDistribution, Tweet
from .features import FeatureSpace, build_feature_space, char_ngrams, vectorize_many


class ConvergenceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TrainConfig:
    reg_strength: float = 1.0
    tol: float = 1e-6
    max_iter: int = 500
    ambiguous_positive: bool = True

    def __post_init__(self):
        if self.reg_strength <= 0:
            raise ValueError("reg_strength (C) must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class ContentModel:
    languages: Tuple[str, ...]
    weights: np.ndarray  # (n_languages, dim)
    biases: np.ndarray  # (n_languages,)
    reg_strength: float
    space: FeatureSpace

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def save(self, path: str | Path) -> None:
        lines = [
            "languages\t" + " ".join(self.languages),
            f"dim\t{self.dim}",
            f"C\t{self.reg_strength!r}",
        ]
        for lang, w, b in zip(self.languages, self.weights, self.biases):
            lines.append(lang + "\t" + " ".join(repr(float(x)) for x in w) + " " + repr(float(b)))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, space: FeatureSpace) -> "ContentModel":
        lines = Path(path).read_text(encoding="utf-8").rstrip("\n").split("\n")
        header = dict(line.split("\t", 1) for line in lines[:3])
        languages = tuple(header["languages"].split())
        dim = int(header["dim"])
        if dim != space.size:
            raise ValueError(f"{path}: model dimension {dim} != feature space size {space.size}")
        rows = {}
        for line in lines[3:]:
            lang, values = line.split("\t", 1)
            rows[lang] = np.array(values.split(), dtype=np.float64)
        if set(rows) != set(languages):
            raise ValueError(f"{path}: weight rows do not match the language header")
        weights = np.empty((len(languages), dim))
        biases = np.empty(len(languages))
        for k, lang in enumerate(languages):
            row = rows[lang]
            if row.shape != (dim + 1,):
                raise ValueError(f"{path}: row for {lang} has {row.size} values, expected {dim + 1}")
            weights[k], biases[k] = row[:-1], row[-1]
        return cls(languages, weights, biases, float(header["C"]), space)


def objective(w: np.ndarray, b: float, X, y: np.ndarray, C: float) -> float:
    margins = y * (X @ w + b)
    return 0.5 * float(w @ w) + C * float(np.logaddexp(0.0, -margins).sum())


def gradient(w: np.ndarray, b: float, X, y: np.ndarray, C: float) -> Tuple[np.ndarray, float]:
    """Analytic gradient of :func:`objective` with respect to ``(w, b)``."""
    margins = y * (X @ w + b)
    s = -y * expit(-margins)
    return w + C * (X.T @ s), C * float(s.sum())


def _fit_binary(X, y: np.ndarray, cfg: TrainConfig):
    """Minimise the binary objective; returns ``(w, b, history, converged)``."""
    d = X.shape[1]
    C = cfg.reg_strength

    def fun(theta):
        w, b = theta[:d], theta[d]
        margins = y * (X @ w + b)
        s = -y * expit(-margins)
        f = 0.5 * float(w @ w) + C * float(np.logaddexp(0.0, -margins).sum())
        g = np.empty(d + 1)
        g[:d] = w + C * (X.T @ s)
        g[d] = C * s.sum()
        return f, g

    history: List[float] = [fun(np.zeros(d + 1))[0]]
    res = minimize(
        fun,
        np.zeros(d + 1),
        jac=True,
        method="L-BFGS-B",
        callback=lambda xk: history.append(fun(xk)[0]),
        options={"maxiter": cfg.max_iter, "gtol": cfg.tol, "ftol": 0.0, "maxcor": 20},
    )
    theta = res.x
    gmax = float(np.abs(fun(theta)[1]).max())
    return theta[:d], float(theta[d]), history, gmax <= cfg.tol


def _targets(tweets: Sequence[Tweet], lang: str, ambiguous_positive: bool) -> List[Tuple[int, float]]:
    rows = []
    for i, t in enumerate(tweets):
        gold = t.gold
        if gold is None or gold.kind == "undecided":
            continue
        if gold.kind == "ambiguous" and not ambiguous_positive:
            continue
        rows.append((i, 1.0 if lang in gold.members else -1.0))
    return rows


def train(
    tweets: Sequence[Tweet],
    space: FeatureSpace,
    cfg: TrainConfig = TrainConfig(),
    languages: Sequence[str] = LANGUAGES,
) -> ContentModel:
    """Fit one binary classifier per language.

    Ambiguous tweets are positives for each member language (unless
    ``cfg.ambiguous_positive`` is off, in which case they are dropped) and
    ``und`` tweets are excluded.
    """
    languages = tuple(languages)
    X_all = vectorize_many([char_ngrams(t.text) for t in tweets], space)
    weights = np.zeros((len(languages), space.size))
    biases = np.zeros(len(languages))
    for k, lang in enumerate(languages):
        rows = _targets(tweets, lang, cfg.ambiguous_positive)
        y = np.array([v for _, v in rows])
        if not (y > 0).any():
            raise ValueError(f"no positive training examples for language {lang!r}")
        if not (y < 0).any():
            raise ValueError(f"no negative training examples for language {lang!r}")
        X = X_all[[i for i, _ in rows]]
        w, b, _, converged = _fit_binary(X, y, cfg)
        if not converged:
            warnings.warn(
                f"logistic regression for {lang!r} did not reach gradient tolerance "
                f"{cfg.tol:g} in {cfg.max_iter} iterations",
                ConvergenceWarning,
                stacklevel=2,
            )
        weights[k], biases[k] = w, b
    return ContentModel(languages, weights, biases, cfg.reg_strength, space)


def score_matrix(model: ContentModel, tweets: Sequence[Tweet]) -> np.ndarray:
    """Sigmoid scores, shape ``(n_tweets, n_languages)``."""
    X = vectorize_many([char_ngrams(t.text) for t in tweets], model.space)
    return expit(X @ model.weights.T + model.biases)


def predict_scores(model: ContentModel, tweet: Tweet) -> Dict[str, float]:
    row = score_matrix(model, [tweet])[0]
    return dict(zip(model.languages, map(float, row)))


def normalize(scores: Dict[str, float]) -> LabelDistribution:
    """Divide scores by their sum; all-zero input maps to uniform over LANGUAGES."""
    if any(v < 0 for v in scores.values()):
        raise ValueError("scores must be non-negative")
    total = sum(scores.values())
    if total <= 0:
        return {code: 1.0 / len(LANGUAGES) for code in LANGUAGES}
    return {code: v / total for code, v in scores.items()}


def content_distributions(model: ContentModel, tweets: Sequence[Tweet]) -> List[LabelDistribution]:
    S = score_matrix(model, tweets)
    return [normalize(dict(zip(model.languages, map(float, row)))) for row in S]


def fit_space(tweets: Sequence[Tweet], min_df: int = 1) -> FeatureSpace:
    return build_feature_space([char_ngrams(t.text) for t in tweets], min_df=min_df)


def languages_present(tweets: Sequence[Tweet]) -> Tuple[str, ...]:
    """Languages with at least one positive example, in canonical order."""
    seen = set()
    for t in tweets:
        if t.gold is not None and t.gold.kind != "undecided":
            seen |= t.gold.members
    return tuple(code for code in LANGUAGES if code in seen)


__all__ = [
    "ContentModel",
    "ConvergenceWarning",
    "TrainConfig",
    "content_distributions",
    "fit_space",
    "gradient",
    "languages_present",
    "normalize",
    "objective",
    "predict_scores",
    "score_matrix",
    "train",
]
