"""Linear combination of content and social distributions, and the decision."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Sequence, Tuple

from .corpus import LANGUAGES, UND, LabelDistribution, ParseError


@dataclass(frozen=True)
class HybridConfig:
    lambda1: float = 0.5
    lambda2: float = 0.5
    und_threshold: float = 0.0

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("lambda1 and lambda2 must be non-negative")
        if self.lambda1 == 0 and self.lambda2 == 0:
            raise ValueError("lambda1 and lambda2 cannot both be zero")
        if not 0 <= self.und_threshold < 1:
            raise ValueError("und_threshold must lie in [0, 1)")


CONTENT_ONLY = HybridConfig(lambda1=1.0, lambda2=0.0)


def combine(content: LabelDistribution, social: LabelDistribution, cfg: HybridConfig = HybridConfig()) -> Dict[str, float]:
    """``lambda1 * content + lambda2 * social``; missing labels count as 0."""
    labels = list(LANGUAGES) + sorted((set(content) | set(social)) - set(LANGUAGES))
    return {
        lab: cfg.lambda1 * content.get(lab, 0.0) + cfg.lambda2 * social.get(lab, 0.0)
        for lab in labels
    }


def decide(scores: Dict[str, float], cfg: HybridConfig = HybridConfig()) -> str:
    """Argmax label, ties resolved in ``LANGUAGES`` order.

    Returns ``und`` when the best score, rescaled by ``lambda1 + lambda2``
    so the threshold lives on the probability scale, is below
    ``cfg.und_threshold``.
    """
    if not scores:
        raise ValueError("no scores to decide from")
    order = [lab for lab in LANGUAGES if lab in scores] + [lab for lab in scores if lab not in LANGUAGES]
    best = order[0]
    for lab in order[1:]:
        if scores[lab] > scores[best]:
            best = lab
    if cfg.und_threshold > 0 and scores[best] / (cfg.lambda1 + cfg.lambda2) < cfg.und_threshold:
        return UND
    return best


def format_predictions(rows: Iterable[Tuple[str, str, Dict[str, float]]]) -> str:
    lines = []
    for tid, label, scores in rows:
        ranked = sorted(scores.items(), key=lambda kv: (-kv[1], _lang_pos(kv[0])))
        lines.append(f"{tid}\t{label}\t" + ",".join(f"{lab}:{v:.6f}" for lab, v in ranked) + "\n")
    return "".join(lines)


def _lang_pos(lab: str) -> int:
    return LANGUAGES.index(lab) if lab in LANGUAGES else len(LANGUAGES)


def write_predictions(path: str | Path, rows: Sequence[Tuple[str, str, Dict[str, float]]]) -> None:
    Path(path).write_text(format_predictions(rows), encoding="utf-8", newline="\n")


def read_predictions(path: str | Path) -> list[Tuple[str, str]]:
    """``(tweet_id, predicted_label)`` pairs in file order."""
    out = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) not in (2, 3):
            raise ParseError("expected 'tweet_id<TAB>label[<TAB>scores]'", lineno, str(path))
        if fields[1] not in LANGUAGES and fields[1] != UND:
            raise ParseError(f"unknown predicted label {fields[1]!r}", lineno, str(path))
        out.append((fields[0], fields[1]))
    return out
