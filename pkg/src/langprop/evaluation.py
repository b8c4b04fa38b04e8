"""Shared-task style scorer with ambiguous-gold credit and macro averaging.

Counting rules, per tweet:

* single gold ``l``: predicting ``l`` is a TP for ``l``; anything else is
  an FN for ``l`` and an FP for the predicted category.
* ambiguous gold ``S``: predicting a member of ``S`` is a TP for ``amb``;
  anything else is an FN for ``amb`` and an FP for the predicted category.
* ``und`` gold: predicting ``und`` is a TP for ``und``; anything else is an
  FN for ``und`` and an FP for the predicted category.

Metrics are percentages.  The macro average is the plain mean of the
per-category rows (not the F of the mean P and R).
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .corpus import AMB, CATEGORIES, LANGUAGES, UND, GoldLabel


@dataclass(frozen=True)
class Row:
    precision: float
    recall: float
    f1: float
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def active(self) -> bool:
        return self.tp + self.fp + self.fn > 0


@dataclass(frozen=True)
class EvaluationReport:
    rows: Dict[str, Row]
    precision: float
    recall: float
    f1: float

    def table(self) -> str:
        lines = [f"{'':8}{'P':>8}{'R':>8}{'F':>8}"]
        for cat in CATEGORIES:
            if cat == AMB:
                lines.append("-" * 32)
            r = self.rows[cat]
            if r.active:
                lines.append(f"{cat:8}{r.precision:8.2f}{r.recall:8.2f}{r.f1:8.2f}")
            else:
                # category never occurs: excluded from the average
                lines.append(f"{cat:8}{'-':>8}{'-':>8}{'-':>8}")
        lines.append("-" * 32)
        lines.append(f"{'avg':8}{self.precision:8.2f}{self.recall:8.2f}{self.f1:8.2f}")
        return "\n".join(lines)

    def tsv(self) -> str:
        out = [f"{cat}\t{r.precision:.2f}\t{r.recall:.2f}\t{r.f1:.2f}\n" for cat, r in self.rows.items()]
        out.append(f"avg\t{self.precision:.2f}\t{self.recall:.2f}\t{self.f1:.2f}\n")
        return "".join(out)


def f_score(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2.0 * p * r / (p + r)


def macro_average(rows: Mapping[str, Row] | Sequence[Row]) -> Tuple[float, float, float]:
    """Unweighted mean of P, R and F over the given rows."""
    rows = list(rows.values()) if isinstance(rows, Mapping) else list(rows)
    if not rows:
        return 0.0, 0.0, 0.0
    n = len(rows)
    return (
        sum(r.precision for r in rows) / n,
        sum(r.recall for r in rows) / n,
        sum(r.f1 for r in rows) / n,
    )


def row_from_pr(p: float, r: float) -> Row:
    return Row(p, r, f_score(p, r))


def score_predictions(
    gold: Iterable[Tuple[str, GoldLabel]],
    predicted: Iterable[Tuple[str, str]],
    only_active: bool = True,
) -> EvaluationReport:
    """Score predictions against gold labels.

    With ``only_active`` (the default) the macro average skips categories
    that never occur in gold or predictions; on a corpus covering all
    eight categories this is the plain eight-row mean.
    """
    gold = list(gold)
    pred_map: Dict[str, str] = {}
    dupes = []
    for tid, label in predicted:
        if tid in pred_map:
            dupes.append(tid)
        if label not in LANGUAGES and label != UND:
            raise ValueError(f"prediction for {tid!r} has unknown label {label!r}")
        pred_map[tid] = label
    gold_ids = [tid for tid, _ in gold]
    missing = [tid for tid in gold_ids if tid not in pred_map]
    extra = sorted(set(pred_map) - set(gold_ids))
    if dupes or missing or extra or len(set(gold_ids)) != len(gold_ids):
        problems = []
        if dupes:
            problems.append(f"duplicate predictions: {', '.join(sorted(set(dupes)))}")
        if missing:
            problems.append(f"missing predictions: {', '.join(missing)}")
        if extra:
            problems.append(f"predictions without gold: {', '.join(extra)}")
        if len(set(gold_ids)) != len(gold_ids):
            problems.append("duplicate gold ids")
        raise ValueError("; ".join(problems))

    tp = dict.fromkeys(CATEGORIES, 0)
    fp = dict.fromkeys(CATEGORIES, 0)
    fn = dict.fromkeys(CATEGORIES, 0)
    for tid, g in gold:
        p = pred_map[tid]
        correct = p == UND if g.kind == "undecided" else p in g.members
        cat = g.category
        if correct:
            tp[cat] += 1
        else:
            fn[cat] += 1
            fp[p] += 1

    rows = {}
    for cat in CATEGORIES:
        prec = 100.0 * tp[cat] / (tp[cat] + fp[cat]) if tp[cat] + fp[cat] else 0.0
        rec = 100.0 * tp[cat] / (tp[cat] + fn[cat]) if tp[cat] + fn[cat] else 0.0
        rows[cat] = Row(prec, rec, f_score(prec, rec), tp[cat], fp[cat], fn[cat])
    averaged = {c: r for c, r in rows.items() if r.active} if only_active else rows
    return EvaluationReport(rows, *macro_average(averaged))


def report_from_rows(pr: Mapping[str, Tuple[float, float]]) -> EvaluationReport:
    """Build a report from published per-category precision and recall."""
    rows = {cat: row_from_pr(p, r) for cat, (p, r) in pr.items()}
    return EvaluationReport(rows, *macro_average(rows))


def read_pr_rows(path: str | Path) -> Dict[str, Tuple[float, float]]:
    """Read ``category<TAB>P<TAB>R[<TAB>F]`` lines (an ``avg`` line is ignored)."""
    rows = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").split("\n"), start=1):
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) < 3:
            raise ValueError(f"{path}:{lineno}: expected 'category<TAB>P<TAB>R'")
        if fields[0] == "avg":
            continue
        rows[fields[0]] = (float(fields[1]), float(fields[2]))
    return rows
