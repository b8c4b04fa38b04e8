"""End-to-end pipeline: content model, social graph, MAD, combination."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .content_model import ContentModel, TrainConfig, content_distributions, fit_space, languages_present, train
from .corpus import Dataset, LabelDistribution, Tweet
from .evaluation import EvaluationReport, score_predictions
from .graph import TWEET, GraphConfig, NodeId, SocialGraph, build_graph, inject_seeds
from .hybrid import HybridConfig, combine, decide
from .knn import KnnConfig, top_k_neighbors
from .propagation import MadConfig, PropagationResult, propagate, renormalize


@dataclass(frozen=True)
class PipelineConfig:
    train: TrainConfig = TrainConfig()
    knn: KnnConfig = KnnConfig()
    graph: GraphConfig = GraphConfig()
    mad: MadConfig = MadConfig()
    hybrid: HybridConfig = HybridConfig()
    min_df: int = 1
    languages: Optional[Tuple[str, ...]] = None  # None: languages seen in training
    threads: int = field(default_factory=lambda: os.cpu_count() or 1)


@dataclass
class PipelineOutput:
    model: ContentModel
    graph: SocialGraph
    propagation: PropagationResult
    content: List[LabelDistribution]
    social: List[LabelDistribution]
    content_predictions: List[Tuple[str, str]]
    hybrid_predictions: List[Tuple[str, str]]
    hybrid_scores: List[Dict[str, float]]

    def evaluate(self, test: Sequence[Tweet]) -> Tuple[EvaluationReport, EvaluationReport]:
        """``(content_only_report, hybrid_report)`` against the test gold."""
        gold = [(t.id, t.gold) for t in test]
        return score_predictions(gold, self.content_predictions), score_predictions(gold, self.hybrid_predictions)


def content_only_predictions(dists: Sequence[LabelDistribution], und_threshold: float = 0.0) -> List[str]:
    cfg = HybridConfig(lambda1=1.0, lambda2=0.0, und_threshold=und_threshold)
    return [decide(combine(d, {}, cfg), cfg) for d in dists]


def build_social_graph(
    train_tweets: Sequence[Tweet],
    test_tweets: Sequence[Tweet],
    follows: FrozenSet[Tuple[str, str]],
    cfg: PipelineConfig,
) -> SocialGraph:
    dataset = Dataset(tuple(train_tweets) + tuple(test_tweets), follows)
    neighbors = top_k_neighbors(dataset.tweets, cfg.knn, threads=cfg.threads)
    return inject_seeds(build_graph(dataset, neighbors, cfg.graph), train_tweets)


def run_pipeline(
    train_tweets: Sequence[Tweet],
    test_tweets: Sequence[Tweet],
    follows: FrozenSet[Tuple[str, str]] = frozenset(),
    cfg: PipelineConfig = PipelineConfig(),
) -> PipelineOutput:
    space = fit_space(train_tweets, cfg.min_df)
    languages = cfg.languages or languages_present(train_tweets)
    model = train(train_tweets, space, cfg.train, languages)
    content = content_distributions(model, test_tweets)

    graph = build_social_graph(train_tweets, test_tweets, follows, cfg)
    result = propagate(graph, cfg.mad)
    social = [renormalize(result.node_scores(NodeId(TWEET, t.id))) for t in test_tweets]

    scores = [combine(c, s, cfg.hybrid) for c, s in zip(content, social)]
    hybrid = [(t.id, decide(sc, cfg.hybrid)) for t, sc in zip(test_tweets, scores)]
    content_pred = list(zip((t.id for t in test_tweets), content_only_predictions(content, cfg.hybrid.und_threshold)))
    return PipelineOutput(model, graph, result, content, social, content_pred, hybrid, scores)
