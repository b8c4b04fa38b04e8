"""Language identification for tweets from content and social context.

A character n-gram logistic regression scores each tweet's text; Modified
Adsorption spreads training labels over a tweet / author / follower graph;
the two distributions are mixed linearly and the best language wins.
"""
from .content_model import ContentModel, TrainConfig
from .corpus import CATEGORIES, LANGUAGES, Dataset, GoldLabel, ParseError, Tweet
from .evaluation import EvaluationReport, score_predictions
from .graph import GraphConfig, NodeId, SocialGraph, build_graph, inject_seeds
from .hybrid import HybridConfig, combine, decide
from .kernels import BACKEND
from .knn import KnnConfig, top_k_neighbors
from .pipeline import PipelineConfig, run_pipeline
from .propagation import MadConfig, propagate, renormalize

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CATEGORIES",
    "ContentModel",
    "Dataset",
    "EvaluationReport",
    "GoldLabel",
    "GraphConfig",
    "HybridConfig",
    "KnnConfig",
    "LANGUAGES",
    "MadConfig",
    "NodeId",
    "ParseError",
    "PipelineConfig",
    "SocialGraph",
    "TrainConfig",
    "Tweet",
    "build_graph",
    "combine",
    "decide",
    "inject_seeds",
    "propagate",
    "renormalize",
    "run_pipeline",
    "score_predictions",
    "top_k_neighbors",
]
