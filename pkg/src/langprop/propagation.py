"""Modified Adsorption (MAD) label propagation.

Every node ``v`` splits its random walk into injection (return its seed),
continuation (move to a neighbour) and abandonment (emit the dummy label).
With ``p(u|v) = W(v,u) / sum_u' W(v,u')`` and natural-log entropy ``H(v)``::

    c_v = ln(beta) / ln(beta + exp(H(v)))
    d_v = (1 - c_v) * sqrt(H(v))   if v is seeded, else 0
    z_v = max(c_v + d_v, 1)
    p_cont = c_v / z_v,  p_inj = d_v / z_v,  p_abnd = 1 - p_cont - p_inj

Label scores are then found by Jacobi iteration of::

    Y_v <- (mu1 p_inj(v) S_v + mu2 sum_u W'(v,u) Y_u + mu3 p_abnd(v) r) / M_v
    W'(v,u) = p_cont(v) W(v,u) + p_cont(u) W(u,v)
    M_v = mu1 p_inj(v) + mu2 sum_u W'(v,u) + mu3

where ``S_v`` is the seed distribution and ``r`` the dummy-label indicator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, NamedTuple, Sequence, Tuple

import numpy as np

from . import kernels
from .corpus import LANGUAGES, LabelDistribution, ParseError
from .graph import NodeId, SocialGraph

DUMMY = "__DUMMY__"


@dataclass(frozen=True)
class MadConfig:
    mu1: float = 1.0
    mu2: float = 0.01
    mu3: float = 0.01
    beta: float = 2.0
    max_iters: int = 100
    tol: float = 1e-6

    def __post_init__(self):
        for name in ("mu1", "mu2", "mu3", "tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.beta > 1:
            raise ValueError("beta must be > 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


class NodeWalkProbs(NamedTuple):
    p_inj: float
    p_cont: float
    p_abnd: float


@dataclass
class PropagationResult:
    nodes: Tuple[NodeId, ...]
    labels: Tuple[str, ...]  # real labels; the dummy is stored as the last column
    scores: np.ndarray  # (n_nodes, len(labels) + 1)
    iterations: int
    converged: bool

    def __post_init__(self):
        self._index = {node: i for i, node in enumerate(self.nodes)}

    def node_scores(self, node: NodeId) -> Dict[str, float]:
        row = self.scores[self._index[node]]
        return dict(zip(self.labels + (DUMMY,), map(float, row)))


def walk_probabilities(W, seeded: np.ndarray, beta: float) -> np.ndarray:
    """Vectorised walk probabilities; returns an ``(n, 3)`` array of
    ``(p_inj, p_cont, p_abnd)`` rows for the symmetric CSR matrix ``W``."""
    n = W.shape[0]
    deg = np.asarray(W.sum(axis=1)).ravel()
    if n and (deg <= 0).any():
        bad = int(np.flatnonzero(deg <= 0)[0])
        raise ValueError(f"node {bad} is isolated")
    P = W.copy()
    P.data = W.data / np.repeat(deg, np.diff(W.indptr))
    P.data = P.data * np.log(P.data)
    H = np.maximum(-np.asarray(P.sum(axis=1)).ravel(), 0.0)
    c = math.log(beta) / np.log(beta + np.exp(H))
    d = np.where(seeded, (1.0 - c) * np.sqrt(H), 0.0)
    z = np.maximum(c + d, 1.0)
    p_cont = c / z
    p_inj = d / z
    p_abnd = np.maximum(1.0 - p_cont - p_inj, 0.0)
    return np.column_stack([p_inj, p_cont, p_abnd])


def compute_walk_probs(graph: SocialGraph, cfg: MadConfig = MadConfig()) -> Dict[NodeId, NodeWalkProbs]:
    seeded = np.array([node in graph.seeds for node in graph.nodes], dtype=bool)
    probs = walk_probabilities(graph.adjacency(), seeded, cfg.beta)
    return {node: NodeWalkProbs(*map(float, row)) for node, row in zip(graph.nodes, probs)}


def _seed_matrix(graph: SocialGraph, labels: Sequence[str]) -> np.ndarray:
    col = {lab: j for j, lab in enumerate(labels)}
    S = np.zeros((len(graph.nodes), len(labels) + 1))
    for node, dist in graph.seeds.items():
        i = graph.index(node)
        for lab, p in dist.items():
            if lab not in col:
                raise ValueError(f"seed label {lab!r} on {node} is not one of {tuple(labels)}")
            S[i, col[lab]] = p
    return S


def mad_system(graph: SocialGraph, cfg: MadConfig, labels: Sequence[str] = LANGUAGES):
    """Pieces of the fixed-point system ``Y = inv_m * (base + mu2 W' Y)``.

    Returns ``(W_prime, base, inv_m)`` with ``W_prime`` a CSR matrix.
    """
    W = graph.adjacency()
    S = _seed_matrix(graph, labels)
    seeded = np.array([node in graph.seeds for node in graph.nodes], dtype=bool)
    probs = walk_probabilities(W, seeded, cfg.beta)
    p_inj, p_cont, p_abnd = probs.T
    Wp = W.copy()
    rows = np.repeat(np.arange(W.shape[0]), np.diff(W.indptr))
    Wp.data = W.data * (p_cont[rows] + p_cont[W.indices])
    m = cfg.mu1 * p_inj + cfg.mu2 * np.asarray(Wp.sum(axis=1)).ravel() + cfg.mu3
    base = cfg.mu1 * p_inj[:, None] * S
    base[:, -1] += cfg.mu3 * p_abnd
    return Wp, base, 1.0 / m


def propagate(graph: SocialGraph, cfg: MadConfig = MadConfig(), labels: Sequence[str] = LANGUAGES) -> PropagationResult:
    """Run synchronous MAD sweeps until the largest entry change drops
    below ``cfg.tol`` or ``cfg.max_iters`` sweeps have run."""
    if not graph.seeds:
        raise ValueError("graph has no seed nodes; nothing to propagate")
    labels = tuple(labels)
    Wp, base, inv_m = mad_system(graph, cfg, labels)
    indptr = Wp.indptr.astype(np.int64)
    indices = Wp.indices.astype(np.int32)
    wdata = np.ascontiguousarray(Wp.data, dtype=np.float64)
    base = np.ascontiguousarray(base)
    Y = np.zeros_like(base)
    nxt = np.empty_like(base)
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        delta = kernels.mad_sweep(indptr, indices, wdata, Y, base, inv_m, cfg.mu2, nxt)
        Y, nxt = nxt, Y
        if delta < cfg.tol:
            converged = True
            break
    return PropagationResult(graph.nodes, labels, Y, it, converged)


def renormalize(scores: Dict[str, float], labels: Sequence[str] = LANGUAGES) -> LabelDistribution:
    """Drop the dummy label and rescale the rest to sum to one."""
    real = {lab: float(v) for lab, v in scores.items() if lab != DUMMY}
    total = sum(real.values())
    if total <= 0:
        return {lab: 1.0 / len(labels) for lab in labels}
    return {lab: v / total for lab, v in real.items()}


def social_distribution(result: PropagationResult, node: NodeId) -> LabelDistribution:
    return renormalize(result.node_scores(node), result.labels)


def format_result(result: PropagationResult) -> str:
    names = result.labels + (DUMMY,)
    lines = []
    for node, row in zip(result.nodes, result.scores):
        items = ",".join(f"{lab}:{v:.6f}" for lab, v in zip(names, row))
        lines.append(f"{node.kind}\t{node.key}\t{items}\n")
    return "".join(lines)


def write_result(path: str | Path, result: PropagationResult) -> None:
    Path(path).write_text(format_result(result), encoding="utf-8", newline="\n")


def read_result(path: str | Path) -> Dict[NodeId, Dict[str, float]]:
    """Load a propagation dump as ``node -> {label: score}`` (dummy included)."""
    out: Dict[NodeId, Dict[str, float]] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError("expected 'kind<TAB>key<TAB>label:score,...'", lineno, str(path))
        try:
            scores = {lab: float(v) for lab, v in (item.rsplit(":", 1) for item in fields[2].split(","))}
        except ValueError as exc:
            raise ParseError(str(exc), lineno, str(path)) from None
        out[NodeId(fields[0], fields[1])] = scores
    return out
