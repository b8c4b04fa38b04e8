"""Tweet / user / world graph with seed label distributions.

Edges:

* tweet - tweet: cosine similarity, for every kNN pair (either direction)
* tweet - author: ``tweet_user_weight`` (100)
* user - user: ``user_user_weight`` (1) per follow pair
* user - world: ``user_world_weight`` (0.001) for every user, which keeps
  the graph connected
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Tuple

import numpy as np
import scipy.sparse as sp

from .corpus import Dataset, LabelDistribution, ParseError, Tweet, seed_distribution
from .knn import NeighborList

TWEET, USER, WORLD = "tweet", "user", "world"
_KINDS = (TWEET, USER, WORLD)


class NodeId(NamedTuple):
    kind: str
    key: str


WORLD_NODE = NodeId(WORLD, "world")


@dataclass(frozen=True)
class GraphConfig:
    tweet_user_weight: float = 100.0
    user_user_weight: float = 1.0
    user_world_weight: float = 0.001

    def __post_init__(self):
        for name in ("tweet_user_weight", "user_user_weight", "user_world_weight"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class SocialGraph:
    """Weighted undirected graph; each unordered edge is stored once.

    Edge keys are ``(a, b)`` with ``a`` listed before ``b`` in ``nodes``.
    """

    nodes: Tuple[NodeId, ...]
    edges: Dict[Tuple[NodeId, NodeId], float]
    seeds: Dict[NodeId, LabelDistribution] = field(default_factory=dict)

    def __post_init__(self):
        index = {node: i for i, node in enumerate(self.nodes)}
        if len(index) != len(self.nodes):
            raise ValueError("duplicate node ids")
        object.__setattr__(self, "_index", index)
        for (a, b), w in self.edges.items():
            if a == b:
                raise ValueError(f"self-loop on {a}")
            if not w > 0:
                raise ValueError(f"edge {a}-{b} has non-positive weight {w}")
            if a not in index or b not in index:
                raise ValueError(f"edge {a}-{b} references an unknown node")
            if index[a] > index[b]:
                raise ValueError(f"edge {a}-{b} is not in canonical order")
        for node in self.seeds:
            if node not in index:
                raise ValueError(f"seed for unknown node {node}")

    def index(self, node: NodeId) -> int:
        return self._index[node]

    def edge_key(self, a: NodeId, b: NodeId) -> Tuple[NodeId, NodeId]:
        return (a, b) if self._index[a] < self._index[b] else (b, a)

    def weight(self, a: NodeId, b: NodeId) -> float:
        return self.edges.get(self.edge_key(a, b), 0.0)

    def adjacency(self) -> sp.csr_matrix:
        """Symmetric weight matrix in node order."""
        n = len(self.nodes)
        if not self.edges:
            return sp.csr_matrix((n, n))
        idx = self._index
        rows = np.fromiter((idx[a] for a, _ in self.edges), dtype=np.int64, count=len(self.edges))
        cols = np.fromiter((idx[b] for _, b in self.edges), dtype=np.int64, count=len(self.edges))
        w = np.fromiter(self.edges.values(), dtype=np.float64, count=len(self.edges))
        W = sp.coo_matrix(
            (np.concatenate([w, w]), (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
            shape=(n, n),
        ).tocsr()
        W.sort_indices()
        return W

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        W = self.adjacency()
        seen = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for u in W.indices[W.indptr[v]:W.indptr[v + 1]]:
                if u not in seen:
                    seen.add(int(u))
                    queue.append(int(u))
        return len(seen) == len(self.nodes)

    def counts(self) -> Tuple[int, int]:
        return len(self.nodes), len(self.edges)


def build_graph(dataset: Dataset, neighbors: NeighborList, cfg: GraphConfig = GraphConfig()) -> SocialGraph:
    """Assemble the social graph from all tweets (train and test)."""
    tweet_nodes = [NodeId(TWEET, t.id) for t in dataset.tweets]
    user_nodes = [NodeId(USER, u) for u in dataset.users()]
    nodes = tuple(tweet_nodes + user_nodes + [WORLD_NODE])
    pos = {node: i for i, node in enumerate(nodes)}
    edges: Dict[Tuple[NodeId, NodeId], float] = {}

    def add(a, b, w):
        key = (a, b) if pos[a] < pos[b] else (b, a)
        edges.setdefault(key, w)

    for tid, lst in neighbors.items():
        a = NodeId(TWEET, tid)
        if a not in pos:
            raise ValueError(f"neighbour list for unknown tweet {tid!r}")
        for nid, sim in lst:
            if sim > 0:
                add(a, NodeId(TWEET, nid), sim)
    for t in dataset.tweets:
        add(NodeId(TWEET, t.id), NodeId(USER, t.author), cfg.tweet_user_weight)
    for u, v in sorted(dataset.follows):
        add(NodeId(USER, u), NodeId(USER, v), cfg.user_user_weight)
    for node in user_nodes:
        add(node, WORLD_NODE, cfg.user_world_weight)
    return SocialGraph(nodes, edges)


def inject_seeds(graph: SocialGraph, train_tweets: Iterable[Tweet]) -> SocialGraph:
    """Attach seed distributions to labelled training tweets."""
    seeds = dict(graph.seeds)
    for t in train_tweets:
        if t.gold is None:
            continue
        node = NodeId(TWEET, t.id)
        if node not in graph._index:
            raise ValueError(f"cannot seed tweet {t.id!r}: not a node in the graph")
        seeds[node] = seed_distribution(t.gold)
    return replace(graph, seeds=seeds)


def format_graph(graph: SocialGraph) -> str:
    out: List[str] = ["#nodes\n"]
    out.extend(f"{n.kind}\t{n.key}\n" for n in graph.nodes)
    out.append("#edges\n")
    out.extend(f"{a.kind}\t{a.key}\t{b.kind}\t{b.key}\t{w:.9g}\n" for (a, b), w in graph.edges.items())
    out.append("#seeds\n")
    for node, dist in graph.seeds.items():
        out.append(f"{node.key}\t" + ",".join(f"{lab}:{p!r}" for lab, p in dist.items()) + "\n")
    return "".join(out)


def parse_graph(text: str, source: str | None = None) -> SocialGraph:
    nodes: List[NodeId] = []
    edges: Dict[Tuple[NodeId, NodeId], float] = {}
    seeds: Dict[NodeId, LabelDistribution] = {}
    section = None
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line:
            continue
        if line in ("#nodes", "#edges", "#seeds"):
            section = line
            continue
        fields = line.split("\t")
        try:
            if section == "#nodes" and len(fields) == 2 and fields[0] in _KINDS:
                nodes.append(NodeId(*fields))
            elif section == "#edges" and len(fields) == 5:
                a, b = NodeId(fields[0], fields[1]), NodeId(fields[2], fields[3])
                edges[(a, b)] = float(fields[4])
            elif section == "#seeds" and len(fields) == 2:
                dist = {}
                for item in fields[1].split(","):
                    lab, p = item.rsplit(":", 1)
                    dist[lab] = float(p)
                seeds[NodeId(TWEET, fields[0])] = dist
            else:
                raise ValueError(f"unexpected line in section {section}")
        except ValueError as exc:
            raise ParseError(str(exc), lineno, source) from None
    try:
        return SocialGraph(tuple(nodes), edges, seeds)
    except ValueError as exc:
        raise ParseError(str(exc), None, source) from None


def write_graph(path: str | Path, graph: SocialGraph) -> None:
    Path(path).write_text(format_graph(graph), encoding="utf-8", newline="\n")


def read_graph(path: str | Path) -> SocialGraph:
    path = Path(path)
    return parse_graph(path.read_text(encoding="utf-8"), source=str(path))
