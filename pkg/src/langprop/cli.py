"""Command-line interface.

Subcommands: train-content, build-graph, propagate, predict, evaluate,
synth, run-all.  Any flag can also be set from a ``--config`` file of
``key = value`` lines (command-line flags win).

Exit codes: 0 success, 1 internal error, 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import os
import sys
import warnings
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from .content_model import ContentModel, TrainConfig, content_distributions, fit_space, languages_present, train
from .corpus import LANGUAGES, UND, Dataset, ParseError, read_follows, read_tweets, write_follows, write_tweets
from .evaluation import read_pr_rows, report_from_rows, score_predictions
from .features import FeatureSpace
from .graph import TWEET, GraphConfig, NodeId, build_graph, inject_seeds, read_graph, write_graph
from .hybrid import HybridConfig, combine, decide, read_predictions, write_predictions
from .kernels import BACKEND
from .knn import KnnConfig, top_k_neighbors, write_neighbors
from .pipeline import content_only_predictions
from .propagation import MadConfig, propagate, read_result, renormalize, write_result
from .synth import SynthConfig, generate


class UsageError(Exception):
    """Bad flags, missing inputs or invalid data; exits with status 2."""


def _require(path: Optional[str], flag: str) -> Path:
    if not path:
        raise UsageError(f"{flag} is required")
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return p


# -- argument groups ---------------------------------------------------------

def _add_train_args(p):
    g = p.add_argument_group("content model")
    g.add_argument("--reg-c", type=float, default=1.0, help="inverse L2 regularisation strength C")
    g.add_argument("--lr-tol", type=float, default=1e-6, help="gradient max-norm tolerance")
    g.add_argument("--lr-max-iter", type=int, default=500)
    g.add_argument("--min-df", type=int, default=1)
    g.add_argument("--languages", default="auto",
                   help="comma-separated language codes, or 'auto' for those seen in training")
    g.add_argument("--no-ambiguous-positives", action="store_true",
                   help="drop ambiguous tweets from training instead of using them as positives")


def _add_graph_args(p):
    g = p.add_argument_group("graph")
    g.add_argument("--k-fraction", type=float, default=0.25)
    g.add_argument("--k-max", type=int, default=None)
    g.add_argument("--tweet-user-weight", type=float, default=100.0)
    g.add_argument("--user-user-weight", type=float, default=1.0)
    g.add_argument("--user-world-weight", type=float, default=0.001)


def _add_mad_args(p):
    g = p.add_argument_group("modified adsorption")
    g.add_argument("--mu1", type=float, default=1.0)
    g.add_argument("--mu2", type=float, default=0.01)
    g.add_argument("--mu3", type=float, default=0.01)
    g.add_argument("--beta", type=float, default=2.0)
    g.add_argument("--max-iters", type=int, default=100)
    g.add_argument("--tol", type=float, default=1e-6)


def _add_hybrid_args(p):
    g = p.add_argument_group("combination")
    g.add_argument("--lambda1", type=float, default=0.5)
    g.add_argument("--lambda2", type=float, default=0.5)
    g.add_argument("--und-threshold", type=float, default=0.0)


def _train_config(a) -> TrainConfig:
    return TrainConfig(a.reg_c, a.lr_tol, a.lr_max_iter, not a.no_ambiguous_positives)


def _knn_config(a) -> KnnConfig:
    return KnnConfig(a.k_fraction, a.k_max)


def _graph_config(a) -> GraphConfig:
    return GraphConfig(a.tweet_user_weight, a.user_user_weight, a.user_world_weight)


def _mad_config(a) -> MadConfig:
    return MadConfig(a.mu1, a.mu2, a.mu3, a.beta, a.max_iters, a.tol)


def _hybrid_config(a) -> HybridConfig:
    return HybridConfig(a.lambda1, a.lambda2, a.und_threshold)


def _languages(spec: str, tweets) -> tuple:
    if spec == "auto":
        return languages_present(tweets)
    codes = tuple(c for c in spec.split(",") if c)
    for c in codes:
        if c not in LANGUAGES:
            raise UsageError(f"unknown language code {c!r}")
    return codes


# -- steps -------------------------------------------------------------------

def train_content_step(tweets_path, model_path, space_path, cfg: TrainConfig, languages="auto",
                       min_df=1, dev_path=None, out=None):
    tweets = read_tweets(_require(tweets_path, "--tweets"))
    labelled = [t for t in tweets if t.gold is not None]
    if not labelled:
        raise UsageError(f"{tweets_path}: no labelled tweets to train on")
    space = fit_space(labelled, min_df)
    langs = _languages(languages, labelled)
    model = train(labelled, space, cfg, langs)
    space.save(space_path)
    model.save(model_path)
    print(f"trained {len(langs)} languages ({','.join(langs)}) on {len(labelled)} tweets, "
          f"{space.size} features, C={cfg.reg_strength:g}", file=out)
    if dev_path:
        dev = [t for t in read_tweets(_require(dev_path, "--dev")) if t.gold is not None]
        preds = content_only_predictions(content_distributions(model, dev))
        hits = sum((p == UND) if t.gold.kind == "undecided" else (p in t.gold.members)
                   for t, p in zip(dev, preds))
        print(f"held-out accuracy: {100.0 * hits / max(len(dev), 1):.2f}% ({hits}/{len(dev)})", file=out)
    return model


def build_graph_step(train_path, test_paths, follows_path, graph_path, knn_cfg, graph_cfg,
                     neighbors_path=None, threads=1, out=None):
    train_tweets = read_tweets(_require(train_path, "--train"))
    tweets = list(train_tweets)
    for p in test_paths or ():
        tweets.extend(read_tweets(_require(p, "--test")))
    follows = read_follows(_require(follows_path, "--follows")) if follows_path else frozenset()
    try:
        dataset = Dataset(tuple(tweets), follows)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    neighbors = top_k_neighbors(dataset.tweets, knn_cfg, threads=threads)
    if neighbors_path:
        write_neighbors(neighbors_path, neighbors)
    graph = inject_seeds(build_graph(dataset, neighbors, graph_cfg), train_tweets)
    write_graph(graph_path, graph)
    n_nodes, n_edges = graph.counts()
    print(f"{n_nodes} nodes, {n_edges} edges, {len(graph.seeds)} seeds", file=out)
    return graph


def propagate_step(graph_path, out_path, cfg: MadConfig, out=None):
    graph = read_graph(_require(graph_path, "--graph"))
    if not graph.seeds:
        raise UsageError(f"{graph_path}: graph has no seeded nodes, nothing to propagate "
                         "(were any training tweets labelled?)")
    result = propagate(graph, cfg)
    write_result(out_path, result)
    print(f"converged={'true' if result.converged else 'false'} iters={result.iterations}", file=out)
    if not result.converged:
        warnings.warn(f"MAD stopped after {result.iterations} sweeps without reaching tol={cfg.tol:g}")
    return result


def predict_step(model_path, space_path, tweets_path, propagation_path, out_path, cfg: HybridConfig,
                 content_only=False, out=None):
    space = FeatureSpace.load(_require(space_path, "--space"))
    model = ContentModel.load(_require(model_path, "--model"), space)
    tweets = read_tweets(_require(tweets_path, "--tweets"))
    content = content_distributions(model, tweets)
    if content_only:
        labels = content_only_predictions(content, cfg.und_threshold)
        scores = [combine(c, {}, HybridConfig(1.0, 0.0)) for c in content]
    else:
        dump = read_result(_require(propagation_path, "--propagation"))
        missing = [t.id for t in tweets if NodeId(TWEET, t.id) not in dump]
        if missing:
            shown = ", ".join(missing[:10]) + (" ..." if len(missing) > 10 else "")
            raise UsageError(f"tweets absent from propagation dump {propagation_path}: {shown}")
        social = [renormalize(dump[NodeId(TWEET, t.id)]) for t in tweets]
        scores = [combine(c, s, cfg) for c, s in zip(content, social)]
        labels = [decide(s, cfg) for s in scores]
    rows = [(t.id, lab, sc) for t, lab, sc in zip(tweets, labels, scores)]
    write_predictions(out_path, rows)
    print(f"wrote {len(rows)} predictions to {out_path}", file=out)
    return rows


def evaluate_step(gold_path, predictions_path, tsv_path=None, out=None):
    gold = [(t.id, t.gold) for t in read_tweets(_require(gold_path, "--gold"))]
    unlabelled = [tid for tid, g in gold if g is None]
    if unlabelled:
        raise UsageError(f"{gold_path}: tweets without gold labels: {', '.join(unlabelled[:10])}")
    preds = read_predictions(_require(predictions_path, "--predictions"))
    try:
        report = score_predictions(gold, preds)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(report.table(), file=out)
    if tsv_path:
        Path(tsv_path).write_text(report.tsv(), encoding="utf-8")
    return report


# -- commands ----------------------------------------------------------------

def cmd_train_content(a):
    train_content_step(a.tweets, a.model, a.space, _train_config(a), a.languages, a.min_df, a.dev)


def cmd_build_graph(a):
    build_graph_step(a.train, a.test, a.follows, a.graph, _knn_config(a), _graph_config(a),
                     a.neighbors, a.threads)


def cmd_propagate(a):
    propagate_step(a.graph, a.out, _mad_config(a))


def cmd_predict(a):
    if not a.content_only and not a.propagation:
        raise UsageError("--propagation is required unless --content-only is given")
    predict_step(a.model, a.space, a.tweets, a.propagation, a.out, _hybrid_config(a), a.content_only)


def cmd_evaluate(a):
    if a.from_rows:
        report = report_from_rows(read_pr_rows(_require(a.from_rows, "--from-rows")))
        for cat, r in report.rows.items():
            print(f"{cat:8}{r.precision:8.2f}{r.recall:8.2f}{r.f1:8.2f}")
        print(f"{'avg':8}{report.precision:8.2f}{report.recall:8.2f}{report.f1:8.2f}")
        if a.out:
            Path(a.out).write_text(report.tsv(), encoding="utf-8")
        return
    if not (a.gold and a.predictions):
        raise UsageError("--gold and --predictions are required (or use --from-rows)")
    evaluate_step(a.gold, a.predictions, a.out)


def cmd_synth(a):
    cfg = SynthConfig(
        seed=a.seed, n_train=a.n_train, n_test=a.n_test, n_users=a.n_users,
        n_communities=a.n_communities, vocab_size=a.vocab_size, overlap=a.overlap,
        monolinguality=a.monolinguality, p_in=a.p_in, p_out=a.p_out,
        min_words=a.min_words, max_words=a.max_words,
        languages=tuple(a.synth_languages.split(",")),
    )
    train_tweets, test_tweets, follows = generate(cfg)
    out_dir = Path(a.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_tweets(out_dir / "train.tsv", train_tweets)
    write_tweets(out_dir / "test.tsv", test_tweets)
    write_follows(out_dir / "follows.tsv", follows)
    print(f"wrote {len(train_tweets)} train / {len(test_tweets)} test tweets and "
          f"{len(follows)} follow pairs to {out_dir}")


def cmd_run_all(a):
    work = Path(a.work_dir)
    work.mkdir(parents=True, exist_ok=True)
    model, space = work / "model.txt", work / "space.tsv"
    graph, dump = work / "graph.tsv", work / "propagation.tsv"
    hybrid_out, content_out = work / "predictions.tsv", work / "predictions_content.tsv"
    train_content_step(a.train, model, space, _train_config(a), a.languages, a.min_df)
    build_graph_step(a.train, [a.test], a.follows, graph, _knn_config(a), _graph_config(a), None, a.threads)
    propagate_step(graph, dump, _mad_config(a))
    cfg = _hybrid_config(a)
    predict_step(model, space, a.test, dump, hybrid_out, cfg)
    predict_step(model, space, a.test, None, content_out, cfg, content_only=True)
    test_tweets = read_tweets(a.test)
    if test_tweets and all(t.gold is not None for t in test_tweets):
        print("\ncontent only:")
        content_report = evaluate_step(a.test, content_out, work / "report_content.tsv")
        print("\ncontent + social:")
        hybrid_report = evaluate_step(a.test, hybrid_out, work / "report.tsv")
        print(f"\nmacro F: content {content_report.f1:.2f}, content+social {hybrid_report.f1:.2f}")


# -- parser ------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="langprop", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    parser.add_argument("--config", help="file of 'key = value' lines setting any flag")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for neighbour search (default: all cores)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-content", help="train the character n-gram content model")
    p.add_argument("--tweets", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--dev", help="labelled tweets for a held-out accuracy check")
    _add_train_args(p)
    p.set_defaults(func=cmd_train_content)

    p = sub.add_parser("build-graph", help="build the tweet/user/world graph with seeds")
    p.add_argument("--train", required=True, help="labelled tweets; these become seeds")
    p.add_argument("--test", action="append", default=[], help="unseeded tweets (repeatable)")
    p.add_argument("--follows")
    p.add_argument("--graph", required=True, help="output graph file")
    p.add_argument("--neighbors", help="optional kNN dump")
    _add_graph_args(p)
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("propagate", help="run Modified Adsorption on a graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", required=True)
    _add_mad_args(p)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("predict", help="combine content and social scores")
    p.add_argument("--model", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--tweets", required=True)
    p.add_argument("--propagation")
    p.add_argument("--out", required=True)
    p.add_argument("--content-only", action="store_true")
    _add_hybrid_args(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions, shared-task style")
    p.add_argument("--gold")
    p.add_argument("--predictions")
    p.add_argument("--from-rows", help="recompute F and averages from 'category P R' rows")
    p.add_argument("--out", help="write the report as TSV")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate a synthetic two-language corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-train", type=int, default=500)
    p.add_argument("--n-test", type=int, default=500)
    p.add_argument("--n-users", type=int, default=100)
    p.add_argument("--n-communities", type=int, default=2)
    p.add_argument("--vocab-size", type=int, default=200)
    p.add_argument("--overlap", type=float, default=0.8)
    p.add_argument("--monolinguality", type=float, default=0.9)
    p.add_argument("--p-in", type=float, default=0.1)
    p.add_argument("--p-out", type=float, default=0.005)
    p.add_argument("--min-words", type=int, default=3)
    p.add_argument("--max-words", type=int, default=8)
    p.add_argument("--synth-languages", default="es,ca")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run-all", help="train, build graph, propagate, predict and evaluate")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--follows")
    p.add_argument("--work-dir", required=True)
    _add_train_args(p)
    _add_graph_args(p)
    _add_mad_args(p)
    _add_hybrid_args(p)
    p.set_defaults(func=cmd_run_all)

    return parser, sub.choices


def read_config(path: str) -> Dict[str, str]:
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser, subparser, values: Dict[str, str]):
    actions = {a.dest: (parser, a) for a in parser._actions}
    actions.update({a.dest: (subparser, a) for a in subparser._actions})
    for key, raw in values.items():
        if key in ("config", "help", "version", "command", "func") or key not in actions:
            raise UsageError(f"config key {key!r} is not an option of this command")
        owner, action = actions[key]
        if isinstance(action, argparse._StoreTrueAction):
            value = raw.lower() in ("1", "true", "yes", "on")
        elif isinstance(action, argparse._AppendAction):
            value = [v.strip() for v in raw.split(",") if v.strip()]
        else:
            try:
                value = action.type(raw) if action.type else raw
            except ValueError:
                raise UsageError(f"config key {key!r}: invalid value {raw!r}") from None
        owner.set_defaults(**{key: value})


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    def show(message, category, filename, lineno, file=None, line=None):
        print(f"warning: {message}", file=sys.stderr)

    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = show
        try:
            if args.config:
                _apply_config(parser, subparsers[args.command], read_config(_require(args.config, "--config")))
                args = parser.parse_args(argv)
            args.func(args)
        except (UsageError, ParseError, FileNotFoundError, IsADirectoryError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        except Exception as exc:  # noqa: BLE001
            print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
