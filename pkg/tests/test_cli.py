import time

import pytest

from langprop.cli import main
from langprop.corpus import read_tweets
from langprop.graph import read_graph
from langprop.hybrid import read_predictions

PUBLISHED_ROWS = """\
es\t92.64\t95.69
pt\t89.81\t92.58
ca\t81.14\t87.19
en\t77.42\t76.18
gl\t56.93\t52.93
eu\t92.41\t76.29
amb\t100.00\t89.56
und\t66.67\t10.98
"""


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def trained(tmp_path, mini_dir, capsys):
    model, space = tmp_path / "m.txt", tmp_path / "s.tsv"
    code, _, _ = run(capsys, "train-content", "--tweets", mini_dir / "train.tsv", "--model", model, "--space", space)
    assert code == 0
    return model, space


@pytest.fixture
def propagated(tmp_path, mini_dir, capsys):
    graph, dump = tmp_path / "g.tsv", tmp_path / "p.tsv"
    assert run(capsys, "build-graph", "--train", mini_dir / "train.tsv", "--test", mini_dir / "test.tsv",
               "--follows", mini_dir / "follows.tsv", "--graph", graph)[0] == 0
    assert run(capsys, "propagate", "--graph", graph, "--out", dump, "--max-iters", 300)[0] == 0
    return dump


def test_train_content(tmp_path, mini_dir, capsys, trained):
    model, space = trained
    assert model.is_file() and space.is_file()
    code, out, _ = run(capsys, "train-content", "--tweets", mini_dir / "train.tsv", "--model", tmp_path / "m2",
                       "--space", tmp_path / "s2", "--reg-c", 0.5, "--dev", mini_dir / "test.tsv")
    assert code == 0
    assert "held-out accuracy" in out
    assert (tmp_path / "m2").read_text().split("\n")[2] == "C\t0.5"


def test_missing_file_exit_2(tmp_path, capsys):
    code, _, err = run(capsys, "train-content", "--tweets", tmp_path / "nope.tsv", "--model", "m", "--space", "s")
    assert code == 2
    assert "nope.tsv" in err


def test_parse_error_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.tsv"
    bad.write_text("1\tu\tes\tok\n2\tu\txx\thola\n")
    code, _, err = run(capsys, "train-content", "--tweets", bad, "--model", "m", "--space", "s")
    assert code == 2
    assert "bad.tsv:2" in err


def test_build_graph_minimal(tmp_path, capsys):
    tweets = tmp_path / "t.tsv"
    tweets.write_text("1\tu1\tes\thola\n")
    follows = tmp_path / "f.tsv"
    follows.write_text("")
    code, out, _ = run(capsys, "build-graph", "--train", tweets, "--follows", follows, "--graph", tmp_path / "g")
    assert code == 0
    assert out.startswith("3 nodes, 2 edges")
    assert read_graph(tmp_path / "g").is_connected()


def test_build_graph_k_fraction(tmp_path, mini_dir, capsys):
    n = len(read_tweets(mini_dir / "train.tsv"))
    nbrs = tmp_path / "n.tsv"
    assert run(capsys, "build-graph", "--train", mini_dir / "train.tsv", "--graph", tmp_path / "g",
               "--k-fraction", 0.1, "--neighbors", nbrs)[0] == 0
    per_tweet = {}
    for line in nbrs.read_text().splitlines():
        tid = line.split("\t")[0]
        per_tweet[tid] = per_tweet.get(tid, 0) + 1
    assert max(per_tweet.values()) == int(0.1 * n)


def test_propagate_converges_on_small_fixture(tmp_path, capsys):
    tweets = tmp_path / "t.tsv"
    tweets.write_text("1\tu1\tes\thola amigo\n2\tu1\t\thola\n3\tu2\tca\tbon dia\n")
    follows = tmp_path / "f.tsv"
    follows.write_text("u1\tu2\n")
    run(capsys, "build-graph", "--train", tweets, "--follows", follows, "--graph", tmp_path / "g",
        "--tweet-user-weight", 1)
    code, out, _ = run(capsys, "propagate", "--graph", tmp_path / "g", "--out", tmp_path / "p")
    assert code == 0
    assert out.startswith("converged=true")
    assert int(out.split("iters=")[1]) <= 100


def test_propagate_max_iters_warns(tmp_path, mini_dir, capsys):
    run(capsys, "build-graph", "--train", mini_dir / "train.tsv", "--test", mini_dir / "test.tsv",
        "--graph", tmp_path / "g")
    code, out, err = run(capsys, "propagate", "--graph", tmp_path / "g", "--out", tmp_path / "p", "--max-iters", 1)
    assert code == 0
    assert "converged=false iters=1" in out
    assert "warning" in err


def test_propagate_validation(tmp_path, capsys):
    tweets = tmp_path / "t.tsv"
    tweets.write_text("1\tu1\t\thola\n")
    run(capsys, "build-graph", "--train", tweets, "--graph", tmp_path / "g")
    code, _, err = run(capsys, "propagate", "--graph", tmp_path / "g", "--out", tmp_path / "p", "--mu2", 0)
    assert code == 2 and "mu2" in err
    code, _, err = run(capsys, "propagate", "--graph", tmp_path / "g", "--out", tmp_path / "p")
    assert code == 2 and "no seeded nodes" in err


def test_predict_lambda2_zero_equals_content_only(tmp_path, mini_dir, capsys, trained, propagated):
    model, space = trained
    common = ["--model", model, "--space", space, "--tweets", mini_dir / "test.tsv"]
    assert run(capsys, "predict", *common, "--propagation", propagated, "--lambda2", 0, "--out", tmp_path / "a")[0] == 0
    assert run(capsys, "predict", *common, "--content-only", "--out", tmp_path / "b")[0] == 0
    assert read_predictions(tmp_path / "a") == read_predictions(tmp_path / "b")


def test_predict_defaults_average_both(tmp_path, mini_dir, capsys, trained, propagated):
    model, space = trained
    common = ["--model", model, "--space", space, "--tweets", mini_dir / "test.tsv", "--propagation", propagated]
    run(capsys, "predict", *common, "--out", tmp_path / "d")
    run(capsys, "predict", *common, "--lambda1", 0.5, "--lambda2", 0.5, "--out", tmp_path / "e")
    assert (tmp_path / "d").read_text() == (tmp_path / "e").read_text()
    run(capsys, "predict", *common, "--lambda1", 1, "--lambda2", 0.0001, "--out", tmp_path / "f")
    assert (tmp_path / "d").read_text() != (tmp_path / "f").read_text()


def test_predict_und_threshold(tmp_path, mini_dir, capsys, trained, propagated):
    model, space = trained
    common = ["--model", model, "--space", space, "--tweets", mini_dir / "test.tsv", "--propagation", propagated]
    run(capsys, "predict", *common, "--out", tmp_path / "a")
    assert all(lab != "und" for _, lab in read_predictions(tmp_path / "a"))
    run(capsys, "predict", *common, "--und-threshold", 0.9, "--out", tmp_path / "b")
    assert any(lab == "und" for _, lab in read_predictions(tmp_path / "b"))


def test_predict_missing_from_dump(tmp_path, mini_dir, capsys, trained):
    model, space = trained
    dump = tmp_path / "p.tsv"
    dump.write_text("tweet\tnot-there\tes:1.000000,__DUMMY__:0.000000\n")
    code, _, err = run(capsys, "predict", "--model", model, "--space", space, "--tweets", mini_dir / "test.tsv",
                       "--propagation", dump, "--out", tmp_path / "o")
    assert code == 2
    first_id = read_tweets(mini_dir / "test.tsv")[0].id
    assert first_id in err


def test_evaluate_perfect(tmp_path, capsys):
    gold = tmp_path / "g.tsv"
    gold.write_text("1\tu\tes\ta\n2\tu\tes/ca\tb\n3\tu\tund\tc\n")
    preds = tmp_path / "p.tsv"
    preds.write_text("1\tes\n2\tca\n3\tund\n")
    code, out, _ = run(capsys, "evaluate", "--gold", gold, "--predictions", preds, "--out", tmp_path / "r.tsv")
    assert code == 0
    assert "avg       100.00  100.00  100.00" in out
    assert (tmp_path / "r.tsv").read_text().endswith("avg\t100.00\t100.00\t100.00\n")


def test_evaluate_published_rows(tmp_path, capsys):
    rows = tmp_path / "rows.tsv"
    rows.write_text(PUBLISHED_ROWS)
    code, out, _ = run(capsys, "evaluate", "--from-rows", rows)
    assert code == 0
    avg = out.strip().split("\n")[-1].split()
    assert avg[0] == "avg" and avg[1] == "82.13" and avg[3] == "74.74"


def test_evaluate_hand_counted(tmp_path, capsys):
    gold = tmp_path / "g.tsv"
    gold.write_text("".join(f"{i}\tu\t{g}\tx\n" for i, g in enumerate(
        ["es", "es", "ca", "pt", "gl", "es/ca", "pt/gl", "und", "und", "en"], start=1)))
    preds = tmp_path / "p.tsv"
    preds.write_text("".join(f"{i}\t{p}\n" for i, p in enumerate(
        ["es", "ca", "ca", "gl", "gl", "ca", "es", "und", "en", "und"], start=1)))
    code, out, _ = run(capsys, "evaluate", "--gold", gold, "--predictions", preds)
    assert code == 0
    lines = {line.split()[0]: line.split()[1:] for line in out.splitlines() if line and line[0] != "-" and line.split()}
    assert lines["ca"] == ["50.00", "100.00", "66.67"]
    assert lines["amb"] == ["100.00", "50.00", "66.67"]
    assert lines["avg"] == ["42.86", "50.00", "42.86"]


def test_evaluate_id_mismatch(tmp_path, capsys):
    gold = tmp_path / "g.tsv"
    gold.write_text("1\tu\tes\ta\n2\tu\tes\tb\n")
    preds = tmp_path / "p.tsv"
    preds.write_text("1\tes\n3\tes\n")
    code, _, err = run(capsys, "evaluate", "--gold", gold, "--predictions", preds)
    assert code == 2
    assert "2" in err and "3" in err


def test_synth_deterministic(tmp_path, capsys):
    for d in ("a", "b"):
        assert run(capsys, "synth", "--out-dir", tmp_path / d, "--seed", 5, "--n-train", 40, "--n-test", 40)[0] == 0
    for name in ("train.tsv", "test.tsv", "follows.tsv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_synth_invalid_fraction(tmp_path, capsys):
    code, _, err = run(capsys, "synth", "--out-dir", tmp_path, "--overlap", 1.5)
    assert code == 2 and "overlap" in err


def test_run_all_on_bundled_fixture(tmp_path, mini_dir, capsys):
    start = time.perf_counter()
    code, out, _ = run(capsys, "run-all", "--train", mini_dir / "train.tsv", "--test", mini_dir / "test.tsv",
                       "--follows", mini_dir / "follows.tsv", "--work-dir", tmp_path)
    assert code == 0
    assert time.perf_counter() - start < 60
    assert "macro F: content" in out
    for name in ("model.txt", "space.tsv", "graph.tsv", "propagation.tsv", "predictions.tsv", "report.tsv"):
        assert (tmp_path / name).is_file()


def test_run_all_deterministic(tmp_path, mini_dir, capsys):
    for d in ("a", "b"):
        run(capsys, "run-all", "--train", mini_dir / "train.tsv", "--test", mini_dir / "test.tsv",
            "--follows", mini_dir / "follows.tsv", "--work-dir", tmp_path / d)
    for name in ("model.txt", "graph.tsv", "propagation.tsv", "predictions.tsv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.conf"
    cfg.write_text("# synthetic run\nn-train = 30\nn_test = 10\noverlap = 0.5\n")
    code, out, _ = run(capsys, "--config", cfg, "synth", "--out-dir", tmp_path / "o", "--n-test", 20)
    assert code == 0
    assert "30 train / 20 test" in out
    cfg.write_text("bogus = 1\n")
    assert run(capsys, "--config", cfg, "synth", "--out-dir", tmp_path / "o")[0] == 2


def test_usage_error_exit_code(capsys):
    assert run(capsys, "propagate")[0] == 2
    assert run(capsys, "no-such-command")[0] == 2
