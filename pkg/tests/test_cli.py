"""CLI: subcommands, exit codes, config layering, output determinism."""

import json
from pathlib import Path

from semetrics.cli import main

DATA = Path(__file__).parent / "data"
TABLE2 = str(DATA / "table2.tsv")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_evaluate_writes_reports(tmp_path, capsys):
    out_base = str(tmp_path / "report")
    code, out, err = run(capsys, "evaluate", "--corpus", TABLE2,
                         "--metrics", "wer,cer,bleu", "--out", out_base)
    assert code == 0, err
    payload = json.loads(Path(out_base + ".json").read_text())
    wer_column = [row["wer"] for row in payload["per_pair"]]
    assert [round(w, 1) for w in wer_column] == [50.0, 60.0, 20.0, 14.3, 28.6]
    text = Path(out_base + ".txt").read_text()
    assert "corpus:" in text
    assert "pairs=5" in out


def test_evaluate_semdist_with_test_hash(tmp_path, capsys):
    out_base = str(tmp_path / "report")
    code, _, err = run(capsys, "evaluate", "--corpus", TABLE2,
                       "--metrics", "wer,semdist", "--embedder", "test-hash",
                       "--out", out_base)
    assert code == 0, err
    payload = json.loads(Path(out_base + ".json").read_text())
    for row in payload["per_pair"]:
        assert 0.0 <= row["semdist"] <= 2.0
    assert payload["metadata"]["embedder"]["name"] == "test-hash"


def test_evaluate_deterministic_json(tmp_path, capsys):
    a = str(tmp_path / "a")
    b = str(tmp_path / "b")
    for base in (a, b):
        code, _, err = run(capsys, "evaluate", "--corpus", TABLE2,
                           "--metrics", "wer,cer,bleu,semdist",
                           "--embedder", "test-hash", "--normalize", "on",
                           "--group-by", "dialect", "--out", base)
        assert code == 0, err
    assert Path(a + ".json").read_bytes() == Path(b + ".json").read_bytes()
    assert Path(a + ".txt").read_bytes() == Path(b + ".txt").read_bytes()


def test_evaluate_group_blocks_in_json(tmp_path, capsys):
    out_base = str(tmp_path / "report")
    code, _, _ = run(capsys, "evaluate", "--corpus", TABLE2,
                     "--metrics", "wer", "--group-by", "dialect",
                     "--out", out_base)
    assert code == 0
    payload = json.loads(Path(out_base + ".json").read_text())
    assert set(payload["groups"]) == {"BE", "GR", "ZH"}


def test_evaluate_missing_corpus_is_data_error(capsys):
    code, _, err = run(capsys, "evaluate", "--corpus", "/nonexistent/corpus.tsv")
    assert code == 2
    assert "data error" in err


def test_evaluate_empty_corpus_is_data_error(tmp_path, capsys):
    empty = tmp_path / "empty.tsv"
    empty.write_text("id\treference\thypothesis\n")
    code, _, err = run(capsys, "evaluate", "--corpus", str(empty))
    assert code == 2


def test_evaluate_unknown_metric_is_usage_error(capsys):
    code, _, err = run(capsys, "evaluate", "--corpus", TABLE2,
                       "--metrics", "wer,chrf")
    assert code == 1
    assert "usage error" in err


def test_evaluate_semdist_without_embedder_is_usage_error(capsys):
    code, _, err = run(capsys, "evaluate", "--corpus", TABLE2,
                       "--metrics", "semdist")
    assert code == 1


def test_evaluate_unreachable_embedder_is_provider_error(capsys):
    code, _, err = run(capsys, "evaluate", "--corpus", TABLE2,
                       "--metrics", "semdist",
                       "--embedder", "http://127.0.0.1:1")
    assert code == 3
    assert "provider error" in err


def test_evaluate_config_file_layering(tmp_path, capsys):
    config = tmp_path / "eval.conf"
    config.write_text(
        "# experiment manifest\n"
        f"corpus = {TABLE2}\n"
        "metrics = wer\n"
        f"out = {tmp_path / 'from-config'}\n"
    )
    code, _, err = run(capsys, "evaluate", "--config", str(config))
    assert code == 0, err
    assert (tmp_path / "from-config.json").exists()

    # flags win over the config file
    code, _, _ = run(capsys, "evaluate", "--config", str(config),
                     "--out", str(tmp_path / "flag-wins"))
    assert code == 0
    assert (tmp_path / "flag-wins.json").exists()


def test_config_file_unknown_key_is_usage_error(tmp_path, capsys):
    config = tmp_path / "bad.conf"
    config.write_text("corpsu = typo.tsv\n")
    code, _, err = run(capsys, "evaluate", "--config", str(config))
    assert code == 1


def test_unknown_flag_is_usage_error(capsys):
    code, _, _ = run(capsys, "evaluate", "--fantasie", "x")
    assert code == 1


def test_no_command_prints_help(capsys):
    code, _, err = run(capsys)
    assert code == 1
    assert "evaluate" in err


# -- normalize ----------------------------------------------------------------

def test_normalize_stream(tmp_path, capsys):
    infile = tmp_path / "in.txt"
    infile.write_text("Inzwischen ist es kurz vor 22 Uhr.\n\nBoeing lehnte ab!\n")
    code, out, _ = run(capsys, "normalize", "--in", str(infile))
    assert code == 0
    assert out == "inzwischen ist es kurz vor zweiundzwanzig uhr\n\nboeing lehnte ab\n"


def test_normalize_is_idempotent_through_the_cli(tmp_path, capsys):
    infile = tmp_path / "in.txt"
    infile.write_text("MIT Zahlen: 52 und 101!\n")
    code, once, _ = run(capsys, "normalize", "--in", str(infile))
    assert code == 0
    again_in = tmp_path / "again.txt"
    again_in.write_text(once)
    code, twice, _ = run(capsys, "normalize", "--in", str(again_in))
    assert code == 0
    assert twice == once


def test_normalize_empty_stream(tmp_path, capsys):
    infile = tmp_path / "empty.txt"
    infile.write_text("")
    code, out, _ = run(capsys, "normalize", "--in", str(infile))
    assert code == 0
    assert out == ""


def test_normalize_unreadable_input_is_data_error(capsys):
    code, _, _ = run(capsys, "normalize", "--in", "/nonexistent/in.txt")
    assert code == 2


def test_normalize_reads_stdin_by_default(capsys, monkeypatch):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO("Vor 22 Uhr!\n"))
    code, out, _ = run(capsys, "normalize")
    assert code == 0
    assert out == "vor zweiundzwanzig uhr\n"


def test_normalize_flags(tmp_path, capsys):
    infile = tmp_path / "in.txt"
    infile.write_text("Zahl 52 bleibt!\n")
    code, out, _ = run(capsys, "normalize", "--in", str(infile),
                       "--spell-numbers", "off", "--charset",
                       "abcdefghijklmnopqrstuvwxyz0123456789")
    assert code == 0
    assert out == "zahl 52 bleibt\n"


# -- loss-check ---------------------------------------------------------------

def test_loss_check_passes(capsys):
    code, out, _ = run(capsys, "loss-check", "--trials", "10", "--seed", "5")
    assert code == 0
    assert "PASS" in out
    assert "worst relative error" in out


def test_loss_check_deterministic_output(capsys):
    _, out_a, _ = run(capsys, "loss-check", "--trials", "1", "--seed", "7")
    _, out_b, _ = run(capsys, "loss-check", "--trials", "1", "--seed", "7")
    assert out_a == out_b


def test_loss_check_corrupted_gradient_fails(capsys):
    code, out, _ = run(capsys, "loss-check", "--trials", "3", "--seed", "5",
                       "--corrupt-gradient")
    assert code == 1
    assert "FAIL" in out
    failing = [json.loads(line) for line in out.splitlines()
               if line.startswith("{")]
    assert failing and failing[0]["trial"] == 0
    assert failing[0]["seed"] == 5


# -- embed --------------------------------------------------------------------

def test_embed_populates_and_dedupes(tmp_path, capsys, embed_server):
    corpus = tmp_path / "c.tsv"
    corpus.write_text(
        "id\treference\thypothesis\n"
        "a\tgleicher Text\tgleicher Text\n"      # duplicate texts collapse
        "b\tanderer Text\tdritter Text\n"
    )
    cache = str(tmp_path / "vectors.semcache")
    code, out, err = run(capsys, "embed", "--corpus", str(corpus),
                         "--embedder", embed_server.url, "--cache", cache)
    assert code == 0, err
    assert "3 records (3 new" in out

    # re-running adds nothing
    code, out, _ = run(capsys, "embed", "--corpus", str(corpus),
                       "--embedder", embed_server.url, "--cache", cache)
    assert code == 0
    assert "(0 new" in out


def test_embed_cache_then_evaluate_offline(tmp_path, capsys, embed_server):
    cache = str(tmp_path / "vectors.semcache")
    code, _, err = run(capsys, "embed", "--corpus", TABLE2,
                       "--embedder", embed_server.url, "--cache", cache)
    assert code == 0, err
    out_base = str(tmp_path / "report")
    code, _, err = run(capsys, "evaluate", "--corpus", TABLE2,
                       "--metrics", "semdist", "--embedder", f"cache:{cache}",
                       "--out", out_base)
    assert code == 0, err
    payload = json.loads(Path(out_base + ".json").read_text())
    assert payload["metadata"]["embedder"]["dim"] == 256


def test_embed_network_failure_keeps_partial_cache(tmp_path, capsys, embed_server):
    corpus = tmp_path / "c.tsv"
    corpus.write_text("id\treference\thypothesis\n"
                      "a\terster Text\tzweiter Text\n")
    cache = str(tmp_path / "vectors.semcache")
    embed_server.state["fail_statuses"] = [500, 500, 500, 500, 500, 500]
    code, _, err = run(capsys, "embed", "--corpus", str(corpus),
                       "--embedder", embed_server.url, "--cache", cache)
    assert code == 3
    assert "provider error" in err


def test_embed_requires_all_flags(capsys):
    code, _, _ = run(capsys, "embed", "--corpus", TABLE2)
    assert code == 1
