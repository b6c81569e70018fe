from __future__ import annotations

import json
import subprocess
import sys

import pytest

from kgstress import __version__
from kgstress.cli import main
from kgstress.graph_io import read_graph

from conftest import FIXTURES

ROGET = FIXTURES / "roget"


def _run(*argv) -> int:
    return main([str(a) for a in argv])


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_parse_roget(tmp_path):
    out = tmp_path / "heads.jsonl"
    assert _run("parse-roget", ROGET / "mini_thesaurus.txt", "--out", out, "--n", 2, "--seed", 42) == 0
    assert len(out.read_text().splitlines()) == 3
    assert len((tmp_path / "heads.sample.jsonl").read_text().splitlines()) == 2
    assert _run("parse-roget", ROGET / "mini_thesaurus.txt", "--out", out, "--n", 10) == 2


def test_build_graphs_match_shipped_fixtures(tmp_path):
    truth = tmp_path / "truth.graphml"
    llm = tmp_path / "llm.jsonl"
    assert _run("build-graph", "--heads", ROGET / "sample_heads.jsonl", "--out", truth) == 0
    assert _run("build-graph", "--heads", ROGET / "sample_heads.jsonl", "--llm-cache", ROGET / "llm_cache",
                "--offline", "--out", llm) == 0
    assert read_graph(truth).same_as(read_graph(ROGET / "truth.graphml"))
    assert read_graph(llm).same_as(read_graph(ROGET / "llm.graphml"))
    bib = tmp_path / "bib.dot"
    assert _run("build-graph", "--bib", FIXTURES / "bibliographic" / "truth.jsonl", "--out", bib) == 0
    assert read_graph(bib).num_edges == 654


def test_stress_outputs_and_idempotence(tmp_path, capsys):
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        assert _run("stress", ROGET / "truth.graphml", ROGET / "llm.graphml", "--out", out,
                    "--csv", tmp_path / f"up{i}.csv") == 0
        d = json.loads(out.read_text())
        d.pop("generated_at")
        outs.append(d)
    assert outs[0] == outs[1]
    assert (tmp_path / "r0.txt").read_text() == (tmp_path / "r1.txt").read_text()
    assert (tmp_path / "up0.csv").read_text().splitlines()[1].startswith("brown,")
    assert "fabrication" in capsys.readouterr().out.lower()
    assert _run("report", tmp_path / "r0.json") == 0


def test_eval_and_report(tmp_path, capsys):
    out = tmp_path / "eval.json"
    csv_path = tmp_path / "fields.csv"
    assert _run("eval", "--config", ROGET / "eval.json", "--out", out, "--csv", csv_path) == 0
    d = json.loads(out.read_text())
    assert d["schema"] == "kgstress.eval_report/1"
    assert d["stage1"] == {"queries": 30, "from_cache": 30, "unparseable": []}
    assert d["classifier"]["metrics"]["roc_auc"] >= 0.95
    assert d["stress"]["graph_sizes"]["llm"]["nodes"] == 1066
    assert csv_path.read_text().startswith("field,precision")
    capsys.readouterr()
    assert _run("report", out) == 0
    assert "adverb_list" in capsys.readouterr().out


def test_eval_philosophers_records_unparseable(tmp_path):
    out = tmp_path / "p.json"
    assert _run("eval", "--config", FIXTURES / "philosophers" / "eval.json", "--out", out, "--no-ml", "-q") == 0
    d = json.loads(out.read_text())
    assert d["stage1"]["queries"] == 300 and len(d["stage1"]["unparseable"]) == 2


def test_eval_flags_override_config(tmp_path):
    out = tmp_path / "b.json"
    assert _run("eval", "--config", FIXTURES / "bibliographic" / "eval.json", "--threshold", 90,
                "--out", out, "--no-ml", "-q") == 0
    d = json.loads(out.read_text())
    assert d["config"]["match_threshold"] == 90
    assert "audit" in d and "citation_graph_stress" in d


def test_audit_citations(tmp_path, capsys):
    out = tmp_path / "audit.json"
    assert _run("audit-citations", FIXTURES / "bibliographic" / "truth.jsonl",
                FIXTURES / "bibliographic" / "generated.jsonl", "--out", out,
                "--csv-dir", tmp_path / "csv", "--graph-dir", tmp_path / "graphs") == 0
    assert "omission 91.9%" in capsys.readouterr().out
    assert "recall_rate" in (tmp_path / "csv" / "citation_recall.csv").read_text()
    assert (tmp_path / "graphs" / "generated.dot").exists()
    assert _run("report", out) == 0


def test_exit_code_input_errors(tmp_path):
    assert _run("stress", tmp_path / "missing.graphml", ROGET / "llm.graphml", "--out", tmp_path / "x.json") == 2
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{nope\n")
    assert _run("stress", bad, ROGET / "llm.graphml", "--out", tmp_path / "x.json") == 2
    assert _run("eval", "--benchmark", "roget", "--out", tmp_path / "x.json") == 2
    (tmp_path / "r.json").write_text('{"schema": "other"}')
    assert _run("report", tmp_path / "r.json") == 2


def test_exit_code_cache_errors(tmp_path):
    empty = tmp_path / "cache"
    empty.mkdir()
    code = _run("eval", "--benchmark", "roget", "--truth", ROGET / "sample_heads.jsonl", "--cache-dir", empty,
                "--offline", "--out", tmp_path / "x.json")
    assert code == 3


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "kgstress.cli", "report", str(tmp_path / "none.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "no such file" in proc.stderr
