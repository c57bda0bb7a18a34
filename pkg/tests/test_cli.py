"""Command-line behavior via click's test runner."""

import json

import pytest
from click.testing import CliRunner

from planrec.cli import main
from planrec.retrieval import load_index

from conftest import CATALOG_JSONL, INTERACTIONS_TSV, KG_TSV, RPG_REPLY, RPG_UTTERANCE, make_config_tree


@pytest.fixture
def runner():
    return CliRunner()


def write_inputs(tmp_path):
    (tmp_path / "catalog.jsonl").write_bytes(CATALOG_JSONL)
    (tmp_path / "interactions.tsv").write_bytes(INTERACTIONS_TSV)
    (tmp_path / "kg.tsv").write_bytes(KG_TSV)


# --- ingest -----------------------------------------------------------------

def test_ingest_reports_counts(runner, tmp_path):
    write_inputs(tmp_path)
    result = runner.invoke(
        main,
        [
            "ingest",
            "--catalog", str(tmp_path / "catalog.jsonl"),
            "--interactions", str(tmp_path / "interactions.tsv"),
            "--kg", str(tmp_path / "kg.tsv"),
        ],
    )
    assert result.exit_code == 0, result.output
    assert "catalog: 5 items, 3 attributes" in result.output
    assert "interactions: 5 kept over 2 users, 0 dropped" in result.output
    assert "kg: 3 triples, 5 entities" in result.output


def test_ingest_catalog_only(runner, tmp_path):
    write_inputs(tmp_path)
    result = runner.invoke(main, ["ingest", "--catalog", str(tmp_path / "catalog.jsonl")])
    assert result.exit_code == 0
    assert "interactions" not in result.output


def test_ingest_bad_catalog_fails_cleanly(runner, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"schema": [{"name": "genre", "kind": "text"}]}\n{"id": "x"}\n')
    result = runner.invoke(main, ["ingest", "--catalog", str(bad)])
    assert result.exit_code != 0
    assert "line 2" in result.output


def test_ingest_missing_file(runner, tmp_path):
    result = runner.invoke(main, ["ingest", "--catalog", str(tmp_path / "none.jsonl")])
    assert result.exit_code != 0


# --- index ------------------------------------------------------------------

def test_index_builds_and_saves(runner, tmp_path):
    write_inputs(tmp_path)
    out = tmp_path / "items.npz"
    result = runner.invoke(
        main, ["index", "--catalog", str(tmp_path / "catalog.jsonl"), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert "indexed 5 items at dimension 256" in result.output
    loaded = load_index(out)
    assert loaded.ids == ("g1", "g2", "g3", "g4", "g5")
    assert loaded.descriptor == "trigram-fnv1a-256"


# --- chat -------------------------------------------------------------------

def test_chat_repl_streams_and_exits(runner, tmp_path):
    config = make_config_tree(tmp_path)
    result = runner.invoke(
        main,
        ["chat", "--config", str(config), "--user", "u1"],
        input=f"{RPG_UTTERANCE}\n\n",
    )
    assert result.exit_code == 0, result.output
    assert RPG_REPLY in result.output
    assert "session closed" in result.output
    # closing the session persisted the profile store
    assert (tmp_path / "profiles" / "u1.json").exists()


def test_chat_reports_agent_errors_and_continues(runner, tmp_path):
    config = make_config_tree(tmp_path, rules=[], default=None)
    result = runner.invoke(
        main,
        ["chat", "--config", str(config)],
        input="anything\n\n",
    )
    assert result.exit_code == 0, result.output
    assert "[error]" in result.output
    assert "session closed" in result.output


# --- eval -------------------------------------------------------------------

def test_eval_writes_report_and_figures(runner, tmp_path):
    config = make_config_tree(tmp_path)
    cases = tmp_path / "gen.jsonl"
    cases.write_text('{"output": ["Eldervale", "Stardew Valley"], "gt": ["g1"]}\n')
    out_dir = tmp_path / "out"
    result = runner.invoke(
        main,
        [
            "eval",
            "--config", str(config),
            "--dimension", "generative",
            "--cases", str(cases),
            "--out-dir", str(out_dir),
        ],
    )
    assert result.exit_code == 0, result.output
    assert "dimension" in result.output and "generative" in result.output
    assert (out_dir / "report.json").exists()
    assert (out_dir / "report.csv").exists()
    assert (out_dir / "metrics.png").exists()
    report = json.loads((out_dir / "report.json").read_text())
    assert report["metrics"]["ndcg@1"] == 1.0
    assert f"wrote {out_dir / 'metrics.png'}" in result.output


def test_eval_no_figures_flag(runner, tmp_path):
    config = make_config_tree(tmp_path)
    cases = tmp_path / "gen.jsonl"
    cases.write_text('{"output": ["Eldervale"], "gt": ["g1"]}\n')
    out_dir = tmp_path / "out"
    result = runner.invoke(
        main,
        [
            "eval",
            "--config", str(config),
            "--dimension", "generative",
            "--cases", str(cases),
            "--out-dir", str(out_dir),
            "--no-figures",
        ],
    )
    assert result.exit_code == 0
    assert not (out_dir / "metrics.png").exists()


def test_eval_rejects_unknown_dimension(runner, tmp_path):
    config = make_config_tree(tmp_path)
    result = runner.invoke(
        main,
        ["eval", "--config", str(config), "--dimension", "vibes", "--cases", str(config)],
    )
    assert result.exit_code != 0
    assert "vibes" in result.output


def test_eval_malformed_cases_fail_cleanly(runner, tmp_path):
    config = make_config_tree(tmp_path)
    cases = tmp_path / "gen.jsonl"
    cases.write_text("not json\n")
    result = runner.invoke(
        main,
        [
            "eval",
            "--config", str(config),
            "--dimension", "generative",
            "--cases", str(cases),
        ],
    )
    assert result.exit_code != 0
    assert "line 1" in result.output


# --- export-plans -----------------------------------------------------------

def test_export_plans_round_trip(runner, tmp_path):
    config = make_config_tree(tmp_path)
    # run a chat turn so the plan log gains an entry
    chat = runner.invoke(
        main, ["chat", "--config", str(config), "--user", "u1"], input=f"{RPG_UTTERANCE}\n\n"
    )
    assert chat.exit_code == 0
    out = tmp_path / "pairs.jsonl"
    result = runner.invoke(
        main, ["export-plans", "--config", str(config), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert "exported 1 training pairs" in result.output
    entry = json.loads(out.read_text().splitlines()[0])
    assert set(entry) == {"instruction", "plan"}
    assert RPG_UTTERANCE in entry["instruction"]
    assert entry["plan"]["plan"][0]["tool"] == "retrieve"


def test_export_plans_empty_log(runner, tmp_path):
    config = make_config_tree(tmp_path)
    out = tmp_path / "pairs.jsonl"
    result = runner.invoke(
        main, ["export-plans", "--config", str(config), "--out", str(out)]
    )
    assert result.exit_code == 0
    assert "exported 0 training pairs" in result.output
    assert out.read_text() == ""


def test_export_plans_rejects_corrupt_log(runner, tmp_path):
    config = make_config_tree(tmp_path)
    (tmp_path / "plans.jsonl").write_text('{"instruction": "x", "plan": {"plan": []}}\n')
    result = runner.invoke(
        main, ["export-plans", "--config", str(config), "--out", str(tmp_path / "o.jsonl")]
    )
    assert result.exit_code != 0
    assert "plan log line 1" in result.output


def test_export_plans_requires_plan_log(runner, tmp_path):
    config = make_config_tree(tmp_path, plan_log=None)
    result = runner.invoke(
        main, ["export-plans", "--config", str(config), "--out", str(tmp_path / "o.jsonl")]
    )
    assert result.exit_code != 0
    assert "no plan_log" in result.output
