"""CLI tests: command behaviour, exit codes, and JSON parity with the HTTP API."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from captool import store
from captool.cli import main
from captool.fixtures import VOLTE_ANSWERS, VOLTE_SESSION, case_a_portfolio, volte_portfolio


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def volte_path(tmp_path) -> str:
    path = tmp_path / "volte.json"
    store.save(volte_portfolio(), path)
    return str(path)


@pytest.fixture
def case_a_path(tmp_path) -> str:
    path = tmp_path / "case-a.json"
    store.save(case_a_portfolio(), path)
    return str(path)


def test_classify_golden_fixture(runner, volte_path):
    result = runner.invoke(main, ["classify", "VOLTE", "--portfolio", volte_path])
    assert result.exit_code == 0
    assert "bi=2.8" in result.output
    assert "cc=2.4" in result.output
    assert "PlatformLeverage" in result.output
    assert "TimeToMarket" in result.output


def test_classify_json_matches_http_response(runner, volte_path, volte_client):
    result = runner.invoke(main, ["classify", "VOLTE", "--portfolio", volte_path, "--json"])
    assert result.exit_code == 0
    via_http = volte_client.get(
        f"/api/v1/sessions/{VOLTE_SESSION}/artifacts/VOLTE/classification"
    ).json()
    assert json.loads(result.output) == via_http


def test_report_quadrants_case_a(runner, case_a_path, case_a_client):
    result = runner.invoke(main, ["report", "quadrants", "--portfolio", case_a_path])
    assert result.exit_code == 0
    assert "total: 20" in result.output
    for line in ["Standard", "ProductsBottleneck", "PlatformLeverage", "Strategic"]:
        assert line in result.output

    as_json = runner.invoke(main, ["report", "quadrants", "--portfolio", case_a_path, "--json"])
    body = json.loads(as_json.output)
    assert body == case_a_client.get("/api/v1/reports/quadrants").json()
    assert body["display_percentages"] == {
        "Standard": 20, "ProductsBottleneck": 20, "PlatformLeverage": 55, "Strategic": 5,
    }


def test_trace_json_matches_http(runner, volte_path, volte_client):
    result = runner.invoke(
        main, ["trace", "contribution", "C-VOLTE-1", "--portfolio", volte_path, "--json"]
    )
    assert json.loads(result.output) == volte_client.get(
        "/api/v1/trace/contributions/C-VOLTE-1"
    ).json()
    result = runner.invoke(
        main, ["trace", "feature", "F-VOLTE-SIG", "--portfolio", volte_path, "--json"]
    )
    assert json.loads(result.output) == volte_client.get(
        "/api/v1/trace/features/F-VOLTE-SIG"
    ).json()


def test_unknown_subcommand_exits_2(runner):
    result = runner.invoke(main, ["frobnicate"])
    assert result.exit_code == 2


def test_domain_error_exits_1(runner, volte_path):
    result = runner.invoke(main, ["classify", "NOPE", "--portfolio", volte_path])
    assert result.exit_code == 1
    assert "unknown_artifact" in result.stderr


def test_bad_answer_syntax_exits_2(runner, tmp_path):
    result = runner.invoke(main, [
        "assess", "X", "--session", "s1", "--participant", "a",
        "--answers", "bi1:3", "--portfolio", str(tmp_path / "p.json"),
    ])
    assert result.exit_code == 2


def test_assess_consensus_classify_flow(runner, tmp_path):
    path = str(tmp_path / "p.json")
    answers = ",".join(f"{qid}={value}" for qid, value in VOLTE_ANSWERS.items())

    result = runner.invoke(main, [
        "assess", "GAMMA", "--session", "s1", "--participant", "alice",
        "--answers", answers, "--portfolio", path,
    ])
    assert result.exit_code == 0
    assert "provisional" in result.output

    result = runner.invoke(main, [
        "consensus", "GAMMA", "--session", "s1", "--answers", answers, "--portfolio", path,
    ])
    assert result.exit_code == 0
    assert "finalized" in result.output
    assert "bi=2.8" in result.output

    result = runner.invoke(main, ["classify", "GAMMA", "--portfolio", path])
    assert result.exit_code == 0
    assert "PlatformLeverage" in result.output

    # The portfolio file holds the finalized assessment.
    reloaded = store.load(path)
    assert reloaded.assessments[("GAMMA", "s1")].finalized


def test_import_csv_roundtrip(runner, tmp_path):
    csv_path = tmp_path / "features.csv"
    csv_path.write_text(
        "feature_id,platform_id,description\nF1,P1,alpha\nF2,P1,beta\n", encoding="utf-8"
    )
    portfolio_path = str(tmp_path / "p.json")
    result = runner.invoke(main, [
        "import", "--repo", "features", "--file", str(csv_path), "--portfolio", portfolio_path,
    ])
    assert result.exit_code == 0
    assert "imported 2 records" in result.output
    assert len(store.load(portfolio_path).registry.features) == 2


def test_import_header_mismatch_exits_1(runner, tmp_path):
    csv_path = tmp_path / "features.csv"
    csv_path.write_text("feature_id,wrong\nF1,x\n", encoding="utf-8")
    result = runner.invoke(main, [
        "import", "--repo", "features", "--file", str(csv_path),
        "--portfolio", str(tmp_path / "p.json"),
    ])
    assert result.exit_code == 1
    assert "header_mismatch" in result.stderr


def test_request_submit_and_advance(runner, volte_path):
    result = runner.invoke(main, [
        "request", "submit", "--patch", "PA-VOLTE-2", "--by", "dev1",
        "--tier", "Trivial", "--ecosystem", "jenkins", "--id", "R1",
        "--portfolio", volte_path,
    ])
    assert result.exit_code == 0
    assert "AutoApproved" in result.output

    result = runner.invoke(main, [
        "request", "advance", "R1", "--event", "MarkContributed", "--portfolio", volte_path,
    ])
    assert result.exit_code == 0
    assert "EcosystemReview" in result.output

    result = runner.invoke(main, [
        "request", "advance", "R1", "--event", "BoardApprove", "--portfolio", volte_path,
    ])
    assert result.exit_code == 1
    assert "illegal_transition" in result.stderr

    assert "R1" in store.load(volte_path).registry.contributions


def test_report_compliance_human_output(runner, volte_path):
    runner.invoke(main, ["request", "submit", "--patch", "PA-VOLTE-2", "--by", "d",
                         "--tier", "Trivial", "--ecosystem", "jenkins", "--id", "R1",
                         "--portfolio", volte_path])
    result = runner.invoke(main, [
        "report", "compliance", "--window", "30", "--portfolio", volte_path,
    ])
    assert result.exit_code == 0
    assert "window: 30 days" in result.output


def test_portfolio_from_environment(runner, volte_path):
    result = runner.invoke(main, ["classify", "VOLTE"], env={"CAP_PORTFOLIO": volte_path})
    assert result.exit_code == 0
    assert "bi=2.8" in result.output


def test_fixture_command_writes_portfolio(runner, tmp_path):
    path = str(tmp_path / "demo.json")
    result = runner.invoke(main, ["fixture", "--name", "volte", "--portfolio", path])
    assert result.exit_code == 0
    assert Path(path).exists()
    assert ("VOLTE", VOLTE_SESSION) in store.load(path).assessments


def test_serve_help(runner):
    result = runner.invoke(main, ["serve", "--help"])
    assert result.exit_code == 0
    assert "--port" in result.output
