"""Harness: evaluation flows, reproducibility, reports, and the CLI."""

import json
from fractions import Fraction
from pathlib import Path

import pytest

from oukp.cli import main
from oukp.core import format_instance_text, simple_instance
from oukp.harness import (
    ExperimentConfig,
    evaluate_deterministic,
    evaluate_randomized,
    instance_stream,
    parse_family_spec,
    random_general_instance,
    random_simple_instance,
    report_to_csv,
    report_to_json,
    report_to_text,
)


def test_parse_family_spec():
    fam = parse_family_spec("det2:eps=1/100")
    assert fam.kind == "det2" and fam.params["eps"] == Fraction(1, 100)
    fam = parse_family_spec("prefix:n=10,eps=1/1000")
    assert fam.params["n"] == 10
    with pytest.raises(ValueError):
        parse_family_spec("prefix:n")


def test_evaluate_deterministic_first_item_fill_on_det2():
    report = evaluate_deterministic(
        ExperimentConfig("first_item_fill", family="det2:eps=1/100")
    )
    assert report.worst_ratio == Fraction(100, 51)
    ratios = [r.ratio for r in report.records]
    assert ratios == [Fraction(1), Fraction(100, 51)]


def test_evaluate_deterministic_one_bit_on_advice_lb():
    report = evaluate_deterministic(
        ExperimentConfig("one_bit", family="advice_lb:n=6,eps=1/100")
    )
    assert report.worst_ratio <= Fraction(3, 2)


def test_evaluate_deterministic_flags_unbounded():
    report = evaluate_deterministic(
        ExperimentConfig("wait_and_fill", instances=[simple_instance(["6/10"])])
    )
    assert report.records[0].unbounded
    assert report.worst_ratio is None


def test_eps_pipeline_within_guarantee():
    rng = instance_stream(5, 0)
    instances = [random_general_instance(rng, max_items=15, max_denominator=40)
                 for _ in range(25)]
    eps = Fraction(1, 5)
    report = evaluate_deterministic(
        ExperimentConfig("eps_advice", instances=instances, eps=eps)
    )
    bound = 1 / (1 - eps)
    for record in report.records:
        assert record.unbounded is False
        assert record.ratio <= bound


def test_ratio_reports_are_at_least_one():
    rng = instance_stream(9, 1)
    instances = [random_simple_instance(rng, max_items=5, max_denominator=20)
                 for _ in range(30)]
    for algorithm in ("first_item_fill", "greedy_fill", "one_bit"):
        report = evaluate_deterministic(
            ExperimentConfig(algorithm, instances=instances)
        )
        for record in report.records:
            assert record.unbounded or record.ratio >= 1


def test_randomized_reports_reproducible():
    config = dict(family="det2:eps=1/1000", trials=5000, seed=77)
    a = evaluate_randomized(ExperimentConfig("threshold_randomized", **config))
    b = evaluate_randomized(ExperimentConfig("threshold_randomized", **config))
    assert report_to_json(a) == report_to_json(b)
    c = evaluate_randomized(ExperimentConfig("threshold_randomized",
                                             family="det2:eps=1/1000",
                                             trials=5000, seed=78))
    assert report_to_json(c) != report_to_json(a)


def test_randomized_z_scores_present_and_sane():
    report = evaluate_randomized(
        ExperimentConfig("mixture", family="det2:eps=1/1000", trials=40_000,
                         seed=123, p=Fraction(3, 4))
    )
    for record in report.records:
        assert "exact_expected_gain" in record.stats
        assert abs(record.stats["z"]) <= 4.0


def test_randomized_prefix_family_matches_exact():
    report = evaluate_randomized(
        ExperimentConfig("prefix_family", family="prefix:n=8,eps=1/1000",
                         trials=60_000, seed=3, n=8)
    )
    for record in report.records:
        assert abs(record.stats["z"]) <= 4.0


def test_threshold_monte_carlo_tracks_exact_expectation():
    report = evaluate_randomized(
        ExperimentConfig("threshold_randomized", family="prefix:n=20,eps=1/1000000",
                         trials=200_000, seed=6)
    )
    for record in report.records:
        assert abs(record.stats["z"]) <= 4.0
        assert record.stats["exact_ratio"] <= 1.7353 + 1e-4


def test_report_serializations():
    report = evaluate_deterministic(
        ExperimentConfig("first_item_fill", family="det2:eps=1/100")
    )
    payload = json.loads(report_to_json(report))
    assert payload["worst_ratio"] == "100/51"
    assert payload["records"][0]["ratio"] == "1"
    text = report_to_text(report)
    assert "worst ratio" in text and "det2[2]" in text
    rows = report_to_csv(report).strip().splitlines()
    assert rows[0].startswith("instance,opt,gain")
    assert len(rows) == 3


def test_cli_solve_run_family_minimax_constants(tmp_path, capsys):
    inst_file = tmp_path / "inst.txt"
    inst_file.write_text(format_instance_text(simple_instance(["51/100", "1"])))

    assert main(["solve", str(inst_file)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["opt"] == "1"

    assert main(["run", "first_item_fill", str(inst_file)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["gain"] == "51/100" and out["ratio"] == "100/51"

    assert main(["run", "threshold_randomized", str(inst_file),
                 "--trials", "2000", "--seed", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert 0 < out["mean_gain"] <= 1

    assert main(["family", "exact_lb:m=4", "--emit", str(tmp_path / "fam")]) == 0
    capsys.readouterr()
    emitted = sorted((tmp_path / "fam").glob("*.txt"))
    assert len(emitted) == 5

    assert main(["minimax", "det2:eps=1/100"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["ratio"] == "100/51"

    assert main(["minimax", "three:eps=0", "--randomized"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["ratio"] == "19/12"

    assert main(["minimax", "advice_lb:n=4,eps=1/100", "--advice-bits", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["ratio"] == "1"

    assert main(["constants"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert 1.7351 < out["one_over_p_half"] < 1.7353


def test_cli_evaluate_writes_reports_and_figures(tmp_path, capsys):
    json_path = tmp_path / "report.json"
    csv_path = tmp_path / "report.csv"
    plot_dir = tmp_path / "figs"
    rc = main([
        "evaluate", "first_item_fill", "--family", "det2:eps=1/100",
        "--json", str(json_path), "--csv", str(csv_path), "--plot", str(plot_dir),
    ])
    assert rc == 0
    assert json.loads(json_path.read_text())["worst_ratio"] == "100/51"
    assert csv_path.read_text().count("\n") >= 3
    figures = list(plot_dir.glob("*.png"))
    assert len(figures) == 1 and figures[0].stat().st_size > 0
    capsys.readouterr()


def test_cli_constants_plot(tmp_path, capsys):
    plot_dir = tmp_path / "figs"
    assert main(["constants", "--plot", str(plot_dir)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert Path(out["figure"]).exists()


def test_cli_config_file_defaults_and_flag_override(tmp_path, capsys):
    inst_file = tmp_path / "inst.txt"
    inst_file.write_text(format_instance_text(simple_instance(["51/100", "1"])))
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trials": 500, "seed": 9}))
    assert main(["run", "threshold_randomized", str(inst_file),
                 "--config", str(cfg)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["trials"] == 500 and out["seed"] == 9
    # an explicit flag beats the config value
    assert main(["run", "threshold_randomized", str(inst_file),
                 "--config", str(cfg), "--trials", "700"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["trials"] == 700


def test_cli_accept_subset(capsys):
    assert main(["accept", "--only", "3,7"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 2 and "2/2 criteria passed" in out
