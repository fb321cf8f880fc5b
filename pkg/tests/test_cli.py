import csv
import re
from pathlib import Path

import numpy as np
import pytest

from spotalign.cli import run_cli


def read_csv(path: Path):
    with path.open() as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    return rows


@pytest.fixture(scope="module")
def small_dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("ds")
    assert run_cli(["synth", "--n-straight", "2", "--n-curve", "1", "--seed", "13",
                    "--out-dir", str(out)]) == 0
    return out


class TestSynthAndSample:
    def test_synth_emits_three_files(self, small_dataset):
        for name in ("segments.csv", "collected.csv", "truth.csv"):
            assert (small_dataset / name).exists()

    def test_sample_candidates_csv(self, small_dataset, tmp_path):
        code = run_cli([
            "sample", "--segments", str(small_dataset / "segments.csv"),
            "--collected", str(small_dataset / "collected.csv"),
            "--out-dir", str(tmp_path),
        ])
        assert code == 0
        rows = read_csv(tmp_path / "candidates.csv")
        assert {"segment_id", "candidate_index", "arclength_m", "lat", "lon"} <= set(rows[0])
        arclengths = [float(r["arclength_m"]) for r in rows if r["segment_id"] == rows[0]["segment_id"]]
        assert arclengths == sorted(arclengths)


class TestRectifyEvaluate:
    def test_perfect_predictions_score_perfectly(self, small_dataset, tmp_path):
        code = run_cli([
            "evaluate", "--segments", str(small_dataset / "segments.csv"),
            "--collected", str(small_dataset / "truth.csv"),
            "--truth", str(small_dataset / "truth.csv"),
            "--out-dir", str(tmp_path),
        ])
        assert code == 0
        rows = read_csv(tmp_path / "eval.csv")
        assert rows
        for row in rows:
            assert float(row["acd"]) == 0.0
            assert float(row["ar"]) == 1.0

    def test_rectify_then_evaluate(self, small_dataset, tmp_path):
        assert run_cli([
            "rectify", "--segments", str(small_dataset / "segments.csv"),
            "--collected", str(small_dataset / "collected.csv"),
            "--method", "raa", "--th", "1", "--out-dir", str(tmp_path),
        ]) == 0
        rect = tmp_path / "rectified.csv"
        rows = read_csv(rect)
        assert {"segment_id", "spot_index", "lat", "lon", "method", "window_start_index", "loss"} <= set(rows[0])
        assert run_cli([
            "evaluate", "--segments", str(small_dataset / "segments.csv"),
            "--collected", str(rect),
            "--truth", str(small_dataset / "truth.csv"),
            "--out-dir", str(tmp_path),
        ]) == 0
        eval_rows = read_csv(tmp_path / "eval.csv")
        all_row = next(r for r in eval_rows if r["segment_class"] == "all")
        assert float(all_row["acd"]) < 2.0

    def test_missing_inputs_fail_cleanly(self, tmp_path, capsys):
        assert run_cli(["evaluate", "--out-dir", str(tmp_path)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_planted_window_corpus_recovered(self, tmp_path):
        # synth -> jitter the ground truth -> rectify -> the snapped output
        # reproduces the truth exactly on at least 95% of segments
        ds = tmp_path / "ds"
        assert run_cli(["synth", "--n-straight", "3", "--n-curve", "3", "--seed", "31",
                        "--out-dir", str(ds)]) == 0
        jittered = tmp_path / "jittered"
        assert run_cli([
            "noise", "--segments", str(ds / "segments.csv"),
            "--collected", str(ds / "truth.csv"),
            "--noise-kind", "random", "--noise-bound", "2", "--noise-fraction", "1.0",
            "--seed", "5", "--out-dir", str(jittered),
        ]) == 0
        out = tmp_path / "out"
        assert run_cli([
            "rectify", "--segments", str(ds / "segments.csv"),
            "--collected", str(jittered / "collected.csv"),
            "--method", "raa", "--th", "0.5", "--out-dir", str(out),
        ]) == 0

        truth_rows = read_csv(jittered / "truth.csv")
        rect_rows = read_csv(out / "rectified.csv")
        truth = {(r["segment_id"], r["spot_index"]): (r["lat"], r["lon"]) for r in truth_rows}
        exact_by_segment: dict[str, bool] = {}
        for r in rect_rows:
            key = (r["segment_id"], r["spot_index"])
            same = truth[key] == (r["lat"], r["lon"])
            exact_by_segment[r["segment_id"]] = exact_by_segment.get(r["segment_id"], True) and same
        fraction = sum(exact_by_segment.values()) / len(exact_by_segment)
        assert fraction >= 0.95


class TestNoise:
    def test_noise_emits_corrupted_dataset(self, small_dataset, tmp_path):
        code = run_cli([
            "noise", "--segments", str(small_dataset / "segments.csv"),
            "--collected", str(small_dataset / "truth.csv"),
            "--noise-kind", "random", "--noise-bound", "5", "--noise-fraction", "1.0",
            "--seed", "3", "--out-dir", str(tmp_path),
        ])
        assert code == 0
        original = read_csv(small_dataset / "truth.csv")
        corrupted = read_csv(tmp_path / "collected.csv")
        assert len(original) == len(corrupted)
        moved = sum(
            1 for a, b in zip(original, corrupted)
            if (a["lat"], a["lon"]) != (b["lat"], b["lon"])
        )
        assert moved == len(original)
        # original points become the ground truth of the corrupted dataset
        truth_rows = read_csv(tmp_path / "truth.csv")
        assert [(r["lat"], r["lon"]) for r in truth_rows] == [(r["lat"], r["lon"]) for r in original]

    def test_unknown_kind_rejected(self, small_dataset, tmp_path, capsys):
        code = run_cli([
            "noise", "--segments", str(small_dataset / "segments.csv"),
            "--collected", str(small_dataset / "collected.csv"),
            "--noise-kind", "gremlins", "--out-dir", str(tmp_path),
        ])
        assert code == 2  # argparse rejects the choice


class TestPlot:
    def test_svg_matches_csv_coordinates(self, small_dataset, tmp_path):
        code = run_cli([
            "plot", "--segments", str(small_dataset / "segments.csv"),
            "--collected", str(small_dataset / "collected.csv"),
            "--method", "ed", "--out-dir", str(tmp_path),
        ])
        assert code == 0
        plots = sorted((tmp_path / "plots").glob("*.svg"))
        assert plots
        for svg_path in plots:
            csv_path = svg_path.with_suffix(".csv")
            rows = read_csv(csv_path)
            svg = svg_path.read_text()
            circle_coords = re.findall(r'<circle class="pt" cx="([-\d.]+)" cy="([-\d.]+)"', svg)
            got = [(cx, cy) for cx, cy in circle_coords]
            want = [(r["svg_x"], r["svg_y"]) for r in rows]
            assert got == want


class TestDeterminism:
    def test_repeated_runs_byte_identical(self, small_dataset, tmp_path):
        args = [
            "rectify", "--segments", str(small_dataset / "segments.csv"),
            "--collected", str(small_dataset / "collected.csv"),
            "--method", "raa", "--th", "1", "--seed", "4",
        ]
        assert run_cli(args + ["--out-dir", str(tmp_path / "one")]) == 0
        assert run_cli(args + ["--out-dir", str(tmp_path / "two")]) == 0
        a = (tmp_path / "one" / "rectified.csv").read_bytes()
        b = (tmp_path / "two" / "rectified.csv").read_bytes()
        assert a == b
