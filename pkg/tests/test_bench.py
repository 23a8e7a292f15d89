"""Benchmark harness: corpus, stand-in mappers, measurement bookkeeping.

The full-scale sweep lives in the acceptance suite; here a miniature one
checks the plumbing end to end with loose tolerances.
"""

import math
import subprocess

import pytest

from mrlaunch.bench import (
    BASELINE_MODE,
    CostModel,
    SweepMeasurement,
    _read_ledger,
    _task_spans,
    format_table,
    make_stub_mappers,
    overhead_per_task,
    predict_elapsed,
    predict_overhead,
    run_sweep,
    speedup_table,
    synthesize_corpus,
)
from mrlaunch.errors import BenchError


class TestCorpus:
    def test_names_and_sizes(self, tmp_path):
        corpus = synthesize_corpus(tmp_path / "c", 12, payload_bytes=256)
        names = sorted(p.name for p in corpus.iterdir())
        assert names[0] == "file_0001" and names[-1] == "file_0012"
        assert len(names) == 12
        assert all((corpus / n).stat().st_size == 256 for n in names)

    def test_width_grows_with_count(self, tmp_path):
        corpus = synthesize_corpus(tmp_path / "c", 2, payload_bytes=8)
        assert sorted(p.name for p in corpus.iterdir()) == ["file_0001", "file_0002"]
        wide = synthesize_corpus(tmp_path / "w", 10000, payload_bytes=1)
        assert (wide / "file_10000").exists()

    def test_rerun_regenerates_identically(self, tmp_path):
        first = synthesize_corpus(tmp_path / "c", 3, payload_bytes=64)
        snapshot = {p.name: p.read_bytes() for p in first.iterdir()}
        second = synthesize_corpus(tmp_path / "c", 3, payload_bytes=64)
        assert {p.name: p.read_bytes() for p in second.iterdir()} == snapshot


class TestStubMappers:
    def test_siso_stub_sleeps_and_records(self, tmp_path):
        ledger = tmp_path / "ledger"
        siso, _ = make_stub_mappers(tmp_path, 0.08, 0.02, ledger)
        out = tmp_path / "x.out"
        subprocess.run([str(siso), "input/x", str(out)], check=True, timeout=10)
        assert out.read_text() == "done\n"
        ((key, spans),) = _read_ledger(ledger).items()
        assert key == "input/x"
        (t0, t1), = spans
        assert 0.08 <= t1 - t0 < 0.25

    def test_mimo_stub_processes_manifest_and_scales_sleep(self, tmp_path):
        ledger = tmp_path / "ledger"
        _, mimo = make_stub_mappers(tmp_path, 0.05, 0.03, ledger)
        (tmp_path / "in1").write_text("a")
        (tmp_path / "in2").write_text("b")
        manifest = tmp_path / "input_3"
        manifest.write_text(
            f"{tmp_path}/in1 {tmp_path}/out1\n{tmp_path}/in2 {tmp_path}/out2\n"
        )
        subprocess.run([str(mimo), str(manifest)], check=True, timeout=10)
        assert (tmp_path / "out1").read_text() == "done\n"
        assert (tmp_path / "out2").read_text() == "done\n"
        spans = _read_ledger(ledger)["input_3"]
        (t0, t1), = spans
        # 0.05 + 2 * 0.03
        assert 0.11 <= t1 - t0 < 0.3

    def test_ledger_lines_are_malformed_safe(self, tmp_path):
        bad = tmp_path / "ledger"
        bad.write_text("only-two fields\n")
        with pytest.raises(BenchError, match="malformed"):
            _read_ledger(bad)


class TestTaskSpans:
    def test_mimo_keys_by_manifest(self):
        spans = {"input_1": [(0.0, 1.0)], "input_2": [(0.5, 0.9)]}
        got = _task_spans("mimo", ["a", "b", "c"], 2, spans)
        assert got == [1.0, pytest.approx(0.4)]

    def test_siso_groups_by_assignment(self):
        # cyclic over 4 inputs, 2 tasks: task1={a,c}, task2={b,d}
        spans = {
            "a": [(0.0, 0.2)],
            "b": [(0.1, 0.4)],
            "c": [(0.25, 0.5)],
            "d": [(0.45, 0.6)],
        }
        got = _task_spans("default", ["a", "b", "c", "d"], 2, spans)
        assert got == [pytest.approx(0.5), pytest.approx(0.5)]

    def test_missing_entries_rejected(self):
        with pytest.raises(BenchError, match="no entries"):
            _task_spans("mimo", ["a"], 1, {})


class TestModel:
    def test_prediction_formulas(self):
        # siso styles pay startup per file, mimo once per task
        assert predict_elapsed("block", 2, 0.2, 0.02) == pytest.approx(0.44)
        assert predict_elapsed("default", 2, 0.2, 0.02) == pytest.approx(0.44)
        assert predict_elapsed("mimo", 2, 0.2, 0.02) == pytest.approx(0.24)
        assert predict_overhead("block", 8, 0.2) == pytest.approx(1.6)
        assert predict_overhead("mimo", 8, 0.2) == pytest.approx(0.2)

    def test_predictions_converge_at_one_file_per_task(self):
        s, w = 0.31, 0.007
        assert predict_elapsed("block", 1, s, w) == pytest.approx(
            predict_elapsed("mimo", 1, s, w)
        )

    def test_amortization_ratio_example(self):
        # k=16, s=0.2, w=0.02: k(s+w) / (s + k*w) comes to about 6.77
        k, s, w = 16, 0.2, 0.02
        ratio = predict_elapsed("block", k, s, w) / predict_elapsed("mimo", k, s, w)
        assert ratio == pytest.approx(6.7692, abs=1e-3)

    @pytest.mark.parametrize(
        "kwargs,message",
        [
            (dict(startup_s=0), "startup_s"),
            (dict(work_w=-0.1), "work_w"),
            (dict(files=0), "files"),
            (dict(task_counts=()), "empty"),
            (dict(task_counts=(9,)), "not in 1..4"),
            (dict(modes=("fancy",)), "unknown mode"),
            (dict(repeats=0), "repeats"),
        ],
    )
    def test_model_validation(self, kwargs, message):
        base = dict(startup_s=0.1, work_w=0.01, files=4, task_counts=(1, 2))
        base.update(kwargs)
        with pytest.raises(BenchError, match=message):
            CostModel(**base).check()


@pytest.fixture(scope="module")
def small_sweep(tmp_path_factory):
    """One real sweep shared by the checks below: F=6, T in {1,2,3,6}."""
    scratch = tmp_path_factory.mktemp("sweep")
    model = CostModel(
        startup_s=0.05, work_w=0.01, files=6, task_counts=(1, 2, 3, 6)
    )
    return model, run_sweep(model, workdir=scratch)


class TestSweep:
    def test_covers_all_points_in_mode_major_order(self, small_sweep):
        model, measurements = small_sweep
        got = [(m.mode, m.task_count) for m in measurements]
        assert got == [
            (mode, t) for mode in ("default", "block", "mimo") for t in (1, 2, 3, 6)
        ]

    def test_files_per_task_is_ceiling(self, small_sweep):
        _, measurements = small_sweep
        for m in measurements:
            assert m.files_per_task == math.ceil(6 / m.task_count)

    def test_elapsed_tracks_model_loosely(self, small_sweep):
        # the tight +/-25% band is enforced at full scale in the
        # acceptance suite; at these tiny durations allow wider slack
        model, measurements = small_sweep
        for m in measurements:
            predicted = predict_elapsed(m.mode, m.files_per_task, 0.05, 0.01)
            assert predicted * 0.7 <= m.elapsed <= predicted * 1.6, (m, predicted)

    def test_elapsed_non_increasing_in_tasks(self, small_sweep):
        _, measurements = small_sweep
        for mode in ("default", "block", "mimo"):
            series = [m.elapsed for m in measurements if m.mode == mode]
            for faster, slower in zip(series[1:], series):
                assert faster <= slower * 1.15  # jitter band

    def test_speedups_relative_to_default_at_one(self, small_sweep):
        _, measurements = small_sweep
        base = next(
            m for m in measurements if m.mode == BASELINE_MODE and m.task_count == 1
        )
        assert base.speedup == pytest.approx(1.0)
        for m in measurements:
            assert m.speedup == pytest.approx(base.elapsed / m.elapsed)

    def test_overheads_filled(self, small_sweep):
        model, measurements = small_sweep
        for m in measurements:
            assert m.overhead_per_task == pytest.approx(
                m.elapsed - m.files_per_task * model.work_w
            )
            assert m.overhead_per_task > 0

    def test_wall_at_least_stub_spans(self, small_sweep):
        _, measurements = small_sweep
        for m in measurements:
            assert m.wall >= m.elapsed * 0.9


class TestTableAndSpeedups:
    def _measurement(self, mode, t, elapsed):
        return SweepMeasurement(
            mode=mode, task_count=t, files_per_task=1, elapsed=elapsed
        )

    def test_missing_baseline_raises_when_strict(self):
        with pytest.raises(BenchError, match="baseline"):
            speedup_table([self._measurement("block", 2, 1.0)])

    def test_format_table_shape(self):
        rows = speedup_table(
            [
                self._measurement("default", 1, 2.0),
                self._measurement("mimo", 2, 0.5),
            ]
        )
        text = format_table(rows)
        lines = text.splitlines()
        assert lines[0].split("\t") == [
            "mode", "tasks", "files_per_task", "elapsed_s",
            "overhead_s", "speedup", "wall_s",
        ]
        assert lines[1].startswith("default\t1\t")
        assert "4.000" in lines[2]  # mimo speedup 2.0/0.5
        assert text.endswith("\n")

    def test_unfilled_columns_render_as_nan(self):
        m = self._measurement("block", 2, 1.0)
        table = format_table([m])
        assert "\tnan\t" in table


def test_repeats_reduce_by_median(tmp_path):
    model = CostModel(
        startup_s=0.03, work_w=0.0, files=2, task_counts=(2,),
        modes=("mimo",), repeats=3,
    )
    (m,) = run_sweep(model, workdir=tmp_path)
    assert m.mode == "mimo"
    assert 0.02 <= m.elapsed <= 0.12
