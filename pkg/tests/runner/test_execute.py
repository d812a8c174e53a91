import threading
import time

import pytest

from spoofeval.exceptions import OutputCollisionError
from spoofeval.runner.execute import atomic_output_dir, run_ordered


class TestRunOrdered:
    @pytest.mark.parametrize("workers", [1, 4])
    def test_results_in_input_order(self, workers):
        def slow_inverse(i):
            time.sleep(0.002 * (10 - i))
            return i * i

        assert run_ordered(slow_inverse, range(10), max_workers=workers) == [
            i * i for i in range(10)
        ]

    def test_runs_in_parallel(self):
        threads = set()

        def record(i):
            threads.add(threading.get_ident())
            time.sleep(0.02)
            return i

        run_ordered(record, range(8), max_workers=4)

        assert len(threads) > 1

    def test_first_failure_in_input_order_wins(self):
        def fail_some(i):
            if i in (2, 5):
                time.sleep(0.05 if i == 2 else 0.0)
                raise ValueError(f"item {i}")
            return i

        with pytest.raises(ValueError, match="item 2"):
            run_ordered(fail_some, range(8), max_workers=4)

    def test_serial_failure_logged(self, caplog):
        def boom(_):
            raise RuntimeError("boom")

        with pytest.raises(RuntimeError):
            run_ordered(boom, ["A07"], max_workers=1)

        assert "Item A07 failed" in caplog.text

    def test_empty(self):
        assert run_ordered(str, [], max_workers=4) == []


class TestAtomicOutputDir:
    def test_outputs_appear_on_success(self, tmp_path):
        target = tmp_path / "run"

        with atomic_output_dir(target) as staging:
            (staging / "report.json").write_text("{}")
            assert not target.exists()

        assert (target / "report.json").read_text() == "{}"
        assert [p.name for p in tmp_path.iterdir()] == ["run"]

    def test_nothing_left_on_failure(self, tmp_path):
        target = tmp_path / "run"

        with pytest.raises(RuntimeError):
            with atomic_output_dir(target) as staging:
                (staging / "partial.txt").write_text("x")
                raise RuntimeError("interrupted")

        assert list(tmp_path.iterdir()) == []

    def test_refuses_existing_results(self, tmp_path):
        target = tmp_path / "run"
        target.mkdir()
        (target / "old.txt").write_text("old")

        with pytest.raises(OutputCollisionError, match="already holds results"):
            with atomic_output_dir(target):
                pass

    def test_overwrite_replaces_contents(self, tmp_path):
        target = tmp_path / "run"
        target.mkdir()
        (target / "old.txt").write_text("old")

        with atomic_output_dir(target, overwrite=True) as staging:
            (staging / "new.txt").write_text("new")

        assert sorted(p.name for p in target.iterdir()) == ["new.txt"]

    def test_empty_directory_is_reused(self, tmp_path):
        target = tmp_path / "run"
        target.mkdir()

        with atomic_output_dir(target) as staging:
            (staging / "a.txt").write_text("a")

        assert (target / "a.txt").exists()
