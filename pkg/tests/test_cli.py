"""Front-end behavior: flag parsing, environment mirrors, output shapes."""

import os

import pytest

from regenum import DegreeSpec, FilterSpec, aspl, count_prefixes, from_graph6
from regenum.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCount:
    def test_small_quartic(self, capsys):
        code, out, _ = run_cli(capsys, "count", "-n", "8", "-k", "4")
        assert code == 0
        assert out.splitlines()[0] == "6"
        assert "total graphs: 6 (6)" in out

    def test_both_separator_forms(self, capsys):
        code, out, _ = run_cli(capsys, "count", "-n", "12", "-k", "4",
                               "--workers", "2")
        assert code == 0
        assert out.splitlines()[0] == "1544"
        assert "1,544 (1544)" in out

    def test_throughput_arithmetic(self, capsys):
        code, out, _ = run_cli(capsys, "count", "-n", "10", "-k", "4")
        total = int(out.splitlines()[0])
        elapsed = float(next(l for l in out.splitlines()
                             if l.startswith("elapsed")).split()[1])
        rate = float(next(l for l in out.splitlines()
                          if l.startswith("throughput")).split()[1])
        assert total == 59
        if elapsed > 0:
            assert rate == pytest.approx(total / elapsed, rel=0.06)

    def test_split_level_flag_row(self, capsys):
        code, out, _ = run_cli(capsys, "count", "-n", "12", "-k", "4",
                               "--split-level", "6", "--workers", "2")
        assert code == 0
        tasks = count_prefixes(DegreeSpec(12, 4), 6)
        assert f"split level 6, tasks {tasks}" in out

    def test_infeasible_spec_fails_cleanly(self, capsys):
        code, _, err = run_cli(capsys, "count", "-n", "9", "-k", "3")
        assert code == 1
        assert "error" in err

    def test_mono_checkpoint_conflict(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "count", "-n", "8", "-k", "4",
                               "--mode", "mono", "--checkpoint",
                               str(tmp_path / "ck"))
        assert code == 1 and "checkpoint" in err

    def test_bad_flags_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["count", "-n", "8"])  # missing -k
        assert exc.value.code == 2
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2


class TestSearch:
    def test_min_aspl_output(self, capsys):
        code, out, _ = run_cli(capsys, "search", "-n", "10", "-k", "3",
                               "--min-aspl")
        assert code == 0
        assert "best ASPL: 5/3 = 1.666667" in out
        champs = [l.split()[1] for l in out.splitlines() if l.startswith("champion ")]
        assert len(champs) == 1
        assert aspl(from_graph6(champs[0])).numerator == 5

    def test_diameter_cap(self, capsys):
        code, out, _ = run_cli(capsys, "search", "-n", "10", "-k", "3",
                               "--max-diameter", "2")
        assert code == 0
        assert out.splitlines()[0] == "1"
        assert "raw leaves: 19 (19)" in out
        assert "diameter cap: 2" in out

    def test_output_files(self, capsys, tmp_path):
        ch = tmp_path / "champs.g6"
        hist = tmp_path / "tasks.tsv"
        ck = tmp_path / "job.ckpt"
        code, out, _ = run_cli(
            capsys, "search", "-n", "12", "-k", "4", "--min-aspl",
            "--champion-limit", "6", "--workers", "2", "--split-level", "6",
            "--champions", str(ch), "--histogram", str(hist),
            "--checkpoint", str(ck))
        assert code == 0
        champs = ch.read_text().splitlines()
        assert len(champs) == 6
        for g6 in champs:
            assert aspl(from_graph6(g6)).denominator == 11
        rows = [l.split("\t") for l in hist.read_text().splitlines()]
        tasks = count_prefixes(DegreeSpec(12, 4), 6)
        assert sum(int(r[2]) for r in rows) == tasks
        assert (tmp_path / "tasks.png").stat().st_size > 1000
        assert len(ck.read_text().splitlines()) == tasks + 1
        assert str(ch) in out and str(hist) in out
        # champions went to the file, not stdout
        assert not any(l.startswith("champion ") for l in out.splitlines())

    def test_histogram_needs_tasks(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "search", "-n", "8", "-k", "3",
                               "--mode", "mono", "--min-aspl",
                               "--histogram", str(tmp_path / "h.tsv"))
        assert code == 1


class TestPrefixes:
    def test_listing(self, capsys):
        code, out, _ = run_cli(capsys, "prefixes", "-n", "12", "-k", "4",
                               "--split-level", "6")
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == count_prefixes(DegreeSpec(12, 4), 6)
        first_idx, first_edges = lines[0].split("\t")
        assert first_idx == "0"
        assert first_edges.startswith("0-8 0-9 0-10 0-11")
        assert [int(l.split("\t")[0]) for l in lines] == list(range(len(lines)))


class TestOracle:
    def test_count(self, capsys):
        code, out, _ = run_cli(capsys, "oracle", "-n", "8", "-k", "3")
        assert code == 0
        assert out.splitlines()[0] == "5"

    def test_scale_guard(self, capsys):
        code, _, err = run_cli(capsys, "oracle", "-n", "12", "-k", "4")
        assert code == 1 and "error" in err


class TestAspl:
    def test_k4(self, capsys):
        code, out, _ = run_cli(capsys, "aspl", "--graph6", "C~")
        assert code == 0
        assert out.strip() == "1 (12/12)"

    def test_petersen_decimal(self, capsys):
        code, out, _ = run_cli(capsys, "search", "-n", "10", "-k", "3", "--min-aspl")
        champ = next(l.split()[1] for l in out.splitlines()
                     if l.startswith("champion "))
        code, out, _ = run_cli(capsys, "aspl", "--graph6", champ)
        assert code == 0
        assert out.strip() == "1.666667 (150/90)"

    def test_stdin_lines(self, capsys, monkeypatch):
        import io
        monkeypatch.setattr("sys.stdin", io.StringIO("C~\nA_\n\n"))
        code, out, _ = run_cli(capsys, "aspl")
        assert code == 0
        assert out.splitlines() == ["1 (12/12)", "1 (2/2)"]

    def test_disconnected_fails(self, capsys):
        code, _, err = run_cli(capsys, "aspl", "--graph6", "A?")
        assert code == 1 and "error" in err

    def test_malformed_graph6_fails(self, capsys):
        code, _, err = run_cli(capsys, "aspl", "--graph6", "C")
        assert code == 1 and "error" in err


class TestEnvironmentMirrors:
    def test_order_degree_from_env(self, capsys, monkeypatch):
        monkeypatch.setenv("REGENUM_ORDER", "8")
        monkeypatch.setenv("REGENUM_DEGREE", "4")
        code, out, _ = run_cli(capsys, "count")
        assert code == 0 and out.splitlines()[0] == "6"

    def test_flag_beats_env(self, capsys, monkeypatch):
        monkeypatch.setenv("REGENUM_ORDER", "8")
        monkeypatch.setenv("REGENUM_DEGREE", "4")
        code, out, _ = run_cli(capsys, "count", "-n", "10")
        assert code == 0 and out.splitlines()[0] == "59"

    def test_boolean_mirror(self, capsys, monkeypatch):
        monkeypatch.setenv("REGENUM_MIN_ASPL", "1")
        code, out, _ = run_cli(capsys, "search", "-n", "10", "-k", "3")
        assert code == 0 and "best ASPL: 5/3" in out

    def test_split_level_mirror(self, capsys, monkeypatch):
        monkeypatch.setenv("REGENUM_SPLIT_LEVEL", "6")
        code, out, _ = run_cli(capsys, "prefixes", "-n", "12", "-k", "4")
        assert code == 0
        assert len(out.splitlines()) == count_prefixes(DegreeSpec(12, 4), 6)
