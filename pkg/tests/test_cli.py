"""Tests for the command-line interface and its exit codes."""

import csv
import io
import subprocess
import sys

import pytest

from latinmac import latin
from latinmac.cli import ANALYTIC_COLUMNS, COMPARE_COLUMNS, EXIT_IO, EXIT_OK, EXIT_USAGE, main

SMALL = "scheme = DAIL, CHIM\nn_wbans = 3, 6\nsensors = 4\nsuperframes = 3\nreplications = 2\ntrials = 2000\n"


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.cfg"
    p.write_text(SMALL)
    return p


def rows(text):
    return list(csv.reader(io.StringIO(text)))


class TestExitCodes:
    def test_no_command(self):
        assert main([]) == EXIT_USAGE

    def test_unknown_flag(self):
        assert main(["simulate", "--bogus"]) == EXIT_USAGE

    def test_help(self, capsys):
        assert main(["--help"]) == EXIT_OK

    def test_missing_config_is_io(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "nope.cfg")]) == EXIT_IO

    def test_bad_config_is_usage(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("replications = 0\n")
        assert main(["simulate", "--config", str(p)]) == EXIT_USAGE

    def test_unwritable_out_is_io(self, small_cfg):
        assert main(["simulate", "--config", str(small_cfg), "--out", "/proc/latinmac"]) == EXIT_IO

    def test_composite_order_is_usage(self):
        assert main(["gen-latin", "4"]) == EXIT_USAGE


class TestGenLatin:
    @pytest.mark.parametrize("K", [3, 5, 7])
    def test_files_round_trip(self, tmp_path, K):
        assert main(["gen-latin", str(K), "--out", str(tmp_path)]) == EXIT_OK
        files = sorted(tmp_path.glob(f"square_{K}_*.txt"))
        assert len(files) == K - 1
        fam = latin.mols_family(K)
        for a, f in enumerate(files):
            sq = latin.loads(f.read_text())
            assert sq == fam[a]
            assert sq.is_valid()

    def test_stdout(self, capsys):
        assert main(["gen-latin", "3"]) == EXIT_OK
        assert capsys.readouterr().out.startswith("latin 3 3 3\n1 2 3\n")


class TestDumpSchedule:
    def test_dail(self, tmp_path, capsys):
        p = tmp_path / "d.cfg"
        p.write_text("n_wbans = 2\nsensors = 3\nchannels = 4\n")
        assert main(["dump-schedule", "--config", str(p), "--seed", "0"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 6
        assert all(ln.startswith("wban=") and "scheme=DAIL cells=" in ln for ln in lines)

    def test_baseline_refused(self, tmp_path):
        p = tmp_path / "z.cfg"
        p.write_text("scheme = ZIGBEE\n")
        assert main(["dump-schedule", "--config", str(p)]) == EXIT_USAGE


class TestSimulate:
    def test_outputs(self, small_cfg, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(["simulate", "--config", str(small_cfg), "--out", str(out)]) == EXIT_OK
        printed = capsys.readouterr().out
        assert printed.splitlines()[0] == "seed=1"
        assert printed.count("grid scheme=") == 4
        frames = rows((out / "superframes.csv").read_text())
        summary = rows((out / "summary.csv").read_text())
        assert frames[0][:9] == ["superframe", "scheme", "n_wbans", "attempted", "collided",
                                 "successful", "deferred", "energy", "hops"]
        assert len(frames) == 1 + 4 * 3 * 2
        assert [r[:2] for r in summary[1:]] == [["DAIL", "3"], ["DAIL", "6"], ["CHIM", "3"], ["CHIM", "6"]]

    def test_seed_determinism(self, small_cfg, tmp_path):
        for name in ("a", "b", "c"):
            seed = "7" if name != "c" else "8"
            assert main(["simulate", "--config", str(small_cfg), "--seed", seed, "--out", str(tmp_path / name)]) == 0
        a, b, c = ((tmp_path / n / "superframes.csv").read_text() for n in "abc")
        assert a == b
        assert a != c

    def test_parallel_matches_serial(self, small_cfg, tmp_path):
        par = tmp_path / "par.cfg"
        par.write_text(SMALL + "jobs = 2\n")
        assert main(["simulate", "--config", str(small_cfg), "--out", str(tmp_path / "s")]) == 0
        assert main(["simulate", "--config", str(par), "--out", str(tmp_path / "p")]) == 0
        assert (tmp_path / "s" / "superframes.csv").read_text() == (tmp_path / "p" / "superframes.csv").read_text()


class TestAnalyticAndCompare:
    def test_analytic_columns(self, small_cfg, capsys):
        assert main(["analytic", "--config", str(small_cfg)]) == EXIT_OK
        table = rows(capsys.readouterr().out)
        assert tuple(table[0]) == ANALYTIC_COLUMNS
        quantities = {r[2] for r in table[1:]}
        assert {"success_prob", "success_prob_oracle", "t_min", "t_max", "q", "q_oracle", "imb_pmf", "cfp_pmf"} <= quantities

    def test_analytic_matches_oracle(self, small_cfg, capsys):
        main(["analytic", "--config", str(small_cfg)])
        table = rows(capsys.readouterr().out)[1:]
        exact = {(r[0], r[1], r[2]): float(r[3]) for r in table}
        for m, p, q, v, se in table:
            if q.endswith("_oracle"):
                ref = exact[(m, p, q[: -len("_oracle")])]
                assert abs(float(v) - ref) <= 3 * float(se) + 1e-9

    def test_compare(self, small_cfg, tmp_path, capsys):
        assert main(["compare", "--config", str(small_cfg), "--out", str(tmp_path)]) == EXIT_OK
        table = rows((tmp_path / "compare.csv").read_text())
        assert tuple(table[0]) == COMPARE_COLUMNS
        for r in table[1:]:
            assert float(r[5]) == pytest.approx(abs(float(r[3]) - float(r[4])))

    def test_single_wban_compare_has_no_gap(self, tmp_path, capsys):
        p = tmp_path / "one.cfg"
        p.write_text("n_wbans = 1\nsensors = 4\nsuperframes = 2\n")
        assert main(["compare", "--config", str(p)]) == EXIT_OK
        table = rows(capsys.readouterr().out)[1:]
        assert all(float(r[5]) == 0.0 for r in table)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "latinmac.cli", "gen-latin", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "latin 2 2 2\n1 2\n2 1\n"
