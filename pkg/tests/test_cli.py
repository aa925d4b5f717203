import json
import subprocess
import sys

import pytest

from fsmdim.cli import main
from fsmdim.errors import ERROR_CLASSES, EXIT_CHECK_FAILED, EXIT_IO, EXIT_USAGE, LengthMismatch, UnknownCheck


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exit_codes_unique():
    codes = [cls.exit_code for cls in ERROR_CLASSES] + [0, EXIT_USAGE, EXIT_IO, EXIT_CHECK_FAILED]
    assert len(codes) == len(set(codes))


class TestGen:
    def test_champernowne(self, tmp_path, capsys):
        out = tmp_path / "c.txt"
        code, _, err = run_cli(capsys, "gen", "--kind", "champernowne", "--k", "2", "--n", "1024", "--out", str(out))
        data = out.read_bytes()
        assert code == 0 and len(data) == 1024 and data[:12] == b"110111001011"
        assert "n=1024" in err

    def test_iid_deterministic(self, tmp_path, capsys):
        paths = [tmp_path / "a", tmp_path / "b"]
        for p in paths:
            run_cli(capsys, "gen", "--kind", "iid", "--measure", "0.75,0.25", "--n", "16", "--seed", "7", "--out", str(p))
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_periodic_stdout(self, capsys):
        code, out, _ = run_cli(capsys, "gen", "--kind", "periodic", "--pattern", "01", "--n", "5")
        assert code == 0 and out == "01010\n"


class TestDim:
    def test_periodic(self, tmp_path, capsys):
        p = tmp_path / "p.txt"
        p.write_text("01" * 20000)
        code, out, _ = run_cli(capsys, "dim", str(p))
        est = json.loads(out)["estimate"]
        assert code == 0 and est["lower"] == est["upper"] == 0.0
        assert json.loads(out)["schema_version"] == 1

    def test_champernowne_generator_input(self, capsys):
        code, out, _ = run_cli(capsys, "dim", "gen:champernowne;k=2;n=262144")
        assert code == 0 and json.loads(out)["estimate"]["lower"] >= 0.95

    def test_warning_and_csv(self, capsys):
        _, out, _ = run_cli(capsys, "dim", "gen:periodic;pattern=01;n=5000", "--ell-max", "6")
        assert "ell*" in json.loads(out)["warning"]
        _, out, _ = run_cli(capsys, "dim", "gen:periodic;pattern=01;n=2048", "--format", "csv", "--ell-max", "2")
        assert out.splitlines()[0] == "ell,n,value"

    def test_byte_identical(self, capsys):
        args = ["dim", "gen:iid;measure=3/4,1/4;n=4096;seed=3"]
        assert run_cli(capsys, *args)[1] == run_cli(capsys, *args)[1]

    def test_bad_input(self, tmp_path, capsys):
        p = tmp_path / "bad.txt"
        p.write_text("0120")
        code, _, err = run_cli(capsys, "dim", str(p))
        assert code == 10 and "OutOfAlphabet" in err
        code, _, _ = run_cli(capsys, "dim", str(tmp_path / "missing.txt"))
        assert code == EXIT_IO


class TestMdim:
    def test_same_file_matches_dim(self, tmp_path, capsys):
        p = tmp_path / "c.txt"
        run_cli(capsys, "gen", "--kind", "champernowne", "--n", "65536", "--out", str(p))
        _, dim_out, _ = run_cli(capsys, "dim", str(p))
        _, mdim_out, _ = run_cli(capsys, "mdim", str(p), str(p))
        d, m = json.loads(dim_out), json.loads(mdim_out)
        assert d["grid"]["values"] == m["grid"]["values"]
        assert (d["estimate"]["lower"], d["estimate"]["upper"]) == (m["estimate"]["lower"], m["estimate"]["upper"])

    def test_independent(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        run_cli(capsys, "gen", "--kind", "iid", "--measure", "1/2,1/2", "--n", "262144", "--seed", "1", "--out", str(a))
        run_cli(capsys, "gen", "--kind", "iid", "--measure", "1/2,1/2", "--n", "262144", "--seed", "2", "--out", str(b))
        code, out, _ = run_cli(capsys, "mdim", str(a), str(b))
        rep = json.loads(out)
        assert code == 0 and rep["estimate"]["upper"] <= 0.02
        assert "cross_check" in rep

    def test_length_mismatch(self, capsys):
        code, _, _ = run_cli(capsys, "mdim", "gen:periodic;pattern=01;n=100", "gen:periodic;pattern=01;n=99")
        assert code == LengthMismatch.exit_code
        code, out, _ = run_cli(capsys, "mdim", "gen:periodic;pattern=01;n=2048", "gen:periodic;pattern=01;n=2000",
                               "--policy", "truncate", "--no-cross-check")
        assert code == 0 and json.loads(out)["inputs"][0]["n"] == 2000


class TestTables:
    def test_entropy(self, capsys):
        code, out, _ = run_cli(capsys, "entropy", "gen:periodic;pattern=0011;n=400", "--ell", "2")
        rep = json.loads(out)
        assert code == 0 and rep["entropy_bits"] == 1.0 and rep["rate"] == 0.5

    def test_entropy_catalog_table(self, capsys):
        code, out, _ = run_cli(capsys, "entropy", "gen:periodic;pattern=0;n=64;k=2", "--r", "4", "--format", "table")
        assert code == 0 and "huffman(l=2)" in out and "upper=0.500000" in out

    def test_mutual(self, capsys):
        code, out, _ = run_cli(capsys, "mutual", "gen:periodic;pattern=01;n=64", "gen:periodic;pattern=10;n=64",
                               "--r", "4", "--t", "4")
        rep = json.loads(out)
        assert code == 0 and rep["mutual_information_bits"] == 1.0 and "mutual_ratio" in rep


class TestMachine:
    def test_compress_identity(self, capsys):
        code, out, _ = run_cli(capsys, "machine", "compress", "identity:2", "gen:champernowne;n=300",
                               "--beta", "1/2,1/2")
        rep = json.loads(out)
        assert code == 0 and rep["rho"] == 1.0 and rep["rho_beta"] == 1.0

    def test_check_il_epsilon(self, capsys):
        code, out, _ = run_cli(capsys, "machine", "check-il", "epsilon:2")
        rep = json.loads(out)
        assert rep["status"] == "collision"
        assert (rep["witness"]["u"], rep["witness"]["w"]) == ([0], [0, 0])

    def test_kraft_identity(self, capsys):
        code, out, _ = run_cli(capsys, "machine", "kraft", "identity:2", "--r", "3")
        rep = json.loads(out)
        assert rep["lhs"] == "1" and rep["holds"] is True

    def test_huffman_file_roundtrip(self, tmp_path, capsys):
        m = tmp_path / "h.json"
        run_cli(capsys, "machine", "huffman", "gen:iid;measure=3/4,1/4;n=512;seed=1", "--ell", "2", "--out", str(m))
        code, out, _ = run_cli(capsys, "machine", "check-il", str(m), "--no-certificate")
        assert code == 0 and json.loads(out)["status"] == "verified"

    def test_bad_machine_file(self, tmp_path, capsys):
        m = tmp_path / "bad.json"
        m.write_text("{}")
        code, _, err = run_cli(capsys, "machine", "check-il", str(m))
        assert code == 29 and "MachineFormatError" in err


class TestVerify:
    def test_kraft(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--suite", "kraft")
        assert code == 0 and json.loads(out)["passed"]

    def test_unknown(self, capsys):
        code, _, err = run_cli(capsys, "verify", "--suite", "nosuch")
        assert code == UnknownCheck.exit_code and "UnknownCheck" in err

    def test_golden(self, tmp_path, capsys):
        g = tmp_path / "golden.json"
        run_cli(capsys, "verify", "--suite", "shac", "--trials", "3", "--out", str(g))
        code, _, _ = run_cli(capsys, "verify", "--suite", "shac", "--trials", "3", "--golden", str(g))
        assert code == 0
        code, _, err = run_cli(capsys, "verify", "--suite", "shac", "--trials", "4", "--golden", str(g))
        assert code == EXIT_CHECK_FAILED and "golden mismatch" in err

    def test_full_suite_subprocess(self, tmp_path):
        report = tmp_path / "r.json"
        proc = subprocess.run([sys.executable, "-m", "fsmdim", "verify", "--suite", "all", "--trials", "50",
                               "--seed", "1", "--out", str(report)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert json.loads(report.read_text())["passed"]

    def test_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["dim"])
        assert exc.value.code == EXIT_USAGE
