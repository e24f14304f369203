import json
import subprocess
import sys

import pytest

from diffavoid.certificates import CertificateFile
from diffavoid.cli import main
from diffavoid.search import read_dimacs


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestSearch:
    def test_r_set_m5(self, capsys, tmp_path):
        cert = tmp_path / "c.json"
        code, out, _ = run(capsys, "search", "--m", "5", "--k", "2", "--mode", "r-set", "--cert", str(cert))
        assert code == 0 and "m=5:{0,2}" in out
        c = CertificateFile.read(cert)
        assert c.result["witness"] == [0, 2] and c.verdict == "optimal"

    def test_r_set_m3_singleton(self, capsys):
        code, out, _ = run(capsys, "search", "--m", "3", "--k", "2")
        assert code == 0 and "r_2(3) = 1" in out

    def test_chain_pair_m65(self, capsys):
        code, out, _ = run(capsys, "search", "--m", "65", "--k", "2", "--mode", "chain-pair", "--budget", "300")
        assert code == 0 and "|R1|=7" in out and "|R2|=17" in out and "gamma = 0.7685" in out

    def test_pinned(self, capsys):
        code, out, _ = run(
            capsys, "search", "--m", "65", "--k", "2", "--mode", "chain-pair",
            "--pin-r1", "31,39,8,62,19,42,50",
        )
        assert code == 0 and "|R2|=17" in out

    def test_budget_exhaustion_exit_2(self, capsys):
        code, _, _ = run(capsys, "search", "--m", "65", "--k", "2", "--mode", "chain-pair", "--budget", "0.0001")
        assert code == 2

    def test_env_budget(self, capsys, monkeypatch):
        monkeypatch.setenv("AVOID_BUDGET", "0.0001")
        assert run(capsys, "search", "--m", "65", "--k", "2", "--mode", "chain-pair")[0] == 2
        # the flag wins over the environment
        assert run(capsys, "search", "--m", "5", "--k", "2", "--mode", "chain-pair", "--budget", "60")[0] == 0
        monkeypatch.setenv("AVOID_BUDGET", "soon")
        assert run(capsys, "search", "--m", "5", "--k", "2")[0] == 64

    def test_dimacs(self, capsys, tmp_path):
        path = tmp_path / "g.clq"
        code, _, _ = run(capsys, "search", "--m", "13", "--k", "2", "--dimacs", str(path))
        assert code == 0 and read_dimacs(path).n == 13

    @pytest.mark.parametrize(
        "argv",
        [
            ["search", "--m", "1", "--k", "2"],
            ["search", "--m", "x"],
            ["search", "--k", "2"],
            ["search", "--m", "5", "--k", "2", "--mode", "bogus"],
            ["frobnicate"],
            [],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == 64

    def test_non_squarefree_chain_pair(self, capsys):
        assert run(capsys, "search", "--m", "16", "--k", "2", "--mode", "chain-pair")[0] == 65


class TestBuild:
    def test_greedy(self, capsys):
        code, out, _ = run(capsys, "build", "--variant", "greedy", "--N", "10", "--forbidden", "1,4,9")
        assert code == 0 and "elements 1,3,6,8" in out

    def test_inhom(self, capsys, tmp_path):
        out_path, cert = tmp_path / "a.set", tmp_path / "a.json"
        code, out, _ = run(
            capsys, "build", "--variant", "inhom", "--m", "5", "--f", "x^2+5x^3", "--R", "0,2", "--Y", "9",
            "--out", str(out_path), "--cert", str(cert),
        )
        assert code == 0 and "N = 1953125" in out
        c = CertificateFile.read(cert)
        assert c.elements is None and c.set_path == str(out_path)
        assert c.result["size"] == 50000
        assert json.loads(c.spec)["X"] == "20/3"

    def test_multivariate(self, capsys, tmp_path):
        cert = tmp_path / "m.json"
        code, out, _ = run(
            capsys, "build", "--variant", "multivariate", "--m", "3", "--k", "2", "--Rp", "0,3,6", "--Y", "6",
            "--cert", str(cert),
        )
        assert code == 0 and "|A| = 729" in out and "N = 531441" in out
        assert len(CertificateFile.read(cert).elements) == 729

    def test_nonlinear_roth(self, capsys):
        code, out, _ = run(capsys, "build", "--variant", "nonlinear-roth", "--m", "5", "--k", "2",
                           "--period", "0,2", "--Y", "7")
        assert code == 0 and "|A| = 2000" in out

    def test_hypothesis_failure_is_named(self, capsys):
        code, _, err = run(capsys, "build", "--variant", "inhom", "--m", "5", "--f", "x^2+5x^3", "--R", "0,1", "--Y", "9")
        assert code == 65 and "differences" in err
        code, _, err = run(capsys, "build", "--variant", "multivariate", "--m", "5", "--k", "2", "--Rp", "0", "--Y", "2")
        assert code == 65 and "root" in err

    def test_bad_polynomial(self, capsys):
        assert run(capsys, "build", "--variant", "inhom", "--m", "5", "--f", "x^^2", "--R", "0", "--Y", "3")[0] == 64

    def test_missing_parameter(self, capsys):
        code, _, err = run(capsys, "build", "--variant", "ruzsa", "--m", "5", "--Y", "3")
        assert code == 64 and "--k" in err


class TestVerify:
    def test_verified(self, capsys, tmp_path):
        path = tmp_path / "a.set"
        run(capsys, "build", "--variant", "nonlinear-roth", "--m", "5", "--k", "2", "--period", "0,2", "--Y", "7",
            "--out", str(path))
        cert = tmp_path / "v.json"
        code, out, _ = run(capsys, "verify", "--set", str(path), "--target", "nonlinear-roth", "--k", "2",
                           "--cert", str(cert))
        assert code == 0 and out.startswith("verified-exhaustive")
        c = CertificateFile.read(cert)
        assert c.verdict == "verified-exhaustive" and c.result["N"] == 78125

    def test_refuted(self, capsys, tmp_path):
        path = tmp_path / "b.set"
        path.write_text("1\n2\n")
        code, out, _ = run(capsys, "verify", "--set", str(path), "--target", "poly", "--f", "x^2")
        assert code == 1 and "witness 1,2,1" in out

    def test_k_powers(self, capsys, tmp_path):
        path = tmp_path / "c.set"
        run(capsys, "build", "--variant", "multivariate", "--m", "2", "--k", "4", "--Rp", "0,8", "--Y", "5",
            "--F", "x1^4+x2^4+x3^4+x4^4+x5^4+x6^4+x7^4", "--out", str(path))
        code, out, _ = run(capsys, "verify", "--set", str(path), "--target", "k-powers", "--k", "4", "--s", "7")
        assert code == 0 and out.startswith("verified-exhaustive")

    def test_two_squares_and_list(self, capsys, tmp_path):
        path = tmp_path / "d.set"
        path.write_text("1\n3\n6\n8\n")
        assert run(capsys, "verify", "--set", str(path), "--target", "list", "--values", "1,4,9")[0] == 0
        assert run(capsys, "verify", "--set", str(path), "--target", "two-squares")[0] == 1

    def test_sampled_exit_2(self, capsys, tmp_path):
        path = tmp_path / "e.set"
        path.write_text("1\n3\n6\n8\n")
        assert run(capsys, "verify", "--set", str(path), "--target", "list", "--values", "1,4,9",
                   "--samples", "100")[0] == 2

    @pytest.mark.parametrize("body", ["1\nx\n", "3\n1\n", "# {oops\n1\n"])
    def test_parse_errors(self, capsys, tmp_path, body):
        path = tmp_path / "bad.set"
        path.write_text(body)
        assert run(capsys, "verify", "--set", str(path), "--target", "two-squares")[0] == 65

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "verify", "--set", str(tmp_path / "none"), "--target", "two-squares")[0] == 65


class TestExponent:
    def test_chain(self, capsys):
        code, out, _ = run(capsys, "exponent", "--formula", "chain", "--m", "65", "--k", "2",
                           "--preperiod", "65", "--period", "7,17")
        assert code == 0 and "0.7685" in out

    def test_inhom(self, capsys):
        code, out, _ = run(capsys, "exponent", "--formula", "inhom", "--m", "5", "--d", "3", "--r", "2")
        assert code == 0 and "0.8102" in out

    def test_table(self, capsys):
        code, out, _ = run(capsys, "exponent", "--table")
        assert code == 0 and "sub-polynomial" in out and "0.6667" in out

    def test_missing_parameter(self, capsys):
        assert run(capsys, "exponent", "--formula", "ruzsa", "--m", "5")[0] == 64


def test_reproduce_quick(capsys, tmp_path):
    cert = tmp_path / "r.json"
    code, out, _ = run(capsys, "reproduce", "--quick", "--cert", str(cert))
    assert code == 0 and "FAIL" not in out
    assert CertificateFile.read(cert).verdict == "pass"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "diffavoid", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "diffavoid" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "diffavoid", "search"], capture_output=True, text=True)
    assert proc.returncode == 64
