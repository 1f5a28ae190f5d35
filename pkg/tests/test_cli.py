import json
import subprocess
import sys

from imin.cli import main


def run_cli(*args):
    proc = subprocess.run([sys.executable, "-m", "imin", *args],
                          capture_output=True, text=True)
    return proc


class TestRun:
    def test_diamond_sandimin_decrease(self, tmp_path):
        out = tmp_path / "rows.csv"
        report = tmp_path / "report.json"
        code = main(["run", "--graph", "fixture:diamond", "--algo",
                     "sandimin", "--k", "2", "--delta", "0.1",
                     "--eval-trials", "20000", "--rng-seed", "3",
                     "--out", str(out), "--json", str(report)])
        assert code == 0
        header, row = out.read_text().strip().splitlines()
        assert header.startswith("dataset,algo,k,n_seeds")
        fields = row.split(",")
        decrease = float(fields[10])
        assert abs(decrease - 3.0) < 0.05
        payload = json.loads(report.read_text())
        assert payload[0]["algo"] == "sandimin"
        assert "runtime_s" in payload[0]
        assert "runtime" not in header

    def test_chain_lhga(self, tmp_path):
        out = tmp_path / "rows.csv"
        code = main(["run", "--graph", "fixture:chain", "--algo", "lhga",
                     "--k", "1", "--delta", "0.1", "--eval-trials", "4000",
                     "--out", str(out)])
        assert code == 0
        row = out.read_text().strip().splitlines()[1]
        assert float(row.split(",")[10]) == 2.0

    def test_edge_list_with_label_seeds(self, tmp_path):
        data = tmp_path / "g.txt"
        data.write_text("# tiny\n10 20\n20 30\n10 30\n")
        out = tmp_path / "rows.csv"
        code = main(["run", "--graph", str(data), "--algo", "ag", "--k",
                     "1", "--seeds", "10,", "--realizations", "500",
                     "--eval-trials", "4000", "--out", str(out)])
        assert code == 0
        assert len(out.read_text().strip().splitlines()) == 2


class TestExitCodes:
    def test_unknown_algo(self):
        assert main(["run", "--graph", "fixture:chain", "--algo", "nope",
                     "--k", "1"]) == 3

    def test_nonpositive_k(self):
        assert main(["run", "--graph", "fixture:chain", "--algo", "lhga",
                     "--k", "0"]) == 4

    def test_seed_out_of_range(self, tmp_path):
        data = tmp_path / "g.txt"
        data.write_text("0 1\n1 2\n")
        assert main(["run", "--graph", str(data), "--algo", "lhga",
                     "--k", "1", "--seeds", "99,"]) == 5
        assert main(["run", "--graph", str(data), "--algo", "lhga",
                     "--k", "1", "--seeds", "99"]) == 5  # count too large

    def test_missing_graph_no_partial_output(self, tmp_path):
        out = tmp_path / "rows.csv"
        assert main(["run", "--graph", str(tmp_path / "absent.txt"),
                     "--algo", "lhga", "--k", "1", "--seeds", "1",
                     "--out", str(out)]) == 6
        assert not out.exists()

    def test_bad_fixture_name(self):
        assert main(["run", "--graph", "fixture:unknown", "--algo", "lhga",
                     "--k", "1"]) == 6


class TestDeterminism:
    def test_repeated_run_byte_identical(self, tmp_path):
        args = ["run", "--graph", "fixture:small", "--algo", "sandimin",
                "--k", "1", "--delta", "0.1", "--eval-trials", "5000",
                "--rng-seed", "11"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_subprocess_matches_in_process(self, tmp_path):
        out = tmp_path / "sub.csv"
        proc = run_cli("run", "--graph", "fixture:diamond", "--algo", "gr",
                       "--k", "1", "--realizations", "400",
                       "--eval-trials", "2000", "--rng-seed", "5",
                       "--out", str(out))
        assert proc.returncode == 0
        out2 = tmp_path / "inproc.csv"
        main(["run", "--graph", "fixture:diamond", "--algo", "gr",
              "--k", "1", "--realizations", "400", "--eval-trials", "2000",
              "--rng-seed", "5", "--out", str(out2)])
        assert out.read_bytes() == out2.read_bytes()


class TestBench:
    def test_sweep_rows_and_determinism(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["bench", "--graph", "fixture:small", "--algo", "lhga",
                "--k-list", "1,2", "--epsilon-list", "0.2,0.3",
                "--delta", "0.1", "--eval-trials", "2000",
                "--rng-seed", "9"]
        assert main(base + ["--out", str(a)]) == 0
        assert main(base + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        rows = a.read_text().strip().splitlines()
        assert len(rows) == 1 + 4  # header + 2 budgets x 2 epsilons


class TestSeedPool:
    def test_count_seeds_drawn_from_influence_pool(self, tmp_path):
        data = tmp_path / "g.txt"
        lines = [f"0 {v}" for v in range(1, 6)]
        lines += [f"{v} {v + 10}" for v in range(1, 6)]
        data.write_text("\n".join(lines) + "\n")
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["run", "--graph", str(data), "--algo", "lhga", "--k", "1",
                "--seeds", "2", "--seed-rank-pool", "4",
                "--pool-trials", "60", "--eval-trials", "2000",
                "--rng-seed", "13"]
        assert main(args + ["--out", str(out_a)]) == 0
        cache = data.with_name(data.name + ".infcache.npz")
        assert cache.exists()
        assert main(args + ["--out", str(out_b)]) == 0  # cached path
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_count_larger_than_pool_rejected(self, tmp_path):
        data = tmp_path / "g.txt"
        data.write_text("0 1\n1 2\n2 3\n")
        assert main(["run", "--graph", str(data), "--algo", "lhga",
                     "--k", "1", "--seeds", "3", "--seed-rank-pool", "2",
                     "--pool-trials", "20"]) == 5


class TestOracleCommands:
    def test_oracle_check_all_pass(self, capsys):
        assert main(["oracle-check", "--rng-seed", "2"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out

    def test_oracle_adhoc_values(self, capsys):
        assert main(["oracle", "--graph", "fixture:three-seeds",
                     "--blockers", "3,7,12"]) == 0
        out = capsys.readouterr().out
        assert "decrease            = 7.000000" in out
        assert "lower bound         = 6.000000" in out
        assert "upper bound         = 8.000000" in out

    def test_oracle_refuses_large_graph(self, tmp_path):
        data = tmp_path / "g.txt"
        rows = [f"{u} {v}" for u in range(10) for v in range(10, 16)]
        data.write_text("\n".join(rows) + "\n")
        code = main(["oracle", "--graph", str(data), "--seeds", "0,",
                     "--prob", "const", "--prob-value", "0.5"])
        assert code == 6
