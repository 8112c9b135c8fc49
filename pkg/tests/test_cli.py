import json

import pytest

from derivedgrowth.cli import main, series_rows
from derivedgrowth.config import dump_config, parse_config

S3_FLAGS = ["--kind", "finite_perm", "-m", "2", "--degree", "3", "--perm", "a=2,3,1",
            "--perm", "b=2,1,3"]
TRIVIAL = ["--kind", "finite_perm", "-m", "2", "--degree", "1", "--perm", "a=1", "--perm", "b=1"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestGoodwords:
    def test_listing(self, capsys):
        code, out = run(capsys, "goodwords", "-m", "2", "--phi", "1,0", "-k", "2")
        assert code == 0
        assert out.splitlines() == ["aa", "ab", "aB", "d_k=3"]

    def test_bound(self, capsys):
        code, out = run(capsys, "goodwords", "-m", "2", "--phi", "1,0", "-k", "4", "--count-only")
        assert code == 0 and out == "d_k=17 bound=8 PASS\n"

    def test_not_onto(self, capsys):
        code, _ = run(capsys, "goodwords", "-m", "2", "--phi", "2,4", "-k", "3")
        assert code == 2

    def test_rank_disagrees_with_phi(self, capsys):
        code, _ = run(capsys, "goodwords", "-m", "3", "--phi", "1,0", "-k", "3")
        assert code == 2


class TestRho:
    def test_free_abelian(self, capsys):
        code, out = run(capsys, "rho", "--kind", "free_abelian", "-m", "2", "--max-len", "6")
        assert code == 0
        assert out == "rho=4 witness=a1 a2 a1^-1 a2^-1 exhaustive_up_to=4\n"

    def test_nilpotent(self, capsys):
        code, out = run(capsys, "rho", "--kind", "nilpotent_class2", "-m", "2", "--max-len", "10",
                        "--format", "json")
        assert code == 0
        assert json.loads(out) == {"rho": 8, "witness": "a1 a1 a2 a1^-1 a2^-1 a2^-1 a1^-1 a2",
                                   "exhaustive_up_to": 8}

    def test_trivial(self, capsys):
        code, out = run(capsys, "rho", *TRIVIAL)
        assert code == 0 and out.startswith("rho=1 witness=a1 ")

    def test_not_found(self, capsys):
        code, out = run(capsys, "rho", "--kind", "free_abelian", "-m", "2", "--max-len", "3")
        assert code == 3 and out == "rho>3 exhaustive_up_to=3\n"

    def test_budget(self, capsys):
        code, _ = run(capsys, "rho", "--kind", "nilpotent_class2", "-m", "2", "--max-len", "12",
                      "--max-states", "100")
        assert code == 4

    def test_bad_permutation(self, capsys):
        code, _ = run(capsys, "rho", "--kind", "finite_perm", "-m", "2", "--degree", "3",
                      "--perm", "a=1,1,2", "--perm", "b=1,2,3")
        assert code == 2

    def test_unknown_kind(self, capsys):
        code, _ = run(capsys, "rho", "--kind", "lamplighter", "-m", "2")
        assert code == 2


class TestBall:
    def test_lifted_free_metabelian(self, capsys):
        code, out = run(capsys, "ball", "--kind", "free_abelian", "-m", "2", "-n", "2", "--lifted")
        assert code == 0
        rows = [line.split(",") for line in out.splitlines()[1:]]
        assert [r[1] for r in rows] == ["1", "4", "12"]
        assert rows[-1][2] == "17"

    def test_group_balls(self, capsys):
        code, out = run(capsys, "ball", "--kind", "free_abelian", "-m", "2", "-n", "3",
                        "--format", "json")
        assert code == 0 and json.loads(out)["ball_sizes"] == [1, 5, 13, 25]

    def test_trivial_group(self, capsys):
        code, out = run(capsys, "ball", *TRIVIAL, "-n", "3", "--format", "json")
        assert json.loads(out)["ball_sizes"] == [1, 1, 1, 1]

    def test_budget_gives_partial_output(self, capsys):
        code, out = run(capsys, "ball", "--kind", "nilpotent_class2", "-m", "2", "-n", "12",
                        "--max-states", "300", "--format", "json")
        assert code == 4
        doc = json.loads(out)
        assert doc["complete"] is False and doc["ball_sizes"][:3] == [1, 5, 17]

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "balls.csv"
        code, out = run(capsys, "ball", "--kind", "free_abelian", "-m", "2", "-n", "2",
                        "--out", str(path))
        assert code == 0 and out == ""
        assert path.read_text().splitlines()[0] == "n,sphere,ball,rate_root,rate_ratio"


class TestBound:
    def test_examples(self, capsys):
        code, out = run(capsys, "bound", "-m", "2", "-C", "1", "--rho", "27")
        doc = json.loads(out)
        assert code == 0 and doc["k_used"] == 4 and doc["lower_bound"] == 1.681792831
        _, out = run(capsys, "bound", "-m", "2", "-C", "1", "--rho", "4")
        assert json.loads(out)["vacuous"] is True
        _, out = run(capsys, "bound", "-m", "2", "-C", "1", "--rho", "1000")
        assert json.loads(out)["k_used"] == 22

    def test_domain(self, capsys):
        assert run(capsys, "bound", "-m", "1", "-C", "1", "--rho", "27")[0] == 2
        assert run(capsys, "bound", "-m", "2", "-C", "0", "--rho", "27")[0] == 2
        assert run(capsys, "bound", "-m", "2", "-C", "1")[0] == 2


class TestChecks:
    def test_sawcheck_Z2(self, capsys):
        code, out = run(capsys, "sawcheck", "--kind", "free_abelian", "-m", "2", "--phi", "1,0",
                        "-k", "2", "-t", "3")
        doc = json.loads(out)
        assert code == 0 and doc["precondition"] == "false"

    def test_sawcheck_t0(self, capsys):
        code, out = run(capsys, "sawcheck", "--kind", "free_abelian", "-m", "2", "-k", "2", "-t", "0")
        doc = json.loads(out)
        assert code == 0 and doc["violations_total"] == 0

    def test_distinct(self, capsys):
        code, out = run(capsys, "distinct", "--kind", "nilpotent_class2", "-m", "2", "-k", "4",
                        "-t", "1", "--samples", "5")
        doc = json.loads(out)
        assert code == 0 and doc["expected"] == doc["observed"] == 17


class TestSeries:
    def test_small(self, capsys):
        code, out = run(capsys, "series", "-n", "4")
        lines = out.splitlines()
        assert code == 0
        assert lines[0] == ("n,ball_metabelian,ball_class2,rate_root_metabelian,"
                            "rate_root_class2,monotone")
        assert lines[2].startswith("1,5,5,")
        assert all(line.endswith(",PASS") for line in lines[1:])

    def test_first_strict(self):
        rows, first, code = series_rows(7)
        assert code == 0 and first == 7
        assert rows[6]["ball_metabelian"] == rows[6]["ball_class2"] == 1457
        assert (rows[7]["ball_metabelian"], rows[7]["ball_class2"]) == (4345, 4373)


class TestConfig:
    def test_dump_round_trip(self, capsys, tmp_path):
        code, text = run(capsys, "rho", *S3_FLAGS, "--max-len", "6", "--dump-config")
        assert code == 0
        path = tmp_path / "s3.cfg"
        path.write_text(text)
        code, again = run(capsys, "rho", "--config", str(path), "--dump-config")
        assert again == text
        assert dump_config(parse_config(text)) == text

    def test_config_file_with_comments(self, capsys, tmp_path):
        path = tmp_path / "z2.cfg"
        path.write_text("# the free abelian quotient\nkind=free_abelian\nm=2\n\nmax_len=5\n")
        code, out = run(capsys, "rho", "--config", str(path))
        assert code == 0 and out.startswith("rho=4 ")

    def test_flags_override_file(self, capsys, tmp_path):
        path = tmp_path / "z2.cfg"
        path.write_text("kind=free_abelian\nm=2\nmax_len=5\n")
        code, out = run(capsys, "rho", "--config", str(path), "--max-len", "3")
        assert code == 3

    def test_malformed_file(self, capsys, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("kind free_abelian\n")
        assert run(capsys, "rho", "--config", str(path))[0] == 2

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "rho", "--config", str(tmp_path / "nope.cfg"))[0] == 2


class TestFindGirth:
    def test_emits_a_loadable_config(self, capsys, tmp_path):
        code, text = run(capsys, "find-girth", "--phi", "1,0", "--degree", "10", "--tries", "3",
                         "--target", "8", "--seed", "1")
        assert code in (0, 3)
        path = tmp_path / "found.cfg"
        path.write_text(text)
        assert parse_config(text).kind == "subdirect"
        code, out = run(capsys, "rho", "--config", str(path), "--max-len", "6")
        assert code in (0, 3)

    def test_unreachable_target(self, capsys):
        code, _ = run(capsys, "find-girth", "--phi", "1,0", "--degree", "3", "--tries", "2",
                      "--target", "50")
        assert code == 3


@pytest.mark.parametrize("argv", [
    ["ball", "--kind", "nilpotent_class2", "-m", "2", "-n", "6", "--lifted"],
    ["ball", "--kind", "free_abelian", "-m", "3", "-n", "4", "--format", "json"],
    ["series", "-n", "6", "--format", "json"],
    ["rho", "--kind", "nilpotent_class2", "-m", "2", "--max-len", "9"],
])
def test_threads_do_not_change_output(capsys, argv):
    outs = [run(capsys, *argv, "--threads", str(n))[1] for n in (1, 8)]
    assert outs[0] == outs[1]
