import pytest

from ra_ddp import fixtures
from ra_ddp.cli import main


def _f(name):
    return str(fixtures.path(name))


def test_check_exit_codes(capsys):
    assert main(["check", _f("line5")]) == 0
    assert "overall=true" in capsys.readouterr().out
    assert main(["check", _f("gap9")]) == 1
    assert main(["check", _f("gap9w")]) == 0


def test_solve_dump_and_oracle(tmp_path, capsys):
    csv = tmp_path / "v.csv"
    assert main(["solve", _f("line5"), "--dump-values", str(csv), "--dump-region", str(tmp_path / "r"), "--oracle"]) == 0
    assert "oracle_mismatches=0" in capsys.readouterr().out
    assert len(csv.read_text().splitlines()) == 26
    assert sorted(p.name for p in (tmp_path / "r").iterdir()) == [f"region_k{k:03d}.pgm" for k in range(1, 6)]


def test_solve_unsolvable():
    assert main(["solve", _f("gap9_gapless")]) == 3


def test_play(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["play", _f("gap9w"), "--adversary", "worst", "--trace-out", str(out)]) == 0
    assert out.read_text().rstrip().endswith("Finished")
    assert main(["play", _f("gap9")]) == 3


def test_audit_from_values(tmp_path):
    csv = tmp_path / "v.csv"
    assert main(["solve", _f("gap9w"), "--dump-values", str(csv)]) == 0
    assert main(["audit", _f("gap9w")]) == 0
    assert main(["audit", _f("gap9w"), "--values", str(csv)]) == 0


def test_audit_catches_edited_table(tmp_path):
    csv = tmp_path / "v.csv"
    main(["solve", _f("line5"), "--dump-values", str(csv)])
    lines = csv.read_text().splitlines()
    i = lines.index("3,3,1,0")
    lines[i] = "3,3,50,0"
    csv.write_text("\n".join(lines) + "\n")
    assert main(["audit", _f("line5"), "--values", str(csv)]) == 1


@pytest.mark.parametrize("argv", [["check", "/nonexistent.yaml"], ["solve"], ["frobnicate", "x"],
                                  ["solve", "LINE", "--segment", "7"]])
def test_input_errors(argv):
    argv = [a if a != "LINE" else _f("line5") for a in argv]
    assert main(argv) == 2


def test_malformed_file(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("arena: {lo: [0], hi: [x]}\n")
    assert main(["check", str(p)]) == 2
