import csv
import hashlib

from gapforge.cli import run


def test_report_writes_tables_and_figures(tmp_path, capsys):
    assert run(["report", "--out-dir", str(tmp_path), "--cases", "8", "--seed", "1"]) == 0
    capsys.readouterr()
    for name in ("lindisc", "pipeline", "permutations"):
        assert (tmp_path / f"{name}.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    with open(tmp_path / "lindisc.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 8
    assert all(r["withinBound"] == "True" for r in rows)


def test_report_is_reproducible(tmp_path, capsys):
    digests = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        run(["report", "--out-dir", str(out), "--cases", "4", "--seed", "2"])
        digests.append({p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in out.iterdir()})
    capsys.readouterr()
    assert digests[0] == digests[1]
