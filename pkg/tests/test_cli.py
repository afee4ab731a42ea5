import csv
import io
import json

import pytest

from fracspec.cli import RUN_COLUMNS, emit_table, main, parse_table


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_run_sec61(capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, _, _ = run(capsys, "run", "--preset", "sec61", "--N", "16,32",
                     "--scheme", "B-COL,PL-COL", "--cond", "--out", str(out))
    assert code == 0
    data = rows(out.read_text())
    assert [(r["N"], r["scheme"]) for r in data] == [
        ("16", "B-COL"), ("16", "PL-COL"), ("32", "B-COL"), ("32", "PL-COL")]
    assert list(data[0]) == list(RUN_COLUMNS)
    summary = json.loads((tmp_path / "r.csv.summary.json").read_text())
    assert summary["pass"] and len(summary["checks"]) == 4


def test_run_reference_first_row(capsys):
    code, out, _ = run(capsys, "run", "--preset", "rl-table1", "--N", "8")
    assert code == 0
    (row,) = rows(out)
    assert 8.58e-3 / 3 <= float(row["error_l2"]) <= 8.58e-3 * 3
    assert abs(int(row["iterations"]) - 7) <= 3
    assert row["sigma2"] and row["sigmaNm2"]


def test_deterministic(capsys, monkeypatch):
    args = ("run", "--preset", "sec62", "--N", "8,16", "--scheme", "L-COL,B-COL", "--cond")
    _, a, _ = run(capsys, *args)
    monkeypatch.setenv("FRACSPEC_THREADS", "4")
    _, b, _ = run(capsys, *args)
    strip = lambda t: [{k: v for k, v in r.items() if k != "wall_ms"} for r in rows(t)]  # noqa: E731
    assert strip(a) == strip(b)


def test_usage_errors(capsys):
    assert run(capsys, "run", "--preset", "nope", "--N", "8")[0] == 2
    assert run(capsys, "run", "--preset", "sec61", "--N", "8", "--scheme", "X")[0] == 2
    assert run(capsys, "run", "--preset", "sec61", "--N", "8", "--alpha", "0.1")[0] == 2
    assert run(capsys, "dump-matrix", "--N", "8")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["run", "--preset", "sec61", "--N", "16,8"])
    assert info.value.code == 2


def test_numeric_failure(capsys):
    code, out, err = run(capsys, "run", "--preset", "rl-smooth", "--N", "32", "--scheme", "L-COL")
    assert code == 1
    assert rows(out)[0]["method"] == "failed"
    assert "BiCGSTAB" in err


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--N", "16")
    assert code == 0
    assert out.count("PASS") == len(out.strip().splitlines())


def test_dump_rule(capsys):
    code, out, _ = run(capsys, "dump-rule", "--N", "4")
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert len(lines) == 1 + 5
    code, out, _ = run(capsys, "dump-rule", "--N", "4", "--gauss", "--alpha", "0.5", "--beta", "0")
    assert code == 0 and len([l for l in out.splitlines() if not l.startswith("#")]) == 1 + 5


@pytest.mark.parametrize("which", ["fpsdm", "birkhoff"])
def test_dump_matrix(capsys, which):
    code, out, _ = run(capsys, "dump-matrix", "--N", "6", "--mu", "1.5", "--flavor", "rl",
                       "--which", which)
    assert code == 0
    body = [l for l in out.splitlines() if not l.startswith("#")]
    assert len(body) == (7 if which == "fpsdm" else 5)


def test_table_roundtrip(capsys, tmp_path):
    out = tmp_path / "t.csv"
    run(capsys, "run", "--preset", "rl-table1", "--N", "8,16", "--out", str(out))
    text = emit_table(out.read_text())
    parsed = parse_table(text)
    src = rows(out.read_text())
    assert len(parsed) == 2
    for p, r in zip(parsed, src):
        assert p["N"] == r["N"] and p["iterations"] == r["iterations"]
        assert float(p["error_l2"]) == pytest.approx(float(r["error_l2"]), rel=1e-2)
        assert float(p["sigma2"]) == pytest.approx(float(r["sigma2"]), abs=0.05)
    code, shown, _ = run(capsys, "table", str(out))
    assert code == 0 and shown == text


def test_table_empty_and_malformed(capsys, tmp_path):
    text = emit_table("")
    assert len(text.splitlines()) == 2 and parse_table(text) == []
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    assert run(capsys, "table", str(bad))[0] == 2
    assert run(capsys, "table", str(tmp_path / "missing.csv"))[0] == 2
