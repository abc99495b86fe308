import json

import pytest

from smlab.cli import main
from smlab.io import MalformedFile, matrix_from_json, matrix_to_json, read_matrix, to_csv_complex, write_matrix
from smlab.models import build_abelian_model, build_index_m_model, potts


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("W", [build_index_m_model(2, 8), potts(3), build_abelian_model([2, 2])], ids=repr)
def test_json_roundtrip(W):
    V = matrix_from_json(json.loads(json.dumps(matrix_to_json(W))))
    assert V.equals(W) and V.labels == W.labels and V.family == W.family


def test_malformed(tmp_path):
    p = tmp_path / "w.json"
    p.write_text("{not json")
    with pytest.raises(MalformedFile):
        read_matrix(p)
    p.write_text(json.dumps({"fmt": "smlab/1", "n": 2, "N": 2, "r": 1, "branch": 0, "entries": [[]]}))
    with pytest.raises(MalformedFile):
        read_matrix(p)


def test_csv_complex():
    text = to_csv_complex(potts(2))
    rows = [line.split(",") for line in text.strip().splitlines()]
    assert len(rows) == 2 and len(rows[0]) == 2
    z = complex(rows[0][0])
    assert abs(abs(z) - 1) < 1e-15


def test_construct_verify(tmp_path, capsys):
    out = tmp_path / "w.json"
    code, _, _ = run(["construct", "--family", "whua", "--m", "4", "--r", "2", "--hadamard", "sylvester:1", "--a-exp", "1", "-o", str(out)], capsys)
    assert code == 0
    assert read_matrix(out).n == 32
    code, text, _ = run(["verify", str(out), "--type2", "--type3=block", "--index", "--jsonl", "--threads", "1"], capsys)
    assert code == 0
    reports = [json.loads(line) for line in text.splitlines()]
    assert [r["verdict"] for r in reports] == ["exact-pass"] * 3
    assert reports[2]["index"] == 4


def test_construct_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(["construct", "--family", "whub", "--m", "2", "--r", "4", "-o", str(p)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_construct_potts_r1(capsys):
    code, text, _ = run(["construct", "--family", "potts", "--r", "1"], capsys)
    obj = json.loads(text)
    assert code == 0 and obj["n"] == 1 and obj["entries"][0][0]["upow"] == 3


def test_exit_codes(tmp_path, capsys):
    assert run(["construct", "--family", "whua", "--m", "3", "--r", "2"], capsys)[0] == 3
    with pytest.raises(SystemExit) as exc:
        main(["construct", "--no-such-flag"])
    assert exc.value.code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert run(["verify", str(bad)], capsys)[0] == 4


def test_verify_corrupted_entry(tmp_path, capsys):
    W = build_index_m_model(2, 2).negate_entry(3, 5)
    p = tmp_path / "w.json"
    write_matrix(W, p)
    code, text, _ = run(["verify", str(p), "--type2", "--jsonl"], capsys)
    rep = json.loads(text)
    assert code == 1 and rep["verdict"] == "fail" and 3 in rep["witness"]["tuple"]


def test_verify_from_family_flags(capsys):
    code, text, _ = run(["verify", "--family", "abelian", "--group", "2,2", "--type2", "--type3", "--jsonl"], capsys)
    assert code == 0


def test_report_table1(capsys):
    code, text, _ = run(["report", "--table1", "--m", "2", "--r", "1,2"], capsys)
    assert code == 0 and "W_H,u,a" in text


def test_report_gauss(capsys):
    code, text, _ = run(["report", "--gauss", "--m", "2,4,6,8", "--jsonl"], capsys)
    rows = [json.loads(line) for line in text.splitlines()]
    assert code == 0 and [r["sums"] for r in rows] == [["2"], ["4"], ["6"], ["8"]]


def test_report_obstructions(capsys):
    code, text, _ = run(["report", "--obstructions", "--m", "4", "--r", "8"], capsys)
    assert code == 0 and "mu(W) does not divide" in text


def test_budget(capsys):
    assert run(["report", "--table1", "--m", "8", "--r", "8"], capsys)[0] == 2


def test_equiv_subcommands(tmp_path, capsys):
    assert run(["equiv", "--m", "4", "--psi", "--t", "2"], capsys)[0] == 0
    assert run(["equiv", "--m", "2", "--r4"], capsys)[0] == 0
    assert run(["equiv", "--m", "2", "--r", "4", "--move", "row_perm", "--arg", "1,0,3,2"], capsys)[0] == 0
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    W = build_index_m_model(2, 1)
    write_matrix(W, a)
    write_matrix(W.permute([1, 0, 3, 2]), b)
    code, text, _ = run(["equiv", str(a), str(b), "--jsonl"], capsys)
    assert code == 0 and json.loads(text)["equivalent"]


def test_invariants_command(tmp_path, capsys):
    p = tmp_path / "w.json"
    write_matrix(build_index_m_model(4, 8), p)
    code, text, _ = run(["invariants", str(p), "--obstructions", "--jsonl"], capsys)
    obj = json.loads(text)
    assert code == 0 and obj["mu"]["value"] == 32 and obj["obstructions"]["all_excluded"]


def test_export(tmp_path, capsys):
    p = tmp_path / "w.json"
    write_matrix(potts(2), p)
    code, text, _ = run(["export", str(p), "--format", "csv-complex"], capsys)
    assert code == 0 and text.count("\n") == 2


def test_higman_sims_cli(tmp_path, capsys):
    p = tmp_path / "hs.json"
    assert run(["construct", "--family", "higman-sims", "-o", str(p)], capsys)[0] == 0
    assert read_matrix(p).n == 100
    code, text, _ = run(["verify", str(p), "--type2", "--jsonl"], capsys)
    assert code == 0 and json.loads(text)["verdict"] == "exact-pass"
    code, _, err = run(["verify", str(p), "--type3=block"], capsys)
    assert code == 2 and "block" in err
