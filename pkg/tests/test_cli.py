import json
import xml.etree.ElementTree as ET

import pytest

from randbetti import BettiTable, pure_diagram
from randbetti.cli import main
from randbetti.sampling import combine

SVG_NS = "{http://www.w3.org/2000/svg}"


def run(capsysbinary, *argv):
    code = main(list(argv))
    out, err = capsysbinary.readouterr()
    return code, out, err


def error_of(err: bytes) -> dict:
    return json.loads(err.decode().strip().splitlines()[-1])


def test_pure_json(capsysbinary):
    code, out, _ = run(capsysbinary, "pure", "--r", "7", "--index", "2,4", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert {"p": 0, "q": 1, "value": "1/10"} in doc["result"]["table"]["entries"]
    assert doc["result"]["degree_sequence"] == [1, 3, 5, 6, 7]
    assert doc["seed"] == 0 and doc["tool"]["name"] == "randbetti"
    assert doc["config"]["r"] == 7


def test_pure_csv_round_trip(capsysbinary):
    code, out, _ = run(capsysbinary, "pure", "--r", "7", "--n", "3", "--index", "2,4")
    lines = out.decode().splitlines()
    assert code == 0
    assert lines[0].startswith("# tool: randbetti") and lines[2] == "# seed: 0"
    assert BettiTable.from_csv(out.decode()) == pure_diagram(7, 3, (2, 4)).table


@pytest.mark.parametrize("argv", [
    ["sample", "--r", "12", "--n", "3", "--seed", "5"],
    ["sample", "--r", "30", "--samples", "50", "--seed", "5", "--format", "json"],
    ["gauss", "--a", "0,1", "--r-values", "100,200", "--source", "sampled", "--samples", "3", "--seed", "2"],
    ["converge", "--r-values", "100,200", "--samples", "200", "--seed", "8", "--format", "json"],
    ["weighted", "--r", "60", "--seed", "3", "--format", "json"],
    ["curve", "--genus", "2", "--degree", "30"],
])
def test_byte_identical_reruns(capsysbinary, argv):
    first = run(capsysbinary, *argv)
    second = run(capsysbinary, *argv)
    assert first[0] == 0 and first == second


def test_seed_changes_output(capsysbinary):
    a = run(capsysbinary, "sample", "--r", "12", "--seed", "1")[1]
    b = run(capsysbinary, "sample", "--r", "12", "--seed", "2")[1]
    assert a != b


def test_threads_do_not_change_output(capsysbinary):
    argv = ["converge", "--r-values", "100", "--samples", "300", "--seed", "4", "--format", "json"]
    one = json.loads(run(capsysbinary, *argv, "--threads", "1")[1])
    four = json.loads(run(capsysbinary, *argv, "--threads", "4")[1])
    assert one["result"] == four["result"]


def test_svg_output_is_deterministic_and_tagged(capsysbinary):
    argv = ["curve", "--genus", "0", "--degree", "75", "--format", "svg", "--seed", "9"]
    code, out, _ = run(capsysbinary, *argv)
    assert code == 0 and out == run(capsysbinary, *argv)[1]
    root = ET.fromstring(out)
    assert root.tag == SVG_NS + "svg"
    desc = json.loads(_description(root))
    assert desc["seed"] == 9 and desc["config"]["degree"] == 75


def _description(root) -> str:
    for el in root.iter():
        if el.tag.endswith("description"):
            return el.text
    raise AssertionError("no description metadata")


def test_figure_alongside_csv(tmp_path, capsysbinary):
    fig = tmp_path / "profile.svg"
    out = tmp_path / "profile.csv"
    code, _, _ = run(capsysbinary, "gauss", "--a", "0,1", "--r-values", "200,400",
                     "--out", str(out), "--figure", str(fig))
    assert code == 0
    assert out.read_text().splitlines()[3] == "a,r,p_r,value,target,abs_error"
    ET.fromstring(fig.read_bytes())


def test_weighted_expected_figure_with_overflow(tmp_path, capsysbinary):
    fig = tmp_path / "w.svg"
    code, out, _ = run(capsysbinary, "weighted", "--r", "1200", "--expected", "--figure", str(fig))
    assert code == 0 and b"inf" in out
    ET.fromstring(fig.read_bytes())


def test_decompose_round_trip(tmp_path, capsysbinary):
    table = combine(8, 2, [1, 0, 2, 0, 0, 3, 0, 1])
    path = tmp_path / "t.csv"
    path.write_text(table.to_csv())
    code, out, _ = run(capsysbinary, "decompose", "--input", str(path), "--format", "json")
    coeffs = json.loads(out)["result"]["decomposition"]["coefficients"]
    assert code == 0
    assert [c["value"] for c in coeffs] == ["1/1", "0/1", "2/1", "0/1", "0/1", "3/1", "0/1", "1/1"]


def test_decompose_outside_span(tmp_path, capsysbinary):
    rows = [list(row) for row in pure_diagram(7, 2, 4).table.entries]
    rows[0][0] += 1
    path = tmp_path / "t.csv"
    path.write_text(BettiTable(2, 7, rows).to_csv())
    code, _, err = run(capsysbinary, "decompose", "--input", str(path))
    assert code == 4 and error_of(err)["error"] == "NotInSpanError"


@pytest.mark.parametrize("argv, code, name", [
    (["pure", "--r", "3", "--index", "1,2"], 2, "ParameterError"),
    (["pure", "--r", "7"], 2, "ArgumentError"),
    (["sample", "--r", "12", "--seed", "-1"], 2, "ArgumentError"),
    (["curve", "--genus", "10", "--degree", "20"], 2, "ParameterError"),
    (["gauss", "--a", "9", "--r-values", "16"], 2, "ParameterError"),
    (["weighted", "--table-csv", "{left}", "--r-values", "100"], 5, "HypothesisViolation"),
])
def test_error_exit_codes(tmp_path, capsysbinary, argv, code, name):
    left = tmp_path / "left.csv"
    left.write_text("t,h\n0,1\n0.5,0\n1,0\n")
    argv = [a.format(left=left) for a in argv]
    got, out, err = run(capsysbinary, *argv)
    assert got == code and out == b""
    assert error_of(err) == {"error": name, "message": error_of(err)["message"], "exit_code": code}


def test_capacity_exit_code(monkeypatch, capsysbinary):
    monkeypatch.setenv("RANDBETTI_MAX_SUBSETS", "10")
    code, _, err = run(capsysbinary, "sample", "--r", "30", "--n", "3")
    assert code == 3 and error_of(err)["error"] == "CapacityError"
