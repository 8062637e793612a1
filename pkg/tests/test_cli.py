import json
import re

import pytest

from fqapprox.algebra import field
from fqapprox.cli import main
from fqapprox.orbit import sl2_count_naive


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("argv", [
    ["cf", "--xi-cf", "[0; T]", "--xi-cf-repeat", "--count", "6"],
    ["dirichlet", "--seed", "3"],
    ["minkowski", "--seed", "1", "--count", "3"],
    ["sharpness", "--degrees", "1,2", "--qdeg", "5"],
    ["monic", "--q", "3", "--seed", "2"],
    ["orbit", "--xi-cf", "[0; T]", "--xi-cf-repeat", "--slope", "1/T", "--hdeg", "3"],
    ["lb", "--xi-cf", "[0; T]", "--xi-cf-repeat", "--count", "3"],
    ["gap", "--xi-cf", "[0; T]", "--xi-cf-repeat", "--slope", "1/T"],
    ["count", "--b1", "1", "--b2", "1"],
    ["exponent", "--hdeg", "6"],
    ["exponent", "--kind", "mu", "--hdeg", "4", "--xi-cf", "[0; T]", "--xi-cf-repeat"],
])
def test_subcommands_succeed_and_are_deterministic(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out.count("\n") >= 2
    again = run(capsys, *argv)[1]
    assert again == out
    # degrees and ratios are integers; no floating point in the output
    assert not re.search(r"\d\.\d", out)


def test_count_exact(capsys):
    code, out, _ = run(capsys, "count", "--q", "2", "--b1", "0", "--b2", "0")
    assert code == 0
    assert out.splitlines()[1].split(",")[:3] == ["0", "0", "6"]


def test_json(capsys):
    code, out, _ = run(capsys, "count", "--b1", "1", "--b2", "1", "--format", "json")
    data = json.loads(out)
    assert data["columns"][:3] == ["b1", "b2", "exact"]
    assert data["rows"][0]["exact"] == sl2_count_naive(field(2), 1, 1)


def test_out_file(tmp_path, capsys):
    path = tmp_path / "o.csv"
    assert main(["count", "--out", str(path)]) == 0
    assert path.read_text().startswith("b1,b2,exact")
    assert capsys.readouterr().out == ""


@pytest.mark.parametrize("argv,code", [
    (["count", "--bogus"], 2),
    (["count", "--q", "4"], 2),
    (["count", "--q", "2", "--modulus", "T^2+T+1"], 2),
    (["cf", "--xi", "T^^2"], 2),
    (["gap", "--xi-cf", "[0; T]", "--xi-cf-repeat"], 2),
    (["orbit", "--hdeg", "40"], 3),
    (["dirichlet", "--xi", "T^-1+O(T^-4)", "--count", "9"], 3),
    (["casselspair", "--psi-table", "/nonexistent/psi.csv"], 2),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code
