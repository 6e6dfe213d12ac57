from __future__ import annotations

import json

import pytest

from epsreason.cli import main

EI = """# extended inheritance
atoms alpha beta psi phi
fact alpha
default alpha ~> beta
default alpha ~> !psi
default beta ~> psi
default beta ~> phi
"""


@pytest.fixture
def kbfile(tmp_path):
    def write(text, name="kb.dkb"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check(capsys, kbfile):
    code, out, _ = run(capsys, "check", kbfile(EI))
    assert code == 0
    assert "Z0: beta ~> psi; beta ~> phi" in out


def test_rank_me_json(capsys, kbfile):
    code, out, _ = run(capsys, "--json", "rank", kbfile(EI), "--method", "me")
    data = json.loads(out)
    assert code == 0
    assert data["weights"] == ["2", "2", "1", "1"]
    assert data["ranking"]["1111"] == "2"


def test_rank_z(capsys, kbfile):
    code, out, _ = run(capsys, "rank", kbfile(EI), "--method", "z")
    assert code == 0 and out.splitlines()[0] == "alpha beta psi phi  rank"


def test_query(capsys, kbfile):
    code, out, _ = run(capsys, "query", kbfile(EI), "--strategy", "rc", "phi")
    assert code == 0 and out.startswith("rc: NotEntailed")
    code, out, _ = run(capsys, "query", "--json", kbfile(EI), "--strategy", "me-plural", "--samples", "4", "--seed", "3", "phi")
    data = json.loads(out)
    assert data["verdict"] == "Entailed" and data["seed"] == 3


def test_compare(capsys, kbfile):
    code, out, _ = run(capsys, "--json", "compare", kbfile(EI), "phi")
    data = json.loads(out)
    assert data["verdicts"] == {
        "pc": "NotEntailed",
        "rc": "NotEntailed",
        "lc": "Entailed",
        "me": "Entailed",
        "me-plural": "Entailed",
    }


def test_bench_json(capsys):
    code, out, _ = run(capsys, "bench", "--json", "--strategies", "rc", "lc", "--samples", "0")
    data = json.loads(out)
    assert code == 0
    assert data["matrix"]["rc"] == {"ES": 1, "EI": 0, "GE": 0, "AP": 0, "RE": 1, "NE": 1}
    assert data["seed"] == 0


def test_meta(capsys):
    code, out, _ = run(capsys, "meta", "--strategy", "lc", "--trials", "5")
    assert code == 0 and "RM" in out


def test_exit_codes(capsys, kbfile):
    assert run(capsys, "check", kbfile("default a ~> b\ndefault a ~> !b\n"))[0] == 3
    assert run(capsys, "check", kbfile("default a ~> b ~> c\n"))[0] == 2
    assert run(capsys, "check", kbfile("atoms a a\n"))[0] == 2
    assert run(capsys, "--max-atoms", "1", "check", kbfile("fact a & b\n"))[0] == 2
    assert run(capsys, "query", kbfile(EI), "--strategy", "rc", "zeta")[0] == 2
    assert run(capsys, "check", "/nonexistent/kb.dkb")[0] == 1
    assert run(capsys, "rank", kbfile(EI), "--method", "me", "--max-iters", "1")[0] == 4
    loop = kbfile("default b ~> a & b\ndefault b ~> a\n")
    assert run(capsys, "rank", loop, "--method", "me")[0] == 4
    assert run(capsys, "compare", loop, "a")[0] == 4


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as info:
        main(["query", "x.dkb", "a"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 1
