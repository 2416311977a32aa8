import json
import os
import subprocess
import sys

import pytest

from conftest import SAMPLES
from freerank import io
from freerank.cli import main
from freerank.kbundle import check_kbundle


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def tsv(out):
    lines = out.strip().splitlines()
    head = lines[0].split("\t")
    return [dict(zip(head, ln.split("\t"))) for ln in lines[1:]]


# -- examples -----------------------------------------------------------------------

def test_local_cohomology_of_pv_matches_closed_form(capsys):
    code, out, _ = run(capsys, "local-cohomology", SAMPLES / "pv.mod", "--window", "-8:8", "--format", "tsv")
    assert code == 0
    got = {(int(r["i"]), int(r["degree"])): int(r["dim"]) for r in tsv(out)}
    # P_W = F_2[y] with |y| = 1: H^1 is the dual of P_W shifted down by one
    want = {(i, d): int(i == 1 and d <= -1) for i in (0, 1) for d in range(-8, 9)}
    assert got and all(v == want[k] for k, v in got.items())
    assert (1, -8) in got and (1, 0) in got


def test_check_filtration_reports_violations(capsys):
    code, out, err = run(capsys, "check-filtration", SAMPLES / "bad.frf")
    assert code == 1
    assert "violation:" in out and err
    code, out, _ = run(capsys, "check-filtration", SAMPLES / "line.frf")
    assert code == 0 and "valid" in out


def test_i_trivial_sample(capsys):
    code, out, _ = run(capsys, "i-trivial", SAMPLES / "w2p3.grp", "--H", "base", "--i", "3")
    assert code == 0 and out.strip() == "true"
    code, out, _ = run(capsys, "i-trivial", SAMPLES / "w2p3.grp", "--H", "base", "--i", "1")
    assert code == 0 and out.splitlines()[0] == "false"
    assert "(1,2,3)(4,5,6)(7,8,9)" in out


def test_ptori_up_to_conjugacy(capsys):
    code, out, _ = run(capsys, "ptori", SAMPLES / "d8.grp", "--up-to-conjugacy", "--format", "tsv")
    assert code == 0
    assert sum(r["rank"] == "2" for r in tsv(out)) == 2


def test_tate_samples(capsys):
    for name, want in (("trivial3.kmod", "1"), ("regular3.kmod", "0")):
        code, out, _ = run(capsys, "tate", SAMPLES / name, "--format", "tsv", "--prange", "-4:4")
        assert code == 0
        rows = tsv(out)
        assert [r["i"] for r in rows] == [str(i) for i in range(-4, 5)]
        assert all(r["dim"] == want for r in rows)


def test_tate_two_row_sample(capsys):
    code, out, _ = run(capsys, "tate", SAMPLES / "tworow.kcx", "--format", "tsv")
    assert code == 0
    assert "shift_ok\ttrue" in out and "collapse_ok\ttrue" in out


def test_bundle_and_ss_samples(capsys):
    for name in ("cover2.bundle", "circle3.bundle"):
        code, out, _ = run(capsys, "check-bundle", SAMPLES / name, "--format", "tsv")
        assert code == 0 and "ok\ttrue" in out
    code, out, _ = run(capsys, "ss", SAMPLES / "cover2.bundle", "--format", "tsv")
    assert code == 0
    rows = tsv(out)
    total = {(r["degree"], r["q"]): r["dim"] for r in rows if r["kind"] == "total"}
    dn = {(r["degree"], r["q"]): r["dim"] for r in rows if r["kind"] == "DN"}
    assert total and total == dn


def test_stratification_samples(capsys):
    assert run(capsys, "check-stratification", SAMPLES / "line.strat")[0] == 0
    code, out, _ = run(capsys, "detect", SAMPLES / "socle.strat", "--d", "1")
    assert code == 0 and "consistent true" in out
    code, out, _ = run(capsys, "transfer", SAMPLES / "socle.strat", "--element", "T")
    assert code == 0


def test_group_commands(capsys):
    code, out, _ = run(capsys, "centralizer", SAMPLES / "w2p3.grp", "--S", "base")
    assert code == 0 and out.split()[1] == "27"
    code, out, _ = run(capsys, "wreath-tower", "--n", "2", "--prime", "3", "--format", "tsv")
    assert code == 0 and "certified\ttrue" in out
    code, out, _ = run(capsys, "wreath-tower", "--n", "2", "--prime", "2", "--format", "tsv")
    assert code == 0 and "certified\tfalse" in out and "uniqueness fails" in out


# -- exit codes ------------------------------------------------------------------------

def test_unknown_flag_is_an_error(capsys):
    code, _, err = run(capsys, "local-cohomology", SAMPLES / "pv.mod", "--bogus")
    assert code == 1 and "--bogus" in err


def test_prime_mismatch_is_a_parse_error(capsys):
    code, _, err = run(capsys, "local-cohomology", SAMPLES / "pv.mod", "--window", "0:2", "--prime", "3")
    assert code == 1 and "prime" in err and "pv.mod" in err


def test_parse_error_names_file_record_field(capsys, tmp_path):
    bad = tmp_path / "g.grp"
    bad.write_text(json.dumps({"kind": "group", "prime": 2, "degree": 3, "generators": ["(1,7)"]}))
    code, _, err = run(capsys, "ptori", bad)
    assert code == 1
    assert "g.grp" in err and "generators[0]" in err and "<root>" in err


def test_window_too_small_exits_two(capsys, tmp_path):
    f = tmp_path / "a.mod"
    f.write_text(json.dumps({"kind": "pv", "prime": 3, "rank_w": 2, "V": [[1, 0], [0, 1]],
                             "shift": 0, "window": [0, 4]}))
    code, _, err = run(capsys, "local-cohomology", f)
    assert code == 2 and "window" in err


def test_cap_and_resolution_exit_two(capsys):
    code, _, err = run(capsys, "wreath-tower", "--n", "3", "--prime", "3", "--cap", "1000")
    assert code == 2 and "cap" in err
    assert "FREERANK_CAP" not in os.environ or os.environ["FREERANK_CAP"] != "1000"
    code, _, err = run(capsys, "ss", SAMPLES / "cover2.bundle", "--resolution", "2", "--total", "4")
    assert code == 2 and "resolution" in err


# -- generate -------------------------------------------------------------------------

def test_generate_is_deterministic(capsys):
    a = run(capsys, "generate", "filtration", "--seed", "1")[1]
    b = run(capsys, "generate", "filtration", "--seed", "1")[1]
    assert a == b and a
    assert run(capsys, "generate", "filtration", "--seed", "2")[1] != a


@pytest.mark.parametrize("kind,checker", [
    ("filtration", "check-filtration"),
    ("stratification", "check-stratification"),
    ("kbundle", "check-bundle"),
])
def test_generated_instances_validate(capsys, tmp_path, kind, checker):
    for seed in (1, 2):
        code, out, _ = run(capsys, "generate", kind, "--seed", seed)
        assert code == 0
        f = tmp_path / f"{kind}{seed}.json"
        f.write_text(out)
        assert run(capsys, checker, f)[0] == 0


def test_generate_kbundle_with_k(capsys, tmp_path):
    code, out, _ = run(capsys, "generate", "kbundle", "--seed", "2", "--k", "2")
    assert code == 0
    f = tmp_path / "b.json"
    f.write_text(out)
    B = io.bundle_from_json(*io.load(f))
    assert B.action.group.order == 2
    assert check_kbundle(B).ok


def test_generate_tworow(capsys, tmp_path):
    code, out, _ = run(capsys, "generate", "tworow", "--seed", "3", "--prime", "3")
    f = tmp_path / "t.kcx"
    f.write_text(out)
    code, out, _ = run(capsys, "tate", f, "--format", "tsv")
    assert code == 0 and "shift_ok\ttrue" in out


# -- the installed entry point ------------------------------------------------------------

def test_console_script_runs():
    r = subprocess.run([sys.executable, "-m", "freerank.cli", "i-trivial", str(SAMPLES / "w2p3.grp"),
                        "--H", "base", "--i", "3"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "true"
    r = subprocess.run([sys.executable, "-m", "freerank.cli", "check-filtration", str(SAMPLES / "bad.frf")],
                       capture_output=True, text=True)
    assert r.returncode == 1 and "violation" in r.stdout
    r = subprocess.run([sys.executable, "-m", "freerank.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "local-cohomology" in r.stdout
