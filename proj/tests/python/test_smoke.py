import os
from pathlib import Path

import pytest

import hmc

SAMPLES = Path(os.environ.get("HMC_SOURCE_DIR", Path(__file__).resolve().parents[2])) / "samples"


def read(name):
    return (SAMPLES / name).read_text()


def test_check_proves_iteri_mask():
    report = hmc.check(read("iteri_mask.hmc"))
    assert report["verdict"] == "SAFE"
    assert set(report["solution"]) == {"k1", "k2"}


def test_oracle_finds_the_two_reads_counterexample():
    report = hmc.check(read("tworead.hmc"), oracle=True, int_range=(-1, 1))
    assert report["verdict"] == "UNSAFE"
    assert report["trace"]


def test_translate_matches_golden():
    text = hmc.translate(read("iteri_mask.hmc"), clone=False)
    assert text == (SAMPLES.parent / "tests" / "golden" / "iteri_mask.imp").read_text()


def test_validate_reports_the_violated_constraint():
    good = hmc.validate(read("iteri_mask.hmc"), read("iteri_mask.sol"))
    assert good["status"] == "SATISFIED"
    bad = hmc.validate(read("iteri_mask.hmc"), read("iteri_mask.expected.sol"))
    assert bad["status"] == "VIOLATED"
    assert bad["constraint"] == "c1"


def test_exec_semantics_differ_on_two_reads():
    prog = read("tworead.imp")
    rel = hmc.exec_program(prog, semantics="relational", int_range=(-1, 1))
    imp = hmc.exec_program(prog, semantics="imperative", int_range=(-1, 1))
    assert rel["verdict"] == "UNSAFE"
    assert imp["verdict"] == "SAFE"


def test_errors_raise():
    with pytest.raises(hmc.HmcError):
        hmc.check("(constraint")
    with pytest.raises(hmc.HmcError):
        hmc.exec_program("loop { }", semantics="sideways")
