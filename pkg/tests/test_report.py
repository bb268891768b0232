import json

from heavenly_forge.report import VerificationReport
from heavenly_forge.symkernel import ChartSpec

C = ChartSpec("r", ["x", "y"])


def test_empty_report_does_not_pass():
    assert not VerificationReport("empty").passed


def test_zero_and_equal_record_witnesses():
    rep = VerificationReport("demo", {"n": 1})
    rep.zero("x - x", C.parse("x - x"))
    rep.zero("list", [C.const(0), C.parse("x*y")])
    rep.equal("constant", 3, 4)
    rep.record("bare false", False)
    assert not rep.passed
    witnesses = [c.witness for c in rep.failures()]
    assert witnesses == ["x*y", "3 != 4", "check returned False"]


def test_skip_semantics():
    rep = VerificationReport("slow")
    rep.skip("slow", "not requested")
    assert rep.skipped and rep.passed
    assert "SKIPPED (0/0 checks, 1 skipped)" in rep.to_text()
    rep.record("real", True)
    assert not rep.skipped


def test_merge_prefixes_and_keeps_anchor():
    inner = VerificationReport("inner", anchor="somewhere")
    inner.record("ok", True)
    inner.note("remark")
    outer = VerificationReport("outer")
    outer.merge(inner, "inner: ")
    assert outer.checks[0].name == "inner: ok"
    assert outer.checks[0].anchor == "somewhere"
    assert outer.notes == ["remark"]


def test_json_shape():
    rep = VerificationReport("demo", {"n": 2})
    rep.record("a", True)
    data = json.loads(rep.to_json())
    assert data["suite"] == "demo" and data["passed"] is True
    assert data["checks"][0]["status"] == "pass"
    assert set(data["checks"][0]) >= {"name", "passed", "witness", "seconds", "anchor"}


def test_long_witness_is_clipped():
    rep = VerificationReport("clip")
    rep.record("long", False, witness="x" * 5000)
    assert len(rep.checks[0].witness) < 2100
