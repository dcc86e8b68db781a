import json
from math import gcd
from dataclasses import replace
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st
from mpmath import mpf

from riley_slopes.certify import (Branch, Certificate, InvalidKnot, MalformedCertificate,
                                  NoRepresentationBranch, NotHyperbolic, Slope, SlopeOutOfRange,
                                  certify, mirror_reduce, verify_certificate)
from riley_slopes.precision import PrecisionExhausted


@pytest.fixture(scope="module")
def fig8_one():
    with mpmath.workprec(53):
        return certify(1, 1, "1/1")


def test_slope_parsing():
    assert Slope.parse("6/4") == Slope(3, 2)
    assert Slope.parse("-3") == Slope(-3, 1)
    assert Slope.parse("3/-4") == Slope(-3, 4)
    for bad in ("0.5", "1/0", "x", "", "1/2/3"):
        with pytest.raises(ValueError):
            Slope.parse(bad)


@given(st.integers(-1000, 1000), st.integers(1, 1000))
def test_slope_reduced(p, q):
    sl = Slope.of(Fraction(p, q))
    assert sl.q >= 1 and Fraction(sl.p, sl.q) == Fraction(p, q)
    assert gcd(abs(sl.p), sl.q) == 1


def test_mirror_reduce_examples():
    assert mirror_reduce(1, 1, Slope(2, 1)) == (1, 1, Slope(2, 1), Branch.DIRECT)
    assert mirror_reduce(1, 1, Slope(-2, 1)) == (1, 1, Slope(2, 1), Branch.MIRROR)
    assert mirror_reduce(2, -3, Slope(10, 1)) == (-3, 2, Slope(-10, 1), Branch.MIRROR)
    assert mirror_reduce(2, -3, Slope(0, 1))[3] is Branch.BETTI_ZERO


def test_mirror_reduce_out_of_range():
    with pytest.raises(SlopeOutOfRange):
        mirror_reduce(1, 1, Slope(4, 1))
    with pytest.raises(SlopeOutOfRange):
        mirror_reduce(2, -3, Slope(-1, 1))


def test_mirror_reduce_unsupported_branch():
    # [4, 8) on K(2,-1) is reached only by n = -1 with m > 0
    with pytest.raises(NoRepresentationBranch):
        mirror_reduce(2, -1, Slope(5, 1))
    assert mirror_reduce(2, -1, Slope(3, 1)) == (-1, 2, Slope(-3, 1), Branch.MIRROR)


def test_invalid_knots():
    with pytest.raises(NotHyperbolic, match="trefoil"):
        certify(1, -1, "1/1")
    with pytest.raises(InvalidKnot, match="genus-one"):
        certify(0, 2, "1/1")
    with pytest.raises(SlopeOutOfRange, match=r"\(-4, 4\)"):
        certify(1, 1, "4/1")


def test_betti_zero():
    cert = certify(1, 1, "0/1")
    assert cert.branch is Branch.BETTI_ZERO and cert.s is None and not cert.residuals
    assert verify_certificate(cert).passed
    assert verify_certificate(Certificate.from_json(cert.to_json())).passed


def test_figure_eight_slope_one(fig8_one):
    cert = fig8_one
    assert cert.branch is Branch.DIRECT and cert.valid
    assert set(cert.residuals) == {"riley", "relator", "longitude_offdiag", "surgery_eq", "det"}
    assert all(v <= 1e-8 for v in cert.residuals.values())
    # independent recheck of A^p B^q = 1
    assert abs(cert.A * cert.B - 1) <= 1e-7
    assert verify_certificate(cert).passed


def test_json_roundtrip(fig8_one):
    text = fig8_one.to_json()
    data = json.loads(text)
    assert set(data) == {"m", "n", "p", "q", "branch", "s", "t", "T", "A", "B", "sigma",
                         "residuals", "precision_bits", "tolerance", "spec_version"}
    assert data["spec_version"] == "1"
    assert all(isinstance(data[k], str) for k in ("s", "t", "T", "A", "B", "sigma", "tolerance"))
    back = Certificate.from_json(text)
    assert back.to_json() == text
    assert verify_certificate(back).passed


def test_perturbed_t_rejected(fig8_one):
    bad = replace(fig8_one, t=fig8_one.t + mpf("1e-3"))
    report = verify_certificate(bad)
    assert not report.passed
    assert "relator" in report.failed()


def test_tampered_fields_rejected(fig8_one):
    assert not verify_certificate(replace(fig8_one, branch=Branch.MIRROR)).passed
    assert not verify_certificate(replace(fig8_one, slope=Slope(2, 1))).passed
    assert not verify_certificate(replace(fig8_one, B=fig8_one.B * 1.01)).passed


@pytest.mark.parametrize("text", ["", "[]", '{"m": 1}', '{"m": "1", "n": 1}'])
def test_malformed(text):
    with pytest.raises(MalformedCertificate):
        Certificate.from_json(text)


def test_malformed_number(fig8_one):
    data = json.loads(fig8_one.to_json())
    data["s"] = 0.25
    with pytest.raises(MalformedCertificate):
        Certificate.from_dict(data)


def test_deterministic_bytes():
    a = certify(2, 3, "5/2").to_json()
    b = certify(2, 3, "5/2").to_json()
    assert a == b


@pytest.mark.parametrize("m,n,r", [(1, 1, "3/2"), (2, 3, "-7/3"), (2, -3, "10")])
def test_mirror_coherence(m, n, r):
    a = certify(m, n, r)
    b = certify(n, m, str(-Fraction(r)))
    assert a.s == b.s and a.t == b.t
    assert {a.branch, b.branch} == {Branch.DIRECT, Branch.MIRROR}


def test_mirror_coherence_failures():
    with pytest.raises(NoRepresentationBranch):
        certify(2, -1, "5")
    with pytest.raises(NoRepresentationBranch):
        certify(-1, 2, "-5")


def test_precision_env(monkeypatch):
    monkeypatch.setenv("RILEY_PRECISION_BITS", "80")
    assert certify(1, 1, "1/2").precision_bits >= 80
    monkeypatch.setenv("RILEY_PRECISION_BITS", "16")
    with pytest.raises(ValueError):
        certify(1, 1, "1/2")


def test_escalation_exhausted(monkeypatch):
    import riley_slopes.certify as cm
    from riley_slopes.precision import PrecisionEscalation

    def always(*a, **k):
        raise PrecisionEscalation("forced")
    monkeypatch.setattr(cm, "solve_s", always)
    with pytest.raises(PrecisionExhausted):
        cm.certify(1, 1, "1/2")


def test_large_q_surgery_equation():
    cert = certify(1, 1, "7/2")
    assert cert.residuals["surgery_eq"] <= 1e-8
    e = 7 * mpmath.log(cert.A) + 2 * mpmath.log(cert.B)
    assert abs(e) <= 1e-8
    assert abs(cert.A ** 7 * cert.B ** 2 - 1) <= 1e-7
