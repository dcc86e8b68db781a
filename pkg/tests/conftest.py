import mpmath
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _fresh_precision(monkeypatch):
    monkeypatch.delenv("RILEY_PRECISION_BITS", raising=False)
    with mpmath.workprec(53):
        yield


def rel(a, b):
    """|a - b| / max(|a|, |b|, tiny)"""
    a, b = mpmath.mpf(a), mpmath.mpf(b)
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else mpmath.mpf(0)


# criterion number -> list of (part, passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[num]
        ok = all(p for _, p, _ in parts)
        bad = [f"{name}: {detail}" for name, p, detail in parts if not p]
        line = f"criterion {num}: {'PASS' if ok else 'FAIL'} ({sum(p for _, p, _ in parts)}/{len(parts)} parts)"
        terminalreporter.write_line(line)
        for b in bad:
            terminalreporter.write_line(f"    {b}")
