import pytest

from thermal_repeller.selftest import CHECKS, run_checks


@pytest.fixture(scope="module")
def results():
    return run_checks()


def test_all_pass(results):
    failed = [r.line() for r in results if not r.passed]
    assert not failed, failed


def test_family_coverage():
    assert len({c.family for c in CHECKS}) >= 6


def test_names_unique():
    assert len({c.name for c in CHECKS}) == len(CHECKS)


def test_lines(results):
    for r in results:
        assert r.line().startswith("PASS ")
        assert r.check.name in r.line()


def test_tolerance_override():
    fast = [c for c in CHECKS if c.family in ("special-functions", "quadrature")]
    strict = run_checks(1e-20, fast)
    assert all(r.tolerance == 1e-20 for r in strict)
    assert not strict[0].passed
    assert strict[0].line().startswith("FAIL ")
