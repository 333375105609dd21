import pytest

from modules.verifiers import (SUITES, SuiteReport, run_suites, verify_appendix, verify_exact,
                               verify_lowerbounds, verify_montecarlo, verify_quantum, verify_sandwich)


def test_suite_report_separates_checks_from_findings():
    report = SuiteReport("demo")
    report.check("holds", True)
    report.finding("open question", False, "differs")
    assert report.ok and len(report.findings) == 1
    report.check("broken", False, "detail")
    assert not report.ok
    assert [line.split()[1] for line in report.lines()] == ["PASS", "NOTE", "FAIL"]


def test_exact_suite():
    report = verify_exact(n_max=6, truncation_n_max=4)
    assert report.ok, report.failures


def test_sandwich_suite():
    report = verify_sandwich(n_max=8)
    assert report.ok, report.failures


def test_appendix_suite_reports_the_odd_n_finding():
    report = verify_appendix(n_max=6)
    assert report.ok, report.failures
    (finding,) = report.findings
    assert not finding.passed


def test_lowerbounds_suite():
    report = verify_lowerbounds(n_max=24, hamming_n_max=5000, brute_even_max=10, optimal_n_max=4)
    assert report.ok, report.failures
    assert all(check.passed for check in report.findings)


def test_quantum_suite():
    report = verify_quantum(n_max=4)
    assert report.ok, report.failures


@pytest.mark.slow
def test_montecarlo_suite():
    report = verify_montecarlo(3.0, n=256, trials=200, uniform_trials=200, sweep_trials=50)
    assert report.ok, report.failures


def test_run_suites_dispatch():
    reports = run_suites(["appendix"], appendix={"n_max": 4})
    assert [r.name for r in reports] == ["appendix"]
    with pytest.raises(ValueError):
        run_suites(["nope"])
    assert "montecarlo" in SUITES


@pytest.mark.slow
def test_quantum_suite_at_its_default_size():
    report = verify_quantum()
    assert report.ok, report.failures
