import pytest

import health_check


def test_individual_checks():
    assert health_check.check_dependencies()
    assert health_check.check_lattice()
    assert health_check.check_curves()
    assert health_check.check_zero_counting()
    assert health_check.check_determinism()
    assert health_check.check_variance_term()


def test_main_exits_zero(capsys):
    with pytest.raises(SystemExit) as info:
        health_check.main()
    assert info.value.code == 0
    assert "All health checks passed" in capsys.readouterr().out


def test_run_checks_reports_each_status(capsys):
    def boom():
        raise RuntimeError("broken")

    checks = [("ok", lambda: True), ("bad", lambda: False), ("boom", boom)]
    assert health_check.run_checks(checks) is False
    out = capsys.readouterr().out.splitlines()
    assert out[0].split() == ["ok", "PASS"]
    assert out[1].split() == ["bad", "FAIL"]
    assert out[2].startswith("boom") and "ERROR: broken" in out[2]


def test_run_checks_all_pass():
    assert health_check.run_checks([("one", lambda: True), ("two", lambda: True)])
