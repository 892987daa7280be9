"""
自检流程测试
"""
import unittest

import pytest

from src.core.selftest import SelfTestReport, run_selftest


class TestReport(unittest.TestCase):

    def test_record(self):
        report = SelfTestReport(0, 1)
        report.record("weights", True)
        report.record("weights", None)
        report.record("exact", False, "子模不是强可除的")
        self.assertFalse(report.ok)
        data = report.to_dict()
        self.assertEqual(data["checks"]["weights"], {"passed": 1, "failed": 0, "skipped": 1})
        self.assertEqual(data["failures"], ["exact: 子模不是强可除的"])

    def test_zero_trials(self):
        report = run_selftest(3, 0)
        self.assertTrue(report.ok)
        self.assertEqual(report.to_dict()["checks"], {})


@pytest.mark.slow
def test_same_seed_same_report():
    assert run_selftest(11, 2).to_dict() == run_selftest(11, 2).to_dict()


@pytest.mark.slow
@pytest.mark.parametrize("seed", [0, 1])
def test_small_runs_pass(seed):
    report = run_selftest(seed, 3)
    assert report.ok, report.failures
