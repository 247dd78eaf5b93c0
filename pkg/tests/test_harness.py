"""Tests for the suite runner, the appendix construction, and the CLI."""

import json
import math

import numpy as np
import pytest

from qentropy import channels as ch
from qentropy import entropy as ent
from qentropy import harness, linalg
from qentropy.cli import main as cli_main


class TestAppendixConstruction:
    def test_trace_preserving_reduces_to_identity_chain(self):
        phi = ch.random_channel(3, 3, 2, True, 0)
        tau = linalg.random_density(3, 2, 1)
        rho = linalg.random_density(3, 3, 2)
        sigma = linalg.random_density(3, 3, 3)
        lhs_sum, direct, bound = harness.appendix_construction_check(phi, tau, rho, sigma)
        base = ent.relative_entropy(ch.apply(phi, rho), ch.apply(phi, sigma))
        assert lhs_sum == pytest.approx(base, abs=1e-10)
        assert direct == pytest.approx(base, abs=1e-8)
        assert direct <= bound + 1e-8

    def test_half_identity_middle_term_vanishes(self):
        dim = 3
        phi = ch.KrausChannel(
            [np.eye(dim, dtype=complex) / math.sqrt(2)],
            d_in=dim,
            d_out=dim,
            tp_mode=ch.TRACE_NON_INCREASING,
        )
        tau = linalg.random_density(dim, 3, 4)
        rho = linalg.random_density(dim, 2, 5)
        sigma = linalg.random_density(dim, 3, 6)
        lhs_sum, direct, bound = harness.appendix_construction_check(phi, tau, rho, sigma)
        psi_term = lhs_sum - ent.relative_entropy(ch.apply(phi, rho), ch.apply(phi, sigma))
        assert psi_term == pytest.approx(0.0, abs=1e-9)
        assert abs(direct - lhs_sum) <= 1e-8
        assert direct <= bound + 1e-8

    def test_random_tni_full_chain(self):
        rng = np.random.default_rng(7)
        for seed in range(10):
            dim = 4
            base = ch.random_channel(dim, dim, 3, True, seed)
            phi = ch.KrausChannel(
                base.kraus[:2], d_in=dim, d_out=dim, tp_mode=ch.TRACE_NON_INCREASING
            )
            tau = linalg.random_density(dim, int(rng.integers(1, dim + 1)), rng)
            rho = linalg.random_density(dim, int(rng.integers(1, dim + 1)), rng)
            sigma = linalg.random_density(dim, dim, rng)
            lhs_sum, direct, bound = harness.appendix_construction_check(phi, tau, rho, sigma)
            h_phi = ent.relative_entropy(ch.apply(phi, rho), ch.apply(phi, sigma))
            assert abs(direct - lhs_sum) <= 1e-8
            assert h_phi <= direct + 1e-8
            assert direct <= bound + 1e-8

    def test_bad_tau(self):
        phi = ch.random_channel(2, 2, 1, True, 0)
        with pytest.raises(ValueError, match="unit trace"):
            harness.appendix_construction_check(
                phi, np.eye(2), np.eye(2) / 2, np.eye(2) / 2
            )


class TestSuites:
    @pytest.mark.parametrize(
        "suite,dims,trials",
        [
            ("inequalities", [2, 4], 12),
            ("continuity", [4], 12),
            ("monotonicity", [3], 12),
            ("complementary", [3], 8),
            ("roof", [3], 9),
            ("eof", [2], 10),
            ("appendix", [3], 10),
        ],
    )
    def test_random_suites_pass(self, suite, dims, trials):
        config = harness.SuiteConfig(suite=suite, dims=dims, trials=trials, seed=7)
        report = harness.run_suite(config)
        assert report.failures == 0, report.to_text()
        assert len(report.cases) == trials
        for case in report.cases:
            assert isinstance(case["seed"], int)

    def test_criteria_suite(self):
        config = harness.SuiteConfig(
            suite="criteria", dims=[4], trials=1, seed=0, n_schedule=[64, 256, 1024]
        )
        report = harness.run_suite(config)
        assert report.failures == 0, report.to_text()
        names = {c["name"] for c in report.cases}
        assert "example1_criterion_c" in names
        assert "example1_criterion_b" in names

    def test_unknown_suite_rejected(self):
        with pytest.raises(ValueError, match="unknown suite"):
            harness.SuiteConfig(suite="nope")

    def test_documented_configs(self):
        # the README's reference invocations run clean
        ineq = harness.run_suite(
            harness.SuiteConfig(suite="inequalities", dims=[6], trials=200, seed=42)
        )
        assert ineq.failures == 0
        mono = harness.run_suite(
            harness.SuiteConfig(suite="monotonicity", dims=[4], trials=200, seed=0)
        )
        assert mono.failures == 0
        appx = harness.run_suite(
            harness.SuiteConfig(suite="appendix", dims=[4], trials=100, seed=0)
        )
        assert appx.failures == 0

    def test_reports_deterministic(self):
        config = harness.SuiteConfig(suite="inequalities", dims=[3], trials=6, seed=11)
        report = harness.run_suite(config)
        a = report.dumps()
        b = harness.run_suite(config).dumps()
        assert a == b
        assert report.failures == sum(1 for c in report.cases if not c["pass"])

    def test_parallel_matches_serial(self):
        config = harness.SuiteConfig(suite="monotonicity", dims=[3], trials=8, seed=5)
        serial = harness.run_suite(config, jobs=1).dumps()
        parallel = harness.run_suite(config, jobs=2).dumps()
        assert serial == parallel

    def test_text_format(self):
        config = harness.SuiteConfig(suite="inequalities", dims=[2], trials=3, seed=0)
        text = harness.run_suite(config).to_text()
        assert "suite inequalities" in text and "0 failures" in text


class TestCli:
    def test_bound_continuity_prints_value(self, capsys):
        code = cli_main(["bound", "continuity", "--C", "0", "--ranks", "1,1", "--eps", "1"])
        assert code == 0
        assert capsys.readouterr().out.strip() == "1.386294"

    def test_verify_exit_zero(self, capsys):
        code = cli_main(
            ["verify", "--suite", "inequalities", "--dim", "3", "--trials", "5", "--seed", "42"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["failures"] == 0
        assert payload["config"]["seed"] == 42

    def test_verify_exit_one_on_failures(self, capsys):
        # an impossible tolerance forces failures and exit code 1
        code = cli_main(
            [
                "verify",
                "--suite",
                "inequalities",
                "--dim",
                "3",
                "--trials",
                "5",
                "--tol",
                "1e-30",
            ]
        )
        assert code == 1
        assert json.loads(capsys.readouterr().out)["failures"] > 0

    def test_verify_text_format(self, capsys):
        code = cli_main(
            [
                "verify",
                "--suite",
                "inequalities",
                "--dim",
                "2",
                "--trials",
                "3",
                "--format",
                "text",
            ]
        )
        assert code == 0
        assert "suite inequalities" in capsys.readouterr().out

    def test_verify_writes_file(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = cli_main(
            [
                "verify",
                "--suite",
                "appendix",
                "--dim",
                "3",
                "--trials",
                "5",
                "--seed",
                "1",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert json.loads(out.read_text())["suite"] == "appendix"

    def test_channel_analyze_family_spec(self, capsys):
        code = cli_main(
            [
                "channel",
                "analyze",
                '{"family":"example1","alpha":0.693147,"N":1024}',
                "--criterion",
                "b",
            ]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        rep = payload["reports"][0]
        assert rep["criterion"] == "b"
        assert rep["verdict"] == "diverging_trend"
        assert rep["n_schedule"] == [1024]

    def test_channel_analyze_criterion_a(self, capsys):
        code = cli_main(
            [
                "channel",
                "analyze",
                '{"family":"identity"}',
                "--criterion",
                "a",
                "--schedule",
                "4,8",
                "--starts",
                "2",
            ]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        rep = payload["reports"][0]
        assert rep["criterion"] == "a"
        assert max(rep["values"]["sup_estimates"]) <= 1e-9

    def test_channel_analyze_channel_json(self, tmp_path, capsys):
        phi = ch.random_channel(3, 3, 2, True, 0)
        path = tmp_path / "channel.json"
        path.write_text(json.dumps(ch.channel_to_json(phi)))
        code = cli_main(["channel", "analyze", str(path), "--schedule", "4,8"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert {r["criterion"] for r in payload["reports"]} == {"b", "c"}

    def test_roof_eof_bell(self, tmp_path, capsys):
        bell = np.zeros(4, dtype=complex)
        bell[0] = bell[3] = 1 / math.sqrt(2)
        path = tmp_path / "state.json"
        path.write_text(json.dumps(linalg.matrix_to_json(linalg.projector(bell))))
        code = cli_main(
            ["roof", "eof", str(path), "--split", "2,2", "--m", "4", "--starts", "2"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["value"] == pytest.approx(math.log(2), abs=1e-8)
        assert payload["direction"] == "upper_bound_of_inf"

    def test_input_error_exit_two(self, capsys):
        code = cli_main(["channel", "analyze", '{"bogus": 1}'])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_bad_state_file_exit_two(self, capsys):
        code = cli_main(["roof", "eof", "/nonexistent/state.json", "--split", "2,2"])
        assert code == 2

    def test_usage_error_exit_two(self):
        with pytest.raises(SystemExit) as exc:
            cli_main(["verify", "--suite", "bogus"])
        assert exc.value.code == 2
