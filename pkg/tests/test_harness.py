"""Loading programs, study drivers, CSV output, CLI."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

import mrmaxwell.harness as hn
from mrmaxwell import DomainError, MaterialParams
from mrmaxwell import tensor3 as t3
from mrmaxwell.cli import main as cli_main

SQ2 = 1.0 / math.sqrt(2.0)


class TestNonproportionalProgram:
    def setup_method(self):
        self.program = hn.LoadingProgram()

    def test_starts_at_identity(self):
        assert np.allclose(self.program.F(0.0), np.eye(3), atol=1e-15)

    def test_first_keyframe(self):
        F = self.program.F(1.0)
        assert np.allclose(F, np.diag([2.0, SQ2, SQ2]), atol=1e-14)

    def test_midpoint_interpolation(self):
        F2 = np.diag([2.0, SQ2, SQ2])
        F3 = np.array([[1.0, 1.0, 0], [0, 1, 0], [0, 0, 1]])
        raw = 0.5 * F2 + 0.5 * F3
        expected = raw / np.cbrt(np.linalg.det(raw))
        assert np.allclose(self.program.F(1.5), expected, atol=1e-14)

    def test_volume_preserving_everywhere(self):
        for t in np.linspace(0.0, 3.0, 301):
            assert abs(t3.det(self.program.F(float(t))) - 1.0) < 1e-14

    def test_domain_bounds(self):
        with pytest.raises(DomainError):
            self.program.F(-0.5)
        with pytest.raises(DomainError):
            self.program.F(3.5)

    def test_loading_F_alias(self):
        assert np.array_equal(
            hn.loading_F(self.program, 0.7), self.program.F(0.7)
        )


class TestUniaxialProgram:
    def test_triangle_profile(self):
        prg = hn.LoadingProgram(kind="uniaxial", amplitude=0.3, frequency=2.0)
        T = 0.5
        assert prg.strain(0.0) == 0.0
        assert prg.strain(T / 4) == pytest.approx(0.3, rel=1e-12)
        assert prg.strain(T / 2) == pytest.approx(0.0, abs=1e-12)
        assert prg.strain(3 * T / 4) == pytest.approx(-0.3, rel=1e-12)
        assert prg.strain(T) == pytest.approx(0.0, abs=1e-12)

    def test_constant_rate(self):
        prg = hn.LoadingProgram(kind="uniaxial", amplitude=0.2, frequency=1.0)
        for lo, hi in ((0.01, 0.24), (0.26, 0.74), (0.76, 0.99)):
            ts = np.linspace(lo, hi, 100)
            rates = np.diff([prg.strain(t) for t in ts]) / np.diff(ts)
            assert np.allclose(np.abs(rates), 4 * 0.2 * 1.0, rtol=1e-6)

    def test_F_is_isochoric_uniaxial(self):
        prg = hn.LoadingProgram(kind="uniaxial", amplitude=0.4, frequency=0.1)
        F = prg.F(1.7)
        assert abs(t3.det(F) - 1.0) < 1e-14
        assert F[1, 1] == F[2, 2]


class TestCustomProgram:
    def test_interpolates_keyframes(self):
        kf = ((0.0, np.eye(3)), (2.0, np.diag([1.5, 1.0, 1.0])))
        prg = hn.LoadingProgram(kind="custom-keyframes", keyframes=kf)
        F = prg.F(1.0)
        raw = np.diag([1.25, 1.0, 1.0])
        assert np.allclose(F, raw / np.cbrt(np.linalg.det(raw)), atol=1e-14)
        assert prg.t_end == 2.0

    def test_needs_two_keyframes(self):
        with pytest.raises(DomainError):
            hn.LoadingProgram(kind="custom-keyframes", keyframes=((0.0, np.eye(3)),))


class TestRandomGenerators:
    def test_spd_and_unimodular(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            A = hn.random_spd(rng)
            assert t3.is_spd(A) and (A == A.T).all()
            U = hn.random_unimodular_spd(rng, 1e-2, 1e2)
            assert abs(t3.det(U) - 1.0) < 1e-9


class TestRunConfig:
    def test_method_string_expansion(self):
        cfg = hn.RunConfig(methods="all")
        assert cfg.methods == hn.METHOD_NAMES
        cfg = hn.RunConfig(methods="mebm")
        assert cfg.methods == ("mebm",)

    def test_validation(self):
        with pytest.raises(DomainError):
            hn.RunConfig(dt=0.0)
        with pytest.raises(DomainError):
            hn.RunConfig(methods="simplectic")
        with pytest.raises(DomainError):
            hn.RunConfig(formulation="spatial")


@pytest.fixture(scope="module")
def error_study_result():
    return hn.run_error_study(hn.RunConfig(reference_substeps=4000))


@pytest.fixture(scope="module")
def robustness_result():
    return hn.run_robustness(hn.RunConfig())


class TestErrorStudy:
    def test_self_checks_pass(self, error_study_result):
        result = error_study_result
        assert result.passed, result.summary()

    def test_method_ordering(self, error_study_result):
        result = error_study_result
        assert result.values["gap_ifebm_mebm"] < result.values["gap_mebm_em"]
        assert (
            result.values["gap_2iebm_mebm"]
            < 0.1 * result.values["gap_ifebm_mebm"]
        )

    def test_dual_formulation_gap(self, error_study_result):
        result = error_study_result
        assert result.values["dual_formulation_gap"] < 1e-10

    def test_csv_shape_and_roundtrip(self, error_study_result):
        result = error_study_result
        text = result.tables["nonprop_errors.csv"]
        lines = text.strip().split("\n")
        assert lines[0] == "t,error_ifebm,error_2iebm,error_mebm,error_em"
        assert len(lines) == 32
        ts = np.linspace(0.0, 3.0, 31)
        for k, line in enumerate(lines[1:]):
            # 17 significant digits round-trip exactly
            assert float(line.split(",")[0]) == ts[k]

    def test_error_metric_self_consistency(self):
        # a method fed the reference trajectory as its own output has
        # identically zero error
        program = hn.LoadingProgram()
        ts = np.linspace(0.0, 3.0, 7)
        ref = __import__("mrmaxwell").reference_solve(
            program.C, np.eye(3), ts, MaterialParams(1, 1, 1), 32, False
        )
        errs = [
            np.linalg.norm(a - b) for a, b in zip(ref.stresses, ref.stresses)
        ]
        assert all(e == 0.0 for e in errs)

    def test_unconverged_reference_warns(self):
        with pytest.warns(UserWarning, match="Richardson gap"):
            hn.run_error_study(hn.RunConfig(reference_substeps=4000))

    def test_reference_floor_validated(self):
        with pytest.raises(DomainError):
            hn.run_error_study(hn.RunConfig(reference_substeps=100))

    def test_deterministic(self, error_study_result):
        result = error_study_result
        again = hn.run_error_study(hn.RunConfig(reference_substeps=4000))
        assert again.tables["nonprop_errors.csv"] == result.tables[
            "nonprop_errors.csv"
        ]


class TestConvergenceStudy:
    def test_indeterminate_flag_for_frozen_material(self):
        cfg = hn.RunConfig(
            dt=0.1, eta=1e12, methods=("ifebm",), reference_substeps=4000
        )
        res = hn.run_convergence(cfg)
        assert res.values["indeterminate"]["ifebm"]
        assert res.checks["order_indeterminate_flagged_ifebm"]

    def test_needs_four_levels(self):
        with pytest.raises(DomainError):
            hn.run_convergence(hn.RunConfig(), levels=3)


class TestRobustnessStudy:
    def test_self_checks_pass(self, robustness_result):
        assert robustness_result.passed, robustness_result.summary()

    def test_closed_form_methods_never_iterate(self, robustness_result):
        result = robustness_result
        for dt in (0.5, 1.0):
            eff = result.values["effort"][f"ifebm,dt={dt:g}"]
            assert eff["total_iterations"] == 0
            assert eff["substep_events"] == 0

    def test_newton_baselines_stressed_at_large_dt(self, robustness_result):
        result = robustness_result
        for m in ("mebm", "em"):
            eff = result.values["effort"][f"{m},dt=1"]
            assert (
                eff["substep_events"] >= 1
                or eff["divergences"] >= 1
                or eff["max_iterations"] > 3
            )

    def test_seeded_determinism(self):
        a = hn.run_robustness(hn.RunConfig(seed=7))
        b = hn.run_robustness(hn.RunConfig(seed=7))
        assert a.values["subtractive_deviation"] == b.values["subtractive_deviation"]


class TestUniaxialStudy:
    def test_single_cell_fast(self, tmp_path):
        cfg = hn.RunConfig(
            frequencies=(1.0,),
            amplitudes=(0.2,),
            fine_steps_per_cycle=500,
            coarse_steps_per_cycle=50,
        )
        res = hn.run_uniaxial(cfg)
        assert res.passed, res.summary()
        cell = res.values["cells"]["f1_a0.2"]
        assert cell["gap_fraction_of_peak"] < 0.03
        assert all(a >= 0.0 for a in cell["cycle_areas"])
        paths = res.write(tmp_path)
        assert len(paths) == 1
        text = (tmp_path / "uniaxial_f1_a0.2.csv").read_text()
        assert text.startswith("grid,t,strain,stress\n")

    def test_custom_model_file(self, tmp_path):
        doc = (
            '{"equilibrium": {"c10": 0.1, "c01": 0.1, "k": "incompressible"},'
            ' "branches": [{"c10": 0.5, "c01": 0.5, "eta": 1.0}]}'
        )
        path = tmp_path / "model.json"
        path.write_text(doc)
        cfg = hn.RunConfig(
            frequencies=(1.0,),
            amplitudes=(0.2,),
            fine_steps_per_cycle=500,
            model_file=str(path),
        )
        res = hn.run_uniaxial(cfg)
        assert res.passed, res.summary()

    def test_zero_amplitude_is_zero_stress(self):
        cfg = hn.RunConfig(
            frequencies=(1.0,),
            amplitudes=(0.0,),
            fine_steps_per_cycle=200,
        )
        res = hn.run_uniaxial(cfg)
        # flat curve: peak is zero, checks degrade gracefully
        cell = res.values["cells"]["f1_a0"]
        assert cell["peak_stress"] == 0.0 or cell["peak_stress"] < 1e-14


class TestTangentSweepStudy:
    def test_small_grid(self):
        cfg = hn.RunConfig(
            tangent_dts=(0.1,), tangent_etas=(10.0,), methods=("ifebm", "2iebm")
        )
        res = hn.run_tangent_sweep(cfg)
        v = res.values["deviation"]["ifebm,dt=0.1,eta=10.0"]
        # magnitude characteristic of this cell
        assert 2e-7 < v < 3e-6
        assert "tangent_sweep.csv" in res.tables


class TestCli:
    def test_robustness_exit_zero(self, tmp_path, capsys):
        code = cli_main(
            ["robustness", "--out", str(tmp_path), "--summary", "json", "--seed", "3"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["study"] == "robustness"
        assert payload["passed"] is True
        assert (tmp_path / "robustness.csv").exists()

    def test_nonprop_with_flags(self, tmp_path, capsys):
        code = cli_main(
            [
                "nonprop",
                "--dt",
                "0.1",
                "--reference-substeps",
                "4000",
                "--out",
                str(tmp_path),
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "overall: PASS" in out
        assert (tmp_path / "nonprop_errors.csv").exists()

    def test_unknown_method_rejected(self):
        with pytest.raises(SystemExit):
            cli_main(["nonprop", "--method", "rk4"])

    def test_module_invocation(self, tmp_path):
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "mrmaxwell",
                "uniaxial",
                "--fine-steps",
                "200",
                "--coarse-steps",
                "50",
                "--summary",
                "json",
            ],
            capture_output=True,
            text=True,
            timeout=300,
        )
        assert proc.returncode == 0, proc.stderr
        payload = json.loads(proc.stdout)
        assert payload["study"] == "uniaxial"
