import math

import numpy as np
import pytest

from floqspin import (AxisSpec, ConfigError, DomainError, SweepSpec,
                      bessel_root, detect_jumps, run_point, run_sweep,
                      write_csv, write_metadata)
from floqspin.sweep import result_columns
from conftest import system


class TestDetectJumps:
    def test_synthetic_step(self):
        xs = np.linspace(0.0, 1.0, 51)
        ys = np.where(xs < 0.5, 0.0, 1.0)
        found = detect_jumps(xs, ys, 0.1)
        assert len(found) == 1
        jump = found[0]
        assert jump.magnitude == pytest.approx(1.0)
        assert abs(jump.location - 0.5) <= xs[1] - xs[0]

    def test_smooth_series_clean(self):
        xs = np.linspace(0.0, 1.0, 64)
        ys = np.sin(2.0 * math.pi * xs)
        assert detect_jumps(xs, ys, 0.1) == []

    def test_requires_enough_points(self):
        with pytest.raises(DomainError):
            detect_jumps([0, 1, 2], [0, 0, 1], 0.1)

    def test_tolerates_nan_values(self):
        xs = np.linspace(0.0, 1.0, 20)
        ys = np.where(xs < 0.5, math.nan, 1.0)
        detect_jumps(xs, ys, 0.1)  # must not raise

    def test_root_annotation(self):
        omega = 40.0
        z1 = bessel_root(1)
        xs = np.linspace(90.0, 102.0, 40)
        ys = np.where(xs < z1 * omega, 0.0, 1.0)
        jump = detect_jumps(xs, ys, 0.1, omega=omega)[0]
        assert jump.root_index == 1
        assert jump.nearest_root == pytest.approx(z1 * omega, rel=1e-12)
        assert jump.root_relative_distance < 0.01


class TestRunPoint:
    def test_reference_point_record(self, bath):
        record = run_point(system(h_z1=40.0), bath)
        assert record.p1 > record.p0
        assert record.gap == record.eps1 - record.eps0
        assert record.ratio_defined

    def test_theta_zero_floquet_gibbs(self, bath):
        record = run_point(system(theta=0.0, h_z1=40.0), bath)
        gibbs = math.exp(record.gap / bath.temperature)
        assert abs(record.p0 / record.p1 - gibbs) <= 0.02

    def test_undriven_gibbs(self, bath):
        record = run_point(system(theta=math.pi / 4, h_z1=0.0), bath)
        assert abs(record.p1 / record.p0 - math.exp(-1.0 / 3.0)) <= 1e-3

    def test_analytic_columns(self, bath):
        record = run_point(system(h_z1=40.0), bath, include_analytic=True)
        assert abs(record.eps0_hf - record.eps0) < 0.01
        assert abs(record.a2_nm1_10_hf - record.a2_nm1_10) < 5e-3

    def test_deterministic(self, bath):
        a = run_point(system(h_z1=77.0, theta=0.9), bath)
        b = run_point(system(h_z1=77.0, theta=0.9), bath)
        assert a == b


class TestSpecValidation:
    def test_axis_names(self):
        with pytest.raises(ConfigError):
            AxisSpec("hz1", 0.0, 1.0, 10)

    def test_axis_sample_count(self):
        with pytest.raises(ConfigError):
            AxisSpec("h_z1", 0.0, 1.0, 1)

    def test_axis_finite(self):
        with pytest.raises(ConfigError):
            AxisSpec("h_z1", 0.0, math.inf, 10)

    def test_distinct_axes(self, bath):
        axis = AxisSpec("h_z1", 0.0, 1.0, 4)
        with pytest.raises(ConfigError):
            SweepSpec(system=system(), bath=bath, axis1=axis, axis2=axis)

    def test_output_groups(self, bath):
        with pytest.raises(ConfigError):
            SweepSpec(system=system(), bath=bath,
                      axis1=AxisSpec("h_z1", 0.0, 1.0, 4),
                      outputs=("plots",))


class TestRunSweep:
    def test_p0_jumps_located_at_cdt_points(self, bath):
        omega = 40.0
        spec = SweepSpec(
            system=system(), bath=bath,
            axis1=AxisSpec("h_z1", 0.3 * omega, 6.0 * omega, 600),
            n_steps=1024, n_max=3, jump_threshold_p0=0.02)
        result = run_sweep(spec, workers=1)
        p0_jumps = [j for j in result.jumps if j.observable == "p0"]
        assert len(p0_jumps) >= 2
        for k in (1, 2):
            target = bessel_root(k) * omega
            nearest = min(p0_jumps, key=lambda j: abs(j.location - target))
            assert abs(nearest.location - target) / target <= 0.005

    def test_halving_the_step_pins_jump_location(self, bath):
        omega = 40.0
        z1 = bessel_root(1)
        locations = {}
        for points in (60, 120):
            spec = SweepSpec(
                system=system(), bath=bath,
                axis1=AxisSpec("h_z1", (z1 - 0.15) * omega,
                               (z1 + 0.15) * omega, points),
                n_steps=1024, jump_threshold_p0=0.02)
            result = run_sweep(spec, workers=1)
            p0_jumps = [j for j in result.jumps if j.observable == "p0"]
            assert p0_jumps
            locations[points] = max(p0_jumps,
                                    key=lambda j: j.magnitude).location
        fine_step = 0.3 * omega / 119
        assert abs(locations[60] - locations[120]) <= fine_step

    def test_short_series_yields_no_jump_records(self, bath):
        spec = SweepSpec(system=system(), bath=bath,
                         axis1=AxisSpec("h_z1", 10.0, 20.0, 2),
                         n_steps=1024)
        result = run_sweep(spec, workers=1)
        assert result.jumps == []
        assert all(r is not None for r in result.records)

    def test_2d_sweep_shares_solutions_across_theta(self, bath):
        omega = 40.0
        spec = SweepSpec(
            system=system(), bath=bath,
            axis1=AxisSpec("h_z1", 0.2 * omega, 2.0 * omega, 9),
            axis2=AxisSpec("theta", 0.0, math.pi / 2, 5),
            n_steps=1024)
        result = run_sweep(spec, workers=1)
        assert len(result.records) == 45
        # axis1 fastest: consecutive records share theta
        thetas = [r.system.theta for r in result.records[:9]]
        assert len(set(thetas)) == 1
        # theta=0 row is Floquet-Gibbs, theta=pi/2 row shows inversion
        gibbs_row = result.records[:9]
        for r in gibbs_row:
            assert r.p0 > r.p1
        inverted_row = result.records[-9:]
        assert any(r.p1 > r.p0 for r in inverted_row)

    def test_point_failures_are_recorded_not_fatal(self, bath):
        spec = SweepSpec(system=system(), bath=bath,
                         axis1=AxisSpec("h_z1", 10.0, 20.0, 8),
                         n_steps=1024, n_max=512)  # n_max > n_steps/4
        result = run_sweep(spec, workers=1)
        assert len(result.failures) == 8
        assert all(r is None for r in result.records)
        assert "ConfigError" in result.failures[0][1]


class TestOutputFiles:
    def test_csv_schema_and_determinism(self, bath, tmp_path):
        spec = SweepSpec(system=system(), bath=bath,
                         axis1=AxisSpec("h_z1", 20.0, 80.0, 9),
                         n_steps=1024)
        paths = []
        for workers, name in ((1, "a.csv"), (2, "b.csv")):
            result = run_sweep(spec, workers=workers)
            path = tmp_path / name
            write_csv(result, path)
            paths.append(path)
        first, second = (p.read_bytes() for p in paths)
        assert first == second

        text = paths[0].read_text()
        lines = text.split("\n")
        assert lines[0].startswith(
            "h_z1,theta,eps0,eps1,gap,p0,p1,a2_n-1_10,a2_n-1_01,"
            "I_b,I_r,I_0,ratio")
        assert "\r" not in text
        # 17 significant digits round-trip
        row = lines[1].split(",")
        assert float(row[1]) == math.pi / 2

    def test_spectrum_only_columns(self):
        cols = result_columns(("spectrum",))
        assert "p0" not in cols and "I_b" not in cols
        assert "eps0" in cols and "gap" in cols

    def test_spectrum_fast_path_skips_rate_stage(self, bath):
        spec = SweepSpec(system=system(), bath=bath,
                         axis1=AxisSpec("h_z1", 20.0, 80.0, 4),
                         outputs=("spectrum",), n_steps=1024)
        result = run_sweep(spec, workers=1)
        for record in result.records:
            assert math.isfinite(record.eps0)
            assert math.isnan(record.p0)  # rate stage never ran

    def test_analytic_columns_in_csv(self, bath, tmp_path):
        spec = SweepSpec(system=system(), bath=bath,
                         axis1=AxisSpec("h_z1", 20.0, 80.0, 4),
                         outputs=("spectrum", "populations", "coefficients",
                                  "emission", "analytic"),
                         n_steps=1024)
        result = run_sweep(spec, workers=1)
        path = tmp_path / "with_hf.csv"
        write_csv(result, path)
        header, first = path.read_text().splitlines()[:2]
        cols = header.split(",")
        values = dict(zip(cols, map(float, first.split(","))))
        assert abs(values["eps0_hf"] - values["eps0"]) < 0.01
        assert abs(values["a2_n-1_10_hf"] - values["a2_n-1_10"]) < 5e-3

    def test_metadata_sidecar(self, bath, tmp_path):
        spec = SweepSpec(system=system(), bath=bath,
                         axis1=AxisSpec("h_z1", 20.0, 80.0, 9),
                         n_steps=1024)
        result = run_sweep(spec, workers=1)
        meta = tmp_path / "run.meta.txt"
        write_metadata(result, meta)
        text = meta.read_text()
        assert "version=0.1.0" in text
        assert "sweep.n_steps=1024" in text
        assert "system.omega=40" in text
        assert "bath.gamma=0.01" in text
        assert "sweep.axis1_points=9" in text
        assert "I_0_definition" in text
