"""Tests for experiment sweeps, supersampling, resources and file I/O."""

import math

import numpy as np
import pytest

from qmean.estimators import qcoin_queries, qss_queries
from qmean.harness import (
    ConfigError,
    SupersampleJob,
    SweepSpec,
    build_teaser_image,
    calibrate_optimal_k,
    calibration_rows,
    config_floats,
    config_ints,
    default_regions,
    fast_qcoin_estimate,
    fit_loglog_slope,
    nearest_power_of_two_resolution,
    noise_from_config,
    parse_config,
    qss_expected_error,
    qss_mean_error,
    qss_theoretical_distribution,
    read_pgm,
    report_resources,
    run_delta_scaling_sweep,
    run_supersample,
    run_value_sweep,
    sample_monte_carlo,
    sample_qss,
    write_csv,
    write_pgm,
)
from qmean.noise import HARDWARE_PRESET, NoiseModel
from qmean.primitives import OracleSpec
from qmean.estimators import estimate_qcoin, qss_exact_distribution


class TestQssExactError:
    def test_distribution_normalized(self):
        dist = qss_theoretical_distribution(0.42, 64)
        assert abs(dist.sum() - 1.0) < 1e-12

    def test_matches_statevector_route(self):
        for f in (0.07, 0.5, 0.93):
            np.testing.assert_allclose(
                qss_theoretical_distribution(f, 16),
                qss_exact_distribution(OracleSpec([f]), 16),
                atol=1e-12,
            )

    def test_zero_error_on_grid(self):
        p, t = 16, 5
        f = math.sin(t * math.pi / p) ** 2
        assert qss_expected_error(f, p) < 1e-10

    def test_mean_error_shrinks_with_resolution(self):
        errs = [qss_mean_error(p) for p in (8, 32, 128)]
        assert errs == sorted(errs, reverse=True)


class TestBudgetHelpers:
    def test_nearest_resolution(self):
        assert nearest_power_of_two_resolution(255) == 128
        assert nearest_power_of_two_resolution(254) == 64
        assert nearest_power_of_two_resolution(3) == 2

    def test_fit_loglog_slope_recovers_power_law(self):
        q = np.array([1e2, 1e3, 1e4, 1e5])
        e = 3.0 * q**-0.5
        assert abs(fit_loglog_slope(q, e) + 0.5) < 1e-12
        assert abs(fit_loglog_slope(q, e, skip_first=False) + 0.5) < 1e-12

    def test_skip_first_drops_smallest_budget(self):
        q = np.array([1e2, 1e3, 1e4, 1e5])
        e = 3.0 * q**-0.5
        e[0] = 10.0  # startup artifact should be ignored
        assert abs(fit_loglog_slope(q, e) + 0.5) < 1e-12


class TestSamplers:
    def test_monte_carlo_noiseless_vectorized(self):
        rng = np.random.default_rng(0)
        fs = np.full(5000, 0.3)
        est = sample_monte_carlo(fs, 1000, rng)
        assert abs(float(np.mean(est)) - 0.3) < 0.002

    def test_monte_carlo_noisy_needs_constant_f(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            sample_monte_carlo(np.array([0.1, 0.9]), 100, rng, HARDWARE_PRESET)

    def test_monte_carlo_noisy_constant_array(self):
        rng = np.random.default_rng(0)
        est = sample_monte_carlo(np.full(100, 0.5), 10000, rng, HARDWARE_PRESET)
        assert est.shape == (100,)
        assert np.all((est >= 0) & (est <= 1))

    def test_qss_sampler_support(self):
        rng = np.random.default_rng(1)
        vals = sample_qss(0.37, 16, rng, size=200)
        grid = np.sin(np.arange(16) * np.pi / 16) ** 2
        assert np.all(np.min(np.abs(vals[:, None] - grid[None, :]), axis=1) < 1e-12)

    def test_fast_qcoin_matches_statevector_estimator_distribution(self):
        """Same seeds, same binomial draw sequence: the analytic fast path and
        the statevector estimator see identical head probabilities, so the
        estimates agree run by run."""
        f = 0.43
        oracle = OracleSpec([f])
        for seed in range(25):
            fast = fast_qcoin_estimate(f, 3, 30, np.random.default_rng(seed))
            slow = estimate_qcoin(oracle, 3, 30, seed=seed).value
            assert abs(fast - slow) < 1e-9


class TestSweepSpec:
    def test_budgets_must_ascend(self):
        with pytest.raises(ValueError):
            SweepSpec(algorithms=["qss"], budgets=[1000, 100])

    def test_repetitions_positive(self):
        with pytest.raises(ValueError):
            SweepSpec(algorithms=["qss"], budgets=[100], repetitions=0)


@pytest.fixture(scope="module")
def rows():
    spec = SweepSpec(
        algorithms=["monte-carlo", "qss", "qcoin"],
        budgets=[100, 1000, 10000],
        repetitions=400,
        f_values=[0.1, 0.5, math.sin(3 * math.pi / 16) ** 2, 1.0],
        qcoin_k=[3],
        seed_base=7,
    )
    return run_value_sweep(spec)


class TestValueSweep:
    def test_monte_carlo_reduction_uniform_across_f(self, rows):
        for f in (0.1, 0.5):
            pts = [(r["queries"], r["mae"]) for r in rows
                   if r["algorithm"] == "monte-carlo" and r["f"] == f]
            slope = fit_loglog_slope(*zip(*pts), skip_first=False)
            assert abs(slope + 0.5) < 0.15

    def test_qss_zero_error_on_grid_f(self, rows):
        f = math.sin(3 * math.pi / 16) ** 2
        grid_rows = [r for r in rows if r["algorithm"] == "qss" and r["f"] == f]
        assert all(r["mae"] < 1e-10 for r in grid_rows)

    def test_qcoin_residual_error_at_one(self, rows):
        qcoin = [r for r in rows if r["algorithm"] == "qcoin" and r["f"] == 1.0]
        mc = [r for r in rows if r["algorithm"] == "monte-carlo" and r["f"] == 1.0]
        assert all(r["mae"] > 0 for r in qcoin)
        assert all(r["mae"] == 0 for r in mc)

    def test_queries_match_closed_forms(self, rows):
        for r in rows:
            if r["algorithm"] == "qss":
                p = nearest_power_of_two_resolution(r["budget"])
                assert r["queries"] == qss_queries(p)
            elif r["algorithm"] == "qcoin":
                trials = r["budget"] // qcoin_queries(3, 1)
                assert r["queries"] == qcoin_queries(3, trials)


class TestDeltaScalingSweep:
    def test_slope_near_minus_two_thirds(self):
        res = run_delta_scaling_sweep(step_indices=range(2, 7),
                                      repetitions=600, seed=1)
        assert abs(res["slope"] + 2.0 / 3.0) < 0.1

    def test_queries_grow_as_inverse_delta_cubed(self):
        res = run_delta_scaling_sweep(step_indices=range(3, 7),
                                      repetitions=10, seed=0)
        for row in res["rows"]:
            expected = row["trials"] * (1 + 2 * row["aa_repetitions"])
            assert row["queries"] == expected


class TestCalibration:
    def test_rows_flatten_sorted(self):
        table = {100: {1: 0.2, 0: 0.3}, 50: {0: 0.4}}
        rows = calibration_rows(table)
        assert [(r["budget"], r["k"]) for r in rows] == [(50, 0), (100, 0), (100, 1)]

    def test_infeasible_k_skipped(self):
        table = calibrate_optimal_k([10], [0, 5], repetitions=20, seed=0)
        assert list(table[10]) == [0]


class TestTeaserImage:
    def test_dimensions_and_range(self):
        img = build_teaser_image(128, 128)
        assert img.shape == (128, 128)
        assert img.min() == 0.0 and img.max() == 1.0

    def test_bottom_bands(self):
        img = build_teaser_image(160, 160)
        band = img[-10]
        for i, v in enumerate([0.0, 0.25, 0.5, 0.75, 1.0]):
            assert band[i * 32 + 16] == v

    def test_gradient_strip_monotone(self):
        img = build_teaser_image(128, 128)
        col = img[:96, 100]
        assert np.all(np.diff(col) >= 0)

    def test_left_flat_region(self):
        img = build_teaser_image(128, 128)
        assert np.all(img[:96, :64] == 0.5)

    def test_rejects_bad_dimensions(self):
        with pytest.raises(ValueError):
            build_teaser_image(100, 128)

    def test_default_regions_inside_image(self):
        regions = default_regions(128, 128)
        assert "gradient" in regions and "band-0.5" in regions
        for x0, y0, x1, y1 in regions.values():
            assert 0 <= x0 < x1 <= 16 and 0 <= y0 < y1 <= 16


class TestSupersample:
    def test_uniform_image_ideal(self):
        job = SupersampleJob(image=np.full((16, 16), 0.6), algorithm="ideal",
                             seed_base=0)
        result = run_supersample(job)
        np.testing.assert_allclose(result.estimated, 0.6, atol=1e-12)
        np.testing.assert_allclose(result.ideal, 0.6, atol=1e-12)

    def test_estimates_scatter_around_value(self):
        job = SupersampleJob(image=np.full((16, 16), 0.6),
                             algorithm="monte-carlo", per_pixel_budget=500,
                             seed_base=3)
        result = run_supersample(job)
        assert abs(float(result.estimated.mean()) - 0.6) < 0.01

    def test_qss_output_on_grid(self):
        job = SupersampleJob(image=build_teaser_image(16, 16), algorithm="qss",
                             qss_resolution=16, seed_base=1)
        result = run_supersample(job)
        grid = np.sin(np.arange(16) * np.pi / 16) ** 2
        flat = result.estimated.ravel()
        assert np.all(np.min(np.abs(flat[:, None] - grid[None, :]), axis=1) < 1e-12)

    def test_large_budget_converges_to_ideal(self):
        img = build_teaser_image(16, 16)
        for algorithm in ("monte-carlo", "qcoin"):
            job = SupersampleJob(image=img, algorithm=algorithm,
                                 per_pixel_budget=200000, seed_base=4)
            result = run_supersample(job)
            assert float(np.abs(result.estimated - result.ideal).mean()) < 0.01

    def test_deterministic_rerun(self):
        job = SupersampleJob(image=build_teaser_image(16, 16), algorithm="qcoin",
                             per_pixel_budget=240, seed_base=11)
        a = run_supersample(job).estimated
        b = run_supersample(job).estimated
        np.testing.assert_array_equal(a, b)

    def test_rejects_bad_dimensions(self):
        with pytest.raises(ValueError):
            SupersampleJob(image=np.zeros((10, 16)), algorithm="ideal")

    def test_rejects_out_of_range_values(self):
        with pytest.raises(ValueError):
            SupersampleJob(image=np.full((16, 16), 1.5), algorithm="ideal")


class TestResources:
    def test_qubit_counts(self):
        reports = report_resources(1024, 32)
        assert reports["qss"].qubits == 10 + 5 + 1
        assert reports["qss"].qubits_excluding_target == 15
        assert reports["qcoin"].qubits == 11
        assert reports["qcoin"].qubits_excluding_target == 10

    def test_single_bin_qcoin_needs_one_qubit(self):
        reports = report_resources(1, 16)
        assert reports["qcoin"].qubits == 1
        assert reports["qcoin"].connectivity_edges == 0

    def test_qss_needs_more_gates_and_edges(self):
        reports = report_resources(16, 16)
        assert reports["qss"].multi_qubit_gates >= reports["qcoin"].multi_qubit_gates
        assert reports["qss"].connectivity_edges > reports["qcoin"].connectivity_edges

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            report_resources(12, 16)


class TestConfigParsing:
    def test_key_value_and_comments(self):
        cfg = parse_config("a = 1\n# note\nb = x y  # trailing\n\n")
        assert cfg == {"a": "1", "b": "x y"}

    def test_rejects_bad_line(self):
        with pytest.raises(ConfigError):
            parse_config("just words\n")

    def test_config_ints(self):
        cfg = {"budgets": "100, 1000"}
        assert config_ints(cfg, "budgets") == [100, 1000]
        assert config_ints(cfg, "missing", [7]) == [7]
        with pytest.raises(ConfigError):
            config_ints(cfg, "missing")
        with pytest.raises(ConfigError):
            config_ints({"budgets": "a,b"}, "budgets")

    def test_config_floats(self):
        assert config_floats({"f": "0.5,0.9"}, "f") == [0.5, 0.9]

    def test_noise_from_config(self):
        assert noise_from_config({}).is_zero
        assert noise_from_config({"noise": "hardware"}) == HARDWARE_PRESET
        custom = noise_from_config({"noise": "0.1, 0.01, 0.02"})
        assert custom == NoiseModel(0.1, 0.01, 0.02)
        with pytest.raises(ConfigError):
            noise_from_config({"noise": "bogus"})


class TestFileIo:
    def test_pgm_roundtrip(self, tmp_path):
        img = build_teaser_image(16, 16)
        path = tmp_path / "out.pgm"
        write_pgm(path, img)
        back = read_pgm(path)
        assert back.shape == img.shape
        assert np.max(np.abs(back - img)) <= 0.5 / 255 + 1e-9

    def test_pgm_rejects_other_formats(self, tmp_path):
        path = tmp_path / "bad.pgm"
        path.write_bytes(b"P2\n1 1\n255\n0\n")
        with pytest.raises(ValueError):
            read_pgm(path)

    def test_csv_rows(self, tmp_path):
        path = tmp_path / "rows.csv"
        write_csv(path, [{"a": 1, "b": 2}, {"a": 3, "b": 4}])
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "a,b"
        assert lines[1:] == ["1,2", "3,4"]
