import json
import math

import numpy as np
import pytest

from vcwb.errors import CacheCorruptionError, DomainError, FitError
from vcwb.vc_analysis import (
    VCSample,
    evaluate_sample,
    export_string,
    fit_asymptotics,
    load_cache,
    monotonicity_report,
    moving_average,
    periodicity_report,
    scan,
    vc,
    volume_consistency,
    FitResult,
)


def synthetic(values, im=None):
    im = im if im is not None else [0.0] * len(values)
    return [VCSample(n, 80, "0", "0", float(v), float(w), 0.0) for n, v, w in zip(range(2, 2 + len(values)), values, im)]


def model_samples(c, n_min=21, n_max=250):
    out = []
    for n in range(n_min, n_max + 1):
        out.append(VCSample(n, 80, "0", "0", c[0] + c[1] / n + c[2] * math.log(n) / n, 0.0, 0.0))
    return out


class TestVC:
    def test_vc2(self):
        z = vc(2, 80)
        assert z.real == pytest.approx(math.pi * math.log(5), abs=1e-14)
        assert z.imag == 0

    def test_principal_branch(self):
        for n in range(2, 30):
            z = vc(n, 60)
            assert -2 * math.pi ** 2 / n <= z.imag <= 2 * math.pi ** 2 / n

    def test_sample_fields(self):
        s = evaluate_sample(6, 50)
        assert s.n == 6 and s.digits == 50 and s.wall_time >= 0
        assert complex(s.jones_value()) != 0
        assert s.vc_re == pytest.approx(2 * math.pi / 6 * math.log(abs(complex(s.jones_value()))))

    def test_domain(self):
        with pytest.raises(DomainError):
            vc(1)


class TestScanAndCache:
    def test_single_sample_scan(self):
        (s,) = scan(2, 2, 1, None, None)
        assert s.vc == vc(2)

    def test_step_and_order(self, tmp_path):
        out = scan(3, 11, 4, 40, str(tmp_path / "c.jsonl"))
        assert [s.n for s in out] == [3, 7, 11]

    def test_cache_line_format(self, tmp_path):
        path = tmp_path / "c.jsonl"
        scan(4, 5, 1, 40, str(path))
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        obj = json.loads(lines[0])
        assert list(obj) == ["n", "digits", "j_re", "j_im", "vc_re", "vc_im", "wall_time"]
        assert isinstance(obj["j_re"], str) and isinstance(obj["vc_re"], float)

    def test_keys_include_digits(self, tmp_path):
        path = str(tmp_path / "c.jsonl")
        scan(5, 5, 1, 40, path)
        scan(5, 5, 1, 60, path)
        assert set(load_cache(path)) == {(5, 40), (5, 60)}

    def test_corruption_names_line_and_refuses_to_write(self, tmp_path):
        path = tmp_path / "c.jsonl"
        scan(2, 4, 1, 40, str(path))
        text = path.read_text().splitlines()
        text.insert(1, '{"n": 9, "digits": 40')
        path.write_text("\n".join(text) + "\n")
        before = path.read_bytes()
        with pytest.raises(CacheCorruptionError) as info:
            scan(2, 8, 1, 40, str(path))
        assert info.value.lineno == 2
        assert ":2:" in str(info.value)
        assert path.read_bytes() == before

    def test_missing_fields_are_corruption(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"n": 3, "digits": 40}\n')
        with pytest.raises(CacheCorruptionError) as info:
            load_cache(str(path))
        assert info.value.lineno == 1

    def test_parallel_matches_serial(self, tmp_path):
        a = scan(2, 9, 1, 40, str(tmp_path / "a.jsonl"), threads=2)
        b = scan(2, 9, 1, 40, str(tmp_path / "b.jsonl"))
        assert [(s.j_re, s.j_im) for s in a] == [(s.j_re, s.j_im) for s in b]

    def test_bad_range(self):
        with pytest.raises(DomainError):
            scan(5, 4)
        with pytest.raises(DomainError):
            scan(1, 4)

    def test_digits_and_digits_plus_40_agree(self):
        for n in (10, 40, 90):
            a, b = vc(n, 80), vc(n, 120)
            assert abs(a.real - b.real) <= 1e-12 * abs(b.real)
            assert abs(a.imag - b.imag) <= 1e-12 * max(1.0, abs(b.imag))


class TestFit:
    def test_exact_model_recovery(self):
        c = (3.47, -5.5, 9.28)
        fit = fit_asymptotics(model_samples(c))
        assert np.allclose(fit.coefficients, c, atol=1e-10, rtol=0)
        assert fit.residual_max < 1e-12
        assert fit.window == (21, 250)

    def test_affine_equivariance(self):
        base = model_samples((1.0, 2.0, -3.0))
        noisy = [VCSample(s.n, 80, "0", "0", s.vc_re + 1e-3 * math.sin(s.n), 0.0, 0.0) for s in base]
        f1 = fit_asymptotics(noisy)
        scaled = [VCSample(s.n, 80, "0", "0", 2.5 * s.vc_re, 0.0, 0.0) for s in noisy]
        f2 = fit_asymptotics(scaled)
        assert np.allclose(np.array(f2.coefficients), 2.5 * np.array(f1.coefficients), rtol=1e-12)

    def test_window_selection(self):
        samples = model_samples((1.0, 0.0, 0.0), 2, 300)
        fit = fit_asymptotics(samples, 50, 60)
        assert fit.window == (50, 60)

    def test_too_few_samples(self):
        with pytest.raises(FitError):
            fit_asymptotics(model_samples((1, 1, 1), 21, 23))

    def test_rank_deficient(self):
        s = [VCSample(30, 80, "0", "0", 1.0, 0.0, 0.0)] * 5
        with pytest.raises(FitError):
            fit_asymptotics(s)

    def test_predict(self):
        f = FitResult(1.0, 2.0, 3.0, 0.0, (21, 250))
        assert f.predict(10) == pytest.approx(1 + 0.2 + 3 * math.log(10) / 10)


class TestVolumeConsistency:
    def test_reference_fit(self):
        fit = FitResult(3.4750687755045777, -5.518475184459029, 9.282495203373793, 0.0, (21, 250))
        rep = volume_consistency(fit)
        assert rep["const_deviation"] == pytest.approx(8.2e-4, abs=1e-5)
        assert rep["logn_deviation"] == pytest.approx(-0.0226, abs=1e-4)
        assert rep["pass"]

    def test_perfect_inputs(self):
        rep = volume_consistency(FitResult(3.474247, 0.0, 3 * math.pi, 0.0, (21, 250)))
        assert abs(rep["const_deviation"]) < 1e-15 and abs(rep["logn_deviation"]) < 1e-15

    def test_json_round_trip(self):
        rep = volume_consistency(FitResult(3.5, 0.0, 9.0, 0.0, (21, 250)))
        assert json.loads(json.dumps(rep)) == rep
        assert not rep["const_pass"]


class TestMonotonicity:
    def test_strictly_decreasing(self):
        rep = monotonicity_report(synthetic(np.linspace(5, 3, 40)))
        assert rep["raw"]["n0"] == 2 and rep["raw"]["violations"] == 0
        assert rep["strictly_decreasing"]

    def test_bump_is_located(self):
        vals = list(np.linspace(5, 3, 40))
        vals[17] += 1.0  # n = 19
        rep = monotonicity_report(synthetic(vals))
        assert rep["raw"]["violation_locations"] == [19]
        assert rep["raw"]["n0"] == 19
        assert rep["moving_average"]["violations"] >= 1

    def test_minimum_reported(self):
        vals = [10 - n if n < 20 else n - 20 + 0.5 for n in range(2, 42)]
        rep = monotonicity_report(synthetic(vals))
        assert rep["raw"]["minimum_n"] == 19

    def test_window(self):
        rep = monotonicity_report(synthetic(np.linspace(5, 3, 40)), 10, 20)
        assert rep["window"] == [10, 20]

    def test_needs_two(self):
        with pytest.raises(DomainError):
            monotonicity_report(synthetic([1.0]))


class TestPeriodicity:
    def test_pure_sine(self):
        n = np.arange(2, 242)
        rep = periodicity_report(synthetic(np.zeros(len(n)), np.sin(2 * np.pi * n / 12)))
        assert rep["dominant_period"] == pytest.approx(12, rel=0.05)

    def test_trend_removed(self):
        n = np.arange(2, 242)
        im = 0.3 * np.cos(2 * np.pi * n / 12) + 5.0 / n
        rep = periodicity_report(synthetic(np.zeros(len(n)), im))
        assert rep["dominant_period"] == pytest.approx(12, rel=0.05)

    def test_constant(self):
        rep = periodicity_report(synthetic(np.zeros(60), np.full(60, 0.7)))
        assert rep["dominant_period"] is None

    def test_needs_24(self):
        with pytest.raises(DomainError):
            periodicity_report(synthetic(np.zeros(10)))

    def test_moving_average(self):
        assert np.allclose(moving_average(np.arange(13.0)), [5.5, 6.5])


class TestExport:
    def test_csv(self):
        text = export_string(synthetic([1.5, 0.25]), "csv")
        assert text.splitlines() == ["n,vc_re,vc_im", "2,1.5,0.0", "3,0.25,0.0"]

    def test_gnuplot(self):
        text = export_string(synthetic([1.5]), "gnuplot")
        assert text.splitlines()[1] == "2 1.5 0.0"
        assert text.startswith("#")

    def test_unknown(self):
        with pytest.raises(DomainError):
            export_string(synthetic([1.0]), "xml")
