import json
import subprocess
import sys

import pytest

from vcwb import cli
from vcwb.jones_exact import read_table
from vcwb.vc_analysis import load_cache


def _err(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


@pytest.fixture
def clean_env(monkeypatch):
    for name in ("VCWB_DIGITS", "VCWB_CACHE", "VCWB_THREADS"):
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


class TestJones:
    @pytest.mark.parametrize("n_max", [1, 7])
    def test_lines_and_golden(self, tmp_path, golden_jones, n_max, capsys):
        out = tmp_path / "j.jsonl"
        assert cli.main(["jones", "--n-max", str(n_max), "--out", str(out)]) == 0
        table = read_table(out)
        assert sorted(table) == list(range(1, n_max + 1))
        for n, poly in table.items():
            assert poly == golden_jones[n]
        assert capsys.readouterr().err.count("s\n") == n_max

    def test_nineteen_lines(self, tmp_path):
        out = tmp_path / "j.jsonl"
        assert cli.main(["jones", "--n-max", "19", "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 19

    def test_bad_n_max(self, tmp_path, capsys):
        assert cli.main(["jones", "--n-max", "0", "--out", str(tmp_path / "x")]) == 2
        assert _err(capsys)["exit_code"] == 2

    def test_unwritable(self, tmp_path, capsys):
        assert cli.main(["jones", "--n-max", "1", "--out", str(tmp_path / "no" / "x")]) == 4


class TestVcScan:
    def test_rows(self, tmp_path, clean_env):
        out, cache = tmp_path / "vc.csv", tmp_path / "c.jsonl"
        args = ["vc-scan", "--start", "2", "--end", "50", "--digits", "40", "--cache", str(cache), "--out", str(out)]
        assert cli.main(args) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "n,vc_re,vc_im" and len(lines) == 50
        assert len(load_cache(str(cache))) == 49

    def test_json_report(self, tmp_path, clean_env):
        out = tmp_path / "vc.json"
        args = ["vc-scan", "--start", "3", "--end", "6", "--digits", "40", "--cache", str(tmp_path / "c"), "--format", "json"]
        assert cli.main(args + ["--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["schema_version"] == cli.SCHEMA_VERSION
        assert [s["n"] for s in rep["samples"]] == [3, 4, 5, 6]

    @pytest.mark.parametrize(
        "extra",
        [["--digits", "20"], ["--start", "1"], ["--start", "9", "--end", "5"], ["--threads", "0"], ["--format", "xml"]],
    )
    def test_validation(self, tmp_path, clean_env, capsys, extra):
        args = ["vc-scan", "--cache", str(tmp_path / "c")] + extra
        assert cli.main(args) == 2
        assert _err(capsys)["error"] == "UsageError"

    def test_corrupt_cache_is_io_error(self, tmp_path, clean_env, capsys):
        cache = tmp_path / "c"
        cache.write_text("{not json\n")
        assert cli.main(["vc-scan", "--start", "2", "--end", "3", "--cache", str(cache)]) == 4
        assert _err(capsys)["error"] == "CacheCorruptionError"

    def test_stretch_range_is_accepted(self, clean_env):
        args = cli.build_parser().parse_args(["vc-scan", "--start", "502", "--end", "550", "--digits", "200"])
        cfg = cli.resolve_config(args)
        assert (cfg.start, cfg.end, cfg.digits_for(550)) == (502, 550, 200)

    def test_default_policy(self, clean_env):
        cfg = cli.resolve_config(cli.build_parser().parse_args(["vc-scan", "--end", "550"]))
        assert cfg.digits_for(250) == 80 and cfg.digits_for(550) == 200


class TestPrecedence:
    def test_env_over_default(self, clean_env):
        clean_env.setenv("VCWB_DIGITS", "50")
        clean_env.setenv("VCWB_THREADS", "3")
        clean_env.setenv("VCWB_CACHE", "/tmp/env_cache.jsonl")
        cfg = cli.resolve_config(cli.build_parser().parse_args(["vc-scan"]))
        assert (cfg.digits, cfg.threads, cfg.cache) == (50, 3, "/tmp/env_cache.jsonl")

    def test_flag_over_env(self, clean_env):
        clean_env.setenv("VCWB_DIGITS", "50")
        clean_env.setenv("VCWB_CACHE", "/tmp/env_cache.jsonl")
        args = cli.build_parser().parse_args(["vc-scan", "--digits", "64", "--cache", "flag.jsonl", "--threads", "2"])
        cfg = cli.resolve_config(args)
        assert (cfg.digits, cfg.threads, cfg.cache) == (64, 2, "flag.jsonl")

    def test_defaults(self, clean_env):
        cfg = cli.resolve_config(cli.build_parser().parse_args(["fit"]))
        assert (cfg.digits, cfg.threads, cfg.cache, cfg.window) == (None, 1, cli.DEFAULT_CACHE, (21, 250))

    def test_bad_env(self, clean_env, capsys):
        clean_env.setenv("VCWB_THREADS", "many")
        assert cli.main(["vc-scan", "--end", "3"]) == 2


class TestFit:
    def _cache(self, tmp_path, hi):
        cache = tmp_path / "c.jsonl"
        assert cli.main(["vc-scan", "--start", "2", "--end", str(hi), "--digits", "40", "--cache", str(cache), "--out", str(tmp_path / "o")]) == 0
        return str(cache)

    def test_report(self, tmp_path, clean_env):
        cache = self._cache(tmp_path, 40)
        out = tmp_path / "fit.json"
        args = ["fit", "--window", "10", "40", "--mono-start", "12", "--digits", "40", "--cache", cache, "--out", str(out)]
        assert cli.main(args) == 0
        rep = json.loads(out.read_text())
        assert rep["schema_version"] == cli.SCHEMA_VERSION
        assert set(rep) >= {"fit", "volume_consistency", "monotonicity", "periodicity"}
        assert rep["fit"]["window"] == [10, 40]

    def test_too_few_samples(self, tmp_path, clean_env, capsys):
        cache = self._cache(tmp_path, 6)
        assert cli.main(["fit", "--window", "4", "6", "--digits", "40", "--cache", cache]) == 3
        assert _err(capsys)["error"] == "FitError"

    def test_missing_samples(self, tmp_path, clean_env, capsys):
        cache = self._cache(tmp_path, 6)
        assert cli.main(["fit", "--window", "2", "12", "--digits", "40", "--cache", cache]) == 2
        assert "7-12" in _err(capsys)["message"]

    def test_missing_cache_file(self, tmp_path, clean_env):
        assert cli.main(["fit", "--cache", str(tmp_path / "absent.jsonl")]) == 2


class TestApoly:
    def test_small_grid_rejected(self, tmp_path, capsys):
        assert cli.main(["apoly", "--grid", "32", "--csv", str(tmp_path / "a.csv")]) == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "vcwb", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "vc-scan" in r.stdout
