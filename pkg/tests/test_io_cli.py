"""Serialization round trips, configuration layering, and the CLI.

The writers promise canonical bytes: fixed row order, repr floats, LF
endings. Every reader is held to an exact round trip against the object
it came from, and the command driver is exercised end to end through
click's test runner, including the exit code contract (0 clean, 1 for a
failed run invariant with the report still written, 2 for usage).
"""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from permurec import io as pio
from permurec.cli import main
from permurec.config import DEFAULTS, RunConfig, build_config, parse_config_file
from permurec.curves import build_curve, mass_parametrize
from permurec.ensembles import enumerate_baxter
from permurec.graphs import CellGraph, side_sharing_graph
from permurec.intersections import IntersectionSet, TimeSet, tm_oracle_from_curve
from permurec.measures import build_measure
from permurec.permutons import SupportSet, permuton_from_pair
from permurec.walks import sample_walk_pair


class TestRoundTrips:
    def test_measure(self, tmp_path):
        m = build_measure("cascade", 2, seed=5)
        path = tmp_path / "m.csv"
        pio.write_measure(m, path)
        back = pio.read_measure(path)
        assert back.depth == 2 and back.kind == "cascade" and back.gamma is None
        assert np.array_equal(back.mass, m.mass)

    def test_measure_with_gamma(self, tmp_path):
        m = build_measure("exp-field", 2, seed=1, gamma=0.8)
        path = tmp_path / "m.csv"
        pio.write_measure(m, path)
        back = pio.read_measure(path)
        assert back.gamma == 0.8
        assert np.array_equal(back.mass, m.mass)

    def test_field(self, tmp_path):
        field = np.random.default_rng(0).normal(size=(4, 4))
        path = tmp_path / "f.csv"
        pio.write_field(field, path)
        assert np.array_equal(pio.read_field(path), field)

    def test_plain_curve(self, tmp_path):
        c = build_curve("hilbert", 2)
        path = tmp_path / "c.csv"
        pio.write_curve(c, path)
        back, times = pio.read_curve(path)
        assert back.cells == c.cells and back.kind == "loaded"
        assert times is None

    def test_timed_curve(self, tmp_path):
        m = build_measure("cascade", 2, seed=3)
        tc = mass_parametrize(build_curve("hilbert", 2), m)
        path = tmp_path / "c.csv"
        pio.write_curve(tc, path)
        back, times = pio.read_curve(path)
        assert back.cells == tc.curve.cells
        assert np.array_equal(times, tc.breaks)

    def test_walks(self, tmp_path):
        pair = sample_walk_pair(50, 0.4, seed=7)
        path = tmp_path / "w.csv"
        pio.write_walks(pair, path)
        back = pio.read_walks(path)
        assert np.array_equal(back.L, pair.L) and np.array_equal(back.R, pair.R)

    def test_graph(self, tmp_path):
        g = side_sharing_graph(build_curve("hilbert", 2))
        path = tmp_path / "g.json"
        pio.write_graph(g, path)
        assert pio.read_graph(path) == g
        payload = json.loads(path.read_text())
        assert all(a < b for a, b in payload["edges"])
        assert payload["edges"] == sorted(payload["edges"])

    def test_permuton_and_support(self, tmp_path):
        m = build_measure("cascade", 2, seed=2)
        tc1 = mass_parametrize(build_curve("hilbert", 2), m)
        tc2 = mass_parametrize(build_curve("moore", 2), m)
        p = permuton_from_pair(tc1, tc2, 8)
        pp = tmp_path / "p.csv"
        pio.write_permuton(p, pp)
        back = pio.read_permuton(pp)
        assert back.resolution == 8
        assert np.array_equal(back.mass, p.mass)
        sup = SupportSet(resolution=3, cells=frozenset({(0, 1), (1, 0), (2, 2)}))
        sp = tmp_path / "s.csv"
        pio.write_support(sup, sp)
        assert pio.read_support(sp) == sup

    def test_intersections(self, tmp_path):
        tm = tm_oracle_from_curve(build_curve("hilbert", 2))
        path = tmp_path / "tm.csv"
        pio.write_intersections(tm, path)
        back = pio.read_intersections(path)
        assert back.n == tm.n and back.pairs == tm.pairs

    def test_timeset(self, tmp_path):
        ts = TimeSet(n=9, ranks=(1, 5, 9))
        path = tmp_path / "t.csv"
        pio.write_timeset(ts, path)
        assert pio.read_timeset(path, n=9).ranks == (1, 5, 9)
        assert pio.read_timeset(path).n == 9

    def test_rank_sequence_keeps_traversal_order(self, tmp_path):
        path = tmp_path / "walk.csv"
        pio.write_rank_sequence((1, 2, 5, 4, 3, 1), path)
        assert path.read_text().splitlines() == ["rank", "1", "2", "5", "4", "3", "1"]

    def test_embedding(self, tmp_path):
        z = np.array([1 + 0j, 0.25 - 0.125j, -1 + 0j])
        path = tmp_path / "e.csv"
        pio.write_embedding(z, path)
        assert np.array_equal(pio.read_embedding(path), z)

    def test_ensemble(self, tmp_path):
        ens = enumerate_baxter(3)
        path = tmp_path / "ens.txt"
        pio.write_ensemble(ens, path)
        back = pio.read_ensemble(path, kind="baxter")
        assert back.members == ens.members

    def test_lf_endings_and_final_newline(self, tmp_path):
        m = build_measure("lebesgue", 1)
        path = tmp_path / "m.csv"
        pio.write_measure(m, path)
        raw = path.read_bytes()
        assert b"\r" not in raw
        assert raw.endswith(b"\n") and not raw.endswith(b"\n\n")

    def test_readers_reject_foreign_files(self, tmp_path):
        path = tmp_path / "junk.csv"
        path.write_text("alpha,beta\n1,2\n")
        for reader in (pio.read_measure, pio.read_field, pio.read_curve,
                       pio.read_walks, pio.read_intersections,
                       pio.read_timeset, pio.read_embedding,
                       pio.read_permuton, pio.read_support):
            with pytest.raises(ValueError):
                reader(path)
        empty = tmp_path / "empty.txt"
        empty.write_text("\n")
        with pytest.raises(ValueError):
            pio.read_ensemble(empty)

    def test_curve_reader_wants_full_grids(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text("rank,cell_i,cell_j\n1,0,0\n2,0,1\n3,1,1\n")
        with pytest.raises(ValueError, match="dyadic"):
            pio.read_curve(path)


class TestConfig:
    def test_defaults_build(self):
        config = build_config()
        assert config.pipeline == "recover"
        assert config.depth == DEFAULTS["depth"]
        assert config.gamma is None

    def test_layer_precedence(self):
        config = build_config({"depth": 4, "sigma": 0.25}, {"depth": 5})
        assert config.depth == 5
        assert config.sigma == 0.25

    def test_none_override_means_unset(self):
        config = build_config({"depth": 4}, {"depth": None})
        assert config.depth == 4

    def test_parse_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(
            "# comment line\n"
            "depth = 2\n"
            "measure=cascade   # trailing comment\n"
            "\n"
            "gamma = none\n"
            "tol=1e-6\n"
        )
        values = parse_config_file(path)
        assert values == {"depth": 2, "measure": "cascade",
                          "gamma": None, "tol": 1e-6}

    def test_parse_rejects_unknown_and_malformed(self, tmp_path):
        bad_key = tmp_path / "a.cfg"
        bad_key.write_text("depht = 2\n")
        with pytest.raises(ValueError, match="unknown key"):
            parse_config_file(bad_key)
        bad_line = tmp_path / "b.cfg"
        bad_line.write_text("just words\n")
        with pytest.raises(ValueError, match="key=value"):
            parse_config_file(bad_line)

    def test_build_rejects_unknown_key(self):
        with pytest.raises(ValueError, match="unknown config key"):
            build_config(None, {"depht": 3})

    def test_validation(self):
        with pytest.raises(ValueError):
            build_config(None, {"pipeline": "launch"})
        with pytest.raises(ValueError):
            build_config(None, {"depth": 0})
        with pytest.raises(ValueError):
            build_config(None, {"measure": "uniformish"})
        with pytest.raises(ValueError):
            build_config(None, {"symmetry2": "rot45"})
        with pytest.raises(ValueError):
            build_config(None, {"tol": 0.0})
        with pytest.raises(ValueError):
            build_config(None, {"threads": 0})
        with pytest.raises(ValueError):
            build_config(None, {"sigma": -0.5})

    def test_out_dir(self):
        config = build_config(None, {"out": "elsewhere"})
        assert str(config.out_dir()) == "elsewhere"


def _artifact_bytes(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


class TestCli:
    def test_ensemble_run(self, tmp_path):
        out = tmp_path / "ens"
        result = CliRunner().invoke(main, [
            "ensembles", "--ensemble-kind", "baxter", "--ensemble-n", "3",
            "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert "pass" in result.output and "report:" in result.output
        lines = (out / "ensemble.txt").read_text().splitlines()
        assert len(lines) == 6
        report = json.loads((out / "report.json").read_text())
        assert all(c["passed"] for c in report["checks"])

    def test_measure_stage(self, tmp_path):
        out = tmp_path / "m"
        result = CliRunner().invoke(main, [
            "measure", "--measure", "cascade", "--depth", "2",
            "--seed", "4", "--out", str(out)])
        assert result.exit_code == 0, result.output
        for name in ("measure.csv", "measure.png", "report.json"):
            assert (out / name).exists()

    def test_walks_stage(self, tmp_path):
        out = tmp_path / "w"
        result = CliRunner().invoke(main, [
            "walks", "--n", "60", "--rho", "0.3", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert (out / "walks.csv").exists() and (out / "graph.json").exists()

    def test_config_file_feeds_the_run(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("measure = cascade\ndepth = 2\nseed = 9\n")
        out = tmp_path / "cfg-run"
        result = CliRunner().invoke(main, [
            "measure", "--config", str(cfg), "--out", str(out)])
        assert result.exit_code == 0, result.output
        header, values = (out / "measure.csv").read_text().splitlines()[:2]
        assert header == "depth,kind,gamma"
        assert values.startswith("2,cascade,")

    def test_recover_rerun_is_byte_identical(self, tmp_path):
        args = ["recover", "--depth", "2", "--measure", "cascade", "--seed", "3"]
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        ra = CliRunner().invoke(main, args + ["--out", str(out_a)])
        rb = CliRunner().invoke(main, args + ["--out", str(out_b)])
        assert ra.exit_code == 0, ra.output
        assert rb.exit_code == 0, rb.output
        bytes_a = _artifact_bytes(out_a)
        bytes_b = _artifact_bytes(out_b)
        assert set(bytes_a) == set(bytes_b)
        for name in bytes_a:
            assert bytes_a[name] == bytes_b[name], f"{name} differs between runs"

    def test_invariant_failure_exits_one_with_report(self, tmp_path):
        out = tmp_path / "fail"
        result = CliRunner().invoke(main, [
            "embed", "--depth", "2", "--tol", "1e-30", "--out", str(out)])
        assert result.exit_code == 1
        assert "FAIL" in result.output
        report = json.loads((out / "report.json").read_text())
        assert any(not c["passed"] for c in report["checks"])

    def test_usage_error_exits_two(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("depht = 3\n")
        result = CliRunner().invoke(main, ["measure", "--config", str(cfg)])
        assert result.exit_code == 2
        assert "usage error" in result.output

    def test_unknown_flag_value_exits_two(self):
        result = CliRunner().invoke(main, ["measure", "--measure", "salted"])
        assert result.exit_code == 2
