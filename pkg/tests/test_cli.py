import json
import math

import numpy as np
import pytest

import gamow2d as g
from gamow2d.cli import main
from gamow2d.config import parse_config_text, parse_kernel
from gamow2d.errors import ConfigError


def write(path, text):
    path.write_text(text)
    return path


class TestKernelGrammar:
    def test_power(self):
        k = parse_kernel("power(alpha=-0.5)")
        assert k.family == "power" and k.alpha == -0.5

    def test_gauss(self):
        k = parse_kernel("gauss_power(kappa=1.0, alpha=0.5)")
        assert k.kappa == 1.0 and k.alpha == 0.5

    def test_constant_bare(self):
        assert parse_kernel("constant").family == "constant"

    def test_unknown_parameter_rejected(self):
        with pytest.raises(ConfigError):
            parse_kernel("power(beta=1)")

    def test_garbage_rejected(self):
        with pytest.raises(ConfigError):
            parse_kernel("7power((")


class TestConfigText:
    def test_basic_types(self):
        cfg = parse_config_text(
            'a = 1\nb = 2.5\nc = "hello"\nd = [1, 2, 3]\ne = true\n# comment\n'
        )
        assert cfg == {"a": 1, "b": 2.5, "c": "hello", "d": [1, 2, 3],
                       "e": True}

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("a = 1\na = 2\n")

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("just a line\n")


class TestKernelCheckCommand:
    def test_good_power_kernel_exits_zero(self, tmp_path):
        cfg = write(tmp_path / "k.cfg", 'kernel = power(alpha=-0.5)\n')
        rc = main(["kernel-check", "--config", str(cfg), "--out",
                   str(tmp_path / "out")])
        assert rc == 0
        payload = json.loads((tmp_path / "out" / "kernel_check.json").read_text())
        assert payload["passed"] is True
        assert payload["admissibility"]["passed"] is True

    def test_divergent_kernel_exits_one(self, tmp_path):
        cfg = write(tmp_path / "k.cfg", 'kernel = power(alpha=-3.0)\n'
                    'checks = [admissibility]\n')
        rc = main(["kernel-check", "--config", str(cfg), "--out",
                   str(tmp_path / "out")])
        assert rc == 1

    def test_indicator_pd_witness_exits_one(self, tmp_path):
        cfg = write(
            tmp_path / "k.cfg",
            'kernel = indicator(radius=1.0)\n'
            'checks = [pd_inequality]\npd_source = "strips"\n',
        )
        rc = main(["kernel-check", "--config", str(cfg), "--out",
                   str(tmp_path / "out")])
        assert rc == 1
        payload = json.loads((tmp_path / "out" / "kernel_check.json").read_text())
        assert payload["pd_inequality"]["witnesses"]

    def test_unknown_key_exits_two(self, tmp_path):
        cfg = write(tmp_path / "k.cfg", 'kernel = constant\nbogus = 1\n')
        rc = main(["kernel-check", "--config", str(cfg), "--out",
                   str(tmp_path / "out")])
        assert rc == 2


class TestEnergyCommand:
    def test_unit_disk_constant_kernel(self, tmp_path):
        cfg = write(tmp_path / "e.cfg",
                    'kernel = constant\nepsilon = 1.0\nshape = disk\n')
        out = tmp_path / "out"
        rc = main(["energy", "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        payload = json.loads((out / "energy.json").read_text())
        assert payload["total"] == pytest.approx(2 * math.pi + math.pi**2,
                                                 rel=1e-8)
        assert (out / "shape.svg").exists()

    def test_component_list_populates_breakdown(self, tmp_path):
        cfg = write(
            tmp_path / "e.cfg",
            'kernel = constant\nepsilon = 1.0\n'
            'components = [disk, disk]\n',
        )
        out = tmp_path / "out"
        rc = main(["energy", "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        payload = json.loads((out / "energy.json").read_text())
        assert len(payload["per_component"]) == 2

    def test_malformed_shape_file_exits_two(self, tmp_path):
        cfg = write(tmp_path / "e.cfg",
                    'kernel = constant\nshape = missing_shape.json\n')
        rc = main(["energy", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_shape_file_roundtrip(self, tmp_path):
        shape = g.StarShape(center=(0, 0), r0=1.0, modes=((2, 0.05, 0.0),))
        (tmp_path / "s.json").write_text(json.dumps(shape.to_json_dict()))
        cfg = write(tmp_path / "e.cfg",
                    'kernel = power(alpha=-0.5)\nepsilon = 0.0\n'
                    'shape = s.json\n')
        out = tmp_path / "out"
        rc = main(["energy", "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        payload = json.loads((out / "energy.json").read_text())
        assert payload["total"] == pytest.approx(g.perimeter(shape), rel=1e-9)


class TestLensVerifyCommand:
    def test_default_grid_passes_and_counts_rows(self, tmp_path):
        cfg = write(tmp_path / "l.cfg", "n_theta_bar = 12\nn_delta = 9\n")
        out = tmp_path / "out"
        rc = main(["lens-verify", "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        lines = (out / "lens_grid.csv").read_text().strip().splitlines()
        assert lines[0].startswith("# gamow2d")
        assert len(lines) == 2 + 12 * 9  # stamp + header + rows

    def test_out_of_domain_rows_flagged_not_failed(self, tmp_path):
        cfg = write(tmp_path / "l.cfg",
                    "n_theta_bar = 6\nn_delta = 7\n"
                    "include_out_of_domain = true\n")
        out = tmp_path / "out"
        rc = main(["lens-verify", "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        rows = (out / "lens_grid.csv").read_text().strip().splitlines()[2:]
        flags = [int(r.split(",")[-1]) for r in rows]
        assert 0 in flags and 1 in flags


class TestCutPasteCommand:
    def test_dumbbell_via_files(self, tmp_path):
        from tests.test_energy import dumbbell_raster

        r = dumbbell_raster()
        (tmp_path / "dumbbell.pgm").write_text(r.to_pgm_text())
        cfg = write(
            tmp_path / "c.cfg",
            'kernel = power(alpha=-0.5)\nepsilon = 0.001\n'
            'raster = dumbbell.pgm\na = 1.1\nb = 4.9\nm_bar = 0.5\n',
        )
        out = tmp_path / "out"
        rc = main(["cut-paste", "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        payload = json.loads((out / "cut_result.json").read_text())
        assert payload["found"] is True
        assert payload["satisfies_guarantee"] is True
        assert (out / "reduced.pgm").exists()


class TestDeterminism:
    def test_identical_config_and_seed_byte_identical(self, tmp_path):
        cfg = write(tmp_path / "m.cfg",
                    'kernel = power(alpha=-0.5)\nepsilon = 0.001\n'
                    'n_modes = 3\nmax_iters = 6\nperturb = 0.05\n'
                    'n_theta = 32\nn_radial = 4\n')
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert main(["minimize", "--config", str(cfg), "--out", str(out1),
                     "--seed", "5"]) == 0
        assert main(["minimize", "--config", str(cfg), "--out", str(out2),
                     "--seed", "5"]) == 0
        a = (out1 / "minimize_trace.json").read_bytes()
        b = (out2 / "minimize_trace.json").read_bytes()
        assert a == b

    def test_outputs_stamped_with_config_hash(self, tmp_path):
        cfg = write(tmp_path / "e.cfg", "kernel = constant\nshape = disk\n")
        out = tmp_path / "out"
        main(["energy", "--config", str(cfg), "--out", str(out)])
        payload = json.loads((out / "energy.json").read_text())
        assert "config_sha256" in payload and "toolkit_version" in payload


class TestSweepCommand:
    def test_tiny_sweep_writes_csv_and_svg(self, tmp_path):
        cfg = write(
            tmp_path / "s.cfg",
            'kernel = power(alpha=-0.5)\nepsilons = [0.4, 0.7]\n'
            'n_modes = 3\nmax_iters = 6\nn_theta = 32\nn_radial = 4\n'
            'tol_step = 0.002\n',
        )
        out = tmp_path / "out"
        rc = main(["sweep", "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        assert (out / "sweep.csv").exists()
        assert (out / "sweep.svg").exists()
        payload = json.loads((out / "sweep.json").read_text())
        assert len(payload["rows"]) == 2


class TestReportCommand:
    def test_collects_outputs(self, tmp_path):
        cfg = write(tmp_path / "e.cfg", "kernel = constant\nshape = disk\n")
        out = tmp_path / "out"
        main(["energy", "--config", str(cfg), "--out", str(out)])
        rc = main(["report", "--out", str(out)])
        assert rc == 0
        report = (out / "report.md").read_text()
        assert "energy.json" in report
        assert "shape.svg" in report


class TestTolOverride:
    def test_override_applies(self, tmp_path):
        cfg = write(tmp_path / "l.cfg", "n_theta_bar = 4\nn_delta = 5\n")
        rc = main(["lens-verify", "--config", str(cfg), "--out",
                   str(tmp_path / "out"), "--tol-override", "slack_tol=1e-6"])
        assert rc == 0

    def test_unknown_override_rejected(self, tmp_path):
        cfg = write(tmp_path / "l.cfg", "n_theta_bar = 4\nn_delta = 5\n")
        rc = main(["lens-verify", "--config", str(cfg), "--out",
                   str(tmp_path / "out"), "--tol-override", "nope=3"])
        assert rc == 2
