import json

import numpy as np
import pytest

from dgbo.cli import (
    EXIT_CONFIG,
    EXIT_FAILED,
    EXIT_OK,
    export_run,
    main,
    run_from_dict,
    run_to_dict,
)
from dgbo.config import FullConfig, parse_config, serialize_config
from dgbo.errors import ConfigurationError
from dgbo.solver import RunRecord, SolverConfig, solve
from dgbo.dispersion import fractional_bo
from dgbo.spectral import TorusGrid, to_spectral


def small_record():
    grid = TorusGrid(64)
    u0 = to_spectral(grid, 0.5 * np.cos(grid.nodes()))
    cfg = SolverConfig(fractional_bo(0.5), grid, dt=2e-3, horizon=0.05,
                       record_every=5, sobolev_s=(1.1, -0.5))
    return solve(u0, cfg)


class TestConfig:
    def test_empty_document_defaults(self):
        cfg = parse_config(b"")
        assert cfg.solver.alpha == 0.5
        assert cfg.solver.n == 256
        assert cfg.solver.t == 0.5
        assert cfg.scenario.s == 1.1

    def test_alpha_range_message(self):
        with pytest.raises(ConfigurationError, match=r"alpha must lie in \(0,1\)"):
            parse_config("solver.alpha = 1.5")

    def test_roundtrip_identity(self):
        text = (
            "seed = 11\nsolver.alpha = 0.75\nsolver.n = 128\n"
            "scenario.kind = galilean\nscenario.c_values = 0.0, 0.25\n"
            "verifier.case = m2\ndispersion.name = whitham\ndispersion.kappa = 10\n"
        )
        cfg = parse_config(text)
        assert parse_config(serialize_config(cfg)) == cfg

    def test_syntax_error_position(self):
        with pytest.raises(ConfigurationError, match="line 2, column"):
            parse_config("solver.alpha = 0.5\n   solver.n 256\n")

    def test_unknown_key(self):
        with pytest.raises(ConfigurationError, match="unknown key"):
            parse_config("solver.gamma = 3")

    def test_semantic_violation_names_invariant(self):
        text = "solver.alpha = 0.25\nscenario.kind = apriori\nscenario.s = 1.2\n"
        with pytest.raises(ConfigurationError, match="3/2 - alpha"):
            parse_config(text)

    def test_comments_and_blank_lines(self):
        cfg = parse_config("# a comment\n\nseed = 3  # trailing\n")
        assert cfg.seed == 3


class TestExport:
    def test_json_roundtrip_bit_exact(self):
        rec = small_record()
        blob = export_run(rec, "json", seed=5)
        data = json.loads(blob.decode())
        back = run_from_dict(data)
        assert np.array_equal(back.times, rec.times)
        assert np.array_equal(back.mass, rec.mass)
        assert np.array_equal(back.hamiltonian, rec.hamiltonian)
        for s in rec.sobolev:
            assert np.array_equal(back.sobolev[s], rec.sobolev[s])
        assert data["artifact_version"]
        assert data["bump_profile"] == "exp-ratio-bump"
        assert data["seed"] == 5
        assert data["config"]["n_points"] == 64

    def test_csv_row_count_and_header(self):
        rec = small_record()
        text = export_run(rec, "csv").decode()
        lines = text.strip().splitlines()
        rows = [l for l in lines if not l.startswith("#")]
        assert rows[0].startswith("t,mean,mass,hamiltonian,hs_norm[s=-0.5],hs_norm[s=1.1]")
        assert len(rows) - 1 == rec.times.shape[0]
        # embeds config echo
        assert any("n_points" in l for l in lines if l.startswith("#"))

    def test_empty_record_header_only(self):
        empty = RunRecord(times=np.array([]), mean=np.array([]),
                          mass=np.array([]), hamiltonian=np.array([]),
                          sobolev={}, config={})
        text = export_run(empty, "csv").decode()
        rows = [l for l in text.strip().splitlines() if not l.startswith("#")]
        assert rows == ["t,mean,mass,hamiltonian"]

    def test_bad_format(self):
        with pytest.raises(ConfigurationError):
            export_run(small_record(), "xml")


class TestCli:
    def test_solve_and_export(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "solver.n = 64\nsolver.dt = 0.002\nsolver.t = 0.05\n"
            "solver.datum = cos\nsolver.record_every = 5\n"
        )
        out = tmp_path / "run.json"
        assert main(["solve", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        data = json.loads(out.read_text())
        assert data["schema"] == "dgbo-run"
        assert data["config"]["config_echo"]["solver.n"] == 64

        csv_out = tmp_path / "run.csv"
        code = main(["export", "--format", "csv", "--in", str(out),
                     "--out", str(csv_out)])
        assert code == EXIT_OK
        rows = [l for l in csv_out.read_text().splitlines()
                if l and not l.startswith("#")]
        assert len(rows) - 1 == len(data["times"])

    def test_config_error_exit_code(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("solver.alpha = 1.5\n")
        assert main(["solve", "--config", str(cfg)]) == EXIT_CONFIG

    def test_check_dispersion(self, tmp_path):
        out = tmp_path / "disp.json"
        code = main(["check-dispersion", "--spec", "whitham", "--tau", "1.0",
                     "--kappa", "10", "--xi-max", "64", "--out", str(out)])
        assert code == EXIT_OK
        report = json.loads(out.read_text())["report"]
        assert report["passed"] is True

    def test_check_dispersion_bad_spec(self):
        assert main(["check-dispersion", "--spec", "bogus"]) == EXIT_CONFIG

    def test_verify_estimates(self, tmp_path):
        out = tmp_path / "sigma.json"
        code = main(["verify-estimates", "--case", "sigma1", "--kmax", "7",
                     "--out", str(out)])
        assert code == EXIT_OK
        report = json.loads(out.read_text())["report"]
        assert report["case_kind"] == "sigma-split"

    def test_verify_unknown_case(self):
        assert main(["verify-estimates", "--case", "nope"]) == EXIT_CONFIG

    def test_probe(self, tmp_path):
        cfg = tmp_path / "probe.cfg"
        cfg.write_text(
            "solver.alpha = 0.75\nsolver.n = 128\nsolver.t = 0.2\n"
            "scenario.s = 0.85\nscenario.n_data = 2\n"
        )
        out = tmp_path / "probe.json"
        code = main(["probe", "--kind", "apriori", "--config", str(cfg),
                     "--out", str(out)])
        assert code == EXIT_OK
        report = json.loads(out.read_text())["report"]
        assert report["passed"] is True

    def test_unknown_flag_rejected(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["solve", "--bogus", "x"])
        assert info.value.code == 2

    def test_export_rejects_non_run(self, tmp_path):
        p = tmp_path / "x.json"
        p.write_text('{"schema": "other"}')
        assert main(["export", "--format", "csv", "--in", str(p)]) == EXIT_CONFIG
