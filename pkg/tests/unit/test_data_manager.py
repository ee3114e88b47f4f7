"""
Unit tests for the Data Manager

Tests input parsing with line/column diagnostics, provenance digests, and
atomic CSV/JSON artifact writes.
"""

import json
import math

import numpy as np
import pandas as pd
import pytest

from src.data_manager import (
    DataManager,
    Provenance,
    compute_config_digest,
    decode_infinities,
    encode_infinities,
)
from src.errors import ContractViolation, InputParseError

DIGEST = "a" * 64


@pytest.fixture
def dm():
    return DataManager(validate=True)


@pytest.fixture
def provenance():
    return Provenance(config_digest=DIGEST, lambda_value=0.724611353, command="bound")


class TestReadPrior:
    """TEST-DM-001: Tests for reading priors from JSON and CSV."""

    def test_json_prior(self, dm, sample_prior_file):
        prior = dm.read_prior(sample_prior_file)
        np.testing.assert_array_equal(prior.covariance, [[2.0, 1.0], [1.0, 2.0]])

    def test_csv_prior_with_header(self, dm, temp_dir):
        path = temp_dir / "prior.csv"
        path.write_text("x0,x1\n2.0,1.0\n1.0,2.0\n")
        prior = dm.read_prior(path)
        assert prior.mean == [0.0, 0.0]
        np.testing.assert_array_equal(prior.covariance, [[2.0, 1.0], [1.0, 2.0]])

    def test_csv_prior_without_header(self, dm, temp_dir):
        path = temp_dir / "prior.csv"
        path.write_text("# comment line\n4.0, 0.5\n0.5, 1.0\n")
        np.testing.assert_array_equal(dm.read_prior(path).covariance, [[4.0, 0.5], [0.5, 1.0]])

    def test_malformed_json_reports_line_and_column(self, dm, temp_dir):
        path = temp_dir / "prior.json"
        path.write_text('{\n  "mean": [0.0],\n  "sigma0": [[1.0]\n}\n')
        with pytest.raises(InputParseError) as excinfo:
            dm.read_prior(path)
        assert excinfo.value.line == 4
        assert excinfo.value.column is not None
        assert f"{path}:4:" in str(excinfo.value)

    def test_schema_violation_is_parse_error(self, dm, temp_dir):
        path = temp_dir / "prior.json"
        path.write_text(json.dumps({"mean": [0.0]}))
        with pytest.raises(InputParseError, match="sigma0"):
            dm.read_prior(path)

    def test_bad_csv_cell_reports_location(self, dm, temp_dir):
        path = temp_dir / "prior.csv"
        path.write_text("2.0,1.0\n1.0,abc\n")
        with pytest.raises(InputParseError) as excinfo:
            dm.read_prior(path)
        assert (excinfo.value.line, excinfo.value.column) == (2, 2)

    def test_ragged_csv_reports_location(self, dm, temp_dir):
        path = temp_dir / "prior.csv"
        path.write_text("2.0,1.0\n\n1.0,2.0,3.0\n")
        with pytest.raises(InputParseError) as excinfo:
            dm.read_prior(path)
        assert excinfo.value.line == 3

    def test_missing_file(self, dm, temp_dir):
        with pytest.raises(InputParseError, match="not found"):
            dm.read_prior(temp_dir / "missing.json")


class TestReadOtherInputs:
    """TEST-DM-002: Tests for grids, spectra, OU parameters and flux profiles."""

    def test_grid_column(self, dm, temp_dir):
        path = temp_dir / "grid.csv"
        path.write_text("t\n0.0\n0.5\n1.0\n")
        assert dm.read_grid(path) == [0.0, 0.5, 1.0]

    def test_grid_row(self, dm, temp_dir):
        path = temp_dir / "grid.csv"
        path.write_text("0.0,0.5,1.0\n")
        assert dm.read_grid(path) == [0.0, 0.5, 1.0]

    def test_grid_matrix_rejected(self, dm, temp_dir):
        path = temp_dir / "grid.csv"
        path.write_text("0,1\n2,3\n")
        with pytest.raises(InputParseError):
            dm.read_grid(path)

    def test_spectrum(self, dm, sample_spectrum_file):
        spec = dm.read_spectrum(sample_spectrum_file)
        assert spec.dimension == 2
        assert len(spec.support) == 4

    def test_ou_process_with_embedded_grid(self, dm, sample_ou_file):
        ou = dm.read_ou_process(sample_ou_file)
        assert ou.t_corr == 0.5
        assert len(ou.grid) == 6

    def test_ou_process_grid_override(self, dm, sample_ou_file):
        assert dm.read_ou_process(sample_ou_file, grid=[0.0, 1.0]).grid == [0.0, 1.0]

    def test_ou_process_without_grid(self, dm, temp_dir):
        path = temp_dir / "ou.json"
        path.write_text(json.dumps({"sigma0_var": 1.0, "t_corr": 1.0}))
        with pytest.raises(ContractViolation):
            dm.read_ou_process(path)
        assert dm.read_ou_process(path, default_grid=[0.0, 0.5]).grid == [0.0, 0.5]

    def test_flux(self, dm, sample_flux_file):
        flux = dm.read_flux(sample_flux_file)
        assert len(flux.grid) == 6
        assert flux.flux == [100.0] * 6

    def test_flux_wrong_header(self, dm, temp_dir):
        path = temp_dir / "flux.csv"
        path.write_text("time,rate\n0.0,1.0\n")
        with pytest.raises(InputParseError, match="t,flux"):
            dm.read_flux(path)


class TestProvenance:
    """TEST-DM-003: Tests for config digests and infinity encoding."""

    def test_digest_is_stable(self):
        config = {"command": "scan", "ratios": "1e-3:1e3:25", "rel_tol": 1e-8}
        assert compute_config_digest(config) == compute_config_digest(dict(reversed(list(config.items()))))
        assert len(compute_config_digest(config)) == 64

    def test_digest_depends_on_input_contents(self, temp_dir):
        path = temp_dir / "prior.json"
        path.write_text('{"mean": [0.0], "sigma0": [[1.0]]}')
        before = compute_config_digest({"command": "bound"}, {"prior": path})
        path.write_text('{"mean": [0.0], "sigma0": [[2.0]]}')
        assert compute_config_digest({"command": "bound"}, {"prior": path}) != before

    def test_infinity_round_trip(self):
        record = {"tau_f": float("inf"), "values": [1.0, float("inf")], "n": np.int64(3)}
        encoded = encode_infinities(record)
        assert encoded == {"tau_f": "inf", "values": [1.0, "inf"], "n": 3}
        assert math.isinf(decode_infinities(encoded)["tau_f"])


class TestArtifacts:
    """TEST-DM-004: Tests for CSV and JSON artifact writes."""

    def test_csv_header_and_precision(self, dm, provenance, temp_dir):
        frame = pd.DataFrame({"ratio": [1.0 / 3.0], "hlimit": [float("inf")]})
        path = temp_dir / "out" / "table.csv"
        dm.write_csv(path, frame, provenance)

        lines = path.read_text().splitlines()
        assert lines[0] == f"# config_digest={DIGEST}"
        assert lines[1] == "# lambda=0.724611353"
        assert lines[2] == "ratio,hlimit"
        assert lines[3] == "0.333333333333,inf"

    def test_csv_round_trip(self, dm, provenance, temp_dir):
        frame = pd.DataFrame({"a": [0.1, 2.5], "b": [3.0, 4.0]})
        path = temp_dir / "table.csv"
        dm.write_csv(path, frame, provenance)
        header, table = dm.read_csv_artifact(path)
        assert header["config_digest"] == DIGEST
        assert table["b"].dtype == np.float64
        pd.testing.assert_frame_equal(table, frame)

    def test_json_artifact_is_validated(self, dm, provenance, temp_dir):
        path = temp_dir / "verify.json"
        reports = [{"instance_id": "x", "achieved_mse": 1.0, "bound": 0.5, "margin": 0.5, "pass": True}]
        dm.write_json(path, "reports", reports, provenance, schema_name="verify_report")
        document = dm.read_json_artifact(path, schema_name="verify_report")
        assert document["provenance"]["config_digest"] == DIGEST
        assert document["reports"] == reports

    def test_json_infinity_written_as_string(self, dm, provenance, temp_dir):
        path = temp_dir / "limits.json"
        dm.write_json(path, "limits", [{"t": 0.0, "hlimit": float("inf")}], provenance)
        raw = json.loads(path.read_text())
        assert raw["limits"][0]["hlimit"] == "inf"

    def test_no_temp_files_left_behind(self, dm, provenance, temp_dir):
        dm.write_csv(temp_dir / "t.csv", pd.DataFrame({"a": [1.0]}), provenance)
        assert [p.name for p in temp_dir.iterdir()] == ["t.csv"]

    def test_render_is_deterministic(self, dm, provenance):
        frame = pd.DataFrame({"x": np.linspace(0.0, 1.0, 7)})
        assert dm.render_csv(frame, provenance) == dm.render_csv(frame, provenance)
