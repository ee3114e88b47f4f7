"""
Data Manager for QBZZB

Provides unified, schema-validated file operations for every input and
artifact format: priors (JSON or CSV), time grids, generator spectra, OU
process parameters, flux profiles, and the CSV/JSON artifacts written by the
CLI with their provenance header.
"""

import hashlib
import io
import json
import math
import shutil
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

# Import schema validation
import sys
sys.path.append(str(Path(__file__).parent.parent / 'schemas'))
from schema_registry import get_registry, ValidationError

from src.errors import ContractViolation, InputParseError
from src.prior import GaussianPrior, OUProcess
from src.resource import ProbeSpectrum
from src.waveform import FluxProfile

PathLike = Union[str, Path]

FLOAT_FORMAT = "%.12g"
INF_TOKEN = "inf"
FLUX_COLUMNS = ["t", "flux"]


@dataclass(frozen=True)
class Provenance:
    """Config digest and lambda value stamped on every artifact."""
    config_digest: str
    lambda_value: float
    command: Optional[str] = None

    def as_dict(self) -> Dict[str, Any]:
        record: Dict[str, Any] = {"config_digest": self.config_digest, "lambda": self.lambda_value}
        if self.command is not None:
            record["command"] = self.command
        return record

    def header_lines(self) -> str:
        return (f"# config_digest={self.config_digest}\n"
                f"# lambda={FLOAT_FORMAT % self.lambda_value}\n")


def file_sha256(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(65536), b''):
            digest.update(block)
    return digest.hexdigest()


def compute_config_digest(config: Dict[str, Any],
                          input_files: Optional[Mapping[str, PathLike]] = None) -> str:
    """
    SHA-256 over the canonical JSON of a run configuration and the contents of its inputs.

    Input files enter by role and content hash, not by path, so moving an
    input does not change the digest.

    Args:
        config: JSON-serializable configuration (sorted keys are used)
        input_files: Role name -> file the run depends on

    Returns:
        Hex digest
    """
    inputs = {role: file_sha256(path) for role, path in (input_files or {}).items()}
    canonical = json.dumps({"config": config, "inputs": inputs}, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def encode_infinities(value: Any) -> Any:
    """Replace infinite floats with the string 'inf' for strict JSON."""
    if isinstance(value, dict):
        return {k: encode_infinities(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode_infinities(v) for v in value]
    if isinstance(value, (float, np.floating)):
        if math.isinf(value) and value > 0:
            return INF_TOKEN
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def decode_infinities(value: Any) -> Any:
    """Inverse of encode_infinities."""
    if isinstance(value, dict):
        return {k: decode_infinities(v) for k, v in value.items()}
    if isinstance(value, list):
        return [decode_infinities(v) for v in value]
    if value == INF_TOKEN:
        return float("inf")
    return value


class DataManager:
    """
    Centralized data manager with schema validation.

    Provides type-safe read/write operations for all data formats in the system.
    """

    def __init__(self, validate: bool = True):
        """
        Initialize the data manager.

        Args:
            validate: If True, validates JSON inputs and artifacts against schemas
        """
        self.validate = validate
        self.registry = get_registry() if validate else None

    # ==================== Low-level parsing ====================

    def _load_json(self, path: PathLike, schema_name: str) -> Dict[str, Any]:
        path = Path(path)
        if not path.exists():
            raise InputParseError("file not found", path=str(path))
        try:
            with open(path, 'r') as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise InputParseError(e.msg, path=str(path), line=e.lineno, column=e.colno) from e

        if self.validate:
            try:
                self.registry.validate(data, schema_name)
            except ValidationError as e:
                raise InputParseError(e.message, path=str(path)) from e
        return data

    def _read_numeric_csv(self, path: PathLike) -> Tuple[Optional[List[str]], np.ndarray]:
        """
        Read a comma-separated numeric table with an optional header row.

        Comment lines starting with '#' and blank lines are skipped; parse
        errors report the original line and 1-based column.
        """
        path = Path(path)
        if not path.exists():
            raise InputParseError("file not found", path=str(path))
        with open(path, 'r') as f:
            numbered = [(i, line.strip()) for i, line in enumerate(f, 1)]
        numbered = [(i, line) for i, line in numbered if line and not line.startswith('#')]
        if not numbered:
            raise InputParseError("no data rows", path=str(path))

        width = numbered[0][1].count(',') + 1
        for line_no, line in numbered:
            fields = line.count(',') + 1
            if fields != width:
                raise InputParseError(f"expected {width} fields, found {fields}",
                                      path=str(path), line=line_no, column=min(fields, width) + 1)

        frame = pd.read_csv(io.StringIO("\n".join(line for _, line in numbered)),
                            header=None, dtype=str, keep_default_na=False)
        frame = frame.apply(lambda column: column.str.strip())
        line_numbers = [i for i, _ in numbered]

        header: Optional[List[str]] = None
        first = pd.to_numeric(frame.iloc[0], errors='coerce')
        if first.isna().any():
            header = [str(cell).strip() for cell in frame.iloc[0]]
            frame = frame.iloc[1:].reset_index(drop=True)
            line_numbers = line_numbers[1:]
            if frame.empty:
                raise InputParseError("header without data rows", path=str(path), line=numbered[0][0])

        values = frame.apply(pd.to_numeric, errors='coerce')
        bad = values.isna().to_numpy()
        if bad.any():
            row, col = (int(x) for x in np.argwhere(bad)[0])
            raise InputParseError(f"not a number: {frame.iat[row, col]!r}",
                                  path=str(path), line=line_numbers[row], column=col + 1)
        return header, values.to_numpy(dtype=float)

    # ==================== Input Operations ====================

    def read_prior(self, prior_file: PathLike) -> GaussianPrior:
        """
        Read a Gaussian prior.

        JSON files hold {"mean": [...], "sigma0": [[...]]}; any other suffix is
        read as a row-major CSV covariance matrix with zero mean.

        Raises:
            InputParseError: If the file is missing or malformed
        """
        prior_file = Path(prior_file)
        if prior_file.suffix.lower() == '.json':
            data = self._load_json(prior_file, 'prior')
            return GaussianPrior(mean=data['mean'], sigma0=data['sigma0'])
        _, matrix = self._read_numeric_csv(prior_file)
        return GaussianPrior.zero_mean(matrix)

    def read_grid(self, grid_file: PathLike) -> List[float]:
        """Read time samples from a single-column or single-row CSV."""
        _, values = self._read_numeric_csv(grid_file)
        if values.shape[0] != 1 and values.shape[1] != 1:
            raise InputParseError(f"grid must be a single row or column, got shape {values.shape}",
                                  path=str(grid_file))
        return values.ravel().tolist()

    def read_spectrum(self, spectrum_file: PathLike) -> ProbeSpectrum:
        data = self._load_json(spectrum_file, 'spectrum')
        return ProbeSpectrum(**data)

    def read_ou_process(self, ou_file: PathLike, grid: Optional[Sequence[float]] = None,
                        default_grid: Optional[Sequence[float]] = None) -> OUProcess:
        """
        Read OU prior parameters.

        The time grid is taken from `grid` if given, else from the file, else
        from `default_grid`.

        Raises:
            ContractViolation: If no grid is available from any source
        """
        data = self._load_json(ou_file, 'ou_process')
        times = grid if grid is not None else data.get('grid', default_grid)
        if times is None:
            raise ContractViolation(f"{ou_file}: OU process has no time grid (pass --grid)")
        return OUProcess(sigma0_var=data['sigma0_var'], t_corr=data['t_corr'], grid=list(times))

    def read_flux(self, flux_file: PathLike) -> FluxProfile:
        """Read a `t,flux` profile; the header row is optional."""
        header, values = self._read_numeric_csv(flux_file)
        if values.shape[1] != 2:
            raise InputParseError(f"flux profile needs 2 columns, found {values.shape[1]}",
                                  path=str(flux_file), line=1)
        if header is not None and [h.lower() for h in header] != FLUX_COLUMNS:
            raise InputParseError(f"flux header must be 't,flux', got {','.join(header)!r}",
                                  path=str(flux_file), line=1)
        return FluxProfile(grid=values[:, 0].tolist(), flux=values[:, 1].tolist())

    # ==================== Artifact Operations ====================

    @staticmethod
    def write_text(output_file: Path, text: str) -> None:
        # Atomic write: write to temp file, then rename
        output_file.parent.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(mode='w', delete=False, dir=output_file.parent,
                                         suffix='.tmp', newline='') as tmp_file:
            tmp_file.write(text)
            tmp_path = tmp_file.name
        shutil.move(tmp_path, output_file)

    @staticmethod
    def render_csv(frame: pd.DataFrame, provenance: Provenance) -> str:
        """Table text with the provenance comment header and 12 significant digits."""
        body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        return provenance.header_lines() + body

    def render_json(self, payload_key: str, payload: Any, provenance: Provenance,
                    schema_name: Optional[str] = None, validate: Optional[bool] = None) -> str:
        """
        JSON text of {"provenance": ..., payload_key: payload}.

        Floats are rounded to 12 significant digits and infinities written as "inf".

        Raises:
            ValidationError: If validation against schema_name fails
        """
        document = encode_infinities({"provenance": provenance.as_dict(), payload_key: payload})
        document = _round_floats(document)

        should_validate = validate if validate is not None else self.validate
        if should_validate and schema_name is not None:
            self.registry.validate(document, schema_name)

        return json.dumps(document, indent=2, allow_nan=False) + '\n'

    def write_csv(self, output_file: PathLike, frame: pd.DataFrame, provenance: Provenance) -> None:
        self.write_text(Path(output_file), self.render_csv(frame, provenance))

    def write_json(self, output_file: PathLike, payload_key: str, payload: Any,
                   provenance: Provenance, schema_name: Optional[str] = None,
                   validate: Optional[bool] = None) -> None:
        """
        Write {"provenance": ..., payload_key: payload} as JSON.

        Raises:
            ValidationError: If validation against schema_name fails
        """
        text = self.render_json(payload_key, payload, provenance, schema_name, validate)
        self.write_text(Path(output_file), text)

    def read_csv_artifact(self, artifact_file: PathLike) -> Tuple[Dict[str, str], pd.DataFrame]:
        """Read a CSV artifact back as (provenance header fields, table)."""
        artifact_file = Path(artifact_file)
        header: Dict[str, str] = {}
        with open(artifact_file, 'r') as f:
            for line in f:
                if not line.startswith('#'):
                    break
                key, _, value = line[1:].strip().partition('=')
                header[key.strip()] = value.strip()
        table = pd.read_csv(artifact_file, comment='#')
        # Whole floats are written without a decimal point; every numeric column is real-valued
        integer_columns = table.select_dtypes('integer').columns
        return header, table.astype({column: float for column in integer_columns})

    def read_json_artifact(self, artifact_file: PathLike,
                           schema_name: Optional[str] = None) -> Dict[str, Any]:
        """Read a JSON artifact, validating it and restoring infinities."""
        with open(artifact_file, 'r') as f:
            document = json.load(f)
        if self.validate and schema_name is not None:
            self.registry.validate(document, schema_name)
        return decode_infinities(document)


def _round_floats(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_round_floats(v) for v in value]
    if isinstance(value, float):
        return float(FLOAT_FORMAT % value)
    return value
