"""
Command-line interface for QBZZB.

Sub-commands:
    lambda    solve the cosine-bound constant and print phi and lambda
    bound     compute directional or per-parameter bounds for a prior and probe spectrum
    scan      tabulate Z against tau0/tau_F for log-log plotting
    waveform  time-resolved Heisenberg limits for an OU phase waveform
    verify    run the brute-force oracle suite against the computed bounds
"""
import argparse
import sys
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence

import jsonschema
import pandas as pd
import pydantic
from pydantic import BaseModel, ConfigDict, field_validator

from src.bound import (
    BoundResult,
    all_parameter_bounds,
    directional_bound,
    parameter_bound,
    parse_ratio_grid,
    scan,
)
from src.data_manager import DataManager, Provenance, compute_config_digest
from src.errors import ContractViolation, InputParseError, QBZZBError, VerificationFailure
from src.oracle import SUITES, default_suite, verify
from src.prior import GaussianPrior, ou_covariance
from src.specfun import LAMBDA_CONSTANT
from src.waveform import time_resolved_limits

DEFAULT_RATIOS = "1e-3:1e3:25"
INPUT_FIELDS = ("prior", "spectrum", "ou", "grid", "flux")

BOUND_COLUMNS = ["tau0", "tau_f", "z", "prior_limit", "asymptotic_limit", "regime",
                 "h_plus", "h0", "ratio", "u", "v0"]
REPORT_COLUMNS = ["instance_id", "achieved_mse", "bound", "margin", "pass"]


class RunConfig(BaseModel):
    """Validated form of the parsed command line."""

    model_config = ConfigDict(frozen=True)

    command: Literal["lambda", "bound", "scan", "waveform", "verify"]
    prior: Optional[str] = None
    spectrum: Optional[str] = None
    ou: Optional[str] = None
    grid: Optional[str] = None
    flux: Optional[str] = None
    u: Optional[List[float]] = None
    k: Optional[int] = None
    h0: Optional[float] = None
    ratios: str = DEFAULT_RATIOS
    suite: str = "default"
    rel_tol: float = 1e-8
    out: Optional[str] = None
    format: Literal["csv", "json"] = "csv"
    quiet: bool = False

    @field_validator("rel_tol")
    @classmethod
    def _check_rel_tol(cls, value: float) -> float:
        if not 1e-14 < value < 1e-2:
            raise ValueError(f"rel_tol must lie in (1e-14, 1e-2), got {value}")
        return value

    @field_validator("suite")
    @classmethod
    def _check_suite(cls, value: str) -> str:
        if value not in SUITES:
            raise ValueError(f"suite must be one of {SUITES}, got {value!r}")
        return value

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        fields = {name: value for name, value in vars(args).items()
                  if name in cls.model_fields and value is not None}
        return cls(**fields)

    def input_files(self) -> Dict[str, str]:
        return {name: getattr(self, name) for name in INPUT_FIELDS if getattr(self, name) is not None}

    def digest(self) -> str:
        """Digest of everything that determines the artifact bytes."""
        settings = self.model_dump(exclude={"out", "quiet", *INPUT_FIELDS})
        return compute_config_digest(settings, self.input_files())


# ==================== Argument parsing ====================

def _comma_floats(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def _h0_value(text: str) -> Optional[float]:
    if text == "median":
        return None
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--h0 expects a real number or 'median', got {text!r}")


def _add_output_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=str, help="Output file (default: print to stdout)")
    parser.add_argument("--format", choices=["csv", "json"], default="csv",
                        help="Artifact format (default: csv)")
    parser.add_argument("--rel-tol", dest="rel_tol", type=float, default=1e-8,
                        help="Relative quadrature tolerance (default: 1e-8)")
    parser.add_argument("--quiet", action="store_true",
                        help="Print only the required results")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbzzb",
        description="Quantum Bell-Ziv-Zakai error bounds for Gaussian priors",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Print the cosine-bound constant
  python qbzzb.py lambda

  # Bound on x_0 error for a two-parameter prior and a probe spectrum
  python qbzzb.py bound --prior configs/prior_2d.json --spectrum configs/spectrum_2mode.json --k 0

  # Log-log table of Z against tau0/tau_F
  python qbzzb.py scan --ratios 1e-3:1e3:25 --out outputs/scan.csv

  # Time-resolved limits for an OU waveform
  python qbzzb.py waveform --ou configs/ou_process.json --flux configs/flux_constant.csv --out outputs/waveform.csv

  # Check every bound against the brute-force oracles
  python qbzzb.py verify --suite default --format json --out outputs/verify.json
        """
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    lam = subparsers.add_parser("lambda", help="Print phi and lambda")
    lam.add_argument("--quiet", action="store_true", help="Print only the constants")

    bound = subparsers.add_parser("bound", help="Compute QBZZB for a prior and probe spectrum")
    source = bound.add_mutually_exclusive_group(required=True)
    source.add_argument("--prior", type=str, help="Prior JSON ({mean, sigma0}) or covariance CSV")
    source.add_argument("--ou", type=str, help="OU process JSON; builds the prior on its grid")
    bound.add_argument("--grid", type=str, help="Time grid CSV for --ou")
    bound.add_argument("--spectrum", type=str, required=True, help="Generator spectrum JSON")
    target = bound.add_mutually_exclusive_group()
    target.add_argument("--u", type=_comma_floats, help="Error direction, e.g. 1,0")
    target.add_argument("--k", type=int, help="Parameter index for u = e_k")
    bound.add_argument("--h0", type=_h0_value, default=None,
                       help="Resource offset H0: a real number or 'median' (default: median)")
    _add_output_options(bound)

    scan_parser = subparsers.add_parser("scan", help="Tabulate Z against tau0/tau_F")
    scan_parser.add_argument("--ratios", type=str, default=DEFAULT_RATIOS,
                             help=f"Geometric grid start:stop:count (default: {DEFAULT_RATIOS})")
    _add_output_options(scan_parser)

    waveform = subparsers.add_parser("waveform", help="Time-resolved limits for an OU waveform")
    waveform.add_argument("--ou", type=str, required=True, help="OU process JSON")
    waveform.add_argument("--flux", type=str, required=True, help="Flux profile CSV (t,flux)")
    waveform.add_argument("--grid", type=str, help="Time grid CSV (default: OU file, then flux grid)")
    _add_output_options(waveform)

    verify_parser = subparsers.add_parser("verify", help="Run the oracle suite")
    verify_parser.add_argument("--suite", choices=list(SUITES), default="default",
                               help="Instance set (default: default)")
    _add_output_options(verify_parser)

    return parser


# ==================== Commands ====================

class _Runner:
    """Executes one RunConfig; console chatter is suppressed when quiet or streaming to stdout."""

    def __init__(self, config: RunConfig, data_manager: Optional[DataManager] = None):
        self.config = config
        self.dm = data_manager or DataManager(validate=True)
        self.verbose = not config.quiet and config.out is not None

    def say(self, text: str = "") -> None:
        if self.verbose:
            print(text)

    def banner(self, title: str) -> None:
        self.say("=" * 70)
        self.say(title)
        self.say("=" * 70)

    def provenance(self) -> Provenance:
        return Provenance(config_digest=self.config.digest(), lambda_value=LAMBDA_CONSTANT.lam,
                          command=self.config.command)

    def emit(self, frame: pd.DataFrame, payload_key: str, records: List[Dict],
             schema_name: Optional[str] = None) -> None:
        provenance = self.provenance()
        if self.config.format == "json":
            text = self.dm.render_json(payload_key, records, provenance, schema_name)
        else:
            text = self.dm.render_csv(frame, provenance)

        if self.config.out is None:
            sys.stdout.write(text)
            return
        out = Path(self.config.out)
        self.dm.write_text(out, text)
        self.say(f"\n✓ Wrote {len(frame)} rows to {out}")
        self.say(f"  config_digest: {provenance.config_digest}")

    # ----- lambda -----

    def run_lambda(self) -> int:
        constant = LAMBDA_CONSTANT
        if not self.config.quiet:
            print("=" * 70)
            print("Cosine-bound constant")
            print("=" * 70)
        print(f"phi={constant.phi:.12g}")
        print(f"lambda={constant.lam:.4f}")
        if not self.config.quiet:
            print(f"  lambda (full precision): {constant.lam:.12g}")
            print(f"  residual |tan(phi/2) - phi|: {constant.residual():.3e}")
        return 0

    # ----- bound -----

    def _load_prior(self) -> GaussianPrior:
        if self.config.prior is not None:
            return self.dm.read_prior(self.config.prior)
        grid = self.dm.read_grid(self.config.grid) if self.config.grid else None
        return ou_covariance(self.dm.read_ou_process(self.config.ou, grid))

    def run_bound(self) -> int:
        cfg = self.config
        self.banner("QBZZB bound")
        prior = self._load_prior()
        spec = self.dm.read_spectrum(cfg.spectrum)
        self.say(f"  Parameters K: {prior.dimension}")
        self.say(f"  Spectrum support: {len(spec.support)} atoms")
        self.say(f"  H0: {'median' if cfg.h0 is None else cfg.h0}")

        if cfg.u is not None:
            results = [directional_bound(prior, spec, cfg.u, cfg.h0, cfg.rel_tol)]
        elif cfg.k is not None:
            results = [parameter_bound(prior, spec, cfg.k, cfg.h0, cfg.rel_tol)]
        else:
            results = all_parameter_bounds(prior, spec, cfg.h0, cfg.rel_tol)

        for result in results:
            self.say(f"  Z = {result.z:.6g}  (tau0/tau_F = {result.ratio:.4g}, {result.regime.value})")

        self.emit(_bound_frame(results), "bounds", [r.to_dict() for r in results], "bound_report")
        return 0

    # ----- scan -----

    def run_scan(self) -> int:
        cfg = self.config
        self.banner("Z against tau0/tau_F")
        ratios = parse_ratio_grid(cfg.ratios)
        self.say(f"  Ratios: {cfg.ratios} ({len(ratios)} points)")
        self.say(f"  rel_tol: {cfg.rel_tol:g}")
        table = scan(ratios, cfg.rel_tol)
        self.emit(table, "scan", table.to_dict(orient="records"))
        return 0

    # ----- waveform -----

    def run_waveform(self) -> int:
        cfg = self.config
        self.banner("Time-resolved Heisenberg limits")
        flux = self.dm.read_flux(cfg.flux)
        grid = self.dm.read_grid(cfg.grid) if cfg.grid else None
        ou = self.dm.read_ou_process(cfg.ou, grid, default_grid=flux.grid)
        self.say(f"  sigma0: {ou.sigma0_var:g}  T0: {ou.t_corr:g}")
        self.say(f"  Grid samples: {len(ou.grid)}")
        table = time_resolved_limits(ou, flux)
        self.emit(table, "limits", table.to_dict(orient="records"))
        return 0

    # ----- verify -----

    def run_verify(self) -> int:
        cfg = self.config
        self.banner(f"Oracle verification (suite: {cfg.suite})")
        reports = verify(default_suite(cfg.suite))
        for report in reports:
            mark = "✓" if report.passed else "✗"
            self.say(f"  {mark} {report.instance_id}: mse={report.achieved_mse:.6g} "
                     f"bound={report.bound:.6g} margin={report.margin:.3g}")

        records = [r.to_dict() for r in reports]
        self.emit(pd.DataFrame(records, columns=REPORT_COLUMNS), "reports", records, "verify_report")

        failed = [r.instance_id for r in reports if not r.passed]
        if failed:
            raise VerificationFailure(f"{len(failed)} of {len(reports)} reports failed: {', '.join(failed)}")
        self.say(f"\n✓ All {len(reports)} reports pass")
        return 0


def _join(values: Sequence[float]) -> str:
    return " ".join(f"{v:.12g}" for v in values)


def _bound_frame(results: Sequence[BoundResult]) -> pd.DataFrame:
    rows = []
    for result in results:
        record = result.to_dict()
        record["u"] = _join(result.u)
        record["v0"] = _join(result.v0)
        rows.append(record)
    return pd.DataFrame(rows, columns=BOUND_COLUMNS)


def run(config: RunConfig, data_manager: Optional[DataManager] = None) -> int:
    """
    Execute one command.

    Returns:
        Exit status (0 on success)

    Raises:
        QBZZBError: Domain, parse, contract and verification failures
    """
    runner = _Runner(config, data_manager)
    return getattr(runner, f"run_{config.command}")()


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run, and map failures onto exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = RunConfig.from_args(args)
        if config.command == "bound" and config.grid is not None and config.ou is None:
            raise ContractViolation("--grid applies only together with --ou")
        return run(config)
    except InputParseError as e:
        print(f"✗ Parse error: {e}", file=sys.stderr)
        return e.exit_code
    except QBZZBError as e:
        print(f"✗ Error: {e}", file=sys.stderr)
        return e.exit_code
    except pydantic.ValidationError as e:
        print(f"✗ Contract violation: {e}", file=sys.stderr)
        return ContractViolation.exit_code
    except jsonschema.ValidationError as e:
        print(f"✗ Contract violation: artifact failed schema validation: {e.message}", file=sys.stderr)
        return ContractViolation.exit_code


if __name__ == "__main__":
    sys.exit(main())
