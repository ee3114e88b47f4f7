"""
Quantum Bell-Ziv-Zakai bound assembly.

Computes the Z quadrature and its two analytic limits, the directional and
per-parameter bounds built on the erfc-maximizing direction v0, the
weighted-photon resource bound, a generic classical BZZB evaluator used by the
oracles, and the ratio scan behind the log-log bound plot.
"""
from dataclasses import asdict, dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import integrate, optimize

from src.errors import ContractViolation, DimensionMismatchError, DomainError
from src.prior import Direction, GaussianPrior, tau0, v_zero
from src.resource import ProbeSpectrum, h_plus, tau_f_from_h_plus
from src.specfun import LAMBDA, erfc_std

DEFAULT_REL_TOL = 1e-8
PRIOR_DOMINATED_RATIO = 0.01
HEISENBERG_RATIO = 100.0

# erfc(27) is below the smallest normal double.
_ERFC_NEGLIGIBLE_ARG = 27.0
_ENVELOPE_FLOOR = 1e-16
_PE_TOL = 1e-15
# QUADPACK rejects relative tolerances below 50 machine epsilons
_QUAD_EPSREL_FLOOR = 50.0 * np.finfo(float).eps
_SMALLEST_DECADE = 1e-150

SCAN_COLUMNS = ["ratio", "z_over_tauf2", "z_over_tau02", "prior_limit_norm", "asymptotic_limit_norm"]

PeModel = Callable[[float, np.ndarray], float]


class Regime(str, Enum):
    PRIOR_DOMINATED = "prior-dominated"
    INTERMEDIATE = "intermediate"
    HEISENBERG = "heisenberg"


@dataclass(frozen=True)
class BoundResult:
    """QBZZB for one direction u, evaluated at v = v0."""
    tau0: float
    tau_f: float
    z: float
    prior_limit: float
    asymptotic_limit: float
    regime: Regime
    h_plus: float
    h0: float
    u: Tuple[float, ...]
    v0: Tuple[float, ...]

    @property
    def ratio(self) -> float:
        """tau0 / tau_F (zero when tau_F is infinite)."""
        return self.tau0 / self.tau_f

    def to_dict(self) -> Dict:
        record = asdict(self)
        record["regime"] = self.regime.value
        record["u"] = list(self.u)
        record["v0"] = list(self.v0)
        record["ratio"] = self.ratio
        return record


def _check_rel_tol(rel_tol: float) -> None:
    if not 1e-14 < rel_tol < 1e-2:
        raise DomainError(f"rel_tol must lie in (1e-14, 1e-2), got {rel_tol}")


def prior_limit(tau0_value: float) -> float:
    """Prior-information limit tau0^2 / 8."""
    return tau0_value ** 2 / 8.0


def asymptotic_limit(h_plus_value: float) -> float:
    """Heisenberg limit tau_F^2 / 20 = 1 / (80 lambda^2 H+^2)."""
    return tau_f_from_h_plus(h_plus_value) ** 2 / 20.0


def classify_regime(ratio: float) -> Regime:
    if ratio < PRIOR_DOMINATED_RATIO:
        return Regime.PRIOR_DOMINATED
    if ratio > HEISENBERG_RATIO:
        return Regime.HEISENBERG
    return Regime.INTERMEDIATE


def z_integral(tau0_value: float, tau_f: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """
    Z = 1/2 int_0^tau_F tau erfc(tau/tau0) (1 - sqrt(tau/tau_F)) dtau.

    With tau = tau_F s^2 the integrand becomes tau_F^2 s^3 (1 - s) erfc(tau_F s^2 / tau0)
    on [0, 1], free of the square-root cusp. An infinite tau_F returns the
    closed form tau0^2 / 8.

    Raises:
        DomainError: If tau0 or tau_F is not positive, or rel_tol is out of range
    """
    if not (np.isfinite(tau0_value) and tau0_value > 0):
        raise DomainError(f"tau0 must be positive and finite, got {tau0_value}")
    _check_rel_tol(rel_tol)
    if np.isinf(tau_f):
        return prior_limit(tau0_value)
    if not tau_f > 0:
        raise DomainError(f"tau_F must be positive, got {tau_f}")

    scale = tau_f / tau0_value
    s_max = min(1.0, float(np.sqrt(_ERFC_NEGLIGIBLE_ARG / scale)))
    s_knee = float(np.sqrt(1.0 / scale))
    points = [s_knee] if s_knee < s_max else None

    def integrand(s: float) -> float:
        return s ** 3 * (1.0 - s) * erfc_std(scale * s * s)

    value, _ = integrate.quad(integrand, 0.0, s_max, epsabs=0.0, epsrel=max(rel_tol, _QUAD_EPSREL_FLOOR),
                              limit=200, points=points)
    return tau_f ** 2 * value


def directional_bound(prior: GaussianPrior, spec: ProbeSpectrum,
                      u: Union[Direction, Sequence[float], np.ndarray],
                      h0: Optional[float] = None,
                      rel_tol: float = DEFAULT_REL_TOL) -> BoundResult:
    """
    Lower bound Z on u^T Sigma u for a probe with generator spectrum spec.

    Args:
        prior: Gaussian prior over the K parameters
        spec: Joint generator spectrum of dimension K
        u: Error direction
        h0: Resource offset H0 (weighted median when omitted)
        rel_tol: Relative quadrature tolerance for Z

    Returns:
        BoundResult with tau0, tau_F, Z, both limits and the regime label
    """
    direction = Direction.coerce(u)
    if spec.dimension != prior.dimension:
        raise DimensionMismatchError(
            f"spectrum dimension {spec.dimension} does not match prior dimension {prior.dimension}"
        )
    uvec = direction.vector
    v0 = v_zero(prior, direction)
    t0 = tau0(prior, v0)
    summary = h_plus(spec, v0, h0)
    z = z_integral(t0, summary.tau_f, rel_tol)
    ratio = t0 / summary.tau_f

    return BoundResult(
        tau0=t0,
        tau_f=summary.tau_f,
        z=z,
        prior_limit=float(uvec @ prior.covariance @ uvec),
        asymptotic_limit=asymptotic_limit(summary.h_plus),
        regime=classify_regime(ratio),
        h_plus=summary.h_plus,
        h0=summary.h0,
        u=tuple(float(x) for x in uvec),
        v0=tuple(float(x) for x in v0),
    )


def _check_index(k: int, dimension: int) -> None:
    if not 0 <= k < dimension:
        raise DomainError(f"parameter index {k} out of range for K = {dimension}")


def parameter_bound(prior: GaussianPrior, spec: ProbeSpectrum, k: int,
                    h0: Optional[float] = None,
                    rel_tol: float = DEFAULT_REL_TOL) -> BoundResult:
    """Bound on the error of parameter x_k (u = e_k)."""
    _check_index(k, prior.dimension)
    return directional_bound(prior, spec, Direction.unit(k, prior.dimension), h0, rel_tol)


def all_parameter_bounds(prior: GaussianPrior, spec: ProbeSpectrum,
                         h0: Optional[float] = None,
                         rel_tol: float = DEFAULT_REL_TOL) -> List[BoundResult]:
    return [parameter_bound(prior, spec, k, h0, rel_tol) for k in range(prior.dimension)]


def weighted_photon_upper(prior: GaussianPrior, mean_photons: Union[Sequence[float], np.ndarray],
                          k: int) -> float:
    """
    Upper bound H+k <= (1/Sigma0_kk) sum_l |Sigma0_kl| <n_l> for photon-number generators (H0 = 0).

    Raises:
        DomainError: If any mean photon number is negative or k is out of range
    """
    _check_index(k, prior.dimension)
    photons = np.asarray(mean_photons, dtype=float).ravel()
    if photons.shape[0] != prior.dimension:
        raise DimensionMismatchError(
            f"mean_photons has length {photons.shape[0]}, prior dimension is {prior.dimension}"
        )
    if np.any(photons < 0) or not np.all(np.isfinite(photons)):
        raise DomainError("mean photon numbers must be nonnegative and finite")
    sigma = prior.covariance
    return float(np.abs(sigma[k]) @ photons / sigma[k, k])


@lru_cache(maxsize=None)
def _envelope_cutoff() -> float:
    """x beyond which x erfc(x) stays below 1e-16 of its peak."""
    peak = optimize.minimize_scalar(lambda x: -x * erfc_std(x), bounds=(0.0, 3.0), method="bounded")
    peak_value = -peak.fun
    return optimize.brentq(lambda x: x * erfc_std(x) - _ENVELOPE_FLOOR * peak_value, peak.x, 10.0)


def bzzb_generic(prior: GaussianPrior, pe_model: PeModel,
                 u: Union[Direction, Sequence[float], np.ndarray],
                 v: Union[Sequence[float], np.ndarray],
                 rel_tol: float = 1e-10,
                 breakpoints: Optional[Iterable[float]] = None) -> float:
    """
    Classical BZZB int_0^inf tau erfc(tau/tau0(v)) P_e(tau, v) dtau for a fixed v.

    Args:
        prior: Gaussian prior
        pe_model: x-independent error probability P_e(tau, v) in [0, 1/2]
        u: Error direction
        v: Shift direction with u^T v = 1
        rel_tol: Relative quadrature tolerance
        breakpoints: tau values where pe_model has kinks

    Returns:
        Lower bound on u^T Sigma u

    Raises:
        ContractViolation: If u^T v != 1 or pe_model leaves [0, 1/2]
    """
    _check_rel_tol(rel_tol)
    uvec = Direction.coerce(u).vector
    vvec = np.asarray(v, dtype=float).ravel()
    if uvec.shape != vvec.shape or vvec.shape[0] != prior.dimension:
        raise DimensionMismatchError("u, v and prior must share the dimension K")
    if abs(float(uvec @ vvec) - 1.0) > 1e-9:
        raise ContractViolation(f"bzzb_generic requires u^T v = 1, got {float(uvec @ vvec)!r}")

    t0 = tau0(prior, vvec)
    x_max = _envelope_cutoff()

    def integrand(x: float) -> float:
        pe = pe_model(t0 * x, vvec)
        if not -_PE_TOL <= pe <= 0.5 + _PE_TOL:
            raise ContractViolation(f"pe_model returned {pe!r} outside [0, 1/2] at tau={t0 * x!r}")
        return x * erfc_std(x) * pe

    kinks = sorted(b / t0 for b in (breakpoints or ()) if 0.0 < b / t0 < x_max)
    epsrel = max(0.5 * rel_tol, _QUAD_EPSREL_FLOOR)

    # Decades [x/10, x] downward from x_max until the remainder below x is negligible
    total = 0.0
    upper = x_max
    while upper > _SMALLEST_DECADE:
        lower = upper / 10.0
        points = [k for k in kinks if lower < k < upper] or None
        piece, _ = integrate.quad(integrand, lower, upper, epsabs=0.0, epsrel=epsrel,
                                  limit=200, points=points)
        total += piece
        # Below `lower` the integrand is at most x / 2
        if total > 0.0 and lower ** 2 / 4.0 <= 0.5 * rel_tol * total:
            break
        upper = lower
    return t0 ** 2 * total


def parse_ratio_grid(text: str) -> np.ndarray:
    """Parse 'start:stop:count' into a geometric grid."""
    try:
        start_s, stop_s, count_s = text.split(":")
        start, stop, count = float(start_s), float(stop_s), int(count_s)
    except ValueError as e:
        raise DomainError(f"ratio grid must look like 'start:stop:count', got {text!r}") from e
    if not (start > 0 and stop > 0 and count >= 1):
        raise DomainError("ratio grid needs positive endpoints and count >= 1")
    return np.geomspace(start, stop, count)


def scan(tau_ratio_grid: Iterable[float], rel_tol: float = DEFAULT_REL_TOL) -> pd.DataFrame:
    """
    Tabulate Z against tau0/tau_F.

    Each row is evaluated with tau_F = 1 and tau0 = ratio, so the normalized
    limits are ratio^2 / 8 and 1 / 20 on the Z / tau_F^2 axis.
    """
    ratios = [float(r) for r in tau_ratio_grid]
    if any(not (np.isfinite(r) and r > 0) for r in ratios):
        raise DomainError("scan ratios must be positive and finite")

    rows = []
    for ratio in ratios:
        z = z_integral(ratio, 1.0, rel_tol)
        rows.append({
            "ratio": ratio,
            "z_over_tauf2": z,
            "z_over_tau02": z / ratio ** 2,
            "prior_limit_norm": prior_limit(ratio),
            "asymptotic_limit_norm": 1.0 / 20.0,
        })
    return pd.DataFrame(rows, columns=SCAN_COLUMNS)


def heisenberg_coefficient() -> float:
    """Coefficient 1 / (80 lambda^2) of the Heisenberg limit."""
    return 1.0 / (80.0 * LAMBDA ** 2)
