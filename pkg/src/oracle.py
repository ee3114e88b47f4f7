"""
Independent brute-force verifiers for the computed bounds.

Each oracle instance pairs an achieved Bayes MSE of a concrete estimation
problem with the bound that must not exceed it:

- linear-Gaussian models, whose MMSE is closed form and whose two-hypothesis
  error probability is exact, checked against the classical BZZB;
- single-mode quantum phase estimation with the canonical phase measurement,
  whose posterior-mean MSE is computed by double quadrature and checked
  against the QBZZB;
- a prior-only instance where both sides equal u^T Sigma0 u.
"""
from dataclasses import dataclass
from typing import Dict, List, Protocol, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from src.bound import bzzb_generic, directional_bound
from src.errors import DomainError, QBZZBError
from src.prior import Direction, GaussianPrior, v_zero
from src.resource import ProbeSpectrum
from src.specfun import erfc_std

PASS_RTOL = 1e-9
CONVERGENCE_TOL = 1e-6
MAX_PROBE_DIM = 8
MAX_PRIOR_SIGMA = 0.5
PRIOR_TRUNCATION = 8.0

DEFAULT_SEED = 20140519
SUITES = ("default", "classical", "quantum")


@dataclass(frozen=True)
class OracleReport:
    """Achieved MSE of an estimation instance against the bound it must dominate."""
    instance_id: str
    achieved_mse: float
    bound: float
    margin: float
    passed: bool

    @classmethod
    def build(cls, instance_id: str, achieved_mse: float, bound: float) -> "OracleReport":
        margin = achieved_mse - bound
        return cls(
            instance_id=instance_id,
            achieved_mse=float(achieved_mse),
            bound=float(bound),
            margin=float(margin),
            passed=bool(margin >= -PASS_RTOL * max(1.0, abs(bound))),
        )

    def to_dict(self) -> Dict:
        return {
            "instance_id": self.instance_id,
            "achieved_mse": self.achieved_mse,
            "bound": self.bound,
            "margin": self.margin,
            "pass": self.passed,
        }


# ==================== Classical oracle ====================

def _cholesky_or_raise(matrix: np.ndarray, what: str):
    try:
        return linalg.cho_factor(matrix, lower=True)
    except linalg.LinAlgError as e:
        raise DomainError(f"{what} is not positive definite") from e


def linear_gaussian_mmse(prior: GaussianPrior, h_matrix: Union[np.ndarray, Sequence],
                         noise_cov: Union[np.ndarray, Sequence],
                         u: Union[Direction, Sequence[float], np.ndarray]) -> float:
    """
    Exact Bayes MSE u^T (Sigma0 - Sigma0 H^T (H Sigma0 H^T + R)^{-1} H Sigma0) u.

    Raises:
        DomainError: If R or the innovation covariance is not positive definite
    """
    sigma = prior.covariance
    h = np.atleast_2d(np.asarray(h_matrix, dtype=float))
    r = np.atleast_2d(np.asarray(noise_cov, dtype=float))
    if h.shape[1] != prior.dimension or r.shape != (h.shape[0], h.shape[0]):
        raise DomainError("observation matrix and noise covariance do not match the prior")
    _cholesky_or_raise(r, "noise covariance")

    innovation = h @ sigma @ h.T + r
    factor = _cholesky_or_raise(innovation, "innovation covariance")
    gain_term = sigma @ h.T @ linalg.cho_solve(factor, h @ sigma)
    uvec = Direction.coerce(u).vector
    return float(uvec @ (sigma - gain_term) @ uvec)


def gaussian_pe(d: float) -> float:
    """Error probability between two equally likely unit Gaussians a distance d apart."""
    if not d >= 0:
        raise DomainError(f"distance must be nonnegative, got {d}")
    if np.isinf(d):
        return 0.0
    return 0.5 * erfc_std(d / (2.0 * np.sqrt(2.0)))


def linear_gaussian_pe_model(h_matrix: np.ndarray, noise_cov: np.ndarray):
    """pe_model(tau, v) = gaussian_pe(tau * ||R^{-1/2} H v||)."""
    h = np.atleast_2d(np.asarray(h_matrix, dtype=float))
    factor = _cholesky_or_raise(np.atleast_2d(np.asarray(noise_cov, dtype=float)), "noise covariance")
    information = h.T @ linalg.cho_solve(factor, h)

    def pe_model(tau: float, v: np.ndarray) -> float:
        distance = tau * np.sqrt(max(float(v @ information @ v), 0.0))
        return gaussian_pe(distance)

    return pe_model


def half_pe_model(tau: float, v: np.ndarray) -> float:
    """Uninformative measurement: P_e = 1/2 for every hypothesis pair."""
    return 0.5


# ==================== Quantum oracle ====================

def _normalized_amplitudes(amplitudes: Sequence[complex]) -> np.ndarray:
    c = np.asarray(amplitudes, dtype=complex).ravel()
    if c.size == 0 or c.size > MAX_PROBE_DIM:
        raise DomainError(f"probe dimension must lie in [1, {MAX_PROBE_DIM}], got {c.size}")
    norm = float(np.sum(np.abs(c) ** 2))
    if abs(norm - 1.0) > 1e-12:
        raise DomainError(f"probe amplitudes are not normalized (sum |c|^2 = {norm!r})")
    return c


def _check_prior_sigma(prior_sigma: float) -> None:
    if not 0 < prior_sigma <= MAX_PRIOR_SIGMA:
        raise DomainError(f"prior_sigma must lie in (0, {MAX_PRIOR_SIGMA}] rad, got {prior_sigma}")


def phase_mse_on_grid(amplitudes: Sequence[complex], prior_sigma: float, nx: int, ny: int) -> float:
    """
    Posterior-mean MSE for one quadrature resolution.

    x uses Gauss-Legendre nodes on [-8 sigma, 8 sigma] weighted by the Gaussian
    prior; y uses the periodic trapezoid rule on [0, 2 pi). The canonical phase
    measurement gives P(y|x) = |sum_m c_m exp(i m (x - y))|^2 / (2 pi).
    """
    c = _normalized_amplitudes(amplitudes)
    _check_prior_sigma(prior_sigma)
    orders = np.arange(c.size)

    nodes, weights = np.polynomial.legendre.leggauss(nx)
    half_width = PRIOR_TRUNCATION * prior_sigma
    x = half_width * nodes
    wx = half_width * weights * np.exp(-0.5 * (x / prior_sigma) ** 2)

    y = 2.0 * np.pi * np.arange(ny) / ny
    wy = 2.0 * np.pi / ny

    amp = (c[None, :] * np.exp(1j * np.outer(x, orders))) @ np.exp(-1j * np.outer(orders, y))
    joint = wx[:, None] * (np.abs(amp) ** 2 / (2.0 * np.pi)) * wy
    joint /= joint.sum()

    p_y = joint.sum(axis=0)
    observed = p_y > 0
    post_mean = np.zeros_like(p_y)
    post_mean[observed] = (x @ joint[:, observed]) / p_y[observed]
    return float(np.sum(joint * (x[:, None] - post_mean[None, :]) ** 2))


def quantum_phase_bayes_mse(amplitudes: Sequence[complex], prior_sigma: float,
                            grid_sizes: Tuple[int, int] = (48, 32),
                            tol: float = CONVERGENCE_TOL, max_doublings: int = 8) -> float:
    """
    Bayes MSE of the posterior-mean estimator for single-mode phase estimation.

    The quadrature grid is doubled until successive values differ by less
    than tol.

    Raises:
        DomainError: On unnormalized amplitudes, D > 8 or prior_sigma > 0.5 rad
        QBZZBError: If the quadrature does not converge
    """
    nx, ny = grid_sizes
    ny = max(ny, 4 * len(amplitudes))
    previous = phase_mse_on_grid(amplitudes, prior_sigma, nx, ny)
    for _ in range(max_doublings):
        nx, ny = 2 * nx, 2 * ny
        current = phase_mse_on_grid(amplitudes, prior_sigma, nx, ny)
        if abs(current - previous) < tol:
            return current
        previous = current
    raise QBZZBError(f"phase MSE quadrature did not converge within {max_doublings} doublings")


# ==================== Instances ====================

class OracleInstance(Protocol):
    instance_id: str

    def achieved_mse(self) -> float: ...

    def bound(self) -> float: ...


@dataclass
class LinearGaussianInstance:
    """y = H x + noise(R): analytic MMSE against bzzb_generic with the exact P_e."""
    instance_id: str
    prior: GaussianPrior
    h_matrix: np.ndarray
    noise_cov: np.ndarray
    u: Direction

    def achieved_mse(self) -> float:
        return linear_gaussian_mmse(self.prior, self.h_matrix, self.noise_cov, self.u)

    def bound(self) -> float:
        v0 = v_zero(self.prior, self.u)
        pe_model = linear_gaussian_pe_model(self.h_matrix, self.noise_cov)
        return bzzb_generic(self.prior, pe_model, self.u, v0)


@dataclass
class QuantumPhaseInstance:
    """Canonical phase measurement on a number-state superposition against the QBZZB."""
    instance_id: str
    amplitudes: np.ndarray
    prior_sigma: float

    def achieved_mse(self) -> float:
        return quantum_phase_bayes_mse(self.amplitudes, self.prior_sigma)

    def bound(self) -> float:
        prior = GaussianPrior(mean=[0.0], sigma0=[[self.prior_sigma ** 2]])
        spec = ProbeSpectrum.from_amplitudes(self.amplitudes)
        return directional_bound(prior, spec, [1.0]).z


@dataclass
class PriorOnlyInstance:
    """No measurement: the prior mean attains u^T Sigma0 u, the bound with P_e = 1/2."""
    instance_id: str
    prior: GaussianPrior
    u: Direction

    def achieved_mse(self) -> float:
        uvec = self.u.vector
        return float(uvec @ self.prior.covariance @ uvec)

    def bound(self) -> float:
        return bzzb_generic(self.prior, half_pe_model, self.u, v_zero(self.prior, self.u))


def verify(instances: Sequence[OracleInstance]) -> List[OracleReport]:
    """Evaluate every instance; a report passes when its MSE dominates its bound."""
    return [OracleReport.build(inst.instance_id, inst.achieved_mse(), inst.bound()) for inst in instances]


# ==================== Instance generation ====================

def random_spd(rng: np.random.Generator, k: int, floor: float = 0.5) -> np.ndarray:
    a = rng.normal(size=(k, k))
    return a @ a.T + floor * np.eye(k)


def random_probe_amplitudes(rng: np.random.Generator, d: int) -> np.ndarray:
    c = rng.normal(size=d) + 1j * rng.normal(size=d)
    return c / np.linalg.norm(c)


def random_linear_gaussian_instances(count: int, seed: int = DEFAULT_SEED,
                                     max_dim: int = 4) -> List[LinearGaussianInstance]:
    rng = np.random.default_rng(seed)
    instances = []
    for i in range(count):
        k = int(rng.integers(1, max_dim + 1))
        m = int(rng.integers(1, k + 1))
        instances.append(LinearGaussianInstance(
            instance_id=f"linear-gaussian-{i:02d}",
            prior=GaussianPrior(mean=rng.normal(size=k).tolist(), sigma0=random_spd(rng, k).tolist()),
            h_matrix=rng.normal(size=(m, k)),
            noise_cov=random_spd(rng, m),
            u=Direction.coerce(rng.normal(size=k)),
        ))
    return instances


def quantum_phase_instances(dims: Sequence[int] = (2, 3, 4),
                            sigmas: Sequence[float] = (0.05, 0.1, 0.2),
                            seed: int = DEFAULT_SEED) -> List[QuantumPhaseInstance]:
    rng = np.random.default_rng(seed)
    instances = []
    for d in dims:
        amplitudes = random_probe_amplitudes(rng, d)
        for sigma in sigmas:
            instances.append(QuantumPhaseInstance(
                instance_id=f"quantum-D{d}-sigma{sigma:g}",
                amplitudes=amplitudes,
                prior_sigma=sigma,
            ))
    return instances


def default_suite(name: str = "default", seed: int = DEFAULT_SEED) -> List[OracleInstance]:
    """Deterministic instance list for `verify --suite <name>`."""
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; expected one of {SUITES}")

    prior_only = PriorOnlyInstance(
        instance_id="prior-only",
        prior=GaussianPrior(mean=[0.0, 0.0], sigma0=[[2.0, 1.0], [1.0, 2.0]]),
        u=Direction(u=[1.0, 0.0]),
    )
    classical: List[OracleInstance] = [*random_linear_gaussian_instances(20, seed), prior_only]
    quantum: List[OracleInstance] = list(quantum_phase_instances(seed=seed))

    if name == "classical":
        return classical
    if name == "quantum":
        return quantum
    return classical + quantum
