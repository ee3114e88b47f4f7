"""
Gaussian prior model.

Covariance algebra for the prior-overlap factor erfc(tau/tau0), the
erfc-maximizing direction v0, and Ornstein-Uhlenbeck covariance construction.
"""
from typing import List, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy import integrate, linalg, stats

from src.errors import DimensionMismatchError, DomainError, IllConditionedPriorError
from src.specfun import erfc_std

SYMMETRY_RTOL = 1e-12
PD_RTOL = 1e-10


class GaussianPrior(BaseModel):
    """Gaussian prior over K parameters: mean vector and covariance Sigma0."""

    model_config = ConfigDict(frozen=True)

    mean: List[float]
    sigma0: List[List[float]]

    @field_validator("sigma0")
    @classmethod
    def _check_square(cls, value: List[List[float]]) -> List[List[float]]:
        k = len(value)
        if k == 0:
            raise ValueError("sigma0 must be a non-empty matrix")
        if any(len(row) != k for row in value):
            raise ValueError(f"sigma0 must be square, got {k} rows of unequal length")
        return value

    @model_validator(mode="after")
    def _check_covariance(self) -> "GaussianPrior":
        sigma = np.asarray(self.sigma0, dtype=float)
        if len(self.mean) != sigma.shape[0]:
            raise ValueError(
                f"mean has length {len(self.mean)} but sigma0 is {sigma.shape[0]}x{sigma.shape[0]}"
            )
        if not np.all(np.isfinite(sigma)) or not np.all(np.isfinite(self.mean)):
            raise ValueError("prior entries must be finite")

        scale = np.max(np.abs(sigma))
        if np.max(np.abs(sigma - sigma.T)) >= SYMMETRY_RTOL * max(scale, np.finfo(float).tiny):
            raise ValueError("sigma0 is not symmetric")

        eigvals = np.linalg.eigvalsh(sigma)
        if eigvals[-1] <= 0 or eigvals[0] <= PD_RTOL * eigvals[-1]:
            raise ValueError(
                f"sigma0 is not positive definite within tolerance "
                f"(eigenvalue range [{eigvals[0]:.3e}, {eigvals[-1]:.3e}])"
            )
        return self

    @classmethod
    def zero_mean(cls, sigma0: Union[np.ndarray, Sequence[Sequence[float]]]) -> "GaussianPrior":
        """Build a zero-mean prior from a covariance matrix."""
        sigma = np.atleast_2d(np.asarray(sigma0, dtype=float))
        return cls(mean=[0.0] * sigma.shape[0], sigma0=sigma.tolist())

    @property
    def dimension(self) -> int:
        return len(self.mean)

    @property
    def covariance(self) -> np.ndarray:
        return np.asarray(self.sigma0, dtype=float)

    @property
    def mean_vector(self) -> np.ndarray:
        return np.asarray(self.mean, dtype=float)


class Direction(BaseModel):
    """Weights u selecting the error component u^T Sigma u."""

    model_config = ConfigDict(frozen=True)

    u: List[float]

    @field_validator("u")
    @classmethod
    def _check_nonzero(cls, value: List[float]) -> List[float]:
        arr = np.asarray(value, dtype=float)
        if arr.size == 0 or not np.all(np.isfinite(arr)) or not np.linalg.norm(arr) > 0:
            raise ValueError("direction u must be a finite, nonzero vector")
        return value

    @classmethod
    def coerce(cls, u: Union["Direction", Sequence[float], np.ndarray]) -> "Direction":
        if isinstance(u, Direction):
            return u
        return cls(u=np.asarray(u, dtype=float).ravel().tolist())

    @classmethod
    def unit(cls, k: int, dimension: int) -> "Direction":
        """Coordinate direction e_k."""
        u = [0.0] * dimension
        u[k] = 1.0
        return cls(u=u)

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.u, dtype=float)


class OUProcess(BaseModel):
    """Ornstein-Uhlenbeck waveform prior sampled on a time grid."""

    model_config = ConfigDict(frozen=True)

    sigma0_var: float
    t_corr: float
    grid: List[float]

    @field_validator("sigma0_var", "t_corr")
    @classmethod
    def _check_positive(cls, value: float) -> float:
        if not (np.isfinite(value) and value > 0):
            raise ValueError(f"must be positive and finite, got {value}")
        return value

    @field_validator("grid")
    @classmethod
    def _check_grid(cls, value: List[float]) -> List[float]:
        if len(value) == 0:
            raise ValueError("grid must contain at least one time sample")
        if np.any(np.diff(np.asarray(value, dtype=float)) <= 0):
            raise ValueError("grid must be strictly increasing (duplicate or unsorted time samples)")
        return value

    @property
    def times(self) -> np.ndarray:
        return np.asarray(self.grid, dtype=float)


def _as_vector(v: Union[Sequence[float], np.ndarray], dimension: int, name: str = "v") -> np.ndarray:
    arr = np.asarray(v, dtype=float).ravel()
    if arr.shape[0] != dimension:
        raise DimensionMismatchError(f"{name} has length {arr.shape[0]}, prior dimension is {dimension}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def precision_quadratic(prior: GaussianPrior, v: Union[Sequence[float], np.ndarray]) -> float:
    """v^T Sigma0^{-1} v through a Cholesky solve."""
    vec = _as_vector(v, prior.dimension)
    try:
        factor = linalg.cho_factor(prior.covariance, lower=True)
    except linalg.LinAlgError as e:
        raise IllConditionedPriorError(f"Cholesky factorization of sigma0 failed: {e}") from e
    return float(vec @ linalg.cho_solve(factor, vec))


def tau0(prior: GaussianPrior, v: Union[Sequence[float], np.ndarray]) -> float:
    """
    Prior time scale tau0 = sqrt(8 / (v^T Sigma0^{-1} v)).

    Raises:
        DomainError: If v is zero
        IllConditionedPriorError: If Sigma0 cannot be factorized
    """
    quad = precision_quadratic(prior, v)
    if not quad > 0:
        raise DomainError("tau0 requires a nonzero direction v")
    return float(np.sqrt(8.0 / quad))


def min_overlap(prior: GaussianPrior, v: Union[Sequence[float], np.ndarray], tau: float) -> float:
    """Integral of min[P(x), P(x + v tau)] over x, equal to erfc(tau / tau0)."""
    if not tau >= 0:
        raise DomainError(f"tau must be nonnegative, got {tau}")
    return erfc_std(tau / tau0(prior, v))


def min_overlap_numeric(prior: GaussianPrior, v: Union[Sequence[float], np.ndarray],
                        tau: float, n_grid: int = 1601) -> float:
    """
    Brute-force integral of min[P(x), P(x + v tau)] for K <= 2.

    Independent of the erfc closed form; used to validate min_overlap.
    """
    vec = _as_vector(v, prior.dimension)
    shift = vec * tau
    mean = prior.mean_vector
    cov = prior.covariance
    pdf = stats.multivariate_normal(mean=mean, cov=cov).pdf

    if prior.dimension == 1:
        sd = float(np.sqrt(cov[0, 0]))
        lo = mean[0] - abs(shift[0]) - 12 * sd
        hi = mean[0] + abs(shift[0]) + 12 * sd
        crossing = mean[0] - shift[0] / 2.0
        value, _ = integrate.quad(
            lambda x: min(pdf(x), pdf(x + shift[0])), lo, hi,
            points=[crossing], limit=200, epsabs=1e-12,
        )
        return float(value)

    if prior.dimension == 2:
        sd = np.sqrt(np.diag(cov))
        axes = [
            np.linspace(mean[i] - abs(shift[i]) - 8 * sd[i], mean[i] + abs(shift[i]) + 8 * sd[i], n_grid)
            for i in range(2)
        ]
        xx, yy = np.meshgrid(*axes, indexing="ij")
        points = np.stack([xx, yy], axis=-1)
        integrand = np.minimum(pdf(points), pdf(points + shift))
        return float(integrate.trapezoid(integrate.trapezoid(integrand, axes[1], axis=1), axes[0]))

    raise DomainError("min_overlap_numeric supports K <= 2 only")


def v_zero(prior: GaussianPrior, u: Union[Direction, Sequence[float], np.ndarray]) -> np.ndarray:
    """
    Direction v0 = Sigma0 u / (u^T Sigma0 u), the maximizer of tau0 subject to u^T v = 1.

    Raises:
        DomainError: If u^T Sigma0 u is not positive
    """
    direction = Direction.coerce(u)
    uvec = _as_vector(direction.vector, prior.dimension, name="u")
    sigma_u = prior.covariance @ uvec
    weight = float(uvec @ sigma_u)
    if not weight > 0:
        raise DomainError("v_zero requires u^T Sigma0 u > 0")
    return sigma_u / weight


def ou_kernel(ou: OUProcess, t: Union[float, np.ndarray], t_prime: Union[float, np.ndarray]) -> np.ndarray:
    """OU covariance function sigma0 * exp(-|t - t'| / T0)."""
    lag = np.abs(np.asarray(t, dtype=float) - np.asarray(t_prime, dtype=float))
    return ou.sigma0_var * np.exp(-lag / ou.t_corr)


def ou_covariance(ou: OUProcess) -> GaussianPrior:
    """Zero-mean Gaussian prior with OU covariance on the process grid."""
    times = ou.times
    if np.unique(times).size != times.size:
        raise DomainError("OU grid contains duplicate time samples")
    sigma = ou_kernel(ou, times[:, None], times[None, :])
    return GaussianPrior.zero_mean(sigma)
