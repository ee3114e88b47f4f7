"""
Continuous-time phase waveform specialization.

Photon-flux discretization n_l = dt I(t_l), the covariance-weighted flux bound
on the time-resolved resource H+(t), the time-resolved Heisenberg limit and the
1/<I>^2 scaling check.
"""
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, model_validator

from src.bound import heisenberg_coefficient
from src.errors import DimensionMismatchError, DomainError
from src.prior import OUProcess, ou_kernel

UNIFORM_GRID_RTOL = 1e-9
# exp(-20) relative truncation of the OU weighting integral
KERNEL_TRUNCATION = 20.0

WAVEFORM_COLUMNS = ["t", "h_plus_upper", "hlimit"]


class FluxProfile(BaseModel):
    """Mean photon flux <I(t_l)> sampled on a time grid."""

    model_config = ConfigDict(frozen=True)

    grid: List[float]
    flux: List[float]

    @model_validator(mode="after")
    def _check_profile(self) -> "FluxProfile":
        if len(self.grid) != len(self.flux):
            raise ValueError(f"grid has {len(self.grid)} samples but flux has {len(self.flux)}")
        if len(self.grid) == 0:
            raise ValueError("flux profile must contain at least one sample")
        if np.any(np.diff(np.asarray(self.grid, dtype=float)) <= 0):
            raise ValueError("grid must be strictly increasing")
        flux = np.asarray(self.flux, dtype=float)
        if np.any(flux < 0) or not np.all(np.isfinite(flux)):
            raise ValueError("flux must be nonnegative and finite")
        return self

    @classmethod
    def constant(cls, grid: Sequence[float], level: float) -> "FluxProfile":
        return cls(grid=list(map(float, grid)), flux=[float(level)] * len(grid))

    @property
    def times(self) -> np.ndarray:
        return np.asarray(self.grid, dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.flux, dtype=float)


def time_step(grid: Sequence[float]) -> float:
    """
    Common spacing dt of a uniform grid.

    Raises:
        DomainError: If the grid has fewer than two samples or is not uniform
    """
    times = np.asarray(grid, dtype=float)
    if times.size < 2:
        raise DomainError("a uniform grid needs at least two samples to define dt")
    steps = np.diff(times)
    dt = float(steps.mean())
    if np.max(np.abs(steps - dt)) > UNIFORM_GRID_RTOL * abs(dt):
        raise DomainError("flux grid is not uniform")
    return dt


def discretize(flux: FluxProfile) -> np.ndarray:
    """Mean photon number per mode <n_l> = dt <I(t_l)>."""
    return time_step(flux.grid) * flux.values


def _check_aligned(ou: OUProcess, flux: FluxProfile) -> None:
    a, b = ou.times, flux.times
    if a.shape != b.shape or not np.allclose(a, b, rtol=0.0, atol=1e-12 * max(1.0, np.max(np.abs(a)))):
        raise DimensionMismatchError("OU grid and flux grid are not aligned")


def _weight_rows(ou: OUProcess, t_indices: np.ndarray) -> np.ndarray:
    """Rows |Sigma0(t, t')| / Sigma0(t, t), truncated beyond 20 T0."""
    times = ou.times
    t = times[t_indices][:, None]
    weights = np.abs(ou_kernel(ou, t, times[None, :])) / ou.sigma0_var
    weights[np.abs(t - times[None, :]) > KERNEL_TRUNCATION * ou.t_corr] = 0.0
    return weights


def _check_time_index(t_index: int, size: int) -> None:
    if not 0 <= t_index < size:
        raise DomainError(f"t_index {t_index} out of range for a grid of {size} samples")


def h_plus_time_upper(ou: OUProcess, flux: FluxProfile, t_index: int) -> float:
    """
    Covariance-weighted photon number bounding H+(t) from above.

    Rectangle-rule form of (1/Sigma0(t,t)) int dt' |Sigma0(t,t')| <I(t')>.
    """
    _check_aligned(ou, flux)
    _check_time_index(t_index, len(ou.grid))
    photons = discretize(flux)
    return float(_weight_rows(ou, np.asarray([t_index]))[0] @ photons)


def hlimit_from_resource(h_plus_value: float) -> float:
    """1 / (80 lambda^2 H+^2), infinite for zero resource."""
    if h_plus_value <= 0:
        return float("inf")
    return heisenberg_coefficient() / h_plus_value ** 2


def hlimit_time(ou: OUProcess, flux: FluxProfile, t_index: int) -> float:
    """Time-resolved Heisenberg limit on Sigma(t, t) from the weighted-flux resource."""
    return hlimit_from_resource(h_plus_time_upper(ou, flux, t_index))


def time_resolved_limits(ou: OUProcess, flux: FluxProfile) -> pd.DataFrame:
    """h_plus_upper and hlimit at every grid time."""
    _check_aligned(ou, flux)
    photons = discretize(flux)
    resources = _weight_rows(ou, np.arange(len(ou.grid))) @ photons
    return pd.DataFrame({
        "t": ou.times,
        "h_plus_upper": resources,
        "hlimit": [hlimit_from_resource(float(h)) for h in resources],
    }, columns=WAVEFORM_COLUMNS)


def scaling_check(ou: OUProcess, flux_levels: Sequence[float], t_index: Optional[int] = None) -> float:
    """
    Log-log slope of the Heisenberg limit against constant flux level.

    Raises:
        DomainError: With fewer than three levels or nonpositive levels
    """
    levels = np.asarray(flux_levels, dtype=float)
    if levels.size < 3:
        raise DomainError(f"scaling_check needs at least 3 flux levels, got {levels.size}")
    if np.any(levels <= 0) or not np.all(np.isfinite(levels)):
        raise DomainError("flux levels must be positive and finite")

    index = len(ou.grid) // 2 if t_index is None else t_index
    limits = [hlimit_time(ou, FluxProfile.constant(ou.grid, level), index) for level in levels]
    slope, _ = np.polyfit(np.log(levels), np.log(limits), 1)
    return float(slope)
