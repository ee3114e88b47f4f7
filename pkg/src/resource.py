"""
Probe-side quantities for the quantum bound.

The generator spectrum P_m, the resource H+ (mean absolute deviation of the
projected generator), the resource time tau_F, and the chain of fidelity and
error-probability lower bounds built on them.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from src.errors import DimensionMismatchError, DomainError
from src.specfun import LAMBDA, lambda_fn

NORMALIZATION_TOL = 1e-12
MERGE_TOL = 1e-12


class SupportAtom(BaseModel):
    """One joint eigenvalue vector m of the generators with its probability."""

    model_config = ConfigDict(frozen=True)

    m: List[float]
    p: float

    @field_validator("p")
    @classmethod
    def _check_probability(cls, value: float) -> float:
        if not (np.isfinite(value) and value >= 0):
            raise ValueError(f"probability must be nonnegative, got {value}")
        return value


class ProbeSpectrum(BaseModel):
    """Finite joint distribution P_m over generator eigenvalue vectors m."""

    model_config = ConfigDict(frozen=True)

    dimension: int
    support: List[SupportAtom]

    @model_validator(mode="after")
    def _check_distribution(self) -> "ProbeSpectrum":
        if self.dimension < 1:
            raise ValueError("dimension must be at least 1")
        if not self.support:
            raise ValueError("support must contain at least one atom")
        for i, atom in enumerate(self.support):
            if len(atom.m) != self.dimension:
                raise ValueError(
                    f"support[{i}].m has length {len(atom.m)}, expected {self.dimension}"
                )
        total = sum(atom.p for atom in self.support)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        return self

    @classmethod
    def from_arrays(cls, m: Union[np.ndarray, Sequence], p: Union[np.ndarray, Sequence[float]]) -> "ProbeSpectrum":
        """Build from an (N, K) eigenvalue array and N probabilities."""
        m_arr = np.asarray(m, dtype=float)
        if m_arr.ndim == 1:
            m_arr = m_arr[:, None]
        p_arr = np.asarray(p, dtype=float)
        atoms = [SupportAtom(m=row.tolist(), p=float(prob)) for row, prob in zip(m_arr, p_arr)]
        return cls(dimension=m_arr.shape[1], support=atoms)

    @classmethod
    def from_amplitudes(cls, amplitudes: Union[np.ndarray, Sequence[complex]]) -> "ProbeSpectrum":
        """Single-mode probe sum_m c_m |m> over number states m = 0..D-1."""
        probs = np.abs(np.asarray(amplitudes, dtype=complex)) ** 2
        return cls.from_arrays(np.arange(probs.size, dtype=float), probs)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.asarray([atom.m for atom in self.support], dtype=float)

    @property
    def probabilities(self) -> np.ndarray:
        return np.asarray([atom.p for atom in self.support], dtype=float)


@dataclass(frozen=True)
class ScalarDistribution:
    """Distribution of the projected generator v^T n (ascending support)."""
    values: np.ndarray
    probs: np.ndarray

    def weighted_median(self) -> float:
        """Lower weighted median."""
        cumulative = np.cumsum(self.probs)
        index = int(np.searchsorted(cumulative, 0.5 - NORMALIZATION_TOL, side="left"))
        return float(self.values[min(index, self.values.size - 1)])

    def mean_abs_deviation(self, h0: float) -> float:
        return float(np.sum(self.probs * np.abs(self.values - h0)))

    def as_dict(self) -> dict:
        return {float(s): float(p) for s, p in zip(self.values, self.probs)}


@dataclass(frozen=True)
class ResourceSummary:
    """Resource H+ = <|v^T n - H0|>, the offset H0 used, and tau_F = 1/(2 lambda H+)."""
    h_plus: float
    h0: float
    tau_f: float


def _projection_vector(spec: ProbeSpectrum, v: Union[Sequence[float], np.ndarray]) -> np.ndarray:
    vec = np.asarray(v, dtype=float).ravel()
    if vec.shape[0] != spec.dimension:
        raise DimensionMismatchError(
            f"v has length {vec.shape[0]}, spectrum dimension is {spec.dimension}"
        )
    return vec


def project(spec: ProbeSpectrum, v: Union[Sequence[float], np.ndarray]) -> ScalarDistribution:
    """
    Marginal distribution of s = v^T m under P_m.

    Values closer than 1e-12 are merged into one atom.
    """
    vec = _projection_vector(spec, v)
    s = spec.eigenvalues @ vec
    p = spec.probabilities
    order = np.argsort(s, kind="stable")
    s, p = s[order], p[order]

    values: List[float] = []
    probs: List[float] = []
    for value, prob in zip(s, p):
        if values and abs(value - values[-1]) <= MERGE_TOL:
            probs[-1] += prob
        else:
            values.append(float(value))
            probs.append(float(prob))
    return ScalarDistribution(values=np.asarray(values), probs=np.asarray(probs))


def tau_f_from_h_plus(h_plus: float) -> float:
    """tau_F = 1 / (2 lambda H+), infinite when H+ = 0."""
    if h_plus <= 0:
        return float("inf")
    return 1.0 / (2.0 * LAMBDA * h_plus)


def h_plus(spec: ProbeSpectrum, v: Union[Sequence[float], np.ndarray],
           h0: Optional[float] = None) -> ResourceSummary:
    """
    Resource H+ = sum_m P_m |v^T m - H0| and the resulting tau_F.

    Args:
        spec: Generator spectrum
        v: Projection vector
        h0: Offset H0; the lower weighted median of v^T n when omitted

    Returns:
        ResourceSummary
    """
    dist = project(spec, v)
    offset = dist.weighted_median() if h0 is None else float(h0)
    resource = dist.mean_abs_deviation(offset)
    return ResourceSummary(h_plus=resource, h0=offset, tau_f=tau_f_from_h_plus(resource))


def char_fn_fidelity_lb(spec: ProbeSpectrum, v: Union[Sequence[float], np.ndarray], tau: float) -> float:
    """Fidelity lower bound |<exp(i tau v^T n)>|^2 from the characteristic function."""
    if not np.isfinite(tau):
        raise DomainError(f"tau must be finite, got {tau}")
    dist = project(spec, v)
    value = abs(np.sum(dist.probs * np.exp(1j * tau * dist.values))) ** 2
    return float(min(max(value, 0.0), 1.0))


def exact_pure_fidelity(spec: ProbeSpectrum, v: Union[Sequence[float], np.ndarray], tau: float) -> float:
    """
    Fidelity |<psi| exp(i tau v^T n) |psi>|^2 of a pure probe and its shifted copy.

    Evaluated as a state-vector overlap on the unmerged support.
    """
    if not np.isfinite(tau):
        raise DomainError(f"tau must be finite, got {tau}")
    vec = _projection_vector(spec, v)
    psi = np.sqrt(spec.probabilities).astype(complex)
    shifted = np.exp(1j * tau * (spec.eigenvalues @ vec)) * psi
    return float(abs(np.vdot(psi, shifted)) ** 2)


def fidelity_lb_truncated(summary: ResourceSummary, tau: float) -> float:
    """F >= Lambda(tau / tau_F) = max(1 - 2 lambda H+ tau, 0)."""
    if not tau >= 0:
        raise DomainError(f"tau must be nonnegative, got {tau}")
    if np.isinf(summary.tau_f):
        return 1.0
    return lambda_fn(tau / summary.tau_f)


def pe_lb_quantum(fidelity_lb: float) -> float:
    """Error-probability bound P_e >= (1 - sqrt(1 - F)) / 2."""
    if not 0.0 <= fidelity_lb <= 1.0:
        raise DomainError(f"fidelity must lie in [0, 1], got {fidelity_lb}")
    return float(0.5 * (1.0 - np.sqrt(1.0 - fidelity_lb)))


def pe_lb_chain(summary: ResourceSummary, tau: float) -> float:
    """Composed quantum bound (1 - sqrt(min(tau/tau_F, 1))) / 2."""
    return pe_lb_quantum(fidelity_lb_truncated(summary, tau))


def cosine_bound_gap(theta: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Slack cos(theta) - (1 - lambda |theta|); nonnegative everywhere."""
    theta = np.asarray(theta, dtype=float)
    gap = np.cos(theta) - (1.0 - LAMBDA * np.abs(theta))
    return float(gap) if gap.ndim == 0 else gap
