"""
Special functions and universal constants shared by every bound.

Provides the complementary error function, the cosine-bound slope lambda
(and its angle phi), and the truncation function Lambda.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy import optimize, special

from src.errors import DomainError

ArrayLike = Union[float, np.ndarray]

# Bracket for tan(phi/2) - phi; the root lies near 2.3311.
_PHI_BRACKET = (1.6, 3.1)


@dataclass(frozen=True)
class LambdaConstant:
    """Solution of lambda = sin(phi) = (1 - cos(phi)) / phi."""
    phi: float
    lam: float

    def residual(self) -> float:
        """|tan(phi/2) - phi| at the stored angle."""
        return abs(math.tan(self.phi / 2.0) - self.phi)


def erfc_std(z: ArrayLike) -> ArrayLike:
    """
    Standard complementary error function (2/sqrt(pi)) * int_z^inf exp(-t^2) dt.

    Args:
        z: Finite real scalar or array

    Returns:
        erfc(z), same shape as the input

    Raises:
        DomainError: If any input is NaN or infinite
    """
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"erfc_std requires finite input, got {z!r}")
    result = special.erfc(arr)
    if np.ndim(result) == 0:
        return float(result)
    return result


def _half_angle_residual(phi: float) -> float:
    return math.tan(phi / 2.0) - phi


@lru_cache(maxsize=None)
def solve_lambda(tol: float = 1e-12) -> LambdaConstant:
    """
    Solve lambda = sin(phi) = (1 - cos(phi))/phi by bisection.

    The two defining identities reduce to tan(phi/2) = phi, which has a single
    root in (1.6, 3.1).

    Args:
        tol: Required bound on |tan(phi/2) - phi|

    Returns:
        LambdaConstant with phi and lam = sin(phi)
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")

    xtol = tol / 10.0
    while True:
        phi = optimize.bisect(_half_angle_residual, *_PHI_BRACKET,
                              xtol=xtol, maxiter=200)
        if abs(_half_angle_residual(phi)) < tol or xtol < 1e-300:
            break
        xtol /= 10.0

    return LambdaConstant(phi=float(phi), lam=float(math.sin(phi)))


def lambda_fn(r: float) -> float:
    """
    Truncation function Lambda(r) = max(1 - r, 0).

    Raises:
        DomainError: If r is negative or NaN
    """
    if not r >= 0:
        raise DomainError(f"lambda_fn requires r >= 0, got {r}")
    return max(1.0 - r, 0.0)


LAMBDA_CONSTANT = solve_lambda(1e-12)
LAMBDA = LAMBDA_CONSTANT.lam
PHI = LAMBDA_CONSTANT.phi
