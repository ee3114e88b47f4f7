"""
Pytest configuration and shared fixtures for all tests.

This file contains fixtures that are automatically available to all test modules.
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.prior import GaussianPrior, OUProcess
from src.resource import ProbeSpectrum


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    # Cleanup
    if temp_path.exists():
        shutil.rmtree(temp_path)


@pytest.fixture
def prior_1d():
    """Single phase parameter with prior standard deviation 0.1."""
    return GaussianPrior(mean=[0.0], sigma0=[[0.01]])


@pytest.fixture
def prior_2d():
    """Correlated two-parameter prior."""
    return GaussianPrior(mean=[0.0, 0.0], sigma0=[[2.0, 1.0], [1.0, 2.0]])


@pytest.fixture
def diagonal_prior_3d():
    return GaussianPrior.zero_mean(np.diag([0.5, 1.0, 2.0]))


@pytest.fixture
def noon_spectrum():
    """NOON-like probe: photon number 0 or 10 with equal weight."""
    return ProbeSpectrum.from_arrays([[0.0], [10.0]], [0.5, 0.5])


@pytest.fixture
def product_spectrum_2d():
    """Independent single-photon-or-vacuum modes."""
    return ProbeSpectrum.from_arrays(
        [[0, 0], [1, 0], [0, 1], [1, 1]],
        [0.25, 0.25, 0.25, 0.25],
    )


@pytest.fixture
def ou_process():
    """OU prior on a uniform grid of 201 samples over [0, 10]."""
    return OUProcess(sigma0_var=1.0, t_corr=1.0, grid=np.linspace(0.0, 10.0, 201).tolist())


@pytest.fixture
def sample_prior_dict():
    """Prior matching prior_v1.json."""
    return {"mean": [0.0, 0.0], "sigma0": [[2.0, 1.0], [1.0, 2.0]]}


@pytest.fixture
def sample_spectrum_dict():
    """Spectrum matching spectrum_v1.json."""
    return {
        "dimension": 2,
        "support": [
            {"m": [0, 0], "p": 0.25},
            {"m": [1, 0], "p": 0.25},
            {"m": [0, 1], "p": 0.25},
            {"m": [1, 1], "p": 0.25},
        ],
    }


@pytest.fixture
def sample_ou_dict():
    """OU parameters matching ou_process_v1.json."""
    return {"sigma0_var": 1.0, "t_corr": 0.5, "grid": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]}


@pytest.fixture
def sample_prior_file(temp_dir, sample_prior_dict):
    path = temp_dir / "prior.json"
    with open(path, 'w') as f:
        json.dump(sample_prior_dict, f)
    return path


@pytest.fixture
def sample_spectrum_file(temp_dir, sample_spectrum_dict):
    path = temp_dir / "spectrum.json"
    with open(path, 'w') as f:
        json.dump(sample_spectrum_dict, f)
    return path


@pytest.fixture
def sample_ou_file(temp_dir, sample_ou_dict):
    path = temp_dir / "ou.json"
    with open(path, 'w') as f:
        json.dump(sample_ou_dict, f)
    return path


@pytest.fixture
def sample_flux_file(temp_dir):
    """Constant flux of 100 photons per unit time on the OU fixture grid."""
    path = temp_dir / "flux.csv"
    rows = ["t,flux"] + [f"{0.1 * i:.1f},100" for i in range(6)]
    path.write_text("\n".join(rows) + "\n")
    return path
