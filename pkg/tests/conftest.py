"""
Pytest configuration and shared fixtures for the FRBE laboratory tests
"""
import pytest
import sys
import os

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.frbe import FrbeParams
from core.scenarios import get_catalog


@pytest.fixture(scope="session")
def project_root():
    """Get project root directory."""
    return os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


@pytest.fixture(scope="session")
def catalog():
    """Preset catalog."""
    return get_catalog()


@pytest.fixture(scope="session")
def lrd_model(catalog):
    """Pure long memory, kappa0 = 0.5."""
    return catalog.get_model("lrd_k05")


@pytest.fixture(scope="session")
def cyclic_model(catalog):
    """One cyclic pair at w = 1, kappa = 0.5."""
    return catalog.get_model("cyclic_w1")


@pytest.fixture(scope="session")
def mixed_model(catalog):
    """Long memory plus two cyclic pairs."""
    return catalog.get_model("mixed")


@pytest.fixture(scope="session")
def rv_model(catalog):
    """Pure long memory with a logarithmic slowly varying factor."""
    return catalog.get_model("lrd_log")


@pytest.fixture(scope="session")
def example_params():
    """alpha = 1, beta = 1/2, gamma = 1, mu = 1."""
    return FrbeParams(alpha=1.0, beta=0.5, gamma=1.0, mu=1.0)


@pytest.fixture(scope="session")
def exponential_params():
    """beta = 1: the kernel is an exponential."""
    return FrbeParams(alpha=1.0, beta=1.0, gamma=1.0, mu=1.0)
