"""
Shared fixtures for the GvM symmetry toolkit tests
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the repository root to the path so that `src` and `main` import
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.inference.likelihood import FixedNuisance  # noqa: E402


@pytest.fixture
def rng():
    """Seeded generator for test data"""
    return np.random.default_rng(20210426)


@pytest.fixture
def delta_nuisance():
    """Nuisance values of the delta-test study cases"""
    return FixedNuisance.for_delta_test(mu1=math.pi, kappa1=0.1, kappa2=5.5)


@pytest.fixture
def kappa2_nuisance():
    """Nuisance values of the kappa2-test study case"""
    return FixedNuisance.for_kappa2_test(mu1=math.pi, mu2=math.pi / 2, kappa1=0.1)
