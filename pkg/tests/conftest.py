"""
Fixtures compartidas de la suite de pruebas.
"""

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest

from core.modelo import ParametrosPushASEP


@pytest.fixture
def params_homogeneos():
    """q = 1/2, R = L = 1, dos partículas con a_i = 1."""
    return ParametrosPushASEP(q=0.5, R=1.0, L=1.0, a=(1.0, 1.0))


@pytest.fixture
def params_velocidades():
    """Tres partículas con velocidades distintas y deriva asimétrica."""
    return ParametrosPushASEP(q=0.4, R=1.3, L=0.7, a=(0.8, 1.0, 1.3))


@pytest.fixture
def params_una_particula():
    return ParametrosPushASEP(q=0.5, R=1.0, L=1.0, a=(1.0,))
