"""
Módulo de simulación: dinámicas exactas, Monte Carlo y ejecución de experimentos.
"""

from .dinamica import simular_pushasep, simular_dual_ponderado
from .arreglo2d import simular_arreglo2d
from .montecarlo import mc_momento, EstimacionMomento
from .runner import RunnerExperimentos

__all__ = [
    'simular_pushasep',
    'simular_dual_ponderado',
    'simular_arreglo2d',
    'mc_momento',
    'EstimacionMomento',
    'RunnerExperimentos',
]
