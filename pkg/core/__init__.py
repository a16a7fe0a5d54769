"""
Módulo central: modelo q-PushASEP, evolución exacta, contornos,
Fredholm, leyes estacionarias y límite de escala.
"""

from .modelo import (
    ParametrosPushASEP,
    ConfiguracionParticulas,
    EstadoOcupacion,
    MultiIndice,
    Movimiento,
    configuracion_escalon,
    observable_H,
)
from .evolucion import momento_exacto, resolver_evolucion_verdadera
from .contorno import momento_contorno, construir_contornos
from .fredholm import EspecificacionNucleo, determinante_fredholm
from .estacionario import LeyQGeo, suma_tasas_empuje
from .escalamiento import ParametrosEscalamiento, simular_jerarquia_sde

__all__ = [
    'ParametrosPushASEP',
    'ConfiguracionParticulas',
    'EstadoOcupacion',
    'MultiIndice',
    'Movimiento',
    'configuracion_escalon',
    'observable_H',
    'momento_exacto',
    'resolver_evolucion_verdadera',
    'momento_contorno',
    'construir_contornos',
    'EspecificacionNucleo',
    'determinante_fredholm',
    'LeyQGeo',
    'suma_tasas_empuje',
    'ParametrosEscalamiento',
    'simular_jerarquia_sde',
]
