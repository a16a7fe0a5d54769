"""
Módulo de configuración del laboratorio.
"""

from .parametros import (
    PARAMETROS_DEFAULT,
    obtener_parametros,
    validar_parametros,
    construir_parametros,
    cargar_configuracion,
    ConfiguracionEjecucion,
)

from .escenarios import (
    ESCENARIOS,
    obtener_escenario,
    listar_escenarios,
    tabla_escenarios,
    crear_escenario_personalizado,
)

__all__ = [
    'PARAMETROS_DEFAULT',
    'obtener_parametros',
    'validar_parametros',
    'construir_parametros',
    'cargar_configuracion',
    'ConfiguracionEjecucion',
    'ESCENARIOS',
    'obtener_escenario',
    'listar_escenarios',
    'tabla_escenarios',
    'crear_escenario_personalizado',
]
