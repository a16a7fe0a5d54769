"""
Jerarquía de excepciones del laboratorio q-PushASEP.

Las excepciones de validación heredan también de ValueError y las de
cálculo numérico de RuntimeError, de modo que el código que ya captura
esas excepciones estándar sigue funcionando.
"""


class ErrorLaboratorio(Exception):
    """Excepción base de todos los errores del laboratorio."""


class ParametrosInvalidosError(ErrorLaboratorio, ValueError):
    """Parámetros o entradas fuera de su dominio válido."""


class DimensionExcedidaError(ErrorLaboratorio, ValueError):
    """El espacio de estados del sistema dual supera el tope configurado."""


class GeometriaContornoError(ErrorLaboratorio, ValueError):
    """No existe una familia de contornos anidados con la geometría pedida."""


class NoConvergenciaError(ErrorLaboratorio, RuntimeError):
    """Una cuadratura adaptativa agotó sus duplicaciones sin converger."""


class PresupuestoExcedidoError(ErrorLaboratorio, RuntimeError):
    """La simulación pedida excede el presupuesto de eventos."""
