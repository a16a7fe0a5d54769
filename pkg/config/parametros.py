"""
Parámetros por defecto del laboratorio q-PushASEP y configuración de ejecución.
Los valores numéricos están ajustados para que cada experimento termine
en segundos o pocos minutos en un equipo de escritorio.
"""

import hashlib
import json
from dataclasses import dataclass, field, asdict

from core.errores import ParametrosInvalidosError
from core.modelo import ParametrosPushASEP

# ================================
# PARÁMETROS DEL MODELO
# ================================
PARAMETROS_MODELO = {
    'q': 0.5,                           # parámetro de deformación, 0 < q < 1
    'R': 1.0,                           # intensidad de saltos a la derecha
    'L': 1.0,                           # intensidad de saltos a la izquierda
    'a': [1.0, 1.0, 1.0],               # velocidades a_1..a_N
    't': 0.5,                           # tiempo de observación
}

# ================================
# PARÁMETROS NUMÉRICOS
# ================================
PARAMETROS_NUMERICOS = {
    # Monte Carlo
    'muestras': 10000,
    'semilla': 20141,
    'hilos': 1,

    # Cuadratura de contornos
    'puntos_contorno': 32,
    'tol_contorno': 1e-10,

    # Fredholm
    'puntos_mb': 512,
    'puntos_nystrom': 64,
    'zeta': -0.3,

    # Gaps estacionarios
    'alfa': 0.5,
    'truncacion_gap': 80,

    # Escalamiento
    'eps': 0.2,
    'tau': 0.5,
    'dt': 1e-3,
    'trayectorias_sde': 10000,

    # Verificaciones
    'ensayos_dualidad': 1000,
    'kmax': 8,
}

# Mezcla final
PARAMETROS_DEFAULT = {**PARAMETROS_MODELO, **PARAMETROS_NUMERICOS}

# ================================
# VALIDACIÓN DE PARÁMETROS
# ================================
def validar_parametros(params):
    validaciones = {
        'q': (0.0, 1.0, "q debe estar en (0, 1)"),
        'R': (0.0, 1e3, "R debe estar entre 0 y 1000"),
        'L': (0.0, 1e3, "L debe estar entre 0 y 1000"),
        't': (0.0, 1e4, "El tiempo debe estar entre 0 y 10^4"),
        'muestras': (1, 1e8, "El número de muestras debe estar entre 1 y 10^8"),
        'hilos': (1, 256, "El número de hilos debe estar entre 1 y 256"),
        'puntos_contorno': (16, 4096, "Los puntos por contorno deben estar entre 16 y 4096"),
        'tol_contorno': (1e-15, 1e-2, "La tolerancia de contorno debe estar entre 1e-15 y 1e-2"),
        'puntos_mb': (16, 1e5, "Los puntos de Mellin-Barnes deben estar entre 16 y 10^5"),
        'puntos_nystrom': (4, 4096, "Los puntos de Nyström deben estar entre 4 y 4096"),
        'truncacion_gap': (20, 1e5, "La truncación de la cadena de gap debe ser ≥ 20"),
        'eps': (0.0, 1.0, "ε debe estar en (0, 1)"),
        'dt': (0.0, 1.0, "dt debe estar en (0, 1)"),
        'ensayos_dualidad': (1, 1e7, "Los ensayos de dualidad deben ser ≥ 1"),
        'kmax': (0, 60, "kmax debe estar entre 0 y 60"),
    }
    abiertos = {'q', 'eps', 'dt'}

    for param, (min_val, max_val, mensaje) in validaciones.items():
        if param in params:
            valor = params[param]
            if param in abiertos and not (min_val < valor < max_val):
                raise ParametrosInvalidosError(f"{mensaje}. Valor recibido: {valor}")
            if not (min_val <= valor <= max_val):
                raise ParametrosInvalidosError(f"{mensaje}. Valor recibido: {valor}")

    if params.get('R') == 0 and params.get('L') == 0:
        raise ParametrosInvalidosError("R y L no pueden ser ambos cero. Valor recibido: R=0, L=0")
    if 'a' in params:
        a = list(params['a'])
        if not a:
            raise ParametrosInvalidosError("El vector a no puede estar vacío. Valor recibido: []")
        if any(v <= 0 for v in a):
            raise ParametrosInvalidosError(f"Todas las a_i deben ser positivas. Valor recibido: {a}")
    if 'zeta' in params:
        zeta = complex(params['zeta'])
        if zeta.imag == 0 and zeta.real > 0:
            raise ParametrosInvalidosError(f"ζ no puede ser real positivo. Valor recibido: {zeta}")

    return True

# ================================
# FUNCIÓN PARA OBTENER PARÁMETROS
# ================================
def obtener_parametros(modificaciones=None):
    params = PARAMETROS_DEFAULT.copy()
    params['a'] = list(params['a'])

    if modificaciones:
        params.update({k: v for k, v in modificaciones.items() if v is not None})

    validar_parametros(params)
    return params


def construir_parametros(params):
    """Valor inmutable ParametrosPushASEP a partir del diccionario."""
    return ParametrosPushASEP(q=params['q'], R=params['R'], L=params['L'], a=tuple(params['a']))


# ================================
# CONFIGURACIÓN DE EJECUCIÓN
# ================================
EXPERIMENTOS = (
    'simular', 'momentos-mc', 'momentos-exactos', 'momentos-contorno', 'verificar',
    'fredholm', 'estacionario', 'arreglo2d', 'sde', 'aceptacion',
)


@dataclass
class ConfiguracionEjecucion:
    """Experimento, parámetros validados y destino de la salida."""
    experimento: str
    parametros: dict = field(default_factory=obtener_parametros)
    ajustes: dict = field(default_factory=dict)
    salida: str = None
    formato: str = 'csv'

    def __post_init__(self):
        if self.experimento not in EXPERIMENTOS:
            raise ParametrosInvalidosError(
                f"Experimento '{self.experimento}' desconocido. Disponibles: {list(EXPERIMENTOS)}"
            )
        if self.formato not in ('csv', 'json'):
            raise ParametrosInvalidosError(f"Formato debe ser csv o json. Valor recibido: {self.formato}")
        validar_parametros(self.parametros)

    @property
    def modelo(self):
        return construir_parametros(self.parametros)

    @property
    def semilla(self):
        return int(self.parametros['semilla'])

    def como_dict(self):
        datos = asdict(self)
        datos.pop('salida')
        return datos

    def hash_configuracion(self):
        """sha256 del JSON canónico (claves ordenadas) sin la ruta de salida."""
        canonico = json.dumps(self.como_dict(), sort_keys=True, default=str, separators=(',', ':'))
        return hashlib.sha256(canonico.encode('utf-8')).hexdigest()


def cargar_configuracion(experimento, ruta=None, modificaciones=None, ajustes=None,
                         salida=None, formato='csv'):
    """
    Lee un JSON opcional {"parametros": {...}, "ajustes": {...}} y aplica las modificaciones.

    Las modificaciones con valor None se ignoran (banderas no dadas).
    """
    base = {}
    ajustes_archivo = {}
    if ruta:
        with open(ruta, 'r', encoding='utf-8') as archivo:
            contenido = json.load(archivo)
        base = contenido.get('parametros', {})
        ajustes_archivo = contenido.get('ajustes', {})
    base.update({k: v for k, v in (modificaciones or {}).items() if v is not None})
    ajustes_archivo.update({k: v for k, v in (ajustes or {}).items() if v is not None})
    return ConfiguracionEjecucion(experimento, obtener_parametros(base), ajustes_archivo, salida, formato)
