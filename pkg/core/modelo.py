"""
Modelo q-PushASEP: tipos del dominio, observable de dualidad H y los tres
generadores (q-PushASEP, dual y dual de Markov).

Convenciones:
1. Las partículas se indexan 1..N de derecha a izquierda, x_1 > ... > x_N.
2. gap_1 es +∞ (partícula virtual x_0 = +∞) y q^{+∞} = 0.
3. Las coordenadas duales son y = (y_0, ..., y_N) con y_i ≥ 0.
4. Movimientos: ('derecha', i) mueve x_i una posición a la derecha;
   ('izquierda', i, j) mueve x_i, ..., x_j una posición a la izquierda.
"""

import math
import itertools
from dataclasses import dataclass, field

import numpy as np

from core.errores import ParametrosInvalidosError


INFINITO = math.inf


# ============================
# TIPOS DEL DOMINIO
# ============================
@dataclass(frozen=True)
class ParametrosPushASEP:
    """Parámetros (q, R, L, a_1..a_N) del sistema de partículas."""
    q: float
    R: float
    L: float
    a: tuple

    def __post_init__(self):
        object.__setattr__(self, 'a', tuple(float(v) for v in self.a))
        if not (0 < self.q < 1):
            raise ParametrosInvalidosError(f"q debe estar en (0, 1). Valor recibido: {self.q}")
        if self.R < 0 or self.L < 0:
            raise ParametrosInvalidosError(
                f"R y L deben ser no negativos. Valor recibido: R={self.R}, L={self.L}"
            )
        if self.R == 0 and self.L == 0:
            raise ParametrosInvalidosError("R y L no pueden ser ambos cero")
        if len(self.a) == 0:
            raise ParametrosInvalidosError("Se requiere al menos una partícula (vector a vacío)")
        if any(v <= 0 for v in self.a):
            raise ParametrosInvalidosError(f"Todas las a_i deben ser positivas. Valor recibido: {self.a}")

    @property
    def N(self):
        return len(self.a)

    def velocidad(self, i):
        """a_i con índice 1-based."""
        return self.a[i - 1]

    def con(self, **cambios):
        """Copia con campos reemplazados."""
        datos = {'q': self.q, 'R': self.R, 'L': self.L, 'a': self.a}
        datos.update(cambios)
        return ParametrosPushASEP(**datos)


@dataclass(frozen=True)
class ConfiguracionParticulas:
    """Posiciones x_1 > x_2 > ... > x_N."""
    x: tuple

    def __post_init__(self):
        object.__setattr__(self, 'x', tuple(int(v) for v in self.x))
        for anterior, siguiente in zip(self.x, self.x[1:]):
            if not anterior > siguiente:
                raise ParametrosInvalidosError(
                    f"Las posiciones deben ser estrictamente decrecientes. Valor recibido: {self.x}"
                )

    @property
    def N(self):
        return len(self.x)

    def posicion(self, i):
        """x_i con centinelas x_0 = +∞ y x_{N+1} = -∞."""
        if i == 0:
            return INFINITO
        if i == self.N + 1:
            return -INFINITO
        return self.x[i - 1]


@dataclass(frozen=True)
class EstadoOcupacion:
    """Coordenadas duales (y_0, ..., y_N), nivel k = Σ y_i."""
    y: tuple

    def __post_init__(self):
        object.__setattr__(self, 'y', tuple(int(v) for v in self.y))
        if any(v < 0 for v in self.y):
            raise ParametrosInvalidosError(f"Las ocupaciones deben ser no negativas. Valor recibido: {self.y}")

    @property
    def N(self):
        return len(self.y) - 1

    @property
    def nivel(self):
        return sum(self.y)


@dataclass(frozen=True)
class MultiIndice:
    """Índice n = (n_1, ..., n_k) de un momento conjunto."""
    n: tuple
    weyl: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'n', tuple(int(v) for v in self.n))
        if any(v < 0 for v in self.n):
            raise ParametrosInvalidosError(f"Los índices deben ser no negativos. Valor recibido: {self.n}")
        if self.weyl and any(a < b for a, b in zip(self.n, self.n[1:])):
            raise ParametrosInvalidosError(
                f"El índice no pertenece a la cámara de Weyl (debe ser débilmente decreciente). "
                f"Valor recibido: {self.n}"
            )

    @property
    def k(self):
        return len(self.n)


@dataclass(frozen=True)
class Movimiento:
    """Salto a la derecha de x_i, o bloque x_i..x_j hacia la izquierda."""
    tipo: str
    i: int
    j: int = field(default=None)
    tasa: float = 0.0

    def __post_init__(self):
        if self.tipo not in ('derecha', 'izquierda'):
            raise ParametrosInvalidosError(f"Tipo de movimiento desconocido: {self.tipo}")
        if self.j is None:
            object.__setattr__(self, 'j', self.i)
        if self.tipo == 'derecha' and self.j != self.i:
            raise ParametrosInvalidosError("Un salto a la derecha involucra una sola partícula")
        if self.j < self.i:
            raise ParametrosInvalidosError(f"Bloque inválido: i={self.i}, j={self.j}")

    @property
    def clave(self):
        return (self.tipo, self.i, self.j)


def configuracion_escalon(N):
    """Condición inicial escalón x_i = -i."""
    return ConfiguracionParticulas(tuple(-i for i in range(1, N + 1)))


# ============================
# FUNCIONES BÁSICAS
# ============================
def q_potencia(q, exponente):
    """q^e con la convención q^{+∞} = 0."""
    if exponente == INFINITO:
        return 0.0
    return q ** exponente


def gaps(cfg):
    """gap_i = x_{i-1} - x_i - 1 con gap_1 = +∞."""
    return [INFINITO] + [cfg.x[i - 1] - cfg.x[i] - 1 for i in range(1, cfg.N)]


def observable_H(cfg, y, q):
    """H(x, y) = ∏_{i=0}^N q^{(x_i + i) y_i}, nulo si y_0 > 0."""
    if len(y.y) != cfg.N + 1:
        raise ParametrosInvalidosError(
            f"Dimensiones incompatibles: N={cfg.N}, y de longitud {len(y.y)}"
        )
    if y.y[0] > 0:
        return 0.0
    exponente = sum((cfg.x[i - 1] + i) * y.y[i] for i in range(1, cfg.N + 1))
    return q ** exponente


def indice_a_ocupacion(n, N):
    """y_i(n) = |{j : n_j = i}|."""
    if not n.weyl:
        raise ParametrosInvalidosError(f"Se requiere un índice de la cámara de Weyl. Valor recibido: {n.n}")
    if any(v > N for v in n.n):
        raise ParametrosInvalidosError(f"Los índices deben ser ≤ N={N}. Valor recibido: {n.n}")
    y = [0] * (N + 1)
    for v in n.n:
        y[v] += 1
    return EstadoOcupacion(tuple(y))


def ocupacion_a_indice(y):
    """Inversa de indice_a_ocupacion: n débilmente decreciente."""
    n = []
    for i in range(y.N, -1, -1):
        n.extend([i] * y.y[i])
    return MultiIndice(tuple(n))


def enumerar_nivel(k, N):
    """
    Base de Y^N_k ordenada lexicográficamente en (y_N, ..., y_0), de menor a mayor.

    Cada movimiento del operador dual lleva masa hacia índices menores y,
    por tanto, a un estado anterior en este orden.
    """
    estados = []
    for combinacion in itertools.combinations_with_replacement(range(N + 1), k):
        y = [0] * (N + 1)
        for v in combinacion:
            y[v] += 1
        estados.append(tuple(y))
    estados.sort(key=lambda y: y[::-1])
    return estados


# ============================
# GENERADOR q-PushASEP
# ============================
def enumerar_movimientos(params, cfg):
    """Movimientos con tasa positiva desde cfg según el generador del q-PushASEP."""
    if cfg.N != params.N:
        raise ParametrosInvalidosError(f"La configuración tiene {cfg.N} partículas y los parámetros {params.N}")
    q = params.q
    brechas = gaps(cfg)
    movimientos = []

    for i in range(1, params.N + 1):
        tasa = params.R * params.velocidad(i) * (1.0 - q_potencia(q, brechas[i - 1]))
        if tasa > 0:
            movimientos.append(Movimiento('derecha', i, i, tasa))

    if params.L > 0:
        for i in range(1, params.N + 1):
            arrastre = 1.0
            for j in range(i, params.N + 1):
                if j > i:
                    arrastre *= q_potencia(q, brechas[j - 1])
                if j < params.N:
                    bloqueo = 1.0 - q_potencia(q, brechas[j])
                else:
                    bloqueo = 1.0
                tasa = params.L / params.velocidad(i) * arrastre * bloqueo
                if tasa > 0:
                    movimientos.append(Movimiento('izquierda', i, j, tasa))
    return movimientos


def aplicar_movimiento(cfg, movimiento):
    """Configuración resultante de un movimiento."""
    x = list(cfg.x)
    if movimiento.tipo == 'derecha':
        x[movimiento.i - 1] += 1
    else:
        for m in range(movimiento.i, movimiento.j + 1):
            x[m - 1] -= 1
    return ConfiguracionParticulas(tuple(x))


def aplicar_generador_pushasep(params, f, cfg):
    """Σ tasa·(f(cfg') - f(cfg)) sobre los movimientos desde cfg."""
    valor_actual = f(cfg)
    return sum(
        mov.tasa * (f(aplicar_movimiento(cfg, mov)) - valor_actual)
        for mov in enumerar_movimientos(params, cfg)
    )


# ============================
# GENERADORES DUALES
# ============================
def desplazar_ocupacion(y, j, i):
    """y^{j,i}: una unidad de y_j pasa a y_i."""
    nuevo = list(y.y)
    nuevo[j] -= 1
    nuevo[i] += 1
    return EstadoOcupacion(tuple(nuevo))


def _colas(y):
    """colas[i] = y_i + ... + y_N."""
    return np.cumsum(y.y[::-1])[::-1]


def coeficientes_dual(params, y):
    """
    Términos del operador dual como lista de ((j, i), coeficiente).

    (i, i-1) corresponde a la parte q-TASEP con la diferencia g(y^{i,i-1}) - g(y)
    ya expandida; (j, i) con j ≥ i a la parte q-PushTASEP, que multiplica
    g(y^{j,i}) directamente. La clave (0, 0) representa el término en g(y).
    """
    q = params.q
    terminos = {}
    for i in range(1, params.N + 1):
        if y.y[i] == 0:
            continue
        c = params.R * params.velocidad(i) * (1.0 - q ** y.y[i])
        if c != 0:
            terminos[(i, i - 1)] = terminos.get((i, i - 1), 0.0) + c
            terminos[(0, 0)] = terminos.get((0, 0), 0.0) - c

    if params.L > 0:
        for i in range(1, params.N + 1):
            acumulado = 0
            for j in range(i, params.N + 1):
                if y.y[j] > 0:
                    c = (params.L / params.velocidad(i)
                         * (q ** (-y.y[j]) - 1.0) * q ** (-acumulado))
                    clave = (0, 0) if j == i else (j, i)
                    terminos[clave] = terminos.get(clave, 0.0) + c
                acumulado += y.y[j]
    return terminos


def aplicar_generador_dual(params, g, y):
    """Acción del operador dual sobre g en el estado y."""
    if y.N != params.N:
        raise ParametrosInvalidosError(f"El estado tiene N={y.N} y los parámetros N={params.N}")
    total = 0.0
    for (j, i), c in coeficientes_dual(params, y).items():
        destino = y if (j, i) == (0, 0) else desplazar_ocupacion(y, j, i)
        total += c * g(destino)
    return total


def tasa_salida_C(params, y):
    """C(y) = Σ_i L a_i^{-1} (q^{-y_i-...-y_N} - 1), igual a la acción del operador dual sobre 1."""
    colas = _colas(y)
    return float(sum(
        params.L / params.velocidad(i) * (params.q ** (-int(colas[i])) - 1.0)
        for i in range(1, params.N + 1)
    ))


def tasas_dual_markov(params, y):
    """Transiciones ((j, i), tasa): una unidad pasa del sitio j al sitio i < j."""
    q = params.q
    transiciones = []
    for i in range(1, params.N + 1):
        if y.y[i] > 0 and params.R > 0:
            transiciones.append(((i, i - 1), params.R * params.velocidad(i) * (1.0 - q ** y.y[i])))
    if params.L > 0:
        for i in range(1, params.N + 1):
            acumulado = y.y[i]
            for j in range(i + 1, params.N + 1):
                if y.y[j] > 0:
                    tasa = params.L / params.velocidad(i) * (q ** (-y.y[j]) - 1.0) * q ** (-acumulado)
                    transiciones.append(((j, i), tasa))
                acumulado += y.y[j]
    return transiciones


def aplicar_generador_dual_markov(params, g, y):
    """(L^dual g)(y) - C(y) g(y)."""
    return aplicar_generador_dual(params, g, y) - tasa_salida_C(params, y) * g(y)
