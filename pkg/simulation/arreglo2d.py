"""
Dinámica de dos lados sobre arreglos triangulares entrelazados λ^{(k)}_j, 1 ≤ j ≤ k ≤ N.

Saltos a la derecha: cada λ^{(k)}_j salta con tasa

    R a_k (1 - q^{λ^{(k-1)}_{j-1} - λ^{(k)}_j})(1 - q^{λ^{(k)}_j - λ^{(k)}_{j+1} + 1})
          / (1 - q^{λ^{(k)}_j - λ^{(k-1)}_j + 1}),

y si rompe el entrelazado empuja hacia arriba a λ^{(k+1)}_j, λ^{(k+2)}_j, ...
Saltos a la izquierda: solo λ^{(k)}_k con tasa L / a_k; cada partícula que
se mueve a la izquierda fuerza a λ^{(k+1)}_{j+1} (probabilidad ℓ) o a
λ^{(k+1)}_j (probabilidad 1 - ℓ) hasta el nivel N. Los factores (1 - q^{...})
con índices inexistentes valen 1.
"""

import logging
from dataclasses import dataclass

import numpy as np

from core.errores import ParametrosInvalidosError
from simulation.dinamica import _como_generador

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ArregloEntrelazado:
    """niveles[k-1][j-1] = λ^{(k)}_j."""
    niveles: tuple

    def __post_init__(self):
        niveles = tuple(tuple(int(v) for v in fila) for fila in self.niveles)
        object.__setattr__(self, 'niveles', niveles)
        for k, fila in enumerate(niveles, start=1):
            if len(fila) != k:
                raise ParametrosInvalidosError(f"El nivel {k} debe tener {k} entradas. Valor recibido: {fila}")
        if not self.es_entrelazado():
            raise ParametrosInvalidosError(f"El arreglo no está entrelazado: {niveles}")

    @property
    def N(self):
        return len(self.niveles)

    def valor(self, k, j):
        return self.niveles[k - 1][j - 1]

    def es_entrelazado(self):
        """λ^{(k)}_j ≤ λ^{(k-1)}_{j-1} ≤ λ^{(k)}_{j-1} para todos los índices válidos."""
        for k in range(2, len(self.niveles) + 1):
            for j in range(2, k + 1):
                inferior = self.niveles[k - 2][j - 2]
                if not (self.niveles[k - 1][j - 1] <= inferior <= self.niveles[k - 1][j - 2]):
                    return False
        return True

    def marginal_izquierda(self):
        """x_n = λ^{(n)}_n - n para n = 1..N."""
        return tuple(self.niveles[n - 1][n - 1] - n for n in range(1, self.N + 1))


def arreglo_empaquetado(N):
    return ArregloEntrelazado(tuple((0,) * k for k in range(1, N + 1)))


def _existe(k, j):
    return k >= 1 and 1 <= j <= k


def tasa_salto_derecha(params, lam, k, j):
    q = params.q
    valor = lam[k - 1][j - 1]
    tasa = params.R * params.velocidad(k)
    if _existe(k - 1, j - 1):
        tasa *= 1 - q ** (lam[k - 2][j - 2] - valor)
    if _existe(k, j + 1):
        tasa *= 1 - q ** (valor - lam[k - 1][j] + 1)
    if _existe(k - 1, j):
        tasa /= 1 - q ** (valor - lam[k - 2][j - 1] + 1)
    return tasa


def probabilidad_empuje_izquierda(params, lam, k, j, valor_previo):
    """
    ℓ para el movimiento de λ^{(k)}_j (posición previa valor_previo) sobre el nivel k + 1.

    El caso 0/0 solo aparece cuando λ^{(k+1)}_{j+1} coincide con la posición
    previa, y entonces el empuje de λ^{(k+1)}_{j+1} es forzoso.
    """
    q = params.q
    arriba = lam[k][j]
    ell = q ** (valor_previo - arriba)
    if _existe(k, j + 1):
        vecino = lam[k - 1][j]
        numerador = 1 - q ** (arriba - vecino)
        denominador = 1 - q ** (valor_previo - vecino)
        if denominador == 0:
            return 1.0
        ell *= numerador / denominador
    return ell


def _afectados(movidos, N):
    """Partículas cuya tasa de salto a la derecha depende de alguna movida."""
    conjunto = set()
    for k, j in movidos:
        for kk, jj in ((k, j), (k, j - 1), (k + 1, j), (k + 1, j + 1)):
            if kk <= N and _existe(kk, jj):
                conjunto.add((kk, jj))
    return conjunto


def simular_arreglo2d(params, t, semilla, validar=False):
    """
    Arreglo en el tiempo t desde la condición densamente empaquetada (método directo).

    validar=True comprueba el entrelazado tras cada evento.
    """
    if t < 0:
        raise ParametrosInvalidosError(f"El tiempo debe ser no negativo. Valor recibido: {t}")
    rng = _como_generador(semilla)
    N = params.N
    lam = [[0] * k for k in range(1, N + 1)]
    canales = [(k, j) for k in range(1, N + 1) for j in range(1, k + 1)]
    posicion = {c: p for p, c in enumerate(canales)}
    tasas = np.array([tasa_salto_derecha(params, lam, k, j) for k, j in canales]
                     + [params.L / params.velocidad(k) for k in range(1, N + 1)])
    tiempo = 0.0
    eventos = 0

    while True:
        total = tasas.sum()
        if total <= 0:
            break
        tiempo += rng.exponential() / total
        if tiempo > t:
            break
        canal = int(np.searchsorted(np.cumsum(tasas), rng.random() * total, side='right'))
        canal = min(canal, len(tasas) - 1)
        movidos = []
        if canal < len(canales):
            k, j = canales[canal]
            lam[k - 1][j - 1] += 1
            movidos.append((k, j))
            for m in range(k + 1, N + 1):
                if lam[m - 1][j - 1] < lam[m - 2][j - 1]:
                    lam[m - 1][j - 1] += 1
                    movidos.append((m, j))
                else:
                    break
        else:
            k = canal - len(canales) + 1
            j = k
            previo = lam[k - 1][j - 1]
            lam[k - 1][j - 1] -= 1
            movidos.append((k, j))
            while k < N:
                ell = probabilidad_empuje_izquierda(params, lam, k, j, previo)
                j = j + 1 if rng.random() < ell else j
                k += 1
                previo = lam[k - 1][j - 1]
                lam[k - 1][j - 1] -= 1
                movidos.append((k, j))
        eventos += 1
        for kk, jj in _afectados(movidos, N):
            tasas[posicion[(kk, jj)]] = tasa_salto_derecha(params, lam, kk, jj)
        if validar:
            ArregloEntrelazado(tuple(tuple(f) for f in lam))

    logger.debug("Arreglo 2D: %d eventos hasta t=%g", eventos, t)
    return ArregloEntrelazado(tuple(tuple(f) for f in lam))
