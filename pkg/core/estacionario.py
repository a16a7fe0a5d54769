"""
Leyes estacionarias de los gaps: distribución q-geométrica, suma de las
tasas de empuje y la cadena de nacimiento y muerte de un gap.
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from core.errores import ParametrosInvalidosError
from core.funciones_q import qpoch_inf

logger = logging.getLogger(__name__)

TOL_PRODUCTO = 1e-16


@dataclass(frozen=True)
class LeyQGeo:
    """qGeo(β): P(k) = (β; q)_∞ β^k / (q; q)_k, con β ∈ [0, 1)."""
    beta: float
    q: float

    def __post_init__(self):
        if not (0 <= self.beta < 1):
            raise ParametrosInvalidosError(f"β debe estar en [0, 1). Valor recibido: {self.beta}")
        if not (0 < self.q < 1):
            raise ParametrosInvalidosError(f"q debe estar en (0, 1). Valor recibido: {self.q}")

    @classmethod
    def desde_alfa(cls, params, alfa, i=None):
        """qGeo(α/R) o, si se da i, qGeo(α/(R a_i))."""
        escala = params.R if i is None else params.R * params.velocidad(i)
        return cls(alfa / escala, params.q)


def qgeo_pmf(ley, k):
    """Masa de qGeo en k (escalar o arreglo de enteros ≥ 0)."""
    k = np.asarray(k)
    if np.any(k < 0):
        raise ParametrosInvalidosError(f"k debe ser ≥ 0. Valor recibido: {k}")
    kmax = int(np.max(k)) if k.size else 0
    # (q; q)_j acumulado para j = 0..kmax
    qpoch = np.concatenate(([1.0], np.cumprod(1 - ley.q ** np.arange(1, kmax + 1))))
    valores = qpoch_inf(ley.beta, ley.q) * ley.beta ** k / qpoch[k]
    return float(valores) if valores.ndim == 0 else valores


def vector_qgeo(ley, K):
    """(P(0), ..., P(K))."""
    return qgeo_pmf(ley, np.arange(K + 1))


def esperanza_q_gap(ley, K=400):
    """E q^{gap}; igual a 1 - β por el teorema q-binomial."""
    k = np.arange(K + 1)
    return float(np.sum(ley.q ** k * qgeo_pmf(ley, k)))


def _validar_alfa(params, alfa):
    if params.R <= 0:
        raise ParametrosInvalidosError("Las leyes q-geométricas de los gaps requieren R > 0")
    limite = params.R * min(params.a)
    if not (0 < alfa < limite):
        raise ParametrosInvalidosError(
            f"α debe estar en (0, R·min a) = (0, {limite}). Valor recibido: {alfa}"
        )


def suma_tasas_empuje(params, alfa, tol=TOL_PRODUCTO):
    """
    Tasa total de saltos a la izquierda de una partícula, contando los empujes recibidos.

    Σ_j L a_j^{-1} ∏_{m} E q^{gap_m}, recorriendo las partículas a la izquierda
    con las velocidades a repetidas periódicamente y E q^{gap_m} = 1 - α/(R a_m).
    Con a_i ≡ 1 es la serie geométrica L Σ (1 - α/R)^m. El valor debe ser LR/α.
    """
    _validar_alfa(params, alfa)
    total = 0.0
    producto = 1.0
    for a in itertools.cycle(reversed(params.a)):
        total += params.L / a * producto
        producto *= 1 - alfa / (params.R * a)
        if producto < tol:
            break
    return total


# ============================
# CADENA DE UN GAP
# ============================
def tasas_cadena_gap(params, alfa, K):
    """Tasas de subida L y de bajada (LR/α)(1 - q^g) para g = 0..K."""
    g = np.arange(K + 1)
    subida = np.full(K + 1, float(params.L))
    bajada = params.L * params.R / alfa * (1 - params.q ** g)
    return subida, bajada


def generador_cadena_gap(params, alfa, K):
    """Generador de nacimiento y muerte en {0, ..., K} como matriz dispersa."""
    subida, bajada = tasas_cadena_gap(params, alfa, K)
    subida = subida.copy()
    subida[-1] = 0.0
    diagonal = -(subida + bajada)
    return sparse.diags([bajada[1:], diagonal, subida[:-1]], offsets=[-1, 0, 1], format='csr')


def residuo_estacionario_cadena_gap(params, alfa, K=80):
    """max_{k<K} |(π Q)_k| con π = qGeo(α/R) truncada en K."""
    if K < 20:
        raise ParametrosInvalidosError(f"La truncación debe ser K ≥ 20. Valor recibido: {K}")
    _validar_alfa(params, alfa)
    pi = vector_qgeo(LeyQGeo.desde_alfa(params, alfa), K)
    Q = generador_cadena_gap(params, alfa, K)
    residuo = Q.T @ pi
    maximo = float(np.max(np.abs(residuo[:-1])))
    logger.debug("Residuo estacionario de la cadena de gap (K=%d): %.3e", K, maximo)
    return maximo


def residuo_balance_detallado(params, alfa, K=80):
    """max_k |L π(k) - (LR/α)(1 - q^{k+1}) π(k+1)|."""
    _validar_alfa(params, alfa)
    pi = vector_qgeo(LeyQGeo.desde_alfa(params, alfa), K)
    subida, bajada = tasas_cadena_gap(params, alfa, K)
    return float(np.max(np.abs(subida[:-1] * pi[:-1] - bajada[1:] * pi[1:])))
