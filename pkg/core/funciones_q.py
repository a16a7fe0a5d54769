"""
Funciones q-especiales: símbolos de q-Pochhammer finitos e infinitos.

El producto infinito (a;q)_∞ se trunca en el primer índice m con
|a|·q^m < tol. El error relativo de la cola es entonces del orden de
tol/(1-q), pues log(1 - a q^i) ≈ -a q^i para los factores omitidos.
"""

import numpy as np

from core.errores import ParametrosInvalidosError


TOL_POCHHAMMER = 1e-17
MAX_FACTORES = 100000


def _validar_q(q):
    if not (0 < abs(q) < 1):
        raise ParametrosInvalidosError(f"Se requiere 0 < |q| < 1. Valor recibido: {q}")


def qpoch_finito(a, q, k):
    """(a;q)_k = ∏_{i<k} (1 - a q^i); (a;q)_0 = 1."""
    _validar_q(q)
    if k < 0:
        raise ParametrosInvalidosError(f"k debe ser no negativo. Valor recibido: {k}")
    if k == 0:
        return 1.0 if np.isrealobj(a) else complex(1.0)
    potencias = q ** np.arange(k)
    return np.prod(1.0 - a * potencias)


def numero_factores(a, q, tol=TOL_POCHHAMMER):
    """Número de factores necesarios para que |a|·q^m < tol."""
    _validar_q(q)
    modulo = abs(a)
    if modulo < tol:
        return 0
    m = int(np.ceil(np.log(tol / modulo) / np.log(abs(q)))) + 1
    if m > MAX_FACTORES:
        raise ParametrosInvalidosError(
            f"El producto (a;q)_∞ requiere demasiados factores ({m}). Valor recibido: q={q}"
        )
    return max(m, 0)


def log_qpoch_inf(a, q, tol=TOL_POCHHAMMER):
    """
    Logaritmo de (a;q)_∞ como suma de logaritmos principales.

    Acepta arreglos de numpy para `a`; el resultado es complejo. Cuando
    algún factor se anula el resultado es -inf.
    """
    _validar_q(q)
    a = np.asarray(a, dtype=complex)
    modulo = float(np.max(np.abs(a))) if a.size else 0.0
    m = numero_factores(modulo, q, tol)
    if m == 0:
        return np.zeros_like(a)
    potencias = q ** np.arange(m)
    factores = 1.0 - a[..., None] * potencias
    with np.errstate(divide='ignore'):
        return np.sum(np.log(factores), axis=-1)


def qpoch_inf(a, q, tol=TOL_POCHHAMMER):
    """(a;q)_∞ truncado en el menor m con |a|·q^m < tol."""
    _validar_q(q)
    m = numero_factores(a, q, tol)
    if m == 0:
        return 1.0 if np.isrealobj(a) else complex(1.0)
    potencias = q ** np.arange(m)
    return np.prod(1.0 - a * potencias)


def inverso_qpoch_inf(a, q, tol=TOL_POCHHAMMER):
    """1/(a;q)_∞ evaluado en escala logarítmica para evitar desbordes."""
    a = np.asarray(a, dtype=complex)
    return np.exp(-log_qpoch_inf(a, q, tol))
