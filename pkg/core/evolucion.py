"""
Solución exacta de las ecuaciones de evolución verdaderas.

Se construye el operador dual restringido al nivel Y^N_k como matriz
dispersa A con dh/dt = A h (fila y, columna y' = coeficiente de h(t, y')
en la derivada de h(t, y)) y se calcula la acción de exp(tA) sobre el
dato inicial h(0, y) = H(x0, y).
"""

import logging
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import expm_multiply

from core.errores import DimensionExcedidaError, ParametrosInvalidosError
from core.modelo import (
    EstadoOcupacion,
    MultiIndice,
    coeficientes_dual,
    configuracion_escalon,
    desplazar_ocupacion,
    enumerar_nivel,
    enumerar_movimientos,
    aplicar_movimiento,
    aplicar_generador_dual,
    aplicar_generador_pushasep,
    indice_a_ocupacion,
    observable_H,
    gaps,
    q_potencia,
    ConfiguracionParticulas,
)

logger = logging.getLogger(__name__)

TOPE_DIMENSION = 20000


@dataclass(frozen=True)
class GeneradorDual:
    """Operador dual en la base ordenada de Y^N_k."""
    base: tuple
    indice: dict
    matriz: sparse.csr_matrix
    k: int
    N: int

    @property
    def dimension(self):
        return len(self.base)

    def es_triangular_inferior(self):
        return sparse.triu(self.matriz, k=1).nnz == 0


def _verificar_dimension(k, N, tope):
    dimension = comb(k + N, N)
    if dimension > tope:
        raise DimensionExcedidaError(
            f"dim Y^N_k = C({k}+{N}, {N}) = {dimension} supera el tope {tope}"
        )
    return dimension


def construir_generador_dual(params, k, N=None, tope=TOPE_DIMENSION):
    """
    Matriz del operador dual sobre Y^N_k.

    Las filas de los estados con y_0 > 0 quedan en cero: la regla de
    frontera impone h(t, y) = 0 en ellos.
    """
    N = params.N if N is None else N
    if N != params.N:
        raise ParametrosInvalidosError(f"N={N} no coincide con el número de partículas {params.N}")
    if k < 1 or N < 1:
        raise ParametrosInvalidosError(f"Se requiere k ≥ 1 y N ≥ 1. Valor recibido: k={k}, N={N}")
    dimension = _verificar_dimension(k, N, tope)

    base = tuple(enumerar_nivel(k, N))
    indice = {y: pos for pos, y in enumerate(base)}
    filas, columnas, valores = [], [], []

    for fila, y in enumerate(base):
        if y[0] > 0:
            continue
        estado = EstadoOcupacion(y)
        for (j, i), c in coeficientes_dual(params, estado).items():
            destino = y if (j, i) == (0, 0) else desplazar_ocupacion(estado, j, i).y
            if destino[0] > 0:
                continue
            filas.append(fila)
            columnas.append(indice[destino])
            valores.append(c)

    matriz = sparse.csr_matrix((valores, (filas, columnas)), shape=(dimension, dimension))
    generador = GeneradorDual(base, indice, matriz, k, N)
    if not generador.es_triangular_inferior():
        raise RuntimeError("El generador dual no resultó triangular inferior")
    logger.debug("Generador dual construido: k=%d, N=%d, dimensión=%d, nnz=%d",
                 k, N, dimension, matriz.nnz)
    return generador


def dato_inicial(generador, x0, q):
    """Vector h(0, y) = H(x0, y) en la base del generador."""
    return np.array([observable_H(x0, EstadoOcupacion(y), q) for y in generador.base])


def dato_inicial_aleatorio(generador, configuraciones, q):
    """Promedio ponderado de H(x, ·) sobre [(peso, cfg), ...] (linealidad en el dato inicial)."""
    pesos = np.array([p for p, _ in configuraciones], dtype=float)
    if np.any(pesos < 0) or not np.isclose(pesos.sum(), 1.0):
        raise ParametrosInvalidosError("Los pesos deben ser no negativos y sumar 1")
    total = np.zeros(generador.dimension)
    for peso, cfg in configuraciones:
        total += peso * dato_inicial(generador, cfg, q)
    return total


def resolver_evolucion_verdadera(params, x0, k, t, h0=None, tope=TOPE_DIMENSION, generador=None):
    """
    h(t, ·) = exp(tA) h(0, ·) como diccionario {y: valor}.

    h0 puede ser un diccionario {y: valor} o un vector en la base; si se
    omite se usa H(x0, ·). La acción de la exponencial usa la serie de
    Taylor truncada con escalamiento de scipy (error hacia atrás controlado).
    """
    if t < 0:
        raise ParametrosInvalidosError(f"El tiempo debe ser no negativo. Valor recibido: {t}")
    if generador is None:
        generador = construir_generador_dual(params, k, tope=tope)

    if h0 is None:
        if x0 is None:
            x0 = configuracion_escalon(params.N)
        vector = dato_inicial(generador, x0, params.q)
    elif isinstance(h0, dict):
        vector = np.array([float(h0.get(y, 0.0)) for y in generador.base])
    else:
        vector = np.asarray(h0, dtype=float)
    vector = np.where([y[0] > 0 for y in generador.base], 0.0, vector)

    if t > 0:
        vector = expm_multiply(generador.matriz * t, vector)
    return dict(zip(generador.base, vector))


def momento_exacto(params, n, t, x0=None, tope=TOPE_DIMENSION):
    """E ∏ q^{x_{n_i}(t) + n_i} a partir de h(t, y(n))."""
    if not isinstance(n, MultiIndice):
        n = MultiIndice(tuple(n))
    if n.k == 0:
        return 1.0
    y = indice_a_ocupacion(n, params.N)
    solucion = resolver_evolucion_verdadera(params, x0, n.k, t, tope=tope)
    return float(solucion[y.y])


def momento_primera_particula(params, k, t):
    """E q^{k(x_1(t)+1)} = exp(R a_1 t (q^k - 1) + L a_1^{-1} t (q^{-k} - 1)) desde el escalón."""
    a1 = params.velocidad(1)
    q = params.q
    return float(np.exp(params.R * a1 * t * (q ** k - 1) + params.L / a1 * t * (q ** (-k) - 1)))


# ============================
# IDENTIDAD DE DUALIDAD
# ============================
def _H_formula(x, y, q):
    """H sin validación, con x_0 = +∞ y x_{N+1} = -∞ tratados como límites."""
    if y[0] > 0:
        return 0.0
    return q ** sum((x[i - 1] + i) * y[i] for i in range(1, len(x) + 1))


def _configuracion_aleatoria(rng, N):
    inicio = int(rng.integers(-3, 4))
    brechas = rng.integers(0, 3, size=N - 1)
    x = [inicio]
    for g in brechas:
        x.append(x[-1] - 1 - int(g))
    return ConfiguracionParticulas(tuple(x))


def _ocupacion_aleatoria(rng, N, nivel_max):
    k = int(rng.integers(0, nivel_max + 1))
    y = rng.multinomial(k, np.full(N + 1, 1.0 / (N + 1)))
    # y_0 > 0 deja ambos lados en cero; se conserva solo una fracción de esos casos
    if y[0] > 0 and rng.random() < 0.8:
        y[1] += y[0]
        y[0] = 0
    return EstadoOcupacion(tuple(int(v) for v in y))


def velocidades_de_ensayo(params, N):
    """N velocidades tomadas cíclicamente de params.a."""
    return tuple(params.a[i % params.N] for i in range(N))


def verificar_identidad_dualidad(params, ensayos, semilla, nivel_max=6, N_max=5):
    """
    Compara L^{qP}_x H(x, y) con L^dual_y H(x, y) en pares aleatorios y
    comprueba por separado las cuatro identidades elementales de H.

    Cada ensayo sortea su propio número de partículas N ∈ {1..N_max}; las
    velocidades se toman cíclicamente de params.a.

    Returns:
        dict: residuo_max (relativo a 1 + magnitud), residuos por identidad,
        ensayos y los N sorteados
    """
    if ensayos < 1:
        raise ParametrosInvalidosError(f"ensayos debe ser ≥ 1. Valor recibido: {ensayos}")
    if N_max < 1:
        raise ParametrosInvalidosError(f"N_max debe ser ≥ 1. Valor recibido: {N_max}")
    rng = np.random.default_rng(semilla)
    q = params.q
    residuos = {'dualidad': 0.0, 'salto_derecha': 0.0, 'bloque_izquierda': 0.0,
                'brecha': 0.0, 'bloqueo': 0.0}
    sorteados = set()

    def relativo(a, b, escala):
        return abs(a - b) / (1.0 + escala)

    for _ in range(ensayos):
        N = int(rng.integers(1, N_max + 1))
        sorteados.add(N)
        ensayo = params.con(a=velocidades_de_ensayo(params, N))
        cfg = _configuracion_aleatoria(rng, N)
        y = _ocupacion_aleatoria(rng, N, nivel_max)
        H = observable_H(cfg, y, q)

        lado_x = aplicar_generador_pushasep(ensayo, lambda c: observable_H(c, y, q), cfg)
        lado_y = aplicar_generador_dual(ensayo, lambda w: observable_H(cfg, w, q), y)
        escala = abs(H) + sum(
            m.tasa * (abs(observable_H(aplicar_movimiento(cfg, m), y, q)) + abs(H))
            for m in enumerar_movimientos(ensayo, cfg)
        )
        residuos['dualidad'] = max(residuos['dualidad'], relativo(lado_x, lado_y, escala))

        x = cfg.x
        brechas = gaps(cfg)
        for i in range(1, N + 1):
            x_mas = list(x)
            x_mas[i - 1] += 1
            izquierda = _H_formula(x_mas, y.y, q) - H
            derecha = (q ** y.y[i] - 1) * H
            residuos['salto_derecha'] = max(residuos['salto_derecha'],
                                            relativo(izquierda, derecha, abs(H) + abs(izquierda)))

            for j in range(i, N + 1):
                x_menos = list(x)
                for m in range(i, j + 1):
                    x_menos[m - 1] -= 1
                izquierda = _H_formula(x_menos, y.y, q) - H
                derecha = (q ** (-sum(y.y[i:j + 1])) - 1) * H
                residuos['bloque_izquierda'] = max(residuos['bloque_izquierda'],
                                                   relativo(izquierda, derecha, abs(H) + abs(izquierda)))

            if y.y[i] >= 1:
                izquierda = (1 - q_potencia(q, brechas[i - 1])) * H
                derecha = H - observable_H(cfg, desplazar_ocupacion(y, i, i - 1), q)
                residuos['brecha'] = max(residuos['brecha'], relativo(izquierda, derecha, abs(H)))

            for j in range(i, N + 1):
                if y.y[j] < 1:
                    continue
                arrastre = q ** (x[i - 1] - x[j - 1] - (j - i))
                bloqueo = 1.0 if j == N else 1 - q ** (x[j - 1] - x[j] - 1)
                izquierda = arrastre * bloqueo * H
                primero = observable_H(cfg, desplazar_ocupacion(y, j, i), q)
                if j == N:
                    segundo = 0.0
                else:
                    y_bruto = list(y.y)
                    y_bruto[j + 1] -= 1
                    y_bruto[i] += 1
                    segundo = _H_formula(x, y_bruto, q)
                derecha = primero - segundo
                residuos['bloqueo'] = max(residuos['bloqueo'],
                                          relativo(izquierda, derecha, abs(primero) + abs(segundo)))

    resultado = {'residuo_max': max(residuos.values()), 'ensayos': ensayos,
                 'N_sorteados': tuple(sorted(sorteados))}
    resultado.update({f'residuo_{nombre}': valor for nombre, valor in residuos.items()})
    logger.debug("Identidad de dualidad: %s", resultado)
    return resultado
