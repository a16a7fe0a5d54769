"""
Estimadores de Monte Carlo sobre trayectorias independientes.

Cada trayectoria usa su propio generador derivado de (semilla, índice),
de modo que el resultado no depende del número de hilos. Las
trayectorias se agrupan en bloques de tamaño fijo que se concatenan en
orden antes de calcular media y error estándar.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import stats

from core.errores import ParametrosInvalidosError
from core.escalamiento import (
    reescalar_pushasep,
    simular_jerarquia_sde,
    tiempo_microscopico,
    verificar_presupuesto,
    parametros_desde_escalamiento,
)
from core.estacionario import LeyQGeo, qgeo_pmf
from core.funciones_q import inverso_qpoch_inf
from core.modelo import MultiIndice, configuracion_escalon, observable_H
from simulation.arreglo2d import simular_arreglo2d
from simulation.dinamica import (
    generador_trayectoria,
    simular_cadena_gap,
    simular_dual_ponderado,
    simular_pushasep,
)

logger = logging.getLogger(__name__)

TAMANO_BLOQUE = 1024


@dataclass(frozen=True)
class EstimacionMomento:
    """Media muestral, error estándar y número de muestras."""
    media: complex
    error_estandar: float
    muestras: int

    @classmethod
    def desde_valores(cls, valores):
        valores = np.asarray(valores)
        n = valores.size
        media = valores.mean()
        error = float(np.std(valores, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        if np.isrealobj(valores):
            media = float(media)
        else:
            media = complex(media)
        return cls(media, error, n)

    def compatible(self, referencia, sigmas=4.0, piso=0.0):
        """|media - referencia| ≤ sigmas·error_estandar + piso."""
        return abs(self.media - referencia) <= sigmas * self.error_estandar + piso


def muestrear(funcion, muestras, semilla, hilos=1):
    """
    Aplica funcion(rng) a `muestras` generadores independientes.

    Returns:
        np.ndarray: valores en el orden del índice de trayectoria
    """
    if muestras < 1:
        raise ParametrosInvalidosError(f"El número de muestras debe ser ≥ 1. Valor recibido: {muestras}")
    if hilos < 1:
        raise ParametrosInvalidosError(f"El número de hilos debe ser ≥ 1. Valor recibido: {hilos}")

    def bloque(inicio):
        fin = min(inicio + TAMANO_BLOQUE, muestras)
        return np.array([funcion(generador_trayectoria(semilla, indice))
                         for indice in range(inicio, fin)])

    inicios = range(0, muestras, TAMANO_BLOQUE)
    if hilos == 1:
        partes = [bloque(inicio) for inicio in inicios]
    else:
        with ThreadPoolExecutor(max_workers=hilos) as ejecutor:
            partes = list(ejecutor.map(bloque, inicios))
    return np.concatenate(partes)


def _producto_q(params, x, n):
    """∏ q^{x_{n_i} + n_i}, nulo si algún n_i = 0."""
    if any(v == 0 for v in n):
        return 0.0
    return params.q ** sum(x[v - 1] + v for v in n)


def mc_momento(params, n, t, muestras, semilla, x0=None, hilos=1):
    """Estimación de E ∏ q^{x_{n_i}(t) + n_i} (escalón por defecto)."""
    if not isinstance(n, MultiIndice):
        n = MultiIndice(tuple(n))
    if any(v > params.N for v in n.n):
        raise ParametrosInvalidosError(f"Los índices deben ser ≤ N={params.N}. Valor recibido: {n.n}")
    x0 = x0 or configuracion_escalon(params.N)

    def valor(rng):
        return _producto_q(params, simular_pushasep(params, x0, t, rng).x, n.n)

    return EstimacionMomento.desde_valores(muestrear(valor, muestras, semilla, hilos))


def posiciones_finales(params, t, muestras, semilla, x0=None, hilos=1):
    """Arreglo (muestras, N) de posiciones en t."""
    x0 = x0 or configuracion_escalon(params.N)
    return muestrear(lambda rng: simular_pushasep(params, x0, t, rng).x, muestras, semilla, hilos)


def momentos_desde_posiciones(params, posiciones, indices):
    """{n: EstimacionMomento} de E ∏ q^{x_{n_i} + n_i}, todos con las mismas trayectorias."""
    posiciones = np.asarray(posiciones, dtype=float)
    estimaciones = {}
    for n in indices:
        n = tuple(n)
        exponente = sum(posiciones[:, v - 1] + v for v in n)
        estimaciones[n] = EstimacionMomento.desde_valores(params.q ** exponente)
    return estimaciones


def mc_qlaplace(params, n_indice, t, zeta, muestras, semilla, hilos=1):
    """Estimación (compleja) de E[1/(ζ q^{x_n(t)+n}; q)_∞]."""
    zeta = complex(zeta)
    if zeta.imag == 0 and zeta.real > 0:
        raise ParametrosInvalidosError(f"ζ no puede ser real positivo. Valor recibido: {zeta}")
    if not (1 <= n_indice <= params.N):
        raise ParametrosInvalidosError(f"n debe estar en 1..{params.N}. Valor recibido: {n_indice}")
    x0 = configuracion_escalon(params.N)
    alturas = muestrear(lambda rng: simular_pushasep(params, x0, t, rng).x[n_indice - 1] + n_indice,
                        muestras, semilla, hilos)
    valores = inverso_qpoch_inf(zeta * params.q ** alturas.astype(float), params.q)
    return EstimacionMomento.desde_valores(valores)


# ============================
# VERIFICACIONES ESTADÍSTICAS
# ============================
def verificar_dualidad_generalizada(params, x0, y0, t, muestras, semilla, hilos=1):
    """
    Ambos lados de E_x H(x(t), y) = E_y[H(x, y(t)) e^{∫C}].

    Returns:
        dict: estimaciones de cada lado y si coinciden a 4σ
    """
    lado_x = EstimacionMomento.desde_valores(muestrear(
        lambda rng: observable_H(simular_pushasep(params, x0, t, rng), y0, params.q),
        muestras, semilla, hilos))

    def ponderado(rng):
        y, peso = simular_dual_ponderado(params, y0, t, rng)
        return observable_H(x0, y, params.q) * peso

    lado_y = EstimacionMomento.desde_valores(muestrear(ponderado, muestras, semilla + 1, hilos))
    sigma = float(np.hypot(lado_x.error_estandar, lado_y.error_estandar))
    return {'lado_particulas': lado_x, 'lado_dual': lado_y,
            'diferencia': abs(lado_x.media - lado_y.media), 'sigma': sigma,
            'compatible': abs(lado_x.media - lado_y.media) <= 4 * sigma}


def autonomia_primera_particula(params, t, muestras, semilla, k=1, hilos=1):
    """
    Ley de x_1(t) con N partículas frente a una sola partícula con la misma a_1.

    Incluye media y varianza de x_1(t) + 1 frente a las de la ley de Skellam.
    """
    sola = params.con(a=(params.velocidad(1),))
    completo = posiciones_finales(params, t, muestras, semilla, hilos=hilos)[:, 0] + 1
    aislado = posiciones_finales(sola, t, muestras, semilla + 1, hilos=hilos)[:, 0] + 1
    a1 = params.velocidad(1)
    media = (params.R * a1 - params.L / a1) * t
    varianza = (params.R * a1 + params.L / a1) * t
    momento_N = EstimacionMomento.desde_valores(params.q ** (k * completo.astype(float)))
    momento_1 = EstimacionMomento.desde_valores(params.q ** (k * aislado.astype(float)))
    return {
        'momento_N': momento_N,
        'momento_1': momento_1,
        'media_empirica': float(completo.mean()),
        'media_skellam': media,
        'varianza_empirica': float(completo.var(ddof=1)),
        'varianza_skellam': varianza,
        'ks_pvalor': float(stats.ks_2samp(completo, aislado).pvalue),
    }


def sandwich_poisson(params, t, muestras, semilla, hilos=1):
    """Saltos a la izquierda de x_N frente a la media Poisson L Σ a_i^{-1} t que los domina."""
    x0 = configuracion_escalon(params.N)

    def conteo(rng):
        _, trayectoria = simular_pushasep(params, x0, t, rng, registrar=True)
        return trayectoria.contar('izquierda', params.N)

    conteos = muestrear(conteo, muestras, semilla, hilos)
    cota = params.L * sum(1 / a for a in params.a) * t
    estimacion = EstimacionMomento.desde_valores(conteos.astype(float))
    return {'conteo': estimacion, 'media_poisson': cota,
            'dominado': estimacion.media <= cota + 4 * estimacion.error_estandar}


def momento_arreglo(params, n, t, muestras, semilla, hilos=1):
    """E ∏ q^{x_{n_i}(t) + n_i} con x_n = λ^{(n)}_n - n desde el arreglo 2D."""
    if not isinstance(n, MultiIndice):
        n = MultiIndice(tuple(n))

    def valor(rng):
        return _producto_q(params, simular_arreglo2d(params, t, rng).marginal_izquierda(), n.n)

    return EstimacionMomento.desde_valores(muestrear(valor, muestras, semilla, hilos))


def posiciones_arreglo(params, t, muestras, semilla, hilos=1):
    """Arreglo (muestras, N) de la marginal izquierda x_n = λ^{(n)}_n - n del arreglo 2D."""
    return muestrear(lambda rng: simular_arreglo2d(params, t, rng).marginal_izquierda(),
                     muestras, semilla, hilos)


def prueba_chi_cuadrado_gap(params, alfa, cadenas, t, semilla, frecuencia_minima=5.0):
    """
    Cadenas independientes iniciadas en qGeo(α/R) y evaluadas en t frente a qGeo.

    Las clases con frecuencia esperada pequeña se agrupan en la cola.
    """
    ley = LeyQGeo.desde_alfa(params, alfa)
    soporte = np.arange(200)
    masa = qgeo_pmf(ley, soporte)
    pesos = masa / masa.sum()

    def cadena(rng):
        inicial = int(rng.choice(soporte.size, p=pesos))
        return simular_cadena_gap(params, alfa, inicial, t, rng)

    finales = muestrear(cadena, cadenas, semilla)
    esperada = masa * cadenas
    corte = max(int(np.argmax(esperada < frecuencia_minima)), 1)
    observadas = np.array([np.sum(finales == g) for g in range(corte)] + [np.sum(finales >= corte)])
    esperadas = np.concatenate((esperada[:corte], [cadenas - esperada[:corte].sum()]))
    resultado = stats.chisquare(observadas, esperadas)
    return {'estadistico': float(resultado.statistic), 'pvalor': float(resultado.pvalue),
            'clases': len(observadas)}


def comparar_limite_escalamiento(sp, tau, trayectorias, semilla, hilos=1):
    """
    Media de G_1 reescalado del q-PushASEP frente a la jerarquía SDE con G_0 = +∞.

    Con G_0 = +∞ el primer nivel no siente repulsión, igual que la partícula
    x_1, que no tiene vecina a la derecha.
    """
    verificar_presupuesto(sp, tau, trayectorias)
    params = parametros_desde_escalamiento(sp)
    t = tiempo_microscopico(sp, tau)
    G_micro = reescalar_pushasep(sp, posiciones_finales(params, t, trayectorias, semilla, hilos=hilos))
    G_sde = simular_jerarquia_sde(sp.con(G0=np.inf), tau, trayectorias, semilla + 1)
    filas = []
    for k in range(1, sp.N + 1):
        micro = EstimacionMomento.desde_valores(G_micro[:, k - 1])
        limite = EstimacionMomento.desde_valores(G_sde[:, k - 1])
        filas.append({'k': k, 'media_pushasep': micro.media, 'error_pushasep': micro.error_estandar,
                      'media_sde': limite.media, 'error_sde': limite.error_estandar,
                      'diferencia': abs(micro.media - limite.media)})
    return pd.DataFrame(filas)
