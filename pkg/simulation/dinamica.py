"""
Simulación exacta en tiempo continuo del q-PushASEP, del proceso dual
ponderado y de la cadena de nacimiento y muerte de un gap.

El q-PushASEP usa el método de la siguiente reacción (Gibson-Bruck): un
reloj por canal, y tras cada evento solo se reescalan los relojes de los
canales cuyas tasas cambiaron. Los canales son los saltos a la derecha
de cada partícula (tasa R a_i (1 - q^{gap_i})) y los saltos a la
izquierda (tasa L / a_i); un salto a la izquierda desencadena la cascada
de empujes con probabilidades q^{gap_{j+1}}, q^{gap_{j+2}}, ...
"""

import logging
from dataclasses import dataclass

import numpy as np

from core.errores import ParametrosInvalidosError
from core.modelo import (
    ConfiguracionParticulas,
    Movimiento,
    aplicar_movimiento,
    tasa_salida_C,
    tasas_dual_markov,
    desplazar_ocupacion,
)

logger = logging.getLogger(__name__)


def generador_trayectoria(semilla, indice=0):
    """Generador Philox con clave (semilla, índice): independiente del orden de ejecución."""
    secuencia = np.random.SeedSequence(int(semilla), spawn_key=(int(indice),))
    return np.random.Generator(np.random.Philox(secuencia))


def _como_generador(semilla):
    if isinstance(semilla, np.random.Generator):
        return semilla
    return generador_trayectoria(semilla)


@dataclass(frozen=True)
class Trayectoria:
    """Eventos (tiempo, Movimiento) en orden creciente desde una configuración inicial."""
    eventos: tuple
    inicial: ConfiguracionParticulas
    horizonte: float

    def reproducir(self, hasta=None):
        """Configuración tras los eventos con tiempo ≤ hasta (por defecto el horizonte)."""
        hasta = self.horizonte if hasta is None else hasta
        cfg = self.inicial
        for tiempo, movimiento in self.eventos:
            if tiempo > hasta:
                break
            cfg = aplicar_movimiento(cfg, movimiento)
        return cfg

    def contar(self, tipo, particula):
        """Número de eventos de un tipo que desplazan a la partícula indicada."""
        return sum(1 for _, m in self.eventos
                   if m.tipo == tipo and m.i <= particula <= m.j)


# ============================
# q-PushASEP
# ============================
def _tasa_derecha(params, x, i):
    if i == 1:
        return params.R * params.a[0]
    gap = x[i - 2] - x[i - 1] - 1
    return params.R * params.a[i - 1] * (1.0 - params.q ** gap)


def simular_pushasep(params, x0, t, semilla, registrar=False):
    """
    Configuración en el tiempo t, y la Trayectoria si registrar=True.

    semilla puede ser un entero o un np.random.Generator.
    """
    if t < 0:
        raise ParametrosInvalidosError(f"El tiempo debe ser no negativo. Valor recibido: {t}")
    if x0.N != params.N:
        raise ParametrosInvalidosError(f"La configuración tiene {x0.N} partículas y los parámetros {params.N}")
    rng = _como_generador(semilla)
    N = params.N
    q = params.q
    x = list(x0.x)
    eventos = []

    # canales 0..N-1: derecha de la partícula i+1; N..2N-1: izquierda
    tasas = np.array([_tasa_derecha(params, x, i) for i in range(1, N + 1)]
                     + [params.L / a for a in params.a])
    with np.errstate(divide='ignore'):
        relojes = np.where(tasas > 0, rng.exponential(size=2 * N) / tasas, np.inf)

    while True:
        canal = int(np.argmin(relojes))
        tiempo = relojes[canal]
        if tiempo > t:
            break
        if canal < N:
            i = canal + 1
            x[i - 1] += 1
            movimiento = Movimiento('derecha', i, i, tasas[canal])
            afectados = (i, i + 1)
        else:
            i = canal - N + 1
            j = i
            # cascada con los gaps previos al movimiento
            while j < N and rng.random() < q ** (x[j - 1] - x[j] - 1):
                j += 1
            for m in range(i, j + 1):
                x[m - 1] -= 1
            movimiento = Movimiento('izquierda', i, j, tasas[canal])
            afectados = (i, j + 1)
        if registrar:
            eventos.append((float(tiempo), movimiento))

        relojes[canal] = tiempo + rng.exponential() / tasas[canal] if tasas[canal] > 0 else np.inf
        for p in set(afectados):
            if p > N:
                continue
            c = p - 1
            nueva = _tasa_derecha(params, x, p)
            if c != canal and tasas[c] > 0 and nueva > 0:
                relojes[c] = tiempo + tasas[c] / nueva * (relojes[c] - tiempo)
            elif nueva > 0 and (c == canal or tasas[c] == 0):
                relojes[c] = tiempo + rng.exponential() / nueva
            else:
                relojes[c] = np.inf
            tasas[c] = nueva

    final = ConfiguracionParticulas(tuple(x))
    if registrar:
        return final, Trayectoria(tuple(eventos), x0, float(t))
    return final


# ============================
# PROCESO DUAL PONDERADO
# ============================
def simular_dual_ponderado(params, y0, t, semilla):
    """
    Proceso dual de Markov hasta t con el peso exp(∫_0^t C(y(s)) ds).

    C es constante entre saltos, así que la integral es exacta. Se usa el
    método directo: tasas recalculadas en cada estado.
    """
    if t < 0:
        raise ParametrosInvalidosError(f"El tiempo debe ser no negativo. Valor recibido: {t}")
    if y0.N != params.N:
        raise ParametrosInvalidosError(f"El estado tiene N={y0.N} y los parámetros N={params.N}")
    rng = _como_generador(semilla)
    y = y0
    tiempo = 0.0
    integral = 0.0
    while True:
        transiciones = tasas_dual_markov(params, y)
        total = sum(tasa for _, tasa in transiciones)
        espera = rng.exponential() / total if total > 0 else np.inf
        C = tasa_salida_C(params, y)
        if tiempo + espera > t:
            integral += C * (t - tiempo)
            break
        integral += C * espera
        tiempo += espera
        tasas = np.array([tasa for _, tasa in transiciones])
        eleccion = int(rng.choice(len(transiciones), p=tasas / total))
        (j, i), _ = transiciones[eleccion]
        y = desplazar_ocupacion(y, j, i)
    return y, float(np.exp(integral))


# ============================
# CADENA DE UN GAP
# ============================
def simular_cadena_gap(params, alfa, gap_inicial, t, semilla):
    """Gap en t para la cadena con subida L y bajada (LR/α)(1 - q^g)."""
    if t < 0:
        raise ParametrosInvalidosError(f"El tiempo debe ser no negativo. Valor recibido: {t}")
    rng = _como_generador(semilla)
    g = int(gap_inicial)
    tiempo = 0.0
    factor = params.L * params.R / alfa
    while True:
        subida = params.L
        bajada = factor * (1 - params.q ** g)
        total = subida + bajada
        if total == 0:
            return g
        tiempo += rng.exponential() / total
        if tiempo > t:
            return g
        g += 1 if rng.random() * total < subida else -1
