"""
Sistema de ejecución de experimentos múltiples y de la batería de aceptación.
"""

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import itertools
import logging
import time
from datetime import datetime

import numpy as np
import pandas as pd
from scipy import stats

from config.parametros import obtener_parametros, construir_parametros
from config.escenarios import ESCENARIOS, obtener_escenario
from core.contorno import (
    EspecificacionCuadratura,
    construir_contornos,
    momento_contorno,
    momento_contorno_detallado,
    verificar_condiciones_libres,
    verificar_suma_parcial,
)
from core.escalamiento import (
    ParametrosEscalamiento,
    deriva_sde,
    difusion_sde,
    simular_jerarquia_sde,
)
from core.estacionario import residuo_estacionario_cadena_gap, suma_tasas_empuje
from core.evolucion import momento_exacto, momento_primera_particula, verificar_identidad_dualidad
from core.fredholm import (
    EspecificacionNucleo,
    comparar_conjetura,
    demostracion_divergencia,
    determinante_fredholm,
    estabilidad_fredholm,
)
from core.funciones_q import inverso_qpoch_inf
from core.modelo import MultiIndice, ParametrosPushASEP
from simulation.montecarlo import (
    comparar_limite_escalamiento,
    mc_momento,
    momentos_desde_posiciones,
    posiciones_arreglo,
    posiciones_finales,
)

logger = logging.getLogger(__name__)

COLUMNAS_MOMENTOS = ['q', 'R', 'L', 't', 'n', 'method', 'value_re', 'value_im',
                     'stderr', 'm_points', 'seed']


def registro_momento(params, t, n, metodo, valor, error=0.0, m_puntos=None, semilla=None):
    """Fila de la tabla de momentos con las columnas de COLUMNAS_MOMENTOS."""
    valor = complex(valor)
    return {
        'q': params.q, 'R': params.R, 'L': params.L, 't': t,
        'n': ';'.join(str(v) for v in n),
        'method': metodo,
        'value_re': valor.real, 'value_im': valor.imag,
        'stderr': error,
        'm_points': m_puntos,
        'seed': semilla,
    }


def indices_weyl(N, kmax):
    """Todos los n débilmente decrecientes con 1 ≤ k ≤ kmax y entradas en 1..N."""
    indices = []
    for k in range(1, kmax + 1):
        for n in itertools.combinations_with_replacement(range(N, 0, -1), k):
            indices.append(tuple(n))
    return indices


class RunnerExperimentos:
    """
    Clase para ejecutar y comparar los tres métodos de cálculo de momentos
    sobre varios escenarios, y para correr la batería de aceptación.
    """

    def __init__(self, parametros=None):
        """
        Inicializa el runner.

        Args:
            parametros (dict, optional): Modificaciones a los parámetros por defecto
        """
        self.parametros = obtener_parametros(parametros)
        self.resultados = {}
        self.metricas = {}

    def ejecutar_escenario(self, nombre_escenario, verbose=False, kmax=2):
        """
        Calcula momentos exactos, por contornos y por Monte Carlo para un escenario.

        Args:
            nombre_escenario (str): Nombre del escenario
            verbose (bool): Mostrar información de progreso
            kmax (int): Mayor número de factores de los momentos

        Returns:
            pd.DataFrame: Registros de momentos
        """
        if verbose:
            print(f"\n{'='*60}")
            print(f"Ejecutando: {nombre_escenario}")
            print(f"{'='*60}")

        escenario = obtener_escenario(nombre_escenario)
        parametros = obtener_parametros({**self.parametros, **escenario['parametros']})
        params = construir_parametros(parametros)
        t = parametros['t']
        muestras = parametros['muestras']
        semilla = parametros['semilla']
        cuad = EspecificacionCuadratura(parametros['puntos_contorno'], parametros['tol_contorno'])

        if verbose:
            print(f"Descripción: {escenario['descripcion']}")
            print(f"q={params.q}, R={params.R}, L={params.L}, a={params.a}, t={t}")
            print("Calculando momentos...")

        filas = []
        error_contorno = 0.0
        desviacion_mc = 0.0
        for n in indices_weyl(params.N, kmax):
            exacto = momento_exacto(params, MultiIndice(n), t)
            contorno, m_puntos = momento_contorno_detallado(params, MultiIndice(n), t, cuad=cuad)
            mc = mc_momento(params, MultiIndice(n), t, muestras, semilla, hilos=parametros['hilos'])
            filas.append(registro_momento(params, t, n, 'exact', exacto))
            filas.append(registro_momento(params, t, n, 'contour', contorno, m_puntos=m_puntos))
            filas.append(registro_momento(params, t, n, 'mc', mc.media, mc.error_estandar, semilla=semilla))
            error_contorno = max(error_contorno, abs(contorno - exacto) / max(1.0, abs(exacto)))
            if mc.error_estandar > 0:
                desviacion_mc = max(desviacion_mc, abs(mc.media - exacto) / mc.error_estandar)

        resultado = pd.DataFrame(filas, columns=COLUMNAS_MOMENTOS)
        self.resultados[nombre_escenario] = resultado
        self.metricas[nombre_escenario] = {
            'error_contorno': error_contorno,
            'desviacion_mc_sigmas': desviacion_mc,
            'momentos': len(filas) // 3,
        }

        if verbose:
            print("\nResultados:")
            print(f"  Momentos calculados: {len(filas) // 3}")
            print(f"  Máx. |contorno - exacto| relativo: {error_contorno:.2e}")
            print(f"  Máx. |MC - exacto| / σ: {desviacion_mc:.2f}")

        return resultado

    def ejecutar_todos(self, escenarios=None, verbose=False):
        """
        Ejecuta todos los escenarios.

        Args:
            escenarios (list, optional): Lista de nombres de escenarios.
                                        Si None, ejecuta todos.
            verbose (bool): Mostrar información de progreso
        """
        if escenarios is None:
            escenarios = list(ESCENARIOS.keys())
        if verbose:
            print(f"\n{'#'*60}")
            print(f"# MOMENTOS DEL q-PushASEP")
            print(f"# Total de escenarios: {len(escenarios)}")
            print(f"# Tiempo de observación: {self.parametros['t']}")
            print(f"# Fecha: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
            print(f"{'#'*60}\n")

        for i, nombre in enumerate(escenarios, 1):
            if verbose:
                print(f"\n[{i}/{len(escenarios)}] ", end="")

            try:
                self.ejecutar_escenario(nombre, verbose=verbose)
            except Exception as e:
                logger.warning("Escenario '%s' falló: %s", nombre, e)
                print(f"ERROR en escenario '{nombre}': {str(e)}")
                continue

        if verbose:
            print(f"\n{'='*60}")
            print("EXPERIMENTOS COMPLETADOS")
            print(f"{'='*60}\n")

    def generar_tabla_comparativa(self):
        """
        Genera tabla comparativa de métricas de todos los escenarios.

        Returns:
            pd.DataFrame: Tabla con métricas comparativas
        """
        if not self.metricas:
            raise ValueError("No hay resultados. Ejecute experimentos primero.")

        datos = []
        for nombre, metricas in self.metricas.items():
            escenario = ESCENARIOS[nombre]
            parametros = escenario['parametros']
            datos.append({
                'Escenario': escenario['nombre'],
                'q': parametros['q'],
                'R': parametros['R'],
                'L': parametros['L'],
                'N': len(parametros['a']),
                'Momentos': metricas['momentos'],
                'Error contorno (rel)': metricas['error_contorno'],
                'Desviación MC (σ)': metricas['desviacion_mc_sigmas'],
            })

        return pd.DataFrame(datos)

    def guardar_resultados(self, directorio='resultados'):
        """
        Guarda todos los resultados en archivos CSV.

        Args:
            directorio (str): Directorio donde guardar los archivos
        """
        os.makedirs(directorio, exist_ok=True)

        tabla = self.generar_tabla_comparativa()
        tabla.to_csv(f'{directorio}/comparativa_escenarios.csv', index=False)

        for nombre, df in self.resultados.items():
            df.to_csv(f'{directorio}/momentos_{nombre}.csv', index=False)

    def peor_escenario(self, criterio='error_contorno'):
        """
        Escenario con el mayor desacuerdo según un criterio.

        Args:
            criterio (str): 'error_contorno' o 'desviacion_mc_sigmas'

        Returns:
            tuple: (nombre_escenario, valor_metrica)
        """
        if not self.metricas:
            raise ValueError("No hay resultados. Ejecute experimentos primero.")

        peor = max(self.metricas.items(), key=lambda x: x[1].get(criterio, 0))
        return peor[0], peor[1][criterio]

    # ============================
    # BATERÍA DE ACEPTACIÓN
    # ============================
    def ejecutar_aceptacion(self, perfil='rapido', verbose=False):
        """
        Ejecuta los criterios de aceptación.

        Args:
            perfil (str): 'rapido' (tamaños reducidos) o 'completo'
            verbose (bool): Mostrar cada criterio al terminar

        Returns:
            pd.DataFrame: criterio, valor, tolerancia, aprobado, fatal, duracion_s
        """
        if perfil not in PERFILES:
            raise ValueError(f"Perfil '{perfil}' desconocido. Disponibles: {list(PERFILES)}")
        config = PERFILES[perfil]
        semilla = self.parametros['semilla']
        filas = []
        for nombre, funcion, fatal in CRITERIOS:
            inicio = time.perf_counter()
            try:
                valor, tolerancia, aprobado = funcion(config, semilla)
            except Exception as e:
                logger.warning("Criterio '%s' falló con excepción: %s", nombre, e)
                valor, tolerancia, aprobado = np.nan, np.nan, False
            duracion = time.perf_counter() - inicio
            filas.append({'criterio': nombre, 'valor': valor, 'tolerancia': tolerancia,
                          'aprobado': bool(aprobado), 'fatal': fatal, 'duracion_s': duracion})
            if not aprobado and not fatal:
                logger.warning("Criterio informativo '%s' no se cumple (valor %s)", nombre, valor)
            if verbose:
                marca = '✓' if aprobado else ('❌' if fatal else '⚠️ ')
                print(f"  {marca} {nombre}: {valor:.3g} (tol {tolerancia:.3g}) [{duracion:.1f} s]")
        return pd.DataFrame(filas)


# ============================
# CRITERIOS DE ACEPTACIÓN
# ============================
PERFILES = {
    'rapido': {
        'ensayos_dualidad': 1000,
        'grilla_q': (0.5,), 'grilla_RL': ((1.0, 1.0), (2.0, 0.5)), 'grilla_t': (0.25,),
        'N_max': 2, 'k_max': 2, 'muestras': 2000, 'muestras_arreglo': 2000,
        'trayectorias_sde': 2000, 'grilla_fredholm': ((0.5, -0.3), (0.25, -0.5 + 0.5j)),
    },
    'completo': {
        'ensayos_dualidad': 5000,
        'grilla_q': (0.3, 0.5, 0.8), 'grilla_RL': ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, 0.5)),
        'grilla_t': (0.25, 1.0), 'N_max': 4, 'k_max': 3, 'muestras': 100000,
        'muestras_arreglo': 100000, 'trayectorias_sde': 10000,
        'grilla_fredholm': ((0.5, -0.3), (1.0, -1.0), (0.25, -0.5 + 0.5j), (1.0, 0.3j)),
    },
}

A_NO_CONSTANTE = (1.0, 0.7, 1.5, 1.2, 0.9)


def criterio_dualidad(config, semilla):
    params = ParametrosPushASEP(0.5, 1.0, 1.0, A_NO_CONSTANTE)
    reporte = verificar_identidad_dualidad(params, config['ensayos_dualidad'], semilla)
    return reporte['residuo_max'], 1e-12, reporte['residuo_max'] <= 1e-12


def error_estandar_exacto(params, n, t, muestras):
    """
    Error estándar de la media de ∏ q^{x_{n_i}+n_i} con la varianza exacta.

    El segundo momento es el momento del multi-índice duplicado n ∪ n.
    Con L > 0 y q pequeño la ley de q^{x} tiene colas pesadas y la
    desviación muestral subestima la dispersión.
    """
    doble = MultiIndice(tuple(sorted(tuple(n) + tuple(n), reverse=True)))
    media = momento_exacto(params, MultiIndice(tuple(n)), t)
    varianza = momento_exacto(params, doble, t) - media ** 2
    return float(np.sqrt(max(varianza, 0.0) / muestras))


def sigmas_familia(comparaciones, error_familia=1e-3):
    """Múltiplo de σ con probabilidad gaussiana total de falsa alarma error_familia; al menos 4."""
    return max(4.0, float(stats.norm.isf(error_familia / (2 * max(comparaciones, 1)))))


def _compatibles_mc(params, t, indices, muestras, semilla, sigmas):
    """Peor |media - exacto|/(sigmas·σ) sobre indices, con σ = max(muestral, exacto)."""
    posiciones = posiciones_finales(params, t, muestras, semilla)
    peor = 0.0
    for n, estimacion in momentos_desde_posiciones(params, posiciones, indices).items():
        exacto = momento_exacto(params, MultiIndice(n), t)
        sigma = max(estimacion.error_estandar, error_estandar_exacto(params, n, t, muestras), 1e-300)
        peor = max(peor, abs(estimacion.media - exacto) / (sigmas * sigma))
    return peor


def criterio_triple_oraculo(config, semilla):
    """
    Peor |contorno - exacto| relativo sobre la grilla; la parte Monte Carlo
    cubre todos los n de Weyl con k ≤ k_max y debe quedar dentro del umbral
    de sigmas_familia con la mayor de las dos estimaciones de σ.
    """
    puntos = list(itertools.product(config['grilla_q'], config['grilla_RL'], config['grilla_t']))
    velocidades = ((1.0,) * config['N_max'], A_NO_CONSTANTE[:config['N_max']])
    indices = indices_weyl(config['N_max'], config['k_max'])
    sigmas = sigmas_familia(len(puntos) * len(velocidades) * len(indices))
    peor = 0.0
    peor_mc = 0.0
    for q, (R, L), t in puntos:
        for a in velocidades:
            params = ParametrosPushASEP(q, R, L, a)
            for n in indices:
                exacto = momento_exacto(params, MultiIndice(n), t)
                contorno = momento_contorno(params, MultiIndice(n), t)
                peor = max(peor, abs(contorno - exacto) / max(1.0, abs(exacto)))
            peor_mc = max(peor_mc, _compatibles_mc(params, t, indices, config['muestras'], semilla, sigmas))
    logger.info("Triple oráculo: peor contorno %.3e, peor Monte Carlo %.3f del umbral de %.2fσ",
                peor, peor_mc, sigmas)
    return peor, 1e-8, peor <= 1e-8 and peor_mc <= 1.0


def criterio_estructural(config, semilla):
    """Peor residuo normalizado por su tolerancia (1e-8, o 1e-5 para la ecuación libre)."""
    params = ParametrosPushASEP(0.5, 1.0, 1.0, (1.0, 0.7))
    cuad = EspecificacionCuadratura()
    n = MultiIndice((2, 1))
    escala = max(1.0, abs(momento_exacto(params, n, 0.5)))
    otra = construir_contornos(params, 2, margen=0.3)
    condiciones = verificar_condiciones_libres(params, 0.5, 2, cuad)
    normalizados = [
        abs(momento_contorno(params, n, 0.0) - 1) / 1e-8,
        abs(momento_contorno(params, MultiIndice((2, 0), weyl=False), 0.5)) / 1e-8,
        abs(momento_contorno(params, n, 0.5) - momento_contorno(params, n, 0.5, spec=otra)) / escala / 1e-8,
        condiciones['frontera'] / 1e-8,
        condiciones['acumulativa'] / 1e-8,
        condiciones['ecuacion_libre'] / 1e-5,
    ]
    peor = max(normalizados)
    return peor, 1.0, peor <= 1.0


def criterio_suma_parcial(config, semilla):
    rng = np.random.default_rng(semilla)
    peor = 0.0
    for _ in range(20):
        a = tuple(rng.uniform(0.5, 2.0, size=10))
        params = ParametrosPushASEP(0.5, 1.0, 1.0, a)
        z = rng.uniform(0.2, 1.0, size=8) * np.exp(2j * np.pi * rng.random(8))
        peor = max(peor, verificar_suma_parcial(params, 10, z))
    return peor, 1e-12, peor <= 1e-12


def criterio_primera_particula(config, semilla):
    params = ParametrosPushASEP(0.5, 1.0, 0.7, (0.8, 1.0, 1.3))
    peor = 0.0
    for k in range(1, 6):
        exacto = momento_exacto(params, MultiIndice((1,) * k), 0.7)
        cerrado = momento_primera_particula(params, k, 0.7)
        peor = max(peor, abs(exacto - cerrado) / max(1.0, abs(cerrado)))
    return peor, 1e-10, peor <= 1e-10


def criterio_crecimiento(config, semilla):
    params = ParametrosPushASEP(0.5, 1.0, 1.0, (1.0, 1.0))
    tabla = demostracion_divergencia(params, 1.0, 5).iloc[1:]
    margen = float((tabla['termino'] / tabla['cota_inferior']).min())
    return margen, 1.0, margen >= 1.0 - 1e-12


def criterio_estacionario(config, semilla):
    residuo = residuo_estacionario_cadena_gap(ParametrosPushASEP(0.5, 1.0, 1.0, (1.0,)), 0.3, 80)
    params = ParametrosPushASEP(0.5, 2.0, 1.5, (0.5, 1.3, 2.0, 0.8))
    invariante = ParametrosPushASEP(0.5, 2.0, 1.5, (1.0,))
    alfa = 0.5
    esperado = 1.5 * 2.0 / alfa
    desvio = max(abs(suma_tasas_empuje(p, alfa) - esperado) / esperado for p in (params, invariante))
    peor = max(residuo / 1e-10, desvio / 1e-12)
    return peor, 1.0, peor <= 1.0


def criterio_marginal_arreglo(config, semilla):
    """Marginal izquierda del arreglo 2D frente al momento por contornos, N ≤ 3 y k ≤ 2."""
    indices_por_N = {N: indices_weyl(N, 2) for N in (1, 2, 3)}
    sigmas = sigmas_familia(sum(len(v) for v in indices_por_N.values()))
    peor = 0.0
    for N, indices in indices_por_N.items():
        params = ParametrosPushASEP(0.5, 1.0, 1.0, (1.0,) * N)
        posiciones = posiciones_arreglo(params, 0.5, config['muestras_arreglo'], semilla + N)
        for n, estimacion in momentos_desde_posiciones(params, posiciones, indices).items():
            exacto = momento_contorno(params, MultiIndice(n), 0.5).real
            sigma = max(estimacion.error_estandar,
                        error_estandar_exacto(params, n, 0.5, config['muestras_arreglo']), 1e-300)
            peor = max(peor, abs(estimacion.media - exacto) / sigma)
    return peor, sigmas, peor <= sigmas


def criterio_fredholm(config, semilla):
    params = ParametrosPushASEP(0.5, 1.0, 1.0, (1.0,))
    tabla = comparar_conjetura(params, config['grilla_fredholm'])
    peor = float(tabla['diferencia'].max())
    cero = EspecificacionNucleo(zeta=-0.3, n=1, t=0.0, params=params)
    peor_t0 = abs(determinante_fredholm(cero) - complex(inverso_qpoch_inf(-0.3, 0.5)))
    estabilidad = estabilidad_fredholm(EspecificacionNucleo(zeta=-0.3, n=1, t=0.5, params=params))
    refinamiento = max(estabilidad['cambio_nystrom'], estabilidad['cambio_mellin_barnes'])
    valor = max(peor / 1e-4, peor_t0 / 1e-6, refinamiento / 1e-8)
    return valor, 1.0, valor <= 1.0


def criterio_sde(config, semilla):
    sp = ParametrosEscalamiento(eps=0.2, a_esc=(0.0, 0.0), r=0.5, l=0.5, dt=1e-3)
    coeficientes = abs(deriva_sde(1, 0.0, 0.0, sp) + 1) + abs(difusion_sde() - np.sqrt(2))
    trayectorias = config['trayectorias_sde']
    gruesa = simular_jerarquia_sde(sp.con(dt=0.02), 1.0, trayectorias, semilla)[:, 0]
    fina = simular_jerarquia_sde(sp.con(dt=0.01), 1.0, trayectorias, semilla + 1)[:, 0]
    sigma = np.hypot(gruesa.std(ddof=1), fina.std(ddof=1)) / np.sqrt(trayectorias)
    debil = abs(gruesa.mean() - fina.mean()) / (4 * sigma + 0.05)
    reporte = comparar_limite_escalamiento(sp.con(r=0.0, l=0.0), 0.5, min(trayectorias, 2000), semilla)
    logger.info("Comparación con el límite de escala:\n%s", reporte.to_string(index=False))
    valor = max(coeficientes / 1e-12, debil)
    return valor, 1.0, valor <= 1.0


def criterio_divergencia(config, semilla):
    con_L = demostracion_divergencia(ParametrosPushASEP(0.5, 1.0, 1.0, (1.0,)), 1.0, 8)
    sin_L = demostracion_divergencia(ParametrosPushASEP(0.5, 1.0, 0.0, (1.0,)), 1.0, 8, zeta=-0.5)
    razones = con_L['razon'].iloc[2:].to_numpy()
    crece = bool(np.all(np.diff(razones) > 0) and razones[-1] > 1)
    decae = bool(np.all(np.diff(sin_L['termino'].to_numpy()) < 0))
    return float(razones[-1]), 1.0, crece and decae


CRITERIOS = [
    ('dualidad', criterio_dualidad, True),
    ('triple_oraculo', criterio_triple_oraculo, True),
    ('estructura_momentos', criterio_estructural, True),
    ('suma_parcial', criterio_suma_parcial, True),
    ('primera_particula', criterio_primera_particula, True),
    ('crecimiento', criterio_crecimiento, True),
    ('estacionario', criterio_estacionario, True),
    ('marginal_arreglo', criterio_marginal_arreglo, True),
    ('fredholm', criterio_fredholm, False),
    ('sde', criterio_sde, True),
    ('divergencia', criterio_divergencia, True),
]


def main():
    """Función principal para ejecutar los escenarios desde línea de comandos."""
    print("\n" + "="*70)
    print(" LABORATORIO NUMÉRICO q-PushASEP")
    print("="*70)

    runner = RunnerExperimentos({'muestras': 2000})
    runner.ejecutar_todos(verbose=True)

    print("\n" + "="*70)
    print(" TABLA COMPARATIVA DE ESCENARIOS")
    print("="*70 + "\n")

    tabla = runner.generar_tabla_comparativa()
    print(tabla.to_string(index=False))

    nombre, valor = runner.peor_escenario()
    print(f"\nMayor error de contorno: {ESCENARIOS[nombre]['nombre']} ({valor:.2e})")

    print("\n" + "="*70)
    runner.guardar_resultados()

    print("\n✓ Experimentos completados exitosamente\n")

    return runner


if __name__ == "__main__":
    runner = main()
