import numpy as np
import pytest

from core.contorno import momento_contorno
from core.errores import ParametrosInvalidosError
from core.escalamiento import ParametrosEscalamiento
from core.evolucion import momento_exacto
from core.fredholm import qlaplace_exacto_n1
from core.modelo import (
    ConfiguracionParticulas,
    EstadoOcupacion,
    MultiIndice,
    configuracion_escalon,
)
from simulation.arreglo2d import (
    ArregloEntrelazado,
    arreglo_empaquetado,
    probabilidad_empuje_izquierda,
    simular_arreglo2d,
    tasa_salto_derecha,
)
from simulation.dinamica import (
    generador_trayectoria,
    simular_cadena_gap,
    simular_dual_ponderado,
    simular_pushasep,
)
from simulation.montecarlo import (
    EstimacionMomento,
    autonomia_primera_particula,
    comparar_limite_escalamiento,
    mc_momento,
    mc_qlaplace,
    momento_arreglo,
    muestrear,
    prueba_chi_cuadrado_gap,
    sandwich_poisson,
    verificar_dualidad_generalizada,
)


# ============================
# GENERADORES ALEATORIOS
# ============================
def test_generador_por_indice_es_determinista():
    a = generador_trayectoria(7, 3).random(5)
    b = generador_trayectoria(7, 3).random(5)
    c = generador_trayectoria(7, 4).random(5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_hilos_no_cambian_el_resultado():
    uno = muestrear(lambda rng: rng.random(), 2500, semilla=3, hilos=1)
    varios = muestrear(lambda rng: rng.random(), 2500, semilla=3, hilos=3)
    np.testing.assert_array_equal(uno, varios)
    assert uno.shape == (2500,)


def test_muestrear_valida_argumentos():
    with pytest.raises(ParametrosInvalidosError):
        muestrear(lambda rng: 0.0, 0, semilla=1)
    with pytest.raises(ParametrosInvalidosError):
        muestrear(lambda rng: 0.0, 10, semilla=1, hilos=0)


def test_estimacion_desde_valores():
    estimacion = EstimacionMomento.desde_valores([1.0, 2.0, 3.0, 4.0])
    assert estimacion.media == pytest.approx(2.5)
    assert estimacion.error_estandar == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    assert estimacion.compatible(2.6, sigmas=1)


# ============================
# DINÁMICA DEL q-PushASEP
# ============================
def test_tiempo_cero_devuelve_la_configuracion(params_velocidades):
    x0 = ConfiguracionParticulas((3, 0, -2))
    assert simular_pushasep(params_velocidades, x0, 0.0, 1) == x0


def test_simulacion_reproducible(params_velocidades):
    x0 = configuracion_escalon(3)
    assert simular_pushasep(params_velocidades, x0, 2.0, 5) == simular_pushasep(params_velocidades, x0, 2.0, 5)


def test_trayectoria_registrada(params_velocidades):
    x0 = configuracion_escalon(3)
    final, trayectoria = simular_pushasep(params_velocidades, x0, 3.0, 8, registrar=True)
    tiempos = [tiempo for tiempo, _ in trayectoria.eventos]
    assert tiempos == sorted(tiempos)
    assert all(0 <= tiempo <= 3.0 for tiempo in tiempos)
    assert trayectoria.reproducir() == final
    assert trayectoria.reproducir(hasta=0.0) == x0
    derecha = trayectoria.contar('derecha', 1)
    izquierda = trayectoria.contar('izquierda', 1)
    assert final.x[0] == x0.x[0] + derecha - izquierda


@pytest.mark.parametrize("R, L, tipo", [(1.0, 0.0, 'derecha'), (0.0, 1.0, 'izquierda')])
def test_casos_de_un_solo_lado(params_velocidades, R, L, tipo):
    params = params_velocidades.con(R=R, L=L)
    _, trayectoria = simular_pushasep(params, configuracion_escalon(3), 3.0, 2, registrar=True)
    assert len(trayectoria.eventos) > 0
    assert all(m.tipo == tipo for _, m in trayectoria.eventos)


def test_numero_de_particulas_incompatible(params_velocidades):
    with pytest.raises(ParametrosInvalidosError):
        simular_pushasep(params_velocidades, configuracion_escalon(2), 1.0, 1)


def test_mc_frente_a_exacto(params_homogeneos):
    for n in [(1,), (2,), (2, 1), (1, 1)]:
        estimacion = mc_momento(params_homogeneos, MultiIndice(n), 0.5, 4000, semilla=13)
        assert estimacion.compatible(momento_exacto(params_homogeneos, MultiIndice(n), 0.5), sigmas=4.5)


def test_mc_con_hilos_es_identico(params_homogeneos):
    n = MultiIndice((2, 1))
    uno = mc_momento(params_homogeneos, n, 0.5, 1500, semilla=3, hilos=1)
    dos = mc_momento(params_homogeneos, n, 0.5, 1500, semilla=3, hilos=2)
    assert uno == dos


def test_mc_indice_fuera_de_rango(params_homogeneos):
    with pytest.raises(ParametrosInvalidosError):
        mc_momento(params_homogeneos, MultiIndice((3,)), 0.5, 10, semilla=1)


def test_autonomia_de_la_primera_particula(params_velocidades):
    reporte = autonomia_primera_particula(params_velocidades, 1.0, 4000, semilla=21)
    error = np.sqrt(reporte['varianza_skellam'] / 4000)
    assert abs(reporte['media_empirica'] - reporte['media_skellam']) <= 4.5 * error
    sigma = np.hypot(reporte['momento_N'].error_estandar, reporte['momento_1'].error_estandar)
    assert abs(reporte['momento_N'].media - reporte['momento_1'].media) <= 4.5 * sigma


def test_sandwich_poisson(params_velocidades):
    assert sandwich_poisson(params_velocidades, 1.0, 2000, semilla=4)['dominado']


def test_qlaplace_monte_carlo(params_homogeneos):
    estimacion = mc_qlaplace(params_homogeneos, 1, 0.5, -0.3, 3000, semilla=6)
    assert estimacion.compatible(qlaplace_exacto_n1(params_homogeneos, 0.5, -0.3), sigmas=4.5)


def test_qlaplace_zeta_invalido(params_homogeneos):
    with pytest.raises(ParametrosInvalidosError):
        mc_qlaplace(params_homogeneos, 1, 0.5, 0.2, 10, semilla=1)


# ============================
# PROCESO DUAL
# ============================
def test_dual_en_tiempo_cero(params_homogeneos):
    y0 = EstadoOcupacion((0, 1, 1))
    assert simular_dual_ponderado(params_homogeneos, y0, 0.0, 1) == (y0, 1.0)


def test_dual_conserva_el_nivel_y_baja(params_velocidades):
    y0 = EstadoOcupacion((0, 0, 1, 2))
    for semilla in range(20):
        y, peso = simular_dual_ponderado(params_velocidades, y0, 1.0, semilla)
        assert y.nivel == 3
        assert peso >= 1.0
        assert sum(i * v for i, v in enumerate(y.y)) <= sum(i * v for i, v in enumerate(y0.y))


def test_dualidad_generalizada(params_homogeneos):
    reporte = verificar_dualidad_generalizada(params_homogeneos, ConfiguracionParticulas((1, -2)),
                                              EstadoOcupacion((0, 1, 1)), 0.5, 4000, semilla=17)
    assert reporte['diferencia'] <= 4.5 * reporte['sigma']


# ============================
# CADENA DE GAP
# ============================
def test_cadena_gap_no_negativa(params_una_particula):
    for semilla in range(10):
        assert simular_cadena_gap(params_una_particula, 0.5, 0, 2.0, semilla) >= 0


def test_chi_cuadrado_gap(params_una_particula):
    resultado = prueba_chi_cuadrado_gap(params_una_particula, 0.5, 2000, 1.0, semilla=12)
    assert resultado['clases'] >= 2
    assert resultado['pvalor'] > 1e-4


# ============================
# ARREGLO ENTRELAZADO
# ============================
def test_arreglo_empaquetado():
    arreglo = arreglo_empaquetado(3)
    assert arreglo.es_entrelazado()
    assert arreglo.marginal_izquierda() == (-1, -2, -3)


def test_arreglo_invalido():
    with pytest.raises(ParametrosInvalidosError):
        ArregloEntrelazado(((0,), (1, 2)))
    with pytest.raises(ParametrosInvalidosError):
        ArregloEntrelazado(((0,), (0,)))


def test_tasas_del_arreglo_empaquetado(params_velocidades):
    lam = [[0], [0, 0], [0, 0, 0]]
    assert tasa_salto_derecha(params_velocidades, lam, 1, 1) == pytest.approx(1.3 * 0.8)
    assert tasa_salto_derecha(params_velocidades, lam, 2, 1) == pytest.approx(1.3 * 1.0)
    assert tasa_salto_derecha(params_velocidades, lam, 2, 2) == 0.0


def test_empuje_izquierda_forzado(params_velocidades):
    lam = [[0], [0, 0], [0, 0, 0]]
    assert probabilidad_empuje_izquierda(params_velocidades, lam, 2, 1, 0) == 1.0


def test_arreglo_conserva_entrelazado(params_velocidades):
    for semilla in range(5):
        arreglo = simular_arreglo2d(params_velocidades, 1.5, semilla, validar=True)
        assert arreglo.es_entrelazado()
        assert arreglo.N == 3


def test_marginal_del_arreglo(params_homogeneos):
    for n in [(1,), (2,), (2, 1)]:
        estimacion = momento_arreglo(params_homogeneos, MultiIndice(n), 0.5, 3000, semilla=19)
        referencia = momento_contorno(params_homogeneos, MultiIndice(n), 0.5).real
        assert estimacion.compatible(referencia, sigmas=4.5)


def test_comparacion_con_el_limite_de_escala():
    sp = ParametrosEscalamiento(eps=0.5, a_esc=(0.0, 0.0), dt=1e-2)
    tabla = comparar_limite_escalamiento(sp, 0.2, 100, semilla=1)
    assert list(tabla['k']) == [1, 2]
    assert {'media_pushasep', 'media_sde', 'diferencia'} <= set(tabla.columns)
