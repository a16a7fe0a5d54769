import numpy as np
import pytest

from core.contorno import (
    PUNTOS_MAXIMOS,
    EspecificacionCuadratura,
    construir_contornos,
    integrar_adaptativo,
    momento_contorno,
    momento_contorno_detallado,
    momento_contorno_operador,
    velocidades_extendidas,
    verificar_condiciones_libres,
    verificar_suma_parcial,
)
from core.errores import GeometriaContornoError, NoConvergenciaError, ParametrosInvalidosError
from core.evolucion import momento_exacto
from core.modelo import MultiIndice, ParametrosPushASEP


# ============================
# GEOMETRÍA
# ============================
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_contornos_certificados(params_velocidades, k):
    spec = construir_contornos(params_velocidades, k)
    assert spec.valida
    assert spec.k == k
    radios = np.array(spec.radios)
    assert np.all(np.diff(radios) < 0)
    assert np.all(radios < np.array(spec.centros))
    assert all(0.0 <= s < 1.0 for s in spec.agrupamientos)
    assert all(ancho > 0 for ancho in spec.anchos)


def test_margen_excesivo_no_excluye_el_cero(params_velocidades):
    with pytest.raises(GeometriaContornoError):
        construir_contornos(params_velocidades, 2, margen=1.0)
    with pytest.raises(ParametrosInvalidosError):
        construir_contornos(params_velocidades, 2, margen=0.0)


@pytest.mark.parametrize("a", [(1.0, 1.0, 1.0), (1.0, 0.7, 1.5)])
def test_q_pequeno_deja_hueco_positivo_y_agrupa_nodos(a):
    spec = construir_contornos(ParametrosPushASEP(0.3, 1.0, 0.0, a), 3)
    izquierdos = np.array(spec.centros) - np.array(spec.radios)
    assert spec.valida
    assert np.all(izquierdos > 0)
    # hueco exterior (1 - margen)^3 q^2 min a
    assert izquierdos[0] == pytest.approx(0.9 ** 3 * 0.3 ** 2 * min(a))
    assert spec.anchos[0] == min(spec.anchos)
    assert spec.agrupamientos[0] > 0.5


def test_velocidades_ficticias(params_homogeneos):
    assert velocidades_extendidas(params_homogeneos, 4) == (1.0, 1.0, 1.0, 1.0)


def test_cuadratura_requiere_potencia_de_dos():
    with pytest.raises(ParametrosInvalidosError):
        EspecificacionCuadratura(puntos=24)
    with pytest.raises(ParametrosInvalidosError):
        EspecificacionCuadratura(puntos=8)


def test_adaptativo_sin_convergencia():
    with pytest.raises(NoConvergenciaError):
        integrar_adaptativo(lambda M: float(M), EspecificacionCuadratura(), 1)


# ============================
# MOMENTOS
# ============================
@pytest.mark.parametrize("n", [(1,), (2,), (3,), (2, 1), (3, 3), (3, 1), (2, 2, 1)])
def test_contorno_frente_a_exacto(params_velocidades, n):
    exacto = momento_exacto(params_velocidades, MultiIndice(n), 0.6)
    valor = momento_contorno(params_velocidades, MultiIndice(n), 0.6)
    assert abs(valor - exacto) <= 1e-8 * max(1.0, abs(exacto))
    assert abs(valor.imag) <= 1e-8 * max(1.0, abs(exacto))


@pytest.mark.parametrize("R, L", [(1.0, 0.0), (0.0, 1.0), (2.0, 0.5)])
def test_contorno_casos_extremos(R, L):
    params = ParametrosPushASEP(0.5, R, L, (1.0, 1.0))
    for n in [(1,), (2, 2), (2, 1)]:
        exacto = momento_exacto(params, MultiIndice(n), 0.4)
        assert abs(momento_contorno(params, MultiIndice(n), 0.4) - exacto) <= 1e-8 * max(1.0, exacto)


INDICES_K3 = [(3, 3, 3), (3, 3, 1), (3, 2, 1), (2, 2, 1), (1, 1, 1), (3, 1, 1)]


@pytest.mark.parametrize("a", [(1.0, 1.0, 1.0), (1.0, 0.7, 1.5)])
@pytest.mark.parametrize("R, L, t", [(1.0, 0.0, 0.25), (1.0, 0.0, 1.0), (1.0, 1.0, 0.25), (1.0, 1.0, 1.0)])
def test_k3_con_q_pequeno_converge_al_exacto(a, R, L, t):
    params = ParametrosPushASEP(0.3, R, L, a)
    for n in INDICES_K3:
        exacto = momento_exacto(params, MultiIndice(n), t)
        valor, M = momento_contorno_detallado(params, MultiIndice(n), t)
        assert abs(valor - exacto) <= 1e-8 * max(1.0, abs(exacto)), n
        assert M <= PUNTOS_MAXIMOS[3]


@pytest.mark.parametrize("q", [0.2, 0.3])
@pytest.mark.parametrize("n", [(3, 3, 3), (3, 2, 1), (2, 2, 1), (2, 1, 1)])
def test_k3_velocidades_no_constantes(q, n):
    params = ParametrosPushASEP(q, 1.0, 0.5, (1.0, 0.7, 1.5))
    exacto = momento_exacto(params, MultiIndice(n), 0.5)
    valor = momento_contorno(params, MultiIndice(n), 0.5)
    assert abs(valor - exacto) <= 1e-8 * max(1.0, abs(exacto))
    assert abs(valor.imag) <= 1e-8 * max(1.0, abs(exacto))


def test_momento_en_tiempo_cero(params_velocidades):
    assert momento_contorno(params_velocidades, MultiIndice((3, 2)), 0.0) == pytest.approx(1.0, abs=1e-10)


def test_indice_nulo_anula_el_momento(params_velocidades):
    valor = momento_contorno(params_velocidades, MultiIndice((2, 0), weyl=False), 0.5)
    assert abs(valor) <= 1e-10


def test_k_cero_y_puntos_usados(params_velocidades):
    assert momento_contorno_detallado(params_velocidades, MultiIndice(()), 0.5) == (1.0, 0)
    _, M = momento_contorno_detallado(params_velocidades, MultiIndice((1,)), 0.5)
    assert M >= 64 and M & (M - 1) == 0


def test_independencia_del_contorno(params_velocidades):
    n = MultiIndice((2, 1))
    otra = construir_contornos(params_velocidades, 2, margen=0.3)
    a = momento_contorno(params_velocidades, n, 0.5)
    b = momento_contorno(params_velocidades, n, 0.5, spec=otra)
    assert abs(a - b) <= 2e-10 * max(1.0, abs(a))


def test_k_maximo(params_homogeneos):
    with pytest.raises(ParametrosInvalidosError):
        momento_contorno(params_homogeneos, MultiIndice((1,) * 5), 0.5)


def test_operador_con_multiplicador_unitario(params_velocidades):
    n = MultiIndice((2, 1))
    base = momento_contorno(params_velocidades, n, 0.5)
    con_operador = momento_contorno_operador(params_velocidades, n, 0.5, [(1.0, 0, lambda z: np.ones_like(z))])
    assert abs(base - con_operador) <= 1e-10


# ============================
# EVOLUCIÓN LIBRE
# ============================
@pytest.mark.parametrize("k", [1, 2])
def test_condiciones_libres(params_homogeneos, k):
    reporte = verificar_condiciones_libres(params_homogeneos, 0.5, k)
    assert reporte['puntos'] == 2 ** k
    assert reporte['frontera'] <= 1e-8
    assert reporte['acumulativa'] <= 1e-8
    assert reporte['ecuacion_libre'] <= 1e-5


def test_ecuacion_libre_literal_sin_L(params_velocidades):
    params = params_velocidades.con(L=0.0)
    reporte = verificar_condiciones_libres(params, 0.5, 2)
    assert reporte['ecuacion_libre'] <= 1e-5
    assert reporte['ecuacion_libre_literal_L'] == pytest.approx(reporte['ecuacion_libre'])


def test_ecuacion_libre_detecta_una_derivada_equivocada(params_velocidades):
    # la diferencia central con paso 0.45 tiene error O(paso^2) sobre dm/dt
    reporte = verificar_condiciones_libres(params_velocidades.con(L=0.0), 0.5, 1, paso=0.45)
    assert reporte['ecuacion_libre'] > 1e-5


def test_ecuacion_libre_literal_L_se_informa_aparte(params_velocidades):
    reporte = verificar_condiciones_libres(params_velocidades, 0.5, 2)
    assert reporte['ecuacion_libre'] <= 1e-5
    assert np.isfinite(reporte['ecuacion_libre_literal_L'])
    assert reporte['ecuacion_libre_literal_L'] > 1e-5


def test_condiciones_libres_en_tiempo_cero_omiten_la_derivada(params_homogeneos):
    reporte = verificar_condiciones_libres(params_homogeneos, 0.0, 2)
    assert reporte['ecuacion_libre'] == 0.0


def test_condiciones_libres_k_fuera_de_rango(params_homogeneos):
    with pytest.raises(ParametrosInvalidosError):
        verificar_condiciones_libres(params_homogeneos, 0.5, 4)


def test_suma_parcial():
    rng = np.random.default_rng(5)
    params = ParametrosPushASEP(0.5, 1.0, 1.0, tuple(rng.uniform(0.5, 2.0, size=6)))
    z = rng.uniform(0.2, 1.0, size=12) * np.exp(2j * np.pi * rng.random(12))
    assert verificar_suma_parcial(params, 10, z) <= 1e-12


def test_suma_parcial_rechaza_z_en_los_polos(params_homogeneos):
    with pytest.raises(ParametrosInvalidosError):
        verificar_suma_parcial(params_homogeneos, 3, [1.0])
